//! Special values at `s = 0` of zeta and L-functions of arithmetic schemes,
//! computed twice: once from Weil-etale Euler characteristics (class numbers,
//! regulators, cohomology orders, Chow groups) and once analytically (Dirichlet
//! L-values, point counts over finite fields). The two routes are compared
//! exactly whenever both produce a rational times a product of `log p` powers.

pub mod analytic;
pub mod arith;
pub mod curves;
pub mod driver;
pub mod error;
pub mod exact;
pub mod frobenius;
pub mod glued;
pub mod lattice;
pub mod quadratic;

pub use error::{Error, Result};
