//! Exact integer linear algebra and the value types shared by every module.

mod complex;
mod fgab;
mod logmono;
mod matrix;
mod poly;
mod snf;
mod value;

pub use complex::{complex_cohomology, cohomology_with_bases, CohomologyBasis, ZComplex};
pub use fgab::{cokernel_group, cokernel_with_lifts, FgAb, Quotient};
pub use logmono::{logmono_normalize, LogMonomial};
pub use matrix::{rat_det, IntMatrix};
pub use poly::{char_poly_reversed, IntPoly};
pub use snf::{kernel_basis, lattice_basis, smith_normal_form, solve_integral, Snf};
pub use value::{approx_det, ln_bigint, Approx, MatchKind, RealValue, SpecialValue};
