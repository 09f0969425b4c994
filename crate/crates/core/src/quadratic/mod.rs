//! `Q` and quadratic fields: ideals, class groups via reduced forms,
//! fundamental units via continued fractions, and S-invariants.

mod classgroup;
mod elem;
mod ideal;
mod units;

use serde::Serialize;
use std::fmt;

use crate::arith::is_fundamental_discriminant;
use crate::error::{Error, Result};

pub use classgroup::{count_classes_by_forms, reduced_forms, ClassGroup, DISC_BOUND};
pub use elem::Elem;
pub use ideal::{generator_of_product, primes_above, principal_generator, splitting_type, Ideal, PrimeIdeal, Splitting};
pub use units::{
    archimedean_log, field_invariants, fundamental_unit, pell_coordinates, roots_of_unity, s_invariants, FieldElem,
    FieldInvariants, FinitePlace, FundamentalUnit, SInvariants,
};

/// `Q`, or the quadratic field of a fundamental discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum QuadField {
    Rational,
    Quadratic(i64),
}

impl QuadField {
    /// Discriminant 1 means `Q`.
    pub fn from_disc(d: i64) -> Result<Self> {
        if d == 1 {
            return Ok(QuadField::Rational);
        }
        if !is_fundamental_discriminant(d) {
            return Err(Error::Invalid(format!("{d} is not a fundamental discriminant")));
        }
        Ok(QuadField::Quadratic(d))
    }

    pub fn disc(&self) -> i64 {
        match self {
            QuadField::Rational => 1,
            QuadField::Quadratic(d) => *d,
        }
    }

    pub fn degree(&self) -> u32 {
        match self {
            QuadField::Rational => 1,
            QuadField::Quadratic(_) => 2,
        }
    }

    pub fn is_real(&self) -> bool {
        self.disc() > 0
    }

    /// Rank of the unit group of the maximal order.
    pub fn unit_rank(&self) -> usize {
        match self {
            QuadField::Quadratic(d) if *d > 0 => 1,
            _ => 0,
        }
    }

    pub fn archimedean_count(&self) -> usize {
        match self {
            QuadField::Quadratic(d) if *d > 0 => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for QuadField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadField::Rational => write!(f, "Q"),
            QuadField::Quadratic(d) => write!(f, "Q(sqrt({d}))"),
        }
    }
}
