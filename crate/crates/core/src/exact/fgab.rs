use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

use super::matrix::IntMatrix;
use super::snf::smith_normal_form;

/// Finitely generated abelian group `Z^free_rank + Z/d_1 + ... + Z/d_k` with
/// every `d_i >= 2` and `d_i | d_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FgAb {
    pub free_rank: usize,
    pub invariant_factors: Vec<BigInt>,
}

impl FgAb {
    pub fn trivial() -> Self {
        FgAb { free_rank: 0, invariant_factors: vec![] }
    }

    pub fn free(rank: usize) -> Self {
        FgAb { free_rank: rank, invariant_factors: vec![] }
    }

    pub fn cyclic(n: impl Into<BigInt>) -> Self {
        let n: BigInt = n.into();
        if n.is_zero() {
            return Self::free(1);
        }
        Self::from_orders(&[n])
    }

    /// Direct sum of cyclic groups of the given orders; order `0` means `Z`.
    pub fn from_orders(orders: &[BigInt]) -> Self {
        cokernel_group(&IntMatrix::diagonal(orders))
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn torsion_order(&self) -> BigInt {
        self.invariant_factors.iter().product::<BigInt>()
    }

    /// `None` for infinite groups.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.torsion_order())
    }

    pub fn torsion(&self) -> FgAb {
        FgAb { free_rank: 0, invariant_factors: self.invariant_factors.clone() }
    }

    pub fn direct_sum(&self, other: &FgAb) -> FgAb {
        let mut orders: Vec<BigInt> = self.invariant_factors.clone();
        orders.extend(other.invariant_factors.iter().cloned());
        orders.extend(std::iter::repeat(BigInt::zero()).take(self.free_rank + other.free_rank));
        Self::from_orders(&orders)
    }
}

impl fmt::Display for FgAb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.invariant_factors.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `Z^rows / A Z^cols`.
pub fn cokernel_group(a: &IntMatrix) -> FgAb {
    cokernel_with_lifts(a).group
}

/// A quotient `Z^n / im A` together with, for each invariant factor and each
/// free summand, a lift of its generator to `Z^n`, and the coordinate map
/// `Z^n -> Z^n` whose rows `rank..n` give free coordinates.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub group: FgAb,
    /// Lifts of the cyclic torsion generators, aligned with `group.invariant_factors`.
    pub torsion_lifts: Vec<Vec<BigInt>>,
    /// Lifts of a basis of the free quotient.
    pub free_lifts: Vec<Vec<BigInt>>,
    /// `coords * x` expresses `x` in the adapted basis; entry `i` is read
    /// modulo `diag[i]` (zero meaning an integer coordinate).
    pub coords: IntMatrix,
    pub diag: Vec<BigInt>,
}

impl Quotient {
    /// Free coordinates (in the basis dual to `free_lifts`) of a vector of `Z^n`.
    pub fn free_coordinates(&self, x: &[BigInt]) -> Vec<BigInt> {
        let y = self.coords.mul_vec(x);
        let start = y.len() - self.group.free_rank;
        y[start..].to_vec()
    }

    /// Coordinates modulo the invariant factors followed by free coordinates.
    pub fn reduce(&self, x: &[BigInt]) -> Vec<BigInt> {
        use num_integer::Integer;
        let y = self.coords.mul_vec(x);
        let skip = self.diag.iter().take_while(|d| d.is_one()).count();
        y.into_iter()
            .enumerate()
            .skip(skip)
            .map(|(i, v)| if self.diag[i].is_zero() { v } else { v.mod_floor(&self.diag[i]) })
            .collect()
    }
}

pub fn cokernel_with_lifts(a: &IntMatrix) -> Quotient {
    let n = a.rows();
    let s = smith_normal_form(a);
    let diag: Vec<BigInt> =
        (0..n).map(|i| if i < s.rank { s.d.get(i, i).clone() } else { BigInt::zero() }).collect();
    let mut torsion_lifts = Vec::new();
    let mut factors = Vec::new();
    for (i, d) in diag.iter().enumerate().take(s.rank) {
        if !d.is_one() {
            factors.push(d.clone());
            torsion_lifts.push(s.u_inv.column(i));
        }
    }
    let free_lifts = (s.rank..n).map(|i| s.u_inv.column(i)).collect();
    Quotient {
        group: FgAb { free_rank: n - s.rank, invariant_factors: factors },
        torsion_lifts,
        free_lifts,
        coords: s.u,
        diag,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cokernel_examples() {
        let g = cokernel_group(&IntMatrix::from_i64(&[&[2, 0], &[0, 3]]));
        assert_eq!(g, FgAb { free_rank: 0, invariant_factors: vec![BigInt::from(6)] });
        let g = cokernel_group(&IntMatrix::zeros(1, 0));
        assert_eq!(g, FgAb::free(1));
        let g = cokernel_group(&IntMatrix::from_i64(&[&[2, 3]]));
        assert!(g.is_trivial());
    }

    #[test]
    fn direct_sum_recombines_factors() {
        let g = FgAb::cyclic(2).direct_sum(&FgAb::cyclic(3)).direct_sum(&FgAb::free(1));
        assert_eq!(g.to_string(), "Z + Z/6");
        assert_eq!(g.order(), None);
        assert_eq!(g.torsion_order(), BigInt::from(6));
    }

    #[test]
    fn lifts_generate() {
        let q = cokernel_with_lifts(&IntMatrix::from_i64(&[&[2], &[0]]));
        assert_eq!(q.group.to_string(), "Z + Z/2");
        assert_eq!(q.reduce(&q.torsion_lifts[0]), vec![BigInt::one(), BigInt::zero()]);
        assert_eq!(q.free_coordinates(&q.free_lifts[0]), vec![BigInt::one()]);
    }
}
