use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::fgab::{cokernel_with_lifts, FgAb};
use super::matrix::IntMatrix;
use super::snf::smith_normal_form;
use crate::error::{invalid, Error, Result};

/// Bounded cochain complex of free abelian groups of finite rank.
/// `diffs[k]` is `d: C^(min_degree+k) -> C^(min_degree+k+1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZComplex {
    min_degree: i64,
    ranks: Vec<usize>,
    diffs: Vec<IntMatrix>,
}

#[derive(Serialize, Deserialize)]
struct RawComplex {
    min_degree: i64,
    ranks: Vec<usize>,
    diffs: Vec<Vec<Vec<i64>>>,
}

impl ZComplex {
    pub fn new(min_degree: i64, ranks: Vec<usize>, diffs: Vec<IntMatrix>) -> Result<Self> {
        if diffs.len() + 1 != ranks.len() && !(ranks.is_empty() && diffs.is_empty()) {
            return Err(Error::DimensionMismatch(format!(
                "{} terms need {} differentials, got {}",
                ranks.len(),
                ranks.len().saturating_sub(1),
                diffs.len()
            )));
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.rows() != ranks[k + 1] || d.cols() != ranks[k] {
                return Err(Error::DimensionMismatch(format!(
                    "d^{} is {}x{}, expected {}x{}",
                    min_degree + k as i64,
                    d.rows(),
                    d.cols(),
                    ranks[k + 1],
                    ranks[k]
                )));
            }
        }
        for k in 1..diffs.len() {
            if !diffs[k].mul(&diffs[k - 1]).is_zero() {
                return Err(Error::NotAComplex(min_degree + k as i64, min_degree + k as i64 - 1));
            }
        }
        Ok(ZComplex { min_degree, ranks, diffs })
    }

    pub fn empty() -> Self {
        ZComplex { min_degree: 0, ranks: vec![], diffs: vec![] }
    }

    /// The two-term complex `Z^n --A--> Z^m` in degrees `deg, deg + 1`.
    pub fn two_term(deg: i64, a: IntMatrix) -> Result<Self> {
        Self::new(deg, vec![a.cols(), a.rows()], vec![a])
    }

    pub fn min_degree(&self) -> i64 {
        self.min_degree
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn diffs(&self) -> &[IntMatrix] {
        &self.diffs
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.ranks.len()).map(move |k| self.min_degree + k as i64)
    }

    pub fn rank_at(&self, degree: i64) -> usize {
        let k = degree - self.min_degree;
        if k < 0 || k as usize >= self.ranks.len() {
            0
        } else {
            self.ranks[k as usize]
        }
    }

    /// Same complex placed `k` degrees higher.
    pub fn shift(&self, k: i64) -> Self {
        ZComplex { min_degree: self.min_degree + k, ranks: self.ranks.clone(), diffs: self.diffs.clone() }
    }

    pub fn direct_sum(&self, other: &ZComplex) -> ZComplex {
        if self.ranks.is_empty() {
            return other.clone();
        }
        if other.ranks.is_empty() {
            return self.clone();
        }
        let lo = self.min_degree.min(other.min_degree);
        let hi = (self.min_degree + self.ranks.len() as i64).max(other.min_degree + other.ranks.len() as i64);
        let ranks: Vec<usize> = (lo..hi).map(|i| self.rank_at(i) + other.rank_at(i)).collect();
        let diffs = (lo..hi - 1)
            .map(|i| self.diff_at(i).block_diag(&other.diff_at(i)))
            .collect();
        ZComplex::new(lo, ranks, diffs).expect("direct sum of complexes is a complex")
    }

    /// `d^i`, the zero map when `i` is outside the stored range.
    pub fn diff_at(&self, degree: i64) -> IntMatrix {
        let k = degree - self.min_degree;
        if k >= 0 && (k as usize) < self.diffs.len() {
            self.diffs[k as usize].clone()
        } else {
            IntMatrix::zeros(self.rank_at(degree + 1), self.rank_at(degree))
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: RawComplex = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawComplex) -> Result<Self> {
        if raw.diffs.len() + 1 != raw.ranks.len() && !raw.ranks.is_empty() {
            return invalid("diffs must have one fewer entry than ranks");
        }
        let diffs = raw
            .diffs
            .iter()
            .enumerate()
            .map(|(k, rows)| IntMatrix::from_rows(rows, raw.ranks[k]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(raw.min_degree, raw.ranks, diffs)
    }

    pub fn to_json(&self) -> String {
        let raw = RawComplex {
            min_degree: self.min_degree,
            ranks: self.ranks.clone(),
            diffs: self.diffs.iter().map(|d| d.to_i64_rows().expect("entries fit in i64")).collect(),
        };
        serde_json::to_string(&raw).expect("serializable")
    }
}

/// Cohomology in one degree together with lifts of its generators to cocycles.
#[derive(Clone, Debug)]
pub struct CohomologyBasis {
    pub degree: i64,
    pub group: FgAb,
    pub free_lifts: Vec<Vec<BigInt>>,
    pub torsion_lifts: Vec<Vec<BigInt>>,
}

/// `H^i` for every stored degree, in increasing degree.
pub fn complex_cohomology(c: &ZComplex) -> Vec<(i64, FgAb)> {
    cohomology_with_bases(c).into_iter().map(|b| (b.degree, b.group)).collect()
}

pub fn cohomology_with_bases(c: &ZComplex) -> Vec<CohomologyBasis> {
    c.degrees()
        .map(|i| {
            let n = c.rank_at(i);
            let out = smith_normal_form(&c.diff_at(i));
            let kernel_cols: Vec<usize> = (out.rank..n).collect();
            let all_rows: Vec<usize> = (0..n).collect();
            let kernel = out.v.submatrix(&all_rows, &kernel_cols);
            // Incoming boundaries expressed in the kernel basis.
            let incoming = c.diff_at(i - 1);
            let coords = out.v_inv.mul(&incoming).submatrix(&kernel_cols, &(0..incoming.cols()).collect::<Vec<_>>());
            let q = cokernel_with_lifts(&coords);
            let lift = |y: &Vec<BigInt>| kernel.mul_vec(y);
            CohomologyBasis {
                degree: i,
                free_lifts: q.free_lifts.iter().map(lift).collect(),
                torsion_lifts: q.torsion_lifts.iter().map(lift).collect(),
                group: q.group,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplication_by_two() {
        let c = ZComplex::two_term(0, IntMatrix::from_i64(&[&[2]])).unwrap();
        let h = complex_cohomology(&c);
        assert_eq!(h[0].1, FgAb::trivial());
        assert_eq!(h[1].1, FgAb::cyclic(2));
    }

    #[test]
    fn empty_complex_has_no_cohomology() {
        assert!(complex_cohomology(&ZComplex::empty()).is_empty());
    }

    #[test]
    fn rank_one_map_on_z2() {
        let c = ZComplex::two_term(0, IntMatrix::from_i64(&[&[1, 1], &[1, 1]])).unwrap();
        let h = complex_cohomology(&c);
        assert_eq!(h[0].1, FgAb::free(1));
        assert_eq!(h[1].1, FgAb::free(1));
        let b = cohomology_with_bases(&c);
        let d = c.diff_at(0);
        assert!(d.mul_vec(&b[0].free_lifts[0]).iter().all(|x| x == &BigInt::from(0)));
    }

    #[test]
    fn rejects_nonzero_square() {
        let d = IntMatrix::from_i64(&[&[1]]);
        let err = ZComplex::new(0, vec![1, 1, 1], vec![d.clone(), d]);
        assert!(matches!(err, Err(Error::NotAComplex(1, 0))));
    }

    #[test]
    fn json_round_trip() {
        let c = ZComplex::two_term(-1, IntMatrix::from_i64(&[&[3]])).unwrap();
        let back = ZComplex::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        let parsed = ZComplex::from_json(r#"{"min_degree": 0, "ranks": [2, 0], "diffs": [[]]}"#).unwrap();
        assert_eq!(complex_cohomology(&parsed)[0].1, FgAb::free(2));
    }
}
