use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use std::fmt;

use crate::error::{Error, Result};
use crate::exact::{IntPoly, LogMonomial, SpecialValue};

/// `Z(t) = num(t) / den(t)` with `num(0) = den(0) = 1`; `t = q^-s`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZetaRational {
    pub q: u64,
    pub num: IntPoly,
    pub den: IntPoly,
}

fn rat(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

/// Coefficients `z_0..=z_b` of `exp(sum N_n t^n / n)`, from `k z_k = sum N_i z_{k-i}`.
pub fn exp_series(counts: &[BigInt], b: usize) -> Vec<BigRational> {
    let mut z = vec![BigRational::one()];
    for k in 1..=b {
        let mut s = BigRational::zero();
        for i in 1..=k {
            s += rat(&counts[i - 1]) * &z[k - i];
        }
        z.push(s / BigRational::from_integer(BigInt::from(k)));
    }
    z
}

/// Solves `x` in the square system `a x = rhs` over `Q`; `None` when singular.
fn solve_rational(mut a: Vec<Vec<BigRational>>, mut rhs: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        rhs.swap(col, piv);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for c in col..n {
                    let t = &f * &a[col][c];
                    a[r][c] -= t;
                }
                let t = &f * &rhs[col];
                rhs[r] -= t;
            }
        }
    }
    Some((0..n).map(|i| &rhs[i] / &a[i][i]).collect())
}

/// The lowest-degree rational function within `bounds = (deg num, deg den)`
/// whose expansion matches the counts to order `counts.len()`. Any two fits
/// within the bounds agree when enough counts are given, so the result is the
/// zeta function whenever the bounds hold.
pub fn zeta_from_counts(q: u64, counts: &[BigInt], bounds: (usize, usize)) -> Result<ZetaRational> {
    let b = counts.len();
    let (max_num, max_den) = bounds;
    if b < max_num + max_den {
        return Err(Error::NoFit(format!("{b} counts cannot pin down degrees {max_num} + {max_den}")));
    }
    let z = exp_series(counts, b);
    for total in 0..=(max_num + max_den) {
        for dd in 0..=total.min(max_den) {
            let dn = total - dd;
            if dn > max_num {
                continue;
            }
            // Unknowns den_1..den_dd from sum_j den_j z_{k-j} = 0, k = dn+1..dn+dd.
            let mut a = Vec::new();
            let mut rhs = Vec::new();
            for k in dn + 1..=dn + dd {
                a.push((1..=dd).map(|j| if j <= k { z[k - j].clone() } else { BigRational::zero() }).collect());
                rhs.push(-z[k].clone());
            }
            let Some(sol) = solve_rational(a, rhs) else { continue };
            let mut den = vec![BigRational::one()];
            den.extend(sol);
            let coeff = |k: usize| -> BigRational {
                (0..=dd.min(k)).map(|j| &den[j] * &z[k - j]).fold(BigRational::zero(), |s, t| s + t)
            };
            if (dn + dd + 1..=b).any(|k| !coeff(k).is_zero()) {
                continue;
            }
            let num: Vec<BigRational> = (0..=dn).map(coeff).collect();
            if num.last().map(|c| c.is_zero()).unwrap_or(false) && dn > 0 {
                continue;
            }
            let to_int = |v: &[BigRational]| -> Result<IntPoly> {
                v.iter()
                    .map(|c| {
                        if c.is_integer() {
                            Ok(c.to_integer())
                        } else {
                            Err(Error::NoFit(format!("fitted coefficient {c} is not an integer")))
                        }
                    })
                    .collect::<Result<Vec<_>>>()
                    .map(IntPoly::new)
            };
            return Ok(ZetaRational { q, num: to_int(&num)?, den: to_int(&den)? });
        }
    }
    Err(Error::NoFit(format!("no rational function with degrees within {bounds:?} matches the counts")))
}

impl ZetaRational {
    pub fn new(q: u64, num: IntPoly, den: IntPoly) -> Result<Self> {
        if num.coeff(0) != BigInt::one() || den.coeff(0) != BigInt::one() {
            return Err(Error::Invalid("numerator and denominator must start with 1".into()));
        }
        Ok(ZetaRational { q, num, den })
    }

    /// `N_1..=N_b` recovered from `t Z'/Z`.
    pub fn counts(&self, b: usize) -> Vec<BigInt> {
        let series = self.series(b);
        let mut n: Vec<BigRational> = Vec::new();
        for k in 1..=b {
            let mut v = BigRational::from_integer(BigInt::from(k)) * &series[k];
            for i in 1..k {
                v -= &n[i - 1] * &series[k - i];
            }
            n.push(v);
        }
        n.into_iter().map(|v| v.to_integer()).collect()
    }

    /// Power series coefficients `0..=b`.
    pub fn series(&self, b: usize) -> Vec<BigRational> {
        let mut out: Vec<BigRational> = Vec::with_capacity(b + 1);
        for k in 0..=b {
            let mut v = rat(&self.num.coeff(k));
            for j in 1..=k {
                v -= rat(&self.den.coeff(j)) * &out[k - j];
            }
            out.push(v);
        }
        out
    }

    /// Removing a closed point of degree `d` multiplies by `1 - t^d`.
    pub fn remove_point(&self, d: usize) -> ZetaRational {
        let mut f = vec![BigInt::zero(); d + 1];
        f[0] = BigInt::one();
        f[d] = -BigInt::one();
        self.mul_poly(&IntPoly::new(f)).reduced()
    }

    pub fn mul_poly(&self, p: &IntPoly) -> ZetaRational {
        ZetaRational { q: self.q, num: self.num.mul(p), den: self.den.clone() }
    }

    /// Cancels common powers of `1 - t`.
    pub fn reduced(&self) -> ZetaRational {
        let (mn, qn) = self.num.split_at_one();
        let (md, qd) = self.den.split_at_one();
        let common = mn.min(md);
        let one_minus_t = IntPoly::from_i64(&[1, -1]);
        let mut num = qn;
        for _ in 0..mn - common {
            num = num.mul(&one_minus_t);
        }
        let mut den = qd;
        for _ in 0..md - common {
            den = den.mul(&one_minus_t);
        }
        ZetaRational { q: self.q, num, den }
    }

    /// Order at `s = 0` and leading coefficient `W(1) (log q)^order` where `Z = (1 - t)^order W`.
    pub fn special_value(&self) -> SpecialValue {
        let (mn, qn) = self.num.split_at_one();
        let (md, qd) = self.den.split_at_one();
        let order = mn as i64 - md as i64;
        let one = BigRational::one();
        let w = qn.eval_rational(&one) / qd.eval_rational(&one);
        let logq = LogMonomial::log(self.q).expect("field size is a prime power");
        SpecialValue::exact(order, LogMonomial::rational(w).mul(&logq.pow(order)))
    }

    /// `P(1)` for a smooth proper curve, which is `|Pic^0|`.
    pub fn picard_zero_order(&self) -> BigInt {
        self.num.eval(&BigInt::one())
    }

    pub fn genus(&self) -> Option<usize> {
        let d = self.num.degree();
        (d >= 0 && d % 2 == 0).then_some(d as usize / 2)
    }

    /// `a_{2g-i} = q^{g-i} a_i` for the numerator of a smooth proper curve.
    pub fn functional_equation_holds(&self) -> bool {
        let Some(g) = self.genus() else { return false };
        let q = BigInt::from(self.q);
        (0..=g).all(|i| self.num.coeff(2 * g - i) == q.pow((g - i) as u32) * self.num.coeff(i))
    }

    /// Largest `f` with `den = (1 - t^f)(1 - q^f t^f)`, i.e. constants `F_{q^f}`; `1` otherwise.
    pub fn constant_field_degree(&self) -> u32 {
        let d = self.den.degree();
        if d < 2 || d % 2 != 0 {
            return 1;
        }
        let f = (d / 2) as usize;
        let qf = BigInt::from(self.q).pow(f as u32);
        let mut want = vec![BigInt::zero(); 2 * f + 1];
        want[0] = BigInt::one();
        want[f] = -(BigInt::one() + &qf);
        want[2 * f] = qf;
        if IntPoly::new(want) == self.den {
            f as u32
        } else {
            1
        }
    }

    pub fn to_json(&self) -> Value {
        let coeffs = |p: &IntPoly| -> Vec<Value> { p.coeffs().iter().map(|c| json!(c.to_string())).collect() };
        json!({
            "q": self.q,
            "numerator": coeffs(&self.num),
            "denominator": coeffs(&self.den),
            "display": self.to_string(),
        })
    }
}

impl fmt::Display for ZetaRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn projective_line() {
        for q in [2u64, 3, 4, 5] {
            let counts: Vec<BigInt> = (1..=6).map(|n| BigInt::from(q.pow(n) + 1)).collect();
            let z = zeta_from_counts(q, &counts, (2, 2)).unwrap();
            assert_eq!(z.num, IntPoly::one());
            assert_eq!(z.den, IntPoly::from_i64(&[1, -(q as i64) - 1, q as i64]));
            let sv = z.special_value();
            assert_eq!(sv.order, -1);
            let want = LogMonomial::ratio(-1, q as i64 - 1).div(&LogMonomial::log(q).unwrap());
            assert_eq!(sv.exact, Some(want));
        }
    }

    #[test]
    fn counts_round_trip() {
        let z = ZetaRational::new(5, IntPoly::from_i64(&[1, -2, 5]), IntPoly::from_i64(&[1, -6, 5])).unwrap();
        let counts = z.counts(6);
        assert_eq!(counts[0], BigInt::from(4));
        assert_eq!(zeta_from_counts(5, &counts, (2, 2)).unwrap(), z);
        assert!(z.functional_equation_holds());
        assert_eq!(z.picard_zero_order(), BigInt::from(4));
        assert_eq!(z.constant_field_degree(), 1);
    }

    #[test]
    fn degenerate_fits_are_minimal() {
        // Counts of a split nodal cubic, q^n, fit 1/(1 - qt) even with generous bounds.
        let counts = ints(&[3, 9, 27, 81, 243]);
        let z = zeta_from_counts(3, &counts, (3, 2)).unwrap();
        assert_eq!(z.num, IntPoly::one());
        assert_eq!(z.den, IntPoly::from_i64(&[1, -3]));
        assert!(zeta_from_counts(3, &ints(&[3, 9]), (2, 2)).is_err());
        // Counts that fit nothing small.
        assert!(zeta_from_counts(3, &ints(&[1, 7, 2, 40, 5, 9]), (1, 2)).is_err());
    }

    #[test]
    fn constant_field_extension_is_detected() {
        // P^1 over F_4 viewed over F_2.
        let z = ZetaRational::new(2, IntPoly::one(), IntPoly::from_i64(&[1, 0, -5, 0, 4])).unwrap();
        assert_eq!(z.constant_field_degree(), 2);
    }
}
