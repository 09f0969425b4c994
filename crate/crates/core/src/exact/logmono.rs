use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;

use super::value::{ln_bigint, Approx};
use crate::arith::prime_power;
use crate::error::{invalid, Result};

/// `coeff * prod_p (log p)^e_p` with distinct primes `p` and nonzero exponents.
/// A zero coefficient carries no log factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LogMonomial {
    coeff: BigRational,
    logs: BTreeMap<u64, i64>,
}

impl LogMonomial {
    pub fn rational(coeff: BigRational) -> Self {
        LogMonomial { coeff, logs: BTreeMap::new() }.canonical()
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Self::rational(BigRational::from_integer(n.into()))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::rational(BigRational::new(num.into(), den.into()))
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    /// `log n` for a prime power `n = p^k`, i.e. `k * log p`.
    pub fn log(n: u64) -> Result<Self> {
        logmono_normalize(BigRational::one(), &[(n, 1)])
    }

    pub fn coeff(&self) -> &BigRational {
        &self.coeff
    }

    pub fn logs(&self) -> &BTreeMap<u64, i64> {
        &self.logs
    }

    pub fn is_rational(&self) -> bool {
        self.logs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.coeff.is_negative()
    }

    fn canonical(mut self) -> Self {
        self.logs.retain(|_, e| *e != 0);
        if self.coeff.is_zero() {
            self.logs.clear();
        }
        self
    }

    pub fn mul(&self, other: &LogMonomial) -> LogMonomial {
        let mut logs = self.logs.clone();
        for (p, e) in &other.logs {
            *logs.entry(*p).or_insert(0) += e;
        }
        LogMonomial { coeff: &self.coeff * &other.coeff, logs }.canonical()
    }

    /// Panics on a zero monomial.
    pub fn inv(&self) -> LogMonomial {
        assert!(!self.coeff.is_zero(), "inverse of zero");
        LogMonomial { coeff: self.coeff.recip(), logs: self.logs.iter().map(|(p, e)| (*p, -e)).collect() }
    }

    pub fn div(&self, other: &LogMonomial) -> LogMonomial {
        self.mul(&other.inv())
    }

    pub fn neg(&self) -> LogMonomial {
        LogMonomial { coeff: -&self.coeff, logs: self.logs.clone() }
    }

    pub fn abs(&self) -> LogMonomial {
        LogMonomial { coeff: self.coeff.abs(), logs: self.logs.clone() }
    }

    pub fn scale(&self, q: &BigRational) -> LogMonomial {
        LogMonomial { coeff: &self.coeff * q, logs: self.logs.clone() }.canonical()
    }

    pub fn pow(&self, e: i64) -> LogMonomial {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut out = LogMonomial::one();
        for _ in 0..e.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// Floating evaluation with a rigorous-in-practice error bound: each
    /// elementary operation contributes one rounding of relative size `eps`.
    pub fn to_approx(&self) -> Approx {
        let c = rational_to_approx(&self.coeff);
        self.logs.iter().fold(c, |acc, (p, e)| {
            let lp = Approx::rounded((*p as f64).ln(), 2.0);
            acc.mul(&lp.powi(*e))
        })
    }

    pub fn to_f64(&self) -> f64 {
        self.to_approx().value
    }

    /// `"p/q"` (or `"p"`) for the rational coefficient.
    pub fn rational_string(&self) -> String {
        if self.coeff.denom().is_one() {
            self.coeff.numer().to_string()
        } else {
            format!("{}/{}", self.coeff.numer(), self.coeff.denom())
        }
    }
}

pub(crate) fn rational_to_approx(q: &BigRational) -> Approx {
    let (n, d) = (q.numer(), q.denom());
    match (n.to_f64(), d.to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() && b != 0.0 => {
            let exact_n = n.bits() <= 53;
            let exact_d = d.bits() <= 53;
            let ulps = 1.0 + f64::from(!exact_n as u8) + f64::from(!exact_d as u8);
            Approx::rounded(a / b, ulps)
        }
        _ => {
            let mag = (ln_bigint(n) - ln_bigint(d)).exp();
            let v = if n.is_negative() { -mag } else { mag };
            Approx { value: v, err: v.abs() * 1e-12 }
        }
    }
}

/// Rewrites `coeff * prod (log n_i)^e_i` over prime logs. Every `n_i` must be a
/// prime power `p^k`; `(log p^k)^e` becomes `k^e (log p)^e`.
pub fn logmono_normalize(coeff: BigRational, factors: &[(u64, i64)]) -> Result<LogMonomial> {
    let mut coeff = coeff;
    let mut logs = BTreeMap::new();
    for &(n, e) in factors {
        if n <= 1 {
            return invalid(format!("log {n} is not a positive log"));
        }
        let Some((p, k)) = prime_power(n) else {
            return invalid(format!("log {n} is not a multiple of a single prime log"));
        };
        let kq = BigRational::from_integer(BigInt::from(k));
        if e >= 0 {
            coeff *= num_traits::pow(kq, e as usize);
        } else {
            coeff /= num_traits::pow(kq, e.unsigned_abs() as usize);
        }
        *logs.entry(p).or_insert(0) += e;
    }
    Ok(LogMonomial { coeff, logs }.canonical())
}

impl fmt::Display for LogMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rational_string())?;
        for (p, e) in &self.logs {
            if *e == 1 {
                write!(f, "*log({p})")?;
            } else {
                write!(f, "*log({p})^{e}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn normalization_examples() {
        let a = logmono_normalize(q(1, 1), &[(9, 1)]).unwrap();
        assert_eq!(a.coeff(), &q(2, 1));
        assert_eq!(a.logs().get(&3), Some(&1));
        let b = logmono_normalize(q(1, 2), &[(5, -1)]).unwrap();
        assert_eq!(b.coeff(), &q(1, 2));
        assert_eq!(b.logs().get(&5), Some(&-1));
        let c = logmono_normalize(q(1, 1), &[(4, 2)]).unwrap();
        assert_eq!(c.coeff(), &q(4, 1));
        assert_eq!(c.logs().get(&2), Some(&2));
        assert!(logmono_normalize(q(1, 1), &[(1, 1)]).is_err());
        assert!(logmono_normalize(q(1, 1), &[(6, 1)]).is_err());
    }

    #[test]
    fn inverse_exponents_cancel() {
        let a = LogMonomial::log(5).unwrap();
        let b = a.mul(&a.inv());
        assert!(b.is_rational());
        assert_eq!(b, LogMonomial::one());
        let c = LogMonomial::log(4).unwrap().inv();
        assert_eq!(c.coeff(), &q(1, 2));
    }

    #[test]
    fn evaluation_error_is_tiny() {
        let a = LogMonomial::ratio(-1, 4).mul(&LogMonomial::log(5).unwrap());
        let v = a.to_approx();
        assert!((v.value + 5f64.ln() / 4.0).abs() <= v.err + 1e-300);
        assert!(v.err < 1e-15);
        assert_eq!(a.to_string(), "-1/4*log(5)");
    }
}
