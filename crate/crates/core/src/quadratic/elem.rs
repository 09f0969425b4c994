use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

use crate::exact::{ln_bigint, Approx};

/// `u + v w` in the quadratic field of discriminant `d`, where
/// `w = (d + sqrt d) / 2` satisfies `w^2 = d w + n` with `n = (d - d^2) / 4`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Elem {
    pub d: i64,
    pub u: BigRational,
    pub v: BigRational,
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

impl Elem {
    pub fn new(d: i64, u: BigRational, v: BigRational) -> Self {
        Elem { d, u, v }
    }

    pub fn integer(d: i64, k: impl Into<BigInt>) -> Self {
        Elem { d, u: BigRational::from_integer(k.into()), v: BigRational::zero() }
    }

    pub fn from_ints(d: i64, u: i64, v: i64) -> Self {
        Elem { d, u: q(u), v: q(v) }
    }

    /// `x + y sqrt d`.
    pub fn from_sqrt_form(d: i64, x: BigRational, y: BigRational) -> Self {
        // sqrt d = 2 w - d.
        let u = x - &y * q(d);
        let v = y * q(2);
        Elem { d, u, v }
    }

    /// `(x, y)` with `self = x + y sqrt d`.
    pub fn sqrt_form(&self) -> (BigRational, BigRational) {
        let y = &self.v / q(2);
        let x = &self.u + &y * q(self.d);
        (x, y)
    }

    fn n(&self) -> BigRational {
        q((self.d - self.d * self.d) / 4)
    }

    pub fn one(d: i64) -> Self {
        Self::integer(d, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    pub fn mul(&self, o: &Elem) -> Elem {
        debug_assert_eq!(self.d, o.d);
        let vv = &self.v * &o.v;
        let u = &self.u * &o.u + &vv * self.n();
        let v = &self.u * &o.v + &o.u * &self.v + vv * q(self.d);
        Elem { d: self.d, u, v }
    }

    pub fn conj(&self) -> Elem {
        // conj(w) = d - w.
        Elem { d: self.d, u: &self.u + &self.v * q(self.d), v: -&self.v }
    }

    pub fn norm(&self) -> BigRational {
        &self.u * &self.u + &self.u * &self.v * q(self.d) - &self.v * &self.v * self.n()
    }

    pub fn trace(&self) -> BigRational {
        &self.u * q(2) + &self.v * q(self.d)
    }

    pub fn inv(&self) -> Elem {
        let nm = self.norm();
        assert!(!nm.is_zero(), "inverse of zero");
        let c = self.conj();
        Elem { d: self.d, u: c.u / &nm, v: c.v / nm }
    }

    pub fn div(&self, o: &Elem) -> Elem {
        self.mul(&o.inv())
    }

    pub fn neg(&self) -> Elem {
        Elem { d: self.d, u: -&self.u, v: -&self.v }
    }

    pub fn scale(&self, k: &BigRational) -> Elem {
        Elem { d: self.d, u: &self.u * k, v: &self.v * k }
    }

    pub fn pow(&self, e: i64) -> Elem {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut out = Elem::one(self.d);
        for _ in 0..e.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn is_integral(&self) -> bool {
        self.u.is_integer() && self.v.is_integer()
    }

    /// Least positive integer `m` with `m * self` integral.
    pub fn denominator(&self) -> BigInt {
        self.u.denom().lcm(self.v.denom())
    }

    /// Integer coordinates `(u, v)`; panics when not integral.
    pub fn int_coords(&self) -> (BigInt, BigInt) {
        assert!(self.is_integral(), "element is not integral");
        (self.u.to_integer(), self.v.to_integer())
    }

    /// `ln |sigma(self)|` for the real embedding sending `sqrt d` to
    /// `sign * sqrt d`. The embedding free of cancellation is evaluated
    /// directly and the other through the exact norm.
    pub fn ln_abs_real(&self, sign: i32) -> Approx {
        assert!(self.d > 0, "real embeddings need a positive discriminant");
        let (x, y) = self.sqrt_form();
        let same = (x.is_negative() == y.is_negative()) || x.is_zero() || y.is_zero();
        let safe_sign = if same { 1 } else { -1 };
        let safe = ln_rational(&x.abs()).map(|lx| {
            let ratio = rational_to_f64(&(y.abs() / x.abs())) * (self.d as f64).sqrt();
            let value = lx + ratio.ln_1p();
            Approx { value, err: (value.abs() + lx.abs() + ratio + 1.0) * 8.0 * f64::EPSILON }
        });
        let safe = match safe {
            Some(a) => a,
            None => {
                // x = 0: |sigma| = |y| sqrt d.
                let ly = ln_rational(&y.abs()).expect("nonzero element");
                Approx::rounded(ly + 0.5 * (self.d as f64).ln(), 4.0)
            }
        };
        if sign == safe_sign {
            safe
        } else {
            let ln_norm = ln_rational(&self.norm().abs()).expect("nonzero element");
            Approx::rounded(ln_norm, 2.0).sub(&safe)
        }
    }

    /// `ln |N(self)|`, the log of the normalized absolute value at the complex place.
    pub fn ln_abs_complex(&self) -> Approx {
        Approx::rounded(ln_rational(&self.norm().abs()).expect("nonzero element"), 2.0)
    }

    pub fn to_f64_real(&self, sign: i32) -> f64 {
        let (x, y) = self.sqrt_form();
        rational_to_f64(&x) + sign as f64 * rational_to_f64(&y) * (self.d as f64).sqrt()
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let v = (ln_bigint(r.numer()) - ln_bigint(r.denom())).exp();
        if r.is_negative() {
            -v
        } else {
            v
        }
    })
}

/// `ln r` for positive rationals, `None` at zero.
pub(crate) fn ln_rational(r: &BigRational) -> Option<f64> {
    if r.is_zero() {
        return None;
    }
    Some(ln_bigint(r.numer()) - ln_bigint(r.denom()))
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Elem {
    /// Printed as `x + y*sqrt(d)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (x, y) = self.sqrt_form();
        if y.is_zero() {
            return write!(f, "{x}");
        }
        let ys = if y.is_one() {
            String::new()
        } else if y == -BigRational::one() {
            "-".into()
        } else {
            format!("{y}*")
        };
        if x.is_zero() {
            write!(f, "{ys}sqrt({})", self.d)
        } else if y.is_negative() {
            let ym = -&y;
            let ys = if ym.is_one() { String::new() } else { format!("{ym}*") };
            write!(f, "{x} - {ys}sqrt({})", self.d)
        } else {
            write!(f, "{x} + {ys}sqrt({})", self.d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_in_gaussian_integers() {
        // d = -4: w = -2 + i, so i = w + 2.
        let i = Elem::from_ints(-4, 2, 1);
        assert_eq!(i.mul(&i), Elem::integer(-4, -1));
        let a = Elem::from_ints(-4, 4, 1); // 2 + i
        assert_eq!(a.norm(), q(5));
        assert_eq!(a.to_string(), "2 + 1/2*sqrt(-4)");
        assert_eq!(a.mul(&a.inv()), Elem::one(-4));
    }

    #[test]
    fn real_logs_avoid_cancellation() {
        // eps = 1 + sqrt 2 in d = 8 (sqrt 8 = 2 sqrt 2).
        let two = BigRational::from_integer(2.into());
        let eps = Elem::from_sqrt_form(8, BigRational::one(), BigRational::one() / two);
        assert_eq!(eps.norm(), q(-1));
        let big = eps.pow(40);
        let l1 = big.ln_abs_real(1);
        let l2 = big.ln_abs_real(-1);
        let r = (1.0 + 2f64.sqrt()).ln();
        assert!((l1.value - 40.0 * r).abs() < 1e-11);
        assert!((l2.value + 40.0 * r).abs() < 1e-11);
    }
}
