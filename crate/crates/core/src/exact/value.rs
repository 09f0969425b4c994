use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use super::logmono::LogMonomial;

const EPS: f64 = f64::EPSILON;

/// Floating value with an absolute error bound accumulated through each operation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Approx {
    pub value: f64,
    pub err: f64,
}

impl Approx {
    pub fn exact(value: f64) -> Self {
        Approx { value, err: 0.0 }
    }

    /// A value produced by `ulps` correctly rounded operations.
    pub fn rounded(value: f64, ulps: f64) -> Self {
        Approx { value, err: value.abs() * ulps * EPS }
    }

    pub fn add(&self, o: &Approx) -> Approx {
        let v = self.value + o.value;
        Approx { value: v, err: self.err + o.err + v.abs() * EPS }
    }

    pub fn sub(&self, o: &Approx) -> Approx {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Approx {
        Approx { value: -self.value, err: self.err }
    }

    pub fn abs(&self) -> Approx {
        Approx { value: self.value.abs(), err: self.err }
    }

    pub fn mul(&self, o: &Approx) -> Approx {
        let v = self.value * o.value;
        let err = self.value.abs() * o.err + o.value.abs() * self.err + self.err * o.err + v.abs() * EPS;
        Approx { value: v, err }
    }

    pub fn scale(&self, k: f64) -> Approx {
        self.mul(&Approx::exact(k))
    }

    /// Division by an interval that straddles zero yields an infinite error.
    pub fn div(&self, o: &Approx) -> Approx {
        let v = self.value / o.value;
        let margin = o.value.abs() - o.err;
        if margin <= 0.0 {
            return Approx { value: v, err: f64::INFINITY };
        }
        Approx { value: v, err: (self.err + v.abs() * o.err) / margin + v.abs() * EPS }
    }

    pub fn recip(&self) -> Approx {
        Approx::exact(1.0).div(self)
    }

    pub fn powi(&self, e: i64) -> Approx {
        let base = if e < 0 { self.recip() } else { *self };
        let mut out = Approx::exact(1.0);
        for _ in 0..e.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// `ln |x|`.
    pub fn ln_abs(&self) -> Approx {
        let a = self.value.abs();
        let margin = a - self.err;
        let v = a.ln();
        if margin <= 0.0 {
            return Approx { value: v, err: f64::INFINITY };
        }
        Approx { value: v, err: self.err / margin + v.abs() * EPS + EPS }
    }

    pub fn sum(items: impl IntoIterator<Item = Approx>) -> Approx {
        items.into_iter().fold(Approx::exact(0.0), |a, b| a.add(&b))
    }
}

/// Determinant by elimination with partial pivoting; errors propagate through
/// every step. The empty matrix has determinant one.
pub fn approx_det(m: &[Vec<Approx>]) -> Approx {
    let n = m.len();
    let mut a: Vec<Vec<Approx>> = m.to_vec();
    let mut det = Approx::exact(1.0);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].value.abs().total_cmp(&a[j][col].value.abs()))
            .expect("nonempty range");
        if piv != col {
            a.swap(piv, col);
            det = det.neg();
        }
        let p = a[col][col];
        det = det.mul(&p);
        if p.value == 0.0 {
            return Approx { value: 0.0, err: det.err };
        }
        for r in col + 1..n {
            let f = a[r][col].div(&p);
            for c in col..n {
                let t = f.mul(&a[col][c]);
                a[r][c] = a[r][c].sub(&t);
            }
        }
    }
    det
}

/// Natural log of `|n|` for arbitrarily large integers.
pub fn ln_bigint(n: &BigInt) -> f64 {
    let a = n.abs();
    let bits = a.bits();
    if bits <= 1000 {
        return a.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top: BigInt = &a >> shift;
    top.to_f64().expect("64-bit value").ln() + shift as f64 * std::f64::consts::LN_2
}

/// A real number known exactly as a log-monomial, or only approximately.
#[derive(Clone, Debug, PartialEq)]
pub struct RealValue {
    pub exact: Option<LogMonomial>,
    pub approx: f64,
    pub err: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchKind {
    Exact,
    Tol,
    Fail,
}

impl RealValue {
    pub fn from_exact(m: LogMonomial) -> Self {
        let a = m.to_approx();
        RealValue { exact: Some(m), approx: a.value, err: a.err }
    }

    pub fn from_approx(a: Approx) -> Self {
        RealValue { exact: None, approx: a.value, err: a.err }
    }

    pub fn one() -> Self {
        Self::from_exact(LogMonomial::one())
    }

    pub fn as_approx(&self) -> Approx {
        Approx { value: self.approx, err: self.err }
    }

    pub fn combine(
        &self,
        other: &RealValue,
        exact: impl Fn(&LogMonomial, &LogMonomial) -> LogMonomial,
        approx: impl Fn(&Approx, &Approx) -> Approx,
    ) -> RealValue {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Self::from_exact(exact(a, b)),
            _ => Self::from_approx(approx(&self.as_approx(), &other.as_approx())),
        }
    }

    pub fn mul(&self, other: &RealValue) -> RealValue {
        self.combine(other, LogMonomial::mul, Approx::mul)
    }

    pub fn div(&self, other: &RealValue) -> RealValue {
        self.combine(other, LogMonomial::div, Approx::div)
    }

    pub fn neg(&self) -> RealValue {
        match &self.exact {
            Some(m) => Self::from_exact(m.neg()),
            None => Self::from_approx(self.as_approx().neg()),
        }
    }

    pub fn pow(&self, e: i64) -> RealValue {
        match &self.exact {
            Some(m) => Self::from_exact(m.pow(e)),
            None => Self::from_approx(self.as_approx().powi(e)),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.exact {
            Some(m) => m.is_negative(),
            None => self.approx < 0.0,
        }
    }

    /// Exact equality when both sides are exact; otherwise agreement within
    /// `tol * max(1, |a|)` plus both error bounds.
    pub fn compare(&self, other: &RealValue, tol: f64) -> MatchKind {
        if let (Some(a), Some(b)) = (&self.exact, &other.exact) {
            return if a == b { MatchKind::Exact } else { MatchKind::Fail };
        }
        let slack = tol * self.approx.abs().max(1.0) + self.err + other.err;
        if (self.approx - other.approx).abs() <= slack {
            MatchKind::Tol
        } else {
            MatchKind::Fail
        }
    }
}

/// Leading term `value * s^order` of a function at `s = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecialValue {
    pub order: i64,
    pub exact: Option<LogMonomial>,
    pub approx: f64,
    pub approx_error: f64,
}

impl SpecialValue {
    pub fn new(order: i64, value: RealValue) -> Self {
        SpecialValue { order, exact: value.exact, approx: value.approx, approx_error: value.err }
    }

    pub fn exact(order: i64, m: LogMonomial) -> Self {
        Self::new(order, RealValue::from_exact(m))
    }

    pub fn value(&self) -> RealValue {
        RealValue { exact: self.exact.clone(), approx: self.approx, err: self.approx_error }
    }

    pub fn mul(&self, other: &SpecialValue) -> SpecialValue {
        Self::new(self.order + other.order, self.value().mul(&other.value()))
    }

    pub fn div(&self, other: &SpecialValue) -> SpecialValue {
        Self::new(self.order - other.order, self.value().div(&other.value()))
    }
}
