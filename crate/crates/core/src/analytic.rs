//! Analytic side at `s = 0`: Dirichlet L-values of quadratic characters,
//! Dedekind zeta leading terms, and an Euler-Maclaurin Hurwitz zeta used to
//! certify the finite formulas.

use num_bigint::BigInt;
use num_rational::BigRational;
use std::f64::consts::PI;

use crate::arith::{is_fundamental_discriminant, kronecker};
use crate::error::{Error, Result};
use crate::exact::{Approx, LogMonomial, RealValue, SpecialValue};
use crate::quadratic::{FinitePlace, QuadField};

/// The Kronecker character `(d / .)` of a fundamental discriminant; `d = 1` is trivial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadCharacter {
    pub d: i64,
}

impl QuadCharacter {
    pub fn new(d: i64) -> Result<Self> {
        if d != 1 && !is_fundamental_discriminant(d) {
            return Err(Error::Invalid(format!("{d} is not a fundamental discriminant")));
        }
        Ok(QuadCharacter { d })
    }

    pub fn modulus(&self) -> u64 {
        self.d.unsigned_abs()
    }

    pub fn is_odd(&self) -> bool {
        self.d < 0
    }

    pub fn is_trivial(&self) -> bool {
        self.d == 1
    }

    pub fn value(&self, a: u64) -> i32 {
        if self.is_trivial() {
            return 1;
        }
        kronecker(self.d, a)
    }

    /// `(a, chi(a))` over one period `1..=|d|`.
    fn residues(&self) -> impl Iterator<Item = (u64, i32)> + '_ {
        (1..=self.modulus()).map(move |a| (a, self.value(a)))
    }
}

/// `L(0, chi) = -(1/|d|) sum chi(a) a` for odd characters.
pub fn l_chi_at_zero(chi: QuadCharacter) -> Result<BigRational> {
    if !chi.is_odd() {
        return Err(Error::Invalid(format!("L(0, chi_{}) vanishes; use the derivative", chi.d)));
    }
    let sum: i64 = chi.residues().map(|(a, c)| c as i64 * a as i64).sum();
    Ok(BigRational::new(BigInt::from(-sum), BigInt::from(chi.modulus())))
}

/// `L'(0, chi) = sum chi(a) log Gamma(a / |d|)` for even nontrivial characters.
pub fn l_chi_derivative_at_zero(chi: QuadCharacter) -> Result<Approx> {
    if chi.is_odd() || chi.is_trivial() {
        return Err(Error::Invalid(format!("derivative formula needs an even nontrivial character, got {}", chi.d)));
    }
    let m = chi.modulus() as f64;
    let terms = chi.residues().filter(|(_, c)| *c != 0).map(|(a, c)| ln_gamma(a as f64 / m).scale(c as f64));
    Ok(Approx::sum(terms))
}

/// Bernoulli numbers `B_2, B_4, ..., B_24`.
const BERNOULLI_EVEN: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

/// `log Gamma(x)` for `x > 0`: shift to `z >= 20`, then Stirling with ten
/// correction terms. For real `z > 0` the truncation error is below the first
/// omitted term.
pub fn ln_gamma(x: f64) -> Approx {
    assert!(x > 0.0, "ln_gamma needs a positive argument");
    let mut z = x;
    let mut prod = 1.0f64;
    let mut shifts = 0u32;
    while z < 20.0 {
        prod *= z;
        z += 1.0;
        shifts += 1;
    }
    let terms = 10;
    let mut series = 0.0;
    let mut zpow = z;
    for k in 1..=terms {
        let b = BERNOULLI_EVEN[k - 1];
        let kk = (2 * k) as f64;
        series += b / (kk * (kk - 1.0) * zpow);
        zpow *= z * z;
    }
    let next = {
        let kk = (2 * terms + 2) as f64;
        (BERNOULLI_EVEN[terms] / (kk * (kk - 1.0) * zpow)).abs()
    };
    let main = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln();
    let value = main + series - prod.ln();
    let rounding = (main.abs() + prod.ln().abs() + 1.0) * (shifts as f64 + 8.0) * f64::EPSILON;
    Approx { value, err: next + rounding }
}

/// Number of explicit terms and Bernoulli corrections in the Hurwitz evaluation.
const HURWITZ_TERMS: usize = 20;
const HURWITZ_CORRECTIONS: usize = 10;

/// Hurwitz zeta `sum_{n >= 0} (n + x)^-s` for real `s != 1`, `x > 0`, by
/// Euler-Maclaurin; the error estimate is ten times the first omitted term.
pub fn hurwitz_zeta(s: f64, x: f64) -> Approx {
    let n = HURWITZ_TERMS as f64;
    let mut sum = 0.0;
    for k in 0..HURWITZ_TERMS {
        sum += (k as f64 + x).powf(-s);
    }
    let a = n + x;
    sum += a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // Term k: B_2k / (2k)! * s (s+1) ... (s+2k-2) * a^(-s-2k+1).
    let mut rising = s;
    let mut fact = 2.0;
    let mut apow = a.powf(-s - 1.0);
    let mut last = 0.0;
    for k in 1..=HURWITZ_CORRECTIONS + 1 {
        let term = BERNOULLI_EVEN[k - 1] / fact * rising * apow;
        if k <= HURWITZ_CORRECTIONS {
            sum += term;
        } else {
            last = term.abs();
        }
        let j = (2 * k) as f64;
        rising *= (s + j - 1.0) * (s + j);
        fact *= (j + 1.0) * (j + 2.0);
        apow /= a * a;
    }
    Approx { value: sum, err: 10.0 * last + (HURWITZ_TERMS as f64 + 4.0) * sum.abs().max(1.0) * f64::EPSILON }
}

/// `L(s, chi) = |d|^-s sum_a chi(a) zeta_H(s, a / |d|)` for `|s| <= 1/2`.
pub fn numeric_l_oracle(chi: QuadCharacter, s: f64) -> Approx {
    let m = chi.modulus() as f64;
    let inner = Approx::sum(
        chi.residues()
            .filter(|(_, c)| *c != 0)
            .map(|(a, c)| hurwitz_zeta(s, a as f64 / m).scale(c as f64)),
    );
    inner.scale(m.powf(-s))
}

/// `zeta'(0) = -log(2 pi) / 2`.
pub fn riemann_zeta_derivative_at_zero() -> Approx {
    Approx::rounded(-0.5 * (2.0 * PI).ln(), 2.0)
}

/// Leading term at `s = 0` of `L_S(s, chi) = L(s, chi) prod_{p in S} (1 - chi(p) p^-s)`.
/// A prime with `chi(p) = 1` contributes a simple zero with factor `log p`.
pub fn l_chi_star(chi: QuadCharacter, s_primes: &[u64]) -> Result<SpecialValue> {
    let mut base = if chi.is_trivial() {
        SpecialValue::exact(0, LogMonomial::ratio(-1, 2))
    } else if chi.is_odd() {
        SpecialValue::exact(0, LogMonomial::rational(l_chi_at_zero(chi)?))
    } else {
        SpecialValue::new(1, RealValue::from_approx(l_chi_derivative_at_zero(chi)?))
    };
    for &p in s_primes {
        let factor = match chi.value(p) {
            1 => SpecialValue::exact(1, LogMonomial::log(p)?),
            -1 => SpecialValue::exact(0, LogMonomial::integer(2)),
            _ => SpecialValue::exact(0, LogMonomial::one()),
        };
        base = base.mul(&factor);
    }
    Ok(base)
}

/// Leading term of `zeta_{K,S}(s)` at `s = 0`, from `zeta_K = zeta * L(chi_D)`
/// and one factor `s log N(v)` per removed place.
pub fn dedekind_zeta_star(k: QuadField, places: &[FinitePlace]) -> Result<SpecialValue> {
    let zeta_zero = SpecialValue::exact(0, LogMonomial::ratio(-1, 2));
    let mut out = match k {
        QuadField::Rational => zeta_zero,
        QuadField::Quadratic(d) => zeta_zero.mul(&l_chi_star(QuadCharacter::new(d)?, &[])?),
    };
    for v in places {
        out = out.mul(&SpecialValue::exact(1, v.log_norm()));
    }
    Ok(out)
}
