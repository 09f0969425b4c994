use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::classgroup::ClassGroup;
use super::elem::Elem;
use super::ideal::{generator_of_product, primes_above, PrimeIdeal};
use super::QuadField;
use crate::arith::{is_prime, isqrt};
use crate::error::{Error, Result};
use crate::exact::{approx_det, solve_integral, Approx, FgAb, IntMatrix, LogMonomial, RealValue};

/// Fundamental unit `eps > 1` of a real quadratic field with its regulator `ln eps`.
#[derive(Clone, Debug)]
pub struct FundamentalUnit {
    pub unit: Elem,
    pub regulator: Approx,
    /// Period of the continued fraction.
    pub period: usize,
}

/// Expands the reduced quadratic irrational `(b0 + sqrt d) / 2`, where `b0` is
/// the largest integer below `sqrt d` congruent to `d` mod 2. The expansion is
/// purely periodic and the product of the complete quotients over one period
/// is the fundamental unit.
pub fn fundamental_unit(d: i64) -> Result<FundamentalUnit> {
    if d <= 0 {
        return Err(Error::Invalid(format!("fundamental unit needs D > 0, got {d}")));
    }
    let di = d as i128;
    let s = isqrt(d as u64) as i128;
    let b0 = if (s - di).rem_euclid(2) == 0 { s } else { s - 1 };
    let (p0, q0) = (b0, 2i128);
    let (mut p, mut q) = (p0, q0);
    let mut unit = Elem::one(d);
    let mut log = Approx::exact(0.0);
    let sqrt_d = (d as f64).sqrt();
    let mut period = 0;
    loop {
        let a = (p + s).div_euclid(q);
        // x = (p + sqrt d) / q = (p - d) / q + (2 / q) w.
        let qr = BigRational::from_integer(q.into());
        let x = Elem::new(d, BigRational::from_integer((p - di).into()) / &qr, BigRational::from_integer(2.into()) / qr);
        unit = unit.mul(&x);
        log = log.add(&Approx::rounded(((p as f64 + sqrt_d) / q as f64).ln(), 4.0).add(&Approx::exact(0.0)));
        log.err += f64::EPSILON;
        period += 1;
        let np = a * q - p;
        let nq = (di - np * np) / q;
        p = np;
        q = nq;
        if (p, q) == (p0, q0) {
            break;
        }
    }
    if !unit.is_integral() || unit.norm().abs() != BigRational::one() {
        return Err(Error::Invariant(format!("continued fraction product {unit} is not a unit")));
    }
    Ok(FundamentalUnit { unit, regulator: log, period })
}

/// The integers `(x, y)` with `eps = (x + y sqrt d) / 2`; they satisfy `x^2 - d y^2 = +-4`.
pub fn pell_coordinates(eps: &Elem) -> (BigInt, BigInt) {
    let (x, y) = eps.sqrt_form();
    let two = BigRational::from_integer(2.into());
    ((x * &two).to_integer(), (y * two).to_integer())
}

pub fn roots_of_unity(k: QuadField) -> u64 {
    match k {
        QuadField::Quadratic(-4) => 4,
        QuadField::Quadratic(-3) => 6,
        _ => 2,
    }
}

/// Class group, fundamental unit, regulator and roots of unity.
#[derive(Clone, Debug)]
pub struct FieldInvariants {
    pub field: QuadField,
    pub h: BigInt,
    pub class_group: FgAb,
    pub fundamental_unit: Option<Elem>,
    /// One for `Q` and imaginary fields.
    pub regulator: RealValue,
    pub omega: u64,
}

pub fn field_invariants(k: QuadField) -> Result<FieldInvariants> {
    let omega = roots_of_unity(k);
    match k {
        QuadField::Rational => Ok(FieldInvariants {
            field: k,
            h: BigInt::one(),
            class_group: FgAb::trivial(),
            fundamental_unit: None,
            regulator: RealValue::one(),
            omega,
        }),
        QuadField::Quadratic(d) => {
            let cg = ClassGroup::new(d)?;
            let (fundamental_unit, regulator) = if d > 0 {
                let fu = fundamental_unit(d)?;
                (Some(fu.unit), RealValue::from_approx(fu.regulator))
            } else {
                (None, RealValue::one())
            };
            Ok(FieldInvariants {
                field: k,
                h: BigInt::from(cg.order()),
                class_group: cg.group,
                fundamental_unit,
                regulator,
                omega,
            })
        }
    }
}

/// An element of `Q` or of a quadratic field.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldElem {
    Rational(BigRational),
    Quadratic(Elem),
}

impl FieldElem {
    pub fn to_display(&self) -> String {
        match self {
            FieldElem::Rational(q) => q.to_string(),
            FieldElem::Quadratic(e) => e.to_string(),
        }
    }
}

/// A finite place of `Q` or of a quadratic field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FinitePlace {
    pub p: u64,
    pub index: usize,
    pub norm: u64,
    pub prime: Option<PrimeIdeal>,
}

impl FinitePlace {
    pub fn resolve(k: QuadField, p: u64, index: usize) -> Result<FinitePlace> {
        if !is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        match k {
            QuadField::Rational => {
                if index != 0 {
                    return Err(Error::Invalid(format!("Q has one place above {p}")));
                }
                Ok(FinitePlace { p, index, norm: p, prime: None })
            }
            QuadField::Quadratic(d) => {
                let primes = primes_above(d, p);
                let pr = *primes
                    .get(index)
                    .ok_or_else(|| Error::Invalid(format!("only {} place(s) above {p}", primes.len())))?;
                Ok(FinitePlace { p, index, norm: pr.norm(), prime: Some(pr) })
            }
        }
    }

    /// Every place above `p`.
    pub fn all_above(k: QuadField, p: u64) -> Result<Vec<FinitePlace>> {
        let count = match k {
            QuadField::Rational => 1,
            QuadField::Quadratic(d) => primes_above(d, p).len(),
        };
        (0..count).map(|i| FinitePlace::resolve(k, p, i)).collect()
    }

    pub fn valuation(&self, x: &FieldElem) -> i64 {
        match (x, &self.prime) {
            (FieldElem::Rational(q), None) => {
                let pb = BigInt::from(self.p);
                let count = |n: &BigInt| {
                    let mut n = n.abs();
                    let mut k = 0i64;
                    while !n.is_zero() && (&n % &pb).is_zero() {
                        n /= &pb;
                        k += 1;
                    }
                    k
                };
                count(q.numer()) - count(q.denom())
            }
            (FieldElem::Quadratic(e), Some(pr)) => pr.valuation(e),
            _ => panic!("place and element belong to different fields"),
        }
    }

    pub fn log_norm(&self) -> LogMonomial {
        LogMonomial::log(self.norm).expect("residue field size is a prime power")
    }
}

/// The archimedean places kept as rows of the regulator matrix: all but the first.
fn kept_archimedean(k: QuadField) -> Vec<i32> {
    match k {
        QuadField::Quadratic(d) if d > 0 => vec![-1],
        _ => vec![],
    }
}

/// `log |x|_w` at an archimedean place; `sign` picks the real embedding, and
/// the complex place uses the squared modulus.
pub fn archimedean_log(x: &FieldElem, sign: i32) -> Approx {
    match x {
        FieldElem::Rational(q) => Approx::rounded(
            crate::exact::ln_bigint(q.numer()) - crate::exact::ln_bigint(q.denom()),
            2.0,
        ),
        FieldElem::Quadratic(e) if e.d > 0 => e.ln_abs_real(sign),
        FieldElem::Quadratic(e) => e.ln_abs_complex(),
    }
}

#[derive(Clone, Debug)]
pub struct SInvariants {
    pub field: QuadField,
    pub places: Vec<FinitePlace>,
    pub h: BigInt,
    pub h_s: BigInt,
    pub regulator: RealValue,
    pub r_s: RealValue,
    pub omega: u64,
    /// Fundamental unit first (real fields), then one generator per place.
    pub generators: Vec<FieldElem>,
    /// Order of the class of each place modulo the earlier places.
    pub successive_orders: Vec<u64>,
    /// `|det|` of the valuation block.
    pub valuation_index: BigInt,
}

impl SInvariants {
    /// `h_S R_S / omega`.
    pub fn euler_characteristic(&self) -> RealValue {
        let h = RealValue::from_exact(LogMonomial::rational(BigRational::new(self.h_s.clone(), self.omega.into())));
        h.mul(&self.r_s)
    }

    /// Rank of the S-unit group.
    pub fn unit_rank(&self) -> usize {
        let arch = match self.field {
            QuadField::Quadratic(d) if d > 0 => 2,
            _ => 1,
        };
        arch + self.places.len() - 1
    }
}

/// S-class number, S-regulator and S-unit generators.
pub fn s_invariants(k: QuadField, places: &[FinitePlace]) -> Result<SInvariants> {
    for (i, v) in places.iter().enumerate() {
        if places[..i].iter().any(|w| w.p == v.p && w.index == v.index) {
            return Err(Error::Invalid(format!("place {}:{} listed twice", v.p, v.index)));
        }
    }
    let inv = field_invariants(k)?;
    let mut generators = Vec::new();
    let mut orders = Vec::new();
    match k {
        QuadField::Rational => {
            for v in places {
                generators.push(FieldElem::Rational(BigRational::from_integer(v.p.into())));
                orders.push(1);
            }
        }
        QuadField::Quadratic(d) => {
            if let Some(eps) = &inv.fundamental_unit {
                generators.push(FieldElem::Quadratic(eps.clone()));
            }
            let cg = ClassGroup::new(d)?;
            let dl: Vec<Vec<BigInt>> =
                places.iter().map(|v| cg.dlog_ideal(&v.prime.expect("quadratic place").ideal)).collect();
            for i in 0..places.len() {
                let (m, ks) = successive_relation(&cg, &dl, i)?;
                let mut factors = vec![(places[i].prime.unwrap().ideal, m as i64)];
                for (j, kj) in ks.iter().enumerate() {
                    if *kj != 0 {
                        factors.push((places[j].prime.unwrap().ideal, -kj));
                    }
                }
                let g = generator_of_product(d, &factors).ok_or_else(|| {
                    Error::Invariant(format!("relation ideal for place {} is not principal", places[i].p))
                })?;
                generators.push(FieldElem::Quadratic(g));
                orders.push(m);
            }
        }
    }
    let skip = generators.len() - places.len();
    let val_block = IntMatrix::from_fn(places.len(), places.len(), |r, c| {
        BigInt::from(places[r].valuation(&generators[skip + c]))
    });
    let valuation_index = val_block.det().abs();
    let log_norms = places.iter().fold(LogMonomial::one(), |acc, v| acc.mul(&v.log_norm()));
    let arch = kept_archimedean(k);
    let r_s = if arch.is_empty() {
        RealValue::from_exact(LogMonomial::integer(valuation_index.clone()).mul(&log_norms))
    } else {
        let mut rows: Vec<Vec<Approx>> = Vec::new();
        for &sign in &arch {
            rows.push(generators.iter().map(|g| archimedean_log(g, sign)).collect());
        }
        for v in places {
            let ln = v.log_norm().to_approx();
            rows.push(generators.iter().map(|g| ln.scale(-(v.valuation(g) as f64))).collect());
        }
        RealValue::from_approx(approx_det(&rows).abs())
    };
    let h_s = &inv.h / BigInt::from(orders.iter().product::<u64>());
    Ok(SInvariants {
        field: k,
        places: places.to_vec(),
        h: inv.h,
        h_s,
        regulator: inv.regulator,
        r_s,
        omega: inv.omega,
        generators,
        successive_orders: orders,
        valuation_index,
    })
}

/// Least `m` with `m [v_i]` in the span of the earlier places' classes, and
/// the coefficients `k_j` with `m [v_i] = sum k_j [v_j]`.
fn successive_relation(cg: &ClassGroup, dl: &[Vec<BigInt>], i: usize) -> Result<(u64, Vec<i64>)> {
    let rank = cg.generators.len();
    if rank == 0 {
        return Ok((1, vec![0; i]));
    }
    let mut cols: Vec<Vec<BigInt>> = dl[..i].to_vec();
    for c in 0..cg.relations.cols() {
        cols.push(cg.relations.column(c));
    }
    let span = IntMatrix::from_columns(rank, &cols);
    for m in 1..=cg.order() as u64 {
        let target: Vec<BigInt> = dl[i].iter().map(|x| x * BigInt::from(m)).collect();
        let target = IntMatrix::from_columns(rank, &[target]);
        if let Some(sol) = solve_integral(&span, &target) {
            let ks = (0..i)
                .map(|j| sol.get(j, 0).to_i64().ok_or_else(|| Error::Budget("relation coefficient overflow".into())))
                .collect::<Result<Vec<_>>>()?;
            return Ok((m, ks));
        }
    }
    Err(Error::Invariant("class order exceeds the class number".into()))
}
