//! Singular one-dimensional schemes described by their normalization and the
//! fibers over singular points: `CH_0(X)`, `CH_0(X, 1)`, the regulator `R_X`,
//! and the resulting special values.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::analytic::dedekind_zeta_star;
use crate::arith::{factorize, kronecker};
use crate::curves::{CurveModel, ZetaRational};
use crate::error::{Error, Result};
use crate::exact::{
    approx_det, cokernel_group, kernel_basis, Approx, FgAb, IntMatrix, IntPoly, LogMonomial, RealValue, SpecialValue,
};
use crate::quadratic::{
    archimedean_log, field_invariants, fundamental_unit, roots_of_unity, s_invariants, Elem, FieldElem, FinitePlace,
    QuadField,
};

/// A point of the normalization lying over a singular point.
#[derive(Clone, Debug)]
pub struct FiberPoint {
    pub label: String,
    /// `f_w = [k(w) : k(v)]`.
    pub residue_degree: u32,
    pub norm: u64,
    /// The prime of the maximal order, for orders in quadratic fields.
    pub place: Option<FinitePlace>,
}

#[derive(Clone, Debug)]
pub struct SingularPoint {
    pub label: String,
    pub norm: u64,
    pub fiber: Vec<FiberPoint>,
}

impl SingularPoint {
    /// `m_v = gcd(f_w)`.
    pub fn gcd_degree(&self) -> u32 {
        self.fiber.iter().fold(0u32, |g, w| num_integer::Integer::gcd(&g, &w.residue_degree))
    }
}

#[derive(Clone, Debug, Default)]
pub struct FiberData {
    pub points: Vec<SingularPoint>,
}

impl FiberData {
    /// `t = sum (|fiber| - 1)`.
    pub fn branch_excess(&self) -> usize {
        self.points.iter().map(|v| v.fiber.len() - 1).sum()
    }

    pub fn is_unibranch(&self) -> bool {
        self.points.iter().all(|v| v.fiber.len() == 1)
    }

    fn fiber_points(&self) -> impl Iterator<Item = (usize, &FiberPoint)> {
        self.points.iter().enumerate().flat_map(|(i, v)| v.fiber.iter().map(move |w| (i, w)))
    }
}

/// A closed point of the projective line over `F_q`, named by its label.
#[derive(Clone, Debug, PartialEq)]
pub struct LinePoint {
    pub label: String,
    pub degree: u32,
}

impl LinePoint {
    pub fn new(label: &str, degree: u32) -> Self {
        LinePoint { label: label.into(), degree }
    }
}

#[derive(Clone, Debug)]
pub enum Normalization {
    /// Maximal order of a quadratic field; the scheme is the order of conductor `f`.
    Order { field: QuadField, conductor: u64 },
    /// Projective line over `F_q` minus `removed` (proper when empty).
    Line { q: u64, removed: Vec<LinePoint> },
    /// Smooth proper curve with the given zeta function, optionally minus one rational point.
    SmoothCurve { q: u64, zeta: ZetaRational, minus_rational_point: bool },
}

/// A glued scheme `X` with normalization `Y` and the fiber data over its singular points.
#[derive(Clone, Debug)]
pub struct GluedScheme {
    pub name: String,
    pub base: Normalization,
    pub fibers: FiberData,
    /// Plane model of `X` for the point-count route.
    pub model: Option<CurveModel>,
}

/// For `p | f`: one singular point of norm `p` whose fiber is the set of primes of
/// the maximal order above `p`.
pub fn singular_fibers(d: i64, conductor: u64) -> Result<FiberData> {
    if conductor == 0 {
        return Err(Error::Invalid("conductor must be positive".into()));
    }
    let k = QuadField::Quadratic(d);
    let mut points = Vec::new();
    for (p, _) in factorize(conductor) {
        let fiber = FinitePlace::all_above(k, p)?
            .into_iter()
            .map(|pl| FiberPoint {
                label: format!("{}:{}", pl.p, pl.index),
                residue_degree: pl.prime.map(|pr| pr.residue_degree).unwrap_or(1),
                norm: pl.norm,
                place: Some(pl),
            })
            .collect();
        points.push(SingularPoint { label: format!("v{p}"), norm: p, fiber });
    }
    Ok(FiberData { points })
}

/// `CH_0(X)`: the full group when its structure is computed, otherwise rank and torsion order.
#[derive(Clone, Debug)]
pub struct Ch0 {
    pub group: Option<FgAb>,
    pub free_rank: usize,
    pub torsion_order: BigInt,
}

impl Ch0 {
    fn from_group(g: FgAb) -> Self {
        Ch0 { free_rank: g.free_rank, torsion_order: g.torsion_order(), group: Some(g) }
    }

    pub fn describe(&self) -> String {
        match &self.group {
            Some(g) => g.to_string(),
            None if self.free_rank == 0 => format!("finite of order {}", self.torsion_order),
            None => format!("Z^{} + finite of order {}", self.free_rank, self.torsion_order),
        }
    }
}

/// One generator of `CH_0(X, 1)` modulo torsion.
#[derive(Clone, Debug)]
pub struct UnitGenerator {
    pub display: String,
    /// `log |f|` at the kept archimedean places.
    pub arch: Vec<Approx>,
    /// Valuations at every row place (removed points, then fiber points).
    pub orders: Vec<i64>,
}

#[derive(Clone, Debug)]
pub struct Ch0Units {
    pub rank: usize,
    pub torsion: u64,
    pub generators: Vec<UnitGenerator>,
    /// Row places in order with their norms; row `i` of `orders`.
    pub row_places: Vec<(String, u64)>,
    /// Indices into `row_places` dropped from the regulator: the first removed
    /// point and the first fiber point over each singular point.
    pub dropped: Vec<usize>,
}

impl GluedScheme {
    pub fn order(d: i64, conductor: u64) -> Result<Self> {
        let field = QuadField::from_disc(d)?;
        if field == QuadField::Rational {
            return Err(Error::Unsupported("orders are modeled in quadratic fields only".into()));
        }
        Ok(GluedScheme {
            name: format!("order of conductor {conductor} in Q(sqrt({d}))"),
            base: Normalization::Order { field, conductor },
            fibers: singular_fibers(d, conductor)?,
            model: None,
        })
    }

    /// Glues the projective line (minus `removed`) along the given fibers:
    /// each entry is a singular point of degree `deg_v` with fiber points `(label, deg_w)`.
    pub fn line(
        name: &str,
        q: u64,
        removed: Vec<LinePoint>,
        singular: &[(&str, u32, Vec<LinePoint>)],
        model: Option<CurveModel>,
    ) -> Result<Self> {
        let mut points = Vec::new();
        for (label, deg_v, fiber) in singular {
            if fiber.is_empty() {
                return Err(Error::Invalid(format!("singular point {label} has an empty fiber")));
            }
            let fiber = fiber
                .iter()
                .map(|w| {
                    if w.degree % deg_v != 0 {
                        return Err(Error::Invalid(format!("deg {} of {} is not a multiple of {deg_v}", w.degree, w.label)));
                    }
                    Ok(FiberPoint {
                        label: w.label.clone(),
                        residue_degree: w.degree / deg_v,
                        norm: q.pow(w.degree),
                        place: None,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            points.push(SingularPoint { label: label.to_string(), norm: q.pow(*deg_v), fiber });
        }
        Ok(GluedScheme { name: name.into(), base: Normalization::Line { q, removed }, fibers: FiberData { points }, model })
    }

    pub fn smooth_curve(name: &str, model: CurveModel, minus_rational_point: bool) -> Result<Self> {
        let zeta = model.zeta()?;
        let proper_zeta = if minus_rational_point {
            // The fit is in lowest terms; put back the removed point's factor.
            ZetaRational::new(model.q, zeta.num.clone(), zeta.den.mul(&IntPoly::from_i64(&[1, -1])))?.reduced()
        } else {
            zeta
        };
        Ok(GluedScheme {
            name: name.into(),
            base: Normalization::SmoothCurve { q: model.q, zeta: proper_zeta, minus_rational_point },
            fibers: FiberData::default(),
            model: Some(model),
        })
    }

    pub fn is_proper(&self) -> bool {
        match &self.base {
            Normalization::Order { .. } => false,
            Normalization::Line { removed, .. } => removed.is_empty(),
            Normalization::SmoothCurve { minus_rational_point, .. } => !minus_rational_point,
        }
    }

    fn q(&self) -> Option<u64> {
        match &self.base {
            Normalization::Order { .. } => None,
            Normalization::Line { q, .. } | Normalization::SmoothCurve { q, .. } => Some(*q),
        }
    }

    /// Roots of unity of the function field: `omega(K)`, or `q^f - 1` for constants `F_{q^f}`.
    pub fn omega(&self) -> u64 {
        match &self.base {
            Normalization::Order { field, .. } => roots_of_unity(*field),
            Normalization::Line { q, .. } => q - 1,
            Normalization::SmoothCurve { q, zeta, .. } => q.pow(zeta.constant_field_degree()) - 1,
        }
    }

    /// Weight matrix: rows singular points, columns fiber points, entries `f_w`.
    fn weights(&self) -> IntMatrix {
        let cols: Vec<(usize, u32)> = self.fibers.fiber_points().map(|(i, w)| (i, w.residue_degree)).collect();
        IntMatrix::from_fn(self.fibers.points.len(), cols.len(), |r, c| {
            if cols[c].0 == r {
                BigInt::from(cols[c].1)
            } else {
                BigInt::zero()
            }
        })
    }

    /// `coker(Z^{fiber points} -> Pic(Y) + Z^{singular}, e_w -> (cl(w), -f_w e_v))`.
    pub fn ch0(&self) -> Result<Ch0> {
        let nsing = self.fibers.points.len();
        match &self.base {
            Normalization::Order { field, .. } => {
                let QuadField::Quadratic(d) = field else { unreachable!("orders live in quadratic fields") };
                let cg = crate::quadratic::ClassGroup::new(*d)?;
                let k = cg.generators.len();
                let mut cols: Vec<Vec<BigInt>> = Vec::new();
                for c in 0..cg.relations.cols() {
                    let mut col = cg.relations.column(c);
                    col.resize(k + nsing, BigInt::zero());
                    cols.push(col);
                }
                for (i, w) in self.fibers.fiber_points() {
                    let pl = w.place.expect("order fibers carry primes");
                    let mut col = cg.dlog_ideal(&pl.prime.expect("quadratic prime").ideal);
                    col.resize(k + nsing, BigInt::zero());
                    col[k + i] = -BigInt::from(w.residue_degree);
                    cols.push(col);
                }
                Ok(Ch0::from_group(coker(k + nsing, &cols)))
            }
            Normalization::Line { q, removed } => {
                // Pic of the line minus `removed` is Z / gcd(removed degrees), by degree.
                let mut cols: Vec<Vec<BigInt>> = Vec::new();
                for r in removed {
                    let mut col = vec![BigInt::zero(); 1 + nsing];
                    col[0] = BigInt::from(r.degree);
                    cols.push(col);
                }
                for (i, w) in self.fibers.fiber_points() {
                    let deg_w = (w.norm as f64).log(*q as f64).round() as u32;
                    let mut col = vec![BigInt::zero(); 1 + nsing];
                    col[0] = BigInt::from(deg_w);
                    col[1 + i] = -BigInt::from(w.residue_degree);
                    cols.push(col);
                }
                Ok(Ch0::from_group(coker(1 + nsing, &cols)))
            }
            Normalization::SmoothCurve { zeta, minus_rational_point, .. } => Ok(Ch0 {
                group: None,
                free_rank: usize::from(!minus_rational_point),
                torsion_order: zeta.picard_zero_order(),
            }),
        }
    }

    /// Generators of `CH_0(X, 1)` modulo torsion: functions that are units away from
    /// the fibers (and removed points) with weighted valuation zero at each singular point.
    pub fn ch0_units(&self) -> Result<Ch0Units> {
        let torsion = self.omega();
        let weights = self.weights();
        match &self.base {
            Normalization::Order { field, .. } => {
                let places: Vec<FinitePlace> =
                    self.fibers.fiber_points().map(|(_, w)| w.place.expect("order fibers carry primes")).collect();
                let s = s_invariants(*field, &places)?;
                let gens = &s.generators;
                let vals = IntMatrix::from_fn(places.len(), gens.len(), |r, c| BigInt::from(places[r].valuation(&gens[c])));
                let kernel = kernel_basis(&weights.mul(&vals));
                let arch_signs: Vec<i32> = if field.is_real() { vec![-1] } else { vec![] };
                let mut generators = Vec::new();
                for j in 0..kernel.cols() {
                    let c: Vec<i64> = kernel.column(j).iter().map(|x| x.to_i64().expect("small exponent")).collect();
                    let elem = combine_elements(gens, &c);
                    let arch = arch_signs
                        .iter()
                        .map(|&sgn| {
                            Approx::sum(gens.iter().zip(&c).map(|(g, &e)| archimedean_log(g, sgn).scale(e as f64)))
                        })
                        .collect();
                    let orders = vals.mul_vec(&kernel.column(j)).iter().map(|x| x.to_i64().unwrap()).collect();
                    generators.push(UnitGenerator { display: elem.to_string(), arch, orders });
                }
                let row_places = places.iter().map(|p| (format!("{}:{}", p.p, p.index), p.norm)).collect();
                Ok(Ch0Units {
                    rank: generators.len(),
                    torsion,
                    generators,
                    row_places,
                    dropped: self.dropped_rows(0),
                })
            }
            Normalization::Line { q, removed } => {
                let nrem = removed.len();
                let degs: Vec<u32> = removed
                    .iter()
                    .map(|r| r.degree)
                    .chain(self.fibers.fiber_points().map(|(_, w)| (w.norm as f64).log(*q as f64).round() as u32))
                    .collect();
                let n = degs.len();
                // Degree zero (principal on the line) and weighted zero at each singular point.
                let mut rows = vec![degs.iter().map(|&d| BigInt::from(d)).collect::<Vec<_>>()];
                for r in 0..weights.rows() {
                    let mut row = vec![BigInt::zero(); nrem];
                    row.extend(weights.row(r));
                    rows.push(row);
                }
                let constraint = IntMatrix::from_rows(&rows, n)?;
                let kernel = if n == 0 { IntMatrix::zeros(0, 0) } else { kernel_basis(&constraint) };
                let labels: Vec<String> = removed
                    .iter()
                    .map(|r| r.label.clone())
                    .chain(self.fibers.fiber_points().map(|(_, w)| w.label.clone()))
                    .collect();
                let generators = (0..kernel.cols())
                    .map(|j| {
                        let orders: Vec<i64> = kernel.column(j).iter().map(|x| x.to_i64().unwrap()).collect();
                        UnitGenerator { display: divisor_display(&labels, &orders), arch: vec![], orders }
                    })
                    .collect::<Vec<_>>();
                let norms = removed
                    .iter()
                    .map(|r| q.pow(r.degree))
                    .chain(self.fibers.fiber_points().map(|(_, w)| w.norm));
                Ok(Ch0Units {
                    rank: generators.len(),
                    torsion,
                    generators,
                    row_places: labels.into_iter().zip(norms).collect(),
                    dropped: self.dropped_rows(nrem),
                })
            }
            Normalization::SmoothCurve { .. } => {
                Ok(Ch0Units { rank: 0, torsion, generators: vec![], row_places: vec![], dropped: vec![] })
            }
        }
    }

    /// Dropped rows: the first removed point (if any) and the first fiber point per singular point.
    fn dropped_rows(&self, nrem: usize) -> Vec<usize> {
        let mut out = Vec::new();
        if nrem > 0 {
            out.push(0);
        }
        let mut at = nrem;
        for v in &self.fibers.points {
            out.push(at);
            at += v.fiber.len();
        }
        out
    }

    /// `|det|` of the pairing between the generators and the kept rows.
    pub fn regulator(&self, units: &Ch0Units) -> Result<RealValue> {
        self.regulator_with_dropped(units, &units.dropped)
    }

    /// The regulator for an alternative choice of dropped rows (one per group).
    pub fn regulator_with_dropped(&self, units: &Ch0Units, dropped: &[usize]) -> Result<RealValue> {
        let kept: Vec<usize> = (0..units.row_places.len()).filter(|i| !dropped.contains(i)).collect();
        let arch_rows = units.generators.first().map(|g| g.arch.len()).unwrap_or(0);
        if kept.len() + arch_rows != units.rank {
            return Err(Error::DimensionMismatch(format!(
                "{} rows for {} generators",
                kept.len() + arch_rows,
                units.rank
            )));
        }
        if arch_rows == 0 {
            let ords = IntMatrix::from_fn(kept.len(), units.rank, |r, c| BigInt::from(units.generators[c].orders[kept[r]]));
            let logs = kept.iter().fold(LogMonomial::one(), |acc, &r| {
                acc.mul(&LogMonomial::log(units.row_places[r].1).expect("norm is a prime power"))
            });
            return Ok(RealValue::from_exact(LogMonomial::integer(ords.det().abs()).mul(&logs)));
        }
        let mut rows: Vec<Vec<Approx>> = Vec::new();
        for a in 0..arch_rows {
            rows.push(units.generators.iter().map(|g| g.arch[a]).collect());
        }
        for &r in &kept {
            let ln = LogMonomial::log(units.row_places[r].1).expect("prime power").to_approx();
            rows.push(units.generators.iter().map(|g| ln.scale(-(g.orders[r] as f64))).collect());
        }
        Ok(RealValue::from_approx(approx_det(&rows).abs()))
    }

    /// Affine: order `rank CH_0(X,1)`, value `-[CH_0(X)] R_X / omega`.
    /// Proper curve: order `rank - 1`, value `-[CH_0(X)_tor] R_X / (omega log q)`.
    pub fn weil_special_value(&self) -> Result<SpecialValue> {
        let ch0 = self.ch0()?;
        let units = self.ch0_units()?;
        let r = self.regulator(&units)?;
        let omega = BigInt::from(self.omega());
        if self.is_proper() {
            let q = self.q().expect("proper schemes here are curves");
            let coeff = LogMonomial::rational(BigRational::new(-ch0.torsion_order.clone(), omega));
            let scale = RealValue::from_exact(coeff.div(&LogMonomial::log(q)?));
            Ok(SpecialValue::new(units.rank as i64 - 1, scale.mul(&r)))
        } else {
            if ch0.free_rank != 0 {
                return Err(Error::Invariant(format!("CH_0 of the affine scheme {} is infinite", self.name)));
            }
            let coeff = LogMonomial::rational(BigRational::new(-ch0.torsion_order, omega));
            Ok(SpecialValue::new(units.rank as i64, RealValue::from_exact(coeff).mul(&r)))
        }
    }

    /// Leading term from the zeta function of `Y` and the Euler factors of the fibers:
    /// `zeta_X = zeta_Y prod_v (1 - N(v)^-s)^-1 prod_w (1 - N(w)^-s)`.
    pub fn zeta_route_special_value(&self) -> Result<SpecialValue> {
        match &self.base {
            Normalization::Order { field, .. } => {
                let mut out = dedekind_zeta_star(*field, &[])?;
                for v in &self.fibers.points {
                    out = out.div(&SpecialValue::exact(1, LogMonomial::log(v.norm)?));
                    for w in &v.fiber {
                        out = out.mul(&SpecialValue::exact(1, LogMonomial::log(w.norm)?));
                    }
                }
                Ok(out)
            }
            _ => Ok(self.zeta_rational()?.special_value()),
        }
    }

    /// The zeta function of a curve-type scheme assembled from its normalization.
    pub fn zeta_rational(&self) -> Result<ZetaRational> {
        let (q, mut z) = match &self.base {
            Normalization::Order { .. } => return Err(Error::Unsupported("orders have no rational zeta".into())),
            Normalization::Line { q, removed } => {
                let mut z = ZetaRational::new(*q, IntPoly::one(), IntPoly::from_i64(&[1, -(*q as i64) - 1, *q as i64]))?;
                for r in removed {
                    z = z.remove_point(r.degree as usize);
                }
                (*q, z)
            }
            Normalization::SmoothCurve { q, zeta, minus_rational_point } => {
                (*q, if *minus_rational_point { zeta.remove_point(1) } else { zeta.clone() })
            }
        };
        for v in &self.fibers.points {
            let deg_v = (v.norm as f64).log(q as f64).round() as usize;
            z = ZetaRational { q, num: z.num.clone(), den: z.den.mul(&one_minus_t_power(deg_v)) };
            for w in &v.fiber {
                let deg_w = (w.norm as f64).log(q as f64).round() as usize;
                z = z.mul_poly(&one_minus_t_power(deg_w));
            }
        }
        Ok(cancel_common(&z))
    }

    pub fn describe(&self) -> Value {
        let fibers: Vec<Value> = self
            .fibers
            .points
            .iter()
            .map(|v| {
                json!({
                    "point": v.label,
                    "norm": v.norm,
                    "fiber": v.fiber.iter().map(|w| json!({"label": w.label, "f": w.residue_degree, "norm": w.norm})).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({"name": self.name, "proper": self.is_proper(), "fibers": fibers})
    }
}

fn one_minus_t_power(d: usize) -> IntPoly {
    let mut c = vec![BigInt::zero(); d + 1];
    c[0] = BigInt::one();
    c[d] -= BigInt::one();
    IntPoly::new(c)
}

/// Cancels the greatest common divisor of the form `prod (1 - t^d)` factors via exact division.
fn cancel_common(z: &ZetaRational) -> ZetaRational {
    let mut num = z.num.clone();
    let mut den = z.den.clone();
    loop {
        let mut changed = false;
        for d in (1..=den.degree().max(0) as usize).rev() {
            let f = one_minus_t_power(d);
            if let (Some(a), Some(b)) = (exact_div(&num, &f), exact_div(&den, &f)) {
                num = a;
                den = b;
                changed = true;
                break;
            }
        }
        if !changed {
            return ZetaRational { q: z.q, num, den };
        }
    }
}

/// `a / b` when `b` divides `a` exactly over `Z` (with `b(0) = 1`).
fn exact_div(a: &IntPoly, b: &IntPoly) -> Option<IntPoly> {
    if a.degree() < b.degree() {
        return None;
    }
    let n = (a.degree() - b.degree()) as usize;
    let mut rem: Vec<BigInt> = a.coeffs().to_vec();
    let mut quo = vec![BigInt::zero(); n + 1];
    for i in 0..=n {
        // b(0) = 1, so divide from the constant term up.
        let c = rem[i].clone();
        quo[i] = c.clone();
        for (j, bc) in b.coeffs().iter().enumerate() {
            rem[i + j] -= &c * bc;
        }
    }
    rem.iter().all(|c| c.is_zero()).then(|| IntPoly::new(quo))
}

fn coker(rows: usize, cols: &[Vec<BigInt>]) -> FgAb {
    if cols.is_empty() {
        return FgAb::free(rows);
    }
    cokernel_group(&IntMatrix::from_columns(rows, cols))
}

fn combine_elements(gens: &[FieldElem], exps: &[i64]) -> String {
    let mut acc: Option<Elem> = None;
    let mut rational = BigRational::one();
    for (g, &e) in gens.iter().zip(exps) {
        match g {
            FieldElem::Quadratic(x) => {
                let p = x.pow(e);
                acc = Some(match acc {
                    Some(a) => a.mul(&p),
                    None => p,
                });
            }
            FieldElem::Rational(r) => {
                let mut p = BigRational::one();
                for _ in 0..e.unsigned_abs() {
                    p *= r;
                }
                rational *= if e < 0 { p.recip() } else { p };
            }
        }
    }
    match acc {
        Some(a) => a.scale(&rational).to_string(),
        None => rational.to_string(),
    }
}

fn divisor_display(labels: &[String], orders: &[i64]) -> String {
    let parts: Vec<String> = labels
        .iter()
        .zip(orders)
        .filter(|(_, &o)| o != 0)
        .map(|(l, &o)| format!("{o}*[{l}]"))
        .collect();
    format!("function with divisor {}", parts.join(" + "))
}

/// Index `[O_K^x : O^x]`, `omega(O)` and the index of the fundamental unit.
fn order_unit_data(d: i64, f: u64) -> Result<(u64, u64, u64)> {
    let omega_k = roots_of_unity(QuadField::Quadratic(d));
    if f == 1 {
        return Ok((1, omega_k, 1));
    }
    if d < 0 {
        return Ok((omega_k / 2, 2, 1));
    }
    // Least k with eps^k in Z + f O_K, tracking coordinates mod f.
    let eps = fundamental_unit(d)?.unit;
    let (u, v) = eps.int_coords();
    let m = BigInt::from(f);
    let (u, v) = (u.mod_floor_big(&m), v.mod_floor_big(&m));
    let n = BigInt::from((d - d * d) / 4);
    let (mut a, mut b) = (u.clone(), v.clone());
    let mut k = 1u64;
    while !b.is_zero() {
        let na = (&a * &u + &n * &b * &v).mod_floor_big(&m);
        let nb = (&a * &v + &b * &u + BigInt::from(d) * &b * &v).mod_floor_big(&m);
        a = na;
        b = nb;
        k += 1;
    }
    Ok((k, 2, k))
}

trait ModFloorBig {
    fn mod_floor_big(&self, m: &BigInt) -> BigInt;
}

impl ModFloorBig for BigInt {
    fn mod_floor_big(&self, m: &BigInt) -> BigInt {
        num_integer::Integer::mod_floor(self, m)
    }
}

/// Independent evaluation for orders through the class number formula for orders:
/// `-h(O) R(O) / (omega(O) [O_K : O]) prod_v gamma_v / prod_{w|v} gamma_w` with
/// `gamma_v = (1 - 1/N(v)) / log N(v)`.
pub fn jp_special_value(d: i64, conductor: u64) -> Result<SpecialValue> {
    let k = QuadField::from_disc(d)?;
    let inv = field_invariants(k)?;
    let (unit_index, omega_o, eps_power) = order_unit_data(d, conductor)?;
    let mut h_o = BigRational::from_integer(inv.h.clone() * BigInt::from(conductor));
    for (p, _) in factorize(conductor) {
        h_o *= BigRational::new(BigInt::from(p as i64 - kronecker(d, p) as i64), BigInt::from(p));
    }
    h_o /= BigRational::from_integer(BigInt::from(unit_index));
    if !h_o.is_integer() {
        return Err(Error::Invariant(format!("order class number {h_o} is not an integer")));
    }
    let r_o = inv.regulator.mul(&RealValue::from_exact(LogMonomial::integer(eps_power)));
    let mut coeff = LogMonomial::rational(-h_o / BigRational::from_integer(BigInt::from(omega_o * conductor)));
    let fibers = singular_fibers(d, conductor)?;
    let gamma = |n: u64| -> Result<LogMonomial> {
        Ok(LogMonomial::rational(BigRational::new(BigInt::from(n - 1), BigInt::from(n))).div(&LogMonomial::log(n)?))
    };
    for v in &fibers.points {
        coeff = coeff.mul(&gamma(v.norm)?);
        for w in &v.fiber {
            coeff = coeff.div(&gamma(w.norm)?);
        }
    }
    let order = k.unit_rank() + fibers.branch_excess();
    Ok(SpecialValue::new(order as i64, RealValue::from_exact(coeff).mul(&r_o)))
}

/// The catalog of glued schemes: quadratic orders and singular curves with their plane models.
pub fn glued_catalog() -> Vec<GluedScheme> {
    let mut out = Vec::new();
    for (d, f) in [(-4i64, 3u64), (-4, 5), (-4, 2), (-4, 4), (-3, 2), (-3, 7), (-20, 3), (-23, 2), (5, 2), (8, 3), (12, 5), (-4, 15)] {
        out.push(GluedScheme::order(d, f).expect("catalog order"));
    }
    for q in [3u64, 5, 7] {
        let split = CurveModel::projective(q, "y^2*z + x*y*z = x^3").ok();
        out.push(
            GluedScheme::line(
                &format!("split node /F{q}"),
                q,
                vec![],
                &[("node", 1, vec![LinePoint::new("t=0", 1), LinePoint::new("t=-1", 1)])],
                split,
            )
            .expect("catalog curve"),
        );
        out.push(
            GluedScheme::line(
                &format!("cusp /F{q}"),
                q,
                vec![],
                &[("cusp", 1, vec![LinePoint::new("t=0", 1)])],
                CurveModel::projective(q, "y^2*z = x^3").ok(),
            )
            .expect("catalog curve"),
        );
        out.push(
            GluedScheme::line(
                &format!("affine split node /F{q}"),
                q,
                vec![LinePoint::new("inf", 1)],
                &[("node", 1, vec![LinePoint::new("t=1", 1), LinePoint::new("t=-1", 1)])],
                CurveModel::affine(q, "y^2 = x^3 + x^2").ok(),
            )
            .expect("catalog curve"),
        );
    }
    for (q, a) in [(3u64, 2i64), (5, 2), (7, 3)] {
        out.push(
            GluedScheme::line(
                &format!("non-split node /F{q}"),
                q,
                vec![],
                &[("node", 1, vec![LinePoint::new("t^2-a", 2)])],
                CurveModel::projective(q, &format!("y^2*z = x^3 + {a}*x^2*z")).ok(),
            )
            .expect("catalog curve"),
        );
    }
    out.push(
        GluedScheme::line(
            "line with a degree-2 point glued to two rational points /F3",
            3,
            vec![],
            &[("v", 1, vec![LinePoint::new("0", 1), LinePoint::new("1", 1), LinePoint::new("t^2+1", 2)])],
            None,
        )
        .expect("catalog curve"),
    );
    out.push(
        GluedScheme::line(
            "affine line minus a degree-2 point, two singular points /F2",
            2,
            vec![LinePoint::new("t^2+t+1", 2), LinePoint::new("inf", 1)],
            &[
                ("v", 1, vec![LinePoint::new("0", 1), LinePoint::new("1", 1)]),
                ("u", 3, vec![LinePoint::new("t^3+t+1", 3), LinePoint::new("t^3+t^2+1", 3)]),
            ],
            None,
        )
        .expect("catalog curve"),
    );
    for (name, model, open) in [
        ("elliptic /F5", CurveModel::projective(5, "y^2*z = x^3 + x*z^2"), false),
        ("elliptic /F2", CurveModel::projective(2, "y^2*z + y*z^2 = x^3 + z^3"), false),
        ("affine elliptic /F5", CurveModel::affine(5, "y^2 = x^3 + x").map(|m| m.with_bounds((3, 2))), true),
        ("affine genus 2 /F3", CurveModel::affine(3, "y^2 = x^5 - x + 1").map(|m| m.with_bounds((5, 2))), true),
    ] {
        out.push(GluedScheme::smooth_curve(name, model.expect("catalog model"), open).expect("catalog curve"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::fundamental_discriminants;
    use crate::exact::MatchKind;

    #[test]
    fn fiber_examples() {
        let f3 = singular_fibers(-4, 3).unwrap();
        assert_eq!(f3.points.len(), 1);
        assert_eq!(f3.points[0].fiber.len(), 1);
        assert_eq!(f3.points[0].fiber[0].residue_degree, 2);
        let f5 = singular_fibers(-4, 5).unwrap();
        assert_eq!(f5.points[0].fiber.iter().map(|w| w.residue_degree).collect::<Vec<_>>(), vec![1, 1]);
        let f2 = singular_fibers(-4, 2).unwrap();
        assert_eq!(f2.points[0].fiber.len(), 1);
        assert_eq!(f2.points[0].fiber[0].residue_degree, 1);
        assert_eq!(singular_fibers(-4, 1).unwrap().points.len(), 0);
    }

    #[test]
    fn gaussian_orders() {
        let x3 = GluedScheme::order(-4, 3).unwrap();
        assert_eq!(x3.ch0().unwrap().group, Some(FgAb::cyclic(2)));
        let u3 = x3.ch0_units().unwrap();
        assert_eq!((u3.rank, u3.torsion), (0, 4));
        assert_eq!(x3.regulator(&u3).unwrap().exact, Some(LogMonomial::one()));
        let sv = x3.weil_special_value().unwrap();
        assert_eq!((sv.order, sv.exact), (0, Some(LogMonomial::ratio(-1, 2))));

        let x5 = GluedScheme::order(-4, 5).unwrap();
        assert!(x5.ch0().unwrap().group.unwrap().is_trivial());
        let u5 = x5.ch0_units().unwrap();
        assert_eq!((u5.rank, u5.torsion), (1, 4));
        let g = &u5.generators[0];
        assert_eq!(g.orders.iter().map(|o| o.abs()).collect::<Vec<_>>(), vec![1, 1]);
        assert_eq!(g.orders.iter().sum::<i64>(), 0);
        let log5 = LogMonomial::log(5).unwrap();
        assert_eq!(x5.regulator(&u5).unwrap().exact, Some(log5.clone()));
        let sv = x5.weil_special_value().unwrap();
        assert_eq!((sv.order, sv.exact), (1, Some(log5.scale(&BigRational::new((-1).into(), 4.into())))));
    }

    #[test]
    fn jp_examples() {
        let sv = jp_special_value(-4, 3).unwrap();
        assert_eq!((sv.order, sv.exact), (0, Some(LogMonomial::ratio(-1, 2))));
        let sv = jp_special_value(-4, 5).unwrap();
        let want = LogMonomial::log(5).unwrap().scale(&BigRational::new((-1).into(), 4.into()));
        assert_eq!((sv.order, sv.exact), (1, Some(want)));
        let sv = jp_special_value(-23, 1).unwrap();
        assert_eq!(sv.exact, Some(LogMonomial::ratio(-3, 2)));
    }

    #[test]
    fn routes_agree_for_all_small_orders() {
        for d in fundamental_discriminants(-200, 200) {
            if d == 1 {
                continue;
            }
            let mut f = 1u64;
            while (f * f) as i64 * d.abs() <= 200 {
                let x = GluedScheme::order(d, f).unwrap();
                let weil = x.weil_special_value().unwrap();
                let jp = jp_special_value(d, f).unwrap();
                let zeta = x.zeta_route_special_value().unwrap();
                assert_eq!(weil.order, jp.order, "d={d} f={f}");
                assert_eq!(weil.order, zeta.order, "d={d} f={f}");
                assert_ne!(weil.value().compare(&jp.value(), 1e-9), MatchKind::Fail, "d={d} f={f}");
                assert_ne!(weil.value().compare(&zeta.value(), 1e-9), MatchKind::Fail, "d={d} f={f}");
                if d < 0 {
                    assert!(weil.exact.is_some() && weil.exact == jp.exact, "d={d} f={f}");
                }
                let ch0 = x.ch0().unwrap();
                assert_eq!(ch0.free_rank, 0);
                f += 1;
            }
        }
    }

    #[test]
    fn curve_routes_agree() {
        for x in glued_catalog().into_iter().filter(|x| !matches!(x.base, Normalization::Order { .. })) {
            let weil = x.weil_special_value().unwrap();
            let zeta = x.zeta_route_special_value().unwrap();
            assert_eq!(weil.order, zeta.order, "{}", x.name);
            assert_eq!(weil.exact, zeta.exact, "{}", x.name);
            if let Some(model) = &x.model {
                assert_eq!(model.zeta().unwrap(), x.zeta_rational().unwrap(), "{}", x.name);
            }
        }
    }

    #[test]
    fn split_node_examples() {
        let x = glued_catalog().into_iter().find(|x| x.name == "split node /F5").unwrap();
        assert_eq!(x.ch0().unwrap().group, Some(FgAb::free(1)));
        let u = x.ch0_units().unwrap();
        assert_eq!((u.rank, u.torsion), (1, 4));
        assert_eq!(x.regulator(&u).unwrap().exact, Some(LogMonomial::log(5).unwrap()));
        let sv = x.weil_special_value().unwrap();
        assert_eq!((sv.order, sv.exact), (0, Some(LogMonomial::ratio(-1, 4))));
    }

    #[test]
    fn local_cokernels_and_unibranch() {
        for x in glued_catalog() {
            for v in &x.fibers.points {
                let row: Vec<Vec<BigInt>> = v.fiber.iter().map(|w| vec![BigInt::from(w.residue_degree)]).collect();
                assert_eq!(coker(1, &row), FgAb::cyclic(v.gcd_degree()), "{}", x.name);
            }
            let units = x.ch0_units().unwrap();
            assert_eq!(units.rank, expected_rank(&x), "{}", x.name);
            let no_archimedean = !matches!(x.base, Normalization::Order { field, .. } if field.is_real());
            let no_removed = !matches!(&x.base, Normalization::Line { removed, .. } if removed.len() > 1);
            if x.fibers.is_unibranch() && no_archimedean && no_removed {
                assert_eq!(x.regulator(&units).unwrap().exact, Some(LogMonomial::one()), "{}", x.name);
            }
        }
    }

    fn expected_rank(x: &GluedScheme) -> usize {
        let t = x.fibers.branch_excess();
        match &x.base {
            Normalization::Order { field, .. } => field.archimedean_count() + t - 1,
            Normalization::Line { removed, .. } if removed.is_empty() => t,
            Normalization::Line { removed, .. } => removed.len() + t - 1,
            Normalization::SmoothCurve { .. } => 0,
        }
    }

    #[test]
    fn regulator_ignores_dropped_choice() {
        for x in glued_catalog() {
            let units = x.ch0_units().unwrap();
            let base = x.regulator(&units).unwrap();
            // Drop the last point of each group instead of the first.
            let mut alt = Vec::new();
            let groups = group_ranges(&x, &units);
            for (start, len) in groups {
                alt.push(start + len - 1);
            }
            let other = x.regulator_with_dropped(&units, &alt).unwrap();
            assert_ne!(base.compare(&other, 1e-10), MatchKind::Fail, "{}", x.name);
            if base.exact.is_some() {
                assert_eq!(base.exact, other.exact, "{}", x.name);
            }
        }
    }

    fn group_ranges(x: &GluedScheme, units: &Ch0Units) -> Vec<(usize, usize)> {
        let nrem = match &x.base {
            Normalization::Line { removed, .. } => removed.len(),
            _ => 0,
        };
        let mut out = Vec::new();
        if nrem > 0 {
            out.push((0, nrem));
        }
        let mut at = nrem;
        for v in &x.fibers.points {
            out.push((at, v.fiber.len()));
            at += v.fiber.len();
        }
        assert_eq!(at, units.row_places.len());
        out
    }
}
