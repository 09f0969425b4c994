//! L-data catalog: both routes to each special value, the comparison reports
//! and the functoriality battery.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::analytic::{dedekind_zeta_star, l_chi_star, QuadCharacter};
use crate::arith::is_prime;
use crate::curves::{zeta_from_counts, CurveModel, ZetaRational};
use crate::error::{Error, Result};
use crate::exact::{LogMonomial, MatchKind, RealValue, SpecialValue};
use crate::frobenius::{local_special_value, random_frob_module, skyscraper_special_value, FrobModule};
use crate::glued::{glued_catalog, jp_special_value, GluedScheme, LinePoint, Normalization};
use crate::quadratic::{s_invariants, FinitePlace, QuadField};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug)]
pub enum Base {
    /// `Spec O_{K,S}` with `S` the archimedean places and `places`.
    Field { field: QuadField, places: Vec<FinitePlace> },
    Glued(Box<GluedScheme>),
    /// A closed point with residue field of the given size.
    Point { norm: u64 },
}

#[derive(Clone, Debug)]
pub enum Cover {
    /// `Q(sqrt(d)) / Q`.
    Quadratic(i64),
    /// Extension of the constant field of degree `n`.
    ConstantField(u32),
}

#[derive(Clone, Debug)]
pub enum Coefficient {
    ConstantZ,
    Skyscraper(FrobModule),
    Pushforward(Cover),
    /// `pi_* Z / Z` for `Q(sqrt(d)) / Q`.
    QuotientChi(i64),
    DirectSum(Vec<Coefficient>),
}

impl Coefficient {
    pub fn generic_rank(&self) -> usize {
        match self {
            Coefficient::ConstantZ | Coefficient::Pushforward(_) => 1,
            Coefficient::Skyscraper(_) | Coefficient::QuotientChi(_) => 0,
            Coefficient::DirectSum(parts) => parts.iter().map(Coefficient::generic_rank).sum(),
        }
    }

    fn describe(&self) -> String {
        match self {
            Coefficient::ConstantZ => "Z".into(),
            Coefficient::Skyscraper(m) => format!("skyscraper {}", m.to_json()),
            Coefficient::Pushforward(Cover::Quadratic(d)) => format!("pi_* Z from Q(sqrt({d}))"),
            Coefficient::Pushforward(Cover::ConstantField(n)) => format!("pi_* Z from constants of degree {n}"),
            Coefficient::QuotientChi(d) => format!("F_chi for D = {d}"),
            Coefficient::DirectSum(parts) => parts.iter().map(Coefficient::describe).collect::<Vec<_>>().join(" + "),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LDatum {
    pub base: Base,
    pub coefficient: Coefficient,
}

fn place_label(p: &FinitePlace) -> String {
    match p.prime {
        Some(_) => format!("{}:{}", p.p, p.index),
        None => p.p.to_string(),
    }
}

impl LDatum {
    pub fn new(base: Base, coefficient: Coefficient) -> Self {
        LDatum { base, coefficient }
    }

    pub fn field(field: QuadField, places: Vec<FinitePlace>) -> Self {
        Self::new(Base::Field { field, places }, Coefficient::ConstantZ)
    }

    pub fn glued(x: GluedScheme) -> Self {
        Self::new(Base::Glued(Box::new(x)), Coefficient::ConstantZ)
    }

    pub fn skyscraper(m: FrobModule, norm: u64) -> Self {
        Self::new(Base::Point { norm }, Coefficient::Skyscraper(m))
    }

    pub fn describe(&self) -> String {
        let base = match &self.base {
            Base::Field { field, places } if places.is_empty() => field.to_string(),
            Base::Field { field, places } => {
                format!("{field}, S = {{{}}}", places.iter().map(place_label).collect::<Vec<_>>().join(", "))
            }
            Base::Glued(x) => x.name.clone(),
            Base::Point { norm } => format!("point of norm {norm}"),
        };
        format!("{} over {base}", self.coefficient.describe())
    }

    pub fn weil_special_value(&self) -> Result<SpecialValue> {
        weil_piece(&self.base, &self.coefficient)
    }

    pub fn analytic_special_value(&self) -> Result<SpecialValue> {
        analytic_piece(&self.base, &self.coefficient)
    }
}

fn rational_places(base: &Base, what: &str) -> Result<Vec<u64>> {
    match base {
        Base::Field { field: QuadField::Rational, places } => Ok(places.iter().map(|p| p.p).collect()),
        _ => Err(Error::Unsupported(format!("{what} is cataloged over Q only"))),
    }
}

fn places_above(k: QuadField, primes: &[u64]) -> Result<Vec<FinitePlace>> {
    let mut out = Vec::new();
    for &p in primes {
        out.extend(FinitePlace::all_above(k, p)?);
    }
    Ok(out)
}

/// `h_S R_S / omega` for `Spec O_{K,S}` with sign `-`, order the S-unit rank.
fn field_weil(field: QuadField, places: &[FinitePlace]) -> Result<SpecialValue> {
    let s = s_invariants(field, places)?;
    Ok(SpecialValue::new(s.unit_rank() as i64, s.euler_characteristic().neg()))
}

fn weil_piece(base: &Base, coefficient: &Coefficient) -> Result<SpecialValue> {
    match (coefficient, base) {
        (Coefficient::ConstantZ, Base::Field { field, places }) => field_weil(*field, places),
        (Coefficient::ConstantZ, Base::Glued(x)) => x.weil_special_value(),
        (Coefficient::Skyscraper(m), Base::Point { norm }) => skyscraper_special_value(m, *norm),
        (Coefficient::Pushforward(Cover::Quadratic(d)), _) => {
            let primes = rational_places(base, "pushforward along a quadratic cover")?;
            let k = QuadField::from_disc(*d)?;
            field_weil(k, &places_above(k, &primes)?)
        }
        (Coefficient::Pushforward(Cover::ConstantField(n)), Base::Glued(x)) => base_change(x, *n)?.weil_special_value(),
        (Coefficient::QuotientChi(d), _) => {
            // Multiplicative in 0 -> Z -> pi_* Z -> F_chi -> 0; the sign is (+1)^0.
            let primes = rational_places(base, "the quotient character sheaf")?;
            let k = QuadField::from_disc(*d)?;
            let top = s_invariants(k, &places_above(k, &primes)?)?;
            let bottom = s_invariants(QuadField::Rational, &places_above(QuadField::Rational, &primes)?)?;
            let value = top.euler_characteristic().div(&bottom.euler_characteristic());
            Ok(SpecialValue::new(top.unit_rank() as i64 - bottom.unit_rank() as i64, value))
        }
        (Coefficient::DirectSum(parts), _) => product(parts.iter().map(|c| weil_piece(base, c))),
        (c, _) => Err(uncataloged(c, base)),
    }
}

fn analytic_piece(base: &Base, coefficient: &Coefficient) -> Result<SpecialValue> {
    match (coefficient, base) {
        (Coefficient::ConstantZ, Base::Field { field, places }) => dedekind_zeta_star(*field, places),
        (Coefficient::ConstantZ, Base::Glued(x)) => match &x.model {
            Some(model) => Ok(model.zeta()?.special_value()),
            None => x.zeta_route_special_value(),
        },
        (Coefficient::Skyscraper(m), Base::Point { norm }) => local_special_value(m, *norm),
        (Coefficient::Pushforward(Cover::Quadratic(d)), _) => {
            // Artin factorization of the induced module: zeta_S(s) L_S(s, chi_d).
            let primes = rational_places(base, "pushforward along a quadratic cover")?;
            let zeta = dedekind_zeta_star(QuadField::Rational, &places_above(QuadField::Rational, &primes)?)?;
            Ok(zeta.mul(&l_chi_star(QuadCharacter::new(*d)?, &primes)?))
        }
        (Coefficient::Pushforward(Cover::ConstantField(n)), Base::Glued(x)) => {
            let z = match &x.model {
                Some(model) => model.zeta()?,
                None => x.zeta_rational()?,
            };
            Ok(zeta_base_change(&z, *n)?.special_value())
        }
        (Coefficient::QuotientChi(d), _) => {
            let primes = rational_places(base, "the quotient character sheaf")?;
            l_chi_star(QuadCharacter::new(*d)?, &primes)
        }
        (Coefficient::DirectSum(parts), _) => product(parts.iter().map(|c| analytic_piece(base, c))),
        (c, _) => Err(uncataloged(c, base)),
    }
}

fn uncataloged(c: &Coefficient, base: &Base) -> Error {
    let base = match base {
        Base::Field { .. } => "an arithmetic base",
        Base::Glued(_) => "a curve or glued scheme",
        Base::Point { .. } => "a closed point",
    };
    Error::Unsupported(format!("{} over {base} is not in the catalog", c.describe()))
}

fn product(items: impl Iterator<Item = Result<SpecialValue>>) -> Result<SpecialValue> {
    let mut out = SpecialValue::exact(0, LogMonomial::one());
    for v in items {
        out = out.mul(&v?);
    }
    Ok(out)
}

/// `Z_{X_n}(T)` from `N_k(X_n) = N_{kn}(X)`, fitted within the degree bounds of `Z_X`.
pub fn zeta_base_change(z: &ZetaRational, n: u32) -> Result<ZetaRational> {
    let n = n as usize;
    let bounds = (z.num.degree().max(0) as usize, z.den.degree().max(0) as usize);
    let b = bounds.0 + bounds.1 + 2;
    let counts = z.counts(b * n);
    let sub: Vec<BigInt> = (1..=b).map(|k| counts[k * n - 1].clone()).collect();
    zeta_from_counts(z.q.pow(n as u32), &sub, bounds)
}

/// The same scheme over the degree-`n` extension of its constants.
pub fn base_change(x: &GluedScheme, n: u32) -> Result<GluedScheme> {
    if !x.fibers.points.is_empty() {
        return Err(Error::Unsupported("constant field extension of singular fibers".into()));
    }
    let name = format!("{} over the degree-{n} constant extension", x.name);
    match &x.base {
        Normalization::Line { q, removed } => {
            // A closed point of degree d splits into gcd(d, n) points of degree d / gcd(d, n).
            let mut split = Vec::new();
            for r in removed {
                let g = num_integer::gcd(r.degree, n);
                for i in 0..g {
                    split.push(LinePoint::new(&format!("{}#{i}", r.label), r.degree / g));
                }
            }
            GluedScheme::line(&name, q.pow(n), split, &[], None)
        }
        Normalization::SmoothCurve { minus_rational_point, .. } => {
            let model = x.model.as_ref().ok_or_else(|| Error::Unsupported("smooth curve without a model".into()))?;
            let lifted = CurveModel::new(model.q.pow(n), model.kind.clone(), model.removed.clone())?.with_bounds(model.bounds);
            GluedScheme::smooth_curve(&name, lifted, *minus_rational_point)
        }
        Normalization::Order { .. } => Err(Error::Unsupported("orders have no constant field".into())),
    }
}

/// Order equality and value agreement; exact when both sides are exact.
pub fn compare(a: &SpecialValue, b: &SpecialValue, tol: f64) -> (bool, MatchKind) {
    (a.order == b.order, a.value().compare(&b.value(), tol))
}

#[derive(Clone, Debug)]
pub struct Report {
    pub object: String,
    pub weil: std::result::Result<SpecialValue, String>,
    pub analytic: std::result::Result<SpecialValue, String>,
    pub match_order: bool,
    pub match_value: MatchKind,
    /// A third evaluation when one exists (orders: the class number formula for orders).
    pub third: Option<(String, SpecialValue, MatchKind)>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.match_order
            && self.match_value != MatchKind::Fail
            && self.third.as_ref().map_or(true, |t| t.2 != MatchKind::Fail)
    }

    pub fn to_json(&self) -> Value {
        let sv = |r: &std::result::Result<SpecialValue, String>| match r {
            Ok(v) => special_value_json(v),
            Err(e) => json!({"error": e}),
        };
        let order = |r: &std::result::Result<SpecialValue, String>| r.as_ref().ok().map(|v| v.order);
        let mut out = json!({
            "object": self.object,
            "order": {"weil": order(&self.weil), "analytic": order(&self.analytic), "match": self.match_order},
            "value": {"weil": sv(&self.weil), "analytic": sv(&self.analytic), "match": self.match_value},
        });
        if let Some((name, v, m)) = &self.third {
            out["third"] = json!({"route": name, "value": special_value_json(v), "match": m});
        }
        out
    }

    pub fn line(&self) -> String {
        let show = |r: &std::result::Result<SpecialValue, String>| match r {
            Ok(v) => format!("order {} value {}", v.order, value_string(v)),
            Err(e) => format!("error: {e}"),
        };
        format!(
            "{} {}: weil [{}] analytic [{}] match {:?}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.object,
            show(&self.weil),
            show(&self.analytic),
            self.match_value
        )
    }
}

pub fn value_string(v: &SpecialValue) -> String {
    match &v.exact {
        Some(m) => format!("{m} (~{:.12})", v.approx),
        None => format!("{:.12} +- {:.1e}", v.approx, v.approx_error),
    }
}

pub fn special_value_json(v: &SpecialValue) -> Value {
    let (rational, logs) = match &v.exact {
        Some(m) => (
            Value::String(m.rational_string()),
            Value::Object(m.logs().iter().map(|(p, e)| (p.to_string(), json!(e))).collect()),
        ),
        None => (Value::Null, Value::Null),
    };
    json!({"order": v.order, "rational": rational, "logs": logs, "float": v.approx, "err": v.approx_error})
}

pub fn verify(l: &LDatum, tol: f64) -> Report {
    let (weil, analytic) = rayon::join(|| l.weil_special_value(), || l.analytic_special_value());
    let third = match (&l.base, &l.coefficient) {
        (Base::Glued(x), Coefficient::ConstantZ) => match x.base {
            Normalization::Order { field: QuadField::Quadratic(d), conductor } => jp_special_value(d, conductor).ok(),
            _ => None,
        },
        _ => None,
    };
    let (match_order, match_value) = match (&weil, &analytic) {
        (Ok(a), Ok(b)) => compare(a, b, tol),
        _ => (false, MatchKind::Fail),
    };
    let third = third.map(|t| {
        let m = match &weil {
            Ok(w) if w.order == t.order => w.value().compare(&t.value(), tol),
            _ => MatchKind::Fail,
        };
        ("order class number formula".to_string(), t, m)
    });
    Report {
        object: l.describe(),
        weil: weil.map_err(|e| e.to_string()),
        analytic: analytic.map_err(|e| e.to_string()),
        match_order,
        match_value,
        third,
    }
}

/// Parses places written `p` (every place above `p`) or `p:i` (the `i`-th).
pub fn parse_places(k: QuadField, specs: &[String]) -> Result<Vec<FinitePlace>> {
    let mut out: Vec<FinitePlace> = Vec::new();
    for s in specs {
        let parsed = match s.split_once(':') {
            Some((p, i)) => {
                let p: u64 = p.trim().parse().map_err(|_| Error::Parse(format!("bad prime in {s:?}")))?;
                let i: usize = i.trim().parse().map_err(|_| Error::Parse(format!("bad index in {s:?}")))?;
                vec![FinitePlace::resolve(k, p, i)?]
            }
            None => {
                let p: u64 = s.trim().parse().map_err(|_| Error::Parse(format!("bad prime {s:?}")))?;
                FinitePlace::all_above(k, p)?
            }
        };
        for pl in parsed {
            if out.iter().any(|q| q.p == pl.p && q.index == pl.index) {
                return Err(Error::Invalid(format!("place {} listed twice", place_label(&pl))));
            }
            out.push(pl);
        }
    }
    Ok(out)
}

/// Every place above a prime `p <= bound`, in order.
pub fn places_up_to(k: QuadField, bound: u64) -> Vec<FinitePlace> {
    (2..=bound).filter(|&p| is_prime(p)).flat_map(|p| FinitePlace::all_above(k, p).expect("prime")).collect()
}

/// Subsets of size at most two of the places above primes `<= 13`.
pub fn small_place_sets(k: QuadField) -> Vec<Vec<FinitePlace>> {
    let all = places_up_to(k, 13);
    let mut out = vec![vec![]];
    for i in 0..all.len() {
        out.push(vec![all[i].clone()]);
        for j in i + 1..all.len() {
            out.push(vec![all[i].clone(), all[j].clone()]);
        }
    }
    out
}

fn rational_places_of(primes: &[u64]) -> Vec<FinitePlace> {
    places_above(QuadField::Rational, primes).expect("primes")
}

/// The deterministic catalog of L-data.
pub fn catalog() -> Vec<LDatum> {
    let mut out = Vec::new();
    for k in [QuadField::Rational, QuadField::Quadratic(-4), QuadField::Quadratic(8)] {
        for s in small_place_sets(k) {
            out.push(LDatum::field(k, s));
        }
    }
    for d in crate::arith::fundamental_discriminants(-200, 100) {
        if d != 1 {
            out.push(LDatum::field(QuadField::Quadratic(d), vec![]));
        }
    }
    for d in [-4i64, -3, -8, -23, 5, 8, 12, 13] {
        for primes in [vec![], vec![2], vec![3, 5], vec![13]] {
            let base = Base::Field { field: QuadField::Rational, places: rational_places_of(&primes) };
            out.push(LDatum::new(base.clone(), Coefficient::QuotientChi(d)));
            out.push(LDatum::new(base.clone(), Coefficient::Pushforward(Cover::Quadratic(d))));
            out.push(LDatum::new(
                base,
                Coefficient::DirectSum(vec![Coefficient::ConstantZ, Coefficient::QuotientChi(d)]),
            ));
        }
    }
    for x in glued_catalog() {
        out.push(LDatum::glued(x));
    }
    for q in [2u64, 3, 4, 5] {
        out.push(LDatum::glued(projective_line(q)));
        out.push(LDatum::glued(GluedScheme::line(&format!("A1 /F{q}"), q, vec![LinePoint::new("inf", 1)], &[], None).unwrap()));
        for n in [2u32, 3] {
            out.push(LDatum::new(
                Base::Glued(Box::new(projective_line(q))),
                Coefficient::Pushforward(Cover::ConstantField(n)),
            ));
        }
    }
    let elliptic = glued_catalog().into_iter().find(|x| x.name == "elliptic /F2").expect("catalog");
    out.push(LDatum::new(Base::Glued(Box::new(elliptic)), Coefficient::Pushforward(Cover::ConstantField(2))));
    for (m, norm) in fixed_modules() {
        out.push(LDatum::skyscraper(m, norm));
    }
    out
}

pub fn projective_line(q: u64) -> GluedScheme {
    GluedScheme::line(&format!("P1 /F{q}"), q, vec![], &[], Some(CurveModel::p1(q).expect("prime power")))
        .expect("projective line")
}

fn fixed_modules() -> Vec<(FrobModule, u64)> {
    let mut out = vec![(FrobModule::trivial_z(), 2), (FrobModule::trivial_z(), 9)];
    out.push((FrobModule::cyclic(0, -1, 2).expect("sign module"), 3));
    out.push((FrobModule::cyclic(6, 5, 2).expect("finite module"), 5));
    out.push((FrobModule::trivial_z().induce(3).expect("induced"), 4));
    out
}

/// Seeded random skyscrapers: rank <= 4, torsion <= 50, Frobenius order <= 12.
pub fn random_skyscrapers(seed: u64, count: usize) -> Vec<LDatum> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let norms = [2u64, 3, 4, 5, 7, 9];
    (0..count)
        .map(|i| LDatum::skyscraper(random_frob_module(&mut rng, 4, 50, 12), norms[i % norms.len()]))
        .collect()
}

pub fn verify_suite(seed: u64, tol: f64) -> Vec<Report> {
    let mut data = catalog();
    data.extend(random_skyscrapers(seed, 50));
    data.par_iter().map(|l| verify(l, tol)).collect()
}

/// One functoriality or multiplicativity check.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check_pair(name: String, lhs: Result<SpecialValue>, rhs: Result<SpecialValue>, tol: f64) -> Check {
    match (lhs, rhs) {
        (Ok(a), Ok(b)) => {
            let (order, value) = compare(&a, &b, tol);
            Check {
                pass: order && value != MatchKind::Fail,
                detail: format!("order {} vs {}, {} vs {} ({value:?})", a.order, b.order, value_string(&a), value_string(&b)),
                name,
            }
        }
        (a, b) => Check { name, pass: false, detail: format!("{:?} / {:?}", a.err(), b.err()) },
    }
}

/// Runs `check_pair` on both routes.
fn both_routes(name: &str, lhs: &[LDatum], rhs: &[LDatum], tol: f64) -> Vec<Check> {
    let route = |ls: &[LDatum], weil: bool| -> Result<SpecialValue> {
        product(ls.iter().map(|l| if weil { l.weil_special_value() } else { l.analytic_special_value() }))
    };
    vec![
        check_pair(format!("{name} (weil)"), route(lhs, true), route(rhs, true), tol),
        check_pair(format!("{name} (analytic)"), route(lhs, false), route(rhs, false), tol),
    ]
}

/// Pushforward invariance, open immersions, induction and multiplicativity.
pub fn functoriality_battery(seed: u64, tol: f64) -> Vec<Check> {
    let mut out = Vec::new();
    // Quadratic covers: pi_* Z over (Q, S) against Z over the cover with the places above S.
    for d in [-4i64, -3, -23, 5, 8, 13] {
        for primes in [vec![], vec![2], vec![3, 7]] {
            let k = QuadField::from_disc(d).expect("fundamental");
            let lhs = LDatum::new(
                Base::Field { field: QuadField::Rational, places: rational_places_of(&primes) },
                Coefficient::Pushforward(Cover::Quadratic(d)),
            );
            let rhs = LDatum::field(k, places_above(k, &primes).expect("primes"));
            out.extend(both_routes(&format!("pushforward Q(sqrt({d})) S={primes:?}"), &[lhs], &[rhs], tol));
            // 0 -> Z -> pi_* Z -> F_chi -> 0.
            let base = Base::Field { field: QuadField::Rational, places: rational_places_of(&primes) };
            let z = LDatum::new(base.clone(), Coefficient::ConstantZ);
            let chi = LDatum::new(base.clone(), Coefficient::QuotientChi(d));
            let push = LDatum::new(base, Coefficient::Pushforward(Cover::Quadratic(d)));
            out.extend(both_routes(&format!("multiplicativity Z, pi_*Z, F_chi D={d} S={primes:?}"), &[push], &[z, chi], tol));
        }
    }
    // Constant field extensions.
    for q in [2u64, 3, 5] {
        for n in [2u32, 3] {
            let lhs = LDatum::new(Base::Glued(Box::new(projective_line(q))), Coefficient::Pushforward(Cover::ConstantField(n)));
            let rhs = LDatum::glued(projective_line(q.pow(n)));
            out.extend(both_routes(&format!("constant extension P1 /F{q} degree {n}"), &[lhs], &[rhs], tol));
        }
    }
    let elliptic = glued_catalog().into_iter().find(|x| x.name == "elliptic /F2").expect("catalog");
    let lifted = CurveModel::projective(4, "y^2*z + y*z^2 = x^3 + z^3").expect("model");
    out.extend(both_routes(
        "constant extension elliptic /F2 degree 2",
        &[LDatum::new(Base::Glued(Box::new(elliptic)), Coefficient::Pushforward(Cover::ConstantField(2)))],
        &[LDatum::glued(GluedScheme::smooth_curve("elliptic /F4", lifted, false).expect("smooth"))],
        tol,
    ));
    // Open immersions: Z on U minus v, times the skyscraper Z at v, is Z on U.
    for k in [QuadField::Rational, QuadField::Quadratic(-4), QuadField::Quadratic(8), QuadField::Quadratic(-23)] {
        let all = places_up_to(k, 7);
        for (i, v) in all.iter().enumerate() {
            let s: Vec<FinitePlace> = all.iter().take(i).take(1).cloned().collect();
            let mut s_v = s.clone();
            s_v.push(v.clone());
            out.extend(both_routes(
                &format!("open immersion {k} S={:?} v={}", s.iter().map(place_label).collect::<Vec<_>>(), place_label(v)),
                &[LDatum::field(k, s_v), LDatum::skyscraper(FrobModule::trivial_z(), v.norm)],
                &[LDatum::field(k, s)],
                tol,
            ));
        }
    }
    for q in [2u64, 3, 5] {
        let line = GluedScheme::line(&format!("A1 /F{q}"), q, vec![LinePoint::new("inf", 1)], &[], None).expect("line");
        out.extend(both_routes(
            &format!("open immersion P1 /F{q} minus a rational point"),
            &[LDatum::glued(line), LDatum::skyscraper(FrobModule::trivial_z(), q)],
            &[LDatum::glued(projective_line(q))],
            tol,
        ));
        let line2 = GluedScheme::line(&format!("P1 minus a quadratic point /F{q}"), q, vec![LinePoint::new("quad", 2)], &[], None)
            .expect("line");
        out.extend(both_routes(
            &format!("open immersion P1 /F{q} minus a degree-2 point"),
            &[LDatum::glued(line2), LDatum::skyscraper(FrobModule::trivial_z(), q * q)],
            &[LDatum::glued(projective_line(q))],
            tol,
        ));
    }
    // Induction: Ind_n M at norm N against M at norm N^n; sums and finite quotients.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..20 {
        let m = random_frob_module(&mut rng, 2, 12, 6);
        let n = 2 + i % 2;
        let norm = [2u64, 3][i % 2];
        let induced = m.induce(n).expect("induce");
        out.extend(both_routes(
            &format!("induction #{i} degree {n}"),
            &[LDatum::skyscraper(induced, norm)],
            &[LDatum::skyscraper(m.clone(), norm.pow(n as u32))],
            tol,
        ));
        let other = random_frob_module(&mut rng, 2, 12, 6);
        let sum = m.direct_sum(&other).expect("direct sum");
        out.extend(both_routes(
            &format!("direct sum #{i}"),
            &[LDatum::skyscraper(sum, norm)],
            &[LDatum::skyscraper(m, norm), LDatum::skyscraper(other, norm)],
            tol,
        ));
    }
    // 0 -> Z --m--> Z -> Z/m -> 0 at a point.
    for m in 2..=6i64 {
        out.extend(both_routes(
            &format!("multiplication by {m} at a point"),
            &[LDatum::skyscraper(FrobModule::trivial_z(), 7)],
            &[LDatum::skyscraper(FrobModule::trivial_z(), 7), LDatum::skyscraper(FrobModule::cyclic(m, 1, 1).unwrap(), 7)],
            tol,
        ));
    }
    out
}

/// `(-1)^rank` times a positive number: negative exactly when the generic rank is odd.
pub fn sign_consistent(l: &LDatum, v: &SpecialValue) -> bool {
    v.value().is_negative() == (l.coefficient.generic_rank() % 2 == 1)
}

pub fn rational_value(v: &SpecialValue) -> Option<BigRational> {
    v.exact.as_ref().filter(|m| m.is_rational()).map(|m| m.coeff().clone())
}

pub fn exact_value(order: i64, m: LogMonomial) -> SpecialValue {
    SpecialValue::new(order, RealValue::from_exact(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> LogMonomial {
        LogMonomial::ratio(n, d)
    }

    #[test]
    fn weil_examples() {
        let l = LDatum::field(QuadField::Quadratic(-4), vec![]);
        assert_eq!(l.weil_special_value().unwrap(), exact_value(0, q(-1, 4)));
        let chi = LDatum::new(Base::Field { field: QuadField::Rational, places: vec![] }, Coefficient::QuotientChi(-4));
        assert_eq!(chi.weil_special_value().unwrap(), exact_value(0, q(1, 2)));
        let sky = LDatum::skyscraper(FrobModule::trivial_z(), 7);
        assert_eq!(sky.weil_special_value().unwrap(), exact_value(-1, LogMonomial::log(7).unwrap().inv()));
    }

    #[test]
    fn analytic_examples() {
        let l = LDatum::field(QuadField::Quadratic(8), vec![]);
        let v = l.analytic_special_value().unwrap();
        assert_eq!(v.order, 1);
        assert!((v.approx + (1.0 + 2f64.sqrt()).ln() / 2.0).abs() < 1e-10);
        let chi = LDatum::new(Base::Field { field: QuadField::Rational, places: vec![] }, Coefficient::QuotientChi(-4));
        assert_eq!(chi.analytic_special_value().unwrap(), exact_value(0, q(1, 2)));
    }

    #[test]
    fn verify_examples() {
        let l = LDatum::field(QuadField::Rational, parse_places(QuadField::Rational, &["2".into()]).unwrap());
        let r = verify(&l, DEFAULT_TOLERANCE);
        assert!(r.passed());
        assert_eq!(r.match_value, MatchKind::Exact);
        let want = LogMonomial::log(2).unwrap().scale(&BigRational::new((-1).into(), 2.into()));
        assert_eq!(r.weil.unwrap().exact, Some(want));
        let r = verify(&LDatum::glued(GluedScheme::order(-4, 5).unwrap()), DEFAULT_TOLERANCE);
        assert!(r.passed(), "{}", r.line());
        assert_eq!(r.third.unwrap().2, MatchKind::Exact);
    }

    #[test]
    fn place_parsing() {
        let k = QuadField::Quadratic(-4);
        assert_eq!(parse_places(k, &["5".into()]).unwrap().len(), 2);
        assert_eq!(parse_places(k, &["5:1".into()]).unwrap()[0].index, 1);
        assert!(parse_places(k, &["3:1".into()]).is_err());
        assert!(parse_places(k, &["5".into(), "5:0".into()]).is_err());
        assert!(parse_places(k, &["x".into()]).is_err());
    }

    #[test]
    fn uncataloged_rejected() {
        let l = LDatum::new(Base::Point { norm: 5 }, Coefficient::ConstantZ);
        assert!(matches!(l.weil_special_value(), Err(Error::Unsupported(_))));
        let l = LDatum::new(
            Base::Field { field: QuadField::Quadratic(-4), places: vec![] },
            Coefficient::QuotientChi(-3),
        );
        assert!(l.analytic_special_value().is_err());
    }

    #[test]
    fn zeta_base_change_of_line() {
        let z = ZetaRational::new(3, crate::exact::IntPoly::one(), crate::exact::IntPoly::from_i64(&[1, -4, 3])).unwrap();
        let z2 = zeta_base_change(&z, 2).unwrap();
        assert_eq!(z2, ZetaRational::new(9, crate::exact::IntPoly::one(), crate::exact::IntPoly::from_i64(&[1, -10, 9])).unwrap());
    }
}
