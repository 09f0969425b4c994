//! Acceptance suite: one PASS/FAIL line per criterion with pinned tolerances.
//! Runs without the libtest harness so the lines always print.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use weilzeta::analytic::{dedekind_zeta_star, l_chi_at_zero, QuadCharacter};
use weilzeta::arith::fundamental_discriminants;
use weilzeta::driver::{
    catalog, functoriality_battery, random_skyscrapers, small_place_sets, verify, LDatum, DEFAULT_TOLERANCE,
};
use weilzeta::exact::{LogMonomial, MatchKind};
use weilzeta::frobenius::{local_factor_poly, local_special_value, random_frob_module, skyscraper_special_value};
use weilzeta::glued::{glued_catalog, jp_special_value, GluedScheme, Normalization};
use weilzeta::lattice::lemma_trials;
use weilzeta::quadratic::{field_invariants, s_invariants, QuadField};

const SEED: u64 = 20240601;
const REAL_TOL: f64 = 1e-8;

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(results: &mut Vec<bool>, id: u32, name: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let in_time = budget.map_or(true, |b| elapsed <= b);
    let pass = out.pass && in_time;
    let budget_note = budget.map_or(String::new(), |b| format!(" budget {:.0}s", b.as_secs_f64()));
    println!(
        "[{}] criterion {id}: {name} ({:.2}s{budget_note}) {}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        out.detail
    );
    results.push(pass);
}

fn lattice_suite() -> Outcome {
    let trials = lemma_trials(500, SEED);
    let euler: Vec<_> = trials.iter().filter(|t| t.lemma == "euler_index_multiplication").collect();
    let duality: Vec<_> = trials.iter().filter(|t| t.lemma == "acyclic_duality_ratio").collect();
    let ms_covered = euler.len() >= 50;
    let failed: Vec<_> = trials.iter().filter(|t| !t.pass).map(|t| format!("{}={}", t.lemma, t.value)).collect();
    Outcome {
        pass: failed.is_empty() && ms_covered && duality.len() == 500,
        detail: format!("{} euler-index trials (m = 1..50), {} duality pairs, failures {:?}", euler.len(), duality.len(), failed),
    }
}

fn local_theorem() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let norms = [2u64, 3, 4, 5, 7, 9];
    let mut bad = Vec::new();
    for i in 0..200 {
        let m = random_frob_module(&mut rng, 4, 50, 12);
        let n = norms[i % norms.len()];
        let local = local_special_value(&m, n).expect("local value");
        let weil = skyscraper_special_value(&m, n).expect("weil value");
        let rank_h0 = m.h0().group.free_rank as i64;
        let (_, g) = local_factor_poly(&m).split_at_one();
        let lhs = g.eval(&BigInt::one()) * m.h0().group.torsion_order();
        let rhs = m.h1_order().expect("finite h1") * m.point_regulator();
        if local != weil || local.order != -rank_h0 || lhs != rhs {
            bad.push(i);
        }
    }
    Outcome { pass: bad.is_empty(), detail: format!("200 modules, exact mismatches at {bad:?}") }
}

fn constructible_triviality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut bad = 0;
    for i in 0..100 {
        let m = random_frob_module(&mut rng, 0, 50, 12);
        let n = [2u64, 3, 5, 7][i % 4];
        let ok = m.is_finite()
            && local_factor_poly(&m) == weilzeta::exact::IntPoly::one()
            && skyscraper_special_value(&m, n).map(|v| v.order == 0 && v.exact == Some(LogMonomial::one())).unwrap_or(false)
            && local_special_value(&m, n).map(|v| v.order == 0 && v.exact == Some(LogMonomial::one())).unwrap_or(false);
        if !ok {
            bad += 1;
        }
    }
    Outcome { pass: bad == 0, detail: format!("100 finite modules, {bad} failures") }
}

fn imaginary_exact() -> Outcome {
    let mut count = 0;
    let mut bad = Vec::new();
    for d in fundamental_discriminants(-200, -1) {
        count += 1;
        let k = QuadField::Quadratic(d);
        let inv = field_invariants(k).expect("invariants");
        let weil = LDatum::field(k, vec![]).weil_special_value().expect("weil");
        let analytic = dedekind_zeta_star(k, &[]).expect("analytic");
        // zeta(0) * L(0, chi_D) from the Bernoulli sum, independently of the class group.
        let bernoulli = BigRational::new((-1).into(), 2.into()) * l_chi_at_zero(QuadCharacter::new(d).unwrap()).unwrap();
        let minus_h_over_omega = BigRational::new(-inv.h.clone(), BigInt::from(inv.omega));
        let ok = weil.order == 0
            && analytic.order == 0
            && weil.exact == Some(LogMonomial::rational(minus_h_over_omega.clone()))
            && weil.exact == analytic.exact
            && minus_h_over_omega == bernoulli;
        if !ok {
            bad.push(d);
        }
    }
    let gauss = LDatum::field(QuadField::Quadratic(-4), vec![]).weil_special_value().unwrap();
    let gauss_ok = gauss.exact == Some(LogMonomial::ratio(-1, 4));
    Outcome {
        pass: bad.is_empty() && gauss_ok && count > 0,
        detail: format!("{count} discriminants, exact mismatches {bad:?}, D=-4 gives {:?}", gauss.exact.map(|m| m.to_string())),
    }
}

fn real_tolerance() -> Outcome {
    let mut worst = 0f64;
    let mut bad = Vec::new();
    let mut count = 0;
    for d in fundamental_discriminants(2, 100) {
        count += 1;
        let l = LDatum::field(QuadField::Quadratic(d), vec![]);
        let (w, a) = (l.weil_special_value().unwrap(), l.analytic_special_value().unwrap());
        let diff = (w.approx - a.approx).abs();
        worst = worst.max(diff);
        if w.order != 1 || a.order != 1 || diff > REAL_TOL {
            bad.push(d);
        }
    }
    Outcome { pass: bad.is_empty(), detail: format!("{count} discriminants, max |diff| {worst:.2e} (tol {REAL_TOL:.0e}), failures {bad:?}") }
}

fn s_inversion() -> Outcome {
    let mut checked = 0;
    let mut exact = 0;
    let mut bad = Vec::new();
    for k in [QuadField::Rational, QuadField::Quadratic(-4), QuadField::Quadratic(8)] {
        let base = field_invariants(k).unwrap();
        let h_r = base.regulator.mul(&weilzeta::exact::RealValue::from_exact(LogMonomial::integer(base.h.clone())));
        for s in small_place_sets(k) {
            checked += 1;
            let r = verify(&LDatum::field(k, s.clone()), REAL_TOL);
            let want_exact = !k.is_real();
            if r.match_value == MatchKind::Exact {
                exact += 1;
            }
            let inv = s_invariants(k, &s).unwrap();
            let lhs = inv.r_s.mul(&weilzeta::exact::RealValue::from_exact(LogMonomial::integer(inv.h_s.clone())));
            let rhs = s.iter().fold(h_r.clone(), |acc, v| acc.mul(&weilzeta::exact::RealValue::from_exact(v.log_norm())));
            let identity = lhs.compare(&rhs, REAL_TOL) != MatchKind::Fail;
            if !r.passed() || (want_exact && r.match_value != MatchKind::Exact) || !identity {
                bad.push(r.object.clone());
            }
        }
    }
    Outcome { pass: bad.is_empty(), detail: format!("{checked} (K, S) pairs, {exact} exact, failures {bad:?}") }
}

fn singular_orders() -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    for d in fundamental_discriminants(-40, 40) {
        if d == 1 {
            continue;
        }
        for f in 1..=10u64 {
            checked += 1;
            let x = GluedScheme::order(d, f).unwrap();
            let weil = x.weil_special_value().unwrap();
            let jp = jp_special_value(d, f).unwrap();
            let analytic = x.zeta_route_special_value().unwrap();
            let tol = if d > 0 { REAL_TOL } else { 0.0 };
            let agree = |a: &weilzeta::exact::SpecialValue, b: &weilzeta::exact::SpecialValue| {
                a.order == b.order
                    && match a.value().compare(&b.value(), tol) {
                        MatchKind::Exact => true,
                        MatchKind::Tol => d > 0,
                        MatchKind::Fail => false,
                    }
            };
            if !agree(&weil, &jp) || !agree(&weil, &analytic) {
                bad.push((d, f));
            }
        }
    }
    let z3i = GluedScheme::order(-4, 3).unwrap().weil_special_value().unwrap();
    let z5i = GluedScheme::order(-4, 5).unwrap().weil_special_value().unwrap();
    let log5 = LogMonomial::log(5).unwrap().scale(&BigRational::new((-1).into(), 4.into()));
    let flagship = z3i.order == 0 && z3i.exact == Some(LogMonomial::ratio(-1, 2)) && z5i.order == 1 && z5i.exact == Some(log5);
    Outcome {
        pass: bad.is_empty() && flagship,
        detail: format!(
            "{checked} orders, failures {bad:?}; Z[3i] order {} value {}, Z[5i] order {} value {}",
            z3i.order,
            z3i.exact.map(|m| m.to_string()).unwrap_or_default(),
            z5i.order,
            z5i.exact.map(|m| m.to_string()).unwrap_or_default()
        ),
    }
}

fn function_fields() -> Outcome {
    let mut bad = Vec::new();
    for q in [2u64, 3, 4, 5] {
        let l = LDatum::glued(weilzeta::driver::projective_line(q));
        let want = LogMonomial::rational(BigRational::new((-1).into(), BigInt::from(q - 1)))
            .div(&LogMonomial::log(q).unwrap());
        let r = verify(&l, 0.0);
        let w = r.weil.as_ref().unwrap();
        if !(r.passed() && r.match_value == MatchKind::Exact && w.order == -1 && w.exact == Some(want)) {
            bad.push(format!("P1/F{q}"));
        }
    }
    let catalog = glued_catalog();
    let find = |name: &str| catalog.iter().find(|x| x.name == name).cloned().unwrap();
    let elliptic = verify(&LDatum::glued(find("elliptic /F5")), 0.0);
    let want = LogMonomial::log(5).unwrap().inv().neg();
    if !(elliptic.match_value == MatchKind::Exact && elliptic.weil.as_ref().unwrap().exact == Some(want)) {
        bad.push("elliptic /F5".into());
    }
    for q in [3u64, 5, 7] {
        let node = find(&format!("split node /F{q}"));
        let r = verify(&LDatum::glued(node), 0.0);
        let w = r.weil.as_ref().unwrap();
        let want = LogMonomial::rational(BigRational::new((-1).into(), BigInt::from(q - 1)));
        if !(r.match_value == MatchKind::Exact && w.order == 0 && w.exact == Some(want)) {
            bad.push(format!("split node /F{q}"));
        }
        let cusp = find(&format!("cusp /F{q}"));
        let units = cusp.ch0_units().unwrap();
        let r_x = cusp.regulator(&units).unwrap();
        let r = verify(&LDatum::glued(cusp), 0.0);
        let line = verify(&LDatum::glued(weilzeta::driver::projective_line(q)), 0.0);
        if !(r.match_value == MatchKind::Exact
            && r_x.exact == Some(LogMonomial::one())
            && r.weil.as_ref().unwrap() == line.weil.as_ref().unwrap())
        {
            bad.push(format!("cusp /F{q}"));
        }
    }
    Outcome { pass: bad.is_empty(), detail: format!("P1 q=2,3,4,5, elliptic /F5, split nodes and cusps q=3,5,7; failures {bad:?}") }
}

fn functoriality() -> Outcome {
    let checks = functoriality_battery(SEED, 0.0);
    let failed: Vec<_> = checks.iter().filter(|c| !c.pass).map(|c| format!("{}: {}", c.name, c.detail)).collect();
    Outcome { pass: failed.is_empty(), detail: format!("{} checks, failures {failed:?}", checks.len()) }
}

fn order_law() -> Outcome {
    let mut data = catalog();
    data.extend(random_skyscrapers(SEED, 50));
    let mut bad = Vec::new();
    for l in &data {
        let r = verify(l, DEFAULT_TOLERANCE);
        if !r.match_order {
            bad.push(r.object.clone());
        }
    }
    let mut affine_bad = Vec::new();
    for x in glued_catalog() {
        if x.is_proper() {
            continue;
        }
        let s = match &x.base {
            Normalization::Order { field, .. } => field.archimedean_count(),
            Normalization::Line { removed, .. } => removed.len(),
            Normalization::SmoothCurve { .. } => 1,
        };
        let t = x.fibers.branch_excess();
        let order = x.weil_special_value().unwrap().order;
        if order != (s + t) as i64 - 1 {
            affine_bad.push(x.name.clone());
        }
    }
    Outcome {
        pass: bad.is_empty() && affine_bad.is_empty(),
        detail: format!("{} L-data, order mismatches {bad:?}; s+t-1 failures {affine_bad:?}", data.len()),
    }
}

fn main() {
    let mut results = Vec::new();
    let secs = Duration::from_secs;
    run(&mut results, 1, "lattice lemma suite", Some(secs(10)), lattice_suite);
    run(&mut results, 2, "local special-value theorem", Some(secs(30)), local_theorem);
    run(&mut results, 3, "constructible triviality", None, constructible_triviality);
    run(&mut results, 4, "imaginary quadratic, exact", Some(secs(10)), imaginary_exact);
    run(&mut results, 5, "real quadratic, tol 1e-8", Some(secs(30)), real_tolerance);
    run(&mut results, 6, "S-inversion", None, s_inversion);
    run(&mut results, 7, "singular orders, three routes", None, singular_orders);
    run(&mut results, 8, "function-field exact suite", Some(secs(60)), function_fields);
    run(&mut results, 9, "functoriality battery", None, functoriality);
    run(&mut results, 10, "order-of-vanishing law", None, order_law);
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
