//! Property tests for the stated invariants, across modules.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use weilzeta::arith::fundamental_discriminants;
use weilzeta::curves::{curve_catalog, zeta_from_counts, CurveModel, RemovedPoint};
use weilzeta::driver::{catalog, sign_consistent};
use weilzeta::exact::{
    complex_cohomology, cokernel_group, kernel_basis, smith_normal_form, IntMatrix, IntPoly, LogMonomial, MatchKind,
    RealValue, ZComplex,
};
use weilzeta::frobenius::{chi_point, local_factor_poly, local_special_value, random_frob_module, FrobModule};
use weilzeta::lattice::{euler_lattice_index, trivialized_lattice_index, Trivialization};
use weilzeta::quadratic::{
    field_invariants, fundamental_unit, pell_coordinates, s_invariants, FinitePlace, QuadField,
};

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(-6i64..=6, rows * cols)
        .prop_map(move |v| IntMatrix::from_fn(rows, cols, |i, j| BigInt::from(v[i * cols + j])))
}

fn any_matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| matrix(r, c))
}

/// `Z^n --a--> Z^m --b--> Z^k` with `b a = 0`, `b` built from the left kernel of `a`.
fn three_term() -> impl Strategy<Value = ZComplex> {
    (1usize..=3, 1usize..=3, 1usize..=3, -2i64..=2).prop_flat_map(|(n, m, k, lo)| {
        (matrix(m, n), matrix(k, m)).prop_map(move |(a, c)| {
            let left = kernel_basis(&a.transpose());
            let b = if left.cols() == 0 {
                IntMatrix::zeros(k, m)
            } else {
                c.submatrix(&(0..k).collect::<Vec<_>>(), &(0..left.cols().min(m)).collect::<Vec<_>>())
                    .mul(&left.submatrix(&(0..m).collect::<Vec<_>>(), &(0..left.cols().min(m)).collect::<Vec<_>>()).transpose())
            };
            ZComplex::new(lo, vec![n, m, k], vec![a, b]).expect("b a = 0")
        })
    })
}

fn finite_complex() -> impl Strategy<Value = ZComplex> {
    // Square nonsingular two-term complexes have finite cohomology.
    (1usize..=3, -2i64..=2)
        .prop_flat_map(|(n, lo)| (matrix(n, n), Just(lo)))
        .prop_filter("nonsingular", |(a, _)| !a.det().is_zero())
        .prop_map(|(a, lo)| ZComplex::two_term(lo, a).expect("two-term"))
}

fn logmono() -> impl Strategy<Value = LogMonomial> {
    (-20i64..=20, 1i64..=12, prop::collection::vec((prop::sample::select(vec![2u64, 3, 4, 5, 7, 9, 11]), -2i64..=2), 0..3))
        .prop_filter("nonzero", |(n, _, _)| *n != 0)
        .prop_map(|(n, d, logs)| {
            logs.into_iter().fold(LogMonomial::ratio(n, d), |acc, (p, e)| acc.mul(&LogMonomial::log(p).unwrap().pow(e)))
        })
}

fn frob(seed: u64, max_rank: usize) -> FrobModule {
    random_frob_module(&mut ChaCha8Rng::seed_from_u64(seed), max_rank, 50, 12)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn smith_form_is_exact(a in any_matrix()) {
        let s = smith_normal_form(&a);
        prop_assert_eq!(s.u.mul(&a).mul(&s.v), s.d.clone());
        let diag = s.nonzero_diagonal();
        for w in diag.windows(2) {
            prop_assert!(w[1].is_multiple_of(&w[0]));
        }
        if a.rows() == a.cols() && !a.det().is_zero() {
            prop_assert_eq!(cokernel_group(&a).order(), Some(a.det().abs()));
        }
    }

    #[test]
    fn shift_moves_cohomology(c in three_term()) {
        let base = complex_cohomology(&c);
        let shifted = complex_cohomology(&c.shift(-1));
        prop_assert_eq!(base.len(), shifted.len());
        for ((i, g), (j, h)) in base.iter().zip(&shifted) {
            prop_assert_eq!(*j, i - 1);
            prop_assert_eq!(g, h);
        }
    }

    #[test]
    fn euler_rank_identity(c in three_term()) {
        let sign = |i: i64| if i.rem_euclid(2) == 0 { 1i64 } else { -1 };
        let terms: i64 = c.degrees().map(|i| sign(i) * c.rank_at(i) as i64).sum();
        let cohomology: i64 = complex_cohomology(&c).iter().map(|(i, g)| sign(*i) * g.free_rank as i64).sum();
        prop_assert_eq!(terms, cohomology);
    }

    #[test]
    fn logmono_monoid(a in logmono(), b in logmono(), c in logmono()) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&LogMonomial::one()), a.clone());
        let (pa, pb) = (a.abs().to_approx(), b.abs().to_approx());
        let prod = a.mul(&b).abs().to_approx();
        let direct = pa.mul(&pb);
        prop_assert!((prod.value - direct.value).abs() <= prod.err + direct.err + 1e-15 * direct.value.abs());
        prop_assert!(prod.value > 0.0);
    }

    #[test]
    fn euler_index_multiplicative_and_inverted_by_shift(a in finite_complex(), b in finite_complex()) {
        let (ia, ib) = (euler_lattice_index(&a).unwrap(), euler_lattice_index(&b).unwrap());
        prop_assert_eq!(euler_lattice_index(&a.direct_sum(&b)).unwrap(), &ia * &ib);
        prop_assert_eq!(euler_lattice_index(&a.shift(1)).unwrap(), ia.recip());
    }

    #[test]
    fn trivialization_scales_determinant(m in 1i64..=9, num in 1i64..=7, den in 1i64..=7) {
        // Z^2 --diag(0, m)--> Z^2: H^0 = Z, H^1 = Z + Z/m.
        let c = ZComplex::new(0, vec![2, 2], vec![IntMatrix::from_i64(&[&[0, 0], &[0, m]])]).unwrap();
        let base = trivialized_lattice_index(&c, &Trivialization::from_i64(&[&[1]])).unwrap();
        let lambda = BigRational::new(num.into(), den.into());
        let scaled = trivialized_lattice_index(&c, &Trivialization { rows: vec![vec![lambda.clone()]] }).unwrap();
        prop_assert_eq!(scaled, base * lambda);
    }

    #[test]
    fn frobenius_module_identities(seed in any::<u64>(), norm in prop::sample::select(vec![2u64, 3, 4, 5, 7, 9])) {
        let m = frob(seed, 4);
        let h0 = m.h0().group;
        let (r, g) = local_factor_poly(&m).split_at_one();
        prop_assert_eq!(r, h0.free_rank);
        prop_assert!(g.eval(&BigInt::one()).is_positive());
        let local = local_special_value(&m, norm).unwrap();
        prop_assert_eq!(local.order, -(h0.free_rank as i64));
        prop_assert_eq!(local.exact, Some(chi_point(&m, norm).unwrap()));
        let lhs = g.eval(&BigInt::one()) * h0.torsion_order();
        prop_assert_eq!(lhs, m.h1_order().unwrap() * m.point_regulator());
    }

    #[test]
    fn finite_modules_balance(seed in any::<u64>()) {
        let m = frob(seed, 0);
        prop_assert!(m.is_finite());
        prop_assert_eq!(m.h0().group.order(), Some(m.h1_order().unwrap()));
        prop_assert_eq!(local_factor_poly(&m), IntPoly::one());
        prop_assert_eq!(chi_point(&m, 5).unwrap(), LogMonomial::one());
    }

    #[test]
    fn induction_and_sums(seed in any::<u64>(), n in 2usize..=3, norm in prop::sample::select(vec![2u64, 3])) {
        let m = frob(seed, 2);
        let induced = m.induce(n).unwrap();
        prop_assert_eq!(local_factor_poly(&induced), local_factor_poly(&m).compose_power(n));
        prop_assert_eq!(chi_point(&induced, norm).unwrap(), chi_point(&m, norm.pow(n as u32)).unwrap());
        let other = frob(seed.wrapping_add(1), 2);
        let sum = m.direct_sum(&other).unwrap();
        prop_assert_eq!(local_factor_poly(&sum), local_factor_poly(&m).mul(&local_factor_poly(&other)));
        prop_assert_eq!(chi_point(&sum, norm).unwrap(), chi_point(&m, norm).unwrap().mul(&chi_point(&other, norm).unwrap()));
        let orders = local_special_value(&m, norm).unwrap().order + local_special_value(&other, norm).unwrap().order;
        prop_assert_eq!(local_special_value(&sum, norm).unwrap().order, orders);
    }

    #[test]
    fn pell_identity(d in prop::sample::select(fundamental_discriminants(2, 2000))) {
        let eps = fundamental_unit(d).unwrap();
        let (x, y) = pell_coordinates(&eps.unit);
        let n = &x * &x - BigInt::from(d) * &y * &y;
        prop_assert!(n == BigInt::from(4) || n == BigInt::from(-4));
    }

    #[test]
    fn s_inflation(d in prop::sample::select(vec![1i64, -4, -3, -23, -20, 5, 8, 12, 13, 40]), picks in prop::collection::vec(0usize..12, 0..3)) {
        let k = QuadField::from_disc(d).unwrap();
        let all: Vec<FinitePlace> = [2u64, 3, 5, 7, 11].iter().flat_map(|&p| FinitePlace::all_above(k, p).unwrap()).collect();
        let mut places: Vec<FinitePlace> = Vec::new();
        for i in picks {
            let pl = &all[i % all.len()];
            if !places.iter().any(|q| q.p == pl.p && q.index == pl.index) {
                places.push(pl.clone());
            }
        }
        let base = field_invariants(k).unwrap();
        let inv = s_invariants(k, &places).unwrap();
        let lhs = inv.r_s.mul(&RealValue::from_exact(LogMonomial::integer(inv.h_s.clone())));
        let rhs = places.iter().fold(
            base.regulator.mul(&RealValue::from_exact(LogMonomial::integer(base.h.clone()))),
            |acc, v| acc.mul(&RealValue::from_exact(v.log_norm())),
        );
        prop_assert_ne!(lhs.compare(&rhs, 1e-8), MatchKind::Fail);
    }
}

#[test]
fn smooth_catalog_curves() {
    for c in curve_catalog().into_iter().filter(|c| c.smooth && c.model.is_proper()) {
        let z = c.model.zeta().unwrap();
        assert!(z.functional_equation_holds(), "{}", c.name);
        assert_eq!(z.special_value().order, -1, "{}", c.name);
    }
}

#[test]
fn weil_bound_on_counts() {
    for c in curve_catalog() {
        let z = c.model.zeta().unwrap();
        let g = z.genus().unwrap_or(0) as f64;
        let singular = c.model.singular_points().unwrap().len() as f64;
        let q = c.model.q as f64;
        for n in 1..=c.model.max_count_degree().min(3) {
            let count = c.model.count_points(n).unwrap() as f64;
            let slack = 2.0 * g * q.powf(n as f64 / 2.0) + singular + 2.0 * (c.model.removed.len() as f64 + 2.0);
            assert!((count - q.powi(n as i32) - 1.0).abs() <= slack + 3.0 * q.powf(n as f64 / 2.0), "{} n={n}", c.name);
        }
    }
}

#[test]
fn punctured_curves_match_closures() {
    let e = CurveModel::projective(5, "y^2*z = x^3 + x*z^2").unwrap();
    let closed = e.zeta().unwrap();
    // (0 : 1 : 0) is the point at infinity; (0 : 0 : 1) is affine.
    for removed in [vec![RemovedPoint::Rational(vec![0, 1, 0])], vec![RemovedPoint::Rational(vec![0, 1, 0]), RemovedPoint::Rational(vec![0, 0, 1])]] {
        let k = removed.len();
        let u = CurveModel::new(5, e.kind.clone(), removed).unwrap();
        let counts: Vec<BigInt> = (1..=u.max_count_degree()).map(|n| BigInt::from(u.count_points(n).unwrap())).collect();
        let fit = zeta_from_counts(5, &counts, (2 + k, 2)).unwrap();
        let mut expected = closed.clone();
        for _ in 0..k {
            expected = expected.remove_point(1);
        }
        assert_eq!(fit, expected.reduced());
    }
}

#[test]
fn sign_rule_over_catalog() {
    for l in catalog() {
        let v = l.weil_special_value().unwrap();
        assert!(sign_consistent(&l, &v), "{}", l.describe());
    }
}

#[test]
fn class_numbers_match_form_counts() {
    for d in fundamental_discriminants(-200, -1) {
        let inv = field_invariants(QuadField::Quadratic(d)).unwrap();
        assert_eq!(inv.h, BigInt::from(weilzeta::quadratic::count_classes_by_forms(d)), "d={d}");
    }
}

#[test]
fn orders_of_quadratic_zeta() {
    for d in fundamental_discriminants(-200, 200) {
        let k = QuadField::from_disc(d).unwrap();
        let v = weilzeta::analytic::dedekind_zeta_star(k, &[]).unwrap();
        assert_eq!(v.order, i64::from(d > 1), "d={d}");
        assert!(!BigRational::zero().eq(&BigRational::from_float(v.approx).unwrap()));
    }
}
