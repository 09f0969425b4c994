//! Finitely generated abelian groups with a Frobenius automorphism of finite
//! order: the stalks of constructible sheaves at a closed point of norm `N`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exact::{
    char_poly_reversed, cokernel_with_lifts, kernel_basis, lattice_basis, smith_normal_form, solve_integral,
    FgAb, IntMatrix, IntPoly, LogMonomial, RealValue, SpecialValue,
};

/// `M = Z^n / <relations>` with Frobenius acting on the generators by the
/// columns of `frobenius`, of order dividing `order` on `M`.
///
/// Internally `M` is also kept in adapted coordinates: cyclic generators of
/// orders `orders` (torsion first, then `0` for the free ones) and the
/// Frobenius matrix `phi` in those coordinates.
#[derive(Clone, Debug)]
pub struct FrobModule {
    relations: IntMatrix,
    frobenius: IntMatrix,
    order: u32,
    orders: Vec<BigInt>,
    phi: IntMatrix,
}

#[derive(Serialize, Deserialize)]
struct RawModule {
    relations: Vec<Vec<i64>>,
    frobenius: Vec<Vec<i64>>,
    order: u32,
}

fn diagonal_relations(orders: &[BigInt]) -> IntMatrix {
    let cols: Vec<Vec<BigInt>> = orders
        .iter()
        .enumerate()
        .filter(|(_, o)| !o.is_zero())
        .map(|(j, o)| (0..orders.len()).map(|i| if i == j { o.clone() } else { BigInt::zero() }).collect())
        .collect();
    IntMatrix::from_columns(orders.len(), &cols)
}

fn reduce_rows(m: &IntMatrix, orders: &[BigInt]) -> IntMatrix {
    IntMatrix::from_fn(m.rows(), m.cols(), |i, j| {
        if orders[i].is_zero() {
            m.get(i, j).clone()
        } else {
            m.get(i, j).mod_floor(&orders[i])
        }
    })
}

fn all_rows() -> impl Fn(usize) -> Vec<usize> {
    |n| (0..n).collect()
}

impl FrobModule {
    /// `relations` holds one relation vector per row.
    pub fn new(relations: IntMatrix, frobenius: IntMatrix, order: u32) -> Result<Self> {
        let n = frobenius.rows();
        if frobenius.cols() != n {
            return Err(Error::DimensionMismatch("Frobenius matrix must be square".into()));
        }
        if relations.cols() != n && relations.rows() > 0 {
            return Err(Error::DimensionMismatch(format!("relations must have {n} entries")));
        }
        if order == 0 {
            return invalid("declared order must be positive");
        }
        let rel_cols = if relations.rows() == 0 { IntMatrix::zeros(n, 0) } else { relations.transpose() };
        if solve_integral(&rel_cols, &frobenius.mul(&rel_cols)).is_none() && rel_cols.cols() > 0 {
            return invalid("Frobenius does not preserve the relation lattice");
        }
        let s = smith_normal_form(&rel_cols);
        let keep: Vec<usize> = (0..n).filter(|&i| i >= s.rank || !s.d.get(i, i).is_one()).collect();
        let orders: Vec<BigInt> =
            keep.iter().map(|&i| if i < s.rank { s.d.get(i, i).clone() } else { BigInt::zero() }).collect();
        let phi_full = s.u.mul(&frobenius).mul(&s.u_inv);
        let phi = reduce_rows(&phi_full.submatrix(&keep, &keep), &orders);
        let m = FrobModule { relations, frobenius, order, orders, phi };
        if !m.is_identity_mod(&m.phi_power(order)) {
            return invalid(format!("Frobenius does not have order dividing {order}"));
        }
        Ok(m)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: RawModule = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let n = raw.frobenius.len();
        let frob = IntMatrix::from_rows(&raw.frobenius, n)?;
        let rels = IntMatrix::from_rows(&raw.relations, n)?;
        Self::new(rels, frob, raw.order)
    }

    pub fn to_json(&self) -> String {
        let raw = RawModule {
            relations: self.relations.to_i64_rows().expect("small entries"),
            frobenius: self.frobenius.to_i64_rows().expect("small entries"),
            order: self.order,
        };
        serde_json::to_string(&raw).expect("serializable")
    }

    /// `Z^k` with Frobenius `phi` (a matrix of finite order).
    pub fn lattice(phi: IntMatrix, order: u32) -> Result<Self> {
        Self::new(IntMatrix::zeros(0, phi.rows()), phi, order)
    }

    /// `Z` with trivial Frobenius.
    pub fn trivial_z() -> Self {
        Self::lattice(IntMatrix::identity(1), 1).expect("valid module")
    }

    /// `Z/n` with Frobenius multiplication by `a`.
    pub fn cyclic(n: i64, a: i64, order: u32) -> Result<Self> {
        Self::new(IntMatrix::from_i64(&[&[n]]), IntMatrix::from_i64(&[&[a]]), order)
    }

    pub fn declared_order(&self) -> u32 {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.orders.iter().filter(|o| o.is_zero()).count()
    }

    pub fn group(&self) -> FgAb {
        FgAb::from_orders(&self.orders)
    }

    pub fn is_finite(&self) -> bool {
        self.rank() == 0
    }

    fn n(&self) -> usize {
        self.orders.len()
    }

    fn torsion_idx(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| !self.orders[i].is_zero()).collect()
    }

    fn free_idx(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.orders[i].is_zero()).collect()
    }

    fn is_identity_mod(&self, m: &IntMatrix) -> bool {
        reduce_rows(&m.sub(&IntMatrix::identity(self.n())), &self.orders).is_zero()
    }

    /// Frobenius on `M / tor`, as an integer matrix of finite order.
    pub fn free_frobenius(&self) -> IntMatrix {
        let f = self.free_idx();
        self.phi.submatrix(&f, &f)
    }

    /// Smallest `k >= 1` with `phi^k = 1` on `M`.
    pub fn actual_order(&self) -> u32 {
        self.order_up_to(self.order).unwrap_or(self.order)
    }

    /// `phi^e` by repeated squaring, reduced modulo the relations.
    fn phi_power(&self, mut e: u32) -> IntMatrix {
        let mut result = IntMatrix::identity(self.n());
        let mut base = self.phi.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = reduce_rows(&result.mul(&base), &self.orders);
            }
            base = reduce_rows(&base.mul(&base), &self.orders);
            e >>= 1;
        }
        result
    }

    /// Smallest `k <= cap` with `phi^k = 1` on `M`, if any.
    fn order_up_to(&self, cap: u32) -> Option<u32> {
        let mut p = self.phi.clone();
        for k in 1..=cap {
            if self.is_identity_mod(&p) {
                return Some(k);
            }
            p = reduce_rows(&p.mul(&self.phi), &self.orders);
        }
        None
    }

    fn minus_identity(&self) -> IntMatrix {
        self.phi.sub(&IntMatrix::identity(self.n()))
    }

    /// Lattice `{x in Z^n : A x in relations}` as a basis matrix.
    fn preimage_of_relations(&self, a: &IntMatrix) -> IntMatrix {
        let rel = diagonal_relations(&self.orders);
        let stacked = a.hconcat(&rel.scale(&BigInt::from(-1)));
        let k = kernel_basis(&stacked);
        let x = k.submatrix(&all_rows()(self.n()), &all_rows()(k.cols()));
        lattice_basis(&x.hconcat(&rel))
    }

    /// `[L : L']` for lattices `L' <= L` of equal rank, `L` given by a basis.
    fn lattice_index(basis: &IntMatrix, sub_gens: &IntMatrix) -> Result<BigInt> {
        let coords = solve_integral(basis, sub_gens)
            .ok_or_else(|| Error::Invariant("sublattice not contained in lattice".into()))?;
        cokernel_with_lifts(&coords)
            .group
            .order()
            .ok_or_else(|| Error::Invariant("sublattice of smaller rank".into()))
    }

    pub fn h0(&self) -> H0 {
        let basis = self.preimage_of_relations(&self.minus_identity());
        let rel = diagonal_relations(&self.orders);
        let coords = solve_integral(&basis, &rel).expect("relations lie in every preimage lattice");
        let q = cokernel_with_lifts(&coords);
        H0 {
            free_lifts: q.free_lifts.iter().map(|y| basis.mul_vec(y)).collect(),
            group: q.group,
        }
    }

    /// `[H^1(Zhat, M)]`, from `0 -> T -> M -> F -> 0`:
    /// `[H^1 M] = [H^1 T] [H^1 F] / [F^phi : image of M^phi]`, where
    /// `H^1 T = T / (phi - 1) T` and `H^1 F = ker(norm) / (phi - 1) F`.
    pub fn h1_order(&self) -> Result<BigInt> {
        let t = self.torsion_idx();
        let f = self.free_idx();
        let t_orders: Vec<BigInt> = t.iter().map(|&i| self.orders[i].clone()).collect();

        let phi_t = self.phi.submatrix(&t, &t).sub(&IntMatrix::identity(t.len()));
        let h1_t = cokernel_with_lifts(&phi_t.hconcat(&diagonal_relations(&t_orders)))
            .group
            .order()
            .expect("quotient of a finite group");

        let e = self.free_frobenius();
        let k = f.len();
        let n0 = self.order;
        let mut norm = IntMatrix::zeros(k, k);
        let mut power = IntMatrix::identity(k);
        for _ in 0..n0 {
            norm = norm.add(&power);
            power = power.mul(&e);
        }
        let e_minus = e.sub(&IntMatrix::identity(k));
        let h1_f = Self::lattice_index(&kernel_basis(&norm), &e_minus)?;

        let fixed_free = kernel_basis(&e_minus);
        let h0 = self.preimage_of_relations(&self.minus_identity());
        let projected = h0.submatrix(&f, &all_rows()(h0.cols()));
        let delta = Self::lattice_index(&fixed_free, &projected)?;

        let total = h1_t * h1_f;
        let (q, r) = total.div_rem(&delta);
        if !r.is_zero() {
            return Err(Error::Invariant(format!("connecting map index {delta} does not divide {total}")));
        }
        Ok(q)
    }

    /// `[H^1(Z/m, M)] = [ker N_m / (phi - 1) M]` for the quotient `Z/m` of
    /// `Zhat`; `m` must be a multiple of the declared order. Agrees with
    /// [`FrobModule::h1_order`] once `m` is divisible enough.
    pub fn cyclic_h1_order(&self, m: u32) -> Result<BigInt> {
        if m % self.order != 0 {
            return invalid("level must be a multiple of the Frobenius order");
        }
        let n = self.n();
        let mut norm = IntMatrix::zeros(n, n);
        let mut power = IntMatrix::identity(n);
        for _ in 0..m {
            norm = norm.add(&power);
            power = reduce_rows(&power.mul(&self.phi), &self.orders);
        }
        let cocycles = self.preimage_of_relations(&norm);
        let boundaries = self.minus_identity().hconcat(&diagonal_relations(&self.orders));
        Self::lattice_index(&cocycles, &boundaries)
    }

    /// `|det|` of `M^phi / tor -> M_phi / tor` in integral bases.
    pub fn point_regulator(&self) -> BigInt {
        let h0 = self.h0();
        let coinvariants = cokernel_with_lifts(&self.minus_identity().hconcat(&diagonal_relations(&self.orders)));
        let r = h0.free_lifts.len();
        assert_eq!(r, coinvariants.group.free_rank, "invariants and coinvariants have equal rank");
        let cols: Vec<Vec<BigInt>> = h0.free_lifts.iter().map(|x| coinvariants.free_coordinates(x)).collect();
        IntMatrix::from_columns(r, &cols).det().abs()
    }

    /// Block-cyclic Frobenius on `M^n`: the module induced from the degree-`n`
    /// extension of the residue field.
    pub fn induce(&self, n: usize) -> Result<FrobModule> {
        if n == 0 {
            return invalid("induction degree must be positive");
        }
        let k = self.frobenius.rows();
        let mut frob = IntMatrix::zeros(n * k, n * k);
        for b in 0..n {
            for i in 0..k {
                for j in 0..k {
                    if b + 1 < n {
                        if i == j {
                            frob.set((b + 1) * k + i, b * k + j, BigInt::one());
                        }
                    } else {
                        frob.set(i, b * k + j, self.frobenius.get(i, j).clone());
                    }
                }
            }
        }
        let r = self.relations.rows();
        let mut rels = IntMatrix::zeros(n * r, n * k);
        for b in 0..n {
            for i in 0..r {
                for j in 0..k {
                    rels.set(b * r + i, b * k + j, self.relations.get(i, j).clone());
                }
            }
        }
        Self::new(rels, frob, self.order * n as u32)
    }

    pub fn direct_sum(&self, other: &FrobModule) -> Result<FrobModule> {
        let n1 = self.frobenius.rows();
        let n2 = other.frobenius.rows();
        let pad = |m: &IntMatrix, cols: usize, offset: usize| {
            IntMatrix::from_fn(m.rows(), cols, |i, j| {
                if j >= offset && j < offset + m.cols() {
                    m.get(i, j - offset).clone()
                } else {
                    BigInt::zero()
                }
            })
        };
        let rels = pad(&self.relations, n1 + n2, 0).vconcat(&pad(&other.relations, n1 + n2, n1));
        let order = crate::arith::lcm(self.order as i64, other.order as i64) as u32;
        Self::new(rels, self.frobenius.block_diag(&other.frobenius), order)
    }
}

/// `M^phi` with lifts of a basis of its free quotient, in adapted coordinates.
#[derive(Clone, Debug)]
pub struct H0 {
    pub group: FgAb,
    pub free_lifts: Vec<Vec<BigInt>>,
}

pub fn h0(m: &FrobModule) -> FgAb {
    m.h0().group
}

pub fn h1_order(m: &FrobModule) -> Result<BigInt> {
    m.h1_order()
}

pub fn point_regulator(m: &FrobModule) -> BigInt {
    m.point_regulator()
}

pub fn induce(m: &FrobModule, n: usize) -> Result<FrobModule> {
    m.induce(n)
}

/// `det(1 - u phi | M tensor Q)`.
pub fn local_factor_poly(m: &FrobModule) -> IntPoly {
    char_poly_reversed(&m.free_frobenius())
}

fn log_norm(norm: u64) -> Result<LogMonomial> {
    LogMonomial::log(norm).map_err(|_| Error::Invalid(format!("norm {norm} is not a prime power")))
}

/// Leading term at `s = 0` of `1 / f(N^-s)`: writing `f = (1 - u)^r g` with
/// `g(1) != 0`, the order is `-r` and the value `1 / (g(1) (log N)^r)`.
pub fn local_special_value(m: &FrobModule, norm: u64) -> Result<SpecialValue> {
    let (r, g) = local_factor_poly(m).split_at_one();
    let g1 = g.eval(&BigInt::one());
    if !g1.is_positive() {
        return Err(Error::Invariant(format!("g(1) = {g1} is not positive")));
    }
    let value = LogMonomial::rational(BigRational::from_integer(g1))
        .mul(&log_norm(norm)?.pow(r as i64))
        .inv();
    Ok(SpecialValue::exact(-(r as i64), value))
}

/// `[H^0_tor] / ([H^1] R(M) (log N)^rank H^0)`.
pub fn chi_point(m: &FrobModule, norm: u64) -> Result<LogMonomial> {
    let h0 = m.h0();
    let num = h0.group.torsion_order();
    let den = m.h1_order()? * m.point_regulator();
    let rational = LogMonomial::rational(BigRational::new(num, den));
    Ok(rational.div(&log_norm(norm)?.pow(h0.group.free_rank as i64)))
}

/// The Weil-etale special value of the skyscraper sheaf: sign `+`, order
/// `-rank H^0`.
pub fn skyscraper_special_value(m: &FrobModule, norm: u64) -> Result<SpecialValue> {
    let order = -(m.h0().group.free_rank as i64);
    Ok(SpecialValue::new(order, RealValue::from_exact(chi_point(m, norm)?)))
}

/// Companion matrix of the `d`-th cyclotomic polynomial for the orders used
/// by the random generator.
pub fn cyclotomic_companion(d: u32) -> Option<IntMatrix> {
    let poly: &[i64] = match d {
        1 => &[-1],
        2 => &[1],
        3 => &[1, 1],
        4 => &[1, 0],
        5 => &[1, 1, 1, 1],
        6 => &[1, -1],
        8 => &[1, 0, 0, 0],
        10 => &[1, -1, 1, -1],
        12 => &[1, 0, -1, 0],
        _ => return None,
    };
    // Monic x^k + c_{k-1} x^{k-1} + ... + c_0 with `poly = [c_0, ..., c_{k-1}]`.
    let k = poly.len();
    Some(IntMatrix::from_fn(k, k, |i, j| {
        if j + 1 == k {
            BigInt::from(-poly[i])
        } else if i == j + 1 {
            BigInt::one()
        } else {
            BigInt::zero()
        }
    }))
}

fn random_unimodular(rng: &mut impl Rng, n: usize) -> (IntMatrix, IntMatrix) {
    let mut u = IntMatrix::identity(n);
    let mut u_inv = IntMatrix::identity(n);
    if n < 2 {
        if n == 1 && rng.gen_bool(0.5) {
            let neg = IntMatrix::from_i64(&[&[-1]]);
            return (neg.clone(), neg);
        }
        return (u, u_inv);
    }
    for _ in 0..rng.gen_range(0..=2 * n) {
        let a = rng.gen_range(0..n);
        let b = (a + rng.gen_range(1..n)) % n;
        let k = BigInt::from(rng.gen_range(-2i64..=2));
        let mut e = IntMatrix::identity(n);
        e.set(a, b, k.clone());
        let mut e_inv = IntMatrix::identity(n);
        e_inv.set(a, b, -k);
        u = e.mul(&u);
        u_inv = u_inv.mul(&e_inv);
    }
    (u, u_inv)
}

fn random_signed_permutation(rng: &mut impl Rng, n: usize) -> IntMatrix {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let signs: Vec<i64> = (0..n).map(|_| if rng.gen_bool(0.3) { -1 } else { 1 }).collect();
    IntMatrix::from_fn(n, n, |i, j| if perm[j] == i { BigInt::from(signs[j]) } else { BigInt::zero() })
}

/// Random module of rank at most `max_rank`, torsion of order at most
/// `max_torsion` and Frobenius order at most `max_order`, presented through a
/// random change of generators and redundant relations.
pub fn random_frob_module(rng: &mut impl Rng, max_rank: usize, max_torsion: u64, max_order: u32) -> FrobModule {
    loop {
        // Free part: cyclotomic companion blocks or signed permutations.
        let mut free = IntMatrix::zeros(0, 0);
        let budget = rng.gen_range(0..=max_rank);
        while free.rows() < budget {
            let left = budget - free.rows();
            let block = if rng.gen_bool(0.7) {
                let d = [1u32, 2, 3, 4, 6, 5, 8, 10, 12][rng.gen_range(0..9)];
                match cyclotomic_companion(d) {
                    Some(c) if c.rows() <= left => c,
                    _ => continue,
                }
            } else {
                let size = rng.gen_range(1..=left);
                random_signed_permutation(rng, size)
            };
            free = free.block_diag(&block);
        }
        // Torsion part: cyclic factors with a random automorphism.
        let mut t_orders: Vec<BigInt> = Vec::new();
        let mut size = 1u64;
        for _ in 0..rng.gen_range(0..=3) {
            let o = rng.gen_range(2..=12u64);
            if size * o <= max_torsion {
                size *= o;
                t_orders.push(o.into());
            }
        }
        let nt = t_orders.len();
        let mut tphi = IntMatrix::identity(nt);
        for i in 0..nt {
            let o = t_orders[i].to_i64().unwrap();
            let units: Vec<i64> = (1..o).filter(|u| crate::arith::gcd(*u, o) == 1).collect();
            tphi.set(i, i, units[rng.gen_range(0..units.len())].into());
        }
        for _ in 0..rng.gen_range(0..=nt) {
            let (a, b) = (rng.gen_range(0..nt), rng.gen_range(0..nt));
            if a != b {
                let step = &t_orders[a] / t_orders[a].gcd(&t_orders[b]);
                let v = tphi.get(a, b) + step * rng.gen_range(1i64..=2);
                tphi.set(a, b, v);
            }
        }
        let nf = free.rows();
        let n = nt + nf;
        let mut orders = t_orders.clone();
        orders.extend(std::iter::repeat(BigInt::zero()).take(nf));
        let mut phi = tphi.block_diag(&free);
        if rng.gen_bool(0.5) {
            // Free-to-torsion shear.
            for i in 0..nt {
                for j in nt..n {
                    if rng.gen_bool(0.3) {
                        phi.set(i, j, BigInt::from(rng.gen_range(0..t_orders[i].to_i64().unwrap())));
                    }
                }
            }
        }
        let canonical_rel = diagonal_relations(&orders);
        let probe = FrobModule {
            relations: canonical_rel.transpose(),
            frobenius: phi.clone(),
            order: 1,
            orders: orders.clone(),
            phi: phi.clone(),
        };
        let Some(ord) = probe.order_up_to(max_order) else { continue };
        // Change of generators x = U^-1 y.
        let (u, u_inv) = random_unimodular(rng, n);
        let frob = u_inv.mul(&phi).mul(&u);
        let mut rel_cols = u_inv.mul(&canonical_rel);
        if rel_cols.cols() > 0 && rng.gen_bool(0.5) {
            let coeffs: Vec<i64> = (0..rel_cols.cols()).map(|_| rng.gen_range(-1i64..=1)).collect();
            let extra: Vec<BigInt> = (0..n)
                .map(|i| (0..rel_cols.cols()).map(|j| rel_cols.get(i, j) * coeffs[j]).sum())
                .collect();
            rel_cols = rel_cols.hconcat(&IntMatrix::from_columns(n, &[extra]));
        }
        return FrobModule::new(rel_cols.transpose(), frob, ord).expect("generated module is valid");
    }
}
