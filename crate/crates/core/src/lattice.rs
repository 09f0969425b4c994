//! Lattice indices of determinant lines of complexes of abelian groups.
//!
//! The Euler index of a complex with finite cohomology is
//! `1 / prod_i [H^i]^((-1)^i)`. With a real trivialization `phi` of the
//! cohomology it becomes `|det phi| / prod_i [H^i_tor]^((-1)^i)`, with `phi`
//! written in the free cohomology bases returned by [`cohomology_with_bases`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::exact::{
    cohomology_with_bases, cokernel_group, kernel_basis, lattice_basis, rat_det, solve_integral, IntMatrix,
    ZComplex,
};

fn signed_pow(x: &BigRational, degree: i64) -> BigRational {
    if degree.rem_euclid(2) == 0 {
        x.clone()
    } else {
        x.recip()
    }
}

/// `1 / prod_i [H^i]^((-1)^i)`; every cohomology group must be finite.
pub fn euler_lattice_index(c: &ZComplex) -> Result<BigRational> {
    let mut product = BigRational::one();
    for h in cohomology_with_bases(c) {
        let Some(order) = h.group.order() else {
            return Err(Error::InfiniteCohomology(h.degree));
        };
        product *= signed_pow(&BigRational::from_integer(order), h.degree);
    }
    Ok(product.recip())
}

/// Rational map from the even-degree free cohomology (bases concatenated in
/// increasing degree) to the odd-degree free cohomology.
#[derive(Clone, Debug)]
pub struct Trivialization {
    pub rows: Vec<Vec<BigRational>>,
}

impl Trivialization {
    pub fn empty() -> Self {
        Trivialization { rows: vec![] }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Trivialization {
            rows: rows
                .iter()
                .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
                .collect(),
        }
    }
}

/// `|det phi| / prod_i [H^i_tor]^((-1)^i)`.
pub fn trivialized_lattice_index(c: &ZComplex, phi: &Trivialization) -> Result<BigRational> {
    let hs = cohomology_with_bases(c);
    let even: usize = hs.iter().filter(|h| h.degree.rem_euclid(2) == 0).map(|h| h.group.free_rank).sum();
    let odd: usize = hs.iter().filter(|h| h.degree.rem_euclid(2) == 1).map(|h| h.group.free_rank).sum();
    if phi.rows.len() != odd || phi.rows.iter().any(|r| r.len() != even) || even != odd {
        return Err(Error::DimensionMismatch(format!(
            "trivialization must be {odd}x{even} and square, got {}x{}",
            phi.rows.len(),
            phi.rows.first().map_or(0, Vec::len)
        )));
    }
    let det = rat_det(&phi.rows).abs();
    if det.is_zero() {
        return Err(Error::SingularTrivialization);
    }
    let torsion = hs.iter().fold(BigRational::one(), |acc, h| {
        acc * signed_pow(&BigRational::from_integer(h.group.torsion_order()), h.degree)
    });
    Ok(det / torsion)
}

/// Bounded complex of finitely generated abelian groups. Each term is a list
/// of cyclic generators given by their orders (`0` for `Z`); differentials act
/// on generators and must respect the relations.
#[derive(Clone, Debug, PartialEq)]
pub struct FgComplex {
    pub min_degree: i64,
    pub terms: Vec<Vec<BigInt>>,
    pub diffs: Vec<IntMatrix>,
}

/// `n x t` matrix whose columns are `o_j e_j` for the torsion generators.
fn relations(orders: &[BigInt]) -> IntMatrix {
    let cols: Vec<Vec<BigInt>> = orders
        .iter()
        .enumerate()
        .filter(|(_, o)| !o.is_zero())
        .map(|(j, o)| (0..orders.len()).map(|i| if i == j { o.clone() } else { BigInt::zero() }).collect())
        .collect();
    IntMatrix::from_columns(orders.len(), &cols)
}

fn free_indices(orders: &[BigInt]) -> Vec<usize> {
    (0..orders.len()).filter(|&i| orders[i].is_zero()).collect()
}

fn torsion_order(orders: &[BigInt]) -> BigInt {
    orders.iter().filter(|o| !o.is_zero()).product()
}

/// Reduces each row modulo the order of its target generator.
fn reduce_rows(m: &IntMatrix, target: &[BigInt]) -> IntMatrix {
    IntMatrix::from_fn(m.rows(), m.cols(), |i, j| {
        if target[i].is_zero() {
            m.get(i, j).clone()
        } else {
            m.get(i, j).mod_floor(&target[i])
        }
    })
}

fn is_zero_mod(m: &IntMatrix, target: &[BigInt]) -> bool {
    reduce_rows(m, target).is_zero()
}

impl FgComplex {
    pub fn new(min_degree: i64, terms: Vec<Vec<BigInt>>, diffs: Vec<IntMatrix>) -> Result<Self> {
        if terms.len() != diffs.len() + 1 {
            return Err(Error::DimensionMismatch("need one fewer differential than terms".into()));
        }
        for (k, d) in diffs.iter().enumerate() {
            let (src, dst) = (&terms[k], &terms[k + 1]);
            if d.rows() != dst.len() || d.cols() != src.len() {
                return Err(Error::DimensionMismatch(format!("differential {k} has the wrong shape")));
            }
            let on_relations = d.mul(&relations(src));
            if !is_zero_mod(&on_relations, dst) {
                return invalid(format!("differential {k} does not respect the relations"));
            }
        }
        for k in 1..diffs.len() {
            if !is_zero_mod(&diffs[k].mul(&diffs[k - 1]), &terms[k + 1]) {
                return Err(Error::NotAComplex(min_degree + k as i64, min_degree + k as i64 - 1));
            }
        }
        let diffs = diffs.iter().enumerate().map(|(k, d)| reduce_rows(d, &terms[k + 1])).collect();
        Ok(FgComplex { min_degree, terms, diffs })
    }

    fn degree_index(&self, degree: i64) -> Option<usize> {
        let k = degree - self.min_degree;
        (k >= 0 && (k as usize) < self.terms.len()).then_some(k as usize)
    }

    pub fn orders_at(&self, degree: i64) -> Vec<BigInt> {
        self.degree_index(degree).map(|k| self.terms[k].clone()).unwrap_or_default()
    }

    pub fn diff_at(&self, degree: i64) -> IntMatrix {
        match self.degree_index(degree) {
            Some(k) if k < self.diffs.len() => self.diffs[k].clone(),
            _ => IntMatrix::zeros(self.orders_at(degree + 1).len(), self.orders_at(degree).len()),
        }
    }

    pub fn max_degree(&self) -> i64 {
        self.min_degree + self.terms.len() as i64 - 1
    }

    pub fn free_rank_at(&self, degree: i64) -> usize {
        free_indices(&self.orders_at(degree)).len()
    }

    /// Differential restricted to free generators, i.e. on `C^i / tor`.
    pub fn real_diff_at(&self, degree: i64) -> IntMatrix {
        let d = self.diff_at(degree);
        d.submatrix(&free_indices(&self.orders_at(degree + 1)), &free_indices(&self.orders_at(degree)))
    }

    /// True when the complex is exact in every degree.
    pub fn is_acyclic(&self) -> bool {
        (self.min_degree..=self.max_degree()).all(|i| {
            let here = self.orders_at(i);
            let n = here.len();
            if n == 0 {
                return true;
            }
            let out = self.diff_at(i);
            let next = self.orders_at(i + 1);
            let rel_next = relations(&next);
            // Cycles: x with d x in the relations of the next term.
            let stacked = out.hconcat(&rel_next.scale(&BigInt::from(-1)));
            let k = kernel_basis(&stacked);
            let cycles = k.submatrix(&(0..n).collect::<Vec<_>>(), &(0..k.cols()).collect::<Vec<_>>());
            let boundaries = self.diff_at(i - 1).hconcat(&relations(&here));
            let cycle_basis = lattice_basis(&cycles);
            match solve_integral(&cycle_basis, &boundaries) {
                Some(x) => cokernel_group(&x).is_trivial(),
                None => false,
            }
        })
    }

    /// Mapping cone of the identity: `C^(i+1) + C^i` with `d(x, y) = (-dx, x + dy)`.
    pub fn cone_of_identity(&self) -> FgComplex {
        let lo = self.min_degree - 1;
        let hi = self.max_degree();
        let terms: Vec<Vec<BigInt>> = (lo..=hi)
            .map(|i| {
                let mut t = self.orders_at(i + 1);
                t.extend(self.orders_at(i));
                t
            })
            .collect();
        let diffs = (lo..hi)
            .map(|i| {
                let top = self.diff_at(i + 1).scale(&BigInt::from(-1));
                let n_next = self.orders_at(i + 1).len();
                let top = top.hconcat(&IntMatrix::zeros(top.rows(), self.orders_at(i).len()));
                let bottom = IntMatrix::identity(n_next).hconcat(&self.diff_at(i));
                top.vconcat(&bottom)
            })
            .collect();
        FgComplex::new(lo, terms, diffs).expect("cone of the identity is a complex")
    }

    pub fn direct_sum(&self, other: &FgComplex) -> FgComplex {
        let lo = self.min_degree.min(other.min_degree);
        let hi = self.max_degree().max(other.max_degree());
        let terms: Vec<Vec<BigInt>> = (lo..=hi)
            .map(|i| {
                let mut t = self.orders_at(i);
                t.extend(other.orders_at(i));
                t
            })
            .collect();
        let diffs = (lo..hi).map(|i| self.diff_at(i).block_diag(&other.diff_at(i))).collect();
        FgComplex::new(lo, terms, diffs).expect("direct sum of complexes is a complex")
    }

    fn digest_string(&self) -> String {
        let terms: Vec<String> =
            self.terms.iter().map(|t| t.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(",")).collect();
        let diffs: Vec<String> = self.diffs.iter().map(|d| format!("{d:?}")).collect();
        format!("{}|{}|{}", self.min_degree, terms.join(";"), diffs.join(";"))
    }
}

/// Per-degree real isomorphisms `phi^i : B^i_R -> Hom(A^(1-i)_R, R)`, written
/// against the free generators of `B^i` and the dual of the free generators of
/// `A^(1-i)`.
#[derive(Clone, Debug)]
pub struct DualityMap {
    pub min_degree: i64,
    pub blocks: Vec<Vec<Vec<BigRational>>>,
}

impl DualityMap {
    fn block(&self, degree: i64) -> Option<&Vec<Vec<BigRational>>> {
        let k = degree - self.min_degree;
        (k >= 0 && (k as usize) < self.blocks.len()).then(|| &self.blocks[k as usize])
    }
}

fn to_rat(m: &IntMatrix) -> Vec<Vec<BigRational>> {
    m.to_rows().into_iter().map(|r| r.into_iter().map(BigRational::from_integer).collect()).collect()
}

fn rat_mul(a: &[Vec<BigRational>], b: &[Vec<BigRational>], inner: usize, cols: usize) -> Vec<Vec<BigRational>> {
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum()).collect())
        .collect()
}

fn rat_neg(a: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    a.iter().map(|r| r.iter().map(|x| -x).collect()).collect()
}

fn empty_or(m: Option<&Vec<Vec<BigRational>>>, rows: usize, cols: usize) -> Vec<Vec<BigRational>> {
    m.cloned().unwrap_or_else(|| vec![vec![BigRational::zero(); cols]; rows])
}

/// `prod [B^i_tor]^((-1)^i) / (|det phi| prod [A^i_tor]^((-1)^i))` for acyclic
/// `A`, `B` and a chain isomorphism `phi : B_R -> Hom(A_R, R)[-1]`. Equals one.
pub fn acyclic_duality_ratio(a: &FgComplex, b: &FgComplex, phi: &DualityMap) -> Result<BigRational> {
    if !a.is_acyclic() || !b.is_acyclic() {
        return invalid("both complexes must be acyclic");
    }
    let lo = b.min_degree.min(1 - a.max_degree()) - 1;
    let hi = b.max_degree().max(1 - a.min_degree) + 1;
    let mut det = BigRational::one();
    for i in lo..=hi {
        let (rb, ra) = (b.free_rank_at(i), a.free_rank_at(1 - i));
        if rb != ra {
            return Err(Error::DimensionMismatch(format!("rank B^{i} = {rb} but rank A^{} = {ra}", 1 - i)));
        }
        let block = empty_or(phi.block(i), ra, rb);
        if block.len() != ra || block.iter().any(|r| r.len() != rb) {
            return Err(Error::DimensionMismatch(format!("phi^{i} must be {ra}x{rb}")));
        }
        let d = rat_det(&block);
        if d.is_zero() {
            return Err(Error::SingularTrivialization);
        }
        det *= signed_pow(&d, i);
        // Chain condition up to a sign per degree.
        let next = empty_or(phi.block(i + 1), a.free_rank_at(-i), b.free_rank_at(i + 1));
        let lhs = rat_mul(&next, &to_rat(&b.real_diff_at(i)), b.free_rank_at(i + 1), rb);
        let dual = to_rat(&a.real_diff_at(-i).transpose());
        let rhs = rat_mul(&dual, &block, ra, rb);
        if lhs != rhs && lhs != rat_neg(&rhs) {
            return invalid(format!("phi does not commute with the differentials in degree {i}"));
        }
    }
    let tors = |c: &FgComplex| {
        (c.min_degree..=c.max_degree()).fold(BigRational::one(), |acc, i| {
            acc * signed_pow(&BigRational::from_integer(torsion_order(&c.orders_at(i))), i)
        })
    };
    Ok(tors(b) / (det.abs() * tors(a)))
}

/// Seeded generators for the randomized lemma checks.
pub mod random {
    use super::*;

    /// An automorphism of a presented group and its inverse.
    fn random_automorphism(rng: &mut impl Rng, orders: &[BigInt]) -> (IntMatrix, IntMatrix) {
        let n = orders.len();
        let mut g = IntMatrix::identity(n);
        let mut g_inv = IntMatrix::identity(n);
        if n == 0 {
            return (g, g_inv);
        }
        for _ in 0..rng.gen_range(0..=2 * n) {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let mut e = IntMatrix::identity(n);
            let mut e_inv = IntMatrix::identity(n);
            if a == b {
                if orders[a].is_zero() {
                    continue;
                }
                // Scale a torsion generator by a unit.
                let t = orders[a].to_i64().unwrap();
                let u = loop {
                    let u = rng.gen_range(1..t.max(2));
                    if crate::arith::gcd(u, t) == 1 {
                        break u;
                    }
                };
                let u_inv = (1..t.max(2)).find(|v| (u * v) % t == 1 % t).unwrap_or(1);
                e.set(a, a, u.into());
                e_inv.set(a, a, u_inv.into());
            } else {
                // e_b -> e_b + k e_a, allowed when ord(e_b) * k = 0 in <e_a>.
                let step = match (orders[b].is_zero(), orders[a].is_zero()) {
                    (true, _) => BigInt::one(),
                    (false, true) => continue,
                    (false, false) => &orders[a] / orders[a].gcd(&orders[b]),
                };
                let k = step * rng.gen_range(-2i64..=2);
                e.set(a, b, k.clone());
                e_inv.set(a, b, -k);
            }
            g = e.mul(&g);
            g_inv = g_inv.mul(&e_inv);
        }
        (g, g_inv)
    }

    fn random_order(rng: &mut impl Rng, torsion_weight: f64) -> BigInt {
        if rng.gen_bool(torsion_weight) {
            BigInt::from(rng.gen_range(2..=6))
        } else {
            BigInt::zero()
        }
    }

    /// Random complex built from two-term pieces `G_j -> G_(j+1)` and then
    /// scrambled by random automorphisms in every degree. `free_shape[i]` is
    /// the number of free-to-free pieces starting in degree `i`.
    pub fn random_fg_complex(rng: &mut impl Rng, len: usize, free_shape: &[(usize, usize)]) -> FgComplex {
        let mut terms: Vec<Vec<BigInt>> = vec![vec![]; len];
        let mut entries: Vec<(usize, usize, usize, BigInt)> = Vec::new();
        let mut push_piece = |terms: &mut Vec<Vec<BigInt>>, j: usize, s: BigInt, t: Option<(BigInt, BigInt)>| {
            let src = terms[j].len();
            terms[j].push(s);
            if let Some((t, m)) = t {
                let dst = terms[j + 1].len();
                terms[j + 1].push(t);
                entries.push((j, src, dst, m));
            }
        };
        for &(j, kind) in free_shape {
            match kind {
                // Z alone.
                0 => push_piece(&mut terms, j, BigInt::zero(), None),
                // Z --m--> Z.
                _ => {
                    let m = BigInt::from(rng.gen_range(-3i64..=3));
                    push_piece(&mut terms, j, BigInt::zero(), Some((BigInt::zero(), m)));
                }
            }
        }
        for j in 0..len {
            for _ in 0..rng.gen_range(0..=1) {
                let s = random_order(rng, 0.5);
                if j + 1 < len && rng.gen_bool(0.6) {
                    let t = BigInt::from(rng.gen_range(2..=6));
                    let step = if s.is_zero() { BigInt::one() } else { &t / t.gcd(&s) };
                    let m = step * rng.gen_range(0i64..=3);
                    // Keep the free rank fixed by only adding torsion targets.
                    if s.is_zero() {
                        continue;
                    }
                    push_piece(&mut terms, j, s, Some((t, m)));
                } else if !s.is_zero() {
                    push_piece(&mut terms, j, s, None);
                }
            }
        }
        let mut diffs: Vec<IntMatrix> =
            (0..len.saturating_sub(1)).map(|j| IntMatrix::zeros(terms[j + 1].len(), terms[j].len())).collect();
        for (j, src, dst, m) in entries {
            diffs[j].set(dst, src, m);
        }
        scramble(rng, &FgComplex::new(0, terms, diffs).expect("pieces assemble into a complex"))
    }

    /// Conjugates every differential by random automorphisms of the terms.
    pub fn scramble(rng: &mut impl Rng, c: &FgComplex) -> FgComplex {
        let autos: Vec<(IntMatrix, IntMatrix)> = c.terms.iter().map(|t| random_automorphism(rng, t)).collect();
        let diffs = c.diffs.iter().enumerate().map(|(j, d)| autos[j + 1].0.mul(d).mul(&autos[j].1)).collect();
        FgComplex::new(c.min_degree, c.terms.clone(), diffs).expect("conjugate of a complex")
    }

    /// The exact sequence `Z --m--> Z -> Z/m` starting in degree `deg`.
    pub fn multiplication_sequence(deg: i64, m: i64) -> FgComplex {
        let m = m.max(1);
        if m == 1 {
            return FgComplex::new(deg, vec![vec![0.into()], vec![0.into()]], vec![IntMatrix::from_i64(&[&[1]])])
                .expect("identity complex");
        }
        FgComplex::new(
            deg,
            vec![vec![0.into()], vec![0.into()], vec![m.into()]],
            vec![IntMatrix::from_i64(&[&[m]]), IntMatrix::from_i64(&[&[1]])],
        )
        .expect("short exact sequence")
    }

    fn rank_of(rows: &[Vec<BigRational>], ncols: usize) -> usize {
        let mut a: Vec<Vec<BigRational>> = rows.to_vec();
        let mut rank = 0;
        for c in 0..ncols {
            let Some(p) = (rank..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(rank, p);
            for i in 0..a.len() {
                if i != rank && !a[i][c].is_zero() {
                    let f = &a[i][c] / &a[rank][c];
                    for k in c..ncols {
                        let v = &a[rank][k] * &f;
                        a[i][k] -= v;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn rat_inverse(m: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
        let n = m.len();
        let mut a: Vec<Vec<BigRational>> = m
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row = r.clone();
                row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
                row
            })
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&i| !a[i][c].is_zero()).expect("invertible");
            a.swap(c, p);
            let piv = a[c][c].clone();
            for v in a[c].iter_mut() {
                *v /= &piv;
            }
            for i in 0..n {
                if i != c && !a[i][c].is_zero() {
                    let f = a[i][c].clone();
                    for k in 0..2 * n {
                        let v = &a[c][k] * &f;
                        a[i][k] -= v;
                    }
                }
            }
        }
        a.into_iter().map(|r| r[n..].to_vec()).collect()
    }

    /// Basis matrices (columns) adapted to an acyclic real complex given by
    /// `dims` and `diffs[i] : dims[i] -> dims[i+1]`: images of the previous
    /// complement followed by a random complement of the kernel.
    fn adapted_bases(rng: &mut impl Rng, dims: &[usize], diffs: &[Vec<Vec<BigRational>>]) -> Vec<Vec<Vec<BigRational>>> {
        let mut complements: Vec<Vec<Vec<BigRational>>> = Vec::new();
        for (i, &n) in dims.iter().enumerate() {
            let d = diffs.get(i);
            let target_rank = match d {
                Some(d) => rank_of(d, n),
                None => 0,
            };
            let mut chosen: Vec<Vec<BigRational>> = Vec::new();
            let mut images: Vec<Vec<BigRational>> = Vec::new();
            while chosen.len() < target_rank {
                let w: Vec<BigRational> =
                    (0..n).map(|_| BigRational::from_integer(rng.gen_range(-2i64..=2).into())).collect();
                let d = d.unwrap();
                let img: Vec<BigRational> = d.iter().map(|row| row.iter().zip(&w).map(|(a, b)| a * b).sum()).collect();
                let mut trial = images.clone();
                trial.push(img.clone());
                if rank_of(&trial, img.len()) == trial.len() {
                    images.push(img);
                    chosen.push(w);
                }
            }
            complements.push(chosen);
        }
        dims.iter()
            .enumerate()
            .map(|(i, &n)| {
                let mut cols: Vec<Vec<BigRational>> = Vec::new();
                if i > 0 {
                    let d = &diffs[i - 1];
                    for w in &complements[i - 1] {
                        cols.push(d.iter().map(|row| row.iter().zip(w).map(|(a, b)| a * b).sum()).collect());
                    }
                }
                cols.extend(complements[i].iter().cloned());
                assert_eq!(cols.len(), n, "complex is not acyclic over Q");
                (0..n).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect()
            })
            .collect()
    }

    /// Random acyclic `A`, `B` (cones of identities) with `rank B^i = rank A^(1-i)`
    /// and a chain isomorphism `B_R -> Hom(A_R, R)[-1]` from adapted bases.
    pub fn random_acyclic_pair(rng: &mut impl Rng) -> (FgComplex, FgComplex, DualityMap) {
        let len = rng.gen_range(1..=3usize);
        let mut shape: Vec<(usize, usize)> = Vec::new();
        for _ in 0..rng.gen_range(0..=2) {
            let j = rng.gen_range(0..len);
            if j + 1 < len && rng.gen_bool(0.5) {
                shape.push((j, 1));
            } else {
                shape.push((j, 0));
            }
        }
        let c = random_fg_complex(rng, len, &shape);
        // C' with free ranks c'_i = c_(2-i); a piece at (j, j+1) moves to (1-j, 2-j).
        let lo = 2 - (len as i64 - 1);
        let mirrored: Vec<(usize, usize)> = shape
            .iter()
            .map(|&(j, kind)| {
                let j = j as i64;
                let start = if kind == 0 { 2 - j } else { 1 - j };
                ((start - lo) as usize, kind)
            })
            .collect();
        let mut c2 = random_fg_complex(rng, len, &mirrored);
        c2.min_degree = lo;
        let mut a = c.cone_of_identity();
        let mut b = c2.cone_of_identity();
        // Free ranks of `Z -> Z -> Z/m` at (j, j+1) pair with (-j, 1-j) in B.
        for _ in 0..rng.gen_range(0..=2) {
            let j = rng.gen_range(-1i64..=1);
            a = a.direct_sum(&multiplication_sequence(j, rng.gen_range(1..=6)));
            b = b.direct_sum(&multiplication_sequence(-j, rng.gen_range(1..=6)));
        }
        let a = scramble(rng, &a);
        let b = scramble(rng, &b);

        // Real complexes: B_R and D = Hom(A_R, R)[-1] over the same degree range.
        let lo = b.min_degree.min(1 - a.max_degree());
        let hi = b.max_degree().max(1 - a.min_degree);
        let dims: Vec<usize> = (lo..=hi).map(|i| b.free_rank_at(i)).collect();
        let b_diffs: Vec<Vec<Vec<BigRational>>> = (lo..hi).map(|i| to_rat(&b.real_diff_at(i))).collect();
        let d_diffs: Vec<Vec<Vec<BigRational>>> = (lo..hi).map(|i| to_rat(&a.real_diff_at(-i).transpose())).collect();
        let pb = adapted_bases(rng, &dims, &b_diffs);
        let pd = adapted_bases(rng, &dims, &d_diffs);
        let blocks = pb
            .iter()
            .zip(&pd)
            .zip(&dims)
            .map(|((b, d), &n)| if n == 0 { vec![] } else { rat_mul(d, &rat_inverse(b), n, n) })
            .collect();
        (a, b, DualityMap { min_degree: lo, blocks })
    }

    /// Free complex `Z --m--> Z` in degrees `deg, deg + 1`.
    pub fn multiplication_complex(deg: i64, m: i64) -> ZComplex {
        ZComplex::two_term(deg, IntMatrix::from_i64(&[&[m]])).expect("two-term complex")
    }

    pub fn digest(parts: &[String]) -> String {
        let mut h = Sha256::new();
        for p in parts {
            h.update(p.as_bytes());
            h.update(b"\x00");
        }
        h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn pair_digest(a: &FgComplex, b: &FgComplex) -> String {
        digest(&[a.digest_string(), b.digest_string()])
    }
}

/// One line of the randomized lemma report.
#[derive(Clone, Debug, Serialize)]
pub struct LemmaTrial {
    pub lemma: String,
    pub inputs_digest: String,
    pub value: String,
    pub pass: bool,
}

/// Seeded trials of the Euler index on `Z --m--> Z` and of the acyclic duality ratio.
pub fn lemma_trials(trials: usize, seed: u64) -> Vec<LemmaTrial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(2 * trials);
    for t in 0..trials {
        let m = (t % 50) as i64 + 1;
        let c = random::multiplication_complex(-1, m);
        let v = euler_lattice_index(&c);
        out.push(LemmaTrial {
            lemma: "euler_index_multiplication".into(),
            inputs_digest: random::digest(&[c.to_json()]),
            value: v.as_ref().map_or_else(|e| e.to_string(), |x| x.to_string()),
            pass: v.ok() == Some(BigRational::new(1.into(), m.into())),
        });
        let (a, b, phi) = random::random_acyclic_pair(&mut rng);
        let r = acyclic_duality_ratio(&a, &b, &phi);
        out.push(LemmaTrial {
            lemma: "acyclic_duality_ratio".into(),
            inputs_digest: random::pair_digest(&a, &b),
            value: r.as_ref().map_or_else(|e| e.to_string(), |x| x.to_string()),
            pass: r.ok() == Some(BigRational::one()),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn euler_index_depends_on_placement() {
        for m in 1..=6 {
            let low = random::multiplication_complex(-1, m);
            assert_eq!(euler_lattice_index(&low).unwrap(), q(1, m));
            let high = random::multiplication_complex(0, m);
            assert_eq!(euler_lattice_index(&high).unwrap(), q(m, 1));
        }
        let acyclic = random::multiplication_complex(0, 1);
        assert_eq!(euler_lattice_index(&acyclic).unwrap(), q(1, 1));
        let infinite = random::multiplication_complex(0, 0);
        assert!(matches!(euler_lattice_index(&infinite), Err(Error::InfiniteCohomology(0))));
    }

    #[test]
    fn trivialized_examples() {
        let zero_map = random::multiplication_complex(0, 0);
        let phi = Trivialization::from_i64(&[&[3]]);
        assert_eq!(trivialized_lattice_index(&zero_map, &phi).unwrap(), q(3, 1));

        // H^0 = Z + Z/2, H^1 = Z.
        let c = ZComplex::new(
            -1,
            vec![1, 2, 1],
            vec![IntMatrix::from_i64(&[&[2], &[0]]), IntMatrix::zeros(1, 2)],
        )
        .unwrap();
        let phi = Trivialization::from_i64(&[&[5]]);
        assert_eq!(trivialized_lattice_index(&c, &phi).unwrap(), q(5, 2));

        let finite = random::multiplication_complex(-1, 4);
        assert_eq!(trivialized_lattice_index(&finite, &Trivialization::empty()).unwrap(), q(1, 4));
        assert!(matches!(
            trivialized_lattice_index(&zero_map, &Trivialization::from_i64(&[&[0]])),
            Err(Error::SingularTrivialization)
        ));
        assert!(matches!(
            trivialized_lattice_index(&zero_map, &Trivialization::empty()),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn hand_built_duality_pair() {
        // A = [Z --2--> Z -> Z/2] in degrees 0..2, B = [Z --1--> Z] in degrees 0, 1.
        let a = FgComplex::new(
            0,
            vec![vec![0.into()], vec![0.into()], vec![2.into()]],
            vec![IntMatrix::from_i64(&[&[2]]), IntMatrix::from_i64(&[&[1]])],
        )
        .unwrap();
        assert!(a.is_acyclic());
        let b = FgComplex::new(0, vec![vec![0.into()], vec![0.into()]], vec![IntMatrix::from_i64(&[&[1]])]).unwrap();
        let phi = DualityMap { min_degree: 0, blocks: vec![vec![vec![q(1, 1)]], vec![vec![q(2, 1)]]] };
        assert_eq!(acyclic_duality_ratio(&a, &b, &phi).unwrap(), q(1, 1));
        let wrong = DualityMap { min_degree: 0, blocks: vec![vec![vec![q(1, 1)]], vec![vec![q(3, 1)]]] };
        assert!(acyclic_duality_ratio(&a, &b, &wrong).is_err());
    }

    #[test]
    fn cones_are_acyclic_and_ratio_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let (a, b, phi) = random::random_acyclic_pair(&mut rng);
            assert!(a.is_acyclic() && b.is_acyclic());
            assert_eq!(acyclic_duality_ratio(&a, &b, &phi).unwrap(), BigRational::one());
        }
    }

    #[test]
    fn non_exact_complex_is_detected() {
        let c = FgComplex::new(0, vec![vec![0.into()], vec![0.into()]], vec![IntMatrix::from_i64(&[&[2]])]).unwrap();
        assert!(!c.is_acyclic());
    }
}
