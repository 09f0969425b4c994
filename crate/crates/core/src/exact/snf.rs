use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

/// Smith normal form `U * A * V = D` with unimodular `U`, `V` and their
/// inverses. `D` is diagonal with nonnegative entries `d_1 | d_2 | ... | d_rank`
/// followed by zeros.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
    pub rank: usize,
}

impl Snf {
    /// The first `rank` diagonal entries, all positive.
    pub fn nonzero_diagonal(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d.get(i, i).clone()).collect()
    }

    pub fn as_tuple(&self) -> (IntMatrix, IntMatrix, IntMatrix) {
        (self.u.clone(), self.d.clone(), self.v.clone())
    }
}

struct State {
    d: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl State {
    /// `row[dst] += k * row[src]`.
    fn row_add(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.d.add_row_multiple(dst, src, k);
        self.u.add_row_multiple(dst, src, k);
        self.u_inv.add_col_multiple(src, dst, &-k);
    }

    /// `col[dst] += k * col[src]`.
    fn col_add(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.d.add_col_multiple(dst, src, k);
        self.v.add_col_multiple(dst, src, k);
        self.v_inv.add_row_multiple(src, dst, &-k);
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        self.d.swap_rows(a, b);
        self.u.swap_rows(a, b);
        self.u_inv.swap_cols(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.d.swap_cols(a, b);
        self.v.swap_cols(a, b);
        self.v_inv.swap_rows(a, b);
    }

    fn negate_row(&mut self, i: usize) {
        self.d.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }

    fn min_entry(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, BigInt)> = None;
        for i in t..self.d.rows() {
            for j in t..self.d.cols() {
                let a = self.d.get(i, j).abs();
                if !a.is_zero() && best.as_ref().map_or(true, |b| a < b.2) {
                    best = Some((i, j, a));
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }
}

/// Smith normal form with minimal-absolute-value pivoting.
pub fn smith_normal_form(a: &IntMatrix) -> Snf {
    let (m, n) = (a.rows(), a.cols());
    let mut s = State {
        d: a.clone(),
        u: IntMatrix::identity(m),
        u_inv: IntMatrix::identity(m),
        v: IntMatrix::identity(n),
        v_inv: IntMatrix::identity(n),
    };
    let mut t = 0;
    while t < m.min(n) {
        let Some((pi, pj)) = s.min_entry(t) else { break };
        s.swap_rows(t, pi);
        s.swap_cols(t, pj);
        loop {
            let pivot = s.d.get(t, t).clone();
            for i in t + 1..m {
                if !s.d.get(i, t).is_zero() {
                    let q = s.d.get(i, t) / &pivot;
                    s.row_add(i, t, &-q);
                }
            }
            for j in t + 1..n {
                if !s.d.get(t, j).is_zero() {
                    let q = s.d.get(t, j) / &pivot;
                    s.col_add(j, t, &-q);
                }
            }
            // Remainders are strictly smaller than the pivot; move the smallest in.
            let mut smallest: Option<(bool, usize, BigInt)> = None;
            for i in t + 1..m {
                let a = s.d.get(i, t).abs();
                if !a.is_zero() && smallest.as_ref().map_or(true, |b| a < b.2) {
                    smallest = Some((true, i, a));
                }
            }
            for j in t + 1..n {
                let a = s.d.get(t, j).abs();
                if !a.is_zero() && smallest.as_ref().map_or(true, |b| a < b.2) {
                    smallest = Some((false, j, a));
                }
            }
            if let Some((is_row, k, _)) = smallest {
                if is_row {
                    s.swap_rows(t, k);
                } else {
                    s.swap_cols(t, k);
                }
                continue;
            }
            let pivot = s.d.get(t, t).clone();
            let offender = (t + 1..m)
                .find(|&i| (t + 1..n).any(|j| !s.d.get(i, j).is_multiple_of(&pivot)));
            match offender {
                Some(i) => s.row_add(t, i, &BigInt::one()),
                None => break,
            }
        }
        if s.d.get(t, t).is_negative() {
            s.negate_row(t);
        }
        t += 1;
    }
    Snf { u: s.u, d: s.d, v: s.v, u_inv: s.u_inv, v_inv: s.v_inv, rank: t }
}

/// Columns form a basis of `ker A`, and that basis extends to a basis of `Z^cols`.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let s = smith_normal_form(a);
    let idx: Vec<usize> = (s.rank..a.cols()).collect();
    let rows: Vec<usize> = (0..a.cols()).collect();
    s.v.submatrix(&rows, &idx)
}

/// Columns form a basis of the lattice spanned by the columns of `gens`.
pub fn lattice_basis(gens: &IntMatrix) -> IntMatrix {
    let s = smith_normal_form(gens);
    let cols: Vec<Vec<BigInt>> = (0..s.rank)
        .map(|i| s.u_inv.column(i).into_iter().map(|x| x * s.d.get(i, i)).collect())
        .collect();
    IntMatrix::from_columns(gens.rows(), &cols)
}

/// Some integer `X` with `L X = M`, or `None` when no integral solution exists.
pub fn solve_integral(l: &IntMatrix, m: &IntMatrix) -> Option<IntMatrix> {
    assert_eq!(l.rows(), m.rows());
    let s = smith_normal_form(l);
    let w = s.u.mul(m);
    let mut y = IntMatrix::zeros(l.cols(), m.cols());
    for i in 0..w.rows() {
        for j in 0..m.cols() {
            let x = w.get(i, j);
            if i < s.rank {
                let (q, r) = x.div_rem(s.d.get(i, i));
                if !r.is_zero() {
                    return None;
                }
                y.set(i, j, q);
            } else if !x.is_zero() {
                return None;
            }
        }
    }
    Some(s.v.mul(&y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(a: &IntMatrix) -> Snf {
        let s = smith_normal_form(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d);
        assert_eq!(s.u.mul(&s.u_inv), IntMatrix::identity(a.rows()));
        assert_eq!(s.v.mul(&s.v_inv), IntMatrix::identity(a.cols()));
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                if i != j {
                    assert!(s.d.get(i, j).is_zero());
                }
            }
        }
        let diag = s.nonzero_diagonal();
        for w in diag.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        s
    }

    #[test]
    fn worked_examples() {
        let s = check(&IntMatrix::from_i64(&[&[2, 4], &[6, 8]]));
        assert_eq!(s.nonzero_diagonal(), vec![BigInt::from(2), BigInt::from(4)]);
        let s = check(&IntMatrix::identity(3));
        assert_eq!(s.d, IntMatrix::identity(3));
        let s = check(&IntMatrix::from_i64(&[&[0]]));
        assert_eq!(s.rank, 0);
    }

    #[test]
    fn rectangular_and_degenerate() {
        check(&IntMatrix::from_i64(&[&[2, 3]]));
        check(&IntMatrix::from_i64(&[&[6, 10, 15], &[4, 0, 8]]));
        check(&IntMatrix::zeros(0, 3));
        check(&IntMatrix::zeros(2, 0));
        let s = check(&IntMatrix::from_i64(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.nonzero_diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn kernel_and_solve() {
        let a = IntMatrix::from_i64(&[&[1, 1], &[1, 1]]);
        let k = kernel_basis(&a);
        assert_eq!(k.cols(), 1);
        assert!(a.mul(&k).is_zero());
        let l = IntMatrix::from_i64(&[&[2], &[0]]);
        assert!(solve_integral(&l, &IntMatrix::from_i64(&[&[4], &[0]])).is_some());
        assert!(solve_integral(&l, &IntMatrix::from_i64(&[&[3], &[0]])).is_none());
        assert!(solve_integral(&l, &IntMatrix::from_i64(&[&[2], &[1]])).is_none());
    }
}
