use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;

use super::matrix::IntMatrix;

/// Integer polynomial, coefficients in ascending degree, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntPoly(Vec<BigInt>);

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly(coeffs)
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.0.get(i).cloned().unwrap_or_default()
    }

    /// Degree, with `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.0.len() as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly(vec![]);
        }
        let mut out = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.0.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
    }

    /// `p(u^n)`.
    pub fn compose_power(&self, n: usize) -> IntPoly {
        let mut out = vec![BigInt::zero(); (self.0.len().max(1) - 1) * n + 1];
        for (i, c) in self.0.iter().enumerate() {
            out[i * n] = c.clone();
        }
        IntPoly::new(out)
    }

    /// Exact quotient by `(1 - t)`; `None` when `p(1) != 0`.
    pub fn div_one_minus_t(&self) -> Option<IntPoly> {
        if self.is_zero() || !self.eval(&BigInt::one()).is_zero() {
            return None;
        }
        // p = (1 - t) q  <=>  q_k = sum_{i<=k} p_i.
        let mut acc = BigInt::zero();
        let mut q = Vec::with_capacity(self.0.len() - 1);
        for c in &self.0[..self.0.len() - 1] {
            acc += c;
            q.push(acc.clone());
        }
        Some(IntPoly::new(q))
    }

    /// `(m, q)` with `p = (1 - t)^m q` and `q(1) != 0`.
    pub fn split_at_one(&self) -> (usize, IntPoly) {
        let mut m = 0;
        let mut q = self.clone();
        while let Some(next) = q.div_one_minus_t() {
            q = next;
            m += 1;
        }
        (m, q)
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &BigInt::zero();
            let mag = if neg { -c } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                _ if mag.is_one() => {}
                _ => write!(f, "{mag}*")?,
            }
            match i {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{i}")?,
            }
        }
        Ok(())
    }
}

/// `det(I - u A)` as a polynomial in `u`, computed by Faddeev-LeVerrier.
pub fn char_poly_reversed(a: &IntMatrix) -> IntPoly {
    let n = a.rows();
    assert_eq!(n, a.cols());
    // c_0 = 1, c_k = -(1/k) tr(A M_k), M_1 = I, M_{k+1} = A M_k + c_k I.
    let mut coeffs = vec![BigInt::one()];
    let mut m = IntMatrix::identity(n);
    for k in 1..=n {
        let am = a.mul(&m);
        let tr: BigInt = (0..n).map(|i| am.get(i, i).clone()).sum();
        let ck = -tr / BigInt::from(k);
        m = am.add(&IntMatrix::identity(n).scale(&ck));
        coeffs.push(ck);
    }
    IntPoly::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reversed_characteristic_polynomials() {
        assert_eq!(char_poly_reversed(&IntMatrix::identity(1)), IntPoly::from_i64(&[1, -1]));
        assert_eq!(char_poly_reversed(&IntMatrix::from_i64(&[&[-1]])), IntPoly::from_i64(&[1, 1]));
        assert_eq!(char_poly_reversed(&IntMatrix::zeros(0, 0)), IntPoly::one());
        let swap = IntMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(char_poly_reversed(&swap), IntPoly::from_i64(&[1, 0, -1]));
        let rot = IntMatrix::from_i64(&[&[0, -1], &[1, 0]]);
        assert_eq!(char_poly_reversed(&rot), IntPoly::from_i64(&[1, 0, 1]));
    }

    #[test]
    fn splitting_off_one_minus_t() {
        let p = IntPoly::from_i64(&[1, -1]).mul(&IntPoly::from_i64(&[1, -1])).mul(&IntPoly::from_i64(&[1, 1]));
        let (m, q) = p.split_at_one();
        assert_eq!(m, 2);
        assert_eq!(q, IntPoly::from_i64(&[1, 1]));
        assert_eq!(p.to_string(), "1 - t - t^2 + t^3");
    }
}
