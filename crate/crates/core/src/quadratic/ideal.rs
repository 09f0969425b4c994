use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

use super::elem::Elem;
use crate::arith::{isqrt, kronecker};
use crate::error::{Error, Result};

/// Integral ideal of the maximal order in Hermite form: the lattice
/// `Z (a, 0) + Z (b, c)` on the basis `(1, w)`, with `a, c > 0` and `0 <= b < a`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ideal {
    pub d: i64,
    a: i128,
    b: i128,
    c: i128,
}

fn gcd128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `(g, s, t)` with `s a + t b = g = gcd(a, b) >= 0`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let qt = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - qt * r1);
        (s0, s1) = (s1, s0 - qt * s1);
        (t0, t1) = (t1, t0 - qt * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

fn omega_n(d: i64) -> i128 {
    ((d as i128) - (d as i128) * (d as i128)) / 4
}

/// Product of `x1 + y1 w` and `x2 + y2 w` in the order.
fn mul_coords(d: i64, p: (i128, i128), q: (i128, i128)) -> (i128, i128) {
    let n = omega_n(d);
    let yy = p.1 * q.1;
    (p.0 * q.0 + n * yy, p.0 * q.1 + q.0 * p.1 + d as i128 * yy)
}

impl Ideal {
    pub fn unit(d: i64) -> Self {
        Ideal { d, a: 1, b: 0, c: 1 }
    }

    /// Hermite form of the Z-span of the given vectors; fails unless the span has full rank.
    pub fn from_lattice(d: i64, gens: &[(i128, i128)]) -> Result<Self> {
        let mut pivot: Option<(i128, i128)> = None;
        let mut a = 0i128;
        for &(x, y) in gens {
            if y == 0 {
                a = gcd128(a, x);
                continue;
            }
            match pivot {
                None => pivot = Some(if y < 0 { (-x, -y) } else { (x, y) }),
                Some((px, py)) => {
                    let (g, s, t) = ext_gcd(py, y);
                    let leftover = (y / g) * px - (py / g) * x;
                    a = gcd128(a, leftover);
                    pivot = Some((s * px + t * x, g));
                }
            }
        }
        let (b, c) = pivot.ok_or_else(|| Error::Invalid("ideal lattice lacks full rank".into()))?;
        if a == 0 {
            return Err(Error::Invalid("ideal lattice lacks full rank".into()));
        }
        Ok(Ideal { d, a, b: b.rem_euclid(a), c })
    }

    /// The ideal generated by a nonzero integral element.
    pub fn principal(e: &Elem) -> Result<Self> {
        if !e.is_integral() || e.is_zero() {
            return Err(Error::Invalid(format!("{e} is not a nonzero integral element")));
        }
        let (u, v) = e.int_coords();
        let to = |x: &BigInt| x.to_i128().ok_or_else(|| Error::Budget("element too large for ideal arithmetic".into()));
        let p = (to(&u)?, to(&v)?);
        Ideal::from_lattice(e.d, &[p, mul_coords(e.d, p, (0, 1))])
    }

    pub fn hnf(&self) -> (i128, i128, i128) {
        (self.a, self.b, self.c)
    }

    pub fn norm(&self) -> i128 {
        self.a * self.c
    }

    pub fn is_unit(&self) -> bool {
        self.norm() == 1
    }

    fn basis(&self) -> [(i128, i128); 2] {
        [(self.a, 0), (self.b, self.c)]
    }

    pub fn mul(&self, o: &Ideal) -> Ideal {
        assert_eq!(self.d, o.d);
        let mut gens = Vec::with_capacity(4);
        for p in self.basis() {
            for q in o.basis() {
                gens.push(mul_coords(self.d, p, q));
            }
        }
        Ideal::from_lattice(self.d, &gens).expect("product of nonzero ideals has full rank")
    }

    pub fn pow(&self, e: u32) -> Ideal {
        let mut out = Ideal::unit(self.d);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn conj(&self) -> Ideal {
        // conj(x + y w) = (x + y d) - y w.
        let d = self.d as i128;
        let gens: Vec<_> = self.basis().iter().map(|&(x, y)| (x + y * d, -y)).collect();
        Ideal::from_lattice(self.d, &gens).expect("conjugate has full rank")
    }

    pub fn contains(&self, x: &BigInt, y: &BigInt) -> bool {
        let c = BigInt::from(self.c);
        if !(y % &c).is_zero() {
            return false;
        }
        let k = y / &c;
        ((x - k * BigInt::from(self.b)) % BigInt::from(self.a)).is_zero()
    }

    pub fn contains_elem(&self, e: &Elem) -> bool {
        if !e.is_integral() {
            return false;
        }
        let (x, y) = e.int_coords();
        self.contains(&x, &y)
    }

    /// Largest integer dividing the ideal, with the primitive quotient as `(A, B)`
    /// meaning `Z A + Z (B + sqrt d) / 2`.
    pub fn primitive_part(&self) -> (i128, (i128, i128)) {
        let c = self.c;
        debug_assert!(self.a % c == 0 && self.b % c == 0);
        (c, (self.a / c, 2 * (self.b / c) + self.d as i128))
    }

    pub fn from_primitive(d: i64, a: i128, b: i128) -> Ideal {
        Ideal { d, a, b: ((b - d as i128) / 2).rem_euclid(a), c: 1 }
    }
}

impl fmt::Debug for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {} + {}w]", self.a, self.b, self.c)
    }
}

/// How a rational prime decomposes in the field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

impl Splitting {
    pub fn place_count(&self) -> usize {
        match self {
            Splitting::Split => 2,
            _ => 1,
        }
    }

    pub fn residue_degree(&self) -> u32 {
        match self {
            Splitting::Inert => 2,
            _ => 1,
        }
    }
}

pub fn splitting_type(d: i64, p: u64) -> Splitting {
    match kronecker(d, p) {
        1 => Splitting::Split,
        -1 => Splitting::Inert,
        _ => Splitting::Ramified,
    }
}

/// A prime ideal: the place `index` above `p`, ordered by the residue of `w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeIdeal {
    pub p: u64,
    pub index: usize,
    pub residue_degree: u32,
    pub splitting: Splitting,
    /// Residue of `w` modulo the prime (degree one primes only).
    pub root: Option<u64>,
    pub ideal: Ideal,
}

impl PrimeIdeal {
    pub fn norm(&self) -> u64 {
        self.p.pow(self.residue_degree)
    }

    /// Valuation of an element; the element must be nonzero.
    pub fn valuation(&self, e: &Elem) -> i64 {
        assert!(!e.is_zero(), "valuation of zero");
        let den = e.denominator();
        let scaled = e.scale(&BigRational::from_integer(den.clone()));
        let (x, y) = scaled.int_coords();
        let e_p = if self.splitting == Splitting::Ramified { 2 } else { 1 };
        self.valuation_integral(&x, &y) - e_p * padic(&den, self.p) as i64
    }

    fn valuation_integral(&self, x: &BigInt, y: &BigInt) -> i64 {
        let pb = BigInt::from(self.p);
        let m = padic(x, self.p).min(padic(y, self.p));
        let scale = pb.pow(m as u32);
        let (x1, y1) = (x / &scale, y / &scale);
        let in_prime = |x: &BigInt, y: &BigInt| match self.root {
            Some(r) => ((x + y * BigInt::from(r)) % &pb).is_zero(),
            None => (x % &pb).is_zero() && (y % &pb).is_zero(),
        };
        match self.splitting {
            Splitting::Inert => m as i64,
            Splitting::Ramified => 2 * m as i64 + i64::from(in_prime(&x1, &y1)),
            Splitting::Split => {
                if in_prime(&x1, &y1) {
                    let d = self.ideal.d;
                    let nrm = Elem::new(d, BigRational::from_integer(x1), BigRational::from_integer(y1)).norm();
                    m as i64 + padic(&nrm.to_integer(), self.p) as i64
                } else {
                    m as i64
                }
            }
        }
    }
}

/// `p`-adic valuation of a nonzero integer (0 for zero input to keep minima finite).
fn padic(n: &BigInt, p: u64) -> u64 {
    if n.is_zero() {
        return u64::MAX / 4;
    }
    let pb = BigInt::from(p);
    let mut k = 0;
    let mut n = n.abs();
    while (&n % &pb).is_zero() {
        n /= &pb;
        k += 1;
    }
    k
}

/// The primes above `p`, in a fixed order.
pub fn primes_above(d: i64, p: u64) -> Vec<PrimeIdeal> {
    let s = splitting_type(d, p);
    if s == Splitting::Inert {
        let pi = p as i128;
        return vec![PrimeIdeal {
            p,
            index: 0,
            residue_degree: 2,
            splitting: s,
            root: None,
            ideal: Ideal { d, a: pi, b: 0, c: pi },
        }];
    }
    let pi = p as i128;
    let n = omega_n(d).rem_euclid(pi);
    let dm = (d as i128).rem_euclid(pi);
    let roots: Vec<i128> = (0..pi).filter(|&r| (r * r - dm * r - n).rem_euclid(pi) == 0).collect();
    roots
        .iter()
        .take(s.place_count())
        .enumerate()
        .map(|(index, &r)| PrimeIdeal {
            p,
            index,
            residue_degree: 1,
            splitting: s,
            root: Some(r as u64),
            ideal: Ideal { d, a: pi, b: (-r).rem_euclid(pi), c: 1 },
        })
        .collect()
}

/// Reduction steps `(A, B) -> (|C|, B')` on primitive ideals, tracking the
/// multiplier `lambda` with `new ideal = lambda * old ideal`.
pub(crate) struct Reducer {
    d: i64,
    s: i128,
}

impl Reducer {
    pub fn new(d: i64) -> Self {
        let s = if d > 0 { isqrt(d as u64) as i128 } else { 0 };
        Reducer { d, s }
    }

    fn normalize(&self, a: i128, b: i128) -> i128 {
        let m = 2 * a;
        if self.d < 0 || a > self.s {
            // b in (-a, a].
            let r = b.rem_euclid(m);
            if r > a {
                r - m
            } else {
                r
            }
        } else {
            // b in [s + 1 - 2a, s].
            let lo = self.s + 1 - m;
            lo + (b - lo).rem_euclid(m)
        }
    }

    pub fn is_reduced(&self, a: i128, b: i128) -> bool {
        let d = self.d as i128;
        if self.d < 0 {
            let c = (b * b - d) / (4 * a);
            let b_ok = b.abs() <= a && a <= c;
            b_ok && !(b < 0 && (b.abs() == a || a == c))
        } else {
            b >= 1 && b <= self.s && 2 * a > self.s - b && 2 * a <= self.s + b
        }
    }

    /// One step; returns the new form and the multiplier.
    pub fn rho(&self, a: i128, b: i128) -> ((i128, i128), Elem) {
        let d = self.d as i128;
        let c = (b * b - d) / (4 * a);
        let na = c.abs();
        let nb = self.normalize(na, -b);
        let two_a = BigRational::from_integer(BigInt::from(2 * a));
        let lambda = Elem::from_sqrt_form(
            self.d,
            BigRational::from_integer(b.into()) / &two_a,
            -BigRational::one() / two_a,
        );
        ((na, nb), lambda)
    }

    /// Reduced form equivalent to `(a, b)` and the accumulated multiplier.
    pub fn reduce(&self, a: i128, b: i128) -> ((i128, i128), Elem) {
        let mut acc = Elem::one(self.d);
        let (mut a, mut b) = (a, b);
        if self.d < 0 {
            loop {
                b = self.normalize(a, b);
                let c = (b * b - self.d as i128) / (4 * a);
                if a > c || (a == c && b < 0) {
                    let (f, l) = self.rho(a, b);
                    acc = acc.mul(&l);
                    (a, b) = f;
                } else {
                    return ((a, b), acc);
                }
            }
        }
        if self.is_reduced(a, b) {
            return ((a, b), acc);
        }
        loop {
            let (f, l) = self.rho(a, b);
            acc = acc.mul(&l);
            (a, b) = f;
            if self.is_reduced(a, b) {
                return ((a, b), acc);
            }
        }
    }

    /// The reduced forms in the cycle of a reduced form, starting with it,
    /// each with the multiplier from the starting form.
    pub fn cycle(&self, start: (i128, i128)) -> Vec<((i128, i128), Elem)> {
        let mut out = vec![(start, Elem::one(self.d))];
        if self.d < 0 {
            return out;
        }
        let mut cur = start;
        let mut acc = Elem::one(self.d);
        loop {
            let (f, l) = self.rho(cur.0, cur.1);
            acc = acc.mul(&l);
            if f == start {
                return out;
            }
            out.push((f, acc.clone()));
            cur = f;
        }
    }
}

/// A generator of the ideal when it is principal.
pub fn principal_generator(ideal: &Ideal) -> Option<Elem> {
    let d = ideal.d;
    let (content, (a, b)) = ideal.primitive_part();
    let red = Reducer::new(d);
    let ((ra, rb), lambda) = red.reduce(a, b);
    let found = red
        .cycle((ra, rb))
        .into_iter()
        .find(|((fa, _), _)| *fa == 1)
        .map(|(_, mu)| mu.mul(&lambda))?;
    // found * I' = O, so I = content / found.
    let gen = found.inv().scale(&BigRational::from_integer(BigInt::from(content)));
    debug_assert!(Ideal::principal(&gen).map(|j| j == *ideal).unwrap_or(false));
    Some(gen)
}

/// A generator of `prod P_i^{e_i}` (exponents of either sign) when that
/// fractional ideal is principal. Keeps a reduced ideal `R` and an element
/// `g` with `partial product = g R`, so intermediate norms stay small.
pub fn generator_of_product(d: i64, factors: &[(Ideal, i64)]) -> Option<Elem> {
    let red = Reducer::new(d);
    let mut g = Elem::one(d);
    let mut r = Ideal::unit(d);
    for (ideal, e) in factors {
        let (step, scale) = if *e >= 0 {
            (*ideal, BigRational::one())
        } else {
            // P^-1 = conj(P) / N(P).
            (ideal.conj(), BigRational::one() / BigRational::from_integer(ideal.norm().into()))
        };
        for _ in 0..e.unsigned_abs() {
            let (content, (a, b)) = r.mul(&step).primitive_part();
            let ((ra, rb), lambda) = red.reduce(a, b);
            // r * step = content * lambda^-1 * reduced.
            g = g.mul(&lambda.inv()).scale(&(BigRational::from_integer(content.into()) * &scale));
            r = Ideal::from_primitive(d, ra, rb);
        }
    }
    principal_generator(&r).map(|beta| g.mul(&beta))
}
