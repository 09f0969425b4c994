use crate::arith::prime_power;
use crate::error::{Error, Result};

/// Largest field size with lookup tables.
pub const FIELD_BOUND: u64 = 1 << 16;

/// An element: `0` is zero and `k + 1` is `g^k` for the fixed generator `g`.
pub type Fe = u32;

/// `GF(p^m)` with Zech logarithms, for `p^m <= 2^16`.
#[derive(Clone, Debug)]
pub struct FiniteField {
    pub p: u32,
    pub m: u32,
    size: u32,
    /// `zech[k]` is `1 + g^k`.
    zech: Vec<Fe>,
    /// Additive encoding (base-`p` digits of the polynomial basis) to element.
    from_digits: Vec<Fe>,
}

impl FiniteField {
    pub fn new(p: u32, m: u32) -> Result<Self> {
        let size = (p as u64).checked_pow(m).filter(|&s| s <= FIELD_BOUND).ok_or_else(|| {
            Error::Budget(format!("GF({p}^{m}) exceeds the table bound {FIELD_BOUND}"))
        })?;
        if prime_power(p as u64).map(|(_, e)| e) != Some(1) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        let size = size as u32;
        let order = size - 1;
        let powers = primitive_powers(p, m);
        let mut from_digits = vec![0; size as usize];
        for (k, &enc) in powers.iter().enumerate() {
            from_digits[enc as usize] = k as Fe + 1;
        }
        let zech = (0..order)
            .map(|k| {
                let enc = powers[k as usize];
                let plus_one = enc - enc % p + (enc % p + 1) % p;
                from_digits[plus_one as usize]
            })
            .collect();
        Ok(FiniteField { p, m, size, zech, from_digits })
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn one(&self) -> Fe {
        1
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        0..self.size
    }

    pub fn from_int(&self, c: i64) -> Fe {
        self.from_digits[c.rem_euclid(self.p as i64) as usize]
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a == 0 || b == 0 {
            return 0;
        }
        let order = self.size - 1;
        ((a - 1 + b - 1) % order) + 1
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let order = (self.size - 1) as u64;
        (((a - 1) as u64 * (e % order)) % order) as Fe + 1
    }

    pub fn inv(&self, a: Fe) -> Fe {
        assert!(a != 0, "inverse of zero");
        let order = self.size - 1;
        (order - (a - 1)) % order + 1
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if a == 0 {
            return b;
        }
        if b == 0 {
            return a;
        }
        let order = self.size - 1;
        let k = (b + order - a) % order;
        self.mul(a, self.zech[k as usize])
    }

    pub fn neg(&self, a: Fe) -> Fe {
        if self.p == 2 || a == 0 {
            return a;
        }
        self.mul(a, (self.size - 1) / 2 + 1)
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    /// Squares in odd characteristic are the even powers of the generator.
    pub fn is_square(&self, a: Fe) -> bool {
        self.p == 2 || a == 0 || (a - 1) % 2 == 0
    }

    /// Absolute trace to `F_2`, as `0` or `1`; characteristic 2 only.
    pub fn trace_f2(&self, a: Fe) -> Fe {
        debug_assert_eq!(self.p, 2);
        let mut acc = 0;
        let mut z = a;
        for _ in 0..self.m {
            acc = self.add(acc, z);
            z = self.mul(z, z);
        }
        acc
    }
}

/// Additive encodings of `1, g, g^2, ...` for a primitive polynomial found by search.
fn primitive_powers(p: u32, m: u32) -> Vec<u32> {
    let size = p.pow(m);
    let order = size - 1;
    if m == 1 {
        for g in 1..p.max(2) {
            let mut x = 1u32;
            let mut seq = Vec::with_capacity(order as usize);
            for _ in 0..order {
                seq.push(x);
                x = x * g % p;
            }
            if x == 1 && seq.iter().skip(1).all(|&v| v != 1) {
                return seq;
            }
        }
        return vec![1];
    }
    // Monic f = t^m + c_{m-1} t^{m-1} + ... + c_0, encoded by the digits of `tail`.
    for tail in 1..size {
        if tail % p == 0 {
            continue;
        }
        let neg_tail: Vec<u32> = (0..m).map(|i| (p - (tail / p.pow(i)) % p) % p).collect();
        let mut seq = Vec::with_capacity(order as usize);
        let mut cur = vec![0u32; m as usize];
        cur[0] = 1;
        let mut ok = true;
        for k in 0..order {
            let enc = cur.iter().rev().fold(0u32, |acc, &d| acc * p + d);
            if k > 0 && enc == 1 {
                ok = false;
                break;
            }
            seq.push(enc);
            // Multiply by t and reduce with t^m = -tail.
            let top = cur[m as usize - 1];
            for i in (1..m as usize).rev() {
                cur[i] = (cur[i - 1] + top * neg_tail[i]) % p;
            }
            cur[0] = top * neg_tail[0] % p;
        }
        let back_to_one = cur[0] == 1 && cur[1..].iter().all(|&d| d == 0);
        if ok && back_to_one {
            return seq;
        }
    }
    unreachable!("every finite field has a primitive polynomial")
}
