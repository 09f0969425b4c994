use std::collections::BTreeMap;
use std::fmt;

use super::field::{Fe, FiniteField};
use crate::error::{Error, Result};

/// Polynomial in `x, y, z` with integer coefficients, read modulo the characteristic.
#[derive(Clone, PartialEq, Eq)]
pub struct PlanePoly {
    /// Exponents `[x, y, z]` to nonzero coefficient.
    terms: BTreeMap<[u32; 3], i64>,
}

impl PlanePoly {
    pub fn from_terms(terms: impl IntoIterator<Item = ([u32; 3], i64)>) -> Self {
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            *map.entry(e).or_insert(0) += c;
        }
        map.retain(|_, c| *c != 0);
        PlanePoly { terms: map }
    }

    /// Parses sums of terms like `3*x^2*y`, `-y^2z`, `x y`; an `=` moves the right side over.
    pub fn parse(src: &str) -> Result<Self> {
        let (lhs, rhs) = match src.split_once('=') {
            Some((l, r)) => (l, Some(r)),
            None => (src, None),
        };
        let mut terms = parse_side(lhs)?;
        if let Some(r) = rhs {
            terms.extend(parse_side(r)?.into_iter().map(|(e, c)| (e, -c)));
        }
        let poly = PlanePoly::from_terms(terms);
        if poly.terms.is_empty() {
            return Err(Error::Parse(format!("'{src}' is the zero polynomial")));
        }
        Ok(poly)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; 3], &i64)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let d = self.degree();
        self.terms.keys().all(|e| e.iter().sum::<u32>() == d)
    }

    pub fn uses_z(&self) -> bool {
        self.terms.keys().any(|e| e[2] > 0)
    }

    pub fn homogenize(&self) -> PlanePoly {
        let d = self.degree();
        PlanePoly::from_terms(self.terms.iter().map(|(e, &c)| ([e[0], e[1], d - e[0] - e[1]], c)))
    }

    /// Sets `z = 1`.
    pub fn dehomogenize(&self) -> PlanePoly {
        PlanePoly::from_terms(self.terms.iter().map(|(e, &c)| ([e[0], e[1], 0], c)))
    }

    pub fn derivative(&self, var: usize) -> PlanePoly {
        PlanePoly::from_terms(self.terms.iter().filter(|(e, _)| e[var] > 0).map(|(e, &c)| {
            let mut e2 = *e;
            e2[var] -= 1;
            (e2, c * e[var] as i64)
        }))
    }

    /// Compiles the polynomial over a field for repeated evaluation.
    pub fn over(&self, field: &FiniteField) -> FieldPoly {
        let terms = self
            .terms
            .iter()
            .map(|(e, &c)| (field.from_int(c), *e))
            .filter(|(c, _)| *c != 0)
            .collect();
        FieldPoly { terms }
    }
}

/// A plane polynomial with coefficients reduced into a specific field.
#[derive(Clone, Debug)]
pub struct FieldPoly {
    terms: Vec<(Fe, [u32; 3])>,
}

impl FieldPoly {
    pub fn eval(&self, f: &FiniteField, pt: [Fe; 3]) -> Fe {
        self.terms.iter().fold(0, |acc, (c, e)| {
            let mut t = *c;
            for v in 0..3 {
                if e[v] > 0 {
                    t = f.mul(t, f.pow(pt[v], e[v] as u64));
                }
            }
            f.add(acc, t)
        })
    }

    /// Coefficients in `y` after substituting `x` and `z`.
    pub fn y_coefficients(&self, f: &FiniteField, x: Fe, z: Fe) -> Vec<Fe> {
        let dy = self.terms.iter().map(|(_, e)| e[1]).max().unwrap_or(0) as usize;
        let mut out = vec![0; dy + 1];
        for (c, e) in &self.terms {
            let t = f.mul(*c, f.mul(f.pow(x, e[0] as u64), f.pow(z, e[2] as u64)));
            out[e[1] as usize] = f.add(out[e[1] as usize], t);
        }
        out
    }
}

fn parse_side(src: &str) -> Result<Vec<([u32; 3], i64)>> {
    let chars: Vec<char> = src.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let mut sign = 1i64;
        while i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
            if chars[i] == '-' {
                sign = -sign;
            }
            i += 1;
        }
        let mut coeff = 1i64;
        let mut exps = [0u32; 3];
        let mut saw_factor = false;
        loop {
            if i >= chars.len() {
                break;
            }
            let ch = chars[i];
            if ch.is_ascii_digit() {
                let (n, next) = read_int(&chars, i)?;
                coeff = coeff
                    .checked_mul(n)
                    .ok_or_else(|| Error::Parse("coefficient overflow".into()))?;
                i = next;
            } else if let Some(v) = "xyz".find(ch) {
                i += 1;
                let mut e = 1u32;
                if i < chars.len() && chars[i] == '^' {
                    let (n, next) = read_int(&chars, i + 1)?;
                    e = u32::try_from(n).map_err(|_| Error::Parse("exponent too large".into()))?;
                    i = next;
                }
                exps[v] += e;
            } else {
                return Err(Error::Parse(format!("unexpected '{ch}' in '{src}'")));
            }
            saw_factor = true;
            if i < chars.len() && chars[i] == '*' {
                i += 1;
                continue;
            }
            if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                break;
            }
        }
        if !saw_factor {
            return Err(Error::Parse(format!("dangling sign in '{src}'")));
        }
        out.push((exps, sign * coeff));
    }
    Ok(out)
}

fn read_int(chars: &[char], start: usize) -> Result<(i64, usize)> {
    let mut i = start;
    while i < chars.len() && chars[i].is_ascii_digit() {
        i += 1;
    }
    if i == start {
        return Err(Error::Parse("expected a number".into()));
    }
    let s: String = chars[start..i].iter().collect();
    let n = s.parse::<i64>().map_err(|e| Error::Parse(format!("{s}: {e}")))?;
    Ok((n, i))
}

impl fmt::Display for PlanePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, &c) in self.terms.iter().rev() {
            let mut mono = Vec::new();
            for (v, name) in ["x", "y", "z"].iter().enumerate() {
                match e[v] {
                    0 => {}
                    1 => mono.push(name.to_string()),
                    k => mono.push(format!("{name}^{k}")),
                }
            }
            let body = mono.join("*");
            let mag = c.abs();
            let text = match (mag, body.is_empty()) {
                (_, true) => mag.to_string(),
                (1, false) => body,
                (_, false) => format!("{mag}*{body}"),
            };
            if first {
                write!(f, "{}{text}", if c < 0 { "-" } else { "" })?;
            } else {
                write!(f, " {} {text}", if c < 0 { "-" } else { "+" })?;
            }
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for PlanePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let p = PlanePoly::parse("y^2*z = x^3 + x*z^2").unwrap();
        assert!(p.is_homogeneous());
        assert_eq!(p.degree(), 3);
        assert_eq!(p.to_string(), "-x^3 - x*z^2 + y^2*z");
        let q = PlanePoly::parse("y^2 - x^2 x - 2x^2").unwrap();
        assert_eq!(q, PlanePoly::parse("y^2 = x^3 + 2*x^2").unwrap());
        assert!(!q.uses_z());
        assert_eq!(q.homogenize().to_string(), "-x^3 - 2*x^2*z + y^2*z");
        assert!(PlanePoly::parse("x + w").is_err());
        assert!(PlanePoly::parse("x - x").is_err());
        assert!(PlanePoly::parse("x +").is_err());
    }

    #[test]
    fn derivatives() {
        let p = PlanePoly::parse("y^2*z - x^3 - x*z^2").unwrap();
        assert_eq!(p.derivative(0), PlanePoly::parse("-3*x^2 - z^2").unwrap());
        assert_eq!(p.derivative(2), PlanePoly::parse("y^2 - 2*x*z").unwrap());
    }
}
