use num_bigint::BigInt;
use std::collections::HashMap;

use super::ideal::{Ideal, Reducer};
use crate::arith::{divisors, isqrt};
use crate::error::{Error, Result};
use crate::exact::{cokernel_group, FgAb, IntMatrix};

/// Largest `|d|` accepted by class group enumeration.
pub const DISC_BOUND: i64 = 1_000_000;

/// Ideal class group with reduced representatives and discrete logs.
#[derive(Clone, Debug)]
pub struct ClassGroup {
    pub d: i64,
    pub group: FgAb,
    /// Reduced forms `(a, b, c)` with `b^2 - 4ac = d`, one per class.
    pub forms: Vec<(i64, i64, i64)>,
    /// Class ids of the chosen generators.
    pub generators: Vec<usize>,
    /// Columns are relations among the generators; the group is their cokernel.
    pub relations: IntMatrix,
    dlogs: Vec<Vec<i64>>,
    class_of_form: HashMap<(i128, i128), usize>,
}

/// Reduced primitive forms `(a, b)` of discriminant `d`.
pub fn reduced_forms(d: i64) -> Vec<(i128, i128)> {
    let red = Reducer::new(d);
    let mut out = Vec::new();
    if d < 0 {
        let amax = isqrt((-d / 3) as u64) as i128;
        for a in 1..=amax {
            for b in (-a + 1)..=a {
                if (b * b - d as i128) % (4 * a) == 0 && red.is_reduced(a, b) && primitive(d, a, b) {
                    out.push((a, b));
                }
            }
        }
    } else {
        let s = isqrt(d as u64) as i128;
        for b in 1..=s {
            if (b - d as i128) % 2 != 0 {
                continue;
            }
            let m = (d as i128 - b * b) / 4;
            for a in divisors(m as u64) {
                let a = a as i128;
                if red.is_reduced(a, b) && primitive(d, a, b) {
                    out.push((a, b));
                }
            }
        }
    }
    out
}

fn primitive(d: i64, a: i128, b: i128) -> bool {
    let c = (b * b - d as i128) / (4 * a);
    crate::arith::gcd(crate::arith::gcd(a as i64, b as i64), c as i64) == 1
}

/// Number of classes counted from reduced forms alone, without composition.
pub fn count_classes_by_forms(d: i64) -> usize {
    let forms = reduced_forms(d);
    if d < 0 {
        return forms.len();
    }
    let red = Reducer::new(d);
    let mut seen = std::collections::HashSet::new();
    let mut classes = 0;
    for f in forms {
        if seen.contains(&f) {
            continue;
        }
        classes += 1;
        for (g, _) in red.cycle(f) {
            seen.insert(g);
        }
    }
    classes
}

impl ClassGroup {
    pub fn new(d: i64) -> Result<Self> {
        if d.abs() > DISC_BOUND {
            return Err(Error::Budget(format!("|D| = {} exceeds the class group bound {DISC_BOUND}", d.abs())));
        }
        if !crate::arith::is_fundamental_discriminant(d) {
            return Err(Error::Invalid(format!("{d} is not a fundamental discriminant")));
        }
        let red = Reducer::new(d);
        let mut class_of_form = HashMap::new();
        let mut reps: Vec<(i128, i128)> = Vec::new();
        for f in reduced_forms(d) {
            if class_of_form.contains_key(&f) {
                continue;
            }
            let id = reps.len();
            reps.push(f);
            for (g, _) in red.cycle(f) {
                class_of_form.insert(g, id);
            }
        }
        let mut cg = ClassGroup {
            d,
            group: FgAb::trivial(),
            forms: reps
                .iter()
                .map(|&(a, b)| (a as i64, b as i64, ((b * b - d as i128) / (4 * a)) as i64))
                .collect(),
            generators: Vec::new(),
            relations: IntMatrix::zeros(0, 0),
            dlogs: Vec::new(),
            class_of_form,
        };
        cg.build_structure(&reps);
        Ok(cg)
    }

    pub fn order(&self) -> usize {
        self.forms.len()
    }

    pub fn identity(&self) -> usize {
        self.class_of(&Ideal::unit(self.d))
    }

    pub fn class_of(&self, ideal: &Ideal) -> usize {
        let (_, (a, b)) = ideal.primitive_part();
        let (f, _) = Reducer::new(self.d).reduce(a, b);
        self.class_of_form[&f]
    }

    pub fn representative(&self, class: usize) -> Ideal {
        let (a, b, _) = self.forms[class];
        Ideal::from_primitive(self.d, a as i128, b as i128)
    }

    pub fn compose(&self, x: usize, y: usize) -> usize {
        self.class_of(&self.representative(x).mul(&self.representative(y)))
    }

    /// Coordinates of a class on the generators.
    pub fn dlog(&self, class: usize) -> Vec<BigInt> {
        let k = self.generators.len();
        let mut v: Vec<BigInt> = self.dlogs[class].iter().map(|&x| BigInt::from(x)).collect();
        v.resize(k, BigInt::from(0));
        v
    }

    pub fn dlog_ideal(&self, ideal: &Ideal) -> Vec<BigInt> {
        self.dlog(self.class_of(ideal))
    }

    /// Grow the subgroup one generator at a time: each new class `g` gets the
    /// least `m` with `g^m` already in the subgroup, which yields one relation.
    fn build_structure(&mut self, reps: &[(i128, i128)]) {
        let h = reps.len();
        let id = self.identity();
        let mut dlogs: Vec<Option<Vec<i64>>> = vec![None; h];
        dlogs[id] = Some(Vec::new());
        let mut members = vec![id];
        let mut gens = Vec::new();
        let mut rel_cols: Vec<Vec<i64>> = Vec::new();
        for g in 0..h {
            if dlogs[g].is_some() {
                continue;
            }
            let k = gens.len();
            let mut power = g;
            let mut m = 1i64;
            while dlogs[power].is_none() {
                power = self.compose(power, g);
                m += 1;
            }
            let mut col: Vec<i64> = dlogs[power].clone().unwrap().iter().map(|x| -x).collect();
            col.resize(k + 1, 0);
            col[k] += m;
            rel_cols.push(col);
            let old = members.clone();
            let mut shifted = g;
            for e in 1..m {
                for &x in &old {
                    let y = self.compose(x, shifted);
                    let mut v = dlogs[x].clone().unwrap();
                    v.resize(k + 1, 0);
                    v[k] = e;
                    dlogs[y] = Some(v);
                    members.push(y);
                }
                shifted = self.compose(shifted, g);
            }
            gens.push(g);
        }
        let k = gens.len();
        let cols: Vec<Vec<BigInt>> = rel_cols
            .into_iter()
            .map(|mut c| {
                c.resize(k, 0);
                c.into_iter().map(BigInt::from).collect()
            })
            .collect();
        self.relations = IntMatrix::from_columns(k, &cols);
        self.group = if k == 0 { FgAb::trivial() } else { cokernel_group(&self.relations) };
        self.generators = gens;
        self.dlogs = dlogs.into_iter().map(|v| v.expect("every class reached")).collect();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::fundamental_discriminants;
    use crate::quadratic::ideal::primes_above;

    #[test]
    fn small_class_groups() {
        assert!(ClassGroup::new(-4).unwrap().group.is_trivial());
        let g20 = ClassGroup::new(-20).unwrap();
        assert_eq!(g20.group, FgAb::cyclic(2));
        assert_eq!(g20.forms, vec![(1, 0, 5), (2, 2, 3)]);
        let g23 = ClassGroup::new(-23).unwrap();
        assert_eq!(g23.group, FgAb::cyclic(3));
        assert_eq!(g23.order(), 3);
        assert_eq!(ClassGroup::new(-84).unwrap().group.to_string(), "Z/2 + Z/2");
        assert_eq!(ClassGroup::new(229).unwrap().order(), 3);
        assert_eq!(ClassGroup::new(40).unwrap().order(), 2);
        assert_eq!(ClassGroup::new(12).unwrap().order(), 1);
    }

    #[test]
    fn order_matches_form_count() {
        for d in fundamental_discriminants(-200, 500) {
            if d == 1 {
                continue;
            }
            let cg = ClassGroup::new(d).unwrap();
            assert_eq!(cg.order(), count_classes_by_forms(d), "d={d}");
            assert_eq!(cg.group.order().unwrap(), BigInt::from(cg.order()), "d={d}");
        }
    }

    #[test]
    fn dlog_is_a_homomorphism() {
        for &d in &[-23i64, -84, -260, -52, 229, 4 * 79, 1596] {
            let cg = ClassGroup::new(d).unwrap();
            let primes: Vec<_> = [2u64, 3, 5, 7, 11, 13].iter().flat_map(|&p| primes_above(d, p)).collect();
            for p in &primes {
                for q in &primes {
                    let lhs = cg.dlog_ideal(&p.ideal.mul(&q.ideal));
                    let rhs: Vec<BigInt> =
                        cg.dlog_ideal(&p.ideal).iter().zip(cg.dlog_ideal(&q.ideal)).map(|(a, b)| a + b).collect();
                    let diff: Vec<BigInt> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
                    let diff = IntMatrix::from_columns(diff.len(), &[diff]);
                    assert!(crate::exact::solve_integral(&cg.relations, &diff).is_some(), "d={d}");
                }
            }
        }
    }

    #[test]
    fn bound_is_enforced() {
        assert!(matches!(ClassGroup::new(-1_000_003 * 4), Err(Error::Budget(_))));
        assert!(matches!(ClassGroup::new(-284), Err(Error::Invalid(_))));
    }
}
