//! Polynomials in free graded-commutative generators.
//!
//! A monomial is a nondecreasing list of generator indices; odd generators
//! appear at most once. Coefficients live in the ring's field.

use std::collections::BTreeMap;
use std::fmt;

use crate::linalg::{Field, Scalar};

/// Generators with names and integer (homological) degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperRing {
    field: Field,
    names: Vec<String>,
    degrees: Vec<i64>,
}

impl SuperRing {
    pub fn new(field: Field, names: Vec<String>, degrees: Vec<i64>) -> SuperRing {
        assert_eq!(names.len(), degrees.len());
        SuperRing { field, names, degrees }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, g: usize) -> &str {
        &self.names[g]
    }

    pub fn degree(&self, g: usize) -> i64 {
        self.degrees[g]
    }

    pub fn is_odd(&self, g: usize) -> bool {
        self.degrees[g].rem_euclid(2) == 1
    }

    pub fn monomial_degree(&self, m: &[usize]) -> i64 {
        m.iter().map(|&g| self.degrees[g]).sum()
    }

    fn parity(&self, m: &[usize]) -> bool {
        m.iter().filter(|&&g| self.is_odd(g)).count() % 2 == 1
    }

    /// Product of two monomials in normal form: `None` if it vanishes,
    /// otherwise the merged monomial and whether the Koszul sign is negative.
    pub fn monomial_product(&self, a: &[usize], b: &[usize]) -> Option<(Vec<usize>, bool)> {
        let mut negative = false;
        for &y in b.iter().filter(|&&y| self.is_odd(y)) {
            for &x in a.iter().filter(|&&x| self.is_odd(x)) {
                if x == y {
                    return None;
                }
                if x > y {
                    negative = !negative;
                }
            }
        }
        let mut m = Vec::with_capacity(a.len() + b.len());
        m.extend_from_slice(a);
        m.extend_from_slice(b);
        m.sort_unstable();
        Some((m, negative))
    }

    pub fn zero(&self) -> Poly {
        Poly { terms: BTreeMap::new() }
    }

    pub fn constant(&self, c: Scalar) -> Poly {
        self.term(Vec::new(), c)
    }

    pub fn generator(&self, g: usize) -> Poly {
        self.term(vec![g], self.field.one())
    }

    /// `c * m` for a monomial given in any order (normalised with its sign).
    pub fn term(&self, mut m: Vec<usize>, c: Scalar) -> Poly {
        let mut out = self.zero();
        // insertion sort tracking odd transpositions
        let mut negative = false;
        for i in 1..m.len() {
            let mut k = i;
            while k > 0 && m[k - 1] > m[k] {
                if self.is_odd(m[k - 1]) && self.is_odd(m[k]) {
                    negative = !negative;
                }
                m.swap(k - 1, k);
                k -= 1;
            }
        }
        if m.windows(2).any(|w| w[0] == w[1] && self.is_odd(w[0])) {
            return out;
        }
        let c = if negative { -c } else { c };
        out.add_term(m, c);
        out
    }

    pub fn add(&self, a: &Poly, b: &Poly) -> Poly {
        let mut out = a.clone();
        for (m, c) in &b.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        let mut out = self.zero();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                if let Some((m, neg)) = self.monomial_product(ma, mb) {
                    let c = ca * cb;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        out
    }

    /// Extends `images[g] = D(x_g)` to a derivation of the given parity,
    /// applying it left to right with sign `(-1)^{parity · |prefix|}`.
    pub fn apply_derivation(&self, images: &[Poly], odd: bool, f: &Poly) -> Poly {
        let mut out = self.zero();
        for (m, c) in &f.terms {
            for t in 0..m.len() {
                let image = &images[m[t]];
                if image.is_zero() {
                    continue;
                }
                let prefix = &m[..t];
                let suffix = &m[t + 1..];
                let mut coef = c.clone();
                if odd && self.parity(prefix) {
                    coef = -coef;
                }
                let left = self.term(prefix.to_vec(), coef);
                let right = self.term(suffix.to_vec(), self.field.one());
                let piece = self.mul(&self.mul(&left, image), &right);
                out = self.add(&out, &piece);
            }
        }
        out
    }

    /// Substitutes values for all generators (odd generators must evaluate
    /// in a commutative setting, so this is only meaningful for even rings).
    pub fn evaluate(&self, f: &Poly, values: &[Scalar]) -> Scalar {
        let mut acc = self.field.zero();
        for (m, c) in &f.terms {
            let mut v = c.clone();
            for &g in m {
                v = &v * &values[g];
            }
            acc += &v;
        }
        acc
    }

    pub fn render(&self, f: &Poly) -> String {
        if f.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, c)) in f.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { -c.clone() } else { c.clone() };
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors = Vec::new();
            if !abs.is_one() || m.is_empty() {
                factors.push(abs.to_string());
            }
            let mut i = 0;
            while i < m.len() {
                let mut j = i;
                while j < m.len() && m[j] == m[i] {
                    j += 1;
                }
                let name = &self.names[m[i]];
                factors.push(if j - i > 1 { format!("{name}^{}", j - i) } else { name.clone() });
                i = j;
            }
            out.push_str(&factors.join("*"));
        }
        out
    }

    pub fn display<'a>(&'a self, f: &'a Poly) -> impl fmt::Display + 'a {
        struct D<'a>(&'a SuperRing, &'a Poly);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0.render(self.1))
            }
        }
        D(self, f)
    }
}

/// A polynomial in normal form: no zero coefficients, monomials sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Vec<usize>, Scalar>,
}

impl Poly {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &[usize]) -> Option<&Scalar> {
        self.terms.get(m)
    }

    pub fn add_term(&mut self, m: Vec<usize>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Terms whose monomials satisfy the predicate.
    pub fn filter(&self, keep: impl Fn(&[usize]) -> bool) -> Poly {
        Poly {
            terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Largest number of factors in any monomial (0 for constants, -1 for zero).
    pub fn max_length(&self) -> i64 {
        self.terms.keys().map(|m| m.len() as i64).max().unwrap_or(-1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> SuperRing {
        // a, b even; s, t odd
        SuperRing::new(
            Field::Rationals,
            vec!["a".into(), "s".into(), "b".into(), "t".into()],
            vec![0, -1, 0, -1],
        )
    }

    #[test]
    fn odd_generators_anticommute() {
        let r = ring();
        let st = r.mul(&r.generator(1), &r.generator(3));
        let ts = r.mul(&r.generator(3), &r.generator(1));
        assert_eq!(r.add(&st, &ts), r.zero());
        assert!(r.mul(&r.generator(1), &r.generator(1)).is_zero());
        let aa = r.mul(&r.generator(0), &r.generator(0));
        assert_eq!(r.render(&aa), "a^2");
    }

    #[test]
    fn term_normalises_with_sign() {
        let r = ring();
        let t = r.term(vec![3, 2, 1], Field::Rationals.one());
        assert_eq!(r.render(&t), "-s*b*t");
        assert!(r.term(vec![1, 0, 1], Field::Rationals.one()).is_zero());
    }

    #[test]
    fn odd_derivation_is_graded_leibniz() {
        let r = ring();
        let f = Field::Rationals;
        // D(s) = a, D(t) = b^2, D(a) = D(b) = 0
        let images = vec![r.zero(), r.generator(0), r.zero(), r.mul(&r.generator(2), &r.generator(2))];
        let st = r.mul(&r.generator(1), &r.generator(3));
        let d = r.apply_derivation(&images, true, &st);
        // D(st) = D(s) t - s D(t)
        let expected = r.add(
            &r.mul(&r.generator(0), &r.generator(3)),
            &r.mul(&r.constant(f.from_i64(-1)), &r.mul(&r.generator(1), &images[3])),
        );
        assert_eq!(d, expected);
    }

    #[test]
    fn evaluation_of_even_polynomial() {
        let r = SuperRing::new(Field::Rationals, vec!["u".into(), "v".into()], vec![0, 0]);
        let f = Field::Rationals;
        let p = r.add(&r.mul(&r.generator(0), &r.generator(1)), &r.constant(f.from_i64(3)));
        assert_eq!(r.evaluate(&p, &[f.from_i64(2), f.from_i64(5)]), f.from_i64(13));
    }
}
