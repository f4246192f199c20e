//! Exhaustive enumeration of subspaces of `F_p^n` containing a fixed subspace.
//!
//! Subspaces containing `U` correspond to subspaces of the quotient `F_p^n / U`,
//! which is identified with the coordinates that are not pivots of `U`'s
//! reduced echelon basis. Quotient subspaces are listed by dimension, then by
//! pivot set (lexicographic), then by the free entries of their reduced
//! echelon basis (lexicographic in residue order). The order is canonical.

use super::matrix::Matrix;
use super::scalar::{Field, Scalar};

/// Gaussian binomial `[m choose k]_p`, saturating at `u128::MAX`.
pub fn gaussian_binomial(m: usize, k: usize, p: u64) -> u128 {
    if k > m {
        return 0;
    }
    let p = p as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        let a = p.saturating_pow((m - i) as u32).saturating_sub(1);
        let b = p.saturating_pow((i + 1) as u32).saturating_sub(1);
        num = match num.checked_mul(a) {
            Some(v) => v,
            None => return u128::MAX,
        };
        den = den.saturating_mul(b);
        let g = gcd(num, den);
        num /= g;
        den /= g;
    }
    num / den
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// Number of subspaces of `F_p^n`.
pub fn subspace_count(n: usize, p: u64) -> u128 {
    (0..=n).fold(0u128, |acc, k| acc.saturating_add(gaussian_binomial(n, k, p)))
}

/// Iterator over all subspaces of `F_p^n` containing the row space of `base`.
///
/// Each item is the reduced echelon basis (one row per basis vector).
pub struct SubspacesContaining {
    field: Field,
    n: usize,
    base: Matrix,
    quotient_coords: Vec<usize>,
    k: usize,
    pivots: Option<Vec<usize>>,
    free_slots: Vec<(usize, usize)>,
    digits: Vec<u64>,
    fresh: bool,
    done: bool,
}

impl SubspacesContaining {
    /// `base` may have any number of rows; it is reduced first.
    pub fn new(base: &Matrix) -> SubspacesContaining {
        let field = base.field();
        assert!(field.is_finite(), "subspace enumeration needs a finite field");
        let n = base.cols();
        let (r, pivots) = base.rref();
        let base = Matrix::from_rows(field, n, r.row_vecs().into_iter().take(pivots.len()).collect())
            .expect("rows have n entries");
        let quotient_coords = (0..n).filter(|c| !pivots.contains(c)).collect();
        let mut it = SubspacesContaining {
            field,
            n,
            base,
            quotient_coords,
            k: 0,
            pivots: None,
            free_slots: Vec::new(),
            digits: Vec::new(),
            fresh: true,
            done: false,
        };
        it.start_pivot_set(Vec::new());
        it
    }

    /// All subspaces of `F_p^n`.
    pub fn all(field: Field, n: usize) -> SubspacesContaining {
        SubspacesContaining::new(&Matrix::zeros(field, 0, n))
    }

    fn m(&self) -> usize {
        self.quotient_coords.len()
    }

    fn start_pivot_set(&mut self, pivots: Vec<usize>) {
        let m = self.m();
        let mut slots = Vec::new();
        for (row, &pc) in pivots.iter().enumerate() {
            for c in pc + 1..m {
                if !pivots.contains(&c) {
                    slots.push((row, c));
                }
            }
        }
        self.digits = vec![0; slots.len()];
        self.free_slots = slots;
        self.pivots = Some(pivots);
        self.fresh = true;
    }

    fn advance_digits(&mut self) -> bool {
        let p = self.field.characteristic();
        for d in self.digits.iter_mut().rev() {
            *d += 1;
            if *d < p {
                return true;
            }
            *d = 0;
        }
        false
    }

    fn advance_pivots(&mut self) -> bool {
        let m = self.m();
        let mut piv = self.pivots.take().unwrap_or_default();
        let k = self.k;
        // next k-combination of 0..m in lexicographic order
        let mut i = k;
        while i > 0 {
            i -= 1;
            if piv[i] < m - (k - i) {
                piv[i] += 1;
                for j in i + 1..k {
                    piv[j] = piv[j - 1] + 1;
                }
                self.start_pivot_set(piv);
                return true;
            }
        }
        if self.k < m {
            self.k += 1;
            self.start_pivot_set((0..self.k).collect());
            return true;
        }
        false
    }

    fn current(&self) -> Matrix {
        let f = self.field;
        let pivots = self.pivots.as_ref().expect("pivot set initialised");
        let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(self.base.rows() + pivots.len());
        rows.extend(self.base.row_vecs());
        let mut quotient = vec![vec![f.zero(); self.m()]; pivots.len()];
        for (row, &pc) in pivots.iter().enumerate() {
            quotient[row][pc] = f.one();
        }
        for (&(row, c), &d) in self.free_slots.iter().zip(&self.digits) {
            quotient[row][c] = f.from_i64(d as i64);
        }
        for q in quotient {
            let mut v = vec![f.zero(); self.n];
            for (t, s) in q.into_iter().enumerate() {
                v[self.quotient_coords[t]] = s;
            }
            rows.push(v);
        }
        Matrix::from_rows(f, self.n, rows).expect("rows have n entries").row_space()
    }
}

impl Iterator for SubspacesContaining {
    type Item = Matrix;

    fn next(&mut self) -> Option<Matrix> {
        if self.done {
            return None;
        }
        if self.fresh {
            self.fresh = false;
            return Some(self.current());
        }
        if self.advance_digits() || self.advance_pivots() {
            self.fresh = false;
            return Some(self.current());
        }
        self.done = true;
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn gaussian_binomials() {
        assert_eq!(gaussian_binomial(2, 1, 2), 3);
        assert_eq!(gaussian_binomial(4, 2, 3), 130);
        assert_eq!(gaussian_binomial(4, 1, 3), 40);
        assert_eq!(subspace_count(4, 3), 212);
        assert_eq!(subspace_count(0, 5), 1);
    }

    #[test]
    fn enumerates_each_subspace_once() {
        for p in [2u64, 3] {
            let f = Field::Prime(p);
            for n in 0..=4 {
                let all: Vec<Matrix> = SubspacesContaining::all(f, n).collect();
                assert_eq!(all.len() as u128, subspace_count(n, p), "p={p} n={n}");
                let distinct: HashSet<_> = all.iter().cloned().collect();
                assert_eq!(distinct.len(), all.len());
                for s in &all {
                    assert_eq!(s, &s.row_space());
                }
            }
        }
    }

    #[test]
    fn containing_a_line() {
        let f = Field::Prime(2);
        let line = Matrix::from_i64(f, &[&[1, 1, 0]]);
        let subs: Vec<Matrix> = SubspacesContaining::new(&line).collect();
        // subspaces of F_2^3 containing a line = subspaces of F_2^2
        assert_eq!(subs.len(), 5);
        assert!(subs.iter().all(|s| s.row_space_contains(&line)));
        assert_eq!(subs[0].rows(), 1);
        assert_eq!(subs[4].rows(), 3);
    }
}
