//! Standard algebras and module points used by the CLI and the test suites.

use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;

use crate::dgla::{Cochain, Dgla, GaugeElement, ModulePoint};
use crate::error::{Error, Result};
use crate::galgebra::{polynomial_algebra, DimensionVector, GradedAlgebra};
use crate::linalg::Field;

/// The free associative algebra on `letters` generators of degree 1, truncated at `bound`.
/// Basis of `A_d`: words of length `d`, lexicographic; product is concatenation.
pub fn free_algebra(letters: usize, bound: usize, field: Field) -> Result<GradedAlgebra> {
    if letters == 0 {
        return Err(Error::TrivialAlgebra);
    }
    const NAMES: [&str; 4] = ["x", "y", "z", "w"];
    let name = |k: usize| NAMES.get(k).map(|s| s.to_string()).unwrap_or_else(|| format!("x{k}"));
    let dim = |d: usize| letters.pow(d as u32);
    let word = |d: usize, mut i: usize| {
        let mut w = vec![0; d];
        for slot in w.iter_mut().rev() {
            *slot = i % letters;
            i /= letters;
        }
        w
    };
    let labels = (1..=bound)
        .map(|d| (0..dim(d)).map(|i| word(d, i).into_iter().map(name).collect::<Vec<_>>().join("")).collect())
        .collect();
    let mut products = HashMap::new();
    for d in 1..=bound {
        for e in 1..=bound - d {
            let table = (0..dim(d) * dim(e))
                .map(|idx| {
                    let (i, j) = (idx / dim(e), idx % dim(e));
                    let mut v = vec![field.zero(); dim(d + e)];
                    v[i * dim(e) + j] = field.one();
                    v
                })
                .collect();
            products.insert((d, e), table);
        }
    }
    GradedAlgebra::from_tables(field, bound, labels, products)
}

/// `Γ_[0,2] O_{P^1}`: the window `[0,2]` of `k[x,y]` with `α = (1,2,3)`.
pub fn projective_line_window(field: Field, bound: usize) -> Result<ModulePoint> {
    let a = Arc::new(polynomial_algebra(&[1, 1], bound.max(2), field)?);
    ModulePoint::tautological(&a, 0, 2, 0)
}

/// `Γ_[0,2](O ⊕ O(-2))` on `P^1`, `α = (1,2,4)`.
pub fn split_window(field: Field, bound: usize) -> Result<ModulePoint> {
    let a = Arc::new(polynomial_algebra(&[1, 1], bound.max(2), field)?);
    let o = ModulePoint::tautological(&a, 0, 2, 0)?;
    o.direct_sum(&ModulePoint::tautological(&a, 0, 2, -2)?)
}

fn embed(point: &ModulePoint, algebra: &Arc<GradedAlgebra>, low: i64, high: i64) -> Result<ModulePoint> {
    // pad a module on a sub-window with zero pieces
    let dims = point.dims();
    let full = DimensionVector::new(low, (low..=high).map(|i| dims.at(i)).collect())?;
    let dgla = Dgla::new(algebra.clone(), full)?;
    let mut out = ModulePoint::zero(&dgla);
    for blk in point.as_cochain().space().blocks() {
        let d = blk.composition[0];
        for e in 0..blk.tuples {
            out.set_action(blk.source, d, e, &point.action(blk.source, d, e))?;
        }
    }
    Ok(out)
}

fn random_summand<R: Rng + ?Sized>(algebra: &Arc<GradedAlgebra>, low: i64, high: i64, rng: &mut R) -> Result<ModulePoint> {
    let len = high - low;
    loop {
        match rng.gen_range(0..3) {
            0 => {
                // need high + twist <= bound and some piece in nonnegative degree
                let (lo, hi) = (-high, algebra.bound() as i64 - high);
                if lo > hi {
                    continue;
                }
                let twist = rng.gen_range(lo.max(hi - len - 1)..=hi);
                return ModulePoint::tautological(algebra, low, high, twist);
            }
            1 if len >= 1 => {
                // two adjacent degrees with arbitrary action: always a module
                let i = rng.gen_range(low..high);
                let (a, b) = (rng.gen_range(0..=2usize), rng.gen_range(0..=2usize));
                if a + b == 0 {
                    continue;
                }
                let dims = DimensionVector::new(i, vec![a, b])?;
                let dgla = Dgla::new(algebra.clone(), dims)?;
                let mu = ModulePoint::new(Cochain::random(&dgla, 1, rng))?;
                return embed(&mu, algebra, low, high);
            }
            _ => {
                let i = rng.gen_range(low..=high);
                let a = rng.gen_range(1..=2usize);
                let mut d = vec![0; (len + 1) as usize];
                d[(i - low) as usize] = a;
                let dgla = Dgla::new(algebra.clone(), DimensionVector::new(low, d)?)?;
                return Ok(ModulePoint::zero(&dgla));
            }
        }
    }
}

/// A random Maurer-Cartan point on the window `[low, high]`: a gauge transform of a
/// direct sum of window modules, two-step modules and semisimple pieces, with
/// `Σ α_i <= max_total`.
pub fn random_module_point<R: Rng + ?Sized>(
    algebra: &Arc<GradedAlgebra>,
    low: i64,
    high: i64,
    max_total: usize,
    rng: &mut R,
) -> Result<ModulePoint> {
    if high < low {
        return Err(Error::InvalidDimensionVector(format!("empty window [{low}, {high}]")));
    }
    for _ in 0..1000 {
        let parts = rng.gen_range(1..=3);
        let mut mu = random_summand(algebra, low, high, rng)?;
        for _ in 1..parts {
            mu = mu.direct_sum(&random_summand(algebra, low, high, rng)?)?;
        }
        if mu.dims().total() > max_total {
            continue;
        }
        let g = GaugeElement::random(mu.dims(), algebra.field(), rng);
        return mu.gauge(&g);
    }
    Err(Error::InvalidArgument(format!("no random module with total dimension <= {max_total}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgla::is_module;
    use rand::SeedableRng;

    #[test]
    fn free_algebra_is_noncommutative() {
        let a = free_algebra(2, 3, Field::Rationals).unwrap();
        assert_eq!(a.hilbert_function(), vec![1, 2, 4, 8]);
        assert!(!a.is_commutative());
        assert_eq!(a.labels(2), &["xx", "xy", "yx", "yy"]);
    }

    #[test]
    fn named_fixtures() {
        assert_eq!(projective_line_window(Field::Prime(2), 2).unwrap().dims().dims(), &[1, 2, 3]);
        assert_eq!(split_window(Field::Rationals, 5).unwrap().dims().dims(), &[1, 2, 4]);
    }

    #[test]
    fn random_points_are_modules() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let a = Arc::new(free_algebra(2, 3, Field::Prime(101)).unwrap());
        for _ in 0..20 {
            let mu = random_module_point(&a, 0, 3, 8, &mut rng).unwrap();
            assert!(is_module(&mu));
            assert!(mu.dims().total() <= 8);
        }
    }
}
