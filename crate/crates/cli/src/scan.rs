//! Exhaustive Maurer-Cartan point counting over a prime field.

use std::sync::Arc;

use mcmod::derived::mc_ideal_of;
use mcmod::dgla::{gauge_act, mc_residual, Cochain, Dgla, GaugeElement, ModulePoint};
use mcmod::galgebra::{DimensionVector, GradedAlgebra};
use mcmod::linalg::{Field, Matrix, Scalar};
use mcmod::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

pub const DEFAULT_SCAN_BUDGET: u128 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ScanReport {
    pub field: Field,
    pub window: (i64, i64),
    pub dims: Vec<usize>,
    pub l1_dim: usize,
    pub points: u128,
    /// MC points found by evaluating the residual `dμ + μ∘μ`.
    pub mc_points_residual: u64,
    /// MC points found by evaluating the MC ideal generators.
    pub mc_points_ideal: u64,
    pub agree: bool,
    pub gauge_group_order: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbits: Option<u64>,
    /// Orbit sizes in increasing order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit_sizes: Option<Vec<u64>>,
}

fn gl_order(n: usize, p: u64) -> u128 {
    let q = p as u128;
    (0..n as u32).fold(1u128, |acc, k| acc.saturating_mul(q.pow(n as u32).saturating_sub(q.pow(k))))
}

fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let mut factors = Vec::new();
    let mut m = p - 1;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            factors.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    let f = Field::Prime(p);
    (2..p)
        .find(|&g| factors.iter().all(|&q| !f.from_i64(g as i64).pow((p - 1) / q).is_one()))
        .expect("prime fields have primitive roots")
}

/// Generators of `Π GL(α_i, F_p)`: a primitive-root scaling of each coordinate and
/// the transvections `1 + E_rs`, one factor at a time.
pub fn gauge_generators(dims: &DimensionVector, field: Field) -> Vec<GaugeElement> {
    let p = field.characteristic();
    let omega = field.from_i64(primitive_root(p) as i64);
    let identity: Vec<Matrix> = dims.dims().iter().map(|&a| Matrix::identity(field, a)).collect();
    let mut out = Vec::new();
    for (k, &a) in dims.dims().iter().enumerate() {
        let mut variants = Vec::new();
        if p > 2 {
            for r in 0..a {
                let mut m = Matrix::identity(field, a);
                m.set(r, r, omega.clone());
                variants.push(m);
            }
        }
        for r in 0..a {
            for s in (0..a).filter(|&s| s != r) {
                let mut m = Matrix::identity(field, a);
                m.set(r, s, field.one());
                variants.push(m);
            }
        }
        for m in variants {
            let mut blocks = identity.clone();
            blocks[k] = m;
            out.push(GaugeElement::new(dims.low(), blocks).expect("invertible generator"));
        }
    }
    out
}

fn decode(field: Field, mut k: u128, n: usize) -> Vec<Scalar> {
    let p = field.characteristic() as u128;
    (0..n)
        .map(|_| {
            let v = (k % p) as i64;
            k /= p;
            field.from_i64(v)
        })
        .collect()
}

fn encode(coords: &[Scalar]) -> u128 {
    coords.iter().rev().fold(0u128, |acc, s| {
        let p = s.field().characteristic() as u128;
        acc * p + s.to_i64().expect("residue") as u128
    })
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Counts the MC points of `L^1` over `F_p` along two independent paths, and
/// optionally their gauge orbits (isomorphism classes of modules).
pub fn scan_mc(algebra: &Arc<GradedAlgebra>, dims: &DimensionVector, budget: u128, orbits: bool) -> Result<ScanReport> {
    let field = algebra.field();
    if !field.is_finite() {
        return Err(Error::FieldMismatch("scan-mc needs a prime field".into()));
    }
    let dgla = Dgla::new(algebra.clone(), dims.clone())?;
    let n = dgla.space(1).dim();
    let p = field.characteristic() as u128;
    let points = (0..n).try_fold(1u128, |acc, _| acc.checked_mul(p)).filter(|&t| t <= budget);
    let Some(points) = points else {
        return Err(Error::BudgetExceeded {
            what: format!("MC scan over F_{p}^{n}"),
            budget,
            count_bound: (0..n).fold(1u128, |acc, _| acc.saturating_mul(p)),
        });
    };
    let ideal = mc_ideal_of(&dgla);
    let flags: Vec<(bool, bool)> = (0..points)
        .into_par_iter()
        .map(|k| {
            let coords = decode(field, k, n);
            let by_ideal = ideal.vanishes_at(&coords);
            let mu = ModulePoint::new(Cochain::from_coords(&dgla, 1, coords).expect("sized")).expect("degree 1");
            (mc_residual(&mu).is_zero(), by_ideal)
        })
        .collect();
    let mc: Vec<u128> = (0..points).filter(|&k| flags[k as usize].0).collect();
    let by_ideal = flags.iter().filter(|f| f.1).count() as u64;
    let group = dims.dims().iter().fold(1u128, |acc, &a| acc.saturating_mul(gl_order(a, p as u64)));
    let (orbit_count, sizes) = if orbits {
        let gens = gauge_generators(dims, field);
        let images: Vec<Vec<usize>> = mc
            .par_iter()
            .map(|&k| {
                let c = Cochain::from_coords(&dgla, 1, decode(field, k, n)).expect("sized");
                gens.iter()
                    .map(|g| {
                        let image = encode(gauge_act(g, &c).expect("same window").coords());
                        mc.binary_search(&image).expect("gauge orbits stay in the MC locus")
                    })
                    .collect()
            })
            .collect();
        let mut parent: Vec<usize> = (0..mc.len()).collect();
        for (i, targets) in images.iter().enumerate() {
            for &j in targets {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut counts = std::collections::BTreeMap::new();
        for i in 0..mc.len() {
            *counts.entry(find(&mut parent, i)).or_insert(0u64) += 1;
        }
        let mut sizes: Vec<u64> = counts.into_values().collect();
        sizes.sort_unstable();
        (Some(sizes.len() as u64), Some(sizes))
    } else {
        (None, None)
    };
    Ok(ScanReport {
        field,
        window: (dims.low(), dims.high()),
        dims: dims.dims().to_vec(),
        l1_dim: n,
        points,
        mc_points_residual: mc.len() as u64,
        mc_points_ideal: by_ideal,
        agree: mc.len() as u64 == by_ideal,
        gauge_group_order: group,
        orbits: orbit_count,
        orbit_sizes: sizes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use mcmod::galgebra::polynomial_algebra;

    fn alg(vars: usize, bound: usize, p: u64) -> Arc<GradedAlgebra> {
        Arc::new(polynomial_algebra(&vec![1; vars], bound, Field::Prime(p)).unwrap())
    }

    #[test]
    fn univariate_window_over_f2() {
        let r = scan_mc(&alg(1, 2, 2), &DimensionVector::new(0, vec![1, 1, 1]).unwrap(), DEFAULT_SCAN_BUDGET, true).unwrap();
        assert_eq!(r.points, 8);
        assert_eq!(r.mc_points_residual, 4);
        assert!(r.agree);
        assert_eq!(r.gauge_group_order, 1);
        assert_eq!(r.orbits, Some(4));
    }

    #[test]
    fn length_one_windows() {
        // every point is MC; nonzero points fall into lines through the origin
        let r = scan_mc(&alg(2, 1, 3), &DimensionVector::new(0, vec![1, 1]).unwrap(), DEFAULT_SCAN_BUDGET, true).unwrap();
        assert_eq!(r.mc_points_residual, 9);
        assert_eq!(r.orbits, Some(1 + 4));
        assert_eq!(r.orbit_sizes, Some(vec![1, 2, 2, 2, 2]));
    }

    #[test]
    fn orbit_sizes_divide_the_group_order() {
        let r = scan_mc(&alg(1, 2, 3), &DimensionVector::new(0, vec![1, 2, 1]).unwrap(), DEFAULT_SCAN_BUDGET, true).unwrap();
        assert_eq!(r.gauge_group_order, 2 * 48 * 2);
        let sizes = r.orbit_sizes.unwrap();
        assert_eq!(sizes.iter().sum::<u64>(), r.mc_points_residual);
        assert!(sizes.iter().all(|&s| r.gauge_group_order % s as u128 == 0));
    }

    #[test]
    fn budget_and_field_errors() {
        let d = DimensionVector::new(0, vec![2, 2, 2]).unwrap();
        assert!(matches!(scan_mc(&alg(2, 2, 3), &d, 1000, false), Err(Error::BudgetExceeded { .. })));
        let q = Arc::new(polynomial_algebra(&[1], 2, Field::Rationals).unwrap());
        assert!(scan_mc(&q, &DimensionVector::new(0, vec![1, 1]).unwrap(), 10, false).is_err());
    }

    #[test]
    fn generators_act_invertibly() {
        let d = DimensionVector::new(0, vec![2, 1]).unwrap();
        let gens = gauge_generators(&d, Field::Prime(5));
        assert_eq!(gens.len(), 2 + 2 + 1);
        assert_eq!(primitive_root(5), 2);
        assert_eq!(primitive_root(7), 3);
    }
}
