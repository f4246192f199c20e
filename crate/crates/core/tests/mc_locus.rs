use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use mcmod::derived::mc_ideal_of;
use mcmod::dgla::{is_module, mc_residual, Cochain, Dgla, ModulePoint};
use mcmod::galgebra::{polynomial_algebra, DimensionVector};
use mcmod::linalg::{Field, Matrix};

type Point = BTreeSet<(String, i64, i64)>;

/// Action values of a point with all α_i = 1: (element label, source) -> scalar.
fn enumerate_actions(p: u64, keys: &[(String, i64)]) -> Vec<HashMap<(String, i64), i64>> {
    let total = p.pow(keys.len() as u32);
    (0..total)
        .map(|mut k| {
            keys.iter()
                .map(|key| {
                    let v = (k % p) as i64;
                    k /= p;
                    (key.clone(), v)
                })
                .collect()
        })
        .collect()
}

fn exponent(label: &str) -> [u32; 2] {
    // "x^2", "x*y", "y" ...
    let mut e = [0, 0];
    for factor in label.split('*') {
        let (var, pow) = factor.split_once('^').map_or((factor, 1), |(v, n)| (v, n.parse().unwrap()));
        e[if var == "x" { 0 } else { 1 }] += pow;
    }
    e
}

fn label(e: [u32; 2]) -> String {
    let mut parts = Vec::new();
    for (name, k) in ["x", "y"].iter().zip(e) {
        match k {
            0 => {}
            1 => parts.push(name.to_string()),
            _ => parts.push(format!("{name}^{k}")),
        }
    }
    parts.join("*")
}

/// The associativity oracle: for all monomials a, b of positive degree with
/// source j and j + deg a + deg b <= 2, μ(ab) = μ(a) μ(b) on V_j.
fn oracle_is_module(p: u64, act: &HashMap<(String, i64), i64>) -> bool {
    let monos = |d: u32| (0..=d).map(move |i| [d - i, i]).collect::<Vec<_>>();
    for j in 0..=2i64 {
        for d1 in 1..=2u32 {
            for d2 in 1..=2u32 {
                if j + (d1 + d2) as i64 > 2 {
                    continue;
                }
                for a in monos(d1) {
                    for b in monos(d2) {
                        let ab = label([a[0] + b[0], a[1] + b[1]]);
                        let lhs = act[&(ab, j)];
                        let rhs = act[&(label(a), j + d2 as i64)] * act[&(label(b), j)];
                        if (lhs - rhs).rem_euclid(p as i64) != 0 {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

#[test]
fn mc_locus_equals_associative_actions_over_f2() {
    let f = Field::Prime(2);
    let a = Arc::new(polynomial_algebra(&[1, 1], 2, f).unwrap());
    let dgla = Dgla::new(a.clone(), DimensionVector::new(0, vec![1, 1, 1]).unwrap()).unwrap();
    let mut keys = Vec::new();
    for j in 0..=1i64 {
        for d in 1..=(2 - j) as usize {
            for l in a.labels(d) {
                keys.push((l.clone(), j));
            }
        }
    }
    assert_eq!(keys.len(), dgla.space(1).dim());
    let mut via_residual: BTreeSet<Point> = BTreeSet::new();
    let mut via_oracle: BTreeSet<Point> = BTreeSet::new();
    let ideal = mc_ideal_of(&dgla);
    let mut via_ideal = 0;
    for act in enumerate_actions(2, &keys) {
        let mut mu = ModulePoint::zero(&dgla);
        for ((l, j), v) in &act {
            let e = exponent(l);
            let d = (e[0] + e[1]) as usize;
            let idx = a.label_index(d, l).unwrap();
            mu.set_action(*j, d, idx, &Matrix::from_i64(f, &[&[*v]])).unwrap();
        }
        let point: Point = act.iter().map(|((l, j), v)| (l.clone(), *j, *v)).collect();
        if mc_residual(&mu).is_zero() {
            via_residual.insert(point.clone());
        }
        if oracle_is_module(2, &act) {
            via_oracle.insert(point);
        }
        if ideal.vanishes_at(mu.as_cochain().coords()) {
            via_ideal += 1;
        }
    }
    assert_eq!(via_residual, via_oracle);
    assert_eq!(via_ideal, via_oracle.len());
    // (u, v) with v_x u_y = v_y u_x: 10 of 16 over F_2, the w's are then forced
    assert_eq!(via_oracle.len(), 10);
}

#[test]
fn univariate_mc_count_over_f2() {
    let f = Field::Prime(2);
    let a = Arc::new(polynomial_algebra(&[1], 2, f).unwrap());
    let dgla = Dgla::new(a, DimensionVector::new(0, vec![1, 1, 1]).unwrap()).unwrap();
    let n = dgla.space(1).dim();
    let mut count = 0;
    for k in 0..(1u32 << n) {
        let coords = (0..n).map(|b| f.from_i64(((k >> b) & 1) as i64)).collect();
        let mu = ModulePoint::new(Cochain::from_coords(&dgla, 1, coords).unwrap()).unwrap();
        if is_module(&mu) {
            count += 1;
        }
    }
    assert_eq!(count, 4);
}

#[test]
fn short_windows_are_always_modules() {
    let f = Field::Prime(3);
    let a = Arc::new(polynomial_algebra(&[1, 1], 1, f).unwrap());
    let dgla = Dgla::new(a, DimensionVector::new(2, vec![1, 1]).unwrap()).unwrap();
    let n = dgla.space(1).dim();
    for k in 0..3u32.pow(n as u32) {
        let mut r = k;
        let coords = (0..n)
            .map(|_| {
                let v = r % 3;
                r /= 3;
                f.from_i64(v as i64)
            })
            .collect();
        assert!(is_module(&ModulePoint::new(Cochain::from_coords(&dgla, 1, coords).unwrap()).unwrap()));
    }
}
