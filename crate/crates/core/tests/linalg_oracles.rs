use std::collections::HashSet;
use std::sync::Arc;

use mcmod::galgebra::{polynomial_algebra, quotient_algebra, Homogeneous};
use mcmod::linalg::{Field, Matrix, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(field: Field, rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    // sparse-ish entries so that rank deficiency actually occurs
    let data = (0..rows * cols)
        .map(|_| if rng.gen_bool(0.4) { field.zero() } else { field.random(rng) })
        .collect();
    Matrix::from_vec(field, rows, cols, data).unwrap()
}

#[test]
fn rank_nullity_and_idempotent_rref() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for field in [Field::Rationals, Field::Prime(2), Field::Prime(3), Field::Prime(101)] {
        for _ in 0..200 {
            let (r, c) = (rng.gen_range(0..6), rng.gen_range(0..7));
            let m = random_matrix(field, r, c, &mut rng);
            let (e, pivots) = m.rref();
            assert_eq!(m.rank() + m.kernel_basis().len(), c);
            assert_eq!(pivots.len(), m.rank());
            assert_eq!(e.rref(), (e.clone(), pivots));
            for v in m.kernel_basis() {
                assert!(m.apply(&v).iter().all(Scalar::is_zero));
            }
        }
    }
}

fn all_vectors(p: u64, n: usize) -> Vec<Vec<Scalar>> {
    let f = Field::Prime(p);
    let total = p.pow(n as u32);
    (0..total)
        .map(|mut k| {
            (0..n)
                .map(|_| {
                    let d = k % p;
                    k /= p;
                    f.from_i64(d as i64)
                })
                .collect()
        })
        .collect()
}

#[test]
fn kernel_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for p in [2u64, 3] {
        let f = Field::Prime(p);
        for _ in 0..30 {
            let cols = rng.gen_range(1..=8);
            let rows = rng.gen_range(0..=4);
            let m = random_matrix(f, rows, cols, &mut rng);
            let brute: HashSet<Vec<Scalar>> = all_vectors(p, cols)
                .into_iter()
                .filter(|v| m.apply(v).iter().all(Scalar::is_zero))
                .collect();
            let basis = m.kernel_basis();
            assert_eq!(brute.len() as u64, p.pow(basis.len() as u32));
            let span = Matrix::from_rows(f, cols, basis.clone()).unwrap();
            assert_eq!(span.rank(), basis.len());
            for v in &brute {
                let single = Matrix::from_rows(f, cols, vec![v.clone()]).unwrap();
                assert!(span.row_space_contains(&single));
            }
        }
    }
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn polynomial_hilbert_functions() {
    for n in 1..=4 {
        let a = polynomial_algebra(&vec![1; n], 4, Field::Rationals).unwrap();
        let expected: Vec<usize> = (0..=4).map(|d| binom(d + n - 1, n - 1)).collect();
        assert_eq!(a.hilbert_function(), expected);
    }
}

// Normal-form oracle: monomials of k[x,y,z] of degree d not divisible by the generator.
fn surviving_monomials(gen: [u32; 3], d: u32) -> usize {
    let mut count = 0;
    for a in 0..=d {
        for b in 0..=d - a {
            let c = d - a - b;
            if !(a >= gen[0] && b >= gen[1] && c >= gen[2]) {
                count += 1;
            }
        }
    }
    count
}

#[test]
fn principal_monomial_quotients() {
    let a = Arc::new(polynomial_algebra(&[1, 1, 1], 4, Field::Rationals).unwrap());
    for gen in [[1, 0, 0], [2, 0, 0], [1, 1, 0], [0, 1, 2], [1, 1, 1], [0, 0, 4]] {
        let text = ["x", "y", "z"]
            .iter()
            .zip(gen)
            .filter(|(_, e)| *e > 0)
            .map(|(v, e)| if e == 1 { v.to_string() } else { format!("{v}^{e}") })
            .collect::<Vec<_>>()
            .join("*");
        let rel: Homogeneous = a.parse_element(&text).unwrap();
        let b = quotient_algebra(&a, &[rel]).unwrap();
        let expected: Vec<usize> = (0..=4).map(|d| surviving_monomials(gen, d)).collect();
        assert_eq!(b.hilbert_function(), expected, "generator {text}");
        b.check_associativity().unwrap();
    }
}

#[test]
fn quadric_quotient_dims() {
    let a = polynomial_algebra(&[1, 1, 1], 4, Field::Prime(7)).unwrap();
    let q = a.parse_element("x*z - y^2").unwrap();
    let b = quotient_algebra(&a, &[q]).unwrap();
    assert_eq!(b.hilbert_function(), vec![1, 3, 5, 7, 9]);
    assert!(b.is_commutative());
}
