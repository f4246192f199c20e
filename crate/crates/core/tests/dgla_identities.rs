use std::sync::Arc;

use mcmod::dgla::{bracket, compose, differential, gauge_act, mc_residual, twisted_differential, Cochain, Dgla, GaugeElement, ModulePoint};
use mcmod::fixtures::free_algebra;
use mcmod::galgebra::{polynomial_algebra, quotient_algebra, DimensionVector, GradedAlgebra};
use mcmod::linalg::Field;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixture(k: usize, field: Field) -> Arc<Dgla> {
    let poly = |deg: &[usize], bound| Arc::new(polynomial_algebra(deg, bound, field).unwrap());
    let (a, low, dims): (Arc<GradedAlgebra>, i64, Vec<usize>) = match k {
        0 => (poly(&[1], 3), 0, vec![1, 1, 1, 1]),
        1 => (poly(&[1, 1], 2), 0, vec![1, 2, 1]),
        2 => (poly(&[1, 1], 2), -1, vec![2, 1, 1]),
        3 => {
            let a = polynomial_algebra(&[1, 1, 1], 2, field).unwrap();
            let q = a.parse_element("x*z - y^2").unwrap();
            (Arc::new(quotient_algebra(&a, &[q]).unwrap()), 0, vec![1, 1, 2])
        }
        4 => (Arc::new(free_algebra(2, 3, field).unwrap()), 0, vec![1, 1, 1, 1]),
        _ => (poly(&[1, 2], 3), 1, vec![1, 1, 2, 1]),
    };
    Dgla::new(a, DimensionVector::new(low, dims).unwrap()).unwrap()
}

const FIXTURES: usize = 6;

fn field(rational: bool) -> Field {
    if rational {
        Field::Rationals
    } else {
        Field::Prime(101)
    }
}

fn sign(field: Field, odd: bool) -> mcmod::linalg::Scalar {
    if odd {
        field.from_i64(-1)
    } else {
        field.one()
    }
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 48,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn d_squared_vanishes(seed: u64, k in 0..FIXTURES, rational: bool) {
        let dgla = fixture(k, field(rational));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for n in 0..=dgla.top_degree() {
            let x = Cochain::random(&dgla, n, &mut rng);
            prop_assert!(differential(&differential(&x)).is_zero());
        }
    }

    #[test]
    fn bracket_is_graded_lie(seed: u64, k in 0..FIXTURES, rational: bool) {
        let f = field(rational);
        let dgla = fixture(k, f);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let top = dgla.top_degree();
        let (a, b, c) = (rng.gen_range(0..=top), rng.gen_range(0..=top), rng.gen_range(0..=top));
        let x = Cochain::random(&dgla, a, &mut rng);
        let y = Cochain::random(&dgla, b, &mut rng);
        let z = Cochain::random(&dgla, c, &mut rng);
        // antisymmetry
        let xy = bracket(&x, &y).unwrap();
        let yx = bracket(&y, &x).unwrap();
        prop_assert_eq!(xy.add(&yx.scale(&sign(f, (a * b) % 2 == 1))).unwrap().is_zero(), true);
        // Jacobi
        let lhs = bracket(&x, &bracket(&y, &z).unwrap()).unwrap();
        let rhs = bracket(&xy, &z).unwrap()
            .add(&bracket(&y, &bracket(&x, &z).unwrap()).unwrap().scale(&sign(f, (a * b) % 2 == 1)))
            .unwrap();
        prop_assert_eq!(lhs, rhs);
        // associativity of the underlying product
        let l = compose(&compose(&x, &y).unwrap(), &z).unwrap();
        let r = compose(&x, &compose(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn differential_is_a_derivation(seed: u64, k in 0..FIXTURES, rational: bool) {
        let f = field(rational);
        let dgla = fixture(k, f);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let top = dgla.top_degree();
        let (a, b) = (rng.gen_range(0..=top), rng.gen_range(0..=top));
        let x = Cochain::random(&dgla, a, &mut rng);
        let y = Cochain::random(&dgla, b, &mut rng);
        let lhs = differential(&bracket(&x, &y).unwrap());
        let rhs = bracket(&differential(&x), &y).unwrap()
            .add(&bracket(&x, &differential(&y)).unwrap().scale(&sign(f, a % 2 == 1)))
            .unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn gauge_equivariance(seed: u64, k in 0..FIXTURES, rational: bool) {
        let f = field(rational);
        let dgla = fixture(k, f);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let top = dgla.top_degree();
        let g = GaugeElement::random(dgla.dims(), f, &mut rng);
        let h = GaugeElement::random(dgla.dims(), f, &mut rng);
        let x = Cochain::random(&dgla, rng.gen_range(0..=top), &mut rng);
        let y = Cochain::random(&dgla, rng.gen_range(0..=top), &mut rng);
        prop_assert_eq!(differential(&gauge_act(&g, &x).unwrap()), gauge_act(&g, &differential(&x)).unwrap());
        prop_assert_eq!(
            bracket(&gauge_act(&g, &x).unwrap(), &gauge_act(&g, &y).unwrap()).unwrap(),
            gauge_act(&g, &bracket(&x, &y).unwrap()).unwrap()
        );
        // left action
        prop_assert_eq!(
            gauge_act(&g, &gauge_act(&h, &x).unwrap()).unwrap(),
            gauge_act(&g.compose(&h).unwrap(), &x).unwrap()
        );
        let mu = ModulePoint::new(Cochain::random(&dgla, 1, &mut rng)).unwrap();
        prop_assert_eq!(
            mc_residual(&mu.gauge(&g).unwrap()),
            gauge_act(&g, &mc_residual(&mu)).unwrap()
        );
    }

    #[test]
    fn residual_matches_formula(seed: u64, k in 0..FIXTURES, rational: bool) {
        let f = field(rational);
        let dgla = fixture(k, f);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = Cochain::random(&dgla, 1, &mut rng);
        let point = ModulePoint::new(mu.clone()).unwrap();
        let formula = differential(&mu).add(&compose(&mu, &mu).unwrap()).unwrap();
        prop_assert_eq!(mc_residual(&point), formula.clone());
        // dμ + ½[μ,μ] where 2 is invertible
        let half = f.from_i64(2).inv().unwrap();
        let lie = differential(&mu).add(&bracket(&mu, &mu).unwrap().scale(&half)).unwrap();
        prop_assert_eq!(lie, formula);
    }

    #[test]
    fn twisted_square_is_curvature(seed: u64, k in 0..FIXTURES, rational: bool) {
        let dgla = fixture(k, field(rational));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = ModulePoint::new(Cochain::random(&dgla, 1, &mut rng)).unwrap();
        let y = Cochain::random(&dgla, rng.gen_range(0..=dgla.top_degree()), &mut rng);
        let twice = twisted_differential(&mu, &twisted_differential(&mu, &y).unwrap()).unwrap();
        prop_assert_eq!(twice, bracket(&mc_residual(&mu), &y).unwrap());
    }
}

#[test]
fn twisted_differential_at_zero_is_differential() {
    let dgla = fixture(1, Field::Rationals);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let y = Cochain::random(&dgla, 1, &mut rng);
    assert_eq!(twisted_differential(&ModulePoint::zero(&dgla), &y).unwrap(), differential(&y));
}

#[test]
fn self_twist_at_mc_point() {
    // d^μ μ = dμ + [μ,μ] = μ∘μ when μ is Maurer-Cartan
    let a = Arc::new(polynomial_algebra(&[1, 1], 2, Field::Rationals).unwrap());
    let mu = ModulePoint::tautological(&a, 0, 2, 0).unwrap();
    let c = mu.as_cochain();
    let lhs = twisted_differential(&mu, c).unwrap();
    assert_eq!(lhs, compose(c, c).unwrap());
    assert!(!lhs.is_zero());
}

#[test]
fn mixing_dglas_is_an_error() {
    let a = fixture(0, Field::Rationals);
    let b = fixture(1, Field::Rationals);
    let x = Cochain::zero(&a, 1);
    let y = Cochain::zero(&b, 1);
    assert!(bracket(&x, &y).is_err());
    let g = GaugeElement::identity(b.dims(), Field::Rationals);
    assert!(gauge_act(&g, &x).is_err());
}
