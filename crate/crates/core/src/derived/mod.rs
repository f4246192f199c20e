//! Derived structure of the MC locus: the MC ideal, the dg presentation
//! `(Sym L[1]^∨, q)` and tangent cohomology at a module point.

mod superpoly;

use std::sync::Arc;

use serde::Serialize;

pub use superpoly::{Poly, SuperRing};

use crate::dgla::{bracket, compose, differential, is_module, twisted_differential, Cochain, Dgla, ModulePoint};
use crate::error::{Error, Result};
use crate::galgebra::{DimensionVector, GradedAlgebra};
use crate::linalg::{Field, Matrix, Scalar};

/// Quadratic equations on `L^1` cutting out the module structures.
#[derive(Clone, Debug)]
pub struct McIdeal {
    pub ring: SuperRing,
    /// One polynomial per coordinate of `L^2`, in layout order.
    pub generators: Vec<Poly>,
    pub names: Vec<String>,
}

impl McIdeal {
    /// Values of the generators at a concrete point.
    pub fn evaluate(&self, mu: &ModulePoint) -> Vec<Scalar> {
        self.evaluate_coords(mu.as_cochain().coords())
    }

    pub fn evaluate_coords(&self, coords: &[Scalar]) -> Vec<Scalar> {
        self.generators.iter().map(|g| self.ring.evaluate(g, coords)).collect()
    }

    pub fn vanishes_at(&self, coords: &[Scalar]) -> bool {
        self.generators.iter().all(|g| self.ring.evaluate(g, coords).is_zero())
    }
}

fn l1_ring(dgla: &Dgla) -> SuperRing {
    let n = dgla.space(1).dim();
    SuperRing::new(
        dgla.field(),
        (0..n).map(|k| dgla.coordinate_name(1, k)).collect(),
        vec![0; n],
    )
}

/// The MC ideal for `(A, α)`.
pub fn mc_ideal(algebra: &Arc<GradedAlgebra>, dims: &DimensionVector) -> Result<McIdeal> {
    Ok(mc_ideal_of(&Dgla::new(algebra.clone(), dims.clone())?))
}

/// The MC ideal, expanded directly from `μ(ab) - μ(a)μ(b)` in coordinates.
pub fn mc_ideal_of(dgla: &Arc<Dgla>) -> McIdeal {
    let ring = l1_ring(dgla);
    let alg = dgla.algebra();
    let f = dgla.field();
    let l1 = dgla.space(1);
    let l2 = dgla.space(2);
    let mut generators = vec![ring.zero(); l2.dim()];
    for blk in l2.blocks() {
        let (d1, d2) = (blk.composition[0], blk.composition[1]);
        let mid = blk.source + d2 as i64;
        let merged = &l1.blocks()[l1.block_index(blk.source, &[d1 + d2]).expect("merged")];
        let left = &l1.blocks()[l1.block_index(mid, &[d1]).expect("left")];
        let right = &l1.blocks()[l1.block_index(blk.source, &[d2]).expect("right")];
        for t in 0..blk.tuples {
            let dg = blk.digits(t);
            let prod = alg.basis_product(d1, dg[0], d2, dg[1]);
            for r in 0..blk.rows {
                for c in 0..blk.cols {
                    let g = &mut generators[blk.coord(t, r, c)];
                    for (k, coef) in prod.iter().enumerate() {
                        g.add_term(vec![merged.coord(k, r, c)], coef.clone());
                    }
                    for l in 0..left.cols {
                        let (a, b) = (left.coord(dg[0], r, l), right.coord(dg[1], l, c));
                        g.add_term(if a <= b { vec![a, b] } else { vec![b, a] }, -f.one());
                    }
                }
            }
        }
    }
    let names = (0..l2.dim()).map(|k| dgla.coordinate_name(2, k)).collect();
    McIdeal { ring, generators, names }
}

/// The free graded-commutative algebra on the shifted dual of `L^{>0}` with its
/// degree `+1` derivation `q`.
#[derive(Clone, Debug)]
pub struct DgPresentation {
    dgla: Arc<Dgla>,
    ring: SuperRing,
    /// `level[g] = n` when generator `g` is dual to a coordinate of `L^n`.
    level: Vec<usize>,
    offsets: Vec<usize>,
    q: Vec<Poly>,
}

/// Degree-wise pieces of a `q`-image, relative to the base `L^1`: `q0` involves
/// only `L^1`-coordinates, `q1` is linear and `q2` quadratic in the remaining
/// generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSplit {
    pub q0: Poly,
    pub q1: Poly,
    pub q2: Poly,
}

impl DgPresentation {
    pub fn dgla(&self) -> &Arc<Dgla> {
        &self.dgla
    }

    pub fn ring(&self) -> &SuperRing {
        &self.ring
    }

    pub fn generator_count(&self) -> usize {
        self.level.len()
    }

    pub fn level(&self, g: usize) -> usize {
        self.level[g]
    }

    /// Index of the generator dual to coordinate `k` of `L^n`.
    pub fn generator(&self, n: usize, k: usize) -> usize {
        self.offsets[n - 1] + k
    }

    pub fn q_image(&self, g: usize) -> &Poly {
        &self.q[g]
    }

    pub fn q_images(&self) -> &[Poly] {
        &self.q
    }

    /// Replaces one `q`-image (used for mutation testing).
    pub fn set_q_image(&mut self, g: usize, p: Poly) {
        self.q[g] = p;
    }

    /// `q` extended to an arbitrary polynomial as an odd derivation.
    pub fn apply_q(&self, f: &Poly) -> Poly {
        self.ring.apply_derivation(&self.q, true, f)
    }

    pub fn split(&self, g: usize) -> QSplit {
        let outside = |m: &[usize]| m.iter().filter(|&&x| self.level[x] >= 2).count();
        QSplit {
            q0: self.q[g].filter(|m| outside(m) == 0),
            q1: self.q[g].filter(|m| outside(m) == 1),
            q2: self.q[g].filter(|m| outside(m) == 2),
        }
    }

    /// Every term of `q(x_g)` has degree `|x_g| + 1`.
    pub fn degrees_consistent(&self) -> bool {
        (0..self.level.len()).all(|g| {
            let want = self.ring.degree(g) + 1;
            self.q[g].terms().all(|(m, _)| self.ring.monomial_degree(m) == want)
        })
    }

    /// Generators `g` with `q(q(x_g)) != 0`.
    pub fn q_squared_failures(&self) -> Vec<usize> {
        (0..self.level.len()).filter(|&g| !self.apply_q(&self.q[g]).is_zero()).collect()
    }

    /// Plain-text listing `q(name) = ...`, one generator per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for g in 0..self.level.len() {
            out.push_str(&format!(
                "q({}) = {}   [deg {}]\n",
                self.ring.name(g),
                self.ring.render(&self.q[g]),
                self.ring.degree(g)
            ));
        }
        out
    }
}

/// Builds the presentation for `(A, α)`.
pub fn build_dg_presentation(algebra: &Arc<GradedAlgebra>, dims: &DimensionVector) -> Result<DgPresentation> {
    Ok(presentation_of(&Dgla::new(algebra.clone(), dims.clone())?))
}

/// Generators dual to `L^n` get degree `1 - n`. With `e_b` the coordinate basis,
/// `q(x^a) = Σ_b (-1)^{|x^b|} (d e_b)^a x^b + Σ_{b<c} (-1)^{|e_b||x^c|} [e_b,e_c]^a x^b x^c
///  + Σ_{|e_b| odd} (e_b∘e_b)^a (x^b)^2`.
pub fn presentation_of(dgla: &Arc<Dgla>) -> DgPresentation {
    let top = dgla.top_degree();
    let f = dgla.field();
    let mut offsets = Vec::new();
    let mut level = Vec::new();
    let mut names = Vec::new();
    let mut degrees = Vec::new();
    for n in 1..=top.max(1) {
        offsets.push(level.len());
        for k in 0..dgla.space(n).dim() {
            level.push(n);
            names.push(dgla.coordinate_name(n, k));
            degrees.push(1 - n as i64);
        }
    }
    let ring = SuperRing::new(f, names, degrees);
    let gen = |n: usize, k: usize| offsets[n - 1] + k;
    let mut q = vec![ring.zero(); level.len()];
    let sign = |odd: bool| if odd { -f.one() } else { f.one() };

    // linear part
    for n in 1..top {
        for b in 0..dgla.space(n).dim() {
            let de = differential(&Cochain::basis_vector(dgla, n, b));
            let s = sign((1 - n as i64).rem_euclid(2) == 1);
            for (a, v) in de.coords().iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                q[gen(n + 1, a)].add_term(vec![gen(n, b)], &s * v);
            }
        }
    }
    // quadratic part
    for n in 1..top {
        for m in n..=top - n {
            for b in 0..dgla.space(n).dim() {
                let eb = Cochain::basis_vector(dgla, n, b);
                let gb = gen(n, b);
                let start = if m == n { b } else { 0 };
                for c in start..dgla.space(m).dim() {
                    let gc = gen(m, c);
                    let ec = Cochain::basis_vector(dgla, m, c);
                    if gb == gc {
                        if n % 2 == 1 {
                            let sq = compose(&eb, &eb).expect("same dgla");
                            for (a, v) in sq.coords().iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                                q[gen(2 * n, a)].add_term(vec![gb, gb], v.clone());
                            }
                        }
                        continue;
                    }
                    // order the pair by generator index
                    let (lo, hi, elo, ehi, nlo, nhi) =
                        if gb < gc { (gb, gc, &eb, &ec, n, m) } else { (gc, gb, &ec, &eb, m, n) };
                    let br = bracket(elo, ehi).expect("same dgla");
                    let s = sign((nlo * (1 + nhi)) % 2 == 1);
                    for (a, v) in br.coords().iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                        let t = ring.term(vec![lo, hi], &s * v);
                        for (mono, coef) in t.terms() {
                            q[gen(n + m, a)].add_term(mono.clone(), coef.clone());
                        }
                    }
                }
            }
        }
    }
    DgPresentation { dgla: dgla.clone(), ring, level, offsets, q }
}

/// True iff `q ∘ q = 0` on every generator.
pub fn verify_q_squared(p: &DgPresentation) -> bool {
    p.q_squared_failures().is_empty()
}

/// Dimensions of the cohomology of `(L, d^μ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CohomologyReport {
    pub window: (i64, i64),
    pub field: Field,
    /// `dim H^n` for `n = 0..=q-p`.
    pub dims: Vec<usize>,
    pub augmented: bool,
    /// `dim L^n` for `n = 0..=q-p`.
    pub complex_dims: Vec<usize>,
    /// `rank d^μ : L^n -> L^{n+1}`.
    pub ranks: Vec<usize>,
}

impl CohomologyReport {
    pub fn euler_characteristic(&self) -> i64 {
        alternating(&self.dims)
    }

    pub fn complex_euler_characteristic(&self) -> i64 {
        alternating(&self.complex_dims) - i64::from(self.augmented)
    }
}

fn alternating(v: &[usize]) -> i64 {
    v.iter().enumerate().map(|(n, &d)| if n % 2 == 0 { d as i64 } else { -(d as i64) }).sum()
}

/// The matrix of `d^μ : L^n -> L^{n+1}` in coordinate bases.
pub fn twisted_matrix(mu: &ModulePoint, n: usize) -> Matrix {
    let dgla = mu.dgla();
    let (src, tgt) = (dgla.space(n).dim(), dgla.space(n + 1).dim());
    let mut m = Matrix::zeros(dgla.field(), tgt, src);
    for k in 0..src {
        let image = twisted_differential(mu, &Cochain::basis_vector(dgla, n, k)).expect("same dgla");
        for (r, v) in image.coords().iter().enumerate() {
            if !v.is_zero() {
                m.set(r, k, v.clone());
            }
        }
    }
    m
}

/// Cohomology of the tangent complex at `μ`. The augmented variant includes the
/// unit `k -> L^0` so that `H^0` counts endomorphisms modulo scalars.
pub fn tangent_cohomology(mu: &ModulePoint, augmented: bool) -> Result<CohomologyReport> {
    if !is_module(mu) {
        return Err(Error::NotMaurerCartan);
    }
    let dgla = mu.dgla();
    let top = dgla.top_degree();
    let complex_dims = dgla.dimensions();
    let ranks: Vec<usize> = (0..=top).map(|n| twisted_matrix(mu, n).rank()).collect();
    let dims = (0..=top)
        .map(|n| {
            let incoming = if n == 0 { usize::from(augmented) } else { ranks[n - 1] };
            complex_dims[n] - ranks[n] - incoming
        })
        .collect();
    let d = dgla.dims();
    Ok(CohomologyReport {
        window: (d.low(), d.high()),
        field: dgla.field(),
        dims,
        augmented,
        complex_dims,
        ranks,
    })
}

/// `(dim H^1, dim H^2)` of the augmented tangent complex.
pub fn deformation_spaces(mu: &ModulePoint) -> Result<(usize, usize)> {
    let r = tangent_cohomology(mu, true)?;
    Ok((r.dims.get(1).copied().unwrap_or(0), r.dims.get(2).copied().unwrap_or(0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgla::mc_residual;
    use crate::galgebra::polynomial_algebra;

    const Q: Field = Field::Rationals;

    fn alg(vars: usize, bound: usize) -> Arc<GradedAlgebra> {
        Arc::new(polynomial_algebra(&vec![1; vars], bound, Q).unwrap())
    }

    fn dv(low: i64, dims: &[usize]) -> DimensionVector {
        DimensionVector::new(low, dims.to_vec()).unwrap()
    }

    #[test]
    fn mc_ideal_univariate() {
        let ideal = mc_ideal(&alg(1, 2), &dv(0, &[1, 1, 1])).unwrap();
        assert_eq!(ideal.generators.len(), 1);
        // coordinates in layout order: x on V_0, x^2 on V_0, x on V_1
        let r = &ideal.ring;
        assert_eq!(
            r.render(&ideal.generators[0]),
            "-L1[0>1:x](0,0)*L1[1>2:x](0,0) + L1[0>2:x^2](0,0)"
        );
    }

    #[test]
    fn mc_ideal_sizes() {
        assert!(mc_ideal(&alg(2, 2), &dv(0, &[2, 3])).unwrap().generators.is_empty());
        let ideal = mc_ideal(&alg(2, 2), &dv(0, &[1, 1, 1])).unwrap();
        assert_eq!(ideal.generators.len(), 4);
        assert_eq!(ideal.names[1], "L2[0>2:x,y](0,0)");
    }

    #[test]
    fn ideal_evaluation_matches_residual() {
        let dgla = Dgla::new(alg(2, 3), dv(0, &[1, 2, 1, 1])).unwrap();
        let ideal = mc_ideal_of(&dgla);
        let mut rng = rand::thread_rng();
        for _ in 0..5 {
            let mu = ModulePoint::new(Cochain::random(&dgla, 1, &mut rng)).unwrap();
            assert_eq!(ideal.evaluate(&mu), mc_residual(&mu).coords());
        }
    }

    #[test]
    fn short_window_presentation_is_trivial() {
        let p = build_dg_presentation(&alg(2, 1), &dv(0, &[1, 2])).unwrap();
        assert!(p.q_images().iter().all(Poly::is_zero));
        assert!(verify_q_squared(&p));
    }

    #[test]
    fn presentation_l2_image_is_mc_generator() {
        let a = alg(1, 2);
        let p = build_dg_presentation(&a, &dv(0, &[1, 1, 1])).unwrap();
        let ideal = mc_ideal(&a, &dv(0, &[1, 1, 1])).unwrap();
        let g = p.generator(2, 0);
        assert_eq!(p.ring().degree(g), -1);
        let split = p.split(g);
        assert_eq!(split.q0, ideal.generators[0]);
        assert!(split.q1.is_zero() && split.q2.is_zero());
        assert!(p.degrees_consistent());
    }

    #[test]
    fn q_squares_to_zero() {
        for (vars, dims) in [(1, vec![1, 1, 1, 1]), (2, vec![1, 1, 1, 1]), (1, vec![1, 2, 1]), (2, vec![1, 0, 1, 1])] {
            let a = alg(vars, 3);
            let p = build_dg_presentation(&a, &dv(0, &dims)).unwrap();
            assert!(p.degrees_consistent());
            assert_eq!(p.q_squared_failures(), Vec::<usize>::new(), "vars={vars} dims={dims:?}");
        }
    }

    #[test]
    fn simple_module_cohomology() {
        let dgla = Dgla::new(alg(2, 1), dv(0, &[1, 1])).unwrap();
        let mut mu = ModulePoint::zero(&dgla);
        mu.set_action(0, 1, 0, &Matrix::identity(Q, 1)).unwrap();
        let r = tangent_cohomology(&mu, true).unwrap();
        assert_eq!(r.dims, vec![0, 1]);
        assert_eq!(deformation_spaces(&mu).unwrap(), (1, 0));
        let plain = tangent_cohomology(&mu, false).unwrap();
        assert_eq!(plain.dims, vec![1, 1]);
        assert_eq!(plain.euler_characteristic(), plain.complex_euler_characteristic());
        assert_eq!(r.euler_characteristic(), r.complex_euler_characteristic());
    }

    #[test]
    fn non_mc_point_rejected() {
        let dgla = Dgla::new(alg(1, 2), dv(0, &[1, 1, 1])).unwrap();
        let mut mu = ModulePoint::zero(&dgla);
        mu.set_action(0, 1, 0, &Matrix::identity(Q, 1)).unwrap();
        mu.set_action(1, 1, 0, &Matrix::identity(Q, 1)).unwrap();
        assert_eq!(tangent_cohomology(&mu, true), Err(Error::NotMaurerCartan));
    }
}
