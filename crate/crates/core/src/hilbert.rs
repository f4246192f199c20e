//! Hilbert polynomials, Macaulay bounds and Gotzmann persistence, plus the
//! module-side constructions (truncation, extension) relating window modules
//! to sheaves.

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::dgla::{is_module, Dgla, ModulePoint};
use crate::error::{Error, Result};
use crate::galgebra::DimensionVector;
use crate::linalg::Matrix;
use crate::stability::{check_stability, extremal_character, lowest_degree_generates, Mode, StabilityOptions, StabilityVerdict, Status};

/// `C(t, i)` as the polynomial `t(t-1)..(t-i+1)/i!`, valid for every integer `t`.
pub fn binomial(t: i64, i: usize) -> i128 {
    let mut c: i128 = 1;
    for k in 0..i as i128 {
        c = c * (t as i128 - k) / (k + 1);
    }
    c
}

/// `α(t) = Σ a_i C(t, i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HilbertPolynomial {
    coeffs: Vec<i64>,
}

impl HilbertPolynomial {
    /// Trailing zero coefficients are dropped.
    pub fn new(mut coeffs: Vec<i64>) -> HilbertPolynomial {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        HilbertPolynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree `k`; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn evaluate(&self, t: i64) -> i128 {
        self.coeffs.iter().enumerate().map(|(i, &a)| a as i128 * binomial(t, i)).sum()
    }
}

/// Whether `h` is not an integer multiple of another numerical polynomial.
///
/// Computed both from the coefficient gcd and from the gcd of `k + 1`
/// consecutive values; disagreement is reported as an error.
pub fn is_primitive(h: &HilbertPolynomial) -> Result<bool> {
    is_primitive_at(h, 0)
}

/// As [`is_primitive`], taking the values at `start..=start+k`.
pub fn is_primitive_at(h: &HilbertPolynomial, start: i64) -> Result<bool> {
    let k = h.degree().ok_or(Error::ZeroPolynomial)?;
    let by_coeffs = h.coeffs.iter().fold(0i128, |g, &a| g.gcd(&(a as i128)));
    let by_values = (start..=start + k as i64).fold(0i128, |g, t| g.gcd(&h.evaluate(t)));
    if by_coeffs != by_values {
        return Err(Error::Inconsistent(format!(
            "coefficient gcd {by_coeffs} differs from value gcd {by_values}"
        )));
    }
    Ok(by_coeffs == 1)
}

fn choose(m: u64, i: u64) -> u128 {
    if i > m {
        return 0;
    }
    let i = i.min(m - i);
    let mut c: u128 = 1;
    for k in 0..i as u128 {
        c = c.saturating_mul(m as u128 - k) / (k + 1);
    }
    c
}

/// `a = Σ_{i=1}^{t} C(m_i, i)` with `m_t > .. > m_1 >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MacaulayRep {
    pub t: usize,
    /// `m_t, m_{t-1}, .., m_1`.
    pub terms: Vec<u64>,
}

impl MacaulayRep {
    pub fn value(&self) -> u128 {
        self.terms
            .iter()
            .enumerate()
            .map(|(k, &m)| choose(m, (self.t - k) as u64))
            .sum()
    }
}

/// Greedy representation: the largest `m_t` with `C(m_t, t) <= a`, then recurse.
pub fn macaulay_rep(a: u64, t: usize) -> Result<MacaulayRep> {
    if t == 0 {
        return Err(Error::InvalidArgument("Macaulay representation needs t >= 1".into()));
    }
    let mut rest = a as u128;
    let mut terms = Vec::with_capacity(t);
    for i in (1..=t as u64).rev() {
        // C(m, i) is increasing in m >= i - 1; C(i - 1, i) = 0 <= rest
        let (mut lo, mut hi) = (i - 1, i - 1 + rest as u64 + 1);
        while lo < hi {
            let mid = lo + (hi - lo + 1) / 2;
            if choose(mid, i) <= rest {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        rest -= choose(lo, i);
        terms.push(lo);
    }
    Ok(MacaulayRep { t, terms })
}

/// `a^⟨t⟩ = Σ C(m_i + 1, i + 1)`.
pub fn macaulay_bound(a: u64, t: usize) -> Result<u128> {
    let rep = macaulay_rep(a, t)?;
    Ok(rep
        .terms
        .iter()
        .enumerate()
        .map(|(k, &m)| choose(m + 1, (t - k) as u64 + 1))
        .sum())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Comparison {
    /// Compares `h_{d+1}` with `h_d^⟨d-p⟩`.
    pub degree: i64,
    pub next: u64,
    pub bound: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GotzmannReport {
    pub base_degree: i64,
    pub values: Vec<u64>,
    pub macaulay_ok: bool,
    /// Least `d` from which every later step meets the bound with equality.
    pub persistent_from: Option<i64>,
    pub comparisons: Vec<Comparison>,
    /// Degrees `d` whose step was not compared (`d - p < 1`).
    pub skipped: Vec<i64>,
}

/// Checks `h_{d+1} <= h_d^⟨d-p⟩` for `d >= p+1` and locates where equality persists.
pub fn gotzmann_check(values: &[u64], p: i64) -> Result<GotzmannReport> {
    if values.len() < 2 {
        return Err(Error::InvalidArgument("Gotzmann check needs at least two values".into()));
    }
    let mut comparisons = Vec::new();
    let mut skipped = Vec::new();
    for k in 0..values.len() - 1 {
        let d = p + k as i64;
        let t = d - p;
        if t < 1 {
            skipped.push(d);
            continue;
        }
        comparisons.push(Comparison {
            degree: d,
            next: values[k + 1],
            bound: macaulay_bound(values[k], t as usize)?,
        });
    }
    let macaulay_ok = comparisons.iter().all(|c| c.next as u128 <= c.bound);
    let mut persistent_from = None;
    for c in comparisons.iter().rev() {
        if c.next as u128 == c.bound {
            persistent_from = Some(c.degree);
        } else {
            break;
        }
    }
    Ok(GotzmannReport {
        base_degree: p,
        values: values.to_vec(),
        macaulay_ok,
        persistent_from,
        comparisons,
        skipped,
    })
}

/// The dimension vector of the module.
pub fn hilbert_function_of_module(mu: &ModulePoint) -> Vec<usize> {
    mu.dims().dims().to_vec()
}

/// Restriction to the window `[p', q]`.
pub fn truncate_module(mu: &ModulePoint, low: i64) -> Result<ModulePoint> {
    let dims = mu.dims();
    if low < dims.low() || low > dims.high() {
        return Err(Error::InvalidArgument(format!(
            "truncation degree {low} outside the window [{}, {}]",
            dims.low(),
            dims.high()
        )));
    }
    let kept = dims.degrees().filter(|&i| i >= low).map(|i| dims.at(i)).collect();
    let dgla = Dgla::new(mu.algebra().clone(), DimensionVector::new(low, kept)?)?;
    let mut out = ModulePoint::zero(&dgla);
    for blk in dgla.space(1).blocks() {
        let d = blk.composition[0];
        for e in 0..blk.tuples {
            out.set_action(blk.source, d, e, &mu.action(blk.source, d, e))?;
        }
    }
    Ok(out)
}

/// Whether `V_p` generates the module.
pub fn is_generated_in_lowest_degree(mu: &ModulePoint) -> Result<bool> {
    if !is_module(mu) {
        return Err(Error::NotAModule("generation check needs a Maurer-Cartan point".into()));
    }
    Ok(lowest_degree_generates(mu))
}

/// Hilbert function `h_p..h_D` of `M̃ = (A ⊗ M_p) / K̃`, where `K̃` is generated by
/// the kernels `K_e` of `A_{e-p} ⊗ M_p -> M_e`, `p < e <= q`.
pub fn extend_module(mu: &ModulePoint, top: i64) -> Result<Vec<usize>> {
    if !is_generated_in_lowest_degree(mu)? {
        return Err(Error::NotGenerated);
    }
    let dims = mu.dims();
    let (p, q) = (dims.low(), dims.high());
    if top < p {
        return Err(Error::InvalidArgument(format!("target degree {top} below the window")));
    }
    let alg = mu.algebra();
    let span = (top - p) as usize;
    if alg.bound() < span {
        return Err(Error::BoundTooSmall { needed: span, bound: alg.bound() });
    }
    let f = mu.field();
    let a = dims.at(p);
    // K_e as rows indexed by (basis of A_{e-p}) * a + v
    let kernels: Vec<(i64, Matrix)> = (p + 1..=q)
        .map(|e| {
            let d = (e - p) as usize;
            let n = alg.dim(d);
            let mut phi = Matrix::zeros(f, dims.at(e), n * a);
            for b in 0..n {
                let m = mu.action(p, d, b);
                for v in 0..a {
                    for r in 0..dims.at(e) {
                        phi.set(r, b * a + v, m.get(r, v).clone());
                    }
                }
            }
            let rows = phi.kernel_basis();
            (e, Matrix::from_rows(f, n * a, rows).expect("kernel vectors"))
        })
        .collect();
    let values: Vec<usize> = (p..=top)
        .into_par_iter()
        .map(|d| {
            let dd = (d - p) as usize;
            let width = alg.dim(dd) * a;
            let mut rel = Matrix::zeros(f, 0, width);
            for (e, k) in kernels.iter().filter(|(e, _)| *e <= d) {
                let (c_deg, k_deg) = ((d - e) as usize, (e - p) as usize);
                for c in 0..alg.dim(c_deg) {
                    let mut moved = Matrix::zeros(f, k.rows(), width);
                    for row in 0..k.rows() {
                        for b in 0..alg.dim(k_deg) {
                            let prod = alg.basis_product(c_deg, c, k_deg, b);
                            for v in 0..a {
                                let coef = k.get(row, b * a + v);
                                if coef.is_zero() {
                                    continue;
                                }
                                for (t, s) in prod.iter().enumerate().filter(|(_, s)| !s.is_zero()) {
                                    let idx = t * a + v;
                                    let cur = moved.get(row, idx) + &(coef * s);
                                    moved.set(row, idx, cur);
                                }
                            }
                        }
                    }
                    rel = rel.vstack(&moved);
                }
            }
            width - rel.rank()
        })
        .collect();
    for (k, d) in (p..=q.min(top)).enumerate() {
        if values[k] != dims.at(d) {
            return Err(Error::PresentationMismatch(format!(
                "extension has dimension {} in degree {d}, module has {}",
                values[k],
                dims.at(d)
            )));
        }
    }
    Ok(values)
}

/// The parameters `(p, p', q, D)` a pipeline verdict is valid for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Regime {
    pub p: i64,
    pub p_prime: i64,
    pub q: i64,
    pub d: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PipelineReport {
    pub regime: Regime,
    pub generated_in_lowest_degree: bool,
    pub extension: Option<Vec<usize>>,
    pub gotzmann: Option<GotzmannReport>,
    /// Whether `α(t+1) = α(t)^⟨t-p⟩` held at every compared step of the extension.
    pub persistence_hypothesis: Option<bool>,
    pub stability: StabilityVerdict,
    pub truncated_stability: StabilityVerdict,
    pub combined: Status,
    /// Module-level (semi)stability certificate for the associated sheaf, valid
    /// only in the stamped regime.
    pub sheaf_certificate: bool,
    pub notes: Vec<String>,
}

/// Generation, extension to `D`, Gotzmann check, and extremal stability of the
/// module and of its truncation to `[p', q]`.
pub fn sheaf_stability_pipeline(mu: &ModulePoint, p_prime: i64, top: i64, fields: &[u64], budget: usize) -> Result<PipelineReport> {
    let dims = mu.dims().clone();
    let regime = Regime {
        p: dims.low(),
        p_prime,
        q: dims.high(),
        d: top,
    };
    let mut notes = Vec::new();
    let generated = is_generated_in_lowest_degree(mu)?;
    let (extension, gotzmann) = if generated {
        let ext = extend_module(mu, top)?;
        let values: Vec<u64> = ext.iter().map(|&v| v as u64).collect();
        let g = gotzmann_check(&values, dims.low())?;
        (Some(ext), Some(g))
    } else {
        notes.push(format!("V_{} does not generate the module; extension and Gotzmann check skipped", dims.low()));
        (None, None)
    };
    let persistence_hypothesis = gotzmann
        .as_ref()
        .map(|g| g.comparisons.iter().all(|c| c.next as u128 == c.bound));
    if persistence_hypothesis == Some(false) {
        notes.push("the extended Hilbert function does not meet the Macaulay bound with equality at every step".into());
    }
    let options = StabilityOptions {
        fields: fields.to_vec(),
        mode: if mu.field().is_finite() { Mode::FiniteField } else { Mode::ExactLift },
        budget,
    };
    let stability = check_stability(mu, &extremal_character(&dims)?, &options)?;
    let truncated = truncate_module(mu, p_prime)?;
    let truncated_stability = check_stability(&truncated, &extremal_character(truncated.dims())?, &options)?;
    let combined = stability.status.min(truncated_stability.status);
    let sheaf_certificate = generated
        && gotzmann.as_ref().is_some_and(|g| g.macaulay_ok)
        && combined != Status::Unstable;
    Ok(PipelineReport {
        regime,
        generated_in_lowest_degree: generated,
        extension,
        gotzmann,
        persistence_hypothesis,
        stability,
        truncated_stability,
        combined,
        sheaf_certificate,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galgebra::{polynomial_algebra, quotient_algebra};
    use crate::linalg::Field;
    use std::sync::Arc;

    const Q: Field = Field::Rationals;

    #[test]
    fn evaluation_examples() {
        assert_eq!(HilbertPolynomial::new(vec![1, 1]).evaluate(3), 4);
        assert_eq!(HilbertPolynomial::new(vec![]).evaluate(7), 0);
        assert_eq!(HilbertPolynomial::new(vec![0, 2]).evaluate(-1), -2);
        assert_eq!(binomial(-2, 2), 3);
    }

    #[test]
    fn primitivity() {
        assert_eq!(is_primitive(&HilbertPolynomial::new(vec![1, 1])), Ok(true));
        assert_eq!(is_primitive(&HilbertPolynomial::new(vec![2, 2])), Ok(false));
        assert_eq!(is_primitive(&HilbertPolynomial::new(vec![0, 0])), Err(Error::ZeroPolynomial));
        assert_eq!(is_primitive_at(&HilbertPolynomial::new(vec![3, 0, 2]), 5), Ok(true));
        assert_eq!(is_primitive_at(&HilbertPolynomial::new(vec![2, 0, 4]), -3), Ok(false));
    }

    #[test]
    fn macaulay_examples() {
        assert_eq!(macaulay_rep(0, 3).unwrap().terms, vec![2, 1, 0]);
        assert_eq!(macaulay_rep(4, 1).unwrap().terms, vec![4]);
        assert_eq!(macaulay_rep(5, 2).unwrap().terms, vec![3, 2]);
        assert_eq!(macaulay_bound(0, 2).unwrap(), 0);
        assert_eq!(macaulay_bound(4, 1).unwrap(), 10);
        assert_eq!(macaulay_bound(5, 2).unwrap(), 7);
    }

    #[test]
    fn gotzmann_examples() {
        let line = gotzmann_check(&[1, 2, 3, 4, 5], 0).unwrap();
        assert!(line.macaulay_ok);
        assert_eq!(line.persistent_from, Some(1));
        assert_eq!(line.skipped, vec![0]);
        let quadric = gotzmann_check(&[1, 3, 5, 7, 9], 0).unwrap();
        assert!(quadric.macaulay_ok);
        assert_eq!(quadric.persistent_from, Some(2));
        assert!(!gotzmann_check(&[1, 2, 5], 0).unwrap().macaulay_ok);
        let delayed = gotzmann_check(&[1, 2, 3, 3, 3, 3], 0).unwrap();
        assert_eq!(delayed.persistent_from, Some(3));
        assert!(gotzmann_check(&[1], 0).is_err());
    }

    #[test]
    fn extension_of_plane_window() {
        let a = Arc::new(polynomial_algebra(&[1, 1], 5, Q).unwrap());
        let mu = ModulePoint::tautological(&a, 0, 1, 0).unwrap();
        assert_eq!(extend_module(&mu, 5).unwrap(), vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn extension_with_a_linear_relation() {
        let a = Arc::new(polynomial_algebra(&[1, 1], 4, Q).unwrap());
        let b = Arc::new(quotient_algebra(&a, &[a.parse_element("y").unwrap()]).unwrap());
        let dgla = Dgla::new(a.clone(), DimensionVector::new(0, vec![1, 1]).unwrap()).unwrap();
        let mut mu = ModulePoint::zero(&dgla);
        mu.set_action(0, 1, 0, &Matrix::identity(Q, 1)).unwrap();
        assert_eq!(extend_module(&mu, 4).unwrap(), vec![1, 1, 1, 1, 1]);
        let taut = ModulePoint::tautological(&b, 0, 1, 0).unwrap();
        assert_eq!(taut.dims().dims(), &[1, 1]);
    }

    #[test]
    fn extension_rejects_ungenerated() {
        let a = Arc::new(polynomial_algebra(&[1, 1], 3, Q).unwrap());
        let dgla = Dgla::new(a, DimensionVector::new(0, vec![0, 1]).unwrap()).unwrap();
        assert_eq!(extend_module(&ModulePoint::zero(&dgla), 3), Err(Error::NotGenerated));
    }

    #[test]
    fn truncation_of_tautological() {
        let a = Arc::new(polynomial_algebra(&[1, 1], 2, Q).unwrap());
        let mu = ModulePoint::tautological(&a, 0, 2, 0).unwrap();
        assert_eq!(truncate_module(&mu, 0).unwrap(), mu);
        assert_eq!(truncate_module(&mu, 1).unwrap(), ModulePoint::tautological(&a, 1, 2, 0).unwrap());
        assert!(truncate_module(&mu, 3).is_err());
    }

    #[test]
    fn generation_examples() {
        let a = Arc::new(polynomial_algebra(&[1, 1], 2, Q).unwrap());
        let taut = ModulePoint::tautological(&a, 0, 2, 0).unwrap();
        assert_eq!(is_generated_in_lowest_degree(&taut), Ok(true));
        let dgla = Dgla::new(a.clone(), DimensionVector::new(0, vec![1, 0, 1]).unwrap()).unwrap();
        assert_eq!(is_generated_in_lowest_degree(&ModulePoint::zero(&dgla)), Ok(false));
        let sum = taut.direct_sum(&ModulePoint::tautological(&a, 0, 2, -1).unwrap()).unwrap();
        assert_eq!(is_generated_in_lowest_degree(&sum), Ok(false));
    }
}
