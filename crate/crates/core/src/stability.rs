//! King θ-stability of module points, decided by exhaustive submodule search
//! over prime fields.

use std::sync::Arc;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::dgla::{is_module, ModulePoint};
use crate::error::{Error, Result};
use crate::galgebra::{DimensionVector, GradedAlgebra};
use crate::linalg::{subspace_count, Field, Matrix, SubspacesContaining};

/// Integer weights `θ_p..θ_q` with `Σ θ_i α_i = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Character {
    low: i64,
    weights: Vec<i64>,
}

impl Character {
    pub fn new(dims: &DimensionVector, weights: Vec<i64>) -> Result<Character> {
        if weights.len() != dims.dims().len() {
            return Err(Error::DimensionMismatch(format!(
                "character has {} weights for a window of {} degrees",
                weights.len(),
                dims.dims().len()
            )));
        }
        let c = Character { low: dims.low(), weights };
        let pairing = theta_pairing(&c, dims.dims());
        if pairing != 0 {
            return Err(Error::UnbalancedCharacter(pairing));
        }
        Ok(c)
    }

    pub fn low(&self) -> i64 {
        self.low
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }
}

/// `θ(W) = Σ θ_i dim W_i`.
pub fn theta_pairing(theta: &Character, profile: &[usize]) -> i64 {
    assert_eq!(theta.weights.len(), profile.len(), "profile length differs from the character");
    theta.weights.iter().zip(profile).map(|(&t, &d)| t * d as i64).sum()
}

/// `θ_p = -α_q`, `θ_q = α_p`, zero in between. Both end pieces must be nonzero,
/// otherwise the character degenerates to zero.
pub fn extremal_character(dims: &DimensionVector) -> Result<Character> {
    if dims.length() == 0 {
        return Err(Error::WindowTooShort);
    }
    let n = dims.dims().len();
    if dims.dims()[0] == 0 || dims.dims()[n - 1] == 0 {
        return Err(Error::InvalidDimensionVector("the extremal character needs V_p and V_q nonzero".into()));
    }
    let mut w = vec![0; n];
    w[0] = -(dims.dims()[n - 1] as i64);
    w[n - 1] = dims.dims()[0] as i64;
    Character::new(dims, w)
}

/// `θ_i = Σ_{j<i} dim A_{i-j} α_j - Σ_{j>i} dim A_{j-i} α_j`.
pub fn determinant_character(algebra: &GradedAlgebra, dims: &DimensionVector) -> Result<Character> {
    if dims.length() == 0 {
        return Err(Error::WindowTooShort);
    }
    if algebra.bound() < dims.length() {
        return Err(Error::BoundTooSmall {
            needed: dims.length(),
            bound: algebra.bound(),
        });
    }
    let w = dims
        .degrees()
        .map(|i| {
            dims.degrees()
                .map(|j| {
                    let a = dims.at(j) as i64;
                    if j < i {
                        algebra.dim((i - j) as usize) as i64 * a
                    } else if j > i {
                        -(algebra.dim((j - i) as usize) as i64) * a
                    } else {
                        0
                    }
                })
                .sum()
        })
        .collect();
    Character::new(dims, w)
}

fn extended_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0, s0, t0)
}

/// Integers `n_i` with `Σ n_i α_i = 1`, by folding the extended gcd left to right.
pub fn coprime_character(dims: &DimensionVector) -> Result<Vec<i64>> {
    let alpha: Vec<i64> = dims.dims().iter().map(|&a| a as i64).collect();
    let g = alpha.iter().fold(0i64, |g, &a| g.gcd(&a));
    if g != 1 {
        return Err(Error::NotPrimitive(g as u64));
    }
    let mut coeffs = vec![1i64];
    let mut g = alpha[0];
    for &a in &alpha[1..] {
        if g == 1 {
            coeffs.push(0);
            continue;
        }
        let (h, s, t) = extended_gcd(g, a);
        for c in coeffs.iter_mut() {
            *c *= s;
        }
        coeffs.push(t);
        g = h;
    }
    Ok(coeffs)
}

/// A graded subspace `W ⊆ V` given by reduced echelon bases, one per degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SubmoduleWitness {
    low: i64,
    field: Field,
    bases: Vec<Matrix>,
}

impl SubmoduleWitness {
    /// `bases[k]` spans `W_{low+k}` inside `V_{low+k}` (its column count).
    pub fn new(low: i64, bases: Vec<Matrix>) -> Result<SubmoduleWitness> {
        let field = bases.first().map(Matrix::field).ok_or(Error::InvalidArgument("empty witness".into()))?;
        let bases: Vec<Matrix> = bases.iter().map(Matrix::row_space).collect();
        let w = SubmoduleWitness { low, field, bases };
        let (dim, total) = (w.profile().iter().sum::<usize>(), w.bases.iter().map(Matrix::cols).sum::<usize>());
        if dim == 0 || dim == total {
            return Err(Error::InvalidArgument("a witness must be proper and nonzero".into()));
        }
        Ok(w)
    }

    pub fn low(&self) -> i64 {
        self.low
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn bases(&self) -> &[Matrix] {
        &self.bases
    }

    pub fn basis(&self, degree: i64) -> &Matrix {
        &self.bases[(degree - self.low) as usize]
    }

    pub fn profile(&self) -> Vec<usize> {
        self.bases.iter().map(Matrix::rows).collect()
    }
}

/// Image rows `W_j · μ(a)^T` for every action reaching `target` from below.
fn forced_rows(mu: &ModulePoint, bases: &[Matrix], target: i64) -> Matrix {
    let dims = mu.dims();
    let f = mu.field();
    let mut rows = Matrix::zeros(f, 0, dims.at(target));
    for (k, w) in bases.iter().enumerate() {
        let j = dims.low() + k as i64;
        if j >= target || w.rows() == 0 {
            continue;
        }
        let d = (target - j) as usize;
        for e in 0..mu.algebra().dim(d) {
            let image = w * &mu.action(j, d, e).transpose();
            rows = rows.vstack(&image);
        }
    }
    rows
}

/// Whether `W` is closed under the action.
pub fn is_closed(mu: &ModulePoint, w: &SubmoduleWitness) -> bool {
    let dims = mu.dims();
    if w.low != dims.low() || w.bases.len() != dims.dims().len() {
        return false;
    }
    dims.degrees().all(|i| w.basis(i).row_space_contains(&forced_rows(mu, &w.bases, i)))
}

/// The smallest submodule containing the given per-degree seeds.
pub fn generated_submodule(mu: &ModulePoint, seeds: &[Matrix]) -> Vec<Matrix> {
    let dims = mu.dims();
    let mut bases: Vec<Matrix> = Vec::with_capacity(seeds.len());
    for (k, i) in dims.degrees().enumerate() {
        let span = seeds[k].vstack(&forced_rows(mu, &bases, i)).row_space();
        bases.push(span);
    }
    bases
}

/// Whether `V_p` generates `V` under the action.
pub fn lowest_degree_generates(mu: &ModulePoint) -> bool {
    let dims = mu.dims();
    let f = mu.field();
    let seeds: Vec<Matrix> = dims
        .dims()
        .iter()
        .enumerate()
        .map(|(k, &a)| if k == 0 { Matrix::identity(f, a) } else { Matrix::zeros(f, 0, a) })
        .collect();
    generated_submodule(mu, &seeds).iter().zip(dims.dims()).all(|(b, &a)| b.rows() == a)
}

/// Default cap on `Σ α_i` for exhaustive enumeration.
pub const DEFAULT_BUDGET: usize = 10;

fn check_budget(mu: &ModulePoint, budget: usize) -> Result<()> {
    let total = mu.dims().total();
    if total > budget {
        let p = mu.field().characteristic();
        let bound = mu
            .dims()
            .dims()
            .iter()
            .fold(1u128, |acc, &a| acc.saturating_mul(subspace_count(a, p)));
        return Err(Error::BudgetExceeded {
            what: format!("submodule enumeration (sum of dims {total})"),
            budget: budget as u128,
            count_bound: bound,
        });
    }
    Ok(())
}

/// Lazy depth-first enumeration of graded submodules in canonical order.
pub struct SubmoduleIter {
    mu: ModulePoint,
    levels: Vec<Box<dyn Iterator<Item = Matrix> + Send>>,
    chosen: Vec<Matrix>,
}

impl SubmoduleIter {
    fn new(mu: ModulePoint, first: Box<dyn Iterator<Item = Matrix> + Send>) -> SubmoduleIter {
        SubmoduleIter {
            mu,
            levels: vec![first],
            chosen: Vec::new(),
        }
    }
}

impl Iterator for SubmoduleIter {
    type Item = SubmoduleWitness;

    fn next(&mut self) -> Option<SubmoduleWitness> {
        let dims = self.mu.dims().clone();
        let depth = dims.dims().len();
        loop {
            let top = self.levels.len().checked_sub(1)?;
            let Some(choice) = self.levels[top].next() else {
                self.levels.pop();
                self.chosen.truncate(top);
                continue;
            };
            self.chosen.truncate(top);
            self.chosen.push(choice);
            if top + 1 == depth {
                let dim: usize = self.chosen.iter().map(Matrix::rows).sum();
                if dim > 0 && dim < dims.total() {
                    return Some(SubmoduleWitness {
                        low: dims.low(),
                        field: self.mu.field(),
                        bases: self.chosen.clone(),
                    });
                }
            } else {
                let next = dims.low() + top as i64 + 1;
                let forced = forced_rows(&self.mu, &self.chosen, next);
                self.levels.push(Box::new(SubspacesContaining::new(&forced)));
            }
        }
    }
}

fn require_finite(mu: &ModulePoint) -> Result<()> {
    if !mu.field().is_finite() {
        return Err(Error::FieldMismatch("submodule enumeration needs a prime field".into()));
    }
    if !is_module(mu) {
        return Err(Error::NotAModule("enumeration needs a Maurer-Cartan point".into()));
    }
    Ok(())
}

/// Every proper nonzero graded submodule, each exactly once.
pub fn enumerate_submodules(mu: &ModulePoint, budget: usize) -> Result<SubmoduleIter> {
    require_finite(mu)?;
    check_budget(mu, budget)?;
    let a = mu.dims().dims()[0];
    Ok(SubmoduleIter::new(mu.clone(), Box::new(SubspacesContaining::all(mu.field(), a))))
}

/// The branch of the enumeration with `W_p` fixed.
pub fn enumerate_submodules_from(mu: &ModulePoint, lowest: Matrix, budget: usize) -> Result<SubmoduleIter> {
    require_finite(mu)?;
    check_budget(mu, budget)?;
    if lowest.cols() != mu.dims().dims()[0] {
        return Err(Error::DimensionMismatch("lowest piece has the wrong ambient dimension".into()));
    }
    Ok(SubmoduleIter::new(mu.clone(), Box::new(std::iter::once(lowest.row_space()))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Status {
    Unstable,
    StrictlySemistable,
    Stable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CertificateLevel {
    ExactRational,
    FiniteFieldEvidence(Vec<u64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mode {
    ExactLift,
    FiniteField,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityOptions {
    pub fields: Vec<u64>,
    pub mode: Mode,
    pub budget: usize,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        StabilityOptions {
            fields: vec![2, 3],
            mode: Mode::ExactLift,
            budget: DEFAULT_BUDGET,
        }
    }
}

/// Outcome of the exhaustive scan over one prime field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FieldVerdict {
    pub prime: u64,
    pub status: Status,
    /// Least `θ(W)` over all proper nonzero submodules (`None` if there are none).
    pub min_theta: Option<i64>,
    pub witness: Option<SubmoduleWitness>,
    pub witness_theta: Option<i64>,
    pub submodules: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StabilityVerdict {
    pub status: Status,
    pub character: Vec<i64>,
    pub witness: Option<SubmoduleWitness>,
    pub witness_theta: Option<i64>,
    pub certificate_level: CertificateLevel,
    pub per_field: Vec<FieldVerdict>,
    pub notes: Vec<String>,
}

#[derive(Default)]
struct BranchResult {
    count: u64,
    min: Option<i64>,
    first_negative: Option<(SubmoduleWitness, i64)>,
    first_zero: Option<SubmoduleWitness>,
}

fn scan_branch(mu: &ModulePoint, theta: &Character, lowest: Matrix, budget: usize) -> Result<BranchResult> {
    let mut out = BranchResult::default();
    for w in enumerate_submodules_from(mu, lowest, budget)? {
        let t = theta_pairing(theta, &w.profile());
        out.count += 1;
        out.min = Some(out.min.map_or(t, |m| m.min(t)));
        if t < 0 && out.first_negative.is_none() {
            out.first_negative = Some((w, t));
        } else if t == 0 && out.first_zero.is_none() {
            out.first_zero = Some(w);
        }
    }
    Ok(out)
}

/// Exhaustive verdict over the prime field of `mu`.
pub fn check_stability_over_field(mu: &ModulePoint, theta: &Character, budget: usize) -> Result<FieldVerdict> {
    require_finite(mu)?;
    check_budget(mu, budget)?;
    let f = mu.field();
    let branches: Vec<Matrix> = SubspacesContaining::all(f, mu.dims().dims()[0]).collect();
    let results: Vec<BranchResult> = branches
        .into_par_iter()
        .map(|b| scan_branch(mu, theta, b, budget))
        .collect::<Result<_>>()?;
    let count = results.iter().map(|r| r.count).sum();
    let min = results.iter().filter_map(|r| r.min).min();
    let negative = results.iter().find_map(|r| r.first_negative.clone());
    let zero = results.iter().find_map(|r| r.first_zero.clone());
    let (status, witness, wt) = match (negative, zero) {
        (Some((w, t)), _) => (Status::Unstable, Some(w), Some(t)),
        (None, Some(w)) => (Status::StrictlySemistable, Some(w), Some(0)),
        (None, None) => (Status::Stable, None, None),
    };
    Ok(FieldVerdict {
        prime: f.characteristic(),
        status,
        min_theta: min,
        witness,
        witness_theta: wt,
        submodules: count,
    })
}

/// Exact closure check and `θ(W)`.
pub fn verify_witness_rational(mu: &ModulePoint, w: &SubmoduleWitness, theta: &Character) -> Result<(bool, i64)> {
    let dims = mu.dims();
    if w.low != dims.low() || w.bases.iter().map(Matrix::cols).ne(dims.dims().iter().copied()) {
        return Err(Error::DimensionMismatch("witness does not match the module's dimension vector".into()));
    }
    if w.field != mu.field() {
        return Err(Error::FieldMismatch("witness and module over different fields".into()));
    }
    Ok((is_closed(mu, w), theta_pairing(theta, &w.profile())))
}

/// Lifts residues to integers in `[0, p)` and re-checks over the rationals.
fn lift_witness(mu: &ModulePoint, w: &SubmoduleWitness, theta: &Character) -> Option<(SubmoduleWitness, i64)> {
    let q = Field::Rationals;
    let bases: Vec<Matrix> = w
        .bases
        .iter()
        .map(|b| b.map_entries(q, |s| q.from_rational(&s.lift_to_rational())).expect("integers lift"))
        .collect();
    let lifted = SubmoduleWitness {
        low: w.low,
        field: q,
        bases: bases.iter().map(Matrix::row_space).collect(),
    };
    if lifted.profile() != w.profile() {
        return None;
    }
    match verify_witness_rational(mu, &lifted, theta) {
        Ok((true, t)) if t < 0 => Some((lifted, t)),
        _ => None,
    }
}

/// King's criterion, decided by exhaustive search over each requested prime.
///
/// The combined status is the least status over the primes. In exact-lift mode
/// an unstable witness is lifted to the rationals and re-verified there.
pub fn check_stability(mu: &ModulePoint, theta: &Character, options: &StabilityOptions) -> Result<StabilityVerdict> {
    if !is_module(mu) {
        return Err(Error::NotMaurerCartan);
    }
    if theta.low != mu.dims().low() || theta.weights.len() != mu.dims().dims().len() {
        return Err(Error::DimensionMismatch("character does not match the dimension vector".into()));
    }
    let pairing = theta_pairing(theta, mu.dims().dims());
    if pairing != 0 {
        return Err(Error::UnbalancedCharacter(pairing));
    }
    if options.fields.is_empty() {
        return Err(Error::InvalidArgument("no prime fields requested".into()));
    }
    let base = mu.field();
    if options.mode == Mode::ExactLift && base.is_finite() {
        return Err(Error::InvalidArgument("exact-lift mode needs a module over the rationals".into()));
    }
    let mut per_field = Vec::new();
    for &p in &options.fields {
        let field = Field::prime(p)?;
        let reduced = if base == field {
            mu.clone()
        } else if base.is_finite() {
            return Err(Error::FieldMismatch(format!("module over {base} cannot be checked over {field}")));
        } else {
            let algebra: Arc<GradedAlgebra> = Arc::new(mu.algebra().reduce_mod(p)?);
            mu.reduce_with(&algebra)?
        };
        per_field.push(check_stability_over_field(&reduced, theta, options.budget)?);
    }
    let worst = per_field.iter().min_by_key(|v| v.status).expect("at least one field");
    let mut notes = Vec::new();
    if per_field.iter().any(|v| v.status != worst.status) {
        let parts: Vec<String> = per_field.iter().map(|v| format!("F_{}: {:?}", v.prime, v.status)).collect();
        notes.push(format!("verdicts differ across primes ({}); reporting the least", parts.join(", ")));
    }
    let primes: Vec<u64> = per_field.iter().map(|v| v.prime).collect();
    let mut verdict = StabilityVerdict {
        status: worst.status,
        character: theta.weights.clone(),
        witness: worst.witness.clone(),
        witness_theta: worst.witness_theta,
        certificate_level: CertificateLevel::FiniteFieldEvidence(primes),
        per_field: per_field.clone(),
        notes,
    };
    if options.mode == Mode::ExactLift && verdict.status == Status::Unstable {
        let w = verdict.witness.clone().expect("unstable verdicts carry a witness");
        match lift_witness(mu, &w, theta) {
            Some((lifted, t)) => {
                verdict.witness = Some(lifted);
                verdict.witness_theta = Some(t);
                verdict.certificate_level = CertificateLevel::ExactRational;
            }
            None => verdict.notes.push(format!(
                "witness over F_{} did not lift to a rational submodule",
                w.field.characteristic()
            )),
        }
    }
    Ok(verdict)
}
