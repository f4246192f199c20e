//! Presented graded algebras `A = k ⊕ A_1 ⊕ ... ⊕ A_D` stored as explicit
//! per-degree multiplication tables.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix, Scalar};

/// A polynomial generator with its (positive) degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Variable {
    pub name: String,
    pub degree: usize,
}

impl Variable {
    pub fn new(name: impl Into<String>, degree: usize) -> Variable {
        Variable { name: name.into(), degree }
    }
}

/// A homogeneous element: coordinates in the basis of `A_degree`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Homogeneous {
    pub degree: usize,
    pub coords: Vec<Scalar>,
}

impl Homogeneous {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Scalar::is_zero)
    }
}

/// Exponent vectors of the monomials in each degree (free polynomial algebras only).
#[derive(Clone, Debug, PartialEq, Eq)]
struct MonomialData {
    variables: Vec<Variable>,
    exponents: Vec<Vec<Vec<u32>>>,
    index: Vec<HashMap<Vec<u32>, usize>>,
}

/// A unital graded algebra truncated at degree `bound`, with `A_0` spanned by the unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedAlgebra {
    field: Field,
    bound: usize,
    labels: Vec<Vec<String>>,
    // table[d * (bound + 1) + e][i * dim(e) + j] = coordinates of b_{d,i} * b_{e,j} in A_{d+e}
    table: Vec<Vec<Vec<Scalar>>>,
    monomials: Option<MonomialData>,
}

fn default_names(n: usize) -> Vec<String> {
    const SHORT: [&str; 4] = ["x", "y", "z", "w"];
    if n <= SHORT.len() {
        SHORT[..n].iter().map(|s| s.to_string()).collect()
    } else {
        (0..n).map(|i| format!("x{i}")).collect()
    }
}

fn monomial_label(vars: &[Variable], exps: &[u32]) -> String {
    let parts: Vec<String> = vars
        .iter()
        .zip(exps)
        .filter(|(_, &e)| e > 0)
        .map(|(v, &e)| if e == 1 { v.name.clone() } else { format!("{}^{}", v.name, e) })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

/// Exponent vectors of weighted degree `d`, in descending lexicographic order.
fn exponents_of_degree(degrees: &[usize], d: usize) -> Vec<Vec<u32>> {
    fn rec(degrees: &[usize], rest: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let k = prefix.len();
        if k == degrees.len() {
            if rest == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for e in (0..=rest / degrees[k]).rev() {
            prefix.push(e as u32);
            rec(degrees, rest - e * degrees[k], prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(degrees, d, &mut Vec::new(), &mut out);
    out
}

impl GradedAlgebra {
    /// Build from explicit tables and validate shape, unit compatibility and associativity.
    ///
    /// `products` maps `(d, e)` with `d, e >= 1`, `d + e <= bound` to a table indexed by
    /// `i * dim(e) + j`, each entry a coordinate vector in `A_{d+e}`. Missing pairs are zero.
    pub fn from_tables(
        field: Field,
        bound: usize,
        labels: Vec<Vec<String>>,
        products: HashMap<(usize, usize), Vec<Vec<Scalar>>>,
    ) -> Result<GradedAlgebra> {
        if bound == 0 {
            return Err(Error::InvalidArgument("degree bound must be positive".into()));
        }
        if labels.len() != bound {
            return Err(Error::DimensionMismatch(format!(
                "expected basis labels for degrees 1..={bound}, got {} lists",
                labels.len()
            )));
        }
        let mut all_labels = vec![vec!["1".to_string()]];
        all_labels.extend(labels);
        let mut alg = GradedAlgebra {
            field,
            bound,
            labels: all_labels,
            table: Vec::new(),
            monomials: None,
        };
        alg.table = vec![Vec::new(); (bound + 1) * (bound + 1)];
        for d in 0..=bound {
            for e in 0..=bound - d {
                let (nd, ne, nt) = (alg.dim(d), alg.dim(e), alg.dim(d + e));
                let entries = if d == 0 || e == 0 {
                    (0..nd * ne)
                        .map(|idx| {
                            let k = if d == 0 { idx % ne } else { idx / ne };
                            unit_vector(field, nt, k)
                        })
                        .collect()
                } else if let Some(t) = products.get(&(d, e)) {
                    if t.len() != nd * ne || t.iter().any(|v| v.len() != nt) {
                        return Err(Error::DimensionMismatch(format!("product table ({d},{e}) has the wrong shape")));
                    }
                    if t.iter().flatten().any(|s| s.field() != field) {
                        return Err(Error::FieldMismatch(format!("product table ({d},{e})")));
                    }
                    t.clone()
                } else {
                    vec![vec![field.zero(); nt]; nd * ne]
                };
                alg.table[d * (bound + 1) + e] = entries;
            }
        }
        alg.check_associativity()?;
        Ok(alg)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// The same structure constants read in `F_p`.
    pub fn reduce_mod(&self, p: u64) -> Result<GradedAlgebra> {
        let field = Field::prime(p)?;
        if self.field == field {
            return Ok(self.clone());
        }
        let table = self
            .table
            .iter()
            .map(|t| {
                t.iter()
                    .map(|v| v.iter().map(|s| s.reduce_mod(p)).collect::<Option<Vec<_>>>())
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::NotReducible(p))?;
        Ok(GradedAlgebra {
            field,
            table,
            ..self.clone()
        })
    }

    /// The degree bound `D`.
    pub fn bound(&self) -> usize {
        self.bound
    }

    /// `dim A_d`; panics if `d > bound`.
    pub fn dim(&self, d: usize) -> usize {
        self.labels[d].len()
    }

    /// `dim A_d`, checked against the bound.
    pub fn piece_dim(&self, d: i64) -> Result<usize> {
        if d < 0 || d as usize > self.bound {
            return Err(Error::DegreeOutOfBound { degree: d, bound: self.bound });
        }
        Ok(self.dim(d as usize))
    }

    pub fn labels(&self, d: usize) -> &[String] {
        &self.labels[d]
    }

    /// Index of the basis element with the given label in degree `d`.
    pub fn label_index(&self, d: usize, label: &str) -> Option<usize> {
        self.labels.get(d)?.iter().position(|l| l == label)
    }

    /// Find a basis label in any degree.
    pub fn find_label(&self, label: &str) -> Option<(usize, usize)> {
        (1..=self.bound).find_map(|d| self.label_index(d, label).map(|i| (d, i)))
    }

    /// Dimensions of `A_0..A_D`.
    pub fn hilbert_function(&self) -> Vec<usize> {
        (0..=self.bound).map(|d| self.dim(d)).collect()
    }

    pub fn variables(&self) -> Option<&[Variable]> {
        self.monomials.as_ref().map(|m| m.variables.as_slice())
    }

    /// Coordinates of `b_{d,i} * b_{e,j}` in `A_{d+e}`; requires `d + e <= bound`.
    pub fn basis_product(&self, d: usize, i: usize, e: usize, j: usize) -> &[Scalar] {
        &self.table[d * (self.bound + 1) + e][i * self.dim(e) + j]
    }

    pub fn multiply(&self, a: &Homogeneous, b: &Homogeneous) -> Result<Homogeneous> {
        let deg = a.degree + b.degree;
        if deg > self.bound {
            return Err(Error::DegreeOutOfBound { degree: deg as i64, bound: self.bound });
        }
        let mut out = vec![self.field.zero(); self.dim(deg)];
        for (i, x) in a.coords.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in b.coords.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                let xy = x * y;
                for (o, c) in out.iter_mut().zip(self.basis_product(a.degree, i, b.degree, j)) {
                    if !c.is_zero() {
                        *o += &(&xy * c);
                    }
                }
            }
        }
        Ok(Homogeneous { degree: deg, coords: out })
    }

    pub fn basis_element(&self, d: usize, i: usize) -> Homogeneous {
        Homogeneous {
            degree: d,
            coords: unit_vector(self.field, self.dim(d), i),
        }
    }

    /// Exact check of `(ab)c = a(bc)` on all basis triples within the bound.
    pub fn check_associativity(&self) -> Result<()> {
        for d in 1..=self.bound {
            for e in 1..=self.bound - d {
                for f in 1..=self.bound - d - e {
                    for i in 0..self.dim(d) {
                        for j in 0..self.dim(e) {
                            for k in 0..self.dim(f) {
                                let (a, b, c) = (self.basis_element(d, i), self.basis_element(e, j), self.basis_element(f, k));
                                let left = self.multiply(&self.multiply(&a, &b)?, &c)?;
                                let right = self.multiply(&a, &self.multiply(&b, &c)?)?;
                                if left != right {
                                    return Err(Error::NotAssociative(format!(
                                        "({} {} {}) in degrees ({d},{e},{f})",
                                        self.labels[d][i], self.labels[e][j], self.labels[f][k]
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether `ab = ba` on all basis pairs within the bound.
    pub fn is_commutative(&self) -> bool {
        (1..=self.bound).all(|d| {
            (1..=self.bound - d).all(|e| {
                (0..self.dim(d)).all(|i| (0..self.dim(e)).all(|j| self.basis_product(d, i, e, j) == self.basis_product(e, j, d, i)))
            })
        })
    }

    /// Parse a homogeneous polynomial in the named variables (free polynomial algebras only).
    pub fn parse_element(&self, text: &str) -> Result<Homogeneous> {
        let mono = self
            .monomials
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("element parsing needs a free polynomial algebra".into()))?;
        let terms = parse_polynomial(text, &mono.variables)?;
        let mut degree = None;
        for (exps, _) in terms.iter().filter(|(_, c)| *c != 0) {
            let d: usize = exps.iter().zip(&mono.variables).map(|(&e, v)| e as usize * v.degree).sum();
            match degree {
                None => degree = Some(d),
                Some(d0) if d0 != d => return Err(Error::Inhomogeneous(text.to_string())),
                _ => {}
            }
        }
        let Some(degree) = degree else {
            return Err(Error::Inhomogeneous(format!("{text:?} is zero and has no degree")));
        };
        if degree > self.bound {
            return Err(Error::DegreeOutOfBound { degree: degree as i64, bound: self.bound });
        }
        let mut coords = vec![self.field.zero(); self.dim(degree)];
        for (exps, c) in terms {
            let idx = mono.index[degree][&exps];
            coords[idx] += &self.field.from_i64(c);
        }
        Ok(Homogeneous { degree, coords })
    }
}

fn unit_vector(field: Field, n: usize, k: usize) -> Vec<Scalar> {
    let mut v = vec![field.zero(); n];
    v[k] = field.one();
    v
}

impl fmt::Display for GradedAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "graded algebra over {} up to degree {} with dims {:?}", self.field, self.bound, self.hilbert_function())
    }
}

/// Dimensions `α_p..α_q` of a graded vector space concentrated in the window `[p, q]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DimensionVector {
    low: i64,
    dims: Vec<usize>,
}

impl DimensionVector {
    /// `dims[k]` is the dimension in degree `low + k`; at least one entry must be positive.
    pub fn new(low: i64, dims: Vec<usize>) -> Result<DimensionVector> {
        if dims.is_empty() {
            return Err(Error::InvalidDimensionVector("empty window".into()));
        }
        if dims.iter().all(|&d| d == 0) {
            return Err(Error::InvalidDimensionVector("all dimensions are zero".into()));
        }
        Ok(DimensionVector { low, dims })
    }

    /// The lowest degree `p`.
    pub fn low(&self) -> i64 {
        self.low
    }

    /// The highest degree `q`.
    pub fn high(&self) -> i64 {
        self.low + self.dims.len() as i64 - 1
    }

    /// `q - p`.
    pub fn length(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// `α_i`, zero outside the window.
    pub fn at(&self, degree: i64) -> usize {
        if degree < self.low || degree > self.high() {
            0
        } else {
            self.dims[(degree - self.low) as usize]
        }
    }

    pub fn total(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> {
        self.low..=self.high()
    }
}

impl fmt::Display for DimensionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} on [{}, {}]", self.dims, self.low, self.high())
    }
}

/// Free commutative polynomial algebra on variables of the given degrees, truncated at `bound`.
///
/// Variables are named `x, y, z, w` (or `x0, x1, ...` beyond four).
pub fn polynomial_algebra(var_degrees: &[usize], bound: usize, field: Field) -> Result<GradedAlgebra> {
    let vars: Vec<Variable> = default_names(var_degrees.len())
        .into_iter()
        .zip(var_degrees)
        .map(|(n, &d)| Variable::new(n, d))
        .collect();
    polynomial_algebra_named(&vars, bound, field)
}

/// Free commutative polynomial algebra on named variables; bases are degree-lexicographic.
pub fn polynomial_algebra_named(vars: &[Variable], bound: usize, field: Field) -> Result<GradedAlgebra> {
    if vars.is_empty() {
        return Err(Error::TrivialAlgebra);
    }
    if let Some(v) = vars.iter().find(|v| v.degree == 0) {
        return Err(Error::InvalidArgument(format!("variable {} has degree 0", v.name)));
    }
    let max_deg = vars.iter().map(|v| v.degree).max().unwrap_or(0);
    if bound < max_deg {
        return Err(Error::BoundTooSmall { needed: max_deg, bound });
    }
    let degrees: Vec<usize> = vars.iter().map(|v| v.degree).collect();
    let exponents: Vec<Vec<Vec<u32>>> = (0..=bound).map(|d| exponents_of_degree(&degrees, d)).collect();
    let index: Vec<HashMap<Vec<u32>, usize>> = exponents
        .iter()
        .map(|es| es.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect())
        .collect();
    let labels: Vec<Vec<String>> = exponents[1..]
        .iter()
        .map(|es| es.iter().map(|e| monomial_label(vars, e)).collect())
        .collect();
    let mut products = HashMap::new();
    for d in 1..=bound {
        for e in 1..=bound - d {
            let nt = exponents[d + e].len();
            let mut t = Vec::with_capacity(exponents[d].len() * exponents[e].len());
            for a in &exponents[d] {
                for b in &exponents[e] {
                    let sum: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                    t.push(unit_vector(field, nt, index[d + e][&sum]));
                }
            }
            products.insert((d, e), t);
        }
    }
    let mut alg = GradedAlgebra::from_tables(field, bound, labels, products)?;
    alg.monomials = Some(MonomialData {
        variables: vars.to_vec(),
        exponents,
        index,
    });
    Ok(alg)
}

/// Pieces `I_1..I_D` of the two-sided ideal generated by `relations`, as reduced echelon
/// bases (rows) with their pivot columns.
pub fn ideal_pieces(a: &GradedAlgebra, relations: &[Homogeneous]) -> Result<Vec<(Matrix, Vec<usize>)>> {
    let f = a.field();
    for r in relations {
        if r.degree == 0 || r.degree > a.bound() {
            return Err(Error::Inhomogeneous(format!("relation of degree {} outside 1..={}", r.degree, a.bound())));
        }
        if r.coords.len() != a.dim(r.degree) {
            return Err(Error::DimensionMismatch(format!("relation of degree {} has {} coordinates", r.degree, r.coords.len())));
        }
    }
    let mut pieces: Vec<(Matrix, Vec<usize>)> = vec![(Matrix::zeros(f, 0, 1), Vec::new())];
    for d in 1..=a.bound() {
        let mut rows: Vec<Vec<Scalar>> = relations.iter().filter(|r| r.degree == d).map(|r| r.coords.clone()).collect();
        for k in 1..d {
            let (lower, _) = &pieces[d - k];
            for row in lower.row_vecs() {
                let x = Homogeneous { degree: d - k, coords: row };
                for i in 0..a.dim(k) {
                    let b = a.basis_element(k, i);
                    rows.push(a.multiply(&b, &x)?.coords);
                    rows.push(a.multiply(&x, &b)?.coords);
                }
            }
        }
        let m = Matrix::from_rows(f, a.dim(d), rows)?;
        let (r, piv) = m.rref();
        let basis = Matrix::from_rows(f, a.dim(d), r.row_vecs().into_iter().take(piv.len()).collect())?;
        pieces.push((basis, piv));
    }
    Ok(pieces)
}

fn reduce_modulo(v: &[Scalar], basis: &Matrix, pivots: &[usize]) -> Vec<Scalar> {
    let mut v = v.to_vec();
    for (r, &pc) in pivots.iter().enumerate() {
        if v[pc].is_zero() {
            continue;
        }
        let factor = v[pc].clone();
        for (x, b) in v.iter_mut().zip(basis.row(r)) {
            if !b.is_zero() {
                *x -= &(&factor * b);
            }
        }
    }
    v
}

/// Quotient of `a` by the two-sided ideal generated by homogeneous `relations`.
///
/// The quotient basis in each degree consists of the ambient basis elements at the
/// non-pivot columns of the ideal piece's reduced echelon basis.
pub fn quotient_algebra(a: &GradedAlgebra, relations: &[Homogeneous]) -> Result<GradedAlgebra> {
    let pieces = ideal_pieces(a, relations)?;
    let kept: Vec<Vec<usize>> = (0..=a.bound())
        .map(|d| (0..a.dim(d)).filter(|c| d == 0 || !pieces[d].1.contains(c)).collect())
        .collect();
    let labels: Vec<Vec<String>> = (1..=a.bound())
        .map(|d| kept[d].iter().map(|&c| a.labels(d)[c].clone()).collect())
        .collect();
    let mut products = HashMap::new();
    for d in 1..=a.bound() {
        for e in 1..=a.bound() - d {
            let (basis, piv) = &pieces[d + e];
            let mut t = Vec::new();
            for &i in &kept[d] {
                for &j in &kept[e] {
                    let prod = reduce_modulo(a.basis_product(d, i, e, j), basis, piv);
                    t.push(kept[d + e].iter().map(|&c| prod[c].clone()).collect());
                }
            }
            products.insert((d, e), t);
        }
    }
    GradedAlgebra::from_tables(a.field(), a.bound(), labels, products)
}

/// Parse `"2*x^2*y - y^3 + 4"` into (exponent vector, integer coefficient) terms.
fn parse_polynomial(text: &str, vars: &[Variable]) -> Result<Vec<(Vec<u32>, i64)>> {
    let err = |m: &str| Error::Parse(format!("polynomial {text:?}: {m}"));
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Err(err("empty"));
    }
    let mut pos = 0;
    let mut terms: Vec<(Vec<u32>, i64)> = Vec::new();
    let read_int = |pos: &mut usize| -> Option<i64> {
        let start = *pos;
        while *pos < chars.len() && chars[*pos].is_ascii_digit() {
            *pos += 1;
        }
        chars[start..*pos].iter().collect::<String>().parse().ok()
    };
    loop {
        let mut sign = 1i64;
        if pos < chars.len() && (chars[pos] == '+' || chars[pos] == '-') {
            if chars[pos] == '-' {
                sign = -1;
            }
            pos += 1;
        } else if pos > 0 {
            return Err(err("expected '+' or '-'"));
        }
        let mut coeff = sign;
        let mut exps = vec![0u32; vars.len()];
        loop {
            if pos >= chars.len() {
                return Err(err("dangling operator"));
            }
            if chars[pos].is_ascii_digit() {
                let n = read_int(&mut pos).ok_or_else(|| err("bad integer"))?;
                coeff = coeff.checked_mul(n).ok_or_else(|| err("coefficient overflow"))?;
            } else if chars[pos].is_alphabetic() || chars[pos] == '_' {
                let start = pos;
                while pos < chars.len() && (chars[pos].is_alphanumeric() || chars[pos] == '_') {
                    pos += 1;
                }
                let name: String = chars[start..pos].iter().collect();
                let k = vars
                    .iter()
                    .position(|v| v.name == name)
                    .ok_or_else(|| err(&format!("unknown variable {name}")))?;
                let mut e = 1u32;
                if pos < chars.len() && chars[pos] == '^' {
                    pos += 1;
                    e = read_int(&mut pos).ok_or_else(|| err("bad exponent"))? as u32;
                }
                exps[k] += e;
            } else {
                return Err(err(&format!("unexpected character {:?}", chars[pos])));
            }
            if pos < chars.len() && chars[pos] == '*' {
                pos += 1;
                continue;
            }
            break;
        }
        match terms.iter_mut().find(|(e, _)| *e == exps) {
            Some((_, c)) => *c += coeff,
            None => terms.push((exps, coeff)),
        }
        if pos >= chars.len() {
            break;
        }
    }
    Ok(terms)
}
