//! The differential graded Lie algebra `L^n = Hom_gr(m^{⊗n}, End V)` of a graded
//! vector space `V` over the augmentation ideal `m` of a graded algebra.
//!
//! A cochain of degree `n` is stored densely. Its coordinates are grouped into
//! blocks indexed by a source degree `j` and a composition `(d_1, .., d_n)` of
//! positive degrees with `j + Σ d_k <= q`. Each block holds, for every tuple of
//! basis elements `(b_1, .., b_n)` with `b_k ∈ A_{d_k}`, an `α_i × α_j` matrix
//! (`i = j + Σ d_k`). Within a block the coordinate of `(tuple, row, col)` is
//! `offset + (tuple * α_i + row) * α_j + col`, tuples in row-major order.
//!
//! Sign conventions:
//! * `dμ(a_1..a_{n+1}) = Σ_{i=1}^{n} (-1)^{n-i} μ(.., a_i a_{i+1}, ..)`
//! * `(μ∘μ')(a_1..a_{m+n}) = (-1)^{mn} μ(a_1..a_m) ∘ μ'(a_{m+1}..a_{m+n})`
//! * `[μ, μ'] = μ∘μ' - (-1)^{mn} μ'∘μ`
//!
//! With these, `dμ + μ∘μ = 0` for `μ ∈ L^1` says exactly `μ(ab) = μ(a)μ(b)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::galgebra::{DimensionVector, GradedAlgebra};
use crate::linalg::{Field, Matrix, Scalar};

/// All compositions of `total` into `parts` positive integers, in lexicographic order.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if rest == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        if rest < parts {
            return;
        }
        for first in 1..=rest - (parts - 1) {
            prefix.push(first);
            rec(rest - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, &mut Vec::new(), &mut out);
    out
}

/// One homogeneous component `L^n_{ij}` restricted to a composition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub source: i64,
    pub target: i64,
    pub composition: Vec<usize>,
    /// `dim A_{d_k}` for each part.
    pub shape: Vec<usize>,
    pub tuples: usize,
    pub rows: usize,
    pub cols: usize,
    pub offset: usize,
}

impl Block {
    pub fn size(&self) -> usize {
        self.tuples * self.rows * self.cols
    }

    pub fn tuple_index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.shape).fold(0, |acc, (&d, &s)| acc * s + d)
    }

    pub fn digits(&self, mut t: usize) -> Vec<usize> {
        let mut out = vec![0; self.shape.len()];
        for k in (0..self.shape.len()).rev() {
            out[k] = t % self.shape[k];
            t /= self.shape[k];
        }
        out
    }

    pub fn coord(&self, tuple: usize, r: usize, c: usize) -> usize {
        self.offset + (tuple * self.rows + r) * self.cols + c
    }
}

/// The space `L^n` with its canonical block layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainSpace {
    degree: usize,
    blocks: Vec<Block>,
    lookup: HashMap<(i64, Vec<usize>), usize>,
    dim: usize,
}

impl CochainSpace {
    fn build(algebra: &GradedAlgebra, dims: &DimensionVector, n: usize) -> CochainSpace {
        let mut blocks = Vec::new();
        let mut lookup = HashMap::new();
        let mut offset = 0;
        let (p, q) = (dims.low(), dims.high());
        for j in p..=q {
            let max_total = (q - j) as usize;
            let totals: Vec<usize> = if n == 0 { vec![0] } else { (n..=max_total).collect() };
            for e in totals {
                for comp in compositions(e, n) {
                    let shape: Vec<usize> = comp.iter().map(|&d| algebra.dim(d)).collect();
                    let tuples = shape.iter().product();
                    let target = j + e as i64;
                    let block = Block {
                        source: j,
                        target,
                        rows: dims.at(target),
                        cols: dims.at(j),
                        composition: comp.clone(),
                        shape,
                        tuples,
                        offset,
                    };
                    offset += block.size();
                    lookup.insert((j, comp), blocks.len());
                    blocks.push(block);
                }
            }
        }
        CochainSpace { degree: n, blocks, lookup, dim: offset }
    }

    fn empty(degree: usize) -> CochainSpace {
        CochainSpace {
            degree,
            blocks: Vec::new(),
            lookup: HashMap::new(),
            dim: 0,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block_index(&self, source: i64, composition: &[usize]) -> Option<usize> {
        self.lookup.get(&(source, composition.to_vec())).copied()
    }

    /// (block, tuple, row, col) of a flat coordinate.
    pub fn locate(&self, coord: usize) -> (usize, usize, usize, usize) {
        let b = self.blocks.partition_point(|blk| blk.offset + blk.size() <= coord);
        let blk = &self.blocks[b];
        let rel = coord - blk.offset;
        let c = rel % blk.cols;
        let r = (rel / blk.cols) % blk.rows;
        let t = rel / (blk.cols * blk.rows);
        (b, t, r, c)
    }
}

/// The dgLa `L = ⊕ L^n` attached to an algebra and a dimension vector.
#[derive(Debug, PartialEq, Eq)]
pub struct Dgla {
    algebra: Arc<GradedAlgebra>,
    dims: DimensionVector,
    spaces: Vec<CochainSpace>,
    empty: CochainSpace,
}

impl Dgla {
    /// Requires `algebra.bound() >= q - p`.
    pub fn new(algebra: Arc<GradedAlgebra>, dims: DimensionVector) -> Result<Arc<Dgla>> {
        let len = dims.length();
        if algebra.bound() < len {
            return Err(Error::BoundTooSmall { needed: len, bound: algebra.bound() });
        }
        let spaces = (0..=len).map(|n| CochainSpace::build(&algebra, &dims, n)).collect();
        Ok(Arc::new(Dgla {
            algebra,
            dims,
            spaces,
            empty: CochainSpace::empty(len + 1),
        }))
    }

    pub fn algebra(&self) -> &Arc<GradedAlgebra> {
        &self.algebra
    }

    pub fn dims(&self) -> &DimensionVector {
        &self.dims
    }

    pub fn field(&self) -> Field {
        self.algebra.field()
    }

    /// `q - p`; `L^n = 0` for `n` beyond it.
    pub fn top_degree(&self) -> usize {
        self.dims.length()
    }

    /// `L^n`; the zero space for `n > q - p`.
    pub fn space(&self, n: usize) -> &CochainSpace {
        self.spaces.get(n).unwrap_or(&self.empty)
    }

    /// The positive truncation `L^{>0}`: the spaces `L^1..L^{q-p}`.
    pub fn positive_part(&self) -> &[CochainSpace] {
        &self.spaces[1..]
    }

    /// `dim L^n` for `n = 0..=q-p`.
    pub fn dimensions(&self) -> Vec<usize> {
        self.spaces.iter().map(CochainSpace::dim).collect()
    }

    /// Readable name of a coordinate of `L^n`, e.g. `L1[0>1:x](0,0)`.
    pub fn coordinate_name(&self, n: usize, coord: usize) -> String {
        let space = self.space(n);
        let (b, t, r, c) = space.locate(coord);
        let blk = &space.blocks[b];
        let labels: Vec<&str> = blk
            .digits(t)
            .iter()
            .zip(&blk.composition)
            .map(|(&i, &d)| self.algebra.labels(d)[i].as_str())
            .collect();
        format!("L{n}[{}>{}:{}]({r},{c})", blk.source, blk.target, labels.join(","))
    }

    fn same(a: &Arc<Dgla>, b: &Arc<Dgla>) -> bool {
        Arc::ptr_eq(a, b) || a == b
    }
}

/// `dim L^n` for the given algebra and dimension vector.
pub fn l_dimension(algebra: &GradedAlgebra, dims: &DimensionVector, n: usize) -> Result<usize> {
    let len = dims.length();
    if algebra.bound() < len {
        return Err(Error::BoundTooSmall { needed: len, bound: algebra.bound() });
    }
    if n > len {
        return Ok(0);
    }
    // Σ_{i-j>=n} dim(m^{⊗n})_{i-j} α_i α_j
    let tensor_dim = |e: usize| -> usize {
        compositions(e, n)
            .iter()
            .map(|c| c.iter().map(|&d| algebra.dim(d)).product::<usize>())
            .sum()
    };
    let mut total = 0;
    for j in dims.degrees() {
        for i in j..=dims.high() {
            let e = (i - j) as usize;
            if e >= n {
                total += tensor_dim(e) * dims.at(i) * dims.at(j);
            }
        }
    }
    Ok(total)
}

/// An element of `L^n`.
#[derive(Clone)]
pub struct Cochain {
    dgla: Arc<Dgla>,
    degree: usize,
    coords: Vec<Scalar>,
}

impl PartialEq for Cochain {
    fn eq(&self, other: &Cochain) -> bool {
        self.degree == other.degree && self.coords == other.coords && Dgla::same(&self.dgla, &other.dgla)
    }
}

impl Eq for Cochain {}

impl fmt::Debug for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Cochain")
            .field("degree", &self.degree)
            .field("dims", &self.dgla.dims)
            .field("coords", &self.coords.iter().map(|s| s.to_string()).collect::<Vec<_>>())
            .finish()
    }
}

impl Cochain {
    pub fn zero(dgla: &Arc<Dgla>, degree: usize) -> Cochain {
        let n = dgla.space(degree).dim();
        Cochain {
            dgla: dgla.clone(),
            degree,
            coords: vec![dgla.field().zero(); n],
        }
    }

    pub fn from_coords(dgla: &Arc<Dgla>, degree: usize, coords: Vec<Scalar>) -> Result<Cochain> {
        let n = dgla.space(degree).dim();
        if coords.len() != n {
            return Err(Error::DimensionMismatch(format!("L^{degree} has dimension {n}, got {} coordinates", coords.len())));
        }
        if coords.iter().any(|s| s.field() != dgla.field()) {
            return Err(Error::FieldMismatch(format!("cochain coordinates over a field other than {}", dgla.field())));
        }
        Ok(Cochain { dgla: dgla.clone(), degree, coords })
    }

    /// The `k`-th coordinate basis vector of `L^degree`.
    pub fn basis_vector(dgla: &Arc<Dgla>, degree: usize, k: usize) -> Cochain {
        let mut c = Cochain::zero(dgla, degree);
        c.coords[k] = dgla.field().one();
        c
    }

    pub fn random<R: Rng + ?Sized>(dgla: &Arc<Dgla>, degree: usize, rng: &mut R) -> Cochain {
        let f = dgla.field();
        let n = dgla.space(degree).dim();
        Cochain {
            dgla: dgla.clone(),
            degree,
            coords: (0..n).map(|_| f.random(rng)).collect(),
        }
    }

    pub fn dgla(&self) -> &Arc<Dgla> {
        &self.dgla
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn space(&self) -> &CochainSpace {
        self.dgla.space(self.degree)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Scalar::is_zero)
    }

    pub fn block_matrix(&self, block: usize, tuple: usize) -> Matrix {
        let blk = &self.space().blocks[block];
        let start = blk.coord(tuple, 0, 0);
        let data = self.coords[start..start + blk.rows * blk.cols].to_vec();
        Matrix::from_vec(self.dgla.field(), blk.rows, blk.cols, data).expect("block shape")
    }

    pub fn set_block_matrix(&mut self, block: usize, tuple: usize, m: &Matrix) -> Result<()> {
        let blk = &self.dgla.space(self.degree).blocks[block];
        if (m.rows(), m.cols()) != (blk.rows, blk.cols) {
            return Err(Error::DimensionMismatch(format!(
                "block expects {}x{}, got {}x{}",
                blk.rows,
                blk.cols,
                m.rows(),
                m.cols()
            )));
        }
        if m.field() != self.dgla.field() {
            return Err(Error::FieldMismatch("block matrix".into()));
        }
        let start = blk.coord(tuple, 0, 0);
        self.coords[start..start + blk.rows * blk.cols].clone_from_slice(m.entries());
        Ok(())
    }

    /// The component evaluated on a basis tuple: `Hom(V_source, V_target)`.
    pub fn evaluate(&self, source: i64, composition: &[usize], digits: &[usize]) -> Option<Matrix> {
        let b = self.space().block_index(source, composition)?;
        let blk = &self.space().blocks[b];
        Some(self.block_matrix(b, blk.tuple_index(digits)))
    }

    fn check_same(&self, other: &Cochain) -> Result<()> {
        if Dgla::same(&self.dgla, &other.dgla) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch("cochains live in different dgLas".into()))
        }
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain> {
        self.check_same(other)?;
        if self.degree != other.degree {
            return Err(Error::WrongDegree { expected: self.degree, got: other.degree });
        }
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        Ok(Cochain { coords, ..self.clone() })
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain> {
        self.add(&other.scale(&self.dgla.field().from_i64(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> Cochain {
        let coords = self.coords.iter().map(|a| a * s).collect();
        Cochain { coords, ..self.clone() }
    }
}

/// The Hochschild differential `d: L^n -> L^{n+1}`.
pub fn differential(c: &Cochain) -> Cochain {
    let dgla = &c.dgla;
    let alg = dgla.algebra.as_ref();
    let f = dgla.field();
    let n = c.degree;
    let mut out = Cochain::zero(dgla, n + 1);
    if n == 0 {
        return out;
    }
    let src_space = dgla.space(n);
    let tgt_space = dgla.space(n + 1);
    for blk in tgt_space.blocks() {
        if blk.rows == 0 || blk.cols == 0 {
            continue;
        }
        for t in 0..blk.tuples {
            let digits = blk.digits(t);
            for i in 0..n {
                // merge positions i, i+1 (0-based); sign (-1)^{n-(i+1)}
                let sign = if (n - i - 1) % 2 == 0 { f.one() } else { -f.one() };
                let (da, db) = (blk.composition[i], blk.composition[i + 1]);
                let prod = alg.basis_product(da, digits[i], db, digits[i + 1]);
                let mut comp = blk.composition.clone();
                comp.splice(i..i + 2, [da + db]);
                let sb = &src_space.blocks()[src_space.block_index(blk.source, &comp).expect("merged block exists")];
                for (k, coef) in prod.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                    let mut full = digits[..i].to_vec();
                    full.push(k);
                    full.extend_from_slice(&digits[i + 2..]);
                    let st = sb.tuple_index(&full);
                    let w = &sign * coef;
                    for r in 0..blk.rows {
                        for col in 0..blk.cols {
                            let v = &c.coords[sb.coord(st, r, col)];
                            if !v.is_zero() {
                                out.coords[blk.coord(t, r, col)] += &(&w * v);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// The associative product `x∘y` (with the Koszul sign `(-1)^{mn}`).
pub fn compose(x: &Cochain, y: &Cochain) -> Result<Cochain> {
    x.check_same(y)?;
    let dgla = &x.dgla;
    let f = dgla.field();
    let (m, n) = (x.degree, y.degree);
    let mut out = Cochain::zero(dgla, m + n);
    let sign = if (m * n) % 2 == 0 { f.one() } else { -f.one() };
    let xs = dgla.space(m);
    let ys = dgla.space(n);
    for blk in dgla.space(m + n).blocks() {
        if blk.rows == 0 || blk.cols == 0 {
            continue;
        }
        let right_total: usize = blk.composition[m..].iter().sum();
        let mid = blk.source + right_total as i64;
        let mid_dim = dgla.dims.at(mid);
        if mid_dim == 0 {
            continue;
        }
        let xb = &xs.blocks()[xs.block_index(mid, &blk.composition[..m]).expect("left block")];
        let yb = &ys.blocks()[ys.block_index(blk.source, &blk.composition[m..]).expect("right block")];
        for t in 0..blk.tuples {
            let digits = blk.digits(t);
            let xt = xb.tuple_index(&digits[..m]);
            let yt = yb.tuple_index(&digits[m..]);
            for r in 0..blk.rows {
                for l in 0..mid_dim {
                    let a = &x.coords[xb.coord(xt, r, l)];
                    if a.is_zero() {
                        continue;
                    }
                    let sa = &sign * a;
                    for c in 0..blk.cols {
                        let b = &y.coords[yb.coord(yt, l, c)];
                        if !b.is_zero() {
                            out.coords[blk.coord(t, r, c)] += &(&sa * b);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The graded commutator `[x, y] = x∘y - (-1)^{mn} y∘x`.
pub fn bracket(x: &Cochain, y: &Cochain) -> Result<Cochain> {
    let xy = compose(x, y)?;
    let yx = compose(y, x)?;
    if (x.degree * y.degree) % 2 == 0 {
        xy.sub(&yx)
    } else {
        xy.add(&yx)
    }
}

/// An element of the gauge group `G = Π GL(V_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeElement {
    low: i64,
    blocks: Vec<Matrix>,
    inverses: Vec<Matrix>,
}

impl GaugeElement {
    /// `blocks[k]` acts on `V_{low + k}`; each must be invertible.
    pub fn new(low: i64, blocks: Vec<Matrix>) -> Result<GaugeElement> {
        let mut inverses = Vec::with_capacity(blocks.len());
        for (k, b) in blocks.iter().enumerate() {
            inverses.push(b.inverse().ok_or(Error::SingularGauge(low + k as i64))?);
        }
        Ok(GaugeElement { low, blocks, inverses })
    }

    pub fn identity(dims: &DimensionVector, field: Field) -> GaugeElement {
        GaugeElement::scalar(dims, &field.one()).expect("one is invertible")
    }

    /// The central element `(t, .., t)`.
    pub fn scalar(dims: &DimensionVector, t: &Scalar) -> Result<GaugeElement> {
        let f = t.field();
        let blocks = dims.dims().iter().map(|&a| Matrix::identity(f, a).scale(t)).collect();
        GaugeElement::new(dims.low(), blocks)
    }

    /// The canonical one-parameter subgroup `λ_0(t) = (t^p, .., t^q)`.
    pub fn lambda0(dims: &DimensionVector, t: &Scalar) -> Result<GaugeElement> {
        let f = t.field();
        let inv = t.inv().ok_or(Error::SingularGauge(dims.low()))?;
        let blocks = dims
            .degrees()
            .map(|i| {
                let s = if i >= 0 { t.pow(i as u64) } else { inv.pow((-i) as u64) };
                Matrix::identity(f, dims.at(i)).scale(&s)
            })
            .collect();
        GaugeElement::new(dims.low(), blocks)
    }

    pub fn random<R: Rng + ?Sized>(dims: &DimensionVector, field: Field, rng: &mut R) -> GaugeElement {
        let blocks = dims
            .dims()
            .iter()
            .map(|&a| loop {
                let data = (0..a * a).map(|_| field.random(rng)).collect();
                let m = Matrix::from_vec(field, a, a, data).expect("square");
                if m.is_invertible() {
                    break m;
                }
            })
            .collect();
        GaugeElement::new(dims.low(), blocks).expect("blocks are invertible")
    }

    pub fn block(&self, degree: i64) -> &Matrix {
        &self.blocks[(degree - self.low) as usize]
    }

    pub fn inverse_block(&self, degree: i64) -> &Matrix {
        &self.inverses[(degree - self.low) as usize]
    }

    /// Group product `self * other`.
    pub fn compose(&self, other: &GaugeElement) -> Result<GaugeElement> {
        if self.low != other.low || self.blocks.len() != other.blocks.len() {
            return Err(Error::DimensionMismatch("gauge elements on different windows".into()));
        }
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect();
        GaugeElement::new(self.low, blocks)
    }

    pub fn inverse(&self) -> GaugeElement {
        GaugeElement {
            low: self.low,
            blocks: self.inverses.clone(),
            inverses: self.blocks.clone(),
        }
    }

    fn matches(&self, dims: &DimensionVector, field: Field) -> bool {
        self.low == dims.low()
            && self.blocks.len() == dims.dims().len()
            && self.blocks.iter().zip(dims.dims()).all(|(b, &a)| b.rows() == a && b.field() == field)
    }
}

/// The gauge action `(g·x)_{ij} = g_i x_{ij} g_j^{-1}`.
pub fn gauge_act(g: &GaugeElement, x: &Cochain) -> Result<Cochain> {
    if !g.matches(&x.dgla.dims, x.dgla.field()) {
        return Err(Error::DimensionMismatch("gauge element does not match the dimension vector".into()));
    }
    let mut out = x.clone();
    for (b, blk) in x.space().blocks().iter().enumerate() {
        if blk.rows == 0 || blk.cols == 0 {
            continue;
        }
        let (gi, gj_inv) = (g.block(blk.target), g.inverse_block(blk.source));
        for t in 0..blk.tuples {
            let m = x.block_matrix(b, t);
            out.set_block_matrix(b, t, &(&(gi * &m) * gj_inv))?;
        }
    }
    Ok(out)
}

/// A point `μ ∈ L^1`: candidate action data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModulePoint(Cochain);

impl ModulePoint {
    pub fn new(c: Cochain) -> Result<ModulePoint> {
        if c.degree != 1 {
            return Err(Error::WrongDegree { expected: 1, got: c.degree });
        }
        Ok(ModulePoint(c))
    }

    pub fn zero(dgla: &Arc<Dgla>) -> ModulePoint {
        ModulePoint(Cochain::zero(dgla, 1))
    }

    pub fn as_cochain(&self) -> &Cochain {
        &self.0
    }

    pub fn into_cochain(self) -> Cochain {
        self.0
    }

    pub fn dgla(&self) -> &Arc<Dgla> {
        &self.0.dgla
    }

    pub fn dims(&self) -> &DimensionVector {
        &self.0.dgla.dims
    }

    pub fn algebra(&self) -> &Arc<GradedAlgebra> {
        &self.0.dgla.algebra
    }

    pub fn field(&self) -> Field {
        self.0.dgla.field()
    }

    /// `μ(a): V_source -> V_{source+degree}` for the basis element `a = b_{degree,element}`.
    pub fn action(&self, source: i64, degree: usize, element: usize) -> Matrix {
        self.0
            .evaluate(source, &[degree], &[element])
            .unwrap_or_else(|| Matrix::zeros(self.field(), self.dims().at(source + degree as i64), self.dims().at(source)))
    }

    pub fn set_action(&mut self, source: i64, degree: usize, element: usize, m: &Matrix) -> Result<()> {
        let b = self
            .0
            .space()
            .block_index(source, &[degree])
            .ok_or_else(|| Error::DimensionMismatch(format!("no action block from degree {source} by degree {degree}")))?;
        if element >= self.algebra().dim(degree) {
            return Err(Error::DimensionMismatch(format!("A_{degree} has no basis element {element}")));
        }
        self.0.set_block_matrix(b, element, m)
    }

    /// The module `⊕_{i∈[low,high]} A_{i+twist}` with `A` acting by left multiplication.
    pub fn tautological(algebra: &Arc<GradedAlgebra>, low: i64, high: i64, twist: i64) -> Result<ModulePoint> {
        if high < low {
            return Err(Error::InvalidDimensionVector(format!("empty window [{low}, {high}]")));
        }
        if high + twist > algebra.bound() as i64 {
            return Err(Error::BoundTooSmall {
                needed: (high + twist) as usize,
                bound: algebra.bound(),
            });
        }
        let piece = |i: i64| if i + twist < 0 { 0 } else { algebra.dim((i + twist) as usize) };
        let dims = DimensionVector::new(low, (low..=high).map(piece).collect())?;
        let dgla = Dgla::new(algebra.clone(), dims)?;
        let f = algebra.field();
        let mut mu = ModulePoint::zero(&dgla);
        for j in low..=high {
            if piece(j) == 0 {
                continue;
            }
            let src = (j + twist) as usize;
            for d in 1..=(high - j) as usize {
                let tgt = src + d;
                for a in 0..algebra.dim(d) {
                    let mut m = Matrix::zeros(f, algebra.dim(tgt), algebra.dim(src));
                    for v in 0..algebra.dim(src) {
                        for (r, s) in algebra.basis_product(d, a, src, v).iter().enumerate() {
                            m.set(r, v, s.clone());
                        }
                    }
                    mu.set_action(j, d, a, &m)?;
                }
            }
        }
        Ok(mu)
    }

    /// The same point over `F_p`, with the algebra reduced alongside.
    pub fn reduce_mod(&self, p: u64) -> Result<ModulePoint> {
        let algebra = Arc::new(self.algebra().reduce_mod(p)?);
        self.reduce_with(&algebra)
    }

    /// Reduction against an already reduced copy of the algebra.
    pub fn reduce_with(&self, algebra: &Arc<GradedAlgebra>) -> Result<ModulePoint> {
        let p = algebra.field().characteristic();
        let dgla = Dgla::new(algebra.clone(), self.dims().clone())?;
        let coords = self
            .0
            .coords
            .iter()
            .map(|s| s.reduce_mod(p))
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::NotReducible(p))?;
        Ok(ModulePoint(Cochain::from_coords(&dgla, 1, coords)?))
    }

    pub fn gauge(&self, g: &GaugeElement) -> Result<ModulePoint> {
        Ok(ModulePoint(gauge_act(g, &self.0)?))
    }

    /// Block direct sum of two module points on the same algebra and window.
    pub fn direct_sum(&self, other: &ModulePoint) -> Result<ModulePoint> {
        let (a, b) = (self.dims(), other.dims());
        if a.low() != b.low() || a.high() != b.high() || self.algebra() != other.algebra() {
            return Err(Error::DimensionMismatch("direct sum needs equal windows and algebras".into()));
        }
        let dims = DimensionVector::new(a.low(), a.dims().iter().zip(b.dims()).map(|(x, y)| x + y).collect())?;
        let dgla = Dgla::new(self.algebra().clone(), dims)?;
        let mut mu = ModulePoint::zero(&dgla);
        for blk in self.0.space().blocks() {
            let d = blk.composition[0];
            for e in 0..blk.tuples {
                let m = self.action(blk.source, d, e).direct_sum(&other.action(blk.source, d, e));
                mu.set_action(blk.source, d, e, &m)?;
            }
        }
        Ok(mu)
    }
}

/// The curvature `dμ + μ∘μ`, whose `(a, b)` component is `μ(ab) - μ(a)∘μ(b)`.
pub fn mc_residual(mu: &ModulePoint) -> Cochain {
    let c = &mu.0;
    let dgla = &c.dgla;
    let alg = dgla.algebra.as_ref();
    let l1 = dgla.space(1);
    let mut out = Cochain::zero(dgla, 2);
    for blk in dgla.space(2).blocks() {
        if blk.rows == 0 || blk.cols == 0 {
            continue;
        }
        let (d1, d2) = (blk.composition[0], blk.composition[1]);
        let mid = blk.source + d2 as i64;
        let merged = l1.block_index(blk.source, &[d1 + d2]).expect("merged block");
        let left = l1.block_index(mid, &[d1]).expect("left block");
        let right = l1.block_index(blk.source, &[d2]).expect("right block");
        for t in 0..blk.tuples {
            let dg = blk.digits(t);
            let prod = alg.basis_product(d1, dg[0], d2, dg[1]);
            let mut m = Matrix::zeros(dgla.field(), blk.rows, blk.cols);
            for (k, coef) in prod.iter().enumerate().filter(|(_, s)| !s.is_zero()) {
                m = m.add(&c.block_matrix(merged, k).scale(coef));
            }
            let ab = &c.block_matrix(left, dg[0]) * &c.block_matrix(right, dg[1]);
            out.set_block_matrix(blk_index(dgla.space(2), blk), t, &m.sub(&ab)).expect("shape");
        }
    }
    out
}

fn blk_index(space: &CochainSpace, blk: &Block) -> usize {
    space.block_index(blk.source, &blk.composition).expect("block of this space")
}

/// Whether `μ` is a Maurer-Cartan element, i.e. an `m`-module structure on `V`.
pub fn is_module(mu: &ModulePoint) -> bool {
    mc_residual(mu).is_zero()
}

/// The twisted differential `d^μ(y) = dy + [μ, y]`.
pub fn twisted_differential(mu: &ModulePoint, y: &Cochain) -> Result<Cochain> {
    differential(y).add(&bracket(&mu.0, y)?)
}
