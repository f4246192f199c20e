//! JSON descriptors for algebras, module points and general cochains.

use std::path::Path;
use std::sync::Arc;

use mcmod::dgla::{Cochain, Dgla, ModulePoint};
use mcmod::fixtures::free_algebra;
use mcmod::galgebra::{polynomial_algebra_named, quotient_algebra, DimensionVector, GradedAlgebra, Variable};
use mcmod::linalg::{parse_scalar, Field, Matrix};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarDescriptor {
    pub name: String,
    pub degree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct AlgebraDescriptor {
    pub vars: Vec<VarDescriptor>,
    #[serde(default)]
    pub relations: Vec<String>,
    pub degree_bound: usize,
    pub field: String,
    /// The free associative algebra on degree-one letters; words are labelled `xy`, `yx`, ...
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub noncommutative: bool,
}

impl AlgebraDescriptor {
    pub fn build(&self) -> Result<GradedAlgebra, CliError> {
        let field: Field = self.field.parse().map_err(CliError::from_parse)?;
        let vars: Vec<Variable> = self.vars.iter().map(|v| Variable::new(v.name.clone(), v.degree)).collect();
        for v in &vars {
            let ok = !v.name.is_empty()
                && v.name.chars().next().is_some_and(char::is_alphabetic)
                && v.name.chars().all(|c| c.is_alphanumeric() || c == '_');
            if !ok || v.degree == 0 {
                return Err(CliError::Parse(format!("bad variable {:?} of degree {}", v.name, v.degree)));
            }
        }
        if self.noncommutative {
            let expected: Vec<String> = (0..vars.len()).map(free_letter).collect();
            if vars.iter().any(|v| v.degree != 1) || vars.iter().map(|v| &v.name).ne(expected.iter()) {
                return Err(CliError::Parse(format!("free algebras take degree-one letters named {expected:?}")));
            }
            if !self.relations.is_empty() {
                return Err(CliError::Parse("relations are only supported for commutative algebras".into()));
            }
            return Ok(free_algebra(vars.len(), self.degree_bound, field)?);
        }
        let free = polynomial_algebra_named(&vars, self.degree_bound, field)?;
        if self.relations.is_empty() {
            return Ok(free);
        }
        let rels = self
            .relations
            .iter()
            .map(|r| free.parse_element(r).map_err(CliError::from_parse))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(quotient_algebra(&free, &rels)?)
    }
}

fn free_letter(k: usize) -> String {
    ["x", "y", "z", "w"].get(k).map_or_else(|| format!("x{k}"), |s| s.to_string())
}

/// One action block `μ(element) : V_source -> V_target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDescriptor {
    pub source: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<i64>,
    pub element: String,
    pub matrix: Vec<Vec<Value>>,
}

/// One block of a general cochain: a tuple of basis elements acting from `source`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDescriptor {
    pub source: i64,
    pub elements: Vec<String>,
    pub matrix: Vec<Vec<Value>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleDescriptor {
    pub window: [i64; 2],
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub actions: Vec<ActionDescriptor>,
    /// Shorthand: the direct sum of the tautological windows `A(t)` for each listed twist `t`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twists: Option<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CochainDescriptor {
    pub window: [i64; 2],
    pub dims: Vec<usize>,
    pub degree: usize,
    #[serde(default)]
    pub components: Vec<ComponentDescriptor>,
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn load_algebra(path: &Path) -> Result<Arc<GradedAlgebra>, CliError> {
    Ok(Arc::new(read_json::<AlgebraDescriptor>(path)?.build()?))
}

fn dimension_vector(window: [i64; 2], dims: &[usize]) -> Result<DimensionVector, CliError> {
    let [p, q] = window;
    if q < p || (q - p + 1) as usize != dims.len() {
        return Err(CliError::Parse(format!("window [{p}, {q}] does not match {} dimensions", dims.len())));
    }
    DimensionVector::new(p, dims.to_vec()).map_err(CliError::from_parse)
}

pub fn parse_dims(window: [i64; 2], dims: &[usize]) -> Result<DimensionVector, CliError> {
    dimension_vector(window, dims)
}

fn parse_matrix(field: Field, rows: &[Vec<Value>], shape: (usize, usize), what: &str) -> Result<Matrix, CliError> {
    if rows.len() != shape.0 || rows.iter().any(|r| r.len() != shape.1) {
        return Err(CliError::Parse(format!("{what}: expected a {}x{} matrix", shape.0, shape.1)));
    }
    let data = rows
        .iter()
        .flatten()
        .map(|v| match v {
            Value::Number(n) => parse_scalar(field, &n.to_string()),
            Value::String(s) => parse_scalar(field, s),
            other => Err(mcmod::Error::Parse(format!("bad matrix entry {other}"))),
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::from_parse)?;
    Ok(Matrix::from_vec(field, shape.0, shape.1, data)?)
}

fn find_element(algebra: &GradedAlgebra, label: &str) -> Result<(usize, usize), CliError> {
    algebra
        .find_label(label)
        .filter(|(d, _)| *d > 0)
        .ok_or_else(|| CliError::Parse(format!("{label:?} is not a basis element of positive degree")))
}

impl ModuleDescriptor {
    pub fn build(&self, algebra: &Arc<GradedAlgebra>) -> Result<ModulePoint, CliError> {
        let dims = dimension_vector(self.window, &self.dims)?;
        if let Some(twists) = &self.twists {
            if !self.actions.is_empty() {
                return Err(CliError::Parse("give either actions or twists, not both".into()));
            }
            let mut parts = twists
                .iter()
                .map(|&t| ModulePoint::tautological(algebra, dims.low(), dims.high(), t));
            let first = parts.next().ok_or_else(|| CliError::Parse("empty twist list".into()))??;
            let mu = parts.try_fold(first, |acc, m| acc.direct_sum(&m?))?;
            if mu.dims() != &dims {
                return Err(CliError::Parse(format!(
                    "twists give dimensions {:?}, descriptor says {:?}",
                    mu.dims().dims(),
                    dims.dims()
                )));
            }
            return Ok(mu);
        }
        let dgla = Dgla::new(algebra.clone(), dims.clone())?;
        let mut mu = ModulePoint::zero(&dgla);
        for a in &self.actions {
            let (d, e) = find_element(algebra, &a.element)?;
            let target = a.source + d as i64;
            if a.target.is_some_and(|t| t != target) {
                return Err(CliError::Parse(format!("{} maps degree {} to {target}", a.element, a.source)));
            }
            if a.source < dims.low() || target > dims.high() {
                return Err(CliError::Parse(format!("action of {} from {} leaves the window", a.element, a.source)));
            }
            let what = format!("action of {} from degree {}", a.element, a.source);
            let m = parse_matrix(algebra.field(), &a.matrix, (dims.at(target), dims.at(a.source)), &what)?;
            mu.set_action(a.source, d, e, &m)?;
        }
        Ok(mu)
    }
}

impl CochainDescriptor {
    pub fn build(&self, algebra: &Arc<GradedAlgebra>) -> Result<Cochain, CliError> {
        let dims = dimension_vector(self.window, &self.dims)?;
        let dgla = Dgla::new(algebra.clone(), dims.clone())?;
        if self.degree > dgla.top_degree() {
            return Err(CliError::Parse(format!("L^{} vanishes on this window", self.degree)));
        }
        let mut c = Cochain::zero(&dgla, self.degree);
        for comp in &self.components {
            if comp.elements.len() != self.degree {
                return Err(CliError::Parse(format!("a degree-{} component needs {} elements", self.degree, self.degree)));
            }
            let found = comp.elements.iter().map(|l| find_element(algebra, l)).collect::<Result<Vec<_>, _>>()?;
            let composition: Vec<usize> = found.iter().map(|(d, _)| *d).collect();
            let digits: Vec<usize> = found.iter().map(|(_, i)| *i).collect();
            let b = dgla
                .space(self.degree)
                .block_index(comp.source, &composition)
                .ok_or_else(|| CliError::Parse(format!("component {:?} from {} leaves the window", comp.elements, comp.source)))?;
            let blk = &dgla.space(self.degree).blocks()[b];
            let m = parse_matrix(algebra.field(), &comp.matrix, (blk.rows, blk.cols), "component")?;
            c.set_block_matrix(b, blk.tuple_index(&digits), &m)?;
        }
        Ok(c)
    }
}

pub fn matrix_json(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.rows()).map(|r| m.row(r).iter().map(|s| s.to_string()).collect()).collect()
}

fn matrix_values(m: &Matrix) -> Vec<Vec<Value>> {
    (0..m.rows())
        .map(|r| {
            m.row(r)
                .iter()
                .map(|s| match s.to_i64() {
                    Some(n) => Value::from(n),
                    None => Value::from(s.to_string()),
                })
                .collect()
        })
        .collect()
}

/// Descriptor with every nonzero action block.
pub fn module_descriptor(mu: &ModulePoint) -> ModuleDescriptor {
    let dims = mu.dims();
    let a = mu.algebra();
    let mut actions = Vec::new();
    for blk in mu.as_cochain().space().blocks() {
        let d = blk.composition[0];
        for e in 0..blk.tuples {
            let m = mu.action(blk.source, d, e);
            if m.is_zero() {
                continue;
            }
            actions.push(ActionDescriptor {
                source: blk.source,
                target: Some(blk.target),
                element: a.labels(d)[e].clone(),
                matrix: matrix_values(&m),
            });
        }
    }
    ModuleDescriptor {
        window: [dims.low(), dims.high()],
        dims: dims.dims().to_vec(),
        actions,
        twists: None,
    }
}

/// Descriptor of a polynomial algebra (with optional relations) as used by the fixtures.
pub fn polynomial_descriptor(vars: &[(&str, usize)], relations: &[&str], bound: usize, field: Field) -> AlgebraDescriptor {
    AlgebraDescriptor {
        vars: vars.iter().map(|(n, d)| VarDescriptor { name: n.to_string(), degree: *d }).collect(),
        relations: relations.iter().map(|s| s.to_string()).collect(),
        degree_bound: bound,
        field: field.to_string(),
        noncommutative: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> AlgebraDescriptor {
        polynomial_descriptor(&[("x", 1), ("y", 1)], &[], 3, Field::Rationals)
    }

    #[test]
    fn free_algebras() {
        let text = r#"{"vars":[{"name":"x","degree":1},{"name":"y","degree":1}],"degreeBound":2,"field":"Q","noncommutative":true}"#;
        let a = serde_json::from_str::<AlgebraDescriptor>(text).unwrap().build().unwrap();
        assert_eq!(a.dim(2), 4);
        assert!(!a.is_commutative());
        assert!(a.find_label("yx").is_some());
        let renamed = text.replace("\"y\"", "\"t\"");
        assert!(serde_json::from_str::<AlgebraDescriptor>(&renamed).unwrap().build().is_err());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"vars":[{"name":"x","degree":1}],"degreeBound":2,"field":"Q","extra":1}"#;
        assert!(serde_json::from_str::<AlgebraDescriptor>(text).is_err());
        let text = r#"{"window":[0,1],"dims":[1,1],"actions":[{"source":0,"element":"x","matrix":[[1]],"bogus":0}]}"#;
        assert!(serde_json::from_str::<ModuleDescriptor>(text).is_err());
    }

    #[test]
    fn module_round_trip() {
        let a = Arc::new(line().build().unwrap());
        let mu = ModulePoint::tautological(&a, 0, 2, 1).unwrap();
        let desc = module_descriptor(&mu);
        let text = serde_json::to_string(&desc).unwrap();
        let back: ModuleDescriptor = serde_json::from_str(&text).unwrap();
        assert_eq!(back.build(&a).unwrap(), mu);
    }

    #[test]
    fn twists_shorthand() {
        let a = Arc::new(line().build().unwrap());
        let desc = ModuleDescriptor {
            window: [0, 2],
            dims: vec![1, 2, 4],
            actions: vec![],
            twists: Some(vec![0, -2]),
        };
        let mu = desc.build(&a).unwrap();
        let expected = ModulePoint::tautological(&a, 0, 2, 0)
            .unwrap()
            .direct_sum(&ModulePoint::tautological(&a, 0, 2, -2).unwrap())
            .unwrap();
        assert_eq!(mu, expected);
    }

    #[test]
    fn bad_shapes() {
        let a = Arc::new(line().build().unwrap());
        let desc: ModuleDescriptor =
            serde_json::from_str(r#"{"window":[0,1],"dims":[1,2],"actions":[{"source":0,"element":"x","matrix":[[1]]}]}"#)
                .unwrap();
        assert!(matches!(desc.build(&a), Err(CliError::Parse(_))));
        let desc: ModuleDescriptor =
            serde_json::from_str(r#"{"window":[0,1],"dims":[1,1],"actions":[{"source":0,"element":"x^2","matrix":[[1]]}]}"#)
                .unwrap();
        assert!(desc.build(&a).is_err());
    }

    #[test]
    fn quotient_and_rational_entries() {
        let desc = polynomial_descriptor(&[("x", 1), ("y", 1), ("z", 1)], &["x*z - y^2"], 3, Field::Rationals);
        let a = Arc::new(desc.build().unwrap());
        assert_eq!(a.hilbert_function(), vec![1, 3, 5, 7]);
        let m: ModuleDescriptor =
            serde_json::from_str(r#"{"window":[0,1],"dims":[1,1],"actions":[{"source":0,"element":"x","matrix":[["1/2"]]}]}"#)
                .unwrap();
        let mu = m.build(&a).unwrap();
        assert_eq!(mu.action(0, 1, 0).get(0, 0), &Field::Rationals.from_ratio(1, 2).unwrap());
    }

    #[test]
    fn cochain_components() {
        let a = Arc::new(line().build().unwrap());
        let text = r#"{"window":[0,2],"dims":[1,1,1],"degree":2,
            "components":[{"source":0,"elements":["x","y"],"matrix":[[3]]}]}"#;
        let c: CochainDescriptor = serde_json::from_str(text).unwrap();
        let c = c.build(&a).unwrap();
        assert_eq!(c.degree(), 2);
        assert_eq!(c.coords().iter().filter(|s| !s.is_zero()).count(), 1);
    }
}
