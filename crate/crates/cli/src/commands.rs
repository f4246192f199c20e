//! Command handlers. Each returns the `result` part of the report.

use std::path::Path;
use std::sync::Arc;

use mcmod::derived::{mc_ideal_of, presentation_of, tangent_cohomology, verify_q_squared};
use mcmod::dgla::{is_module, mc_residual, twisted_differential, Cochain, Dgla, ModulePoint};
use mcmod::fixtures::{projective_line_window, split_window};
use mcmod::galgebra::GradedAlgebra;
use mcmod::hilbert::{
    extend_module, gotzmann_check, is_primitive_at, macaulay_bound, macaulay_rep, sheaf_stability_pipeline,
    HilbertPolynomial,
};
use mcmod::linalg::{Field, Matrix};
use mcmod::stability::{
    check_stability, determinant_character, extremal_character, Character, Mode, StabilityOptions,
};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::descriptor::{
    load_algebra, matrix_json, module_descriptor, parse_dims, polynomial_descriptor, read_json, AlgebraDescriptor,
    CochainDescriptor, ModuleDescriptor,
};
use crate::scan::scan_mc;
use crate::{CliError, Command, FixtureName, HilbertCommand, ModeArg, ModuleInput, PipelineArgs, StabilityArgs, WindowInput};

type Out = Result<Value, CliError>;

fn to_json<T: Serialize>(v: &T) -> Value {
    tidy(serde_json::to_value(v).expect("serializable"))
}

/// Rewrites serialized matrices `{rows, cols, field, entries}` as lists of rows.
fn tidy(v: Value) -> Value {
    match v {
        Value::Object(map) => {
            let is_matrix = map.len() == 4 && ["rows", "cols", "field", "entries"].iter().all(|k| map.contains_key(*k));
            if is_matrix {
                let cols = map["cols"].as_u64().unwrap_or(0) as usize;
                let entries = map["entries"].as_array().cloned().unwrap_or_default();
                let rows: Vec<Value> = if cols == 0 {
                    (0..map["rows"].as_u64().unwrap_or(0)).map(|_| json!([])).collect()
                } else {
                    entries.chunks(cols).map(|c| Value::Array(c.to_vec())).collect()
                };
                return Value::Array(rows);
            }
            Value::Object(map.into_iter().map(|(k, v)| (k, tidy(v))).collect::<Map<_, _>>())
        }
        Value::Array(a) => Value::Array(a.into_iter().map(tidy).collect()),
        other => other,
    }
}

fn load_module(input: &ModuleInput) -> Result<(Arc<GradedAlgebra>, ModulePoint), CliError> {
    let algebra = load_algebra(&input.algebra)?;
    let module = read_json::<ModuleDescriptor>(&input.module)?.build(&algebra)?;
    Ok((algebra, module))
}

fn load_window(input: &WindowInput) -> Result<(Arc<GradedAlgebra>, Arc<Dgla>), CliError> {
    let algebra = load_algebra(&input.algebra)?;
    let [p, q] = <[i64; 2]>::try_from(input.window.as_slice())
        .map_err(|_| CliError::Parse("--window takes exactly two degrees p,q".into()))?;
    let dims = parse_dims([p, q], &input.dims)?;
    let dgla = Dgla::new(algebra.clone(), dims)?;
    Ok((algebra, dgla))
}

fn window_json(mu: &ModulePoint) -> Value {
    let d = mu.dims();
    json!({ "field": mu.field(), "window": [d.low(), d.high()], "dims": d.dims() })
}

fn mc_check(input: &ModuleInput) -> Out {
    let (algebra, mu) = load_module(input)?;
    let residual = mc_residual(&mu);
    let mut failures = Vec::new();
    for (b, blk) in residual.space().blocks().iter().enumerate() {
        for t in 0..blk.tuples {
            let m = residual.block_matrix(b, t);
            if m.is_zero() {
                continue;
            }
            let labels: Vec<&str> = blk
                .digits(t)
                .iter()
                .zip(&blk.composition)
                .map(|(&i, &d)| algebra.labels(d)[i].as_str())
                .collect();
            failures.push(json!({
                "source": blk.source,
                "target": blk.target,
                "elements": labels,
                "residual": matrix_json(&m),
            }));
        }
    }
    let mut out = window_json(&mu);
    out["isModule"] = json!(is_module(&mu));
    out["residualNonzeroBlocks"] = json!(failures.len());
    out["residualZero"] = json!(failures.is_empty());
    out["failures"] = Value::Array(failures);
    out["commutative"] = json!(algebra.is_commutative());
    Ok(out)
}

fn ideal(input: &WindowInput) -> Out {
    let (_, dgla) = load_window(input)?;
    let ideal = mc_ideal_of(&dgla);
    let generators: Vec<Value> = ideal
        .generators
        .iter()
        .zip(&ideal.names)
        .filter(|(g, _)| !g.is_zero())
        .map(|(g, name)| json!({ "coordinate": name, "polynomial": ideal.ring.render(g) }))
        .collect();
    let variables: Vec<&str> = (0..ideal.ring.len()).map(|k| ideal.ring.name(k)).collect();
    Ok(json!({
        "field": dgla.field(),
        "window": [dgla.dims().low(), dgla.dims().high()],
        "dims": dgla.dims().dims(),
        "variables": variables,
        "l2Dim": ideal.generators.len(),
        "generators": generators,
    }))
}

fn dg_verify(input: &WindowInput, show: bool) -> Out {
    let (_, dgla) = load_window(input)?;
    let p = presentation_of(&dgla);
    let ring = p.ring();
    let by_level: Vec<usize> = (1..=dgla.top_degree().max(1)).map(|n| dgla.space(n).dim()).collect();
    let failures: Vec<&str> = p.q_squared_failures().into_iter().map(|g| ring.name(g)).collect();
    let mut out = json!({
        "field": dgla.field(),
        "window": [dgla.dims().low(), dgla.dims().high()],
        "dims": dgla.dims().dims(),
        "generators": p.generator_count(),
        "generatorsByLevel": by_level,
        "degreesConsistent": p.degrees_consistent(),
        "qSquaredZero": verify_q_squared(&p),
        "failures": failures,
    });
    if show {
        let images: Vec<Value> = (0..p.generator_count())
            .map(|g| {
                let s = p.split(g);
                json!({
                    "generator": ring.name(g),
                    "degree": ring.degree(g),
                    "q": ring.render(p.q_image(g)),
                    "q0": ring.render(&s.q0),
                    "q1": ring.render(&s.q1),
                    "q2": ring.render(&s.q2),
                })
            })
            .collect();
        out["presentation"] = Value::Array(images);
    }
    Ok(out)
}

fn ext(input: &ModuleInput, plain: bool) -> Out {
    let (_, mu) = load_module(input)?;
    let r = tangent_cohomology(&mu, !plain)?;
    let mut out = window_json(&mu);
    out["augmented"] = json!(r.augmented);
    out["cohomology"] = json!(r.dims);
    out["complexDims"] = json!(r.complex_dims);
    out["ranks"] = json!(r.ranks);
    out["eulerCharacteristic"] = json!(r.euler_characteristic());
    out["complexEulerCharacteristic"] = json!(r.complex_euler_characteristic());
    out["note"] = json!(format!(
        "cohomology of the window [{}, {}]; it agrees with sheaf Ext only for windows long enough",
        r.window.0, r.window.1
    ));
    Ok(out)
}

pub fn parse_character(name: &str, mu: &ModulePoint) -> Result<Character, CliError> {
    match name.trim() {
        "extremal" => Ok(extremal_character(mu.dims())?),
        "determinant" => Ok(determinant_character(mu.algebra(), mu.dims())?),
        s => {
            let list = s
                .strip_prefix("custom:")
                .ok_or_else(|| CliError::Parse(format!("unknown character {s:?}")))?;
            let weights = list
                .split(',')
                .map(|w| w.trim().parse::<i64>().map_err(|_| CliError::Parse(format!("bad weight {w:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Character::new(mu.dims(), weights)?)
        }
    }
}

fn resolve_mode(mode: Option<ModeArg>, field: Field) -> Mode {
    match mode {
        Some(ModeArg::ExactLift) => Mode::ExactLift,
        Some(ModeArg::FiniteField) => Mode::FiniteField,
        None if field.is_finite() => Mode::FiniteField,
        None => Mode::ExactLift,
    }
}

fn default_fields(fields: &Option<Vec<u64>>, field: Field) -> Vec<u64> {
    match (fields, field) {
        (Some(f), _) => f.clone(),
        (None, Field::Prime(p)) => vec![p],
        (None, Field::Rationals) => vec![2, 3],
    }
}

fn stability(args: &StabilityArgs) -> Out {
    let (_, mu) = load_module(&args.input)?;
    let theta = parse_character(&args.character, &mu)?;
    let options = StabilityOptions {
        fields: default_fields(&args.fields, mu.field()),
        mode: resolve_mode(args.mode, mu.field()),
        budget: args.budget,
    };
    let verdict = check_stability(&mu, &theta, &options)?;
    let mut out = to_json(&verdict);
    out["mode"] = json!(options.mode);
    out["witnessProfile"] = json!(verdict.witness.as_ref().map(|w| w.profile()));
    Ok(out)
}

fn pipeline(args: &PipelineArgs) -> Out {
    let (_, mu) = load_module(&args.input)?;
    let r = sheaf_stability_pipeline(&mu, args.p_prime, args.top, &default_fields(&args.fields, mu.field()), args.budget)?;
    Ok(to_json(&r))
}

fn hilbert(cmd: &HilbertCommand) -> Out {
    match cmd {
        HilbertCommand::Eval { coeffs, at } => {
            let h = HilbertPolynomial::new(coeffs.clone());
            let values: Vec<Value> = at.iter().map(|&t| json!({ "t": t, "value": h.evaluate(t) })).collect();
            Ok(json!({ "coeffs": h.coeffs(), "degree": h.degree(), "values": values }))
        }
        HilbertCommand::Primitive { coeffs, start } => {
            let h = HilbertPolynomial::new(coeffs.clone());
            let primitive = is_primitive_at(&h, *start)?;
            Ok(json!({ "coeffs": h.coeffs(), "start": start, "primitive": primitive }))
        }
        HilbertCommand::Macaulay { value, t } => {
            let rep = macaulay_rep(*value, *t)?;
            let bound = macaulay_bound(*value, *t)?;
            Ok(json!({ "value": value, "t": t, "terms": rep.terms, "bound": bound }))
        }
        HilbertCommand::Gotzmann { values, base } => Ok(to_json(&gotzmann_check(values, *base)?)),
        HilbertCommand::Extend { input, top } => {
            let (_, mu) = load_module(input)?;
            let values = extend_module(&mu, *top)?;
            let mut out = window_json(&mu);
            out["top"] = json!(top);
            out["values"] = json!(values);
            Ok(out)
        }
        HilbertCommand::Pipeline(args) => pipeline(args),
    }
}

fn differential(algebra: &Path, cochain: &Path, module: Option<&Path>) -> Out {
    let algebra = load_algebra(algebra)?;
    let c = read_json::<CochainDescriptor>(cochain)?.build(&algebra)?;
    let image = match module {
        None => mcmod::dgla::differential(&c),
        Some(path) => {
            let mu = read_json::<ModuleDescriptor>(path)?.build(&algebra)?;
            if mu.dims() != c.dgla().dims() {
                return Err(CliError::Parse("module and cochain live on different windows".into()));
            }
            let lifted = Cochain::from_coords(mu.dgla(), c.degree(), c.coords().to_vec())?;
            twisted_differential(&mu, &lifted)?
        }
    };
    let mut components = Vec::new();
    for (b, blk) in image.space().blocks().iter().enumerate() {
        for t in 0..blk.tuples {
            let m = image.block_matrix(b, t);
            if m.is_zero() {
                continue;
            }
            let labels: Vec<&str> = blk
                .digits(t)
                .iter()
                .zip(&blk.composition)
                .map(|(&i, &d)| algebra.labels(d)[i].as_str())
                .collect();
            components.push(json!({ "source": blk.source, "elements": labels, "matrix": matrix_json(&m) }));
        }
    }
    Ok(json!({
        "twisted": module.is_some(),
        "degree": image.degree(),
        "isZero": image.is_zero(),
        "components": components,
    }))
}

/// Algebra and module descriptors of a built-in example.
pub fn fixture(name: FixtureName, field: Field, bound: usize) -> Result<(AlgebraDescriptor, ModuleDescriptor), CliError> {
    let line = || polynomial_descriptor(&[("x", 1), ("y", 1)], &[], bound.max(2), field);
    let (alg, mu) = match name {
        FixtureName::ProjectiveLine => (line(), projective_line_window(field, bound)?),
        FixtureName::Split => (line(), split_window(field, bound)?),
        FixtureName::Quadric => {
            let desc = polynomial_descriptor(&[("x", 1), ("y", 1), ("z", 1)], &["x*z - y^2"], bound.max(2), field);
            let a = Arc::new(desc.build()?);
            (desc, ModulePoint::tautological(&a, 0, 2, 0)?)
        }
        FixtureName::Simple => {
            let desc = polynomial_descriptor(&[("x", 1), ("y", 1)], &[], bound.max(1), field);
            let a = Arc::new(desc.build()?);
            let dgla = Dgla::new(a.clone(), parse_dims([0, 1], &[1, 1])?)?;
            let mut mu = ModulePoint::zero(&dgla);
            let x = a.label_index(1, "x").expect("x");
            mu.set_action(0, 1, x, &Matrix::identity(field, 1))?;
            (desc, mu)
        }
    };
    Ok((alg, module_descriptor(&mu)))
}

fn write_fixture(dir: &Path, alg: &AlgebraDescriptor, module: &ModuleDescriptor) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    let pretty = |v: &dyn erased::Json| v.pretty();
    std::fs::write(dir.join("algebra.json"), pretty(alg)).map_err(io)?;
    std::fs::write(dir.join("module.json"), pretty(module)).map_err(io)?;
    Ok(())
}

mod erased {
    pub trait Json {
        fn pretty(&self) -> String;
    }

    impl<T: serde::Serialize> Json for T {
        fn pretty(&self) -> String {
            serde_json::to_string_pretty(self).expect("json") + "\n"
        }
    }
}

pub fn dispatch(cmd: &Command) -> Out {
    match cmd {
        Command::McCheck(input) => mc_check(input),
        Command::Ideal(input) => ideal(input),
        Command::DgVerify { input, show } => dg_verify(input, *show),
        Command::Ext { input, plain } => ext(input, *plain),
        Command::Stability(args) => stability(args),
        Command::Hilbert(h) => hilbert(h),
        Command::Pipeline(args) => pipeline(args),
        Command::ScanMc { input, budget, orbits } => {
            let (algebra, dgla) = load_window(input)?;
            Ok(to_json(&scan_mc(&algebra, dgla.dims(), *budget, *orbits)?))
        }
        Command::Differential { algebra, cochain, module } => differential(algebra, cochain, module.as_deref()),
        Command::Fixture { name, field, bound, out_dir } => {
            let field: Field = field.parse().map_err(CliError::from_parse)?;
            let (alg, module) = fixture(*name, field, *bound)?;
            if let Some(dir) = out_dir {
                write_fixture(dir, &alg, &module)?;
            }
            Ok(json!({ "algebra": alg, "module": module }))
        }
    }
}
