//! Command-line front end: argument parsing, report envelopes and exit codes.
//!
//! Exit status is 0 on success, 1 on domain errors and 2 on parse errors
//! (bad flags, unreadable or malformed descriptors).

pub mod commands;
pub mod descriptor;
pub mod render;
pub mod scan;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

pub const TOOL: &str = "mcmod";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "MC_MODULI_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Domain(#[from] mcmod::Error),
    #[error("cannot write output: {0}")]
    Io(String),
}

impl CliError {
    /// Library errors that stem from malformed input text.
    pub fn from_parse(e: mcmod::Error) -> CliError {
        CliError::Parse(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Domain(mcmod::Error::Parse(_)) => 2,
            CliError::Domain(_) | CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser, Serialize)]
#[command(name = "mcmod", version, about = "Moduli of graded modules: MC equations, tangent cohomology, stability")]
pub struct Cli {
    /// Omit the timestamp from the report.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub no_timestamp: bool,
    /// Plain-text rendering instead of JSON.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub text: bool,
    /// Write the report to a file instead of stdout.
    #[arg(long, short, global = true)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ModuleInput {
    /// Algebra descriptor (JSON).
    #[arg(long)]
    pub algebra: PathBuf,
    /// Module-point descriptor (JSON).
    #[arg(long)]
    pub module: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct WindowInput {
    #[arg(long)]
    pub algebra: PathBuf,
    /// Window `p,q`.
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true, required = true)]
    pub window: Vec<i64>,
    /// Dimension vector `α_p,..,α_q`.
    #[arg(long, value_delimiter = ',', num_args = 1, required = true)]
    pub dims: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    ExactLift,
    FiniteField,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StabilityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: ModuleInput,
    /// `extremal`, `determinant` or `custom:<w_p>,..,<w_q>`.
    #[arg(long, default_value = "extremal", allow_hyphen_values = true)]
    pub character: String,
    /// Primes to decide over; defaults to 2,3 over Q and to p over F_p.
    #[arg(long, value_delimiter = ',')]
    pub fields: Option<Vec<u64>>,
    /// Defaults to exact-lift over Q and finite-field over F_p.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Largest total dimension for exhaustive enumeration.
    #[arg(long, default_value_t = mcmod::stability::DEFAULT_BUDGET)]
    pub budget: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PipelineArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: ModuleInput,
    /// Lower end p' of the truncated window.
    #[arg(long, allow_hyphen_values = true)]
    pub p_prime: i64,
    /// Degree D up to which the module is extended.
    #[arg(long, allow_hyphen_values = true)]
    pub top: i64,
    /// Primes to decide over; defaults to 2,3 over Q and to p over F_p.
    #[arg(long, value_delimiter = ',')]
    pub fields: Option<Vec<u64>>,
    #[arg(long, default_value_t = mcmod::stability::DEFAULT_BUDGET)]
    pub budget: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixtureName {
    /// Γ_[0,2] of the structure sheaf of P^1, α = (1,2,3).
    ProjectiveLine,
    /// Γ_[0,2](O ⊕ O(-2)) on P^1, α = (1,2,4).
    Split,
    /// The window [0,2] of k[x,y,z]/(xz - y^2).
    Quadric,
    /// k[x,y] on [0,1] with x acting by 1 and y by 0.
    Simple,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum HilbertCommand {
    /// Evaluate Σ a_i C(t, i).
    Eval {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        coeffs: Vec<i64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        at: Vec<i64>,
    },
    /// Primitivity from coefficients and from consecutive values.
    Primitive {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        coeffs: Vec<i64>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        start: i64,
    },
    /// Macaulay representation and bound a^<t>.
    Macaulay {
        #[arg(long)]
        value: u64,
        #[arg(long)]
        t: usize,
    },
    /// Macaulay bound and persistence along h_p, h_{p+1}, ...
    Gotzmann {
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<u64>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        base: i64,
    },
    /// Hilbert function of the extension (A ⊗ M_p)/K up to degree D.
    Extend {
        #[command(flatten)]
        #[serde(flatten)]
        input: ModuleInput,
        #[arg(long, allow_hyphen_values = true)]
        top: i64,
    },
    /// Generation, extension, Gotzmann and truncated-window stability.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Command {
    /// Check the Maurer-Cartan equation (module axioms) at a point.
    McCheck(ModuleInput),
    /// The MC ideal: quadratic equations on L^1.
    Ideal(WindowInput),
    /// Build the dg presentation and verify q^2 = 0.
    DgVerify {
        #[command(flatten)]
        #[serde(flatten)]
        input: WindowInput,
        /// Include every q-image in the report.
        #[arg(long)]
        show: bool,
    },
    /// Tangent cohomology (graded Ext) at a module point.
    Ext {
        #[command(flatten)]
        #[serde(flatten)]
        input: ModuleInput,
        /// Use the plain complex instead of the augmented one.
        #[arg(long)]
        plain: bool,
    },
    /// King θ-stability by exhaustive submodule search.
    Stability(StabilityArgs),
    /// Hilbert polynomial tools.
    #[command(subcommand)]
    Hilbert(HilbertCommand),
    /// Same as `hilbert pipeline`.
    Pipeline(PipelineArgs),
    /// Count MC points over F_p by two independent paths, optionally up to gauge.
    ScanMc {
        #[command(flatten)]
        #[serde(flatten)]
        input: WindowInput,
        /// Largest number of points to visit.
        #[arg(long, default_value_t = scan::DEFAULT_SCAN_BUDGET)]
        budget: u128,
        /// Also count gauge orbits.
        #[arg(long)]
        orbits: bool,
    },
    /// Apply d (or d^μ with --module) to a cochain descriptor.
    Differential {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        cochain: PathBuf,
        #[arg(long)]
        module: Option<PathBuf>,
    },
    /// Emit the descriptors of a built-in example.
    Fixture {
        #[arg(value_enum)]
        name: FixtureName,
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long, default_value_t = 5)]
        bound: usize,
        /// Also write algebra.json and module.json into this directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> String {
        match self {
            Command::McCheck(_) => "mc-check".into(),
            Command::Ideal(_) => "ideal".into(),
            Command::DgVerify { .. } => "dg-verify".into(),
            Command::Ext { .. } => "ext".into(),
            Command::Stability(_) => "stability".into(),
            Command::Hilbert(h) => format!(
                "hilbert {}",
                match h {
                    HilbertCommand::Eval { .. } => "eval",
                    HilbertCommand::Primitive { .. } => "primitive",
                    HilbertCommand::Macaulay { .. } => "macaulay",
                    HilbertCommand::Gotzmann { .. } => "gotzmann",
                    HilbertCommand::Extend { .. } => "extend",
                    HilbertCommand::Pipeline(_) => "pipeline",
                }
            ),
            Command::Pipeline(_) => "pipeline".into(),
            Command::ScanMc { .. } => "scan-mc".into(),
            Command::Differential { .. } => "differential".into(),
            Command::Fixture { .. } => "fixture".into(),
        }
    }
}

fn thread_count() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Parse(format!("{THREADS_ENV} must be a positive integer, got {s:?}"))),
        },
    }
}

/// The report envelope around a command result.
/// The command's arguments without the enum tags added by serde.
fn parameters(cmd: &Command) -> Value {
    let mut v = serde_json::to_value(cmd).expect("serializable parameters");
    while let Value::Object(map) = &v {
        match map.iter().next() {
            Some((_, inner)) if map.len() == 1 && inner.is_object() => v = inner.clone(),
            _ => break,
        }
    }
    v
}

pub fn envelope(cli: &Cli, result: Value) -> Value {
    let mut env = json!({
        "tool": TOOL,
        "version": VERSION,
        "command": cli.command.name(),
        "parameters": parameters(&cli.command),
    });
    if !cli.no_timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        env["timestamp"] = json!(secs);
    }
    env["result"] = result;
    env
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    let result = match thread_count()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Io(e.to_string()))?
            .install(|| commands::dispatch(&cli.command))?,
        None => commands::dispatch(&cli.command)?,
    };
    let report = envelope(cli, result);
    let mut text = if cli.text {
        render::text(&report)
    } else {
        serde_json::to_string_pretty(&report).expect("json")
    };
    text.push('\n');
    Ok(text)
}

/// Parses `args` (including the program name), runs the command and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let outcome = execute(&cli).and_then(|text| match &cli.output {
        Some(path) => std::fs::write(path, &text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    });
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
