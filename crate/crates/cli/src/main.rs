mod commands;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use locsmith_core::scalar::set_tolerance;
use locsmith_core::{Float64, GaussianRational, Rational};
use serde_json::Value;

use commands::{Command, Failure, Outcome, Request};
use input::{Entry, Field, InputDocument};

#[derive(Parser)]
#[command(name = "locsmith", version, about = "Local Smith form, generalized inverse and solution curves of a matrix family L(ε)")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the recursion and report stabilization and chain data.
    Analyze(Flags),
    /// Build φ, ψ and Δ with ψ⁻¹Lφ = Δ.
    Diagonalize(Flags),
    /// Laurent expansion of the generalized inverse and its families.
    Ginverse(Flags),
    /// Flat basis of power-series solutions; parametrizes a given curve.
    Solve(Flags),
    /// Greenberg values and the approximation of a given curve.
    Artin(Flags),
    /// Invariant factors by polynomial Smith normal form.
    OracleSmith(Flags),
}

#[derive(Clone, Copy, ValueEnum)]
enum Backend {
    Exact,
    Float,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(clap::Args)]
struct Flags {
    input: PathBuf,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    check: bool,
    /// Recenter at this point before anything else.
    #[arg(long, allow_hyphen_values = true)]
    at: Option<String>,
    #[arg(long, value_enum, default_value_t = Backend::Exact)]
    backend: Backend,
    #[arg(long)]
    tol: Option<f64>,
    /// Comma-separated sample points.
    #[arg(long, allow_hyphen_values = true)]
    sample: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

const DEFAULT_SAMPLES: &str = "1/7,-1/5,2";
const FLOAT_BANNER: &str = "tolerance-dependent: float backend";

fn request<F: Entry>(command: Command, doc: &InputDocument, flags: &Flags) -> Result<Request<F>, Failure> {
    let bad = Failure::Input;
    let l = doc.family::<F>().map_err(bad)?;
    let samples = match (&flags.sample, &doc.sample_points) {
        (Some(s), _) => input::parse_list::<F>(s).map_err(bad)?,
        (None, Some(v)) => v.iter().map(F::from_json).collect::<Result<_, _>>().map_err(bad)?,
        (None, None) => input::parse_list::<F>(DEFAULT_SAMPLES).map_err(bad)?,
    };
    let shift = match (&flags.at, &doc.shift) {
        (Some(s), _) => Some(F::parse_entry(s).map_err(bad)?),
        (None, Some(v)) => Some(F::from_json(v).map_err(bad)?),
        (None, None) => None,
    };
    Ok(Request {
        command,
        l,
        order: flags.order.or(doc.order),
        k_max: flags.k_max.or(doc.k_max).unwrap_or(64),
        check: flags.check,
        samples,
        shift,
        curve: doc.curve::<F>().map_err(bad)?,
        level: doc.level,
    })
}

fn execute(command: Command, flags: &Flags) -> Result<(Outcome, bool), Failure> {
    let text = std::fs::read_to_string(&flags.input).map_err(|e| Failure::Input(format!("{}: {e}", flags.input.display())))?;
    let doc = InputDocument::from_str(&text).map_err(Failure::Input)?;
    let field = doc.field().map_err(Failure::Input)?;
    let float = matches!(flags.backend, Backend::Float) || field == Field::Float;
    if float {
        if field == Field::Gaussian {
            return Err(Failure::Input("the float backend has no complex scalars; use --backend exact".into()));
        }
        if let Some(t) = flags.tol.or(doc.tolerance) {
            if !(t.is_finite() && t > 0.0) {
                return Err(Failure::Input(format!("tolerance must be positive, got {t}")));
            }
            set_tolerance(t);
        }
    }
    let mut out = match (field, float) {
        (_, true) => commands::run(request::<Float64>(command, &doc, flags)?)?,
        (Field::Gaussian, false) => commands::run(request::<GaussianRational>(command, &doc, flags)?)?,
        _ => commands::run(request::<Rational>(command, &doc, flags)?)?,
    };
    if let Value::Object(m) = &mut out.report {
        m.insert("field".into(), Value::String(doc.field.clone()));
        m.insert("backend".into(), Value::String(if float { "float" } else { "exact" }.into()));
        if float {
            m.insert("tolerance".into(), Value::String(format!("{:e}", locsmith_core::scalar::tolerance())));
        }
    }
    Ok((out, float))
}

fn emit(flags: &Flags, body: &str) -> Result<(), String> {
    match &flags.out {
        Some(p) => std::fs::write(p, body).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = match &cli.command {
        Cmd::Analyze(f) => (Command::Analyze, f),
        Cmd::Diagonalize(f) => (Command::Diagonalize, f),
        Cmd::Ginverse(f) => (Command::Ginverse, f),
        Cmd::Solve(f) => (Command::Solve, f),
        Cmd::Artin(f) => (Command::Artin, f),
        Cmd::OracleSmith(f) => (Command::OracleSmith, f),
    };
    let started = Instant::now();
    match execute(command, flags) {
        Ok((out, float)) => {
            let body = match flags.format {
                Format::Structured => {
                    let mut v = out.report;
                    if float {
                        v["banner"] = Value::String(FLOAT_BANNER.into());
                    }
                    report::to_structured(&v)
                }
                Format::Text => report::to_text(&out.report, float.then_some(FLOAT_BANNER), Some(started.elapsed().as_secs_f64())),
            };
            if let Err(e) = emit(flags, &body) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if out.failed_checks.is_empty() {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed: {}", out.failed_checks.join(", "));
                ExitCode::from(4)
            }
        }
        Err(f) => {
            let code = f.code();
            match f {
                Failure::Input(msg) => eprintln!("input error: {msg}"),
                Failure::Internal(msg) => eprintln!("internal error: {msg}"),
                Failure::NotStabilized(msg, partial) => {
                    eprintln!("not stabilized: {msg}");
                    let v = serde_json::json!({ "command": command.label(), "error": msg, "partial": partial });
                    let body = match flags.format {
                        Format::Structured => report::to_structured(&v),
                        Format::Text => report::to_text(&v, None, None),
                    };
                    let _ = emit(flags, &body);
                }
            }
            ExitCode::from(code)
        }
    }
}
