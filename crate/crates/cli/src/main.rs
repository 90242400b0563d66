//! `lo`: exact Littlewood-Offord computations from the command line.
//!
//! Every command prints one JSON report. Exit codes: 0 success, 1 failed check,
//! precondition or invalid input, 2 usage error, 3 resource limit.

mod commands;
mod config;
mod instance;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use commands::{GapCommand, InverseArgs, StrongArgs, SweepArgs, VerifyCommand};
use instance::InstanceArgs;

#[derive(Debug, Parser)]
#[command(name = "lo", version, about = "Exact forward and inverse Littlewood-Offord toolkit")]
pub struct Cli {
    /// TOML file with algorithm constants (K, C0, slack, caps, guard).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write per-step trace records here as JSON lines.
    #[arg(long, global = true)]
    trace: Option<PathBuf>,
    /// Print the elapsed wall time to stderr.
    #[arg(long, global = true)]
    timing: bool,
    /// Enumeration guard; overrides the config file.
    #[arg(long = "guard", env = "LO_GUARD", global = true)]
    guard: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Concentration probability P_mu(v), or P_mu(v; Q) with --qset.
    Prob {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        qset: Vec<i64>,
    },
    /// Exact distribution of the lazy walk.
    Dist {
        #[command(flatten)]
        instance: InstanceArgs,
    },
    /// GAP properness, embedding and metrics.
    #[command(subcommand)]
    Gap(GapCommand),
    /// Inverse algorithm with verified postconditions.
    Inverse(InverseArgs),
    /// Rank and volume bounds from P_mu(v) >= n^-A.
    StrongInverse(StrongArgs),
    /// Oracle checks and property suites.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// One check over a family of instances, n in a range.
    Sweep(SweepArgs),
    /// Writes an instance file.
    Generate {
        #[command(flatten)]
        instance: InstanceArgs,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] lo_core::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_resource() => 3,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
            CliError::Core(e) => match e {
                lo_core::Error::Domain(_) => "domain",
                lo_core::Error::SupportCap { .. } => "support_cap",
                lo_core::Error::EnumerationGuard { .. } => "enumeration_guard",
                lo_core::Error::Resource(_) => "resource",
                lo_core::Error::Overflow(_) => "overflow",
                lo_core::Error::Precondition { .. } => "precondition",
                lo_core::Error::Divergence { .. } => "divergence",
                lo_core::Error::Embed { .. } => "embed",
                lo_core::Error::Containment { .. } => "containment",
                lo_core::Error::Inconsistency(_) => "inconsistency",
            },
        }
    }
}

/// Result of one command before it is written out.
pub struct Output {
    pub passed: bool,
    pub report: Value,
    pub trace: Vec<Value>,
}

impl Output {
    pub fn new(passed: bool, report: impl Serialize) -> Result<Self, CliError> {
        Ok(Output {
            passed,
            report: serde_json::to_value(report).map_err(|e| CliError::Io(e.to_string()))?,
            trace: Vec::new(),
        })
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    command: &'a str,
    version: &'static str,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<&'a Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<ErrorReport<'a>>,
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    kind: &'a str,
    message: String,
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Prob { .. } => "prob".into(),
        Command::Dist { .. } => "dist".into(),
        Command::Gap(g) => format!("gap {}", g.name()),
        Command::Inverse(_) => "inverse".into(),
        Command::StrongInverse(_) => "strong-inverse".into(),
        Command::Verify(v) => format!("verify {}", v.name()),
        Command::Sweep(_) => "sweep".into(),
        Command::Generate { .. } => "generate".into(),
    }
}

fn write_text(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn write_trace(path: Option<&PathBuf>, trace: &[Value]) -> Result<(), CliError> {
    let Some(path) = path else { return Ok(()) };
    let mut text = String::new();
    for line in trace {
        text.push_str(&serde_json::to_string(line).map_err(|e| CliError::Io(e.to_string()))?);
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let name = command_name(&cli.command);
    let outcome = commands::run(&cli);
    let (envelope_passed, report, error, trace, code) = match &outcome {
        Ok(out) => (out.passed, Some(&out.report), None, out.trace.clone(), u8::from(!out.passed)),
        Err(e) => {
            let trace = match e {
                CliError::Core(lo_core::Error::Divergence { trace, .. })
                | CliError::Core(lo_core::Error::Embed { trace, .. }) => trace
                    .iter()
                    .filter_map(|s| serde_json::to_value(s).ok())
                    .collect(),
                _ => Vec::new(),
            };
            eprintln!("lo: {e}");
            (
                false,
                None,
                Some(ErrorReport {
                    kind: e.kind(),
                    message: e.to_string(),
                }),
                trace,
                e.code(),
            )
        }
    };
    let envelope = Envelope {
        command: &name,
        version: env!("CARGO_PKG_VERSION"),
        passed: envelope_passed,
        report,
        error,
    };
    let written = serde_json::to_string_pretty(&envelope)
        .map_err(|e| CliError::Io(e.to_string()))
        .and_then(|text| write_text(cli.out.as_ref(), &(text + "\n")))
        .and_then(|_| write_trace(cli.trace.as_ref(), &trace));
    if cli.timing {
        eprintln!("{{\"elapsed_ms\":{}}}", start.elapsed().as_millis());
    }
    match written {
        Ok(()) => ExitCode::from(code),
        Err(e) => {
            eprintln!("lo: {e}");
            ExitCode::from(1)
        }
    }
}
