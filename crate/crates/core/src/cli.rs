//! Command-line front end.
//!
//! Every command prints one JSON document on standard output. Exit codes:
//! 0 success, 2 parse or validation error, 3 size or enumeration budget
//! exceeded, 4 internal invariant violation.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::attack::{self, AttackOptions, DEFAULT_ENUMERATION_BUDGET};
use crate::error::{Error, Result};
use crate::maxflow::max_flow;
use crate::model::{self, ObjectiveMode, SolveOptions, DEFAULT_MAX_VARS};
use crate::network::{ArcSet, Flow, InputFormat, Network};
use crate::rational::Rational;
use crate::report::{self, Timings};

#[derive(Debug, Parser)]
#[command(name = "kamrfp", version, about = "Maximum flows robust to k destroyed arcs with adaptive rerouting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Dimacs,
    Json,
}

impl From<FormatArg> for InputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Dimacs => InputFormat::Dimacs,
            FormatArg::Json => InputFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    TwoPhase,
    Combined,
}

impl From<ModeArg> for ObjectiveMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::TwoPhase => ObjectiveMode::TwoPhase,
            ModeArg::Combined => ObjectiveMode::Combined,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a maximum flow with the smallest worst-case loss under k arc deletions.
    Solve {
        #[arg(short)]
        k: usize,
        #[arg(long, value_enum, default_value = "two-phase")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "dimacs")]
        format: FormatArg,
        /// Skip the exhaustive attack; the report then says certified = false.
        #[arg(long)]
        no_certify: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_VARS)]
        max_vars: usize,
        /// Largest number of k-subsets enumerated during certification.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
        budget: u64,
        /// Add decimal approximations next to the exact values.
        #[arg(long)]
        float: bool,
        /// Write the model in text form to this path.
        #[arg(long)]
        export_lp: Option<PathBuf>,
        /// Network file, or `-` for standard input.
        file: PathBuf,
    },
    /// Evaluate the worst k-arc attack against a given flow.
    Attack {
        #[arg(short)]
        k: usize,
        /// Flow file with `f <arc> <value>` lines.
        #[arg(long)]
        flow: PathBuf,
        #[arg(long, value_enum, default_value = "dimacs")]
        format: FormatArg,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
        budget: u64,
        #[arg(long)]
        float: bool,
        file: PathBuf,
    },
    /// Bisection estimate of the least possible largest arc flow over maximum flows.
    #[command(name = "oracle-k1")]
    OracleK1 {
        /// Bisection tolerance as an exact rational.
        #[arg(long, default_value = "1/1000000")]
        tol: String,
        #[arg(long, value_enum, default_value = "dimacs")]
        format: FormatArg,
        #[arg(long)]
        float: bool,
        file: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Solve { .. } => "solve",
            Command::Attack { .. } => "attack",
            Command::OracleK1 { .. } => "oracle-k1",
        }
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)
            .map_err(|e| Error::invalid(format!("reading standard input: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Error::invalid(format!("reading {}: {e}", path.display())))
}

fn load(path: &Path, format: FormatArg, timings: &mut Timings) -> Result<Network> {
    let t = Instant::now();
    let net = Network::parse(&read_input(path)?, format.into())?;
    timings.push("parse", t.elapsed());
    Ok(net)
}

/// Output of one CLI invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the CLI on `args` (program name first) without touching the process.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { exit_code: 0, stdout: text, stderr: String::new() }
            } else {
                let doc = report::error_report("", 2, text.lines().next().unwrap_or("usage error"));
                Outcome { exit_code: 2, stdout: format!("{doc}\n"), stderr: text }
            };
        }
    };
    let name = cli.command.name();
    match execute(cli.command) {
        Ok(doc) => Outcome {
            exit_code: 0,
            stdout: format!("{}\n", serde_json::to_string_pretty(&doc).expect("report serializes")),
            stderr: String::new(),
        },
        Err(e) => {
            let code = e.exit_code();
            let doc = report::error_report(name, code, &e.to_string());
            Outcome { exit_code: code, stdout: format!("{doc}\n"), stderr: format!("kamrfp {name}: {e}\n") }
        }
    }
}

fn execute(command: Command) -> Result<serde_json::Value> {
    let mut timings = Timings::default();
    match command {
        Command::Solve { k, mode, format, no_certify, max_vars, budget, float, export_lp, file } => {
            let net = load(&file, format, &mut timings)?;
            if let Some(path) = export_lp {
                let fstar = max_flow(&net, None, &ArcSet::new()).value;
                let (lp, _) = model::build_model(&net, k, mode.into(), Some(&fstar), max_vars)?;
                std::fs::write(&path, lp.to_text())
                    .map_err(|e| Error::invalid(format!("writing {}: {e}", path.display())))?;
            }
            let options = SolveOptions {
                mode: mode.into(),
                certify: !no_certify,
                max_vars,
                attack: AttackOptions { budget, parallel: true },
                ..Default::default()
            };
            let sol = model::solve_kamrfp(&net, k, &options)?;
            timings.push("fstar", sol.timings.fstar);
            timings.push("build", sol.timings.build);
            timings.push("solve", sol.timings.solve);
            timings.push("certify", sol.timings.certify);
            Ok(report::solve_report(&net, k, &sol, &timings, float))
        }
        Command::Attack { k, flow, format, budget, float, file } => {
            let net = load(&file, format, &mut timings)?;
            let phi = Flow::parse(&read_input(&flow)?, &net)?;
            let t = Instant::now();
            let rep = attack::worst_case_with(&net, &phi, k, &AttackOptions { budget, parallel: true })?;
            timings.push("attack", t.elapsed());
            Ok(report::attack_report(&net, k, &rep, &timings, float))
        }
        Command::OracleK1 { tol, format, float, file } => {
            let tolerance: Rational =
                tol.parse().map_err(|_| Error::invalid(format!("bad tolerance {tol:?}")))?;
            if !tolerance.is_positive() {
                return Err(Error::invalid("tolerance must be positive"));
            }
            let net = load(&file, format, &mut timings)?;
            let t = Instant::now();
            let fstar = max_flow(&net, None, &ArcSet::new()).value;
            timings.push("fstar", t.elapsed());
            let lambda = if fstar.is_zero() {
                None
            } else {
                let t = Instant::now();
                let l = attack::k1_bisection_oracle(&net, &tolerance);
                timings.push("bisection", t.elapsed());
                Some(l)
            };
            Ok(report::oracle_report(&net, &fstar, lambda.as_ref(), &tolerance, &timings, float))
        }
    }
}
