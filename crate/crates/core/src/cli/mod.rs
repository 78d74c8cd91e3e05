//! Batch driver: `euler-relax <command> --config <path> [--seed N] [--out <dir>]`.
//!
//! Each command reads a JSON scenario, runs the checks and writes
//! `report.json`, CSV artifacts and `timings.json` into the output directory.
//! Exit codes: 0 all checks pass, 1 some check failed, 2 configuration error,
//! 3 precondition error.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::error::{Error, Result};
use crate::report::{to_stable_json, Report};

pub use commands::{execute, Artifact, Outcome};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "euler-relax", version, about = "Relaxed Euler verification toolkit")]
struct Cli {
    #[command(subcommand)]
    command: CommandLine,
}

#[derive(Debug, Subcommand)]
enum CommandLine {
    /// Rank, exactness and homogeneity sweep of the symbols over the sphere.
    Symbols(CommonArgs),
    /// Potential solve of a field with residuals and norm diagnostics.
    Solve(CommonArgs),
    /// Shear-flow pair: relaxed and nonlinear residuals, wave cone, potential.
    Shear(CommonArgs),
    /// Laminate convergence and Jensen witness checks.
    Laminate(CommonArgs),
    /// Slice-continuity audits of polytopes.
    Hausdorff(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Symbols,
    Solve,
    Shear,
    Laminate,
    Hausdorff,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Symbols => "symbols",
            Command::Solve => "solve",
            Command::Shear => "shear",
            Command::Laminate => "laminate",
            Command::Hausdorff => "hausdorff",
        }
    }
}

/// Exit code for an error raised while running a command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Json(_) | Error::Io(_) | Error::Format(_) | Error::Argument(_) => {
            EXIT_CONFIG
        }
        Error::Domain(_)
        | Error::MeanNotZero { .. }
        | Error::Precondition(_)
        | Error::NotWaveCone { .. }
        | Error::EmptySlice { .. }
        | Error::Infeasible(_)
        | Error::DerivativeBound { .. }
        | Error::NotCompactlySupported { .. } => EXIT_PRECONDITION,
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
        }
    };
    let (command, a) = match cli.command {
        CommandLine::Symbols(a) => (Command::Symbols, a),
        CommandLine::Solve(a) => (Command::Solve, a),
        CommandLine::Shear(a) => (Command::Shear, a),
        CommandLine::Laminate(a) => (Command::Laminate, a),
        CommandLine::Hausdorff(a) => (Command::Hausdorff, a),
    };
    match run_file(command, &a.config, a.seed, &a.out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs a command on a config file and writes its outputs into `out`.
pub fn run_file(command: Command, config: &Path, seed: u64, out: &Path) -> Result<i32> {
    let text = fs::read_to_string(config)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", config.display())))?;
    let base = config.parent().unwrap_or(Path::new("."));
    let start = Instant::now();
    let result = execute(command, &text, base, seed);
    let elapsed = start.elapsed().as_secs_f64();
    let code = match &result {
        Ok(o) if o.report.all_pass() => EXIT_PASS,
        Ok(_) => EXIT_CHECK_FAILED,
        Err(e) => exit_code(e),
    };
    if code == EXIT_CONFIG {
        return result.map(|_| code);
    }
    fs::create_dir_all(out)?;
    let report = match result {
        Ok(o) => {
            for a in &o.artifacts {
                fs::write(out.join(&a.name), &a.bytes)?;
            }
            o.report
        }
        Err(e) => {
            eprintln!("error: {e}");
            let mut r = Report::new(command.name());
            r.insert("error", json!(e.to_string()));
            r.push(crate::report::Check::at_most("precondition", 1.0, 0.0).with_detail(e.to_string()));
            r
        }
    };
    fs::write(out.join("report.json"), report.to_json())?;
    let timings = json!({ "command": command.name(), "wall_seconds": elapsed });
    fs::write(out.join("timings.json"), to_stable_json(&timings))?;
    for c in &report.checks {
        println!(
            "{} {} value={:.6e} threshold={:.6e}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.threshold
        );
    }
    Ok(code)
}
