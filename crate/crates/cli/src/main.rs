//! Command-line front end: exact counts of partition structure in set
//! families and additive energy on the cube, inequality verifiers, figure
//! data, and a small timing harness.
//!
//! Exit codes: 0 on success, 1 when an asserted bound fails (a witness goes
//! to stderr), 2 on input errors.

mod bench;
mod commands;
mod figures;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "uplus",
    version,
    about = "Exact partition-structure counts and sharp-bound verification"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Count ordered partition triples (or k-fold tuples) in a set family.
    Count(commands::CountArgs),
    /// Additive energy of a subset of {0,1}^n.
    Energy(commands::EnergyArgs),
    /// Run an inequality verifier; violations exit 1 with a witness.
    Verify(verify::VerifyArgs),
    /// Emit the extremal family on n cells (all n/3- and 2n/3-subsets).
    Extremal(commands::ExtremalArgs),
    /// Emit figure data as TSV.
    Figures(figures::FigureArgs),
    /// Time the counting scan and check determinism across pool sizes.
    Bench(bench::BenchArgs),
}

/// Outcome of a subcommand whose inputs were valid.
#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Verdict {
    Pass,
    /// An asserted bound failed; a witness was printed to stderr.
    Violation,
}

pub(crate) fn emit(output: Option<&PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| anyhow::anyhow!("writing {}: {e}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

pub(crate) fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

/// Runs `f` on a dedicated rayon pool of the requested size, or inline on
/// the global pool when no size is given.
pub(crate) fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(t).build()?;
            Ok(pool.install(f))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Count(args) => commands::count(&args),
        Cmd::Energy(args) => commands::energy(&args),
        Cmd::Verify(args) => verify::run(&args),
        Cmd::Extremal(args) => commands::extremal(&args),
        Cmd::Figures(args) => figures::run(&args),
        Cmd::Bench(args) => bench::run(&args),
    };
    match result {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Violation) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
