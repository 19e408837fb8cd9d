//! Timing harness: wall-times the counting scan and checks that counts are
//! identical across worker-pool sizes.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Result};
use clap::Args;
use serde::Serialize;
use uplus_core::counting::{count_partition_triples, extremal_family};

use crate::commands::{read_family, FormatArgs};
use crate::{emit, to_json, Verdict};

#[derive(Args)]
pub struct BenchArgs {
    /// Family file to scan; defaults to the --extremal family.
    pub file: Option<PathBuf>,
    /// Extremal family size to generate when no file is given.
    #[arg(long, value_name = "N", default_value_t = 15, conflicts_with = "file")]
    pub extremal: usize,
    /// Timing repetitions per pool size.
    #[arg(long, value_name = "R", default_value_t = 3)]
    pub reps: usize,
    /// Comma-separated worker-pool sizes to compare.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
    pub threads: Vec<usize>,
    #[command(flatten)]
    pub fmt: FormatArgs,
    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Serialize)]
struct BenchRow {
    threads: usize,
    rep: usize,
    triples: String,
    seconds: f64,
    triples_per_second: f64,
}

#[derive(Serialize)]
struct BenchReport {
    family_size: usize,
    universe_size: usize,
    rows: Vec<BenchRow>,
    counts_agree: bool,
}

pub fn run(args: &BenchArgs) -> Result<Verdict> {
    if args.reps == 0 {
        bail!("--reps must be at least 1");
    }
    if args.threads.is_empty() || args.threads.contains(&0) {
        bail!("--threads needs a nonempty list of positive pool sizes");
    }
    let fam = match &args.file {
        Some(path) => read_family(path, &args.fmt.options())?,
        None => extremal_family(args.extremal)?,
    };
    let mut rows = Vec::new();
    let mut counts = Vec::new();
    for &t in &args.threads {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(t).build()?;
        for rep in 0..args.reps {
            let start = Instant::now();
            let report = pool.install(|| count_partition_triples(&fam))?;
            let seconds = start.elapsed().as_secs_f64();
            counts.push(report.triples);
            rows.push(BenchRow {
                threads: t,
                rep,
                triples: report.triples.to_string(),
                seconds,
                triples_per_second: if seconds > 0.0 {
                    report.triples as f64 / seconds
                } else {
                    0.0
                },
            });
        }
    }
    let counts_agree = counts.windows(2).all(|w| w[0] == w[1]);
    let report = BenchReport {
        family_size: fam.len(),
        universe_size: fam.universe_size(),
        rows,
        counts_agree,
    };
    emit(args.output.as_ref(), &to_json(&report)?)?;
    if !counts_agree {
        eprintln!("count mismatch across pool sizes: {counts:?}");
        return Ok(Verdict::Violation);
    }
    Ok(Verdict::Pass)
}
