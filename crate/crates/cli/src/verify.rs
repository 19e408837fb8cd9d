//! The inequality verifiers behind `uplus verify`.

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::Serialize;
use uplus_core::lab::{
    check_po, solve_critical_points, solve_kfold_system, solve_x1, sweep_lemma_gap, verify_abc,
    GapSweep, X1Report,
};
use uplus_core::sample::random_cube_function;

use crate::{emit, to_json, with_pool, Verdict};

const MARGIN_FLOOR: f64 = -1e-12;
const RESIDUAL_CEIL: f64 = 1e-8;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    /// Grid sweep of the three-variable product form over [0,1]^3.
    Abc,
    /// Critical points of the constrained objective and their margins.
    Fpx,
    /// Elementary two-term lemma: gap sweep plus its root structure.
    Elem,
    /// Random trials of the convolution inequality on {0,1}^n, n = 1..4.
    Po,
    /// k-fold critical systems for every split of k = 3..6.
    Kfold,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Which verifier to run.
    #[arg(long, value_enum)]
    pub which: Which,
    /// Grid step for sweeps (default: 1e-3 for abc, 1e-5 for elem).
    #[arg(long, value_name = "S")]
    pub grid_step: Option<f64>,
    /// Restrict kfold to a single k in 3..=6.
    #[arg(long, value_name = "K")]
    pub k: Option<usize>,
    /// RNG seed for the po trials.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Trials per dimension for po.
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Worker-pool size (default: rayon's choice).
    #[arg(long, value_name = "T")]
    pub threads: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

pub fn run(args: &VerifyArgs) -> Result<Verdict> {
    match args.which {
        Which::Abc => abc(args),
        Which::Fpx => fpx(args),
        Which::Elem => elem(args),
        Which::Po => po(args),
        Which::Kfold => kfold(args),
    }
}

fn abc(args: &VerifyArgs) -> Result<Verdict> {
    let step = args.grid_step.unwrap_or(1e-3);
    let sweep = with_pool(args.threads, || verify_abc(step))??;
    let mut verdict = Verdict::Pass;
    if !sweep.holds {
        eprintln!(
            "product form exceeds 1: value {} at ({}, {}, {})",
            sweep.max_value, sweep.argmax[0], sweep.argmax[1], sweep.argmax[2]
        );
        verdict = Verdict::Violation;
    }
    emit(args.output.as_ref(), &to_json(&sweep)?)?;
    Ok(verdict)
}

fn fpx(args: &VerifyArgs) -> Result<Verdict> {
    let report = solve_critical_points()?;
    let mut verdict = Verdict::Pass;
    for point in &report.points {
        if point.margin < MARGIN_FLOOR || point.stationarity_residual > RESIDUAL_CEIL {
            eprintln!(
                "critical point at u = {} fails: margin {}, residual {}",
                point.u, point.margin, point.stationarity_residual
            );
            verdict = Verdict::Violation;
        }
    }
    emit(args.output.as_ref(), &to_json(&report)?)?;
    Ok(verdict)
}

#[derive(Serialize)]
struct ElemReport {
    sweep: GapSweep,
    roots: X1Report,
}

fn elem(args: &VerifyArgs) -> Result<Verdict> {
    let step = args.grid_step.unwrap_or(1e-5);
    let sweep = sweep_lemma_gap(step)?;
    let roots = solve_x1()?;
    let mut verdict = Verdict::Pass;
    if !sweep.holds {
        eprintln!(
            "lemma gap negative: {} at x = {}",
            sweep.min_gap, sweep.argmin
        );
        verdict = Verdict::Violation;
    }
    if roots.inner_residual > RESIDUAL_CEIL {
        eprintln!("root refinement residual too large: {}", roots.inner_residual);
        verdict = Verdict::Violation;
    }
    emit(args.output.as_ref(), &to_json(&ElemReport { sweep, roots })?)?;
    Ok(verdict)
}

#[derive(Serialize)]
struct PoDimSummary {
    dim: usize,
    trials: usize,
    violations: usize,
    /// Largest lhs/rhs ratio seen; at most 1 when the inequality holds.
    worst_ratio: f64,
}

fn po(args: &VerifyArgs) -> Result<Verdict> {
    let mut rng = StdRng::seed_from_u64(args.seed);
    let mut summaries = Vec::new();
    let mut verdict = Verdict::Pass;
    for dim in 1..=4 {
        let mut worst: f64 = 0.0;
        let mut violations = 0;
        for _ in 0..args.trials {
            let f = random_cube_function(&mut rng, dim);
            let g = random_cube_function(&mut rng, dim);
            let h = random_cube_function(&mut rng, dim);
            let check = check_po(&f, &g, &h)?;
            if check.rhs > 0.0 {
                worst = worst.max(check.lhs / check.rhs);
            }
            if !check.holds {
                eprintln!(
                    "convolution inequality violated at dim {dim}: {} > {}",
                    check.lhs, check.rhs
                );
                violations += 1;
                verdict = Verdict::Violation;
            }
        }
        summaries.push(PoDimSummary {
            dim,
            trials: args.trials,
            violations,
            worst_ratio: worst,
        });
    }
    emit(args.output.as_ref(), &to_json(&summaries)?)?;
    Ok(verdict)
}

fn kfold(args: &VerifyArgs) -> Result<Verdict> {
    let ks: Vec<usize> = match args.k {
        Some(k) => vec![k],
        None => (3..=6).collect(),
    };
    let mut reports = Vec::new();
    let mut verdict = Verdict::Pass;
    for k in ks {
        for a in 1..k {
            let report = solve_kfold_system(k, a, k - a)?;
            for sol in &report.solutions {
                if sol.margin < MARGIN_FLOOR || sol.residual > RESIDUAL_CEIL {
                    eprintln!(
                        "k-fold split ({}, {}, {}) fails at v = {}: margin {}, residual {}",
                        k, a, report.b, sol.v, sol.margin, sol.residual
                    );
                    verdict = Verdict::Violation;
                }
            }
            if !report.curve_monotone || !report.curve_convex {
                eprintln!(
                    "k-fold curve shape violated for split ({}, {}, {})",
                    k, a, report.b
                );
                verdict = Verdict::Violation;
            }
            reports.push(report);
        }
    }
    emit(args.output.as_ref(), &to_json(&reports)?)?;
    Ok(verdict)
}
