//! Deterministic TSV samples of the four displayed functions.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{ensure, Result};
use clap::{Args, ValueEnum};
use uplus_core::lab::{fpx, Exponents};

use crate::{emit, Verdict};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    /// Constrained objective along y = x, z = x^(1-p) - x on (0, 1).
    Wave,
    /// u against 1 + (u/2)^(1/(p-1)) on [2, 12]; the curves cross at the
    /// two critical values of u.
    Power,
    /// (x^p + 4 x^(p/2) + 1) / (1 + x)^p on [0, 1] with p = log2 6.
    Energy,
    /// x^(p-1) + 2 x^((p-2)/2) - 2 x^(p/2) on [0, 1] with p = log2 6.
    Energy2,
}

impl FigureId {
    fn name(self) -> &'static str {
        match self {
            FigureId::Wave => "wave",
            FigureId::Power => "power",
            FigureId::Energy => "energy",
            FigureId::Energy2 => "energy2",
        }
    }
}

#[derive(Args)]
pub struct FigureArgs {
    /// Which figure's data to emit.
    #[arg(long, value_enum)]
    pub id: FigureId,
    /// Sample step (default: 1e-3; 1e-2 for power).
    #[arg(long, value_name = "S")]
    pub step: Option<f64>,
    /// Write the TSV here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

/// Inclusive grid over [lo, hi]; the final abscissa is clamped to `hi` so
/// float rounding in `i * step` cannot drop the endpoint.
fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as u64;
    (0..=n)
        .map(|i| {
            let x = lo + i as f64 * step;
            if (x - hi).abs() < step * 1e-6 {
                hi
            } else {
                x
            }
        })
        .filter(|&x| x <= hi)
        .collect()
}

pub fn run(args: &FigureArgs) -> Result<Verdict> {
    let step = args.step.unwrap_or(match args.id {
        FigureId::Power => 1e-2,
        _ => 1e-3,
    });
    ensure!(step.is_finite() && step > 0.0, "step must be positive");
    let mut text = format!("# figure {} step {}\n", args.id.name(), step);
    match args.id {
        FigureId::Wave => {
            let p = Exponents::standard().p3;
            let mut i = 1u64;
            loop {
                let x = i as f64 * step;
                if x >= 1.0 {
                    break;
                }
                let z = x.powf(1.0 - p) - x;
                if z > 0.0 {
                    writeln!(text, "{:.12e}\t{:.12e}", x, fpx(x, x, z)?)?;
                }
                i += 1;
            }
        }
        FigureId::Power => {
            let p = Exponents::standard().p3;
            for u in grid(2.0, 12.0, step) {
                let curve = 1.0 + (u / 2.0).powf(1.0 / (p - 1.0));
                writeln!(text, "{:.12e}\t{:.12e}\t{:.12e}", u, u, curve)?;
            }
        }
        FigureId::Energy => {
            let p = Exponents::standard().p_energy;
            for x in grid(0.0, 1.0, step) {
                let value = (x.powf(p) + 4.0 * x.powf(p / 2.0) + 1.0) / (1.0 + x).powf(p);
                writeln!(text, "{:.12e}\t{:.12e}", x, value)?;
            }
        }
        FigureId::Energy2 => {
            let p = Exponents::standard().p_energy;
            for x in grid(0.0, 1.0, step) {
                let value =
                    x.powf(p - 1.0) + 2.0 * x.powf((p - 2.0) / 2.0) - 2.0 * x.powf(p / 2.0);
                writeln!(text, "{:.12e}\t{:.12e}", x, value)?;
            }
        }
    }
    emit(args.output.as_ref(), &text)?;
    Ok(Verdict::Pass)
}
