//! Scalar inequalities: the three-variable boundary form, its log-domain
//! companion, and the elementary gap behind the energy bound.

use rayon::prelude::*;
use serde::Serialize;

use super::exponents::Exponents;
use super::LabError;

/// Absolute slack for assertions of the form `value <= 1`.
pub const ABC_TOL: f64 = 1e-12;
/// Coarsest accepted sweep step.
pub const MAX_STEP: f64 = 1e-2;

fn unit_interval(name: &'static str, v: f64) -> Result<(), LabError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(LabError::Domain {
            name,
            value: v,
            domain: "[0, 1]",
        })
    }
}

fn check_step(step: f64) -> Result<usize, LabError> {
    if step > 0.0 && step <= MAX_STEP {
        Ok((1.0 / step).round() as usize)
    } else {
        Err(LabError::BadStep {
            step,
            max: MAX_STEP,
        })
    }
}

/// `(ab(1-c))^(1/p) + (bc(1-a))^(1/p) + (ca(1-b))^(1/p)` on `[0,1]^3`,
/// `p = log_3(27/4)`. Bounded by 1; equality at the three rotations of
/// `(0,1,1)` and at `(2/3, 2/3, 2/3)`.
pub fn lhs_abc(a: f64, b: f64, c: f64) -> Result<f64, LabError> {
    unit_interval("a", a)?;
    unit_interval("b", b)?;
    unit_interval("c", c)?;
    let e = 1.0 / Exponents::standard().p3;
    Ok((a * b * (1.0 - c)).powf(e)
        + (b * c * (1.0 - a)).powf(e)
        + (c * a * (1.0 - b)).powf(e))
}

/// `f(x) + f(y) + f(z) - p log(x+y+z)` with `f(t) = log(1 + t^p)` and
/// `p = log_3(27/4)`; nonnegative on the positive octant, zero exactly at
/// the symmetric point `x = y = z = 2^(-1/p)`.
pub fn fpx(x: f64, y: f64, z: f64) -> Result<f64, LabError> {
    for (name, v) in [("x", x), ("y", y), ("z", z)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(LabError::Domain {
                name,
                value: v,
                domain: "(0, inf)",
            });
        }
    }
    let p = Exponents::standard().p3;
    let f = |t: f64| t.powf(p).ln_1p();
    Ok(f(x) + f(y) + f(z) - p * (x + y + z).ln())
}

/// `(1+x)^p - (x^p + 4 x^(p/2) + 1)` on `[0,1]` with `p = log_2 6`;
/// nonnegative, vanishing only at the endpoints.
pub fn lemma_elem_gap(x: f64) -> Result<f64, LabError> {
    unit_interval("x", x)?;
    let p = Exponents::standard().p_energy;
    Ok((1.0 + x).powf(p) - (x.powf(p) + 4.0 * x.powf(p / 2.0) + 1.0))
}

/// A point where the three-variable form reaches 1 within [`ABC_TOL`].
#[derive(Debug, Clone, Serialize)]
pub struct EqualityWitness {
    pub point: [f64; 3],
    pub value: f64,
}

/// Maximum over one boundary face, with the open-interior maximum reported
/// separately (equality lives only on face corners).
#[derive(Debug, Clone, Serialize)]
pub struct FaceMax {
    pub axis: usize,
    pub level: f64,
    pub max: f64,
    pub argmax: [f64; 3],
    pub interior_max: f64,
    pub interior_argmax: [f64; 3],
}

/// Result of [`verify_abc`].
#[derive(Debug, Clone, Serialize)]
pub struct AbcSweep {
    /// Realized grid step `1/n`.
    pub step: f64,
    pub max_value: f64,
    pub argmax: [f64; 3],
    pub equality_witnesses: Vec<EqualityWitness>,
    pub faces: Vec<FaceMax>,
    pub holds: bool,
}

/// Sweeps the full grid of pitch `step` over `[0,1]^3`, all six boundary
/// faces, and the known equality points; `holds` asserts the global maximum
/// stays within [`ABC_TOL`] of 1.
pub fn verify_abc(step: f64) -> Result<AbcSweep, LabError> {
    let n = check_step(step)?;
    let e = 1.0 / Exponents::standard().p3;
    let grid = |i: usize| i as f64 / n as f64;
    let pw: Vec<f64> = (0..=n).map(|i| grid(i).powf(e)).collect();
    let qw: Vec<f64> = (0..=n).map(|i| (1.0 - grid(i)).powf(e)).collect();

    // Factored kernel: with t1 = p(a) p(b) and t23 = p(b) q(a) + p(a) q(b),
    // the sum equals t1 q(c) + t23 p(c). Matches lhs_abc to ~1e-14.
    let eval = |ia: usize, ib: usize, ic: usize| {
        let t1 = pw[ia] * pw[ib];
        let t23 = pw[ib] * qw[ia] + pw[ia] * qw[ib];
        t1 * qw[ic] + t23 * pw[ic]
    };

    struct Best {
        value: f64,
        at: (usize, usize, usize),
    }
    let better = |a: &Best, b: &Best| -> bool {
        a.value > b.value || (a.value == b.value && a.at < b.at)
    };

    let best = (0..=n)
        .into_par_iter()
        .map(|ia| {
            let mut local = Best {
                value: f64::NEG_INFINITY,
                at: (usize::MAX, usize::MAX, usize::MAX),
            };
            for ib in 0..=n {
                let t1 = pw[ia] * pw[ib];
                let t23 = pw[ib] * qw[ia] + pw[ia] * qw[ib];
                for ic in 0..=n {
                    let v = t1 * qw[ic] + t23 * pw[ic];
                    if v > local.value {
                        local = Best {
                            value: v,
                            at: (ia, ib, ic),
                        };
                    }
                }
            }
            local
        })
        .reduce(
            || Best {
                value: f64::NEG_INFINITY,
                at: (usize::MAX, usize::MAX, usize::MAX),
            },
            |a, b| if better(&a, &b) { a } else { b },
        );

    let mut faces = Vec::with_capacity(6);
    for axis in 0..3usize {
        for fixed in [0usize, n] {
            let mut max = f64::NEG_INFINITY;
            let mut argmax = (0, 0, 0);
            let mut interior_max = f64::NEG_INFINITY;
            let mut interior_argmax = (0, 0, 0);
            for iu in 0..=n {
                for iv in 0..=n {
                    let at = match axis {
                        0 => (fixed, iu, iv),
                        1 => (iu, fixed, iv),
                        _ => (iu, iv, fixed),
                    };
                    let v = eval(at.0, at.1, at.2);
                    if v > max {
                        max = v;
                        argmax = at;
                    }
                    if iu > 0 && iu < n && iv > 0 && iv < n && v > interior_max {
                        interior_max = v;
                        interior_argmax = at;
                    }
                }
            }
            let coords = |(x, y, z): (usize, usize, usize)| [grid(x), grid(y), grid(z)];
            faces.push(FaceMax {
                axis,
                level: grid(fixed),
                max,
                argmax: coords(argmax),
                interior_max,
                interior_argmax: coords(interior_argmax),
            });
        }
    }

    let third = 2.0 / 3.0;
    let candidates = [
        [0.0, 1.0, 1.0],
        [1.0, 0.0, 1.0],
        [1.0, 1.0, 0.0],
        [third, third, third],
    ];
    let mut equality_witnesses = Vec::new();
    let mut max_value = best.value;
    let mut argmax = [grid(best.at.0), grid(best.at.1), grid(best.at.2)];
    for point in candidates {
        let value = lhs_abc(point[0], point[1], point[2])?;
        if (value - 1.0).abs() <= ABC_TOL {
            equality_witnesses.push(EqualityWitness { point, value });
        }
        if value > max_value {
            max_value = value;
            argmax = point;
        }
    }

    Ok(AbcSweep {
        step: 1.0 / n as f64,
        max_value,
        argmax,
        equality_witnesses,
        faces,
        holds: max_value <= 1.0 + ABC_TOL,
    })
}

/// Result of [`sweep_lemma_gap`].
#[derive(Debug, Clone, Serialize)]
pub struct GapSweep {
    /// Realized grid step `1/n`.
    pub step: f64,
    pub min_gap: f64,
    pub argmin: f64,
    /// Minimum over `[0.01, 0.99]`, away from the two true zeros.
    pub interior_min_gap: f64,
    pub interior_argmin: f64,
    pub holds: bool,
}

/// Sweeps [`lemma_elem_gap`] over `[0,1]`; `holds` asserts nonnegativity
/// within [`ABC_TOL`].
pub fn sweep_lemma_gap(step: f64) -> Result<GapSweep, LabError> {
    let n = check_step(step)?;
    let mut min_gap = f64::INFINITY;
    let mut argmin = 0.0;
    let mut interior_min_gap = f64::INFINITY;
    let mut interior_argmin = 0.0;
    for i in 0..=n {
        let x = i as f64 / n as f64;
        let g = lemma_elem_gap(x)?;
        if g < min_gap {
            min_gap = g;
            argmin = x;
        }
        if (0.01..=0.99).contains(&x) && g < interior_min_gap {
            interior_min_gap = g;
            interior_argmin = x;
        }
    }
    Ok(GapSweep {
        step: 1.0 / n as f64,
        min_gap,
        argmin,
        interior_min_gap,
        interior_argmin,
        holds: min_gap >= -ABC_TOL,
    })
}
