//! The two-parameter stationarity system of the k-fold inequality.
//!
//! For a split `a + b = k` the system in `(u, v)` is
//!
//! ```text
//! u = a - 1 + b v
//! u v^(1-p) = a + (b - 1) v
//! ```
//!
//! with `p = p_k`. Substituting the first equation into the second leaves a
//! one-variable equation `g(v) = 0`; `v = 1` always solves it exactly and
//! corresponds to the symmetric minimum. Each root maps back to a critical
//! point `x = u^(-1/p)`, `z = v x` of the k-term log-domain form, whose
//! value there is the margin.

use serde::Serialize;

use super::exponents::p_k;
use super::roots::{log_grid, refine, scan_roots};
use super::LabError;

/// One solution of the system.
#[derive(Debug, Clone, Serialize)]
pub struct KfoldSolution {
    pub u: f64,
    pub v: f64,
    pub x: f64,
    pub z: f64,
    /// `a f(x) + b f(z) - p log(a x + b z)` with `f(t) = log(1 + t^p)`;
    /// zero at `v = 1`, strictly positive elsewhere.
    pub margin: f64,
    /// Residual of the second system equation.
    pub residual: f64,
}

/// Result of [`solve_kfold_system`].
#[derive(Debug, Clone, Serialize)]
pub struct KfoldSystemReport {
    pub k: usize,
    pub a: usize,
    pub b: usize,
    pub p: f64,
    /// All solutions, ascending in `v`; always contains `v = 1`.
    pub solutions: Vec<KfoldSolution>,
    /// Minimum of `dv/du` along the sampled constraint curve `v(u)`.
    pub min_dv_du: f64,
    /// Minimum of `d2v/du2` along the sampled curve.
    pub min_d2v_du2: f64,
    pub curve_monotone: bool,
    pub curve_convex: bool,
}

pub fn solve_kfold_system(k: usize, a: usize, b: usize) -> Result<KfoldSystemReport, LabError> {
    if !(3..=6).contains(&k) || a < 1 || b < 1 || a + b != k {
        return Err(LabError::BadSystem);
    }
    let p = p_k(k);
    let (af, bf) = (a as f64, b as f64);

    let g = |v: f64| (af - 1.0 + bf * v) * v.powf(1.0 - p) - af - (bf - 1.0) * v;
    let dg = |v: f64| {
        bf * v.powf(1.0 - p) + (af - 1.0 + bf * v) * (1.0 - p) * v.powf(-p) - (bf - 1.0)
    };

    let grid = log_grid(1e-8, 1e8, 960);
    let mut vs = scan_roots(&g, &dg, &grid, "k-fold system")?;
    // The exact root v = 1 may come back as 1 +/- eps from refinement;
    // canonicalize it.
    vs.retain(|&v| (v - 1.0).abs() > 1e-6);
    vs.push(1.0);
    vs.sort_by(f64::total_cmp);

    let f = |t: f64| t.powf(p).ln_1p();
    let solutions: Vec<KfoldSolution> = vs
        .into_iter()
        .map(|v| {
            let u = af - 1.0 + bf * v;
            let x = u.powf(-1.0 / p);
            let z = v * x;
            KfoldSolution {
                u,
                v,
                x,
                z,
                margin: af * f(x) + bf * f(z) - p * (af * x + bf * z).ln(),
                residual: (u * v.powf(1.0 - p) - af - (bf - 1.0) * v).abs(),
            }
        })
        .collect();

    // Diagnostics along the constraint curve v(u) defined by the second
    // equation: c(v; u) is strictly decreasing in v, so v(u) is unique.
    let u_lo = solutions.iter().map(|s| s.u).fold(f64::INFINITY, f64::min) * 0.5;
    let u_hi = solutions.iter().map(|s| s.u).fold(0.0, f64::max) * 2.0;
    let mut min_dv_du = f64::INFINITY;
    let mut min_d2v_du2 = f64::INFINITY;
    for u in log_grid(u_lo, u_hi, 64) {
        let c = move |v: f64| u * v.powf(1.0 - p) - af - (bf - 1.0) * v;
        let dc = move |v: f64| u * (1.0 - p) * v.powf(-p) - (bf - 1.0);
        let v = refine(&c, &dc, 1e-12, 1e12, "k-fold curve")?;
        let denom = (bf - 1.0) * v.powf(p) + (p - 1.0) * u;
        let dv = v / denom;
        let d2v = (p - 1.0) / v.powf(p) * dv * (2.0 - p) * u / denom;
        min_dv_du = min_dv_du.min(dv);
        min_d2v_du2 = min_d2v_du2.min(d2v);
    }

    Ok(KfoldSystemReport {
        k,
        a,
        b,
        p,
        solutions,
        min_dv_du,
        min_d2v_du2,
        curve_monotone: min_dv_du > 0.0,
        curve_convex: min_d2v_du2 > 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_fold_two_one_matches_critical_points() {
        let report = solve_kfold_system(3, 2, 1).unwrap();
        assert_eq!(report.solutions.len(), 2);
        let trivial = report.solutions.iter().find(|s| s.v == 1.0).unwrap();
        assert!(trivial.margin.abs() <= 1e-12);
        let second = report.solutions.iter().find(|s| s.v != 1.0).unwrap();
        assert!((second.u - 10.702970106547756).abs() <= 1e-9);
        assert!((second.v - 9.702970106547756).abs() <= 1e-9);
        assert!((second.margin - 0.04030738915394284).abs() <= 1e-9);
        assert!(second.residual <= 1e-12);
        assert!(report.curve_monotone);
        assert!(report.curve_convex);
    }

    #[test]
    fn three_fold_mirror_split() {
        let report = solve_kfold_system(3, 1, 2).unwrap();
        assert_eq!(report.solutions.len(), 2);
        let second = report.solutions.iter().find(|s| s.v != 1.0).unwrap();
        assert!((second.v - 0.10306122651302205).abs() <= 1e-9);
        assert!((second.u - 0.2061224530260441).abs() <= 1e-9);
        // The mirror split sees the reciprocal ratio.
        assert!((second.v - 1.0 / 9.702970106547756).abs() <= 1e-9);
    }

    #[test]
    fn four_fold_splits() {
        let r13 = solve_kfold_system(4, 1, 3).unwrap();
        let nontrivial: Vec<&KfoldSolution> =
            r13.solutions.iter().filter(|s| s.v != 1.0).collect();
        assert_eq!(nontrivial.len(), 1);
        assert!((nontrivial[0].v - 0.08105517673737033).abs() <= 1e-9);
        assert!((nontrivial[0].margin - 0.06676385403826742).abs() <= 1e-9);

        let r22 = solve_kfold_system(4, 2, 2).unwrap();
        assert_eq!(r22.solutions.len(), 1);
        assert_eq!(r22.solutions[0].v, 1.0);
        assert!(r22.solutions[0].margin.abs() <= 1e-12);

        let r31 = solve_kfold_system(4, 3, 1).unwrap();
        let big: Vec<&KfoldSolution> = r31.solutions.iter().filter(|s| s.v != 1.0).collect();
        assert_eq!(big.len(), 1);
        assert!((big[0].u - 14.337274931126662).abs() <= 1e-9);
        assert!((big[0].margin - 0.06676385403826742).abs() <= 1e-9);
    }

    #[test]
    fn margins_are_nonnegative_for_all_splits() {
        for k in 3..=6usize {
            for a in 1..k {
                let b = k - a;
                let report = solve_kfold_system(k, a, b).unwrap();
                for s in &report.solutions {
                    assert!(s.margin >= -1e-12, "k={k} a={a} v={}", s.v);
                    assert!(s.residual <= 1e-10);
                }
                assert!(report.curve_monotone, "k={k} a={a}");
                assert!(report.curve_convex, "k={k} a={a}");
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(solve_kfold_system(2, 1, 1).is_err());
        assert!(solve_kfold_system(7, 3, 4).is_err());
        assert!(solve_kfold_system(4, 0, 4).is_err());
        assert!(solve_kfold_system(4, 2, 3).is_err());
    }
}
