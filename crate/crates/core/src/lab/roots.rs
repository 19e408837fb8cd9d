//! Root solvers for the stationarity equations of the log-domain form.
//!
//! All solvers follow one recipe: scan a grid for sign changes, bisect the
//! bracket down to relative width ~1e-12, then polish with a few Newton
//! steps and validate the residual.

use serde::Serialize;

use super::exponents::Exponents;
use super::scalar::fpx;
use super::LabError;

/// Residual bound enforced after polishing.
pub const RESIDUAL_TOL: f64 = 1e-12;

pub(super) fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|i| lo * (hi / lo).powf(i as f64 / n as f64))
        .collect()
}

pub(super) fn refine(
    f: &dyn Fn(f64) -> f64,
    df: &dyn Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    what: &'static str,
) -> Result<f64, LabError> {
    let mut flo = f(lo);
    if flo == 0.0 {
        return Ok(lo);
    }
    if f(hi) == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == f(hi).signum() {
        return Err(LabError::Convergence { what });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi.abs().max(1.0) {
            break;
        }
    }
    let width = hi - lo;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..8 {
        let fx = f(x);
        let d = df(x);
        if fx == 0.0 || d == 0.0 {
            break;
        }
        let next = x - fx / d;
        if !next.is_finite() || (next - x).abs() > 4.0 * width.max(f64::EPSILON * x.abs()) {
            break;
        }
        if next == x {
            break;
        }
        x = next;
    }
    if f(x).abs() <= RESIDUAL_TOL {
        Ok(x)
    } else {
        Err(LabError::Convergence { what })
    }
}

/// Roots of `f` located by sign changes along `grid`, refined one by one.
pub(super) fn scan_roots(
    f: &dyn Fn(f64) -> f64,
    df: &dyn Fn(f64) -> f64,
    grid: &[f64],
    what: &'static str,
) -> Result<Vec<f64>, LabError> {
    let mut roots = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &x in grid {
        let fx = f(x);
        if fx == 0.0 {
            roots.push(x);
            prev = None;
            continue;
        }
        if let Some((px, pfx)) = prev {
            if pfx.signum() != fx.signum() {
                roots.push(refine(f, df, px, x, what)?);
            }
        }
        prev = Some((x, fx));
    }
    Ok(roots)
}

/// One critical point of the log-domain form on the diagonal slice
/// `y = x`: the parametrization is `x = u^(-1/p)`, `z = x (u - 1)`.
#[derive(Debug, Clone, Serialize)]
pub struct CriticalPoint {
    pub u: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// `log(1 + t^p)` at each coordinate.
    pub f_x: f64,
    pub f_y: f64,
    pub f_z: f64,
    /// Value of the form at the point: its height above the minimum 0.
    pub margin: f64,
    /// Worst violation of the two stationarity equations
    /// `t + t^(1-p) = x + y + z` at `t = x` and `t = z`.
    pub stationarity_residual: f64,
}

/// Result of [`solve_critical_points`].
#[derive(Debug, Clone, Serialize)]
pub struct CriticalPointReport {
    /// Roots of `u = 1 + (u/2)^(1/(p-1))` in ascending order; the first is
    /// exactly 2.
    pub u_roots: [f64; 2],
    pub points: [CriticalPoint; 2],
}

pub fn solve_critical_points() -> Result<CriticalPointReport, LabError> {
    let p = Exponents::standard().p3;
    let ex = 1.0 / (p - 1.0);
    let g = |u: f64| u - 1.0 - (u / 2.0).powf(ex);
    let dg = |u: f64| 1.0 - ex / 2.0 * (u / 2.0).powf(ex - 1.0);

    // (2/2)^ex is exactly 1, so u = 2 is an exact float root.
    let u1 = 2.0;
    debug_assert_eq!(g(u1), 0.0);

    // g stays positive just past 2 (g'(2) > 0), so scanning from 2.5
    // isolates the second root.
    let grid = log_grid(2.5, 100.0, 120);
    let roots = scan_roots(&g, &dg, &grid, "power equation")?;
    let &u2 = roots.first().ok_or(LabError::Convergence {
        what: "power equation",
    })?;

    let point = |u: f64| -> Result<CriticalPoint, LabError> {
        let x = u.powf(-1.0 / p);
        let y = x;
        let z = x * (u - 1.0);
        let s = x + y + z;
        let f = |t: f64| t.powf(p).ln_1p();
        let rx = (x + x.powf(1.0 - p) - s).abs();
        let rz = (z + z.powf(1.0 - p) - s).abs();
        Ok(CriticalPoint {
            u,
            x,
            y,
            z,
            f_x: f(x),
            f_y: f(y),
            f_z: f(z),
            margin: fpx(x, y, z)?,
            stationarity_residual: rx.max(rz),
        })
    };

    Ok(CriticalPointReport {
        u_roots: [u1, u2],
        points: [point(u1)?, point(u2)?],
    })
}

/// Result of [`solve_x1`]: the roots of
/// `x^(p-1) + 2 x^((p-2)/2) - 2 x^(p/2) = 1` with `p = log_2 6`, plus the
/// concavity certificate that shows these are the only two.
#[derive(Debug, Clone, Serialize)]
pub struct X1Report {
    pub inner_root: f64,
    /// `x = 1` solves exactly.
    pub unit_root: f64,
    pub inner_residual: f64,
    /// `(1+x)^p` at the inner root.
    pub pow_side: f64,
    /// `x^p + 4 x^(p/2) + 1` at the inner root.
    pub sum_side: f64,
    /// Maximum of the closed-form second derivative
    /// `((p-2)/2) x^((p-6)/2) ((2p-2) x^(p/2) + p - 4 - p x)` over the
    /// sampled open interval; negative throughout.
    pub second_derivative_max: f64,
}

pub fn solve_x1() -> Result<X1Report, LabError> {
    let p = Exponents::standard().p_energy;
    let h = |x: f64| {
        x.powf(p - 1.0) + 2.0 * x.powf((p - 2.0) / 2.0) - 2.0 * x.powf(p / 2.0) - 1.0
    };
    let dh = |x: f64| {
        (p - 1.0) * x.powf(p - 2.0) + (p - 2.0) * x.powf((p - 4.0) / 2.0)
            - p * x.powf((p - 2.0) / 2.0)
    };

    let grid = log_grid(1e-3, 0.9, 200);
    let roots = scan_roots(&h, &dh, &grid, "x1 equation")?;
    let &inner_root = roots.first().ok_or(LabError::Convergence {
        what: "x1 equation",
    })?;
    let unit_root = 1.0;
    debug_assert_eq!(h(unit_root), 0.0);

    let s = |x: f64| {
        (p - 2.0) / 2.0
            * x.powf((p - 6.0) / 2.0)
            * ((2.0 * p - 2.0) * x.powf(p / 2.0) + p - 4.0 - p * x)
    };
    let second_derivative_max = (1..1000)
        .map(|i| s(i as f64 / 1000.0))
        .fold(f64::NEG_INFINITY, f64::max);

    let x = inner_root;
    Ok(X1Report {
        inner_root,
        unit_root,
        inner_residual: h(x).abs(),
        pow_side: (1.0 + x).powf(p),
        sum_side: x.powf(p) + 4.0 * x.powf(p / 2.0) + 1.0,
        second_derivative_max,
    })
}
