//! Dense functions on `{0,1}^n` and the discrete convolution inequality.
//!
//! `conv3(f, g, h, w)` sums `f(x) g(y) h(z)` over all splittings
//! `x + y + z = w` of the target vector with componentwise integer sums.
//! Enumeration is sequential over ordered pairs `(x, y)` so float results
//! are reproducible; cube dimensions are capped to keep that affordable.

use serde::Serialize;

use super::exponents::Exponents;
use super::LabError;

/// Dimension cap for [`conv3`]; the pair scan is `4^dim`.
pub const CONV_DIM_CAP: usize = 12;
/// Dimension cap for [`l2_conv_check`]; its table has `3^dim` cells.
pub const L2_DIM_CAP: usize = 10;
/// Dense storage cap for [`CubeFunction`].
pub const FUNC_DIM_CAP: usize = 26;

/// Relative slack for float comparisons between two `f64` pipelines.
pub const PO_REL_SLACK: f64 = 1e-12;

/// A dense function on `{0,1}^dim`, indexed by point mask.
#[derive(Clone, Debug, PartialEq)]
pub struct CubeFunction {
    dim: usize,
    values: Vec<f64>,
}

impl CubeFunction {
    pub fn new(dim: usize, values: Vec<f64>) -> Result<Self, LabError> {
        if dim > FUNC_DIM_CAP {
            return Err(LabError::Guard {
                op: "cube function",
                dim,
                cap: FUNC_DIM_CAP,
            });
        }
        if values.len() != 1 << dim {
            return Err(LabError::DimMismatch {
                expected: 1 << dim,
                got: values.len(),
            });
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(LabError::NonFinite);
        }
        Ok(CubeFunction { dim, values })
    }

    pub fn from_fn(dim: usize, f: impl FnMut(u64) -> f64) -> Result<Self, LabError> {
        if dim > FUNC_DIM_CAP {
            return Err(LabError::Guard {
                op: "cube function",
                dim,
                cap: FUNC_DIM_CAP,
            });
        }
        let values = (0..1u64 << dim).map(f).collect();
        CubeFunction::new(dim, values)
    }

    pub fn constant(dim: usize, v: f64) -> Result<Self, LabError> {
        CubeFunction::from_fn(dim, |_| v)
    }

    /// The 0/1 indicator of a point set.
    pub fn indicator(dim: usize, points: impl IntoIterator<Item = u64>) -> Result<Self, LabError> {
        let mut f = CubeFunction::constant(dim, 0.0)?;
        for p in points {
            if dim < 64 && p >> dim != 0 {
                return Err(LabError::Domain {
                    name: "point",
                    value: p as f64,
                    domain: "0..2^dim",
                });
            }
            f.values[p as usize] = 1.0;
        }
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, x: u64) -> f64 {
        self.values[x as usize]
    }

    pub fn abs(&self) -> CubeFunction {
        CubeFunction {
            dim: self.dim,
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }

    /// `(sum |f(x)|^p)^(1/p)` for `p > 0`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let sum: f64 = self.values.iter().map(|v| v.abs().powf(p)).sum();
        sum.powf(1.0 / p)
    }

    /// Tensor product: `(f ⊗ g)(x, y) = f(x) g(y)` with `g`'s coordinates
    /// in the low bits.
    pub fn tensor(&self, other: &CubeFunction) -> Result<CubeFunction, LabError> {
        let dim = self.dim + other.dim;
        if dim > FUNC_DIM_CAP {
            return Err(LabError::Guard {
                op: "tensor product",
                dim,
                cap: FUNC_DIM_CAP,
            });
        }
        let mut values = Vec::with_capacity(1 << dim);
        for &a in &self.values {
            for &b in &other.values {
                values.push(a * b);
            }
        }
        CubeFunction::new(dim, values)
    }
}

fn check_dims(f: &CubeFunction, g: &CubeFunction, h: &CubeFunction) -> Result<usize, LabError> {
    for other in [g, h] {
        if other.dim != f.dim {
            return Err(LabError::DimMismatch {
                expected: f.dim,
                got: other.dim,
            });
        }
    }
    Ok(f.dim)
}

/// Triple convolution evaluated at the target vector `w`:
/// `sum f(x) g(y) h(z)` over `x + y + z = w` componentwise.
pub fn conv3(
    f: &CubeFunction,
    g: &CubeFunction,
    h: &CubeFunction,
    w: &[u8],
) -> Result<f64, LabError> {
    let dim = check_dims(f, g, h)?;
    if dim > CONV_DIM_CAP {
        return Err(LabError::Guard {
            op: "conv3",
            dim,
            cap: CONV_DIM_CAP,
        });
    }
    if w.len() != dim {
        return Err(LabError::DimMismatch {
            expected: dim,
            got: w.len(),
        });
    }
    if w.iter().any(|&c| c > 3) {
        return Err(LabError::BadTarget);
    }

    let n = 1u64 << dim;
    let mut total = 0.0;
    if w.iter().all(|&c| c == 1) {
        // All-ones target: x, y, z partition the coordinates, so z is the
        // complement of x | y whenever x and y are disjoint.
        let mask = n - 1;
        for x in 0..n {
            let fx = f.value(x);
            if fx == 0.0 {
                continue;
            }
            for y in 0..n {
                if x & y != 0 {
                    continue;
                }
                total += fx * g.value(y) * h.value(!(x | y) & mask);
            }
        }
        return Ok(total);
    }

    for x in 0..n {
        let fx = f.value(x);
        if fx == 0.0 {
            continue;
        }
        for y in 0..n {
            let gy = g.value(y);
            if gy == 0.0 {
                continue;
            }
            let mut z = 0u64;
            let mut ok = true;
            for (i, &wi) in w.iter().enumerate() {
                let need = i64::from(wi) - (x >> i & 1) as i64 - (y >> i & 1) as i64;
                match need {
                    0 => {}
                    1 => z |= 1 << i,
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                total += fx * gy * h.value(z);
            }
        }
    }
    Ok(total)
}

/// [`conv3`] at the all-ones target.
pub fn conv3_at_ones(
    f: &CubeFunction,
    g: &CubeFunction,
    h: &CubeFunction,
) -> Result<f64, LabError> {
    let dim = check_dims(f, g, h)?;
    conv3(f, g, h, &vec![1; dim])
}

/// Both sides of the convolution inequality at the all-ones target,
/// applied to `|f|, |g|, |h|`: `conv3 <= ||f||_p ||g||_p ||h||_p` with
/// `p = log_3(27/4)`.
#[derive(Debug, Clone, Serialize)]
pub struct PoCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn check_po(
    f: &CubeFunction,
    g: &CubeFunction,
    h: &CubeFunction,
) -> Result<PoCheck, LabError> {
    let (fa, ga, ha) = (f.abs(), g.abs(), h.abs());
    let lhs = conv3_at_ones(&fa, &ga, &ha)?;
    let p = Exponents::standard().p3;
    let rhs = fa.lp_norm(p) * ga.lp_norm(p) * ha.lp_norm(p);
    Ok(PoCheck {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + PO_REL_SLACK),
    })
}

/// Multiplicativity of both sides under tensor products.
#[derive(Debug, Clone, Serialize)]
pub struct TensorCheck {
    pub conv_tensor: f64,
    pub conv_factored: f64,
    pub norms_tensor: [f64; 3],
    pub norms_factored: [f64; 3],
    pub holds: bool,
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

pub fn tensor_check(
    f1: &CubeFunction,
    g1: &CubeFunction,
    h1: &CubeFunction,
    f2: &CubeFunction,
    g2: &CubeFunction,
    h2: &CubeFunction,
) -> Result<TensorCheck, LabError> {
    check_dims(f1, g1, h1)?;
    check_dims(f2, g2, h2)?;
    let conv_factored = conv3_at_ones(f1, g1, h1)? * conv3_at_ones(f2, g2, h2)?;
    let conv_tensor = conv3_at_ones(&f1.tensor(f2)?, &g1.tensor(g2)?, &h1.tensor(h2)?)?;
    let p = Exponents::standard().p3;
    let norms_factored = [
        f1.lp_norm(p) * f2.lp_norm(p),
        g1.lp_norm(p) * g2.lp_norm(p),
        h1.lp_norm(p) * h2.lp_norm(p),
    ];
    let norms_tensor = [
        f1.tensor(f2)?.lp_norm(p),
        g1.tensor(g2)?.lp_norm(p),
        h1.tensor(h2)?.lp_norm(p),
    ];
    let holds = rel_close(conv_tensor, conv_factored, PO_REL_SLACK)
        && norms_tensor
            .iter()
            .zip(&norms_factored)
            .all(|(&a, &b)| rel_close(a, b, PO_REL_SLACK));
    Ok(TensorCheck {
        conv_tensor,
        conv_factored,
        norms_tensor,
        norms_factored,
        holds,
    })
}

/// Both sides of `||f * f||_2 <= ||f||_{4/p}^2` with `p = log_2 6`; the
/// convolution square lives on `{0,1,2}^dim`.
#[derive(Debug, Clone, Serialize)]
pub struct L2ConvCheck {
    pub lhs: f64,
    /// `lhs^2` before the square root; for 0/1 indicators this is the
    /// additive energy, exactly representable while it fits in 53 bits.
    pub lhs_squared: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn l2_conv_check(f: &CubeFunction) -> Result<L2ConvCheck, LabError> {
    let dim = f.dim;
    if dim > L2_DIM_CAP {
        return Err(LabError::Guard {
            op: "l2_conv_check",
            dim,
            cap: L2_DIM_CAP,
        });
    }
    // Base-3 index of the componentwise sum: position i contributes
    // (x_i + y_i) * 3^i, which splits as c[x] + c[y].
    let mut pow3 = vec![0u64; dim];
    let mut t = 1u64;
    for p in pow3.iter_mut() {
        *p = t;
        t *= 3;
    }
    let cells = t as usize;
    let contrib: Vec<u64> = (0..1u64 << dim)
        .map(|x| (0..dim).filter(|&i| x >> i & 1 == 1).map(|i| pow3[i]).sum())
        .collect();
    let mut conv = vec![0.0f64; cells];
    for (x, &fx) in f.values.iter().enumerate() {
        if fx == 0.0 {
            continue;
        }
        for (y, &fy) in f.values.iter().enumerate() {
            conv[(contrib[x] + contrib[y]) as usize] += fx * fy;
        }
    }
    let lhs_squared: f64 = conv.iter().map(|v| v * v).sum();
    let lhs = lhs_squared.sqrt();
    let q = 4.0 / Exponents::standard().p_energy;
    let norm = f.lp_norm(q);
    let rhs = norm * norm;
    Ok(L2ConvCheck {
        lhs,
        lhs_squared,
        rhs,
        holds: lhs <= rhs * (1.0 + PO_REL_SLACK),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conv3_dimension_zero() {
        let f = CubeFunction::constant(0, 2.0).unwrap();
        let g = CubeFunction::constant(0, 3.0).unwrap();
        let h = CubeFunction::constant(0, 5.0).unwrap();
        // Only x = y = z = the empty vector; target is the empty vector.
        assert_eq!(conv3(&f, &g, &h, &[]).unwrap(), 30.0);
    }

    #[test]
    fn conv3_counts_partitions_for_constants() {
        // With f = g = h = 1 the all-ones convolution counts the ordered
        // 2-colorings-with-rest: 3^dim.
        for dim in 0..=5usize {
            let one = CubeFunction::constant(dim, 1.0).unwrap();
            let got = conv3_at_ones(&one, &one, &one).unwrap();
            assert_eq!(got, 3f64.powi(dim as i32), "dim = {dim}");
        }
    }

    #[test]
    fn conv3_general_target_matches_brute_force() {
        let dim = 3;
        let f = CubeFunction::from_fn(dim, |x| (x as f64).sin().abs() + 0.1).unwrap();
        let g = CubeFunction::from_fn(dim, |x| ((x * x) as f64).cos().abs()).unwrap();
        let h = CubeFunction::from_fn(dim, |x| 1.0 / (x as f64 + 1.0)).unwrap();
        for w in [[1u8, 1, 1], [0, 1, 2], [2, 2, 2], [3, 0, 1]] {
            let mut expected = 0.0;
            for x in 0..8u64 {
                for y in 0..8u64 {
                    for z in 0..8u64 {
                        let ok = (0..dim).all(|i| {
                            (x >> i & 1) + (y >> i & 1) + (z >> i & 1) == u64::from(w[i])
                        });
                        if ok {
                            expected += f.value(x) * g.value(y) * h.value(z);
                        }
                    }
                }
            }
            let got = conv3(&f, &g, &h, &w).unwrap();
            assert!((got - expected).abs() <= 1e-12 * expected.max(1.0), "w = {w:?}");
        }
    }

    #[test]
    fn check_po_on_indicators() {
        // f = g = indicator of {∅, {0}, {1}}, h = full: lhs counts pairs.
        let f = CubeFunction::indicator(2, [0b00u64, 0b01, 0b10]).unwrap();
        let h = CubeFunction::constant(2, 1.0).unwrap();
        let check = check_po(&f, &f, &h).unwrap();
        assert!(check.holds);
        assert!(check.lhs > 0.0);
    }

    #[test]
    fn check_po_equality_family() {
        // The one-coordinate equality profile lifted by tensor power:
        // f = g = h = (a^(1/p), (1-a)^(1/p)) at a = 2/3 gives lhs = rhs = 1
        // in every dimension.
        let e = Exponents::standard();
        let a: f64 = 2.0 / 3.0;
        let base = CubeFunction::new(
            1,
            vec![a.powf(1.0 / e.p3), (1.0 - a).powf(1.0 / e.p3)],
        )
        .unwrap();
        let mut f = base.clone();
        for _ in 0..3 {
            let check = check_po(&f, &f, &f).unwrap();
            assert!(check.holds);
            assert!((check.lhs - check.rhs).abs() <= 1e-12 * check.rhs);
            assert!((check.rhs - 1.0).abs() <= 1e-12);
            f = f.tensor(&base).unwrap();
        }
    }

    #[test]
    fn check_po_uses_absolute_values() {
        let f = CubeFunction::new(1, vec![-1.0, 0.5]).unwrap();
        let check = check_po(&f, &f, &f).unwrap();
        assert!(check.holds);
        assert!(check.lhs >= 0.0);
    }

    #[test]
    fn tensor_multiplicativity() {
        let f1 = CubeFunction::from_fn(2, |x| 0.3 + (x as f64) * 0.17).unwrap();
        let g1 = CubeFunction::from_fn(2, |x| 1.0 / (1.0 + x as f64)).unwrap();
        let h1 = CubeFunction::from_fn(2, |x| ((x ^ 3) as f64).sqrt()).unwrap();
        let f2 = CubeFunction::from_fn(3, |x| 0.9 - (x as f64) * 0.05).unwrap();
        let g2 = CubeFunction::from_fn(3, |x| ((x % 3) as f64) + 0.2).unwrap();
        let h2 = CubeFunction::from_fn(3, |x| 0.4 + ((x & 1) as f64)).unwrap();
        let check = tensor_check(&f1, &g1, &h1, &f2, &g2, &h2).unwrap();
        assert!(check.holds, "{check:?}");
    }

    #[test]
    fn l2_conv_on_full_cube() {
        // For the indicator of the whole cube the convolution square has
        // value binom(2, s_i) per coordinate; lhs^2 = 6^dim.
        for dim in 0..=4usize {
            let f = CubeFunction::constant(dim, 1.0).unwrap();
            let check = l2_conv_check(&f).unwrap();
            assert_eq!(check.lhs_squared, 6f64.powi(dim as i32), "dim = {dim}");
            assert!(check.holds);
            // Full cubes meet the bound with equality.
            assert!((check.lhs - check.rhs).abs() <= 1e-12 * check.rhs);
        }
    }

    #[test]
    fn l2_conv_strict_for_non_subcube() {
        let f = CubeFunction::indicator(2, [0b00u64, 0b01, 0b10]).unwrap();
        let check = l2_conv_check(&f).unwrap();
        assert_eq!(check.lhs_squared, 15.0);
        assert!(check.holds);
        assert!(check.lhs < check.rhs);
    }

    #[test]
    fn norms_and_tensor_shapes() {
        let f = CubeFunction::new(1, vec![3.0, 4.0]).unwrap();
        assert!((f.lp_norm(2.0) - 5.0).abs() < 1e-15);
        let t = f.tensor(&f).unwrap();
        assert_eq!(t.dim(), 2);
        assert_eq!(t.values(), &[9.0, 12.0, 12.0, 16.0]);
    }

    #[test]
    fn guards_and_errors() {
        assert!(matches!(
            CubeFunction::new(2, vec![1.0; 3]),
            Err(LabError::DimMismatch { .. })
        ));
        assert!(matches!(
            CubeFunction::new(1, vec![f64::NAN, 0.0]),
            Err(LabError::NonFinite)
        ));
        let f = CubeFunction::constant(1, 1.0).unwrap();
        let g = CubeFunction::constant(2, 1.0).unwrap();
        assert!(matches!(
            conv3_at_ones(&f, &f, &g),
            Err(LabError::DimMismatch { .. })
        ));
        assert!(matches!(
            conv3(&f, &f, &f, &[4]),
            Err(LabError::BadTarget)
        ));
        let big = CubeFunction::constant(13, 1.0).unwrap();
        assert!(matches!(
            conv3_at_ones(&big, &big, &big),
            Err(LabError::Guard { .. })
        ));
        let wide = CubeFunction::constant(11, 1.0).unwrap();
        assert!(matches!(l2_conv_check(&wide), Err(LabError::Guard { .. })));
    }
}
