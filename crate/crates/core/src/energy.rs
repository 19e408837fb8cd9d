//! Additive energy of subsets of the Boolean cube `{0,1}^n`.
//!
//! The energy of `A` is the number of ordered quadruples with
//! `a1 + a2 = a3 + a4`, the sum taken componentwise over the integers. The
//! production counter builds the representation table `r(s) = #{(a, b) :
//! a + b = s}` and sums `r(s)^2`; a componentwise reference loop serves as
//! oracle. Sums live in `{0,1,2}^n` and are keyed by the pair
//! `(a XOR b, a AND b)`: the first mask marks coordinates summing to 1, the
//! second those summing to 2.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::counting::BOUND_REL_SLACK;
use crate::lab::exponents::Exponents;

/// Size cap for [`energy`] and [`energy_split`]; the table scan is quadratic.
pub const ENERGY_CAP: usize = 1 << 20;
/// Size cap for [`energy_oracle`]; the reference loop is cubic.
pub const ORACLE_CAP: usize = 64;
/// Per-set size cap for [`four_family_solution_count`].
pub const FOUR_FAMILY_CAP: usize = 1 << 16;
/// Points are single `u64` masks.
pub const MAX_DIM: usize = 63;

const FULL_CUBE_DIM_CAP: usize = 20;

#[derive(Debug, Error)]
pub enum EnergyError {
    #[error("set has {size} points, over the {cap}-point cap")]
    Guard { size: usize, cap: usize },
    #[error("dimension {dim} exceeds the cap of {cap}")]
    DimTooLarge { dim: usize, cap: usize },
    #[error("point {point:#x} has bits outside dimension {dim}")]
    PointOutOfRange { point: u64, dim: usize },
    #[error("coordinate {coord} outside dimension {dim}")]
    CoordOutOfRange { coord: usize, dim: usize },
    #[error("sets must share a dimension ({expected} vs {got})")]
    DimMismatch { expected: usize, got: usize },
    #[error("counter overflow: result exceeds u128")]
    Overflow,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A subset of `{0,1}^dim`, stored as sorted distinct point masks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeSet {
    dim: usize,
    points: Vec<u64>,
}

impl CubeSet {
    pub fn new(dim: usize, points: Vec<u64>) -> Result<Self, EnergyError> {
        if dim > MAX_DIM {
            return Err(EnergyError::DimTooLarge { dim, cap: MAX_DIM });
        }
        let mut pts = points;
        for &p in &pts {
            if dim < 64 && p >> dim != 0 {
                return Err(EnergyError::PointOutOfRange { point: p, dim });
            }
        }
        pts.sort_unstable();
        pts.dedup();
        Ok(CubeSet { dim, points: pts })
    }

    pub fn full_cube(dim: usize) -> Result<Self, EnergyError> {
        if dim > FULL_CUBE_DIM_CAP {
            return Err(EnergyError::DimTooLarge {
                dim,
                cap: FULL_CUBE_DIM_CAP,
            });
        }
        CubeSet::new(dim, (0..1u64 << dim).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[u64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, point: u64) -> bool {
        self.points.binary_search(&point).is_ok()
    }

    /// XORs every point with `mask`; a cube isometry, so energy-invariant.
    pub fn reflect(&self, mask: u64) -> Result<CubeSet, EnergyError> {
        if self.dim < 64 && mask >> self.dim != 0 {
            return Err(EnergyError::PointOutOfRange {
                point: mask,
                dim: self.dim,
            });
        }
        CubeSet::new(self.dim, self.points.iter().map(|p| p ^ mask).collect())
    }

    /// Applies a coordinate permutation (`perm[i]` is the new position of
    /// coordinate `i`); a cube isometry, so energy-invariant.
    pub fn permute(&self, perm: &[usize]) -> Result<CubeSet, EnergyError> {
        let d = self.dim;
        let mut seen = vec![false; d];
        if perm.len() != d {
            return Err(EnergyError::DimMismatch {
                expected: d,
                got: perm.len(),
            });
        }
        for &p in perm {
            if p >= d || seen[p] {
                return Err(EnergyError::CoordOutOfRange { coord: p, dim: d });
            }
            seen[p] = true;
        }
        let points = self
            .points
            .iter()
            .map(|&pt| {
                (0..d)
                    .filter(|&i| pt >> i & 1 == 1)
                    .fold(0u64, |acc, i| acc | 1 << perm[i])
            })
            .collect();
        CubeSet::new(d, points)
    }

    /// Splits along `coord` into the two fibers, with that coordinate
    /// removed: points with the bit clear, then points with it set.
    pub fn split(&self, coord: usize) -> Result<(CubeSet, CubeSet), EnergyError> {
        if coord >= self.dim {
            return Err(EnergyError::CoordOutOfRange {
                coord,
                dim: self.dim,
            });
        }
        let low = (1u64 << coord) - 1;
        let squash = |p: u64| (p & low) | (p >> (coord + 1)) << coord;
        let (mut zeros, mut ones) = (Vec::new(), Vec::new());
        for &p in &self.points {
            if p >> coord & 1 == 0 {
                zeros.push(squash(p));
            } else {
                ones.push(squash(p));
            }
        }
        Ok((
            CubeSet::new(self.dim - 1, zeros)?,
            CubeSet::new(self.dim - 1, ones)?,
        ))
    }

    pub fn parse(text: &str) -> Result<CubeSet, EnergyError> {
        let mut dim: Option<usize> = None;
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some(d) = dim else {
                let mut it = content.split_whitespace();
                match (it.next(), it.next(), it.next()) {
                    (Some("dim"), Some(n), None) => {
                        let n: usize = n.parse().map_err(|_| EnergyError::Parse {
                            line: lineno,
                            msg: format!("invalid dimension '{n}'"),
                        })?;
                        dim = Some(n);
                    }
                    _ => {
                        return Err(EnergyError::Parse {
                            line: lineno,
                            msg: "expected 'dim <n>' header".to_owned(),
                        })
                    }
                }
                continue;
            };
            let point = u64::from_str_radix(content, 16).map_err(|_| EnergyError::Parse {
                line: lineno,
                msg: format!("invalid hex point '{content}'"),
            })?;
            if d < 64 && point >> d != 0 {
                return Err(EnergyError::Parse {
                    line: lineno,
                    msg: "point has bits outside the dimension".to_owned(),
                });
            }
            points.push(point);
        }
        let dim = dim.ok_or_else(|| EnergyError::Parse {
            line: text.lines().count().max(1),
            msg: "missing 'dim <n>' header".to_owned(),
        })?;
        CubeSet::new(dim, points)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("dim {}\n", self.dim);
        for p in &self.points {
            out.push_str(&format!("{p:x}\n"));
        }
        out
    }
}

/// Result of [`energy`].
#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub size: usize,
    /// Ordered quadruples with `a1 + a2 = a3 + a4`; exact.
    #[serde(with = "crate::serde_u128")]
    pub energy: u128,
    /// `|A|^(log_2 6)`.
    pub bound: f64,
    /// Whether the bound is attained exactly; possible only at power-of-2
    /// sizes, where it equals `6^(log_2 |A|)`.
    pub tight: bool,
}

impl EnergyReport {
    pub fn new(size: usize, energy: u128) -> EnergyReport {
        let bound = (size as f64).powf(Exponents::standard().p_energy);
        let tight = size.is_power_of_two() && energy == 6u128.pow(size.trailing_zeros());
        EnergyReport {
            size,
            energy,
            bound,
            tight,
        }
    }

    pub fn bound_holds(&self) -> bool {
        self.energy as f64 <= self.bound * (1.0 + BOUND_REL_SLACK)
    }
}

/// Representation table of pairwise sums across `xs x ys`, keyed by
/// `(xor, and)`.
fn sum_table(xs: &[u64], ys: &[u64]) -> HashMap<(u64, u64), u64> {
    xs.par_iter()
        .fold(HashMap::new, |mut t: HashMap<(u64, u64), u64>, &x| {
            for &y in ys {
                *t.entry((x ^ y, x & y)).or_insert(0) += 1;
            }
            t
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        })
}

fn table_energy(a: &CubeSet) -> u128 {
    sum_table(a.points(), a.points())
        .values()
        .map(|&c| u128::from(c) * u128::from(c))
        .sum()
}

/// Exact additive energy via the representation table.
pub fn energy(a: &CubeSet) -> Result<EnergyReport, EnergyError> {
    if a.len() > ENERGY_CAP {
        return Err(EnergyError::Guard {
            size: a.len(),
            cap: ENERGY_CAP,
        });
    }
    Ok(EnergyReport::new(a.len(), table_energy(a)))
}

/// Reference count: enumerates `(a1, a2, a3)`, solves `a4 = a1 + a2 - a3`
/// one coordinate at a time over the integers, and checks membership by
/// linear scan. Shares nothing with the table path.
pub fn energy_oracle(a: &CubeSet) -> Result<u128, EnergyError> {
    if a.len() > ORACLE_CAP {
        return Err(EnergyError::Guard {
            size: a.len(),
            cap: ORACLE_CAP,
        });
    }
    let pts = a.points();
    let mut count: u128 = 0;
    for &a1 in pts {
        for &a2 in pts {
            for &a3 in pts {
                let mut a4 = 0u64;
                let mut ok = true;
                for i in 0..a.dim() {
                    let s = (a1 >> i & 1) as i64 + (a2 >> i & 1) as i64 - (a3 >> i & 1) as i64;
                    match s {
                        0 => {}
                        1 => a4 |= 1 << i,
                        _ => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok && pts.contains(&a4) {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

/// The three terms of the coordinate-split recursion
/// `E(A) = E(A0) + 4*cross + E(A1)`.
#[derive(Debug, Clone, Serialize)]
pub struct EnergySplit {
    #[serde(with = "crate::serde_u128")]
    pub energy_low: u128,
    /// `sum_s r01(s)^2` where `r01` counts mixed pairs `A0 x A1` by sum.
    #[serde(with = "crate::serde_u128")]
    pub cross: u128,
    #[serde(with = "crate::serde_u128")]
    pub energy_high: u128,
}

impl EnergySplit {
    pub fn total(&self) -> u128 {
        self.energy_low + 4 * self.cross + self.energy_high
    }
}

/// Splits the energy along `coord` into fiber and cross terms.
pub fn energy_split(a: &CubeSet, coord: usize) -> Result<EnergySplit, EnergyError> {
    if a.len() > ENERGY_CAP {
        return Err(EnergyError::Guard {
            size: a.len(),
            cap: ENERGY_CAP,
        });
    }
    let (a0, a1) = a.split(coord)?;
    let cross = sum_table(a0.points(), a1.points())
        .values()
        .map(|&c| u128::from(c) * u128::from(c))
        .sum();
    Ok(EnergySplit {
        energy_low: table_energy(&a0),
        cross,
        energy_high: table_energy(&a1),
    })
}

/// Both sides of the cross-term Cauchy-Schwarz step, compared exactly:
/// `cross^2 <= E(A0) * E(A1)`.
#[derive(Debug, Clone, Serialize)]
pub struct CrossCheck {
    #[serde(with = "crate::serde_u128")]
    pub cross_squared: u128,
    #[serde(with = "crate::serde_u128")]
    pub energy_product: u128,
    pub holds: bool,
}

pub fn cross_cauchy_schwarz_check(a: &CubeSet, coord: usize) -> Result<CrossCheck, EnergyError> {
    let split = energy_split(a, coord)?;
    let cross_squared = split
        .cross
        .checked_mul(split.cross)
        .ok_or(EnergyError::Overflow)?;
    let energy_product = split
        .energy_low
        .checked_mul(split.energy_high)
        .ok_or(EnergyError::Overflow)?;
    Ok(CrossCheck {
        cross_squared,
        energy_product,
        holds: cross_squared <= energy_product,
    })
}

/// Result of [`four_family_solution_count`].
#[derive(Debug, Clone, Serialize)]
pub struct FourFamilyCount {
    pub sizes: [usize; 4],
    /// Solutions of `a1 + a2 = a3 + a4` with `ai` drawn from `Ai`; exact.
    #[serde(with = "crate::serde_u128")]
    pub solutions: u128,
    /// `prod |Ai|^(p/4)` with `p = log_2 6`.
    pub bound: f64,
}

impl FourFamilyCount {
    pub fn bound_holds(&self) -> bool {
        self.solutions as f64 <= self.bound * (1.0 + BOUND_REL_SLACK)
    }
}

/// Counts solutions of `a1 + a2 = a3 + a4` across four sets of one
/// dimension. `(A, A, A, A)` reproduces the energy of `A`.
pub fn four_family_solution_count(
    a1: &CubeSet,
    a2: &CubeSet,
    a3: &CubeSet,
    a4: &CubeSet,
) -> Result<FourFamilyCount, EnergyError> {
    let sets = [a1, a2, a3, a4];
    for s in &sets {
        if s.dim() != a1.dim() {
            return Err(EnergyError::DimMismatch {
                expected: a1.dim(),
                got: s.dim(),
            });
        }
        if s.len() > FOUR_FAMILY_CAP {
            return Err(EnergyError::Guard {
                size: s.len(),
                cap: FOUR_FAMILY_CAP,
            });
        }
    }
    let t12 = sum_table(a1.points(), a2.points());
    let t34 = sum_table(a3.points(), a4.points());
    let (small, big) = if t12.len() <= t34.len() {
        (&t12, &t34)
    } else {
        (&t34, &t12)
    };
    let mut solutions: u128 = 0;
    for (k, &v) in small {
        if let Some(&w) = big.get(k) {
            solutions += u128::from(v) * u128::from(w);
        }
    }
    let p4 = Exponents::standard().p_energy / 4.0;
    let bound = sets.iter().map(|s| (s.len() as f64).powf(p4)).product();
    Ok(FourFamilyCount {
        sizes: sets.map(CubeSet::len),
        solutions,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn set(dim: usize, pts: &[u64]) -> CubeSet {
        CubeSet::new(dim, pts.to_vec()).unwrap()
    }

    #[test]
    fn full_cubes_are_tight() {
        let mut expected: u128 = 1;
        for dim in 0..=6usize {
            let cube = CubeSet::full_cube(dim).unwrap();
            let report = energy(&cube).unwrap();
            assert_eq!(report.energy, expected, "dim = {dim}");
            assert!(report.tight, "dim = {dim}");
            assert!(report.bound_holds());
            expected *= 6;
        }
    }

    #[test]
    fn three_point_example() {
        let report = energy(&set(2, &[0b00, 0b01, 0b10])).unwrap();
        assert_eq!(report.energy, 15);
        assert!(!report.tight);
        assert!(report.bound_holds());
    }

    #[test]
    fn diagonal_lower_bound_and_sidon_equality() {
        // E >= 2|A|^2 - |A| always; equality exactly when all unordered
        // pairwise sums are distinct. Sums keyed with 2 bits per coordinate,
        // independent of the (xor, and) table encoding.
        let sum_key = |x: u64, y: u64, dim: usize| -> u64 {
            (0..dim)
                .map(|i| ((x >> i & 1) + (y >> i & 1)) << (2 * i))
                .sum()
        };
        let sidon = |a: &CubeSet| {
            let pts = a.points();
            let mut sums = HashSet::new();
            pts.iter()
                .enumerate()
                .all(|(i, &x)| pts[i..].iter().all(|&y| sums.insert(sum_key(x, y, a.dim()))))
        };
        for a in [
            set(4, &[0, 3, 5, 9, 14]),
            set(2, &[0b00, 0b01, 0b10]),
            set(2, &[0b00, 0b01, 0b10, 0b11]),
            set(3, &[0, 1, 6]),
            set(1, &[0, 1]),
        ] {
            let m = a.len() as u128;
            let e = energy(&a).unwrap().energy;
            assert!(e >= m * m);
            assert!(e >= 2 * m * m - m);
            assert_eq!(e == 2 * m * m - m, sidon(&a), "points {:?}", a.points());
        }
    }

    #[test]
    fn table_matches_oracle() {
        let sets = [
            set(0, &[0]),
            set(3, &[]),
            set(2, &[0b00, 0b01, 0b10]),
            set(4, &[1, 2, 4, 8, 15]),
            set(5, &[0, 7, 11, 13, 21, 30, 31]),
        ];
        for a in &sets {
            assert_eq!(table_energy(a), energy_oracle(a).unwrap());
        }
    }

    #[test]
    fn split_recursion_is_exact() {
        let a = set(5, &[0, 3, 7, 12, 17, 21, 25, 30, 31]);
        let total = energy(&a).unwrap().energy;
        for coord in 0..5 {
            let split = energy_split(&a, coord).unwrap();
            assert_eq!(split.total(), total, "coord = {coord}");
            let cs = cross_cauchy_schwarz_check(&a, coord).unwrap();
            assert!(cs.holds, "coord = {coord}");
        }
    }

    #[test]
    fn subcube_translate_is_tight() {
        // {00, 11} is a 1-dimensional subgroup: energy 6.
        let report = energy(&set(2, &[0b00, 0b11])).unwrap();
        assert_eq!(report.energy, 6);
        assert!(report.tight);
    }

    #[test]
    fn isometries_preserve_energy() {
        let a = set(4, &[0, 3, 5, 9, 14, 15]);
        let base = energy(&a).unwrap().energy;
        assert_eq!(energy(&a.reflect(0b1010).unwrap()).unwrap().energy, base);
        assert_eq!(energy(&a.permute(&[2, 0, 3, 1]).unwrap()).unwrap().energy, base);
    }

    #[test]
    fn four_family_diagonal_is_energy() {
        let a = set(3, &[0, 1, 5, 6]);
        let four = four_family_solution_count(&a, &a, &a, &a).unwrap();
        assert_eq!(four.solutions, energy(&a).unwrap().energy);
        assert!(four.bound_holds());
    }

    #[test]
    fn four_family_mixed_sets() {
        let a1 = set(3, &[0, 1, 2]);
        let a2 = set(3, &[4, 5]);
        let a3 = set(3, &[0, 7]);
        let a4 = set(3, &[1, 3, 6]);
        let four = four_family_solution_count(&a1, &a2, &a3, &a4).unwrap();
        let mut expected = 0u128;
        for &x1 in a1.points() {
            for &x2 in a2.points() {
                for &x3 in a3.points() {
                    for &x4 in a4.points() {
                        let same = (0..3).all(|i| {
                            (x1 >> i & 1) + (x2 >> i & 1) == (x3 >> i & 1) + (x4 >> i & 1)
                        });
                        if same {
                            expected += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(four.solutions, expected);
        assert!(four.bound_holds());
    }

    #[test]
    fn empty_and_singleton() {
        assert_eq!(energy(&set(3, &[])).unwrap().energy, 0);
        let one = energy(&set(3, &[5])).unwrap();
        assert_eq!(one.energy, 1);
        assert!(one.tight);
    }

    #[test]
    fn parse_round_trip() {
        let text = "# points\ndim 5\n0\n1f\n0a # middle\n";
        let a = CubeSet::parse(text).unwrap();
        assert_eq!(a.points(), &[0x0, 0xa, 0x1f]);
        let again = CubeSet::parse(&a.to_text()).unwrap();
        assert_eq!(a, again);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            CubeSet::parse("0\n"),
            Err(EnergyError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            CubeSet::parse("dim 3\n8\n"),
            Err(EnergyError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            CubeSet::parse("dim 3\nzz\n"),
            Err(EnergyError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn guards() {
        let a = CubeSet::full_cube(7).unwrap();
        assert!(matches!(
            energy_oracle(&a),
            Err(EnergyError::Guard { size: 128, cap: 64 })
        ));
        assert!(matches!(
            CubeSet::full_cube(21),
            Err(EnergyError::DimTooLarge { dim: 21, .. })
        ));
        assert!(matches!(
            CubeSet::new(64, vec![0]),
            Err(EnergyError::DimTooLarge { dim: 64, .. })
        ));
    }
}
