//! Exact counting of disjoint-union tuples in a set family.
//!
//! The central count is over ordered triples `(A1, A2, A)` from the family
//! with `A1` and `A2` disjoint and `A1 ∪ A2 = A`. The scan exploits the
//! canonical order: only pairs `i < j` are enumerated (each unordered pair
//! contributes twice; the only diagonal triple is the all-empty one), the
//! inner loop stops at the popcount prefix that can still fit under the
//! family's maximum popcount, and the union lookup is a binary search inside
//! the one popcount group that could contain it.
//!
//! All tuple counters are exact `u128` values; rayon reductions sum integers,
//! so results are identical for every thread count.

use std::cmp::Ordering;
use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::family::{words_for, Cluster, FamilyError, SetFamily, WORD_BITS};
use crate::lab::exponents::{p_k, Exponents};

/// Relative slack applied when an exact count is compared against a bound
/// evaluated in `f64`; covers the rounding of `powf` on large families.
pub const BOUND_REL_SLACK: f64 = 1e-9;

const ORACLE_CAP: usize = 512;

#[derive(Debug, Error)]
pub enum CountError {
    #[error("oracle accepts at most {cap} clusters, got {size}")]
    OracleGuard { size: usize, cap: usize },
    #[error("k-fold counting supports 2 <= k <= 6, got {k}")]
    KfoldGuard { k: usize },
    #[error("extremal families need n in 3..=33 divisible by 3, got {n}")]
    ExtremalDomain { n: usize },
    #[error("families must share one universe ({expected} cells, got {got})")]
    UniverseMismatch { expected: usize, got: usize },
    #[error("counter overflow: result exceeds u128")]
    Overflow,
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// Result of [`count_partition_triples`].
#[derive(Debug, Clone, Serialize)]
pub struct CountReport {
    pub family_size: usize,
    /// Ordered triples `(A1, A2, A)` with `A = A1 ⊎ A2`; exact.
    #[serde(with = "crate::serde_u128")]
    pub triples: u128,
    /// `|X|^(3/p)` with `p = log_3(27/4)`.
    pub bound_main: f64,
    /// `|X|^2`: one union candidate per ordered pair.
    pub bound_trivial: f64,
    /// `log(triples) / log(|X|)`; absent for `|X| <= 1` or a zero count.
    pub empirical_exponent: Option<f64>,
}

impl CountReport {
    pub fn new(family_size: usize, triples: u128) -> CountReport {
        let m = family_size as f64;
        let bound_main = m.powf(Exponents::standard().three_over_p);
        let empirical_exponent =
            (family_size > 1 && triples > 0).then(|| (triples as f64).ln() / m.ln());
        CountReport {
            family_size,
            triples,
            bound_main,
            bound_trivial: m * m,
            empirical_exponent,
        }
    }

    pub fn main_bound_holds(&self) -> bool {
        self.triples as f64 <= self.bound_main * (1.0 + BOUND_REL_SLACK)
    }

    /// Exact integer comparison; no float slack needed.
    pub fn trivial_bound_holds(&self) -> bool {
        self.triples <= (self.family_size as u128).pow(2)
    }
}

/// Result of [`count_kfold`].
#[derive(Debug, Clone, Serialize)]
pub struct KFoldReport {
    pub k: usize,
    pub family_size: usize,
    /// Ordered `(k-1)`-tuples of pairwise disjoint clusters whose union lies
    /// in the family; exact.
    #[serde(with = "crate::serde_u128")]
    pub tuples: u128,
    /// `|X|^(k/p_k)` with `p_k = log_k(k^k/(k-1)^(k-1))`.
    pub bound: f64,
}

impl KFoldReport {
    pub fn bound_holds(&self) -> bool {
        self.tuples as f64 <= self.bound * (1.0 + BOUND_REL_SLACK)
    }
}

/// Result of [`count_tripartite`].
#[derive(Debug, Clone, Serialize)]
pub struct TripartiteReport {
    /// Sizes of `(X, X1, X2)`.
    pub sizes: [usize; 3],
    /// Ordered pairs `(A1, A2)` from `X1 x X2`, disjoint, with union in `X`.
    #[serde(with = "crate::serde_u128")]
    pub tuples: u128,
    /// `(|X| |X1| |X2|)^(1/p)`.
    pub bound: f64,
}

impl TripartiteReport {
    pub fn bound_holds(&self) -> bool {
        self.tuples as f64 <= self.bound * (1.0 + BOUND_REL_SLACK)
    }
}

/// One row of [`empirical_exponent_series`].
#[derive(Debug, Clone, Serialize)]
pub struct ExponentRow {
    pub n: usize,
    pub family_size: usize,
    #[serde(with = "crate::serde_u128")]
    pub triples: u128,
    pub empirical_exponent: f64,
}

/// Popcount bookkeeping over a canonical family: contiguous index ranges per
/// popcount and prefix ends for popcount limits.
struct ScanIndex {
    pcs: Vec<u32>,
    group: Vec<Range<usize>>,
    end_at: Vec<usize>,
    max_pc: u32,
}

impl ScanIndex {
    fn build(fam: &SetFamily) -> ScanIndex {
        let pcs: Vec<u32> = fam.clusters().iter().map(Cluster::popcount).collect();
        let max_pc = pcs.last().copied().unwrap_or(0);
        let mut group = vec![0..0; max_pc as usize + 1];
        let mut i = 0;
        while i < pcs.len() {
            let mut j = i + 1;
            while j < pcs.len() && pcs[j] == pcs[i] {
                j += 1;
            }
            group[pcs[i] as usize] = i..j;
            i = j;
        }
        let mut end_at = vec![0; max_pc as usize + 1];
        let mut cur = 0;
        for (q, e) in end_at.iter_mut().enumerate() {
            if !group[q].is_empty() {
                cur = group[q].end;
            }
            *e = cur;
        }
        ScanIndex {
            pcs,
            group,
            end_at,
            max_pc,
        }
    }
}

fn cmp_words(a: &[u64], b: &[u64]) -> Ordering {
    debug_assert_eq!(a.len(), b.len());
    for i in (0..a.len()).rev() {
        match a[i].cmp(&b[i]) {
            Ordering::Equal => {}
            ord => return ord,
        }
    }
    Ordering::Equal
}

/// Pair scan over `i < j` for single-word universes.
fn scan_u64(masks: &[u64], idx: &ScanIndex) -> u128 {
    (0..masks.len())
        .into_par_iter()
        .map(|i| {
            let a = masks[i];
            let pa = idx.pcs[i];
            if 2 * pa > idx.max_pc {
                return 0u128;
            }
            let j_end = idx.end_at[(idx.max_pc - pa) as usize];
            let mut local = 0u64;
            for j in i + 1..j_end {
                let b = masks[j];
                if a & b != 0 {
                    continue;
                }
                let target = a | b;
                let g = idx.group[(pa + idx.pcs[j]) as usize].clone();
                if masks[g].binary_search(&target).is_ok() {
                    local += 1;
                }
            }
            u128::from(local)
        })
        .sum()
}

/// Pair scan over `i < j` for multi-word universes.
fn scan_wide(clusters: &[Cluster], width: usize, idx: &ScanIndex) -> u128 {
    (0..clusters.len())
        .into_par_iter()
        .map(|i| {
            let a = clusters[i].words();
            let pa = idx.pcs[i];
            if 2 * pa > idx.max_pc {
                return 0u128;
            }
            let j_end = idx.end_at[(idx.max_pc - pa) as usize];
            let mut target = vec![0u64; width];
            let mut local = 0u64;
            for j in i + 1..j_end {
                let b = clusters[j].words();
                if a.iter().zip(b).any(|(x, y)| x & y != 0) {
                    continue;
                }
                for (t, (x, y)) in target.iter_mut().zip(a.iter().zip(b)) {
                    *t = x | y;
                }
                let g = idx.group[(pa + idx.pcs[j]) as usize].clone();
                if clusters[g]
                    .binary_search_by(|c| cmp_words(c.words(), &target))
                    .is_ok()
                {
                    local += 1;
                }
            }
            u128::from(local)
        })
        .sum()
}

/// Counts ordered triples `(A1, A2, A)` in `X^3` with `A = A1 ⊎ A2`.
pub fn count_partition_triples(fam: &SetFamily) -> Result<CountReport, CountError> {
    let idx = ScanIndex::build(fam);
    let half = if fam.universe_size() <= WORD_BITS {
        let masks: Vec<u64> = fam.clusters().iter().map(|c| c.words()[0]).collect();
        scan_u64(&masks, &idx)
    } else {
        scan_wide(fam.clusters(), words_for(fam.universe_size()), &idx)
    };
    let diagonal = u128::from(fam.clusters().first().is_some_and(Cluster::is_empty));
    let triples = half
        .checked_mul(2)
        .and_then(|t| t.checked_add(diagonal))
        .ok_or(CountError::Overflow)?;
    Ok(CountReport::new(fam.len(), triples))
}

/// Reference count by the literal triple loop, linear membership scan
/// included. Shares nothing with the production scan except `Cluster` ops.
pub fn count_partition_triples_oracle(fam: &SetFamily) -> Result<u128, CountError> {
    if fam.len() > ORACLE_CAP {
        return Err(CountError::OracleGuard {
            size: fam.len(),
            cap: ORACLE_CAP,
        });
    }
    let cs = fam.clusters();
    let mut triples: u128 = 0;
    for a1 in cs {
        for a2 in cs {
            if !a1.is_disjoint(a2) {
                continue;
            }
            let union = a1.union(a2);
            for a in cs {
                if *a == union {
                    triples += 1;
                }
            }
        }
    }
    Ok(triples)
}

/// Counts ordered pairs `(A1, A2)` from `X1 x X2`, disjoint, with union in
/// `X`. All three families must share one universe.
pub fn count_tripartite(
    x: &SetFamily,
    x1: &SetFamily,
    x2: &SetFamily,
) -> Result<TripartiteReport, CountError> {
    for other in [x1, x2] {
        if other.universe_size() != x.universe_size() {
            return Err(CountError::UniverseMismatch {
                expected: x.universe_size(),
                got: other.universe_size(),
            });
        }
    }
    let idx = ScanIndex::build(x);
    let idx2 = ScanIndex::build(x2);
    let target = x.clusters();
    let seconds = x2.clusters();

    let tuples: u128 = (0..x1.len())
        .into_par_iter()
        .map(|i| {
            let a = &x1.clusters()[i];
            let pa = a.popcount();
            if pa > idx.max_pc {
                return 0u128;
            }
            let limit = (idx.max_pc - pa).min(idx2.max_pc);
            let j_end = idx2.end_at[limit as usize];
            let mut local = 0u64;
            for b in &seconds[..j_end] {
                if !a.is_disjoint(b) {
                    continue;
                }
                let union = a.union(b);
                let g = idx.group[(pa + b.popcount()) as usize].clone();
                if target[g].binary_search_by(|c| c.cmp(&union)).is_ok() {
                    local += 1;
                }
            }
            u128::from(local)
        })
        .sum();

    let bound = ((x.len() as f64) * (x1.len() as f64) * (x2.len() as f64))
        .powf(1.0 / Exponents::standard().p3);
    Ok(TripartiteReport {
        sizes: [x.len(), x1.len(), x2.len()],
        tuples,
        bound,
    })
}

fn kfold_rec(
    cs: &[Cluster],
    idx: &ScanIndex,
    partial: &Cluster,
    partial_pc: u32,
    remaining: usize,
) -> Option<u128> {
    if remaining == 0 {
        let g = idx.group[partial_pc as usize].clone();
        return Some(u128::from(
            cs[g].binary_search_by(|c| c.cmp(partial)).is_ok(),
        ));
    }
    let end = idx.end_at[(idx.max_pc - partial_pc) as usize];
    let mut total: u128 = 0;
    for j in 0..end {
        if cs[j].is_disjoint(partial) {
            let sub = kfold_rec(cs, idx, &cs[j].union(partial), partial_pc + idx.pcs[j], remaining - 1)?;
            total = total.checked_add(sub)?;
        }
    }
    Some(total)
}

/// Counts ordered `(k-1)`-tuples of pairwise disjoint clusters whose union
/// lies in the family. `k = 3` reproduces [`count_partition_triples`].
pub fn count_kfold(fam: &SetFamily, k: usize) -> Result<KFoldReport, CountError> {
    if !(2..=6).contains(&k) {
        return Err(CountError::KfoldGuard { k });
    }
    let cs = fam.clusters();
    let tuples = if cs.is_empty() {
        0
    } else if k == 2 {
        // A 1-tuple is its own union, so every cluster qualifies.
        fam.len() as u128
    } else {
        let idx = ScanIndex::build(fam);
        (0..cs.len())
            .into_par_iter()
            .map(|j| {
                kfold_rec(cs, &idx, &cs[j], idx.pcs[j], k - 2).ok_or(CountError::Overflow)
            })
            .try_reduce(|| 0, |a, b| a.checked_add(b).ok_or(CountError::Overflow))?
    };
    let bound = (fam.len() as f64).powf(k as f64 / p_k(k));
    Ok(KFoldReport {
        k,
        family_size: fam.len(),
        tuples,
        bound,
    })
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out: u128 = 1;
    for i in 0..k {
        out = out * u128::from(n - i) / u128::from(i + 1);
    }
    out
}

/// The family of all `n/3`- and `2n/3`-subsets of an `n`-element universe,
/// labeled `1..=n`. Requires `n` in `3..=33` divisible by 3.
pub fn extremal_family(n: usize) -> Result<SetFamily, CountError> {
    if !(3..=33).contains(&n) || !n.is_multiple_of(3) {
        return Err(CountError::ExtremalDomain { n });
    }
    let size = 2 * binomial(n as u64, n as u64 / 3) as usize;
    let mut clusters = Vec::with_capacity(size);
    for k in [n / 3, 2 * n / 3] {
        let mut mask: u64 = (1 << k) - 1;
        let top: u64 = 1 << n;
        while mask < top {
            clusters.push(Cluster::from_words(n, vec![mask])?);
            let c = mask & mask.wrapping_neg();
            let r = mask + c;
            mask = (((r ^ mask) >> 2) / c) | r;
        }
    }
    let labels = (1..=n).map(|i| vec![i.to_string()]).collect();
    Ok(SetFamily::with_labels(n, clusters, labels)?)
}

/// Triple counts and empirical exponents of the extremal families for
/// `n = 3, 6, ..` up to `n_max`.
pub fn empirical_exponent_series(n_max: usize) -> Result<Vec<ExponentRow>, CountError> {
    if !(3..=33).contains(&n_max) || !n_max.is_multiple_of(3) {
        return Err(CountError::ExtremalDomain { n: n_max });
    }
    let mut rows = Vec::new();
    for n in (3..=n_max).step_by(3) {
        let fam = extremal_family(n)?;
        let report = count_partition_triples(&fam)?;
        rows.push(ExponentRow {
            n,
            family_size: report.family_size,
            triples: report.triples,
            empirical_exponent: report
                .empirical_exponent
                .expect("extremal families have size > 1 and a positive count"),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn family_u64(universe: usize, masks: &[u64]) -> SetFamily {
        let clusters = masks
            .iter()
            .map(|&m| Cluster::from_words(universe, vec![m]).unwrap())
            .collect();
        SetFamily::new(universe, clusters).unwrap()
    }

    #[test]
    fn four_cluster_example() {
        // {∅, {1}, {2}, {1,2}}: 9 ordered triples.
        let fam = family_u64(2, &[0b00, 0b01, 0b10, 0b11]);
        let report = count_partition_triples(&fam).unwrap();
        assert_eq!(report.triples, 9);
        assert_eq!(count_partition_triples_oracle(&fam).unwrap(), 9);
        assert!(report.main_bound_holds());
        assert!(report.trivial_bound_holds());
    }

    #[test]
    fn full_powerset_counts_three_to_the_n() {
        // Each element independently goes to A1, A2, or neither.
        for n in 0..=6usize {
            let masks: Vec<u64> = (0..1u64 << n).collect();
            let fam = family_u64(n, &masks);
            let report = count_partition_triples(&fam).unwrap();
            assert_eq!(report.triples, 3u128.pow(n as u32), "n = {n}");
        }
    }

    #[test]
    fn singleton_families() {
        let empty_only = family_u64(3, &[0]);
        assert_eq!(count_partition_triples(&empty_only).unwrap().triples, 1);
        assert_eq!(
            count_partition_triples(&empty_only).unwrap().empirical_exponent,
            None
        );

        let one_set = family_u64(3, &[0b101]);
        let report = count_partition_triples(&one_set).unwrap();
        assert_eq!(report.triples, 0);
        assert_eq!(report.empirical_exponent, None);
    }

    #[test]
    fn wide_universe_matches_small_one() {
        // The same structure placed on cells {63, 64, 69} of a 70-cell
        // universe must count exactly like the 3-cell powerset.
        let cells = [63usize, 64, 69];
        let clusters: Vec<Cluster> = (0..8u32)
            .map(|pat| {
                Cluster::from_indices(
                    70,
                    cells.iter().enumerate().filter(|&(b, _)| pat >> b & 1 == 1).map(|(_, &c)| c),
                )
            })
            .collect();
        let fam = SetFamily::new(70, clusters).unwrap();
        let report = count_partition_triples(&fam).unwrap();
        assert_eq!(report.triples, 27);
        assert_eq!(count_partition_triples_oracle(&fam).unwrap(), 27);
    }

    #[test]
    fn boundary_universe_widths() {
        for u in [63usize, 64, 65] {
            let hi = u - 1;
            let clusters = vec![
                Cluster::from_indices(u, [0usize]),
                Cluster::from_indices(u, [hi]),
                Cluster::from_indices(u, [0usize, hi]),
            ];
            let fam = SetFamily::new(u, clusters).unwrap();
            assert_eq!(count_partition_triples(&fam).unwrap().triples, 2, "u = {u}");
        }
    }

    #[test]
    fn tripartite_specializes_to_triples() {
        let fam = family_u64(2, &[0b00, 0b01, 0b10, 0b11]);
        let tri = count_tripartite(&fam, &fam, &fam).unwrap();
        assert_eq!(tri.tuples, 9);
        assert!(tri.bound_holds());
    }

    #[test]
    fn tripartite_rejects_mixed_universes() {
        let a = family_u64(2, &[0b01]);
        let b = family_u64(3, &[0b001]);
        assert!(matches!(
            count_tripartite(&a, &a, &b),
            Err(CountError::UniverseMismatch { .. })
        ));
    }

    #[test]
    fn kfold_matches_triples_at_three() {
        let fam = family_u64(3, &[0, 1, 2, 4, 3, 6, 7]);
        let triples = count_partition_triples(&fam).unwrap().triples;
        let kfold = count_kfold(&fam, 3).unwrap();
        assert_eq!(kfold.tuples, triples);
    }

    #[test]
    fn kfold_on_full_powerset() {
        // Over the full powerset each element goes to one of the k-1 parts
        // or stays out of all of them: k^n tuples.
        let masks: Vec<u64> = (0..8u64).collect();
        let fam = family_u64(3, &masks);
        assert_eq!(count_kfold(&fam, 2).unwrap().tuples, 8);
        assert_eq!(count_kfold(&fam, 3).unwrap().tuples, 27);
        assert_eq!(count_kfold(&fam, 4).unwrap().tuples, 64);
        assert_eq!(count_kfold(&fam, 5).unwrap().tuples, 125);
        assert_eq!(count_kfold(&fam, 6).unwrap().tuples, 216);
    }

    #[test]
    fn kfold_guard() {
        let fam = family_u64(1, &[0, 1]);
        assert!(matches!(count_kfold(&fam, 1), Err(CountError::KfoldGuard { k: 1 })));
        assert!(matches!(count_kfold(&fam, 7), Err(CountError::KfoldGuard { k: 7 })));
    }

    #[test]
    fn oracle_guard() {
        let masks: Vec<u64> = (0..513).collect();
        let fam = family_u64(10, &masks);
        assert!(matches!(
            count_partition_triples_oracle(&fam),
            Err(CountError::OracleGuard { size: 513, .. })
        ));
    }

    #[test]
    fn extremal_small_cases() {
        let f3 = extremal_family(3).unwrap();
        assert_eq!(f3.len(), 6);
        assert_eq!(count_partition_triples(&f3).unwrap().triples, 6);

        let f6 = extremal_family(6).unwrap();
        assert_eq!(f6.len(), 30);
        assert_eq!(count_partition_triples(&f6).unwrap().triples, 90);

        let f9 = extremal_family(9).unwrap();
        assert_eq!(f9.len(), 168);
        assert_eq!(count_partition_triples(&f9).unwrap().triples, 1680);
    }

    #[test]
    fn extremal_domain_errors() {
        for n in [0usize, 1, 2, 4, 5, 34, 36] {
            assert!(matches!(extremal_family(n), Err(CountError::ExtremalDomain { .. })), "n = {n}");
        }
        assert!(empirical_exponent_series(10).is_err());
    }

    #[test]
    fn series_is_strictly_increasing() {
        let rows = empirical_exponent_series(9).unwrap();
        assert_eq!(rows.len(), 3);
        assert!((rows[0].empirical_exponent - 1.0).abs() < 1e-12);
        assert!(rows
            .windows(2)
            .all(|w| w[0].empirical_exponent < w[1].empirical_exponent));
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(12, 4), 495);
        assert_eq!(binomial(33, 11), 193536720);
        assert_eq!(binomial(5, 9), 0);
        assert_eq!(binomial(0, 0), 1);
    }

    #[test]
    fn empty_family() {
        let fam = SetFamily::new(4, vec![]).unwrap();
        let report = count_partition_triples(&fam).unwrap();
        assert_eq!(report.triples, 0);
        assert_eq!(report.family_size, 0);
        assert!(report.main_bound_holds());
    }
}
