//! Set families over a compressed cell universe.
//!
//! A [`SetFamily`] is a deduplicated list of [`Cluster`]s held in canonical
//! order: ascending popcount, ties broken by numeric bitmask value. Every
//! constructor establishes that order, so downstream scans can rely on it.
//!
//! Two text formats are supported: `labels` (one cluster per line, named
//! elements) and `bitmask-hex` (a `universe <n>` header, then one lowercase
//! hex mask per line). `#` starts a comment in both.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

pub(crate) const WORD_BITS: usize = 64;

/// Cap on the compressed universe. Keeps per-cluster masks at most 64 words
/// so popcount-grouped scans stay dense.
pub const MAX_UNIVERSE_CELLS: usize = 4096;

/// Sanity cap on the raw (pre-compression) universe accepted from text.
pub const MAX_RAW_UNIVERSE: usize = 1 << 20;

pub(crate) fn words_for(universe_size: usize) -> usize {
    universe_size.div_ceil(WORD_BITS).max(1)
}

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("universe of {cells} cells exceeds the cap of {cap}")]
    UniverseTooLarge { cells: usize, cap: usize },
    #[error("cluster uses a cell outside the {universe}-cell universe")]
    CellOutOfUniverse { universe: usize },
    #[error("expected {universe} label groups, got {got}")]
    LabelMismatch { universe: usize, got: usize },
    #[error("permutation must be a bijection on 0..{universe}")]
    BadPermutation { universe: usize },
}

/// Word storage: almost every family fits one 64-bit word per cluster, so
/// the single-word case is kept inline.
#[derive(Clone)]
enum Words {
    One(u64),
    Many(Box<[u64]>),
}

impl Words {
    fn as_slice(&self) -> &[u64] {
        match self {
            Words::One(w) => std::slice::from_ref(w),
            Words::Many(b) => b,
        }
    }

    fn from_vec(mut v: Vec<u64>) -> Self {
        match v.len() {
            0 => Words::One(0),
            1 => Words::One(v[0]),
            _ => Words::Many(std::mem::take(&mut v).into_boxed_slice()),
        }
    }
}

/// A cluster: one member set of a family, stored as a little-endian bitmask
/// over universe cells.
#[derive(Clone)]
pub struct Cluster {
    words: Words,
}

impl Cluster {
    pub fn empty(universe_size: usize) -> Self {
        Cluster {
            words: Words::from_vec(vec![0; words_for(universe_size)]),
        }
    }

    /// Builds a cluster from cell indices.
    ///
    /// Panics if an index is outside `0..universe_size`; the text parsers
    /// validate their input before calling this.
    pub fn from_indices<I: IntoIterator<Item = usize>>(universe_size: usize, indices: I) -> Self {
        let mut v = vec![0u64; words_for(universe_size)];
        for i in indices {
            assert!(i < universe_size, "cell index {i} outside universe of {universe_size}");
            v[i / WORD_BITS] |= 1 << (i % WORD_BITS);
        }
        Cluster { words: Words::from_vec(v) }
    }

    /// Builds a cluster directly from mask words; errors if a bit at or above
    /// `universe_size` is set.
    pub fn from_words(universe_size: usize, words: Vec<u64>) -> Result<Self, FamilyError> {
        let width = words_for(universe_size);
        let mut v = words;
        if v.len() < width {
            v.resize(width, 0);
        }
        let out_of_range = v[width..].iter().any(|&w| w != 0)
            || excess_bits_set(&v[..width], universe_size);
        if out_of_range {
            return Err(FamilyError::CellOutOfUniverse { universe: universe_size });
        }
        v.truncate(width);
        Ok(Cluster { words: Words::from_vec(v) })
    }

    pub fn words(&self) -> &[u64] {
        self.words.as_slice()
    }

    pub fn popcount(&self) -> u32 {
        self.words().iter().map(|w| w.count_ones()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words().iter().all(|&w| w == 0)
    }

    pub fn contains(&self, index: usize) -> bool {
        let ws = self.words();
        index / WORD_BITS < ws.len() && ws[index / WORD_BITS] >> (index % WORD_BITS) & 1 == 1
    }

    pub fn is_disjoint(&self, other: &Cluster) -> bool {
        self.words()
            .iter()
            .zip(other.words())
            .all(|(a, b)| a & b == 0)
    }

    pub fn union(&self, other: &Cluster) -> Cluster {
        let (a, b) = (self.words(), other.words());
        let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
        let mut v = long.to_vec();
        for (w, s) in v.iter_mut().zip(short) {
            *w |= s;
        }
        Cluster { words: Words::from_vec(v) }
    }

    /// Iterates set cell indices in ascending order.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.words().iter().enumerate().flat_map(|(wi, &word)| {
            BitIter { word }.map(move |b| wi * WORD_BITS + b)
        })
    }

    /// Minimal lowercase hex rendering of the mask.
    pub fn to_hex(&self) -> String {
        let ws = self.words();
        match ws.iter().rposition(|&w| w != 0) {
            None => "0".to_owned(),
            Some(top) => {
                let mut s = format!("{:x}", ws[top]);
                for w in ws[..top].iter().rev() {
                    s.push_str(&format!("{w:016x}"));
                }
                s
            }
        }
    }

    fn normalized(self, universe_size: usize) -> Result<Cluster, FamilyError> {
        Cluster::from_words(universe_size, self.words().to_vec())
    }
}

fn excess_bits_set(words: &[u64], universe_size: usize) -> bool {
    let used = universe_size % WORD_BITS;
    if universe_size == 0 {
        return words.iter().any(|&w| w != 0);
    }
    if used == 0 {
        return false;
    }
    words.last().is_some_and(|&w| w >> used != 0)
}

struct BitIter {
    word: u64,
}

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.word == 0 {
            return None;
        }
        let b = self.word.trailing_zeros() as usize;
        self.word &= self.word - 1;
        Some(b)
    }
}

impl PartialEq for Cluster {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Cluster {}

impl Hash for Cluster {
    fn hash<H: Hasher>(&self, state: &mut H) {
        // Hash the logical value: trailing zero words do not contribute.
        let ws = self.words();
        let top = ws.iter().rposition(|&w| w != 0).map_or(0, |t| t + 1);
        ws[..top].hash(state);
    }
}

impl Ord for Cluster {
    /// Numeric bitmask order, treating masks as little-endian integers of
    /// unbounded width.
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.words(), other.words());
        let n = a.len().max(b.len());
        for i in (0..n).rev() {
            let (x, y) = (a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0));
            match x.cmp(&y) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Cluster {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Cluster {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cluster({})", self.to_hex())
    }
}

/// Canonical order: ascending popcount, then numeric mask value.
pub(crate) fn canonical_cmp(a: &Cluster, b: &Cluster) -> Ordering {
    a.popcount().cmp(&b.popcount()).then_with(|| a.cmp(b))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum InputFormat {
    Labels,
    BitmaskHex,
}

#[derive(Clone, Debug)]
pub struct ParseOptions {
    pub format: InputFormat,
    /// Token delimiter for the labels format; `None` splits on whitespace.
    pub delimiter: Option<char>,
    /// When set, a blank (non-comment) line parses as the empty cluster.
    pub allow_empty: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            format: InputFormat::Labels,
            delimiter: None,
            allow_empty: false,
        }
    }
}

/// Result of parsing a family from text.
#[derive(Debug)]
pub struct ParseOutcome {
    pub family: SetFamily,
    /// Input lines that repeated an earlier cluster.
    pub duplicates_dropped: usize,
}

/// A deduplicated family of clusters in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFamily {
    universe_size: usize,
    clusters: Vec<Cluster>,
    /// Per-cell label groups; compression merges the labels of the cells it
    /// identifies. Families parsed from hex carry no labels.
    labels: Option<Vec<Vec<String>>>,
}

impl SetFamily {
    /// Builds a family, deduplicating clusters and establishing canonical
    /// order. Clusters with cells at or above `universe_size` are rejected.
    pub fn new(universe_size: usize, clusters: Vec<Cluster>) -> Result<Self, FamilyError> {
        let mut cs = clusters
            .into_iter()
            .map(|c| c.normalized(universe_size))
            .collect::<Result<Vec<_>, _>>()?;
        cs.sort_unstable_by(canonical_cmp);
        cs.dedup();
        Ok(SetFamily {
            universe_size,
            clusters: cs,
            labels: None,
        })
    }

    pub fn with_labels(
        universe_size: usize,
        clusters: Vec<Cluster>,
        labels: Vec<Vec<String>>,
    ) -> Result<Self, FamilyError> {
        if labels.len() != universe_size {
            return Err(FamilyError::LabelMismatch {
                universe: universe_size,
                got: labels.len(),
            });
        }
        let mut fam = SetFamily::new(universe_size, clusters)?;
        fam.labels = Some(labels);
        Ok(fam)
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn labels(&self) -> Option<&[Vec<String>]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Binary search over the canonical order.
    pub fn contains(&self, cluster: &Cluster) -> bool {
        self.clusters
            .binary_search_by(|c| canonical_cmp(c, cluster))
            .is_ok()
    }

    /// Returns the family in canonical order. Every constructor already
    /// establishes the order, so this is a plain copy; it exists so callers
    /// holding a family of unknown provenance can assert the invariant.
    pub fn canonical_form(&self) -> SetFamily {
        let mut fam = self.clone();
        fam.clusters.sort_unstable_by(canonical_cmp);
        fam.clusters.dedup();
        fam
    }

    /// Renames cells 0..u via `perm` (cell `i` becomes `perm[i]`) and returns
    /// the canonical form of the renamed family.
    pub fn permuted(&self, perm: &[usize]) -> Result<SetFamily, FamilyError> {
        let u = self.universe_size;
        let mut seen = vec![false; u];
        if perm.len() != u {
            return Err(FamilyError::BadPermutation { universe: u });
        }
        for &p in perm {
            if p >= u || seen[p] {
                return Err(FamilyError::BadPermutation { universe: u });
            }
            seen[p] = true;
        }
        let clusters = self
            .clusters
            .iter()
            .map(|c| Cluster::from_indices(u, c.indices().map(|i| perm[i])))
            .collect();
        let mut fam = SetFamily::new(u, clusters)?;
        fam.labels = self.labels.as_ref().map(|ls| {
            let mut out = vec![Vec::new(); u];
            for (i, l) in ls.iter().enumerate() {
                out[perm[i]] = l.clone();
            }
            out
        });
        Ok(fam)
    }

    /// Merges universe cells with identical cluster membership and drops
    /// cells in no cluster. Cell identity is the membership signature; merged
    /// cells keep their label groups concatenated in first-occurrence order.
    ///
    /// Compression never merges clusters: distinct clusters differ in some
    /// cell, and that cell's signature separates the compressed images.
    pub fn compress_universe(&self) -> Result<SetFamily, FamilyError> {
        let m = self.clusters.len();
        let sig_width = words_for(m);
        let mut sigs = vec![vec![0u64; sig_width]; self.universe_size];
        for (ci, cluster) in self.clusters.iter().enumerate() {
            for j in cluster.indices() {
                sigs[j][ci / WORD_BITS] |= 1 << (ci % WORD_BITS);
            }
        }

        let mut cell_of = vec![usize::MAX; self.universe_size];
        let mut cell_index: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut merged_labels: Vec<Vec<String>> = Vec::new();
        for (j, sig) in sigs.into_iter().enumerate() {
            if sig.iter().all(|&w| w == 0) {
                continue;
            }
            let next = cell_index.len();
            let cell = *cell_index.entry(sig).or_insert(next);
            if cell == merged_labels.len() {
                merged_labels.push(Vec::new());
            }
            if let Some(ls) = &self.labels {
                merged_labels[cell].extend(ls[j].iter().cloned());
            }
            cell_of[j] = cell;
        }

        let cells = cell_index.len();
        if cells > MAX_UNIVERSE_CELLS {
            return Err(FamilyError::UniverseTooLarge {
                cells,
                cap: MAX_UNIVERSE_CELLS,
            });
        }

        let clusters: Vec<Cluster> = self
            .clusters
            .iter()
            .map(|c| Cluster::from_indices(cells, c.indices().map(|j| cell_of[j])))
            .collect();
        let mut fam = SetFamily::new(cells, clusters)?;
        debug_assert_eq!(fam.len(), m, "compression must preserve cluster count");
        if self.labels.is_some() {
            fam.labels = Some(merged_labels);
        }
        Ok(fam)
    }

    pub fn parse(text: &str, opts: &ParseOptions) -> Result<ParseOutcome, FamilyError> {
        match opts.format {
            InputFormat::Labels => parse_labels(text, opts),
            InputFormat::BitmaskHex => parse_hex(text),
        }
    }

    /// Renders the family in the requested format. Bitmask-hex round-trips
    /// bit-exactly; labels round-trip up to cell naming.
    pub fn to_text(&self, opts: &ParseOptions) -> String {
        match opts.format {
            InputFormat::BitmaskHex => {
                let mut out = format!("universe {}\n", self.universe_size);
                for c in &self.clusters {
                    out.push_str(&c.to_hex());
                    out.push('\n');
                }
                out
            }
            InputFormat::Labels => {
                let delim = opts.delimiter.unwrap_or(' ');
                let mut out = String::new();
                for c in &self.clusters {
                    let mut first = true;
                    for i in c.indices() {
                        let names: &[String] = match &self.labels {
                            Some(ls) => &ls[i],
                            None => &[],
                        };
                        if names.is_empty() {
                            if !first {
                                out.push(delim);
                            }
                            out.push_str(&format!("c{i}"));
                            first = false;
                        } else {
                            for n in names {
                                if !first {
                                    out.push(delim);
                                }
                                out.push_str(n);
                                first = false;
                            }
                        }
                    }
                    out.push('\n');
                }
                out
            }
        }
    }
}

/// Strips a trailing comment; returns `(content, had_comment)`.
fn strip_comment(line: &str) -> (&str, bool) {
    match line.find('#') {
        Some(pos) => (&line[..pos], true),
        None => (line, false),
    }
}

fn parse_labels(text: &str, opts: &ParseOptions) -> Result<ParseOutcome, FamilyError> {
    let mut index_of: HashMap<&str, usize> = HashMap::new();
    let mut names: Vec<String> = Vec::new();
    let mut rows: Vec<Vec<usize>> = Vec::new();

    for line in text.lines() {
        let (content, had_comment) = strip_comment(line);
        let tokens: Vec<&str> = match opts.delimiter {
            Some(d) => content.split(d).map(str::trim).filter(|t| !t.is_empty()).collect(),
            None => content.split_whitespace().collect(),
        };
        if tokens.is_empty() {
            // Comment-only lines are always skipped; blank lines form the
            // empty cluster only when the caller opted in.
            if !had_comment && opts.allow_empty {
                rows.push(Vec::new());
            }
            continue;
        }
        let mut row = Vec::with_capacity(tokens.len());
        for t in tokens {
            let next = index_of.len();
            let idx = *index_of.entry(t).or_insert(next);
            if idx == names.len() {
                names.push(t.to_owned());
            }
            row.push(idx);
        }
        rows.push(row);
    }

    if names.len() > MAX_RAW_UNIVERSE {
        return Err(FamilyError::UniverseTooLarge {
            cells: names.len(),
            cap: MAX_RAW_UNIVERSE,
        });
    }

    let parsed = rows.len();
    let universe = names.len();
    let clusters = rows
        .into_iter()
        .map(|row| Cluster::from_indices(universe, row))
        .collect();
    let labels = names.into_iter().map(|n| vec![n]).collect();
    let family = SetFamily::with_labels(universe, clusters, labels)?;
    let duplicates_dropped = parsed - family.len();
    Ok(ParseOutcome {
        family,
        duplicates_dropped,
    })
}

fn parse_hex(text: &str) -> Result<ParseOutcome, FamilyError> {
    let mut universe: Option<usize> = None;
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut parsed = 0usize;

    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let (content, _) = strip_comment(line);
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        let Some(u) = universe else {
            let mut it = content.split_whitespace();
            match (it.next(), it.next(), it.next()) {
                (Some("universe"), Some(n), None) => {
                    let n: usize = n.parse().map_err(|_| FamilyError::Parse {
                        line: lineno,
                        msg: format!("invalid universe size '{n}'"),
                    })?;
                    if n > MAX_RAW_UNIVERSE {
                        return Err(FamilyError::UniverseTooLarge {
                            cells: n,
                            cap: MAX_RAW_UNIVERSE,
                        });
                    }
                    universe = Some(n);
                }
                _ => {
                    return Err(FamilyError::Parse {
                        line: lineno,
                        msg: "expected 'universe <n>' header".to_owned(),
                    })
                }
            }
            continue;
        };
        let words = hex_words(content).ok_or_else(|| FamilyError::Parse {
            line: lineno,
            msg: format!("invalid hex bitmask '{content}'"),
        })?;
        let cluster = Cluster::from_words(u, words).map_err(|_| FamilyError::Parse {
            line: lineno,
            msg: "bitmask sets a bit outside the universe".to_owned(),
        })?;
        clusters.push(cluster);
        parsed += 1;
    }

    let universe = universe.ok_or_else(|| FamilyError::Parse {
        line: text.lines().count().max(1),
        msg: "missing 'universe <n>' header".to_owned(),
    })?;
    let family = SetFamily::new(universe, clusters)?;
    let duplicates_dropped = parsed - family.len();
    Ok(ParseOutcome {
        family,
        duplicates_dropped,
    })
}

fn hex_words(s: &str) -> Option<Vec<u64>> {
    let mut words = vec![0u64; (s.len() * 4).div_ceil(WORD_BITS).max(1)];
    for (i, ch) in s.chars().rev().enumerate() {
        let v = ch.to_digit(16)? as u64;
        let bit = i * 4;
        words[bit / WORD_BITS] |= v << (bit % WORD_BITS);
    }
    Some(words)
}
