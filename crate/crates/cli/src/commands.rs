//! The count, energy, and extremal subcommands plus shared family I/O.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;
use uplus_core::counting::{
    count_kfold, count_partition_triples, count_tripartite, empirical_exponent_series,
    extremal_family,
};
use uplus_core::energy::{
    cross_cauchy_schwarz_check, energy_split, CrossCheck, CubeSet, EnergyReport, EnergySplit,
};
use uplus_core::family::{Cluster, InputFormat, ParseOptions, SetFamily};

use crate::{emit, to_json, with_pool, Verdict};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatKind {
    /// One cluster per line, whitespace- or delimiter-separated cell labels.
    Labels,
    /// A `universe <n>` header, then one hex bitmask per line.
    Hex,
}

#[derive(Args, Clone)]
pub struct FormatArgs {
    /// Input format for family files.
    #[arg(long, value_enum, default_value = "labels")]
    pub format: FormatKind,
    /// Token delimiter for the labels format (default: any whitespace).
    #[arg(long)]
    pub delimiter: Option<char>,
    /// Treat blank lines as the empty cluster instead of skipping them.
    #[arg(long)]
    pub allow_empty: bool,
}

impl FormatArgs {
    pub fn options(&self) -> ParseOptions {
        ParseOptions {
            format: match self.format {
                FormatKind::Labels => InputFormat::Labels,
                FormatKind::Hex => InputFormat::BitmaskHex,
            },
            delimiter: self.delimiter,
            allow_empty: self.allow_empty,
        }
    }
}

pub fn read_family(path: &Path, opts: &ParseOptions) -> Result<SetFamily> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let outcome =
        SetFamily::parse(&text, opts).with_context(|| format!("parsing {}", path.display()))?;
    Ok(outcome.family)
}

/// Re-embeds label-format families into one shared universe so that cells
/// with the same name coincide across files. Hex families are positional and
/// must already declare equal universes.
fn align_universes(fams: Vec<SetFamily>, opts: &ParseOptions) -> Result<Vec<SetFamily>> {
    if opts.format == InputFormat::BitmaskHex {
        let expected = fams[0].universe_size();
        for f in &fams[1..] {
            if f.universe_size() != expected {
                bail!(
                    "hex families must declare the same universe ({expected} vs {})",
                    f.universe_size()
                );
            }
        }
        return Ok(fams);
    }
    let mut names = BTreeSet::new();
    for f in &fams {
        for group in f.labels().expect("label-format families carry labels") {
            names.extend(group.iter().cloned());
        }
    }
    let joint: Vec<String> = names.into_iter().collect();
    let index: HashMap<&str, usize> = joint
        .iter()
        .enumerate()
        .map(|(i, name)| (name.as_str(), i))
        .collect();
    fams.iter()
        .map(|f| {
            let labels = f.labels().expect("label-format families carry labels");
            let clusters = f
                .clusters()
                .iter()
                .map(|c| {
                    Cluster::from_indices(
                        joint.len(),
                        c.indices()
                            .flat_map(|cell| labels[cell].iter().map(|name| index[name.as_str()])),
                    )
                })
                .collect();
            let groups = joint.iter().map(|name| vec![name.clone()]).collect();
            Ok(SetFamily::with_labels(joint.len(), clusters, groups)?)
        })
        .collect()
}

#[derive(Args)]
pub struct CountArgs {
    /// Family file; omit when using --extremal or --series.
    pub file: Option<PathBuf>,
    /// Count the extremal family on N cells instead of reading a file.
    #[arg(long, value_name = "N", conflicts_with = "file")]
    pub extremal: Option<usize>,
    /// Counts and exponents of the extremal families n = 3, 6, .., N.
    #[arg(long, value_name = "N", conflicts_with_all = ["file", "extremal", "kfold", "tripartite"])]
    pub series: Option<usize>,
    /// Count ordered (k-1)-tuples of disjoint clusters instead of triples.
    #[arg(long, value_name = "K", conflicts_with = "tripartite")]
    pub kfold: Option<usize>,
    /// Two further family files X1, X2: count disjoint pairs from X1 x X2
    /// whose union lies in the main family.
    #[arg(long, num_args = 2, value_names = ["X1", "X2"], requires = "file")]
    pub tripartite: Option<Vec<PathBuf>>,
    #[command(flatten)]
    pub fmt: FormatArgs,
    /// Worker-pool size (default: rayon's choice).
    #[arg(long, value_name = "T")]
    pub threads: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Test hook: override the main-bound exponent.
    #[arg(long, hide = true, value_name = "EXPONENT")]
    pub falsify_exponent: Option<f64>,
}

pub fn count(args: &CountArgs) -> Result<Verdict> {
    if let Some(n_max) = args.series {
        let rows = with_pool(args.threads, || empirical_exponent_series(n_max))??;
        emit(args.output.as_ref(), &to_json(&rows)?)?;
        return Ok(Verdict::Pass);
    }
    let opts = args.fmt.options();
    let fam = match (&args.file, args.extremal) {
        (Some(path), None) => read_family(path, &opts)?,
        (None, Some(n)) => extremal_family(n)?,
        (None, None) => bail!("provide a family file, --extremal N, or --series N"),
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    };

    if let Some(paths) = &args.tripartite {
        let x1 = read_family(&paths[0], &opts)?;
        let x2 = read_family(&paths[1], &opts)?;
        let mut aligned = align_universes(vec![fam, x1, x2], &opts)?;
        let (x2, x1, x) = (
            aligned.pop().unwrap(),
            aligned.pop().unwrap(),
            aligned.pop().unwrap(),
        );
        let report = with_pool(args.threads, || count_tripartite(&x, &x1, &x2))??;
        let mut verdict = Verdict::Pass;
        if !report.bound_holds() {
            eprintln!(
                "tripartite bound violated: {} tuples > {} (sizes {:?})",
                report.tuples, report.bound, report.sizes
            );
            verdict = Verdict::Violation;
        }
        emit(args.output.as_ref(), &to_json(&report)?)?;
        return Ok(verdict);
    }

    if let Some(k) = args.kfold {
        let report = with_pool(args.threads, || count_kfold(&fam, k))??;
        let mut verdict = Verdict::Pass;
        if !report.bound_holds() {
            eprintln!(
                "k-fold bound violated: {} tuples > {} (|X| = {}, k = {})",
                report.tuples, report.bound, report.family_size, report.k
            );
            verdict = Verdict::Violation;
        }
        emit(args.output.as_ref(), &to_json(&report)?)?;
        return Ok(verdict);
    }

    let mut report = with_pool(args.threads, || count_partition_triples(&fam))??;
    if let Some(exponent) = args.falsify_exponent {
        report.bound_main = (report.family_size as f64).powf(exponent);
    }
    let mut verdict = Verdict::Pass;
    if !report.main_bound_holds() {
        eprintln!(
            "main bound violated: {} triples > {} (|X| = {})",
            report.triples, report.bound_main, report.family_size
        );
        verdict = Verdict::Violation;
    }
    if !report.trivial_bound_holds() {
        eprintln!(
            "trivial bound violated: {} triples > |X|^2 (|X| = {})",
            report.triples, report.family_size
        );
        verdict = Verdict::Violation;
    }
    emit(args.output.as_ref(), &to_json(&report)?)?;
    Ok(verdict)
}

#[derive(Args)]
pub struct EnergyArgs {
    /// Cube-set file: a `dim <n>` header, then one hex point per line.
    pub file: Option<PathBuf>,
    /// Use the full cube {0,1}^N instead of a file.
    #[arg(long, value_name = "N", conflicts_with = "file")]
    pub cube: Option<usize>,
    /// Also report the coordinate-split recursion at this coordinate.
    #[arg(long, value_name = "COORD")]
    pub split: Option<usize>,
    /// Worker-pool size (default: rayon's choice).
    #[arg(long, value_name = "T")]
    pub threads: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Serialize)]
struct SplitSection {
    coord: usize,
    #[serde(flatten)]
    terms: EnergySplit,
    cross_check: CrossCheck,
}

#[derive(Serialize)]
struct EnergyOutput {
    #[serde(flatten)]
    report: EnergyReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    split: Option<SplitSection>,
}

pub fn energy(args: &EnergyArgs) -> Result<Verdict> {
    let set = match (&args.file, args.cube) {
        (Some(path), None) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            CubeSet::parse(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        (None, Some(n)) => CubeSet::full_cube(n)?,
        (None, None) => bail!("provide a cube-set file or --cube N"),
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    };
    let report = with_pool(args.threads, || uplus_core::energy::energy(&set))??;
    let mut verdict = Verdict::Pass;
    if !report.bound_holds() {
        eprintln!(
            "energy bound violated: {} > {} (|A| = {})",
            report.energy, report.bound, report.size
        );
        verdict = Verdict::Violation;
    }
    let split = match args.split {
        Some(coord) => {
            let terms = energy_split(&set, coord)?;
            let cross_check = cross_cauchy_schwarz_check(&set, coord)?;
            if terms.total() != report.energy {
                eprintln!(
                    "split recursion mismatch at coordinate {coord}: {} != {}",
                    terms.total(),
                    report.energy
                );
                verdict = Verdict::Violation;
            }
            if !cross_check.holds {
                eprintln!(
                    "cross-term bound violated at coordinate {coord}: {}^2 > {}",
                    terms.cross, cross_check.energy_product
                );
                verdict = Verdict::Violation;
            }
            Some(SplitSection {
                coord,
                terms,
                cross_check,
            })
        }
        None => None,
    };
    emit(args.output.as_ref(), &to_json(&EnergyOutput { report, split })?)?;
    Ok(verdict)
}

#[derive(Args)]
pub struct ExtremalArgs {
    /// Universe size; must be divisible by 3 (3..=33).
    pub n: usize,
    #[command(flatten)]
    pub fmt: FormatArgs,
    /// Write the family here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

pub fn extremal(args: &ExtremalArgs) -> Result<Verdict> {
    let fam = extremal_family(args.n)?;
    emit(args.output.as_ref(), &fam.to_text(&args.fmt.options()))?;
    Ok(Verdict::Pass)
}
