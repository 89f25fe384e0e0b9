//! Command-line front end. Each subcommand reads files and writes one output
//! file that carries the metadata needed to re-run it.
//!
//! Exit codes: 0 on success, 1 on domain errors (one line on stderr,
//! `error: <token>: <message>`), 2 on usage errors.

mod artifact;
mod commands;

use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::clusterability::{default_schedule, Bucket, BucketRule};
use crate::moodspace::{ActVariant, MdsOptions};

#[derive(Parser, Debug)]
#[command(name = "act", version, about = "Mood spaces from social tags")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Match tags to the vocabulary, filter the corpus and build the TF-IDF matrix
    BuildVsm(BuildVsmArgs),
    /// Fit an SVD, NMF or PLSA model to a TF-IDF matrix
    Fit(FitArgs),
    /// Cosine term dissimilarities of an SVD model or of raw TF-IDF rows
    Dissim(DissimArgs),
    /// Non-metric MDS of a dissimilarity matrix
    Mds(MdsArgs),
    /// Align a term configuration to a valence-arousal reference
    ActFit(ActFitArgs),
    /// Valence, arousal, tension and term predictions for tagged tracks
    Predict(PredictArgs),
    /// Hopkins' index of track positions for each rank
    Hopkins(HopkinsArgs),
    /// Spearman correlation between predictions and listener ratings
    Evaluate(EvaluateArgs),
    /// Prediction quality as test-set tags are removed
    Ablate(AblateArgs),
    /// Terms closest to each mood dimension
    Proxy(ProxyArgs),
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long)]
    out: PathBuf,
    /// replace an existing output file
    #[arg(long)]
    overwrite: bool,
}

#[derive(Args, Debug, Clone)]
struct MdsFlags {
    #[arg(long, default_value_t = 4)]
    restarts: usize,
    #[arg(long = "mds-max-iter", default_value_t = 300)]
    mds_max_iter: usize,
    #[arg(long = "mds-tol", default_value_t = 1e-7)]
    mds_tol: f64,
}

impl MdsFlags {
    fn options(&self, dims: usize, seed: u64) -> MdsOptions {
        MdsOptions {
            dims,
            restarts: self.restarts,
            max_iter: self.mds_max_iter,
            tol: self.mds_tol,
            seed,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum FitMethod {
    Svd,
    Nmf,
    Plsa,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Method {
    Act,
    Svd,
    Nmf,
    Plsa,
    Vsm,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Variant {
    Standard,
    SvdOnly,
    MdsOnly,
}

impl From<Variant> for ActVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Standard => ActVariant::Standard,
            Variant::SvdOnly => ActVariant::SvdOnly,
            Variant::MdsOnly => ActVariant::MdsOnly,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Rule {
    Exact,
    AtLeast,
}

impl From<Rule> for BucketRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::Exact => BucketRule::Exact,
            Rule::AtLeast => BucketRule::AtLeast,
        }
    }
}

/// Comma-separated list of ranks.
#[derive(Debug, Clone, PartialEq)]
struct KList(Vec<usize>);

impl FromStr for KList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut out = Vec::new();
        for part in s.split(',') {
            let k: usize = part.trim().parse().map_err(|_| format!("`{part}` is not a rank"))?;
            if k == 0 {
                return Err("ranks must be positive".into());
            }
            if out.contains(&k) {
                return Err(format!("rank {k} listed twice"));
            }
            out.push(k);
        }
        Ok(KList(out))
    }
}

/// `terms:tracks` pairs, e.g. `2:2048,3:1024`, or `default`.
#[derive(Debug, Clone, PartialEq)]
struct Schedule(Vec<Bucket>);

impl FromStr for Schedule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "default" {
            return Ok(Schedule(default_schedule()));
        }
        s.split(',')
            .map(|part| {
                let (t, n) = part
                    .split_once(':')
                    .ok_or_else(|| format!("`{part}` is not terms:tracks"))?;
                Ok(Bucket {
                    terms: t.trim().parse().map_err(|_| format!("bad term count in `{part}`"))?,
                    tracks: n.trim().parse().map_err(|_| format!("bad track count in `{part}`"))?,
                })
            })
            .collect::<Result<Vec<_>, String>>()
            .map(Schedule)
    }
}

/// Comma-separated list of terms.
#[derive(Debug, Clone, PartialEq)]
struct TermList(Vec<String>);

impl FromStr for TermList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let items: Vec<String> = s
            .split(',')
            .map(|t| t.trim().to_string())
            .filter(|t| !t.is_empty())
            .collect();
        if items.is_empty() {
            return Err("empty term list".into());
        }
        Ok(TermList(items))
    }
}

const DEFAULT_K: &str = "4,8,16,32,64,128,256";

#[derive(Args, Debug)]
struct BuildVsmArgs {
    /// tag file: track_id, artist, title, tag, count
    #[arg(long)]
    tags: PathBuf,
    /// vocabulary file: term, inflections
    #[arg(long)]
    vocab: PathBuf,
    #[arg(long, default_value_t = 100)]
    min_prevalence: usize,
    #[arg(long, default_value_t = 2)]
    min_terms: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[arg(long)]
    vsm: PathBuf,
    #[arg(long, value_enum)]
    method: FitMethod,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct DissimArgs {
    /// fitted SVD model
    #[arg(long, conflicts_with = "vsm", required_unless_present = "vsm")]
    model: Option<PathBuf>,
    /// TF-IDF matrix, for dissimilarities of the raw term rows
    #[arg(long)]
    vsm: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct MdsArgs {
    #[arg(long)]
    dissim: PathBuf,
    #[arg(long, default_value_t = 3)]
    dims: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    mds: MdsFlags,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ActFitArgs {
    /// reference file(s): term, valence, arousal; later files override earlier ones
    #[arg(long, required = true)]
    reference: Vec<PathBuf>,
    /// 3-D MDS embedding to align
    #[arg(long, conflicts_with = "vsm", required_unless_present = "vsm")]
    mds: Option<PathBuf>,
    /// TF-IDF matrix, to run a whole variant
    #[arg(long)]
    vsm: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "standard")]
    variant: Variant,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    mds_flags: MdsFlags,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct PredictArgs {
    #[arg(long)]
    act: PathBuf,
    #[arg(long)]
    vsm: PathBuf,
    #[arg(long)]
    vocab: PathBuf,
    #[arg(long)]
    tags: PathBuf,
    /// extra term scales, comma-separated
    #[arg(long)]
    terms: Option<TermList>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct HopkinsArgs {
    #[arg(long)]
    vsm: PathBuf,
    #[arg(long, default_value = DEFAULT_K)]
    k: KList,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    runs: usize,
    /// buckets as terms:tracks pairs, or `default`
    #[arg(long, default_value = "default")]
    schedule: Schedule,
    #[arg(long, value_enum, default_value = "exact")]
    rule: Rule,
    #[command(flatten)]
    mds: MdsFlags,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[arg(long)]
    vsm: PathBuf,
    #[arg(long)]
    vocab: PathBuf,
    /// tags of the rated test tracks
    #[arg(long)]
    tags: PathBuf,
    #[arg(long)]
    ratings: PathBuf,
    #[arg(long, value_enum, default_value = "act")]
    method: Method,
    #[arg(long, default_value = DEFAULT_K)]
    k: KList,
    #[arg(long, value_enum, default_value = "standard")]
    variant: Variant,
    /// reference file(s), required by --method act
    #[arg(long)]
    reference: Vec<PathBuf>,
    /// proxy terms for dimension scales (output of `act proxy`), used by the baselines
    #[arg(long)]
    proxy: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 50)]
    fold_in_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    fold_in_tol: f64,
    #[command(flatten)]
    mds: MdsFlags,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct AblateArgs {
    #[arg(long)]
    vsm: PathBuf,
    #[arg(long)]
    vocab: PathBuf,
    #[arg(long)]
    tags: PathBuf,
    #[arg(long)]
    ratings: PathBuf,
    #[arg(long, required = true)]
    reference: Vec<PathBuf>,
    #[arg(long, default_value = DEFAULT_K)]
    k: KList,
    #[arg(long, value_enum, default_value = "standard")]
    variant: Variant,
    #[arg(long, default_value_t = 10)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    mds: MdsFlags,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ProxyArgs {
    #[arg(long)]
    act: PathBuf,
    #[arg(long)]
    vsm: PathBuf,
    /// minimum share of tracks a candidate term must be associated with
    #[arg(long, default_value_t = 0.1)]
    min_share: f64,
    #[command(flatten)]
    output: Output,
}

fn one_line(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                print!("{e}");
                return 0;
            }
            _ => {
                let text = e.to_string();
                let first = text.lines().next().unwrap_or_default();
                eprintln!("error: usage: {}", one_line(first.trim_start_matches("error:")));
                return 2;
            }
        },
    };
    match commands::execute(&cli.command) {
        Ok(()) => 0,
        Err(commands::Failure::Usage(msg)) => {
            eprintln!("error: usage: {}", one_line(&msg));
            2
        }
        Err(commands::Failure::Domain(e, context)) => {
            let msg = match context {
                Some(c) => format!("{c}: {e}"),
                None => e.to_string(),
            };
            eprintln!("error: {}: {}", e.token(), one_line(&msg));
            1
        }
    }
}
