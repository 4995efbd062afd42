//! Run configuration: flat `key = value` files, flag overrides, defaults.
//!
//! Precedence is flags > config file > built-in defaults. Config files
//! reject unknown and duplicated keys outright, so typos fail fast instead
//! of silently running with a default.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use eegwp::dataio::CaseName;
use eegwp::experiments::{CvMode, MetricAveraging, RunSpec, DEFAULT_SEED};
use eegwp::features::NodeSelection;
use eegwp::svm::{GammaSpec, SvmParams};
use eegwp::wpt::WaveletName;

/// Every key a config file may set.
pub const KNOWN_KEYS: [&str; 16] = [
    "data_root",
    "case",
    "k",
    "wavelet",
    "nodes",
    "c",
    "gamma",
    "tol",
    "max_passes",
    "normalize",
    "class_weight",
    "grid_search",
    "cv_mode",
    "averaging",
    "seed",
    "out_dir",
];

/// Shared option surface of the run, sweep, and reproduce commands. Every
/// field is optional here; resolution fills gaps from the config file and
/// then the defaults.
#[derive(Debug, Clone, clap::Args)]
pub struct RunArgs {
    /// Flat key=value config file; flags override file entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Dataset root containing the five set directories (Z, O, N, F, S).
    #[arg(long)]
    pub data_root: Option<PathBuf>,
    /// Classification case, e.g. AvsE or ABCDvsE.
    #[arg(long)]
    pub case: Option<CaseName>,
    /// Number of cross-validation folds.
    #[arg(long)]
    pub k: Option<usize>,
    /// Mother wavelet, e.g. bior1_1 or db4.
    #[arg(long)]
    pub wavelet: Option<WaveletName>,
    /// Wavelet-packet nodes read as features, e.g. 5:1,4:1,4:2.
    #[arg(long)]
    pub nodes: Option<NodeSelection>,
    /// SVM box constraint.
    #[arg(long)]
    pub c: Option<f64>,
    /// RBF kernel width: a number, or "scale" for 1/(d*var).
    #[arg(long)]
    pub gamma: Option<GammaSpec>,
    /// SMO convergence tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Cap on SMO optimization sweeps.
    #[arg(long)]
    pub max_passes: Option<usize>,
    /// Z-score features with training-fold statistics (true/false).
    #[arg(long)]
    pub normalize: Option<bool>,
    /// Scale the positive-class box constraint by the class ratio
    /// (true/false).
    #[arg(long)]
    pub class_weight: Option<bool>,
    /// Grid-search C and gamma per fold on the training portion
    /// (true/false).
    #[arg(long)]
    pub grid_search: Option<bool>,
    /// Fold construction: subsegment_stratified or grouped_by_segment.
    #[arg(long)]
    pub cv_mode: Option<CvMode>,
    /// Metric aggregation: pooled or per_fold_mean.
    #[arg(long)]
    pub averaging: Option<MetricAveraging>,
    /// Base seed for folds, training sweeps, and grid search.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for CSVs, tables, models, and the manifest.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

/// Fully resolved configuration of a single-case run (also the fixed side
/// of a sweep).
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub data_root: PathBuf,
    pub case: CaseName,
    pub k: usize,
    pub wavelet: WaveletName,
    pub nodes: NodeSelection,
    pub c: f64,
    pub gamma: GammaSpec,
    pub tol: f64,
    pub max_passes: usize,
    pub normalize: bool,
    pub class_weight: bool,
    pub grid_search: bool,
    pub cv_mode: CvMode,
    pub averaging: MetricAveraging,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn params(&self) -> SvmParams {
        SvmParams {
            c: self.c,
            gamma: self.gamma,
            tol: self.tol,
            max_passes: self.max_passes,
            normalize: self.normalize,
            class_weight: self.class_weight,
        }
    }

    pub fn run_spec(&self) -> RunSpec {
        RunSpec {
            case: self.case,
            k: self.k,
            wavelet: self.wavelet,
            selection: self.nodes.clone(),
            params: self.params(),
            seed: self.seed,
            cv_mode: self.cv_mode,
            averaging: self.averaging,
            grid_search: self.grid_search,
        }
    }

    /// Sorted key/value pairs for the run manifest.
    pub fn manifest_entries(&self) -> Vec<(String, String)> {
        vec![
            ("averaging".into(), self.averaging.to_string()),
            ("c".into(), self.c.to_string()),
            ("case".into(), self.case.to_string()),
            ("class_weight".into(), self.class_weight.to_string()),
            ("cv_mode".into(), self.cv_mode.to_string()),
            ("data_root".into(), self.data_root.display().to_string()),
            ("gamma".into(), self.gamma.to_string()),
            ("grid_search".into(), self.grid_search.to_string()),
            ("k".into(), self.k.to_string()),
            ("max_passes".into(), self.max_passes.to_string()),
            ("nodes".into(), self.nodes.to_string_canonical()),
            ("normalize".into(), self.normalize.to_string()),
            ("out_dir".into(), self.out_dir.display().to_string()),
            ("seed".into(), self.seed.to_string()),
            ("tol".into(), self.tol.to_string()),
            ("wavelet".into(), self.wavelet.to_string()),
        ]
    }
}

/// Options of the reproduce command: the shared surface plus protocol
/// scoping. Scoping stays flag-only (not config-file keys) so a config
/// file always describes the full protocol.
#[derive(Debug, Clone, clap::Args)]
pub struct ReproduceArgs {
    #[command(flatten)]
    pub base: RunArgs,
    /// Subset of cases to score (comma-separated; default: all seven).
    #[arg(long, value_delimiter = ',')]
    pub cases: Vec<CaseName>,
    /// Fold counts to score (comma-separated; default: 2,5,10).
    #[arg(long, value_delimiter = ',')]
    pub folds: Vec<usize>,
    /// Run the two adaptation sweeps before scoring (true/false;
    /// default true). When false, the configured wavelet and nodes are
    /// used directly.
    #[arg(long)]
    pub adapt: Option<bool>,
}

/// Fully resolved configuration of a reproduce run.
#[derive(Debug, Clone)]
pub struct ReproduceConfig {
    pub data_root: PathBuf,
    pub wavelet: WaveletName,
    pub nodes: NodeSelection,
    pub c: f64,
    pub gamma: GammaSpec,
    pub tol: f64,
    pub max_passes: usize,
    pub normalize: bool,
    pub class_weight: bool,
    pub grid_search: bool,
    pub cv_mode: CvMode,
    pub averaging: MetricAveraging,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub cases: Vec<CaseName>,
    pub ks: Vec<usize>,
    pub adapt: bool,
}

impl ReproduceConfig {
    pub fn params(&self) -> SvmParams {
        SvmParams {
            c: self.c,
            gamma: self.gamma,
            tol: self.tol,
            max_passes: self.max_passes,
            normalize: self.normalize,
            class_weight: self.class_weight,
        }
    }

    pub fn manifest_entries(&self) -> Vec<(String, String)> {
        let cases: Vec<String> = self.cases.iter().map(|c| c.to_string()).collect();
        let ks: Vec<String> = self.ks.iter().map(|k| k.to_string()).collect();
        vec![
            ("adapt".into(), self.adapt.to_string()),
            ("averaging".into(), self.averaging.to_string()),
            ("c".into(), self.c.to_string()),
            ("cases".into(), cases.join(",")),
            ("class_weight".into(), self.class_weight.to_string()),
            ("cv_mode".into(), self.cv_mode.to_string()),
            ("data_root".into(), self.data_root.display().to_string()),
            ("folds".into(), ks.join(",")),
            ("gamma".into(), self.gamma.to_string()),
            ("grid_search".into(), self.grid_search.to_string()),
            ("max_passes".into(), self.max_passes.to_string()),
            ("nodes".into(), self.nodes.to_string_canonical()),
            ("normalize".into(), self.normalize.to_string()),
            ("out_dir".into(), self.out_dir.display().to_string()),
            ("seed".into(), self.seed.to_string()),
            ("tol".into(), self.tol.to_string()),
            ("wavelet".into(), self.wavelet.to_string()),
        ]
    }
}

/// Parse a config file into raw key/value pairs, rejecting unknown and
/// duplicate keys.
pub fn parse_file(path: &Path) -> Result<BTreeMap<String, String>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
    parse_text(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_text(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut map = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key = value, got {line:?}", no + 1))?;
        let (key, value) = (key.trim(), value.trim());
        if !KNOWN_KEYS.contains(&key) {
            return Err(format!("line {}: unknown key {key:?}", no + 1));
        }
        if map.insert(key.to_string(), value.to_string()).is_some() {
            return Err(format!("line {}: duplicate key {key:?}", no + 1));
        }
    }
    Ok(map)
}

/// Flag value if given, else the parsed file entry, else `None`.
fn pick<T: FromStr>(
    file: &BTreeMap<String, String>,
    key: &str,
    flag: Option<T>,
) -> Result<Option<T>, String>
where
    T::Err: std::fmt::Display,
{
    if flag.is_some() {
        return Ok(flag);
    }
    match file.get(key) {
        Some(raw) => raw
            .parse::<T>()
            .map(Some)
            .map_err(|e| format!("config key {key} = {raw:?}: {e}")),
        None => Ok(None),
    }
}

struct Common {
    data_root: PathBuf,
    case: Option<CaseName>,
    k: Option<usize>,
    wavelet: WaveletName,
    nodes: NodeSelection,
    c: f64,
    gamma: GammaSpec,
    tol: f64,
    max_passes: usize,
    normalize: bool,
    class_weight: bool,
    grid_search: Option<bool>,
    cv_mode: CvMode,
    averaging: MetricAveraging,
    seed: u64,
    out_dir: PathBuf,
}

fn resolve_common(args: &RunArgs) -> Result<Common, String> {
    let file = match &args.config {
        Some(path) => parse_file(path)?,
        None => BTreeMap::new(),
    };
    let defaults = SvmParams::default();
    Ok(Common {
        data_root: pick(&file, "data_root", args.data_root.clone())?.ok_or(
            "data_root is required: pass --data-root or set data_root in the config file",
        )?,
        case: pick(&file, "case", args.case)?,
        k: pick(&file, "k", args.k)?,
        wavelet: pick(&file, "wavelet", args.wavelet)?.unwrap_or(WaveletName::Bior1_1),
        nodes: pick(&file, "nodes", args.nodes.clone())?
            .unwrap_or_else(NodeSelection::default_bases),
        c: pick(&file, "c", args.c)?.unwrap_or(defaults.c),
        gamma: pick(&file, "gamma", args.gamma)?.unwrap_or(defaults.gamma),
        tol: pick(&file, "tol", args.tol)?.unwrap_or(defaults.tol),
        max_passes: pick(&file, "max_passes", args.max_passes)?.unwrap_or(defaults.max_passes),
        normalize: pick(&file, "normalize", args.normalize)?.unwrap_or(defaults.normalize),
        class_weight: pick(&file, "class_weight", args.class_weight)?
            .unwrap_or(defaults.class_weight),
        grid_search: pick(&file, "grid_search", args.grid_search)?,
        cv_mode: pick(&file, "cv_mode", args.cv_mode)?.unwrap_or(CvMode::SubsegmentStratified),
        averaging: pick(&file, "averaging", args.averaging)?.unwrap_or(MetricAveraging::Pooled),
        seed: pick(&file, "seed", args.seed)?.unwrap_or(DEFAULT_SEED),
        out_dir: pick(&file, "out_dir", args.out_dir.clone())?
            .unwrap_or_else(|| PathBuf::from("eegwp-out")),
    })
}

/// Resolve the configuration of a run or sweep. Requires a case; folds
/// default to 2 and grid search to off.
pub fn resolve_run(args: &RunArgs) -> Result<RunConfig, String> {
    let common = resolve_common(args)?;
    let config = RunConfig {
        data_root: common.data_root,
        case: common
            .case
            .ok_or("case is required: pass --case (e.g. --case ABCDvsE)")?,
        k: common.k.unwrap_or(2),
        wavelet: common.wavelet,
        nodes: common.nodes,
        c: common.c,
        gamma: common.gamma,
        tol: common.tol,
        max_passes: common.max_passes,
        normalize: common.normalize,
        class_weight: common.class_weight,
        grid_search: common.grid_search.unwrap_or(false),
        cv_mode: common.cv_mode,
        averaging: common.averaging,
        seed: common.seed,
        out_dir: common.out_dir,
    };
    if config.k < 2 {
        return Err(format!("k must be at least 2, got {}", config.k));
    }
    config.params().validate().map_err(|e| e.to_string())?;
    Ok(config)
}

/// Resolve the configuration of a reproduce run. Case/k config entries are
/// ignored (the protocol fixes its own); grid search defaults to on and
/// the scope defaults to all cases at fold counts 2, 5, and 10.
pub fn resolve_reproduce(args: &ReproduceArgs) -> Result<ReproduceConfig, String> {
    let common = resolve_common(&args.base)?;
    let cases = if args.cases.is_empty() {
        CaseName::ALL.to_vec()
    } else {
        let mut seen = Vec::new();
        for case in &args.cases {
            if seen.contains(case) {
                return Err(format!("duplicate case {case} in --cases"));
            }
            seen.push(*case);
        }
        seen
    };
    let ks = if args.folds.is_empty() {
        vec![2, 5, 10]
    } else {
        let mut seen = Vec::new();
        for &k in &args.folds {
            if k < 2 {
                return Err(format!("fold count must be at least 2, got {k}"));
            }
            if seen.contains(&k) {
                return Err(format!("duplicate fold count {k} in --folds"));
            }
            seen.push(k);
        }
        seen
    };
    let config = ReproduceConfig {
        data_root: common.data_root,
        wavelet: common.wavelet,
        nodes: common.nodes,
        c: common.c,
        gamma: common.gamma,
        tol: common.tol,
        max_passes: common.max_passes,
        normalize: common.normalize,
        class_weight: common.class_weight,
        grid_search: common.grid_search.unwrap_or(true),
        cv_mode: common.cv_mode,
        averaging: common.averaging,
        seed: common.seed,
        out_dir: common.out_dir,
        cases,
        ks,
        adapt: args.adapt.unwrap_or(true),
    };
    config.params().validate().map_err(|e| e.to_string())?;
    Ok(config)
}
