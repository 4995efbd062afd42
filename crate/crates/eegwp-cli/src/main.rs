//! Command-line driver for the wavelet-packet EEG seizure-classification
//! pipeline: dataset validation, cross-validated case runs, configuration
//! sweeps, and the full reproduction protocol with reference comparisons.
//!
//! Exit codes: 0 on success, 1 when computation or data loading fails,
//! 2 on usage or configuration errors.

mod config;

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ReproduceArgs, RunArgs};
use eegwp::dataio::{load_set, CaseSpec, Segment, SetId, EPOCHS_PER_SET, SEGMENT_LEN};
use eegwp::experiments::report::{self, ReportContext};
use eegwp::experiments::{self, reference, CaseRow, Metrics, ReproducePlan, RunSpec};
use eegwp::features::NodeSelection;
use eegwp::svm;
use eegwp::wpt::WaveletName;

#[derive(Parser)]
#[command(
    name = "eegwp",
    version,
    about = "Wavelet-packet + SVM epileptic-seizure classification pipeline"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a dataset directory for conformance (5 sets x 100 epochs x
    /// 4097 samples each).
    Validate {
        /// Dataset root containing the five set directories (Z, O, N, F, S).
        data_root: PathBuf,
    },
    /// Cross-validate one classification case; write metrics, a model
    /// trained on the full dataset, and a manifest.
    Run(RunArgs),
    /// Compare candidate configurations: node selections or mother
    /// wavelets.
    Sweep(SweepArgs),
    /// Full protocol: adapt the node selection and wavelet, score the
    /// cases at every fold count, and compare with the embedded reference
    /// results.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum SweepKind {
    /// Vary the node selection with a fixed wavelet.
    Bases,
    /// Vary the mother wavelet with a fixed node selection.
    Wavelets,
}

#[derive(Debug, Clone, clap::Args)]
struct SweepArgs {
    #[command(flatten)]
    base: RunArgs,
    /// What to sweep.
    #[arg(long, value_enum)]
    sweep: SweepKind,
    /// Candidate list: node selections separated by ';'
    /// (e.g. "5:1,4:1,4:2;5:0,5:1,4:1"), or wavelet names separated by ','.
    /// Defaults to the built-in reference candidates.
    #[arg(long)]
    candidates: Option<String>,
}

/// Failures split by exit code: usage/configuration errors exit 2,
/// runtime failures exit 1.
enum AppError {
    Usage(String),
    Run(String),
}

impl From<eegwp::Error> for AppError {
    fn from(error: eegwp::Error) -> Self {
        AppError::Run(error.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { data_root } => cmd_validate(&data_root),
        Command::Run(args) => cmd_run(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Reproduce(args) => cmd_reproduce(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(AppError::Run(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn cmd_validate(data_root: &Path) -> Result<(), AppError> {
    check_data_root(data_root)?;
    let mut epochs = 0;
    for set in SetId::ALL {
        let segments = load_set(data_root, set)?;
        for segment in &segments {
            segment.validate()?;
        }
        println!(
            "set {set}: {} epochs x {SEGMENT_LEN} samples - OK",
            segments.len()
        );
        epochs += segments.len();
    }
    println!("{} sets, {epochs} epochs, OK", SetId::ALL.len());
    Ok(())
}

fn cmd_run(args: &RunArgs) -> Result<(), AppError> {
    let cfg = config::resolve_run(args).map_err(AppError::Usage)?;
    let sets = load_sets(&cfg.data_root, &CaseSpec::for_name(cfg.case).all_sets())?;
    let spec = cfg.run_spec();
    let outcome = experiments::run_case(&spec, &sets)?;
    let model = experiments::fit_full_model(&spec, &sets)?;

    let rows = vec![CaseRow {
        case: cfg.case,
        k: cfg.k,
        metrics: outcome.metrics,
    }];
    let table = report::case_table(&rows);
    let mut text = table.clone();
    text.push('\n');
    text.push_str("per-fold results\n");
    for fold in &outcome.folds {
        let m = Metrics::from_confusion(fold.confusion);
        writeln!(
            text,
            "fold {}: ca {:.2}%  sens {:.2}%  spec {:.2}%  (c = {}, gamma = {})",
            fold.fold,
            m.ca * 100.0,
            m.sensitivity * 100.0,
            m.specificity * 100.0,
            fold.params.c,
            fold.params.gamma,
        )
        .expect("writing to a string cannot fail");
    }

    let ctx = ReportContext::from(&spec);
    let mut metrics_csv = Vec::new();
    report::case_csv(&mut metrics_csv, &rows, &ctx)?;
    let mut model_txt = Vec::new();
    svm::save_model(&mut model_txt, &model, cfg.wavelet, &cfg.nodes)?;

    write_atomic(&cfg.out_dir, "metrics.csv", &metrics_csv)?;
    write_atomic(&cfg.out_dir, "metrics.txt", text.as_bytes())?;
    write_atomic(&cfg.out_dir, "model.txt", &model_txt)?;
    let manifest = manifest_text("run", cfg.manifest_entries());
    write_atomic(&cfg.out_dir, "manifest.txt", manifest.as_bytes())?;

    print!("{table}");
    println!("wrote {}", cfg.out_dir.display());
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), AppError> {
    let cfg = config::resolve_run(&args.base).map_err(AppError::Usage)?;
    let sets = load_sets(&cfg.data_root, &CaseSpec::for_name(cfg.case).all_sets())?;
    let ctx = experiments::SweepContext {
        case: cfg.case,
        k: cfg.k,
        params: cfg.params(),
        seed: cfg.seed,
        cv_mode: cfg.cv_mode,
    };
    let (rows, subject, comparison) = match args.sweep {
        SweepKind::Bases => {
            let candidates = match &args.candidates {
                Some(text) => parse_selection_list(text).map_err(AppError::Usage)?,
                None => reference::basis_candidates(),
            };
            let rows = experiments::sweep_bases(&sets, &candidates, cfg.wavelet, &ctx)?;
            let comparison = report::sweep_comparison_table(&rows);
            (rows, "node selection", Some(comparison))
        }
        SweepKind::Wavelets => {
            let names = match &args.candidates {
                Some(text) => parse_wavelet_list(text).map_err(AppError::Usage)?,
                None => reference::WAVELET_CANDIDATES.to_vec(),
            };
            let rows = experiments::sweep_wavelets(&sets, &names, &cfg.nodes, &ctx)?;
            (rows, "mother wavelet", None)
        }
    };

    let mut text = report::sweep_table(&rows, subject);
    if let Some(comparison) = comparison {
        text.push('\n');
        text.push_str("comparison with reference results\n");
        text.push_str(&comparison);
    }
    // The swept dimension varies per row (it is the `configuration`
    // column), so blank it in the fixed-context columns.
    let mut ctx = ReportContext::from(&cfg.run_spec());
    match args.sweep {
        SweepKind::Bases => ctx.selection = "-".into(),
        SweepKind::Wavelets => ctx.wavelet = "-".into(),
    }
    let mut rows_csv = Vec::new();
    report::sweep_csv(&mut rows_csv, &rows, &ctx)?;

    write_atomic(&cfg.out_dir, "sweep.csv", &rows_csv)?;
    write_atomic(&cfg.out_dir, "sweep.txt", text.as_bytes())?;
    let manifest = manifest_text("sweep", cfg.manifest_entries());
    write_atomic(&cfg.out_dir, "manifest.txt", manifest.as_bytes())?;

    print!("{text}");
    println!("wrote {}", cfg.out_dir.display());
    Ok(())
}

fn cmd_reproduce(args: &ReproduceArgs) -> Result<(), AppError> {
    let cfg = config::resolve_reproduce(args).map_err(AppError::Usage)?;
    let mut needed: BTreeSet<SetId> = BTreeSet::new();
    for &case in &cfg.cases {
        needed.extend(CaseSpec::for_name(case).all_sets());
    }
    if cfg.adapt {
        needed.extend(CaseSpec::for_name(reference::SWEEP_CASE).all_sets());
    }
    let needed: Vec<SetId> = needed.into_iter().collect();
    let sets = load_sets(&cfg.data_root, &needed)?;

    let plan = ReproducePlan {
        cases: cfg.cases.clone(),
        ks: cfg.ks.clone(),
        adapt: cfg.adapt,
        grid_search: cfg.grid_search,
        wavelet: cfg.wavelet,
        selection: cfg.nodes.clone(),
        params: cfg.params(),
        seed: cfg.seed,
        cv_mode: cfg.cv_mode,
        averaging: cfg.averaging,
    };
    let outcome = experiments::reproduce(&sets, &plan)?;

    let mut text = String::new();
    if let Some(rows) = &outcome.basis_sweep {
        text.push_str("node-selection sweep\n");
        text.push_str(&report::sweep_table(rows, "node selection"));
        text.push('\n');
        text.push_str("comparison with reference results\n");
        text.push_str(&report::sweep_comparison_table(rows));
        text.push('\n');
    }
    if let Some(rows) = &outcome.wavelet_sweep {
        text.push_str("mother-wavelet sweep\n");
        text.push_str(&report::sweep_table(rows, "mother wavelet"));
        text.push('\n');
    }
    writeln!(
        text,
        "scoring configuration: wavelet {}, nodes {}",
        outcome.chosen_wavelet,
        outcome.chosen_selection.to_string_canonical()
    )
    .expect("writing to a string cannot fail");
    text.push('\n');
    text.push_str("case metrics\n");
    text.push_str(&report::case_table(&outcome.case_rows));
    let comparison = report::comparison_rows(&outcome.case_rows);
    if !comparison.is_empty() {
        text.push('\n');
        text.push_str("comparison with reference results (deltas in percentage points)\n");
        text.push_str(&report::comparison_table(&comparison));
    }

    // Provenance stamp for the case CSV: the configuration the final stage
    // actually ran with (post-adaptation winners included).
    let ctx = ReportContext::from(&RunSpec {
        case: cfg.cases[0],
        k: cfg.ks[0],
        wavelet: outcome.chosen_wavelet,
        selection: outcome.chosen_selection.clone(),
        params: cfg.params(),
        seed: cfg.seed,
        cv_mode: cfg.cv_mode,
        averaging: cfg.averaging,
        grid_search: cfg.grid_search,
    });
    let mut case_csv = Vec::new();
    report::case_csv(&mut case_csv, &outcome.case_rows, &ctx)?;
    let mut comparison_csv = Vec::new();
    report::comparison_csv(&mut comparison_csv, &comparison)?;

    write_atomic(&cfg.out_dir, "case_metrics.csv", &case_csv)?;
    write_atomic(&cfg.out_dir, "comparison.csv", &comparison_csv)?;
    if let Some(rows) = &outcome.basis_sweep {
        let sweep_ctx = ReportContext {
            wavelet: reference::SWEEP_WAVELET.to_string(),
            selection: "-".into(),
            params: cfg.params(),
            grid_search: false,
            cv_mode: cfg.cv_mode,
            averaging: experiments::MetricAveraging::Pooled,
            seed: cfg.seed,
        };
        let mut csv = Vec::new();
        report::sweep_csv(&mut csv, rows, &sweep_ctx)?;
        write_atomic(&cfg.out_dir, "basis_sweep.csv", &csv)?;
    }
    if let Some(rows) = &outcome.wavelet_sweep {
        let sweep_ctx = ReportContext {
            wavelet: "-".into(),
            selection: outcome.chosen_selection.to_string_canonical(),
            params: cfg.params(),
            grid_search: false,
            cv_mode: cfg.cv_mode,
            averaging: experiments::MetricAveraging::Pooled,
            seed: cfg.seed,
        };
        let mut csv = Vec::new();
        report::sweep_csv(&mut csv, rows, &sweep_ctx)?;
        write_atomic(&cfg.out_dir, "wavelet_sweep.csv", &csv)?;
    }
    write_atomic(&cfg.out_dir, "report.txt", text.as_bytes())?;
    let mut entries = cfg.manifest_entries();
    entries.push((
        "chosen_nodes".into(),
        outcome.chosen_selection.to_string_canonical(),
    ));
    entries.push(("chosen_wavelet".into(), outcome.chosen_wavelet.to_string()));
    let manifest = manifest_text("reproduce", entries);
    write_atomic(&cfg.out_dir, "manifest.txt", manifest.as_bytes())?;

    print!("{text}");
    println!("wrote {}", cfg.out_dir.display());
    Ok(())
}

/// Semicolon-separated node selections, e.g. "5:1,4:1,4:2;5:0,5:1,4:1".
fn parse_selection_list(text: &str) -> Result<Vec<NodeSelection>, String> {
    let candidates: Vec<NodeSelection> = text
        .split(';')
        .map(|part| NodeSelection::parse(part).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    if candidates.is_empty() {
        return Err("empty candidate list".into());
    }
    Ok(candidates)
}

/// Comma-separated wavelet names, e.g. "db2,sym4,bior1_1".
fn parse_wavelet_list(text: &str) -> Result<Vec<WaveletName>, String> {
    let names: Vec<WaveletName> = text
        .split(',')
        .map(|part| part.trim().parse().map_err(|e: eegwp::Error| e.to_string()))
        .collect::<Result<_, _>>()?;
    if names.is_empty() {
        return Err("empty candidate list".into());
    }
    Ok(names)
}

fn check_data_root(root: &Path) -> Result<(), AppError> {
    if root.is_dir() {
        return Ok(());
    }
    Err(AppError::Run(format!(
        "data root {} not found; pass --data-root pointing at the Bonn EEG dataset: \
         five directories Z, O, N, F, S (sets A-E), each holding {EPOCHS_PER_SET} \
         plain-text epochs of {SEGMENT_LEN} samples (see README.md for the layout \
         and download instructions)",
        root.display()
    )))
}

fn load_sets(
    root: &Path,
    ids: &[SetId],
) -> Result<std::collections::BTreeMap<SetId, Vec<Segment>>, AppError> {
    check_data_root(root)?;
    let mut sets = std::collections::BTreeMap::new();
    for &id in ids {
        sets.insert(id, load_set(root, id)?);
    }
    Ok(sets)
}

/// Deterministic run manifest: tool version, command, and the resolved
/// configuration, sorted by key. Deliberately carries no timestamps so
/// identical runs produce identical bytes.
fn manifest_text(command: &str, mut entries: Vec<(String, String)>) -> String {
    entries.sort();
    let mut out = String::new();
    writeln!(out, "tool = eegwp {}", env!("CARGO_PKG_VERSION"))
        .expect("writing to a string cannot fail");
    writeln!(out, "command = {command}").expect("writing to a string cannot fail");
    for (key, value) in entries {
        writeln!(out, "{key} = {value}").expect("writing to a string cannot fail");
    }
    out
}

/// Write a file via a temp file and rename, so a crash can never leave a
/// partially written file at the target path.
fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), AppError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| AppError::Run(format!("cannot create {}: {e}", dir.display())))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| {
        AppError::Run(format!("cannot create a temp file in {}: {e}", dir.display()))
    })?;
    tmp.write_all(bytes)
        .map_err(|e| AppError::Run(format!("cannot write {name}: {e}")))?;
    let target = dir.join(name);
    tmp.persist(&target)
        .map_err(|e| AppError::Run(format!("cannot move {name} into place: {e}")))?;
    Ok(())
}
