//! Study orchestration: fold planning, confusion metrics, cross-validated
//! case evaluation, configuration sweeps, and the full two-stage
//! reproduction protocol (adapt the node selection, adapt the wavelet, then
//! score every case at every fold count).
//!
//! Determinism contract: every randomized step draws from a seed derived
//! from the run seed with [`crate::folding::mix_seed`], and parallel fold
//! evaluation collects results in fold order, so repeated runs with the
//! same inputs produce identical output bytes regardless of thread count.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::dataio::{build_dataset, CaseName, CaseSpec, Label, Segment, SetId, SubSegment};
use crate::error::{Error, Result};
use crate::features::{
    extract_from_tree, FeatureVector, NodeSelection, DECOMPOSITION_LEVELS,
};
use crate::folding::{mix_seed, stratified_assignment};
use crate::svm::{self, SvmModel, SvmParams};
use crate::wpt::{filter_bank, wpt_decompose, WaveletName, WptTree};

pub mod reference;
pub mod report;

/// How cross-validation folds are cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CvMode {
    /// Stratify individual sub-segments by class: every fold sees the same
    /// class proportions, and windows of one recording may land in
    /// different folds (the default protocol).
    SubsegmentStratified,
    /// Keep all 17 windows of one recorded segment in the same fold, so no
    /// recording contributes to both sides of a split. Stricter: rules out
    /// intra-segment correlation leaking across folds.
    GroupedBySegment,
}

impl CvMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CvMode::SubsegmentStratified => "subsegment_stratified",
            CvMode::GroupedBySegment => "grouped_by_segment",
        }
    }
}

impl std::fmt::Display for CvMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CvMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "subsegment_stratified" => Ok(CvMode::SubsegmentStratified),
            "grouped_by_segment" => Ok(CvMode::GroupedBySegment),
            other => Err(Error::InvalidParams(format!(
                "unknown cv mode {other:?} (expected subsegment_stratified or grouped_by_segment)"
            ))),
        }
    }
}

/// How per-fold confusion counts aggregate into the reported metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricAveraging {
    /// Sum the folds' confusion counts, then compute rates from the pooled
    /// counts (micro-averaging, the default).
    Pooled,
    /// Compute rates per fold and average them unweighted.
    PerFoldMean,
}

impl MetricAveraging {
    pub fn as_str(self) -> &'static str {
        match self {
            MetricAveraging::Pooled => "pooled",
            MetricAveraging::PerFoldMean => "per_fold_mean",
        }
    }
}

impl std::fmt::Display for MetricAveraging {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MetricAveraging {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pooled" => Ok(MetricAveraging::Pooled),
            "per_fold_mean" => Ok(MetricAveraging::PerFoldMean),
            other => Err(Error::InvalidParams(format!(
                "unknown metric averaging {other:?} (expected pooled or per_fold_mean)"
            ))),
        }
    }
}

/// A reproducible fold assignment over one dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub mode: CvMode,
    /// `assignments[i]` is the fold index (`0..k`) of dataset item `i`.
    pub assignments: Vec<u32>,
}

impl FoldPlan {
    /// Number of items assigned to one fold.
    pub fn fold_len(&self, fold: u32) -> usize {
        self.assignments.iter().filter(|&&a| a == fold).count()
    }
}

/// Plan a k-fold split of the dataset. In stratified mode each class is
/// dealt round-robin after a seeded shuffle, so per-class fold sizes differ
/// by at most one; in grouped mode whole recording segments (17 windows
/// each) are dealt the same way. Deterministic for a fixed seed.
pub fn make_folds(
    items: &[FeatureVector],
    k: usize,
    seed: u64,
    mode: CvMode,
) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::InvalidParams(format!(
            "fold count must be at least 2, got {k}"
        )));
    }
    let assignments = match mode {
        CvMode::SubsegmentStratified => {
            let positive: Vec<bool> =
                items.iter().map(|fv| fv.label == Label::Seizure).collect();
            check_class_sizes(positive.iter().filter(|&&p| p).count(), positive.len(), k)?;
            stratified_assignment(&positive, k, seed)
        }
        CvMode::GroupedBySegment => {
            // One entry per distinct recording segment, in first-seen order.
            let mut group_of_item = Vec::with_capacity(items.len());
            let mut group_index: BTreeMap<(SetId, u16), usize> = BTreeMap::new();
            let mut group_positive: Vec<bool> = Vec::new();
            for fv in items {
                let key = (fv.provenance.set, fv.provenance.segment_index);
                let next = group_positive.len();
                let g = *group_index.entry(key).or_insert(next);
                if g == group_positive.len() {
                    group_positive.push(fv.label == Label::Seizure);
                }
                group_of_item.push(g);
            }
            check_class_sizes(
                group_positive.iter().filter(|&&p| p).count(),
                group_positive.len(),
                k,
            )?;
            let group_assignment = stratified_assignment(&group_positive, k, seed);
            group_of_item
                .iter()
                .map(|&g| group_assignment[g])
                .collect()
        }
    };
    Ok(FoldPlan {
        k,
        seed,
        mode,
        assignments,
    })
}

fn check_class_sizes(positives: usize, total: usize, k: usize) -> Result<()> {
    let negatives = total - positives;
    if positives < k {
        return Err(Error::ClassTooSmall {
            label: "seizure",
            size: positives,
            k,
        });
    }
    if negatives < k {
        return Err(Error::ClassTooSmall {
            label: "non_seizure",
            size: negatives,
            k,
        });
    }
    Ok(())
}

/// Binary confusion counts; seizure is the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Confusion {
    pub true_pos: u64,
    pub false_pos: u64,
    pub true_neg: u64,
    pub false_neg: u64,
}

impl Confusion {
    pub fn record(&mut self, truth: Label, predicted: Label) {
        match (truth, predicted) {
            (Label::Seizure, Label::Seizure) => self.true_pos += 1,
            (Label::Seizure, Label::NonSeizure) => self.false_neg += 1,
            (Label::NonSeizure, Label::Seizure) => self.false_pos += 1,
            (Label::NonSeizure, Label::NonSeizure) => self.true_neg += 1,
        }
    }

    pub fn merge(&mut self, other: &Confusion) {
        self.true_pos += other.true_pos;
        self.false_pos += other.false_pos;
        self.true_neg += other.true_neg;
        self.false_neg += other.false_neg;
    }

    pub fn total(&self) -> u64 {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }

    /// Classification accuracy `(TP+TN)/total`; 0 on an empty matrix.
    pub fn accuracy(&self) -> f64 {
        ratio(self.true_pos + self.true_neg, self.total())
    }

    /// True-positive rate `TP/(TP+FN)`; 0 when there are no positives.
    pub fn sensitivity(&self) -> f64 {
        ratio(self.true_pos, self.true_pos + self.false_neg)
    }

    /// True-negative rate `TN/(TN+FP)`; 0 when there are no negatives.
    pub fn specificity(&self) -> f64 {
        ratio(self.true_neg, self.true_neg + self.false_pos)
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Tally a confusion matrix from parallel truth/prediction slices.
pub fn confusion_from_predictions(truths: &[Label], predictions: &[Label]) -> Confusion {
    debug_assert_eq!(truths.len(), predictions.len());
    let mut confusion = Confusion::default();
    for (&truth, &predicted) in truths.iter().zip(predictions) {
        confusion.record(truth, predicted);
    }
    confusion
}

/// Headline rates (fractions in [0, 1]) plus the counts they came from.
/// Under pooled averaging the rates are computed from the summed counts;
/// under per-fold averaging they are unweighted means of per-fold rates,
/// while `confusion` still holds the summed counts for reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub confusion: Confusion,
    pub ca: f64,
    pub sensitivity: f64,
    pub specificity: f64,
}

impl Metrics {
    pub fn from_confusion(confusion: Confusion) -> Metrics {
        Metrics {
            confusion,
            ca: confusion.accuracy(),
            sensitivity: confusion.sensitivity(),
            specificity: confusion.specificity(),
        }
    }

    pub fn pooled(folds: &[Confusion]) -> Metrics {
        let mut merged = Confusion::default();
        for fold in folds {
            merged.merge(fold);
        }
        Metrics::from_confusion(merged)
    }

    pub fn per_fold_mean(folds: &[Confusion]) -> Metrics {
        assert!(!folds.is_empty(), "cannot average zero folds");
        let n = folds.len() as f64;
        let mut merged = Confusion::default();
        let (mut ca, mut sens, mut spec) = (0.0, 0.0, 0.0);
        for fold in folds {
            merged.merge(fold);
            ca += fold.accuracy();
            sens += fold.sensitivity();
            spec += fold.specificity();
        }
        Metrics {
            confusion: merged,
            ca: ca / n,
            sensitivity: sens / n,
            specificity: spec / n,
        }
    }

    pub fn aggregate(folds: &[Confusion], averaging: MetricAveraging) -> Metrics {
        match averaging {
            MetricAveraging::Pooled => Metrics::pooled(folds),
            MetricAveraging::PerFoldMean => Metrics::per_fold_mean(folds),
        }
    }
}

/// Full configuration of one cross-validated case evaluation.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub case: CaseName,
    pub k: usize,
    pub wavelet: WaveletName,
    pub selection: NodeSelection,
    pub params: SvmParams,
    pub seed: u64,
    pub cv_mode: CvMode,
    pub averaging: MetricAveraging,
    /// Re-pick (C, gamma) per fold by an inner grid search on that fold's
    /// training portion only.
    pub grid_search: bool,
}

/// Default run seed used when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 42;

impl RunSpec {
    /// A spec with the pipeline defaults: the adapted wavelet and node
    /// selection, default SVM parameters, stratified folds, pooled metrics,
    /// no grid search, seed [`DEFAULT_SEED`].
    pub fn new(case: CaseName, k: usize) -> RunSpec {
        RunSpec {
            case,
            k,
            wavelet: WaveletName::Bior1_1,
            selection: NodeSelection::default_bases(),
            params: SvmParams::default(),
            seed: DEFAULT_SEED,
            cv_mode: CvMode::SubsegmentStratified,
            averaging: MetricAveraging::Pooled,
            grid_search: false,
        }
    }
}

/// Outcome of one fold: held-out confusion counts, the parameters actually
/// trained with (differs from the requested ones when grid search is on),
/// and the fold's trained model.
#[derive(Debug, Clone)]
pub struct FoldResult {
    pub fold: u32,
    pub confusion: Confusion,
    pub params: SvmParams,
    pub model: SvmModel,
}

/// Outcome of one cross-validated case evaluation.
#[derive(Debug, Clone)]
pub struct CaseOutcome {
    pub metrics: Metrics,
    pub folds: Vec<FoldResult>,
    pub plan: FoldPlan,
}

/// Decompose every sub-segment once and read its feature vector.
pub fn extract_features(
    subs: &[SubSegment],
    wavelet: WaveletName,
    selection: &NodeSelection,
) -> Result<Vec<FeatureVector>> {
    let fb = filter_bank(wavelet);
    subs.par_iter()
        .map(|sub| {
            let tree = wpt_decompose(&sub.samples, &fb, DECOMPOSITION_LEVELS)?;
            extract_from_tree(&tree, selection, sub)
        })
        .collect()
}

/// Train and score every fold of a plan: for each fold, fit the normalizer
/// and SVM on the training portion only (optionally grid-searching C and
/// gamma there first) and tally the held-out confusion. Folds evaluate in
/// parallel; results are in fold order.
pub fn evaluate_folds(
    features: &[FeatureVector],
    plan: &FoldPlan,
    params: &SvmParams,
    grid_search: bool,
    seed: u64,
) -> Result<Vec<FoldResult>> {
    if features.len() != plan.assignments.len() {
        return Err(Error::InvalidParams(format!(
            "fold plan covers {} items but {} were given",
            plan.assignments.len(),
            features.len()
        )));
    }
    (0..plan.k as u32)
        .into_par_iter()
        .map(|fold| {
            let train_set: Vec<FeatureVector> = features
                .iter()
                .zip(&plan.assignments)
                .filter(|(_, &a)| a != fold)
                .map(|(fv, _)| fv.clone())
                .collect();
            let fold_seed = mix_seed(seed, 0x666f_6c64_0000 + fold as u64);
            let chosen = if grid_search {
                svm::grid_search(&train_set, params, fold_seed)?
            } else {
                params.clone()
            };
            let model = svm::train(&train_set, &chosen, fold_seed)?;
            let mut confusion = Confusion::default();
            for (fv, _) in features
                .iter()
                .zip(&plan.assignments)
                .filter(|(_, &a)| a == fold)
            {
                confusion.record(fv.label, svm::predict(&model, fv)?);
            }
            Ok(FoldResult {
                fold,
                confusion,
                params: chosen,
                model,
            })
        })
        .collect()
}

/// Evaluate one case end to end: build the labeled dataset, extract
/// features, plan folds, train/score every fold, and aggregate the metrics.
pub fn run_case(
    spec: &RunSpec,
    sets: &BTreeMap<SetId, Vec<Segment>>,
) -> Result<CaseOutcome> {
    spec.params.validate()?;
    let case = CaseSpec::for_name(spec.case);
    let subs = build_dataset(&case, sets)?;
    let features = extract_features(&subs, spec.wavelet, &spec.selection)?;
    let plan = make_folds(&features, spec.k, spec.seed, spec.cv_mode)?;
    let folds = evaluate_folds(&features, &plan, &spec.params, spec.grid_search, spec.seed)?;
    let confusions: Vec<Confusion> = folds.iter().map(|f| f.confusion).collect();
    let metrics = Metrics::aggregate(&confusions, spec.averaging);
    Ok(CaseOutcome {
        metrics,
        folds,
        plan,
    })
}

/// Train one model on the case's entire dataset (no held-out fold), for
/// saving as a deployable artifact. Grid search, when enabled, runs on the
/// full dataset.
pub fn fit_full_model(
    spec: &RunSpec,
    sets: &BTreeMap<SetId, Vec<Segment>>,
) -> Result<SvmModel> {
    spec.params.validate()?;
    let case = CaseSpec::for_name(spec.case);
    let subs = build_dataset(&case, sets)?;
    let features = extract_features(&subs, spec.wavelet, &spec.selection)?;
    let full_seed = mix_seed(spec.seed, 0x6675_6c6c);
    let params = if spec.grid_search {
        svm::grid_search(&features, &spec.params, full_seed)?
    } else {
        spec.params.clone()
    };
    svm::train(&features, &params, full_seed)
}

/// One sweep result: a configuration label and its cross-validated
/// classification accuracy (fraction).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub configuration: String,
    pub ca: f64,
}

/// The winning row: highest accuracy, earliest on ties.
pub fn sweep_winner(rows: &[SweepRow]) -> Option<&SweepRow> {
    rows.iter()
        .reduce(|best, row| if row.ca > best.ca { row } else { best })
}

/// The fixed evaluation context shared by every candidate in a sweep:
/// which case is scored, how it is folded, and the (non-searched) SVM
/// parameters.
#[derive(Debug, Clone)]
pub struct SweepContext {
    pub case: CaseName,
    pub k: usize,
    pub params: SvmParams,
    pub seed: u64,
    pub cv_mode: CvMode,
}

/// Score each candidate node selection with identical folds, a fixed
/// wavelet, and fixed SVM parameters; metrics are pooled. Every sub-segment
/// is decomposed once and shared across candidates.
pub fn sweep_bases(
    sets: &BTreeMap<SetId, Vec<Segment>>,
    candidates: &[NodeSelection],
    wavelet: WaveletName,
    ctx: &SweepContext,
) -> Result<Vec<SweepRow>> {
    if candidates.is_empty() {
        return Err(Error::InvalidSelection(
            "a sweep needs at least one candidate".into(),
        ));
    }
    // Uniqueness is order-insensitive: two selections reading the same
    // nodes are the same configuration.
    let mut seen = BTreeSet::new();
    for candidate in candidates {
        let mut key: Vec<_> = candidate
            .nodes()
            .iter()
            .map(|n| {
                let n = n.to_natural_order();
                (n.level, n.index)
            })
            .collect();
        key.sort_unstable();
        if !seen.insert(key) {
            return Err(Error::DuplicateCandidate(candidate.to_string_canonical()));
        }
    }
    ctx.params.validate()?;
    let subs = build_dataset(&CaseSpec::for_name(ctx.case), sets)?;
    let fb = filter_bank(wavelet);
    let trees: Vec<WptTree> = subs
        .par_iter()
        .map(|sub| wpt_decompose(&sub.samples, &fb, DECOMPOSITION_LEVELS))
        .collect::<Result<_>>()?;
    let mut plan: Option<FoldPlan> = None;
    let mut rows = Vec::with_capacity(candidates.len());
    for candidate in candidates {
        let features: Vec<FeatureVector> = trees
            .iter()
            .zip(&subs)
            .map(|(tree, sub)| extract_from_tree(tree, candidate, sub))
            .collect::<Result<_>>()?;
        if plan.is_none() {
            plan = Some(make_folds(&features, ctx.k, ctx.seed, ctx.cv_mode)?);
        }
        let plan = plan.as_ref().expect("plan was just created");
        let folds = evaluate_folds(&features, plan, &ctx.params, false, ctx.seed)?;
        let confusions: Vec<Confusion> = folds.iter().map(|f| f.confusion).collect();
        rows.push(SweepRow {
            configuration: candidate.to_string_canonical(),
            ca: Metrics::pooled(&confusions).ca,
        });
    }
    Ok(rows)
}

/// Score each candidate wavelet with identical folds and a fixed node
/// selection; metrics are pooled.
pub fn sweep_wavelets(
    sets: &BTreeMap<SetId, Vec<Segment>>,
    names: &[WaveletName],
    selection: &NodeSelection,
    ctx: &SweepContext,
) -> Result<Vec<SweepRow>> {
    if names.is_empty() {
        return Err(Error::InvalidSelection(
            "a sweep needs at least one candidate".into(),
        ));
    }
    let mut seen = BTreeSet::new();
    for name in names {
        if !seen.insert(*name) {
            return Err(Error::DuplicateCandidate(name.to_string()));
        }
    }
    ctx.params.validate()?;
    let subs = build_dataset(&CaseSpec::for_name(ctx.case), sets)?;
    let mut plan: Option<FoldPlan> = None;
    let mut rows = Vec::with_capacity(names.len());
    for &name in names {
        let features = extract_features(&subs, name, selection)?;
        if plan.is_none() {
            plan = Some(make_folds(&features, ctx.k, ctx.seed, ctx.cv_mode)?);
        }
        let plan = plan.as_ref().expect("plan was just created");
        let folds = evaluate_folds(&features, plan, &ctx.params, false, ctx.seed)?;
        let confusions: Vec<Confusion> = folds.iter().map(|f| f.confusion).collect();
        rows.push(SweepRow {
            configuration: name.to_string(),
            ca: Metrics::pooled(&confusions).ca,
        });
    }
    Ok(rows)
}

/// Configuration of the full reproduction protocol.
#[derive(Debug, Clone)]
pub struct ReproducePlan {
    /// Cases to score in the final stage.
    pub cases: Vec<CaseName>,
    /// Fold counts to score each case at.
    pub ks: Vec<usize>,
    /// Run the two adaptation sweeps first (node selection, then wavelet).
    /// When off, `wavelet` and `selection` below are used directly.
    pub adapt: bool,
    /// Grid-search (C, gamma) per fold in the final stage.
    pub grid_search: bool,
    pub wavelet: WaveletName,
    pub selection: NodeSelection,
    pub params: SvmParams,
    pub seed: u64,
    pub cv_mode: CvMode,
    pub averaging: MetricAveraging,
}

impl Default for ReproducePlan {
    fn default() -> Self {
        ReproducePlan {
            cases: CaseName::ALL.to_vec(),
            ks: vec![2, 5, 10],
            adapt: true,
            grid_search: true,
            wavelet: reference::BEST_WAVELET,
            selection: NodeSelection::default_bases(),
            params: SvmParams::default(),
            seed: DEFAULT_SEED,
            cv_mode: CvMode::SubsegmentStratified,
            averaging: MetricAveraging::Pooled,
        }
    }
}

/// One scored case × fold-count cell.
#[derive(Debug, Clone)]
pub struct CaseRow {
    pub case: CaseName,
    pub k: usize,
    pub metrics: Metrics,
}

/// Everything the reproduction protocol produced.
#[derive(Debug, Clone)]
pub struct ReproduceOutcome {
    /// Stage-1 sweep rows (node selections), present when adaptation ran.
    pub basis_sweep: Option<Vec<SweepRow>>,
    pub chosen_selection: NodeSelection,
    /// Stage-2 sweep rows (wavelets), present when adaptation ran.
    pub wavelet_sweep: Option<Vec<SweepRow>>,
    pub chosen_wavelet: WaveletName,
    /// Final-stage metrics, one row per (case, k), in plan order.
    pub case_rows: Vec<CaseRow>,
}

/// Run the full protocol: optionally adapt the node selection with the
/// sweep wavelet and then the wavelet with the winning selection (both on
/// the reference sweep case), then score every requested case at every
/// requested fold count with the winners.
pub fn reproduce(
    sets: &BTreeMap<SetId, Vec<Segment>>,
    plan: &ReproducePlan,
) -> Result<ReproduceOutcome> {
    if plan.cases.is_empty() || plan.ks.is_empty() {
        return Err(Error::InvalidParams(
            "reproduction needs at least one case and one fold count".into(),
        ));
    }
    let (basis_sweep, chosen_selection, wavelet_sweep, chosen_wavelet) = if plan.adapt {
        let ctx = SweepContext {
            case: reference::SWEEP_CASE,
            k: reference::SWEEP_FOLDS,
            params: plan.params.clone(),
            seed: plan.seed,
            cv_mode: plan.cv_mode,
        };
        let candidates = reference::basis_candidates();
        let basis_rows = sweep_bases(sets, &candidates, reference::SWEEP_WAVELET, &ctx)?;
        let winner = sweep_winner(&basis_rows)
            .expect("sweep of a non-empty candidate list has rows")
            .configuration
            .clone();
        let selection = NodeSelection::parse(&winner)?;
        let wavelet_rows = sweep_wavelets(sets, &reference::WAVELET_CANDIDATES, &selection, &ctx)?;
        let wavelet: WaveletName = sweep_winner(&wavelet_rows)
            .expect("sweep of a non-empty candidate list has rows")
            .configuration
            .parse()?;
        (Some(basis_rows), selection, Some(wavelet_rows), wavelet)
    } else {
        (None, plan.selection.clone(), None, plan.wavelet)
    };

    let mut case_rows = Vec::with_capacity(plan.cases.len() * plan.ks.len());
    for &case in &plan.cases {
        for &k in &plan.ks {
            let spec = RunSpec {
                case,
                k,
                wavelet: chosen_wavelet,
                selection: chosen_selection.clone(),
                params: plan.params.clone(),
                seed: plan.seed,
                cv_mode: plan.cv_mode,
                averaging: plan.averaging,
                grid_search: plan.grid_search,
            };
            let outcome = run_case(&spec, sets)?;
            case_rows.push(CaseRow {
                case,
                k,
                metrics: outcome.metrics,
            });
        }
    }
    Ok(ReproduceOutcome {
        basis_sweep,
        chosen_selection,
        wavelet_sweep,
        chosen_wavelet,
        case_rows,
    })
}
