//! Soft-margin binary SVM with an RBF kernel, trained from scratch by
//! sequential minimal optimization (SMO).
//!
//! The trainer solves the dual problem
//! `max Σαᵢ − ½ ΣΣ αᵢαⱼyᵢyⱼK(xᵢ,xⱼ)` subject to `0 ≤ αᵢ ≤ Cᵢ` and
//! `Σαᵢyᵢ = 0` by repeatedly optimizing one pair of dual variables
//! analytically: the first index comes from a seeded-shuffled sweep over
//! KKT violators, the second from the max-|E₁−E₂| heuristic with seeded
//! random-start fallbacks. Training is single-threaded and deterministic
//! for a fixed seed.
//!
//! A trained model carries the z-score normalizer fitted on its training
//! data (or the identity when normalization is disabled), so prediction
//! takes raw feature vectors. Seizure is the positive class (`y = +1`).

use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataio::Label;
use crate::error::{Error, Result};
use crate::features::{
    normalize_values, normalizer_fit, FeatureVector, NodeSelection, Normalizer,
};
use crate::folding::{mix_seed, stratified_assignment};
use crate::wpt::WaveletName;

/// Largest training-set size for which the full Gram matrix is cached;
/// larger problems recompute kernel rows on demand.
pub const GRAM_CACHE_LIMIT: usize = 10_000;

/// Kernel width: a fixed value, or the data-driven rule `1/(d·var(X))`
/// evaluated on the matrix the kernel actually sees (normalized when
/// normalization is on).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaSpec {
    Fixed(f64),
    Scale,
}

impl std::fmt::Display for GammaSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GammaSpec::Fixed(g) => write!(f, "{g}"),
            GammaSpec::Scale => f.write_str("scale"),
        }
    }
}

impl std::str::FromStr for GammaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("scale") {
            return Ok(GammaSpec::Scale);
        }
        s.parse::<f64>()
            .map(GammaSpec::Fixed)
            .map_err(|_| Error::InvalidParams(format!("gamma must be a number or \"scale\", got {s:?}")))
    }
}

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmParams {
    /// Box constraint.
    pub c: f64,
    pub gamma: GammaSpec,
    /// KKT tolerance; training stops when no point violates the conditions
    /// by more than this.
    pub tol: f64,
    /// Safety cap on full sweeps over the training set.
    pub max_passes: usize,
    /// Fit a z-score normalizer on the training data (recommended for RBF).
    pub normalize: bool,
    /// Scale the positive-class box to `C·n₋/n₊` to counter imbalance.
    pub class_weight: bool,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 10.0,
            gamma: GammaSpec::Scale,
            tol: 1e-3,
            max_passes: 1000,
            normalize: true,
            class_weight: false,
        }
    }
}

impl SvmParams {
    pub fn validate(&self) -> Result<()> {
        if self.c.is_nan() || self.c <= 0.0 {
            return Err(Error::InvalidParams(format!("C must be positive, got {}", self.c)));
        }
        if let GammaSpec::Fixed(g) = self.gamma {
            if g.is_nan() || g <= 0.0 {
                return Err(Error::InvalidParams(format!("gamma must be positive, got {g}")));
            }
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidParams(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_passes == 0 {
            return Err(Error::InvalidParams("max_passes must be positive".into()));
        }
        Ok(())
    }
}

/// A trained classifier: support vectors live in the normalized feature
/// space; `coefficients[i]` is `αᵢ·yᵢ`. The decision function is
/// `f(x) = Σ coefᵢ·K(svᵢ, normalize(x)) + bias`.
#[derive(Debug, Clone)]
pub struct SvmModel {
    pub support_vectors: Vec<Vec<f64>>,
    pub coefficients: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
    pub normalizer: Normalizer,
    /// Hyperparameters the model was trained with (kept for audit and
    /// serialization).
    pub params: SvmParams,
}

impl SvmModel {
    pub fn dims(&self) -> usize {
        self.normalizer.dims()
    }
}

/// Convergence diagnostics of one training run, recomputed exactly (not
/// from incremental caches) after the solver stops.
#[derive(Debug, Clone)]
pub struct TrainReport {
    /// Dual variables for every training point, in input order.
    pub alphas: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
    /// Dual objective `Σαᵢ − ½ΣΣαᵢαⱼyᵢyⱼKᵢⱼ` at the solution.
    pub dual_objective: f64,
    /// Largest violation of the margin conditions over the training set:
    /// 0 at an exact optimum, at most `tol` at natural termination.
    pub kkt_max_violation: f64,
    /// True when the solver stopped because no violations remained (rather
    /// than hitting the sweep cap).
    pub converged: bool,
}

/// `exp(−gamma·‖x−y‖²)`.
pub fn rbf_kernel(x: &[f64], y: &[f64], gamma: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok((-gamma * squared_distance(x, y)).exp())
}

fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Train a model. Deterministic for fixed inputs and seed.
pub fn train(data: &[FeatureVector], params: &SvmParams, seed: u64) -> Result<SvmModel> {
    Ok(train_with_report(data, params, seed)?.0)
}

/// Train a model and return exact convergence diagnostics alongside it.
pub fn train_with_report(
    data: &[FeatureVector],
    params: &SvmParams,
    seed: u64,
) -> Result<(SvmModel, TrainReport)> {
    params.validate()?;
    let n = data.len();
    if n < 2 {
        return Err(Error::InvalidParams(format!(
            "need at least 2 training points, got {n}"
        )));
    }
    let dims = data[0].values.len();
    for fv in data {
        if fv.values.len() != dims {
            return Err(Error::DimensionMismatch {
                expected: dims,
                found: fv.values.len(),
            });
        }
        if let Some(pos) = fv.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "feature {pos} of sub-segment (set {}, segment {}, window {})",
                fv.provenance.set, fv.provenance.segment_index, fv.provenance.window_index
            )));
        }
    }
    let n_pos = data.iter().filter(|fv| fv.label == Label::Seizure).count();
    if n_pos == 0 || n_pos == n {
        return Err(Error::SingleClass);
    }

    let normalizer = if params.normalize {
        normalizer_fit(data)
    } else {
        Normalizer::identity(dims)
    };
    let x: Vec<Vec<f64>> = data
        .iter()
        .map(|fv| normalize_values(&normalizer, &fv.values))
        .collect();
    let y: Vec<f64> = data
        .iter()
        .map(|fv| if fv.label == Label::Seizure { 1.0 } else { -1.0 })
        .collect();
    let gamma = resolve_gamma(params.gamma, &x);

    let c_neg = params.c;
    let c_pos = if params.class_weight {
        params.c * (n - n_pos) as f64 / n_pos as f64
    } else {
        params.c
    };

    let mut solver = Smo::new(&x, &y, gamma, c_pos, c_neg, params.tol, seed);
    let converged = solver.solve(params.max_passes);

    // The bias carried through the sweeps is a working quantity; derive the
    // final bias from the final alphas instead. Free support vectors pin it
    // exactly; in the all-at-bound case any value in the feasible interval
    // is optimal and the midpoint is taken, so the optimality conditions
    // hold even when the sweeps never visited a free point.
    let raw: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| solver.alpha[j] * y[j] * solver.kernel(j, i))
                .sum::<f64>()
        })
        .collect();
    let free: Vec<usize> = (0..n).filter(|&i| solver.is_free(i)).collect();
    solver.b = if free.is_empty() {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for i in 0..n {
            // A point at alpha = 0 needs y·f >= 1, one at the box bound
            // needs y·f <= 1; each turns into a one-sided bound on b.
            let bound = y[i] - raw[i];
            if (solver.alpha[i] <= 0.0) == (y[i] > 0.0) {
                lo = lo.max(bound);
            } else {
                hi = hi.min(bound);
            }
        }
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => 0.5 * (lo + hi),
            (true, false) => lo,
            (false, true) => hi,
            (false, false) => 0.0,
        }
    } else {
        free.iter().map(|&i| y[i] - raw[i]).sum::<f64>() / free.len() as f64
    };

    // Exact final diagnostics, free of incremental-update drift.
    let f: Vec<f64> = (0..n).map(|i| raw[i] + solver.b).collect();
    let dual_objective = {
        let linear: f64 = solver.alpha.iter().sum();
        let mut quad = 0.0;
        for i in 0..n {
            if solver.alpha[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if solver.alpha[j] == 0.0 {
                    continue;
                }
                quad += solver.alpha[i] * solver.alpha[j] * y[i] * y[j] * solver.kernel(i, j);
            }
        }
        linear - 0.5 * quad
    };
    let kkt_max_violation = (0..n)
        .map(|i| {
            let margin = y[i] * f[i];
            let c_i = solver.box_for(i);
            if solver.alpha[i] <= 0.0 {
                (1.0 - margin).max(0.0)
            } else if solver.alpha[i] >= c_i {
                (margin - 1.0).max(0.0)
            } else {
                (margin - 1.0).abs()
            }
        })
        .fold(0.0, f64::max);

    let mut support_vectors = Vec::new();
    let mut coefficients = Vec::new();
    for i in 0..n {
        if solver.alpha[i] > 0.0 {
            support_vectors.push(x[i].clone());
            coefficients.push(solver.alpha[i] * y[i]);
        }
    }
    let model = SvmModel {
        support_vectors,
        coefficients,
        bias: solver.b,
        gamma,
        normalizer,
        params: params.clone(),
    };
    let report = TrainReport {
        alphas: solver.alpha,
        bias: model.bias,
        gamma,
        dual_objective,
        kkt_max_violation,
        converged,
    };
    Ok((model, report))
}

/// `1/(d·var(X))` over all entries of the matrix; falls back to `1/d` for a
/// constant matrix.
fn resolve_gamma(spec: GammaSpec, x: &[Vec<f64>]) -> f64 {
    match spec {
        GammaSpec::Fixed(g) => g,
        GammaSpec::Scale => {
            let d = x[0].len();
            let count = (x.len() * d) as f64;
            let mean: f64 = x.iter().flatten().sum::<f64>() / count;
            let var: f64 = x.iter().flatten().map(|v| (v - mean).powi(2)).sum::<f64>() / count;
            if var > 0.0 {
                1.0 / (d as f64 * var)
            } else {
                1.0 / d as f64
            }
        }
    }
}

/// Signed distance to the decision surface for a raw (unnormalized) value
/// slice.
pub fn decision_value_raw(model: &SvmModel, values: &[f64]) -> Result<f64> {
    if values.len() != model.dims() {
        return Err(Error::DimensionMismatch {
            expected: model.dims(),
            found: values.len(),
        });
    }
    let xn = normalize_values(&model.normalizer, values);
    let mut f = model.bias;
    for (sv, coef) in model.support_vectors.iter().zip(&model.coefficients) {
        f += coef * (-model.gamma * squared_distance(sv, &xn)).exp();
    }
    Ok(f)
}

/// Signed distance to the decision surface.
pub fn decision_value(model: &SvmModel, x: &FeatureVector) -> Result<f64> {
    decision_value_raw(model, &x.values)
}

/// Predicted class: positive decision values are seizure; an exact 0 tie
/// maps to non-seizure.
pub fn predict(model: &SvmModel, x: &FeatureVector) -> Result<Label> {
    Ok(if decision_value(model, x)? > 0.0 {
        Label::Seizure
    } else {
        Label::NonSeizure
    })
}

/// The SMO working state. Lifetimes borrow the normalized data.
struct Smo<'a> {
    x: &'a [Vec<f64>],
    y: &'a [f64],
    gamma: f64,
    c_pos: f64,
    c_neg: f64,
    tol: f64,
    alpha: Vec<f64>,
    b: f64,
    /// Error cache `E_i = f(x_i) − y_i`, maintained incrementally and
    /// refreshed from scratch at the start of every full sweep.
    errors: Vec<f64>,
    gram: Option<Vec<f64>>,
    rng: ChaCha8Rng,
}

/// Minimum relative progress on the second dual variable for a step to
/// count; steps below this are treated as no-ops.
const PROGRESS_EPS: f64 = 1e-12;

impl<'a> Smo<'a> {
    fn new(
        x: &'a [Vec<f64>],
        y: &'a [f64],
        gamma: f64,
        c_pos: f64,
        c_neg: f64,
        tol: f64,
        seed: u64,
    ) -> Smo<'a> {
        let n = x.len();
        let gram = (n <= GRAM_CACHE_LIMIT).then(|| {
            let mut g = vec![0.0; n * n];
            for i in 0..n {
                g[i * n + i] = 1.0;
                for j in 0..i {
                    let k = (-gamma * squared_distance(&x[i], &x[j])).exp();
                    g[i * n + j] = k;
                    g[j * n + i] = k;
                }
            }
            g
        });
        Smo {
            x,
            y,
            gamma,
            c_pos,
            c_neg,
            tol,
            alpha: vec![0.0; n],
            b: 0.0,
            errors: y.iter().map(|&yi| -yi).collect(),
            gram,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn kernel(&self, i: usize, j: usize) -> f64 {
        match &self.gram {
            Some(g) => g[i * self.x.len() + j],
            None => (-self.gamma * squared_distance(&self.x[i], &self.x[j])).exp(),
        }
    }

    fn box_for(&self, i: usize) -> f64 {
        if self.y[i] > 0.0 {
            self.c_pos
        } else {
            self.c_neg
        }
    }

    fn is_free(&self, i: usize) -> bool {
        self.alpha[i] > 0.0 && self.alpha[i] < self.box_for(i)
    }

    /// Refresh the error cache from current alphas, removing accumulated
    /// incremental-update drift.
    fn recompute_errors(&mut self) {
        let n = self.x.len();
        for i in 0..n {
            let mut f = self.b;
            for j in 0..n {
                if self.alpha[j] > 0.0 {
                    f += self.alpha[j] * self.y[j] * self.kernel(j, i);
                }
            }
            self.errors[i] = f - self.y[i];
        }
    }

    /// Run the solver. Returns true on natural termination (a full sweep
    /// found nothing to improve), false if the sweep cap was hit first.
    fn solve(&mut self, max_passes: usize) -> bool {
        let n = self.x.len();
        let mut examine_all = true;
        for _ in 0..max_passes {
            if examine_all {
                self.recompute_errors();
            }
            let mut candidates: Vec<usize> = if examine_all {
                (0..n).collect()
            } else {
                (0..n).filter(|&i| self.is_free(i)).collect()
            };
            candidates.shuffle(&mut self.rng);
            let mut changed = 0usize;
            for i2 in candidates {
                changed += self.examine(i2) as usize;
            }
            if examine_all {
                if changed == 0 {
                    return true;
                }
                examine_all = false;
            } else if changed == 0 {
                examine_all = true;
            }
        }
        false
    }

    /// Check one point for a KKT violation and, if found, try to take a
    /// step against a partner chosen by the max-|E₁−E₂| heuristic with
    /// random-start fallback scans.
    fn examine(&mut self, i2: usize) -> bool {
        let y2 = self.y[i2];
        let alph2 = self.alpha[i2];
        let e2 = self.errors[i2];
        let r2 = e2 * y2;
        let violated = (r2 < -self.tol && alph2 < self.box_for(i2))
            || (r2 > self.tol && alph2 > 0.0);
        if !violated {
            return false;
        }
        let n = self.x.len();
        // Best partner: largest |E1 − E2| among free points.
        let mut best: Option<(usize, f64)> = None;
        for i1 in (0..n).filter(|&i| self.is_free(i)) {
            let gap = (self.errors[i1] - e2).abs();
            if best.is_none_or(|(_, g)| gap > g) {
                best = Some((i1, gap));
            }
        }
        if let Some((i1, _)) = best {
            if self.take_step(i1, i2) {
                return true;
            }
        }
        // Fallback: all free points from a seeded random start.
        let start = self.rng.gen_range(0..n);
        for offset in 0..n {
            let i1 = (start + offset) % n;
            if self.is_free(i1) && self.take_step(i1, i2) {
                return true;
            }
        }
        // Last resort: the whole set from a fresh random start.
        let start = self.rng.gen_range(0..n);
        for offset in 0..n {
            let i1 = (start + offset) % n;
            if self.take_step(i1, i2) {
                return true;
            }
        }
        false
    }

    /// Jointly optimize the pair (i1, i2) analytically. Returns true if the
    /// alphas moved.
    fn take_step(&mut self, i1: usize, i2: usize) -> bool {
        if i1 == i2 {
            return false;
        }
        let (y1, y2) = (self.y[i1], self.y[i2]);
        let (alph1, alph2) = (self.alpha[i1], self.alpha[i2]);
        let (e1, e2) = (self.errors[i1], self.errors[i2]);
        let (c1, c2) = (self.box_for(i1), self.box_for(i2));
        let s = y1 * y2;
        // Feasible segment of the equality constraint inside the box.
        let (low, high) = if s < 0.0 {
            let gap = alph2 - alph1;
            (gap.max(0.0), (c1 + gap).min(c2))
        } else {
            let total = alph1 + alph2;
            ((total - c1).max(0.0), total.min(c2))
        };
        if low >= high {
            return false;
        }
        let k11 = self.kernel(i1, i1);
        let k12 = self.kernel(i1, i2);
        let k22 = self.kernel(i2, i2);
        let eta = k11 + k22 - 2.0 * k12;
        let mut a2 = if eta > 0.0 {
            (alph2 + y2 * (e1 - e2) / eta).clamp(low, high)
        } else {
            // Degenerate direction: the objective is linear along the
            // segment; evaluate both ends and take the better one.
            let f1 = y1 * (e1 + self.b) - alph1 * k11 - s * alph2 * k12;
            let f2 = y2 * (e2 + self.b) - s * alph1 * k12 - alph2 * k22;
            let l1 = alph1 + s * (alph2 - low);
            let h1 = alph1 + s * (alph2 - high);
            let obj_low = l1 * f1 + low * f2
                + 0.5 * l1 * l1 * k11
                + 0.5 * low * low * k22
                + s * low * l1 * k12;
            let obj_high = h1 * f1 + high * f2
                + 0.5 * h1 * h1 * k11
                + 0.5 * high * high * k22
                + s * high * h1 * k12;
            if obj_low < obj_high - 1e-12 {
                low
            } else if obj_low > obj_high + 1e-12 {
                high
            } else {
                return false;
            }
        };
        if (a2 - alph2).abs() < PROGRESS_EPS * (a2 + alph2 + PROGRESS_EPS) {
            return false;
        }
        // Snap coordinates that land numerically on the box boundary.
        if a2 < 1e-12 {
            a2 = 0.0;
        } else if a2 > c2 - 1e-12 {
            a2 = c2;
        }
        let mut a1 = alph1 + s * (alph2 - a2);
        if a1 < 1e-12 {
            a1 = 0.0;
        } else if a1 > c1 - 1e-12 {
            a1 = c1;
        }
        let d1 = y1 * (a1 - alph1);
        let d2 = y2 * (a2 - alph2);
        let b1 = self.b - e1 - d1 * k11 - d2 * k12;
        let b2 = self.b - e2 - d1 * k12 - d2 * k22;
        let b_new = if a1 > 0.0 && a1 < c1 {
            b1
        } else if a2 > 0.0 && a2 < c2 {
            b2
        } else {
            0.5 * (b1 + b2)
        };
        let delta_b = b_new - self.b;
        self.alpha[i1] = a1;
        self.alpha[i2] = a2;
        self.b = b_new;
        for i in 0..self.x.len() {
            self.errors[i] += d1 * self.kernel(i1, i) + d2 * self.kernel(i2, i) + delta_b;
        }
        true
    }
}

/// Hyperparameter grid searched by [`grid_search`]: every combination of
/// these box constraints and kernel widths, in row-major order.
pub const GRID_C: [f64; 4] = [0.1, 1.0, 10.0, 100.0];
pub const GRID_GAMMA: [GammaSpec; 4] = [
    GammaSpec::Fixed(0.01),
    GammaSpec::Fixed(0.1),
    GammaSpec::Scale,
    GammaSpec::Fixed(1.0),
];

/// Pick (C, gamma) by accuracy of an inner stratified 3-fold
/// cross-validation over the given training data only. Ties resolve to the
/// earliest grid entry, so the result is deterministic.
pub fn grid_search(data: &[FeatureVector], base: &SvmParams, seed: u64) -> Result<SvmParams> {
    const INNER_FOLDS: usize = 3;
    base.validate()?;
    let positive: Vec<bool> = data.iter().map(|fv| fv.label == Label::Seizure).collect();
    let n_pos = positive.iter().filter(|&&p| p).count();
    if n_pos < INNER_FOLDS || data.len() - n_pos < INNER_FOLDS {
        return Err(Error::ClassTooSmall {
            label: if n_pos < INNER_FOLDS { "seizure" } else { "non_seizure" },
            size: n_pos.min(data.len() - n_pos),
            k: INNER_FOLDS,
        });
    }
    let assignment = stratified_assignment(&positive, INNER_FOLDS, mix_seed(seed, 0x6772_6964));
    let mut best: Option<(f64, SvmParams)> = None;
    for (ci, &c) in GRID_C.iter().enumerate() {
        for (gi, &gamma) in GRID_GAMMA.iter().enumerate() {
            let params = SvmParams {
                c,
                gamma,
                ..base.clone()
            };
            let mut correct = 0usize;
            for fold in 0..INNER_FOLDS as u32 {
                let train_set: Vec<FeatureVector> = data
                    .iter()
                    .zip(&assignment)
                    .filter(|(_, &a)| a != fold)
                    .map(|(fv, _)| fv.clone())
                    .collect();
                let cell_seed = mix_seed(seed, ((ci * 4 + gi) as u64) << 8 | fold as u64);
                let model = train(&train_set, &params, cell_seed)?;
                for (fv, _) in data.iter().zip(&assignment).filter(|(_, &a)| a == fold) {
                    if predict(&model, fv)? == fv.label {
                        correct += 1;
                    }
                }
            }
            let accuracy = correct as f64 / data.len() as f64;
            if best.as_ref().is_none_or(|(acc, _)| accuracy > *acc) {
                best = Some((accuracy, params));
            }
        }
    }
    Ok(best.expect("grid is never empty").1)
}

/// Versioned text snapshot of a trained model together with the feature
/// configuration that produced its inputs.
pub fn save_model<W: Write>(
    mut w: W,
    model: &SvmModel,
    wavelet: WaveletName,
    selection: &NodeSelection,
) -> Result<()> {
    let io_err = |source| Error::Io {
        path: "<model writer>".into(),
        source,
    };
    let p = &model.params;
    writeln!(w, "eegwp-svm v1").map_err(io_err)?;
    writeln!(w, "wavelet {wavelet}").map_err(io_err)?;
    writeln!(w, "nodes {}", selection.to_string_canonical()).map_err(io_err)?;
    writeln!(w, "c {:.16e}", p.c).map_err(io_err)?;
    writeln!(w, "gamma_spec {}", p.gamma).map_err(io_err)?;
    writeln!(w, "tol {:.16e}", p.tol).map_err(io_err)?;
    writeln!(w, "max_passes {}", p.max_passes).map_err(io_err)?;
    writeln!(w, "normalize {}", p.normalize).map_err(io_err)?;
    writeln!(w, "class_weight {}", p.class_weight).map_err(io_err)?;
    writeln!(w, "dims {}", model.dims()).map_err(io_err)?;
    writeln!(w, "mean {}", join_floats(&model.normalizer.mean)).map_err(io_err)?;
    writeln!(w, "std {}", join_floats(&model.normalizer.std)).map_err(io_err)?;
    writeln!(w, "gamma {:.16e}", model.gamma).map_err(io_err)?;
    writeln!(w, "bias {:.16e}", model.bias).map_err(io_err)?;
    writeln!(w, "support_vectors {}", model.support_vectors.len()).map_err(io_err)?;
    for (sv, coef) in model.support_vectors.iter().zip(&model.coefficients) {
        writeln!(w, "{:.16e} {}", coef, join_floats(sv)).map_err(io_err)?;
    }
    Ok(())
}

fn join_floats(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.16e}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// A model restored from its text snapshot.
#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub model: SvmModel,
    pub wavelet: WaveletName,
    pub selection: NodeSelection,
}

/// Parse a model snapshot written by [`save_model`].
pub fn load_model<R: BufRead>(r: R) -> Result<LoadedModel> {
    let mut lines = r.lines().enumerate();
    let mut next_line = |expect: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((no, Ok(line))) => Ok((no + 1, line)),
            Some((_, Err(source))) => Err(Error::Io {
                path: "<model reader>".into(),
                source,
            }),
            None => Err(Error::ModelFormat(format!(
                "unexpected end of file, expected {expect}"
            ))),
        }
    };
    let field = |no: usize, line: &str, key: &str| -> Result<String> {
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .map(str::to_string)
            .ok_or_else(|| {
                Error::ModelFormat(format!("line {no}: expected \"{key} …\", got {line:?}"))
            })
    };

    let (no, header) = next_line("header")?;
    if header.trim() != "eegwp-svm v1" {
        return Err(Error::ModelFormat(format!(
            "line {no}: unsupported header {header:?} (expected \"eegwp-svm v1\")"
        )));
    }
    let (no, line) = next_line("wavelet")?;
    let wavelet: WaveletName = field(no, &line, "wavelet")?.parse()?;
    let (no, line) = next_line("nodes")?;
    let selection = NodeSelection::parse(&field(no, &line, "nodes")?)?;
    let (no, line) = next_line("c")?;
    let c = parse_float(no, &field(no, &line, "c")?)?;
    let (no, line) = next_line("gamma_spec")?;
    let gamma_spec: GammaSpec = field(no, &line, "gamma_spec")?.parse()?;
    let (no, line) = next_line("tol")?;
    let tol = parse_float(no, &field(no, &line, "tol")?)?;
    let (no, line) = next_line("max_passes")?;
    let max_passes = field(no, &line, "max_passes")?
        .trim()
        .parse()
        .map_err(|_| Error::ModelFormat(format!("line {no}: bad max_passes")))?;
    let (no, line) = next_line("normalize")?;
    let normalize = parse_bool(no, &field(no, &line, "normalize")?)?;
    let (no, line) = next_line("class_weight")?;
    let class_weight = parse_bool(no, &field(no, &line, "class_weight")?)?;
    let (no, line) = next_line("dims")?;
    let dims: usize = field(no, &line, "dims")?
        .trim()
        .parse()
        .map_err(|_| Error::ModelFormat(format!("line {no}: bad dims")))?;
    let (no, line) = next_line("mean")?;
    let mean = parse_floats(no, &field(no, &line, "mean")?, dims)?;
    let (no, line) = next_line("std")?;
    let std = parse_floats(no, &field(no, &line, "std")?, dims)?;
    let (no, line) = next_line("gamma")?;
    let gamma = parse_float(no, &field(no, &line, "gamma")?)?;
    let (no, line) = next_line("bias")?;
    let bias = parse_float(no, &field(no, &line, "bias")?)?;
    let (no, line) = next_line("support_vectors")?;
    let sv_count: usize = field(no, &line, "support_vectors")?
        .trim()
        .parse()
        .map_err(|_| Error::ModelFormat(format!("line {no}: bad support vector count")))?;
    let mut support_vectors = Vec::with_capacity(sv_count);
    let mut coefficients = Vec::with_capacity(sv_count);
    for _ in 0..sv_count {
        let (no, line) = next_line("a support-vector row")?;
        let values = parse_floats(no, &line, dims + 1)?;
        coefficients.push(values[0]);
        support_vectors.push(values[1..].to_vec());
    }
    Ok(LoadedModel {
        model: SvmModel {
            support_vectors,
            coefficients,
            bias,
            gamma,
            normalizer: Normalizer { mean, std },
            params: SvmParams {
                c,
                gamma: gamma_spec,
                tol,
                max_passes,
                normalize,
                class_weight,
            },
        },
        wavelet,
        selection,
    })
}

fn parse_float(no: usize, s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::ModelFormat(format!("line {no}: bad float {s:?}")))
}

fn parse_bool(no: usize, s: &str) -> Result<bool> {
    match s.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(Error::ModelFormat(format!("line {no}: bad bool {other:?}"))),
    }
}

fn parse_floats(no: usize, s: &str, expected: usize) -> Result<Vec<f64>> {
    let values: Vec<f64> = s
        .split_ascii_whitespace()
        .map(|t| parse_float(no, t))
        .collect::<Result<_>>()?;
    if values.len() != expected {
        return Err(Error::ModelFormat(format!(
            "line {no}: expected {expected} numbers, found {}",
            values.len()
        )));
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::Provenance;
    use crate::dataio::SetId;
    use approx::assert_abs_diff_eq;
    use rand_distr::StandardNormal;

    fn fv(values: Vec<f64>, label: Label) -> FeatureVector {
        FeatureVector {
            values,
            label,
            provenance: Provenance {
                set: SetId::A,
                segment_index: 1,
                window_index: 1,
            },
        }
    }

    /// Two Gaussian blobs around ±center, `per_class` points each.
    fn blobs(per_class: usize, center: f64, spread: f64, seed: u64) -> Vec<FeatureVector> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut data = Vec::new();
        for _ in 0..per_class {
            let n1: f64 = rng.sample(StandardNormal);
            let n2: f64 = rng.sample(StandardNormal);
            data.push(fv(
                vec![center + spread * n1, center + spread * n2],
                Label::Seizure,
            ));
            let n1: f64 = rng.sample(StandardNormal);
            let n2: f64 = rng.sample(StandardNormal);
            data.push(fv(
                vec![-center + spread * n1, -center + spread * n2],
                Label::NonSeizure,
            ));
        }
        data
    }

    #[test]
    fn kernel_of_a_point_with_itself_is_one() {
        let x = vec![0.3, -1.2, 9.9];
        assert_abs_diff_eq!(rbf_kernel(&x, &x, 0.7).unwrap(), 1.0, epsilon = 0.0);
    }

    #[test]
    fn kernel_matches_hand_value_and_rejects_mismatched_dims() {
        let k = rbf_kernel(&[0.0], &[1.0], 1.0).unwrap();
        assert_abs_diff_eq!(k, (-1.0f64).exp(), epsilon = 1e-15);
        assert!(rbf_kernel(&[0.0], &[1.0, 2.0], 1.0).is_err());
    }

    #[test]
    fn separated_blobs_train_to_full_accuracy_with_few_support_vectors() {
        let data = blobs(20, 3.0, 0.1, 42);
        let (model, report) = train_with_report(&data, &SvmParams::default(), 7).unwrap();
        assert!(report.converged);
        for fv in &data {
            assert_eq!(predict(&model, fv).unwrap(), fv.label);
        }
        assert!(
            model.support_vectors.len() <= 8,
            "expected a sparse model, got {} support vectors",
            model.support_vectors.len()
        );
        // Held-out points from the same blobs classify correctly too.
        for probe in blobs(10, 3.0, 0.1, 43) {
            assert_eq!(predict(&model, &probe).unwrap(), probe.label);
        }
    }

    #[test]
    fn xor_pattern_is_separated_by_the_rbf_kernel() {
        let data = vec![
            fv(vec![0.0, 0.0], Label::Seizure),
            fv(vec![1.0, 1.0], Label::Seizure),
            fv(vec![0.0, 1.0], Label::NonSeizure),
            fv(vec![1.0, 0.0], Label::NonSeizure),
        ];
        let params = SvmParams {
            gamma: GammaSpec::Fixed(1.0),
            normalize: false,
            ..SvmParams::default()
        };
        let model = train(&data, &params, 1).unwrap();
        for point in &data {
            assert_eq!(predict(&model, point).unwrap(), point.label);
        }
    }

    #[test]
    fn single_class_and_non_finite_inputs_are_rejected() {
        let data = vec![
            fv(vec![0.0], Label::Seizure),
            fv(vec![1.0], Label::Seizure),
        ];
        assert!(matches!(
            train(&data, &SvmParams::default(), 0),
            Err(Error::SingleClass)
        ));
        let data = vec![
            fv(vec![f64::NAN], Label::Seizure),
            fv(vec![1.0], Label::NonSeizure),
        ];
        assert!(matches!(
            train(&data, &SvmParams::default(), 0),
            Err(Error::NonFinite(_))
        ));
        let data = vec![
            fv(vec![0.0], Label::Seizure),
            fv(vec![1.0, 2.0], Label::NonSeizure),
        ];
        assert!(matches!(
            train(&data, &SvmParams::default(), 0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn dual_equality_constraint_holds_at_the_solution() {
        let data = blobs(15, 2.0, 0.6, 3);
        let (_, report) = train_with_report(&data, &SvmParams::default(), 5).unwrap();
        let balance: f64 = report
            .alphas
            .iter()
            .zip(&data)
            .map(|(a, fv)| if fv.label == Label::Seizure { *a } else { -*a })
            .sum();
        assert_abs_diff_eq!(balance, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn kkt_conditions_hold_at_natural_termination() {
        let data = blobs(15, 2.0, 0.8, 11);
        let params = SvmParams::default();
        let (_, report) = train_with_report(&data, &params, 2).unwrap();
        assert!(report.converged);
        assert!(
            report.kkt_max_violation <= params.tol + 1e-12,
            "violation {}",
            report.kkt_max_violation
        );
    }

    #[test]
    fn free_support_vectors_sit_on_the_margin() {
        let data = blobs(15, 2.0, 0.8, 19);
        let params = SvmParams::default();
        let (model, report) = train_with_report(&data, &params, 3).unwrap();
        let mut checked = 0;
        for (i, fv) in data.iter().enumerate() {
            let a = report.alphas[i];
            if a > 1e-9 && a < params.c - 1e-9 {
                let f = decision_value(&model, fv).unwrap();
                assert_abs_diff_eq!(f.abs(), 1.0, epsilon = params.tol + 1e-12);
                checked += 1;
            }
        }
        assert!(checked > 0, "no free support vectors in the fixture");
    }

    #[test]
    fn decision_value_decays_to_the_bias_far_from_support() {
        let data = blobs(10, 1.0, 0.3, 23);
        let model = train(&data, &SvmParams::default(), 4).unwrap();
        let far = fv(vec![1e6, -1e6], Label::Seizure);
        let f = decision_value(&model, &far).unwrap();
        assert_abs_diff_eq!(f, model.bias, epsilon = 1e-9);
    }

    #[test]
    fn training_set_permutation_does_not_change_the_decision_function() {
        let data = blobs(12, 1.5, 0.5, 31);
        let params = SvmParams {
            tol: 1e-8,
            ..SvmParams::default()
        };
        let model_a = train(&data, &params, 9).unwrap();
        let mut permuted = data.clone();
        permuted.rotate_left(7);
        permuted.swap(0, 5);
        let model_b = train(&permuted, &params, 9).unwrap();
        for probe in blobs(8, 1.5, 0.5, 32) {
            let fa = decision_value(&model_a, &probe).unwrap();
            let fb = decision_value(&model_b, &probe).unwrap();
            assert_abs_diff_eq!(fa, fb, epsilon = 1e-6);
        }
    }

    #[test]
    fn removing_non_support_vectors_preserves_the_decision_function() {
        let data = blobs(15, 2.0, 0.5, 37);
        // Pin the feature map: a fitted normalizer or variance-derived gamma
        // would shift when points are dropped, changing the function for
        // reasons unrelated to the property under test.
        let params = SvmParams {
            tol: 1e-8,
            gamma: GammaSpec::Fixed(0.5),
            normalize: false,
            ..SvmParams::default()
        };
        let (model_full, report) = train_with_report(&data, &params, 6).unwrap();
        let kept: Vec<FeatureVector> = data
            .iter()
            .zip(&report.alphas)
            .filter(|(_, &a)| a > 0.0)
            .map(|(fv, _)| fv.clone())
            .collect();
        assert!(kept.len() < data.len(), "fixture has no redundant points");
        let model_kept = train(&kept, &params, 6).unwrap();
        for probe in blobs(8, 2.0, 0.5, 38) {
            let ff = decision_value(&model_full, &probe).unwrap();
            let fk = decision_value(&model_kept, &probe).unwrap();
            assert_abs_diff_eq!(ff, fk, epsilon = 1e-4);
        }
    }

    #[test]
    fn same_seed_reproduces_the_model_exactly() {
        let data = blobs(20, 1.0, 0.9, 41);
        let a = train(&data, &SvmParams::default(), 13).unwrap();
        let b = train(&data, &SvmParams::default(), 13).unwrap();
        assert_eq!(a.bias, b.bias);
        assert_eq!(a.coefficients, b.coefficients);
        assert_eq!(a.support_vectors, b.support_vectors);
    }

    #[test]
    fn class_weighting_raises_the_positive_box() {
        // 8 positives vs 40 negatives, overlapping enough that the
        // unweighted model can afford to miss positives.
        let mut data = blobs(8, 1.0, 1.2, 47);
        data.extend(blobs(40, 1.0, 1.2, 48).into_iter().filter(|f| f.label == Label::NonSeizure));
        let unweighted = SvmParams {
            c: 1.0,
            ..SvmParams::default()
        };
        let weighted = SvmParams {
            c: 1.0,
            class_weight: true,
            ..SvmParams::default()
        };
        let (_, rep_u) = train_with_report(&data, &unweighted, 8).unwrap();
        let (_, rep_w) = train_with_report(&data, &weighted, 8).unwrap();
        let max_pos_alpha = |rep: &TrainReport| {
            rep.alphas
                .iter()
                .zip(&data)
                .filter(|(_, fv)| fv.label == Label::Seizure)
                .map(|(a, _)| *a)
                .fold(0.0, f64::max)
        };
        // The weighted run may push positive alphas beyond the unweighted
        // box. At minimum the runs must differ.
        assert!(max_pos_alpha(&rep_w) >= max_pos_alpha(&rep_u));
        assert!(rep_u.alphas != rep_w.alphas);
    }

    #[test]
    fn scale_gamma_uses_the_normalized_matrix_variance() {
        let data = blobs(10, 2.0, 0.5, 53);
        let model = train(&data, &SvmParams::default(), 1).unwrap();
        // After z-scoring, the flattened variance is 1, so scale = 1/d.
        assert_abs_diff_eq!(model.gamma, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn grid_search_returns_a_grid_member_deterministically() {
        let data = blobs(12, 1.5, 0.8, 59);
        let base = SvmParams::default();
        let a = grid_search(&data, &base, 17).unwrap();
        let b = grid_search(&data, &base, 17).unwrap();
        assert_eq!(a, b);
        assert!(GRID_C.contains(&a.c));
        assert!(GRID_GAMMA.contains(&a.gamma));
    }

    #[test]
    fn model_snapshot_round_trips_exactly() {
        let data = blobs(10, 1.0, 0.6, 61);
        let model = train(&data, &SvmParams::default(), 2).unwrap();
        let mut buf = Vec::new();
        save_model(
            &mut buf,
            &model,
            WaveletName::Db4,
            &NodeSelection::default_bases(),
        )
        .unwrap();
        let loaded = load_model(&buf[..]).unwrap();
        assert_eq!(loaded.wavelet, WaveletName::Db4);
        assert_eq!(loaded.selection, NodeSelection::default_bases());
        assert_eq!(loaded.model.bias, model.bias);
        assert_eq!(loaded.model.gamma, model.gamma);
        assert_eq!(loaded.model.support_vectors, model.support_vectors);
        assert_eq!(loaded.model.coefficients, model.coefficients);
        for probe in blobs(5, 1.0, 0.6, 62) {
            assert_eq!(
                decision_value(&loaded.model, &probe).unwrap(),
                decision_value(&model, &probe).unwrap()
            );
        }
    }

    #[test]
    fn corrupted_snapshots_are_reported_with_line_context() {
        let data = blobs(6, 1.0, 0.4, 67);
        let model = train(&data, &SvmParams::default(), 2).unwrap();
        let mut buf = Vec::new();
        save_model(
            &mut buf,
            &model,
            WaveletName::Db2,
            &NodeSelection::default_bases(),
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let truncated = text.lines().take(5).collect::<Vec<_>>().join("\n");
        assert!(load_model(truncated.as_bytes()).is_err());
        let wrong_header = text.replacen("eegwp-svm v1", "eegwp-svm v9", 1);
        let err = load_model(wrong_header.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("unsupported header"));
    }

    #[test]
    fn invalid_params_are_rejected_before_training() {
        let bad = SvmParams {
            c: -1.0,
            ..SvmParams::default()
        };
        assert!(bad.validate().is_err());
        let bad = SvmParams {
            gamma: GammaSpec::Fixed(0.0),
            ..SvmParams::default()
        };
        assert!(bad.validate().is_err());
        let bad = SvmParams {
            tol: 0.0,
            ..SvmParams::default()
        };
        assert!(bad.validate().is_err());
        let bad = SvmParams {
            max_passes: 0,
            ..SvmParams::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn gamma_spec_parses_numbers_and_the_scale_rule() {
        assert_eq!("scale".parse::<GammaSpec>().unwrap(), GammaSpec::Scale);
        assert_eq!("0.25".parse::<GammaSpec>().unwrap(), GammaSpec::Fixed(0.25));
        assert!("fast".parse::<GammaSpec>().is_err());
        assert_eq!(GammaSpec::Scale.to_string(), "scale");
        assert_eq!(GammaSpec::Fixed(0.5).to_string(), "0.5");
    }
}
