//! STD/RMS feature extraction over selected wavelet-packet nodes, plus
//! train-fold z-score normalization and CSV export.
//!
//! A feature vector holds, for each selected node in order, the population
//! standard deviation followed by the root-mean-square of that node's
//! coefficients — `2·|selection|` values in total.

use std::io::Write;

use crate::dataio::{Label, SetId, SubSegment};
use crate::error::{Error, Result};
use crate::wpt::{filter_bank, wpt_decompose, NodeId, WaveletName, WptTree};

/// Decomposition depth used by the pipeline.
pub const DECOMPOSITION_LEVELS: usize = 5;

/// Ordered, duplicate-free list of packet nodes to read features from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSelection {
    nodes: Vec<NodeId>,
}

impl NodeSelection {
    /// Validate and build a selection: non-empty, no duplicate nodes, all
    /// within the pipeline's 5-level tree.
    ///
    /// Two ids count as duplicates when they address the same node, even if
    /// expressed in different orderings.
    pub fn new(nodes: Vec<NodeId>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidSelection("selection is empty".into()));
        }
        for node in &nodes {
            if node.level as usize > DECOMPOSITION_LEVELS {
                return Err(Error::InvalidSelection(format!(
                    "node {node} is deeper than the {DECOMPOSITION_LEVELS}-level tree"
                )));
            }
        }
        let mut canonical: Vec<NodeId> = nodes.iter().map(|n| n.to_natural_order()).collect();
        canonical.sort_by_key(|n| (n.level, n.index));
        canonical.dedup();
        if canonical.len() != nodes.len() {
            return Err(Error::InvalidSelection("duplicate node in selection".into()));
        }
        Ok(NodeSelection { nodes })
    }

    /// The pipeline default: nodes (5,1), (4,1), (4,2) in natural order.
    pub fn default_bases() -> NodeSelection {
        NodeSelection::new(vec![
            NodeId::natural(5, 1),
            NodeId::natural(4, 1),
            NodeId::natural(4, 2),
        ])
        .expect("the default selection is valid")
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Number of feature dimensions this selection produces.
    pub fn dims(&self) -> usize {
        self.nodes.len() * 2
    }

    /// Canonical text form, e.g. `5:1,4:1,4:2` (an `f` suffix marks
    /// frequency-ordered ids). Round-trips through [`NodeSelection::parse`].
    pub fn to_string_canonical(&self) -> String {
        self.nodes
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parse the canonical `level:index[,level:index…]` form. An `f` suffix
    /// on the index marks the id as frequency-ordered.
    pub fn parse(s: &str) -> Result<NodeSelection> {
        let mut nodes = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            let (level_txt, index_txt) = part.split_once(':').ok_or_else(|| {
                Error::InvalidSelection(format!(
                    "node {part:?} is not in level:index form (e.g. 5:1)"
                ))
            })?;
            let level: u8 = level_txt.trim().parse().map_err(|_| {
                Error::InvalidSelection(format!("bad level in {part:?}"))
            })?;
            let index_txt = index_txt.trim();
            let (index_txt, frequency) = match index_txt.strip_suffix(['f', 'F']) {
                Some(rest) => (rest, true),
                None => (index_txt, false),
            };
            let index: u16 = index_txt.parse().map_err(|_| {
                Error::InvalidSelection(format!("bad index in {part:?}"))
            })?;
            if level as usize > DECOMPOSITION_LEVELS || (index as u32) >= (1u32 << level) {
                return Err(Error::InvalidSelection(format!(
                    "node {part:?} out of range for a {DECOMPOSITION_LEVELS}-level tree"
                )));
            }
            nodes.push(if frequency {
                NodeId::frequency(level, index)
            } else {
                NodeId::natural(level, index)
            });
        }
        NodeSelection::new(nodes)
    }
}

impl std::fmt::Display for NodeSelection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_string_canonical())
    }
}

impl std::str::FromStr for NodeSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NodeSelection::parse(s)
    }
}

/// Where a feature vector came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    pub set: SetId,
    pub segment_index: u16,
    pub window_index: u8,
}

/// One labeled feature vector.
#[derive(Debug, Clone)]
pub struct FeatureVector {
    /// Node-major values: (node₁ STD, node₁ RMS, node₂ STD, …).
    pub values: Vec<f64>,
    pub label: Label,
    pub provenance: Provenance,
}

/// Population standard deviation: `sqrt(Σ(vᵢ−mean)²/n)`.
pub fn std(v: &[f64]) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::EmptyVector("standard deviation"));
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    Ok((v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt())
}

/// Root mean square: `sqrt(Σvᵢ²/n)`.
pub fn rms(v: &[f64]) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::EmptyVector("root mean square"));
    }
    Ok((v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt())
}

/// Decompose a sub-segment and read its feature vector.
pub fn extract(
    sub: &SubSegment,
    wavelet: WaveletName,
    selection: &NodeSelection,
) -> Result<FeatureVector> {
    let fb = filter_bank(wavelet);
    let tree = wpt_decompose(&sub.samples, &fb, DECOMPOSITION_LEVELS)?;
    extract_from_tree(&tree, selection, sub)
}

/// Read a feature vector from an already-computed tree of the sub-segment.
/// Lets sweeps that vary only the node selection decompose each sub-segment
/// once.
pub fn extract_from_tree(
    tree: &WptTree,
    selection: &NodeSelection,
    sub: &SubSegment,
) -> Result<FeatureVector> {
    let label = sub.label.ok_or(Error::Unlabeled {
        set: sub.set,
        segment: sub.segment_index,
        window: sub.window_index,
    })?;
    let mut values = Vec::with_capacity(selection.dims());
    for &node in selection.nodes() {
        let coeffs = tree.node(node)?;
        values.push(std(coeffs)?);
        values.push(rms(coeffs)?);
    }
    Ok(FeatureVector {
        values,
        label,
        provenance: Provenance {
            set: sub.set,
            segment_index: sub.segment_index,
            window_index: sub.window_index,
        },
    })
}

/// Per-dimension z-score transform fitted on training data only.
///
/// Dimensions whose training variance is zero are mapped to 0 after
/// centering (there is nothing to scale by).
#[derive(Debug, Clone, PartialEq)]
pub struct Normalizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Normalizer {
    /// An identity transform of the given dimension, for unnormalized runs.
    pub fn identity(dims: usize) -> Normalizer {
        Normalizer {
            mean: vec![0.0; dims],
            std: vec![1.0; dims],
        }
    }

    pub fn dims(&self) -> usize {
        self.mean.len()
    }
}

/// Fit a z-score normalizer on training vectors.
///
/// # Panics
/// If `train` is empty or dimensions disagree.
pub fn normalizer_fit(train: &[FeatureVector]) -> Normalizer {
    assert!(!train.is_empty(), "cannot fit a normalizer on no data");
    let dims = train[0].values.len();
    let n = train.len() as f64;
    let mut mean = vec![0.0; dims];
    for fv in train {
        assert_eq!(fv.values.len(), dims, "inconsistent feature dimensions");
        for (m, v) in mean.iter_mut().zip(&fv.values) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut std = vec![0.0; dims];
    for fv in train {
        for ((s, v), m) in std.iter_mut().zip(&fv.values).zip(&mean) {
            *s += (v - m).powi(2);
        }
    }
    for s in &mut std {
        *s = (*s / n).sqrt();
    }
    Normalizer { mean, std }
}

/// Apply a fitted normalizer to one vector (label and provenance pass
/// through).
pub fn normalizer_apply(norm: &Normalizer, fv: &FeatureVector) -> FeatureVector {
    FeatureVector {
        values: normalize_values(norm, &fv.values),
        label: fv.label,
        provenance: fv.provenance,
    }
}

/// Apply a fitted normalizer to a bare value slice.
pub fn normalize_values(norm: &Normalizer, values: &[f64]) -> Vec<f64> {
    debug_assert_eq!(norm.dims(), values.len());
    values
        .iter()
        .zip(&norm.mean)
        .zip(&norm.std)
        .map(|((v, m), s)| if *s > 0.0 { (v - m) / s } else { 0.0 })
        .collect()
}

/// Export a feature matrix as CSV: one column per feature named
/// `<node>_std` / `<node>_rms`, final column `label`.
pub fn write_csv<W: Write>(
    writer: W,
    selection: &NodeSelection,
    vectors: &[FeatureVector],
) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = Vec::with_capacity(selection.dims() + 1);
    for node in selection.nodes() {
        header.push(format!("{node}_std"));
        header.push(format!("{node}_rms"));
    }
    header.push("label".into());
    csv.write_record(&header).map_err(csv_error)?;
    for fv in vectors {
        let mut row: Vec<String> = fv.values.iter().map(|v| format!("{v:.12e}")).collect();
        row.push(fv.label.to_string());
        csv.write_record(&row).map_err(csv_error)?;
    }
    csv.flush().map_err(|source| Error::Io {
        path: "<csv writer>".into(),
        source,
    })?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: "<csv writer>".into(),
            source,
        },
        other => Error::InvalidParams(format!("csv: {other:?}")),
    }
}
