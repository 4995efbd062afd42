//! Periodized wavelet packet transform.
//!
//! The decomposition is a full binary filter-bank tree: at every level both
//! the low-pass and the high-pass outputs are split again, so level `j`
//! holds `2^j` nodes. Boundary handling is periodization — circular
//! convolution followed by downsampling by two — which keeps the transform
//! exactly invertible on arbitrary signal lengths.
//!
//! Coefficient counts follow the ⌈n/2⌉ ladder (241 → 121 → 61 → 31 → 16 → 8
//! for the pipeline's sub-segments). An odd-length node is zero-extended by
//! one sample before filtering; that is the unique length-preserving
//! extension under which the orthogonal analysis step stays an exact
//! isometry, so perfect reconstruction and Parseval hold on every length.
//! The price is a wrap-around discontinuity on signals (such as a nonzero
//! constant) that are not periodic across the pad, whose energy then leaks
//! across nodes; on lengths whose halving ladder stays even the classical
//! textbook identities hold exactly.
//!
//! Node indices come in two orderings: *natural* (filter-tree) order, the
//! order the decomposition produces, and *frequency* order, sorted by
//! ascending center frequency. They differ because downsampling mirrors the
//! spectrum of every high-pass branch; the permutation between the two is
//! the classical Gray-code reflection.

mod filters;

pub use filters::{filter_bank, parse_wavelet, FilterBank, WaveletName};

use crate::error::{Error, Result};

/// Which index convention a [`NodeId`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeOrder {
    /// Filter-tree order: index bits record the low/high branch choices.
    Natural,
    /// Ascending-frequency order: index `k` covers the `k`-th band.
    Frequency,
}

/// Identifier of one node of the packet tree: depth `level`, index within
/// the level, and the ordering convention the index is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeId {
    pub level: u8,
    pub index: u16,
    pub order: NodeOrder,
}

impl NodeId {
    /// Natural-order node id.
    ///
    /// # Panics
    /// If `index` is not below `2^level` or `level` exceeds 15.
    pub fn natural(level: u8, index: u16) -> NodeId {
        Self::checked(level, index, NodeOrder::Natural)
    }

    /// Frequency-order node id.
    ///
    /// # Panics
    /// If `index` is not below `2^level` or `level` exceeds 15.
    pub fn frequency(level: u8, index: u16) -> NodeId {
        Self::checked(level, index, NodeOrder::Frequency)
    }

    fn checked(level: u8, index: u16, order: NodeOrder) -> NodeId {
        assert!(level <= 15, "node level {level} exceeds the supported depth");
        assert!(
            (index as u32) < (1u32 << level),
            "node index {index} out of range for level {level}"
        );
        NodeId {
            level,
            index,
            order,
        }
    }

    /// The same node expressed in frequency order. Already-frequency-ordered
    /// ids are returned unchanged.
    pub fn to_frequency_order(self) -> NodeId {
        match self.order {
            NodeOrder::Frequency => self,
            NodeOrder::Natural => NodeId {
                index: natural_to_frequency(self.index, self.level),
                order: NodeOrder::Frequency,
                ..self
            },
        }
    }

    /// The same node expressed in natural order. Already-natural ids are
    /// returned unchanged.
    pub fn to_natural_order(self) -> NodeId {
        match self.order {
            NodeOrder::Natural => self,
            NodeOrder::Frequency => NodeId {
                index: frequency_to_natural(self.index),
                order: NodeOrder::Natural,
                ..self
            },
        }
    }
}

impl std::fmt::Display for NodeId {
    /// Renders as `level:index`, the form accepted by selection parsing;
    /// frequency-ordered ids carry an `f` suffix (`5:1f`).
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.order {
            NodeOrder::Natural => write!(f, "{}:{}", self.level, self.index),
            NodeOrder::Frequency => write!(f, "{}:{}f", self.level, self.index),
        }
    }
}

/// Natural index → frequency index: prefix-XOR of the branch bits. Each
/// high-pass branch mirrors the spectrum of everything below it, so a node's
/// band position flips whenever an odd number of ancestors took the
/// high-pass branch; accumulating XOR from the top bit down encodes exactly
/// that.
fn natural_to_frequency(index: u16, level: u8) -> u16 {
    let mut acc = 0u16;
    let mut out = 0u16;
    for b in (0..level).rev() {
        acc ^= (index >> b) & 1;
        out |= acc << b;
    }
    out
}

/// Frequency index → natural index: the inverse of the prefix-XOR, which is
/// the classical binary-reflected Gray code `f ^ (f >> 1)`.
fn frequency_to_natural(index: u16) -> u16 {
    index ^ (index >> 1)
}

/// Frequency band `[f_lo, f_hi)` in Hz covered by a frequency-ordered node:
/// `[k·fs/2^(j+1), (k+1)·fs/2^(j+1))`.
///
/// Natural-ordered input is rejected so band arithmetic can never silently
/// use the wrong permutation; convert with [`NodeId::to_frequency_order`]
/// first.
pub fn node_band(node: NodeId, sample_rate_hz: f64) -> Result<(f64, f64)> {
    if node.order != NodeOrder::Frequency {
        return Err(Error::WrongOrdering(format!(
            "node_band requires a frequency-ordered node, got natural-ordered {node}"
        )));
    }
    let width = sample_rate_hz / 2f64.powi(node.level as i32 + 1);
    let f_lo = node.index as f64 * width;
    Ok((f_lo, f_lo + width))
}

/// Convert a natural-ordered node id to frequency order (free function form
/// of [`NodeId::to_frequency_order`], for pipeline plumbing).
pub fn to_frequency_order(node: NodeId) -> NodeId {
    node.to_frequency_order()
}

/// Complete wavelet packet decomposition of one signal down to a fixed
/// depth. Stores every node of every level (natural order), so any basis —
/// any antichain of the tree — can be read off without recomputation.
#[derive(Debug, Clone)]
pub struct WptTree {
    wavelet: WaveletName,
    source_len: usize,
    /// `levels[j][k]` holds the coefficients of natural-order node `(j,k)`.
    levels: Vec<Vec<Vec<f64>>>,
}

impl WptTree {
    /// Depth of the decomposition (the deepest stored level).
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// Length of the signal the tree was built from.
    pub fn source_len(&self) -> usize {
        self.source_len
    }

    /// Wavelet the tree was built with.
    pub fn wavelet(&self) -> WaveletName {
        self.wavelet
    }

    /// Coefficients of one node. Frequency-ordered ids are converted
    /// internally.
    pub fn node(&self, id: NodeId) -> Result<&[f64]> {
        let nat = id.to_natural_order();
        let level = nat.level as usize;
        if level > self.depth() {
            return Err(Error::NodeOutOfRange {
                level,
                index: nat.index as usize,
                depth: self.depth(),
            });
        }
        Ok(&self.levels[level][nat.index as usize])
    }

    /// Sum of squared coefficients of one node.
    pub fn node_energy(&self, id: NodeId) -> Result<f64> {
        Ok(self.node(id)?.iter().map(|c| c * c).sum())
    }

    /// Text table of every node: level, natural and frequency index, length,
    /// energy. For debugging and inspection.
    pub fn dump(&self) -> String {
        use std::fmt::Write;
        let mut out = String::from("level  k_nat  k_freq  len  energy\n");
        for (level, nodes) in self.levels.iter().enumerate() {
            for (k, coeffs) in nodes.iter().enumerate() {
                let kf = natural_to_frequency(k as u16, level as u8);
                let energy: f64 = coeffs.iter().map(|c| c * c).sum();
                writeln!(
                    out,
                    "{level:>5}  {k:>5}  {kf:>6}  {len:>3}  {energy:.6e}",
                    len = coeffs.len()
                )
                .expect("writing to a String cannot fail");
            }
        }
        out
    }
}

/// Decompose a signal into a full packet tree of the given depth.
///
/// The pipeline always uses `levels = 5` on 241-sample sub-segments; other
/// depths and lengths are accepted (for tests and inspection) as long as the
/// signal holds at least `2^levels` samples.
pub fn wpt_decompose(signal: &[f64], fb: &FilterBank, levels: usize) -> Result<WptTree> {
    if levels == 0 {
        return Err(Error::InvalidParams(
            "decomposition depth must be at least 1".into(),
        ));
    }
    if signal.len() < (1usize << levels) {
        return Err(Error::SignalTooShort {
            len: signal.len(),
            levels,
        });
    }
    let mut tree = Vec::with_capacity(levels + 1);
    tree.push(vec![signal.to_vec()]);
    for j in 0..levels {
        let parents = &tree[j];
        let mut children = Vec::with_capacity(parents.len() * 2);
        for parent in parents {
            children.push(analyze_periodized(parent, &fb.dec_lo));
            children.push(analyze_periodized(parent, &fb.dec_hi));
        }
        tree.push(children);
    }
    Ok(WptTree {
        wavelet: fb.name,
        source_len: signal.len(),
        levels: tree,
    })
}

/// Invert the decomposition from the nodes at `from_level` back to the
/// original signal length. Exact (to rounding) for every supported bank.
pub fn wpt_reconstruct(tree: &WptTree, fb: &FilterBank, from_level: usize) -> Result<Vec<f64>> {
    if from_level == 0 {
        return Ok(tree.levels[0][0].clone());
    }
    if from_level > tree.depth() {
        return Err(Error::NodeOutOfRange {
            level: from_level,
            index: 0,
            depth: tree.depth(),
        });
    }
    if fb.name != tree.wavelet {
        return Err(Error::InvalidParams(format!(
            "tree was decomposed with {} but reconstruction was asked with {}",
            tree.wavelet, fb.name
        )));
    }
    // Node lengths per level are a pure function of the source length.
    let mut lens = Vec::with_capacity(from_level + 1);
    lens.push(tree.source_len);
    for j in 0..from_level {
        lens.push(lens[j].div_ceil(2));
    }
    let mut nodes = tree.levels[from_level].clone();
    for j in (0..from_level).rev() {
        let parent_len = lens[j];
        let mut parents = Vec::with_capacity(nodes.len() / 2);
        for pair in nodes.chunks_exact(2) {
            parents.push(synthesize_periodized(
                &pair[0], &pair[1], &fb.rec_lo, &fb.rec_hi, parent_len,
            ));
        }
        nodes = parents;
    }
    Ok(nodes.pop().expect("reconstruction always yields the root"))
}

/// One analysis step: circular convolution with `filter` evaluated at odd
/// phases — `out[i] = Σ_m filter[m] · x[(2i+1−m) mod n]` — after
/// zero-extending odd-length input by one sample.
fn analyze_periodized(x: &[f64], filter: &[f64]) -> Vec<f64> {
    let n = x.len() + x.len() % 2;
    let half = n / 2;
    let n_i = n as isize;
    let mut out = vec![0.0; half];
    for (i, slot) in out.iter_mut().enumerate() {
        let base = 2 * i as isize + 1;
        let mut acc = 0.0;
        for (m, &fm) in filter.iter().enumerate() {
            let idx = (base - m as isize).rem_euclid(n_i) as usize;
            // Index n−1 addresses the zero pad when the true length is odd.
            if idx < x.len() {
                acc += fm * x[idx];
            }
        }
        *slot = acc;
    }
    out
}

/// One synthesis step: scatter each coefficient through the time-reversed
/// synthesis filters onto the circle of length `2·|cA|`, then truncate to
/// the parent's true length (dropping the reconstructed zero pad).
fn synthesize_periodized(
    ca: &[f64],
    cd: &[f64],
    rec_lo: &[f64],
    rec_hi: &[f64],
    parent_len: usize,
) -> Vec<f64> {
    debug_assert_eq!(ca.len(), cd.len());
    debug_assert_eq!(rec_lo.len(), rec_hi.len());
    let n = 2 * ca.len();
    let n_i = n as isize;
    let mut x = vec![0.0; n];
    for i in 0..ca.len() {
        let base = 2 * i as isize + 1;
        for m in 0..rec_lo.len() {
            let idx = (base - m as isize).rem_euclid(n_i) as usize;
            // Time-reversed synthesis filters: tap L−1−m.
            let rl = rec_lo[rec_lo.len() - 1 - m];
            let rh = rec_hi[rec_hi.len() - 1 - m];
            x[idx] += ca[i] * rl + cd[i] * rh;
        }
    }
    x.truncate(parent_len);
    x
}
