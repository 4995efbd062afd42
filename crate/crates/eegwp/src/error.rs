//! Crate-wide error type.

use std::path::PathBuf;

use crate::dataio::SetId;

/// Convenience alias used by every fallible operation in this crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in the pipeline, from file ingestion to
/// model training.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Underlying I/O failure while reading or writing a file.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// An epoch file held the wrong number of samples.
    #[error("{path}: expected {expected} samples, found {found}")]
    SampleCount {
        path: PathBuf,
        expected: usize,
        found: usize,
    },

    /// A line in an epoch file could not be parsed as a sample value.
    #[error("{path}:{line}: cannot parse {text:?} as a sample value")]
    SampleParse {
        path: PathBuf,
        line: usize,
        text: String,
    },

    /// A set directory does not contain the expected epoch files.
    #[error("set {set}: {detail}")]
    SetLayout { set: SetId, detail: String },

    /// A segment or sub-segment violated a structural invariant.
    #[error("invalid segment: {0}")]
    InvalidSegment(String),

    /// A classification case referenced a set that was not loaded, or was
    /// itself malformed.
    #[error("invalid case: {0}")]
    InvalidCase(String),

    /// Requested synthetic frequency at or above the Nyquist limit.
    #[error("frequency {freq_hz} Hz is not below the Nyquist limit {nyquist_hz} Hz")]
    AboveNyquist { freq_hz: f64, nyquist_hz: f64 },

    /// Signal too short for the requested decomposition depth.
    #[error("signal of length {len} cannot be decomposed {levels} levels (needs at least 2^{levels} samples)")]
    SignalTooShort { len: usize, levels: usize },

    /// A node id lay outside the tree it was used against.
    #[error("node ({level},{index}) out of range for a {depth}-level tree")]
    NodeOutOfRange {
        level: usize,
        index: usize,
        depth: usize,
    },

    /// An operation required the other node ordering.
    #[error("{0}")]
    WrongOrdering(String),

    /// A statistic was requested over an empty vector.
    #[error("empty vector has no {0}")]
    EmptyVector(&'static str),

    /// A node selection violated its invariants.
    #[error("invalid node selection: {0}")]
    InvalidSelection(String),

    /// Features were requested from a sub-segment that has not been labeled
    /// by dataset assembly yet.
    #[error("sub-segment (set {set}, segment {segment}, window {window}) has no label; build a dataset first")]
    Unlabeled {
        set: SetId,
        segment: u16,
        window: u8,
    },

    /// Training data contained only one class.
    #[error("training data contains a single class; both classes are required")]
    SingleClass,

    /// A feature value was NaN or infinite.
    #[error("non-finite feature value: {0}")]
    NonFinite(String),

    /// Vector dimensions disagreed.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// SVM or fold parameters out of range.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A model file did not conform to the serialization format.
    #[error("model format error: {0}")]
    ModelFormat(String),

    /// A class has fewer members than the requested fold count.
    #[error("class {label} has {size} members, fewer than k = {k}")]
    ClassTooSmall {
        label: &'static str,
        size: usize,
        k: usize,
    },

    /// A sweep was given the same configuration twice.
    #[error("duplicate sweep candidate: {0}")]
    DuplicateCandidate(String),
}
