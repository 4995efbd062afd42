//! Wavelet-packet feature extraction and SVM classification for EEG seizure
//! detection.
//!
//! The pipeline: 23.6 s EEG epochs (4097 samples at 173.61 Hz) are cut into
//! 17 disjoint sub-segments of 241 samples, each sub-segment is decomposed
//! with a 5-level periodized wavelet packet transform, the standard deviation
//! and root-mean-square of selected packet nodes form the feature vector, and
//! a soft-margin RBF SVM trained from scratch with sequential minimal
//! optimization separates seizure from non-seizure activity under k-fold
//! cross-validation.
//!
//! Module map:
//! - [`dataio`] — dataset ingestion (five sets, A–E), sub-segmentation,
//!   labeled dataset assembly, and synthetic signal generation for tests.
//! - [`wpt`] — FIR filter banks for eight mother wavelets and the periodized
//!   wavelet packet decomposition/reconstruction.
//! - [`features`] — STD/RMS feature extraction over selected packet nodes and
//!   train-fold z-score normalization.
//! - [`svm`] — RBF-kernel soft-margin SVM trained by SMO, with grid search
//!   and a versioned text model format.
//! - [`experiments`] — fold construction, case runners, basis/wavelet sweeps,
//!   metric computation, and report/CSV emission.
//!
//! All randomness is drawn from seeded ChaCha streams; every public entry
//! point is deterministic for a fixed seed, independent of thread count.

pub mod dataio;
pub mod error;
pub mod experiments;
pub mod features;
mod folding;
pub mod svm;
pub mod wpt;

pub use error::{Error, Result};
