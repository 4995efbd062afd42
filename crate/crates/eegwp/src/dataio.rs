//! Dataset ingestion, sub-segmentation, case assembly, and synthetic
//! signal generation.
//!
//! The on-disk format is one plain-text file per 23.6 s epoch, 4097 lines,
//! one decimal integer per line, 100 files per set. The five sets are named
//! A–E and live in directories named by either the set letter or its
//! file-prefix alias (A→Z, B→O, C→N, D→F, E→S); epoch files are
//! `<alias><number>.txt` with or without zero padding, case-insensitively.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Recording sample rate of every epoch, Hz.
pub const SAMPLE_RATE_HZ: f64 = 173.61;
/// Samples per epoch.
pub const SEGMENT_LEN: usize = 4097;
/// Epoch duration in seconds (`SAMPLE_RATE_HZ · SEGMENT_DURATION_S` matches
/// `SEGMENT_LEN` within one sample; asserted in tests).
pub const SEGMENT_DURATION_S: f64 = 23.6;
/// Samples per sub-segment window.
pub const SUBSEGMENT_LEN: usize = 241;
/// Windows per epoch: 17 × 241 = 4097, a disjoint exact partition.
pub const SUBSEGMENTS_PER_SEGMENT: usize = 17;
/// Epoch files per set.
pub const EPOCHS_PER_SET: usize = 100;

/// One of the five recording sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SetId {
    A,
    B,
    C,
    D,
    E,
}

impl SetId {
    /// All sets in canonical order.
    pub const ALL: [SetId; 5] = [SetId::A, SetId::B, SetId::C, SetId::D, SetId::E];

    /// File-prefix alias used by the public dataset release.
    pub fn letter_code(self) -> char {
        match self {
            SetId::A => 'Z',
            SetId::B => 'O',
            SetId::C => 'N',
            SetId::D => 'F',
            SetId::E => 'S',
        }
    }

    /// Canonical single-letter name.
    pub fn as_str(self) -> &'static str {
        match self {
            SetId::A => "A",
            SetId::B => "B",
            SetId::C => "C",
            SetId::D => "D",
            SetId::E => "E",
        }
    }
}

impl std::fmt::Display for SetId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SetId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(SetId::A),
            "B" => Ok(SetId::B),
            "C" => Ok(SetId::C),
            "D" => Ok(SetId::D),
            "E" => Ok(SetId::E),
            other => Err(Error::InvalidCase(format!(
                "unknown set {other:?} (expected A, B, C, D, or E)"
            ))),
        }
    }
}

/// Class label assigned at dataset-assembly time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    NonSeizure,
    Seizure,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Seizure => "seizure",
            Label::NonSeizure => "non_seizure",
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "seizure" => Ok(Label::Seizure),
            "non_seizure" => Ok(Label::NonSeizure),
            other => Err(Error::InvalidCase(format!("unknown label {other:?}"))),
        }
    }
}

/// One 23.6 s epoch: 4097 samples at 173.61 Hz.
#[derive(Debug, Clone)]
pub struct Segment {
    pub samples: Vec<f64>,
    pub set: SetId,
    /// Epoch number within its set, 1-based.
    pub index: u16,
    pub sample_rate_hz: f64,
}

impl Segment {
    /// Check the structural invariants: sample count, finiteness, index
    /// range, and that duration × rate matches the count within one sample.
    pub fn validate(&self) -> Result<()> {
        if self.samples.len() != SEGMENT_LEN {
            return Err(Error::InvalidSegment(format!(
                "expected {SEGMENT_LEN} samples, found {}",
                self.samples.len()
            )));
        }
        if let Some(pos) = self.samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSegment(format!(
                "non-finite sample at position {pos}"
            )));
        }
        if self.index < 1 || self.index as usize > EPOCHS_PER_SET {
            return Err(Error::InvalidSegment(format!(
                "epoch index {} outside 1..={EPOCHS_PER_SET}",
                self.index
            )));
        }
        let implied = self.sample_rate_hz * SEGMENT_DURATION_S;
        if (implied - SEGMENT_LEN as f64).abs() > 1.0 {
            return Err(Error::InvalidSegment(format!(
                "sample rate {} Hz × {SEGMENT_DURATION_S} s = {implied:.1} samples, \
                 more than one sample away from {SEGMENT_LEN}",
                self.sample_rate_hz
            )));
        }
        Ok(())
    }
}

/// One 241-sample window of an epoch.
#[derive(Debug, Clone)]
pub struct SubSegment {
    pub samples: Vec<f64>,
    pub set: SetId,
    /// Source epoch number, 1-based.
    pub segment_index: u16,
    /// Window number within the epoch, 1-based, 1..=17.
    pub window_index: u8,
    /// `None` until a dataset is assembled for a concrete case.
    pub label: Option<Label>,
}

/// Binary classification case: one or more non-seizure sets against the
/// seizure set E.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseSpec {
    pub name: CaseName,
    pub negative_sets: Vec<SetId>,
    pub positive_sets: Vec<SetId>,
}

/// The seven studied cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CaseName {
    AvsE,
    BvsE,
    CvsE,
    DvsE,
    ABvsE,
    CDvsE,
    ABCDvsE,
}

impl CaseName {
    pub const ALL: [CaseName; 7] = [
        CaseName::AvsE,
        CaseName::BvsE,
        CaseName::CvsE,
        CaseName::DvsE,
        CaseName::ABvsE,
        CaseName::CDvsE,
        CaseName::ABCDvsE,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseName::AvsE => "AvsE",
            CaseName::BvsE => "BvsE",
            CaseName::CvsE => "CvsE",
            CaseName::DvsE => "DvsE",
            CaseName::ABvsE => "ABvsE",
            CaseName::CDvsE => "CDvsE",
            CaseName::ABCDvsE => "ABCDvsE",
        }
    }

    fn negative_sets(self) -> Vec<SetId> {
        match self {
            CaseName::AvsE => vec![SetId::A],
            CaseName::BvsE => vec![SetId::B],
            CaseName::CvsE => vec![SetId::C],
            CaseName::DvsE => vec![SetId::D],
            CaseName::ABvsE => vec![SetId::A, SetId::B],
            CaseName::CDvsE => vec![SetId::C, SetId::D],
            CaseName::ABCDvsE => vec![SetId::A, SetId::B, SetId::C, SetId::D],
        }
    }
}

impl std::fmt::Display for CaseName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CaseName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        CaseName::ALL
            .into_iter()
            .find(|c| c.as_str().to_ascii_lowercase() == lower)
            .ok_or_else(|| {
                Error::InvalidCase(format!(
                    "unknown case {s:?} (expected one of {})",
                    CaseName::ALL.map(|c| c.as_str()).join(", ")
                ))
            })
    }
}

impl CaseSpec {
    /// The standard case for a name: the named non-seizure sets vs set E.
    pub fn for_name(name: CaseName) -> CaseSpec {
        CaseSpec {
            name,
            negative_sets: name.negative_sets(),
            positive_sets: vec![SetId::E],
        }
    }

    /// Validate the case invariants: the positive class is exactly set E, and
    /// the negative list is non-empty and disjoint from it.
    pub fn validate(&self) -> Result<()> {
        if self.positive_sets != [SetId::E] {
            return Err(Error::InvalidCase(
                "positive class must be exactly set E".into(),
            ));
        }
        if self.negative_sets.is_empty() {
            return Err(Error::InvalidCase("negative set list is empty".into()));
        }
        if self.negative_sets.contains(&SetId::E) {
            return Err(Error::InvalidCase(
                "negative sets must not contain the positive set E".into(),
            ));
        }
        Ok(())
    }

    /// All sets the case touches, in canonical order.
    pub fn all_sets(&self) -> Vec<SetId> {
        let mut sets = self.negative_sets.clone();
        sets.extend(&self.positive_sets);
        sets.sort_unstable();
        sets
    }
}

/// Load the 100 epochs of one set from `root`.
///
/// Epoch files are searched in `root/<letter_code>/`, `root/<set name>/`,
/// then `root` itself (first directory containing any matching file wins).
/// Returns epochs ordered by number, 1..=100.
pub fn load_set(root: &Path, set: SetId) -> Result<Vec<Segment>> {
    let dir = locate_set_dir(root, set)?;
    let mut files: BTreeMap<u16, PathBuf> = BTreeMap::new();
    let entries = fs::read_dir(&dir).map_err(|source| Error::Io {
        path: dir.clone(),
        source,
    })?;
    for entry in entries {
        let entry = entry.map_err(|source| Error::Io {
            path: dir.clone(),
            source,
        })?;
        let path = entry.path();
        let Some(number) = epoch_number(&path, set) else {
            continue;
        };
        if let Some(previous) = files.insert(number, path.clone()) {
            return Err(Error::SetLayout {
                set,
                detail: format!(
                    "epoch {number} appears twice: {} and {}",
                    previous.display(),
                    path.display()
                ),
            });
        }
    }
    if files.is_empty() {
        return Err(Error::SetLayout {
            set,
            detail: format!(
                "no epoch files matching {}<number>.txt under {}",
                set.letter_code(),
                dir.display()
            ),
        });
    }
    for number in 1..=EPOCHS_PER_SET as u16 {
        if !files.contains_key(&number) {
            return Err(Error::SetLayout {
                set,
                detail: format!(
                    "missing epoch file {number} (expected e.g. {}{number:03}.txt in {})",
                    set.letter_code(),
                    dir.display()
                ),
            });
        }
    }
    if let Some((&number, path)) = files.iter().find(|(n, _)| **n > EPOCHS_PER_SET as u16) {
        return Err(Error::SetLayout {
            set,
            detail: format!(
                "unexpected epoch number {number} ({}); sets hold exactly {EPOCHS_PER_SET} epochs",
                path.display()
            ),
        });
    }
    let mut segments = Vec::with_capacity(EPOCHS_PER_SET);
    for (&number, path) in &files {
        let samples = read_epoch_file(path)?;
        let segment = Segment {
            samples,
            set,
            index: number,
            sample_rate_hz: SAMPLE_RATE_HZ,
        };
        segment.validate()?;
        segments.push(segment);
    }
    Ok(segments)
}

fn locate_set_dir(root: &Path, set: SetId) -> Result<PathBuf> {
    let mut candidates = vec![
        root.join(set.letter_code().to_string()),
        root.join(set.letter_code().to_ascii_lowercase().to_string()),
        root.join(set.as_str()),
        root.join(set.as_str().to_ascii_lowercase()),
        root.to_path_buf(),
    ];
    candidates.dedup();
    for dir in &candidates {
        if !dir.is_dir() {
            continue;
        }
        let has_match = fs::read_dir(dir)
            .map(|entries| {
                entries
                    .filter_map(|e| e.ok())
                    .any(|e| epoch_number(&e.path(), set).is_some())
            })
            .unwrap_or(false);
        if has_match {
            return Ok(dir.clone());
        }
    }
    Err(Error::SetLayout {
        set,
        detail: format!(
            "no directory under {} contains {}<number>.txt epoch files",
            root.display(),
            set.letter_code()
        ),
    })
}

/// Epoch number of a candidate path: stem must be the set's letter code
/// followed by digits (case-insensitive, zero padding allowed), extension
/// `.txt` in any case.
fn epoch_number(path: &Path, set: SetId) -> Option<u16> {
    let ext = path.extension()?.to_str()?;
    if !ext.eq_ignore_ascii_case("txt") {
        return None;
    }
    let stem = path.file_stem()?.to_str()?;
    let mut chars = stem.chars();
    let first = chars.next()?;
    if !first.eq_ignore_ascii_case(&set.letter_code()) {
        return None;
    }
    let digits = chars.as_str();
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

fn read_epoch_file(path: &Path) -> Result<Vec<f64>> {
    let file = fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let reader = BufReader::new(file);
    let mut samples = Vec::with_capacity(SEGMENT_LEN);
    for (index, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let line_no = index + 1;
        let text = line.trim();
        if text.is_empty() && samples.len() == SEGMENT_LEN {
            // Tolerate a single trailing blank line.
            continue;
        }
        let value: i64 = text.parse().map_err(|_| Error::SampleParse {
            path: path.to_path_buf(),
            line: line_no,
            text: text.to_string(),
        })?;
        samples.push(value as f64);
    }
    if samples.len() != SEGMENT_LEN {
        return Err(Error::SampleCount {
            path: path.to_path_buf(),
            expected: SEGMENT_LEN,
            found: samples.len(),
        });
    }
    Ok(samples)
}

/// Cut an epoch into its 17 disjoint 241-sample windows. Labels are unset;
/// dataset assembly fills them in.
///
/// # Panics
/// If the segment does not hold exactly 4097 samples.
pub fn segment(seg: &Segment) -> Vec<SubSegment> {
    assert_eq!(
        seg.samples.len(),
        SEGMENT_LEN,
        "segment must hold exactly {SEGMENT_LEN} samples"
    );
    (0..SUBSEGMENTS_PER_SEGMENT)
        .map(|w| SubSegment {
            samples: seg.samples[w * SUBSEGMENT_LEN..(w + 1) * SUBSEGMENT_LEN].to_vec(),
            set: seg.set,
            segment_index: seg.index,
            window_index: (w + 1) as u8,
            label: None,
        })
        .collect()
}

/// Assemble the labeled sub-segment dataset for a case from loaded sets.
///
/// Sub-segments from the case's positive sets are labeled seizure, from the
/// negative sets non-seizure, in deterministic (set, epoch, window) order.
pub fn build_dataset(
    case: &CaseSpec,
    sets: &BTreeMap<SetId, Vec<Segment>>,
) -> Result<Vec<SubSegment>> {
    case.validate()?;
    let mut dataset = Vec::new();
    for set_id in case.all_sets() {
        let segments = sets.get(&set_id).ok_or_else(|| {
            Error::InvalidCase(format!("case {} needs set {set_id}, which was not loaded", case.name))
        })?;
        if segments.len() != EPOCHS_PER_SET {
            return Err(Error::SetLayout {
                set: set_id,
                detail: format!(
                    "expected {EPOCHS_PER_SET} epochs, found {}",
                    segments.len()
                ),
            });
        }
        let label = if case.positive_sets.contains(&set_id) {
            Label::Seizure
        } else {
            Label::NonSeizure
        };
        let mut ordered: Vec<&Segment> = segments.iter().collect();
        ordered.sort_by_key(|s| s.index);
        for seg in ordered {
            seg.validate()?;
            if seg.set != set_id {
                return Err(Error::InvalidSegment(format!(
                    "segment from set {} found in the slot of set {set_id}",
                    seg.set
                )));
            }
            for mut sub in segment(seg) {
                sub.label = Some(label);
                dataset.push(sub);
            }
        }
    }
    Ok(dataset)
}

/// Synthetic epoch kinds for tests and demonstrations without real data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SynthKind {
    /// Unit-variance Gaussian noise.
    WhiteNoise,
    /// Pure sinusoid of the given frequency and amplitude (zero phase).
    Tone { freq_hz: f64, amp: f64 },
    /// Unit-variance Gaussian noise plus a full-length sinusoid whose power
    /// is set by the signal-to-noise ratio in dB (20·log10 of the RMS
    /// ratio); the sinusoid phase is drawn from the seeded stream.
    NoisePlusBurst { freq_hz: f64, snr_db: f64 },
}

/// Generate one synthetic epoch. Deterministic for a fixed seed.
///
/// The result carries set A and epoch index 1; callers distributing
/// synthetic epochs over sets and indices overwrite those fields.
pub fn synth_segment(kind: SynthKind, seed: u64) -> Result<Segment> {
    let nyquist = SAMPLE_RATE_HZ / 2.0;
    if let SynthKind::Tone { freq_hz, .. } | SynthKind::NoisePlusBurst { freq_hz, .. } = kind {
        if !(0.0..nyquist).contains(&freq_hz) {
            return Err(Error::AboveNyquist {
                freq_hz,
                nyquist_hz: nyquist,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = match kind {
        SynthKind::WhiteNoise => gaussian(&mut rng, SEGMENT_LEN),
        SynthKind::Tone { freq_hz, amp } => (0..SEGMENT_LEN)
            .map(|t| amp * (2.0 * std::f64::consts::PI * freq_hz * t as f64 / SAMPLE_RATE_HZ).sin())
            .collect(),
        SynthKind::NoisePlusBurst { freq_hz, snr_db } => {
            let noise = gaussian(&mut rng, SEGMENT_LEN);
            let noise_rms = (noise.iter().map(|v| v * v).sum::<f64>() / SEGMENT_LEN as f64).sqrt();
            // Sinusoid RMS is amp/√2; solve for amp at the requested ratio.
            let amp = noise_rms * 10f64.powf(snr_db / 20.0) * std::f64::consts::SQRT_2;
            let phase = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
            noise
                .iter()
                .enumerate()
                .map(|(t, &n)| {
                    n + amp
                        * (2.0 * std::f64::consts::PI * freq_hz * t as f64 / SAMPLE_RATE_HZ + phase)
                            .sin()
                })
                .collect()
        }
    };
    Ok(Segment {
        samples,
        set: SetId::A,
        index: 1,
        sample_rate_hz: SAMPLE_RATE_HZ,
    })
}

/// Generate a full synthetic set: `EPOCHS_PER_SET` epochs of one kind,
/// assigned to `set` with indices 1..=100 and per-epoch seeds derived from
/// `base_seed`.
pub fn synth_set(kind: SynthKind, set: SetId, base_seed: u64) -> Result<Vec<Segment>> {
    (1..=EPOCHS_PER_SET as u16)
        .map(|index| {
            let mut seg = synth_segment(kind, derive_seed(base_seed, set, index))?;
            seg.set = set;
            seg.index = index;
            Ok(seg)
        })
        .collect()
}

/// Stable per-epoch seed derivation (splitmix-style mixing) so distinct
/// (set, epoch) pairs draw independent streams from one base seed.
fn derive_seed(base_seed: u64, set: SetId, index: u16) -> u64 {
    let mut z = base_seed
        .wrapping_add((set as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(index as u64);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn gaussian(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}
