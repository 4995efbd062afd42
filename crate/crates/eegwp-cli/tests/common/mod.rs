//! Shared fixtures for the CLI integration tests: a synthetic dataset in
//! the exact on-disk layout the loader expects, plus a handle on the
//! compiled binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;

use eegwp::dataio::{self, SetId, SynthKind};
use tempfile::TempDir;

/// "Seizure" epochs: unit-variance noise plus a 5 Hz component at 6 dB SNR.
pub const BURST: SynthKind = SynthKind::NoisePlusBurst {
    freq_hz: 5.0,
    snr_db: 6.0,
};

/// Write a complete synthetic dataset under `root`: one directory per set
/// named by its letter code (Z, O, N, F, S), 100 plain-text epochs each,
/// integer samples (scaled then rounded, mimicking ADC output). Set E
/// carries the burst; the other four are white noise.
pub fn write_synthetic_tree(root: &Path, seed: u64) -> std::io::Result<()> {
    for set in SetId::ALL {
        let kind = if set == SetId::E {
            BURST
        } else {
            SynthKind::WhiteNoise
        };
        let dir = root.join(set.letter_code().to_string());
        fs::create_dir_all(&dir)?;
        for epoch in dataio::synth_set(kind, set, seed).expect("synthetic generation") {
            let mut text = String::with_capacity(epoch.samples.len() * 6);
            for sample in &epoch.samples {
                writeln!(text, "{}", (sample * 100.0).round() as i64)
                    .expect("writing to a string cannot fail");
            }
            fs::write(
                dir.join(format!("{}{:03}.txt", set.letter_code(), epoch.index)),
                text,
            )?;
        }
    }
    Ok(())
}

/// Lazily-built dataset shared by every test in this binary.
pub fn fixture_root() -> &'static Path {
    static FIXTURE: OnceLock<TempDir> = OnceLock::new();
    FIXTURE
        .get_or_init(|| {
            let dir = TempDir::new().expect("create fixture dir");
            write_synthetic_tree(dir.path(), 20_260_815).expect("write fixture");
            dir
        })
        .path()
}

/// The compiled CLI under test.
pub fn eegwp() -> Command {
    Command::new(env!("CARGO_BIN_EXE_eegwp"))
}

// Each integration-test binary compiles this module separately; not every
// binary uses every helper.
#[allow(dead_code)]
pub fn read_to_string(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

/// All CSV files directly under `dir`, sorted by name.
pub fn csv_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap_or_else(|e| panic!("read dir {}: {e}", dir.display()))
        .map(|entry| entry.expect("dir entry").path())
        .filter(|p| p.extension().is_some_and(|ext| ext == "csv"))
        .collect();
    files.sort();
    files
}
