//! Minimal library usage: load the five sets and cross-validate one case
//! with the default configuration.
//!
//! Usage: `cargo run --release --example run_case -- <data-root>`

use std::path::Path;

use eegwp::dataio::{load_set, CaseName, SetId};
use eegwp::experiments::{run_case, RunSpec};

fn main() -> eegwp::Result<()> {
    let arg = std::env::args().nth(1).unwrap_or_else(|| {
        eprintln!("usage: run_case <data-root>");
        std::process::exit(2);
    });
    let root = Path::new(&arg);
    let sets = SetId::ALL
        .into_iter()
        .map(|s| Ok((s, load_set(root, s)?)))
        .collect::<eegwp::Result<_>>()?;
    let outcome = run_case(&RunSpec::new(CaseName::ABCDvsE, 10), &sets)?;
    println!("accuracy {:.2}%", outcome.metrics.ca * 100.0);
    Ok(())
}
