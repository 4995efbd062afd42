//! FIR analysis/synthesis filter banks for the supported mother wavelets.
//!
//! Orthogonal families (db2, db4, db6, sym4) are stored as their scaling
//! filter in natural order; the four bank filters are derived from it.
//! Biorthogonal families (bior1.1, bior2.2, bior2.4, rbio2.2) store both the
//! decomposition and reconstruction scaling filters, zero-padded to equal
//! length so analysis and synthesis walk the same index range.
//!
//! The orthogonal taps were computed by spectral factorization of the
//! half-band autocorrelation polynomial (extremal-phase roots for the db
//! family, the near-linear-phase root choice for sym4) at 50-digit working
//! precision and rounded once to `f64`; the biorthogonal taps are exact
//! √2-scaled rationals. The unit tests below re-verify the defining
//! identities rather than trusting these constants.

// The tap constants carry 17 significant digits so they parse to the exact
// intended f64 bit patterns.
#![allow(clippy::excessive_precision)]

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use crate::error::{Error, Result};

/// The eight supported mother wavelets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[allow(non_camel_case_types)]
pub enum WaveletName {
    Db2,
    Db4,
    Db6,
    Sym4,
    Bior1_1,
    Bior2_2,
    Bior2_4,
    Rbio2_2,
}

impl WaveletName {
    /// Every supported wavelet, in a fixed presentation order.
    pub const ALL: [WaveletName; 8] = [
        WaveletName::Db2,
        WaveletName::Db6,
        WaveletName::Sym4,
        WaveletName::Bior1_1,
        WaveletName::Bior2_2,
        WaveletName::Bior2_4,
        WaveletName::Rbio2_2,
        WaveletName::Db4,
    ];

    /// Canonical lower-case name (`db2`, `bior1_1`, …).
    pub fn as_str(self) -> &'static str {
        match self {
            WaveletName::Db2 => "db2",
            WaveletName::Db4 => "db4",
            WaveletName::Db6 => "db6",
            WaveletName::Sym4 => "sym4",
            WaveletName::Bior1_1 => "bior1_1",
            WaveletName::Bior2_2 => "bior2_2",
            WaveletName::Bior2_4 => "bior2_4",
            WaveletName::Rbio2_2 => "rbio2_2",
        }
    }
}

impl std::fmt::Display for WaveletName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for WaveletName {
    type Err = Error;

    /// Accepts the canonical underscore form (`bior2_2`) as well as the
    /// dotted form (`bior2.2`), case-insensitively.
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('.', "_").as_str() {
            "db2" => Ok(WaveletName::Db2),
            "db4" => Ok(WaveletName::Db4),
            "db6" => Ok(WaveletName::Db6),
            "sym4" => Ok(WaveletName::Sym4),
            "bior1_1" => Ok(WaveletName::Bior1_1),
            "bior2_2" => Ok(WaveletName::Bior2_2),
            "bior2_4" => Ok(WaveletName::Bior2_4),
            "rbio2_2" => Ok(WaveletName::Rbio2_2),
            other => Err(Error::InvalidParams(format!(
                "unknown wavelet {other:?} (expected one of db2, db4, db6, sym4, bior1_1, bior2_2, bior2_4, rbio2_2)"
            ))),
        }
    }
}

/// Scaling filters, natural order, for the orthogonal families. The synthesis
/// low-pass filter equals the scaling filter; everything else is derived.
const DB2_SCALING: [f64; 4] = [
    0.48296291314453414,
    0.83651630373780791,
    0.22414386804201338,
    -0.12940952255126038,
];

const DB4_SCALING: [f64; 8] = [
    0.2303778133088965,
    0.71484657055291565,
    0.63088076792985891,
    -0.027983769416859854,
    -0.18703481171909308,
    0.030841381835560764,
    0.0328830116668852,
    -0.010597401785069032,
];

const DB6_SCALING: [f64; 12] = [
    0.11154074335010946,
    0.49462389039845309,
    0.75113390802109535,
    0.31525035170919763,
    -0.22626469396543982,
    -0.12976686756726194,
    0.097501605587323049,
    0.027522865530305729,
    -0.03158203931748603,
    0.00055384220116149614,
    0.0047772575109455106,
    -0.0010773010853084796,
];

const SYM4_SCALING: [f64; 8] = [
    0.032223100604051468,
    -0.012603967262031304,
    -0.099219543576633533,
    0.29785779560530605,
    0.80373875180513208,
    0.49761866763277499,
    -0.029635527646002492,
    -0.075765714789502213,
];

/// Decomposition/reconstruction scaling filters for the biorthogonal
/// families, as exact √2-scaled rationals padded to equal length.
const BIOR1_1_LO: [f64; 2] = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];

const BIOR2_2_DEC_LO: [f64; 6] = [
    0.0,
    -0.125 * SQRT_2,
    0.25 * SQRT_2,
    0.75 * SQRT_2,
    0.25 * SQRT_2,
    -0.125 * SQRT_2,
];
const BIOR2_2_REC_LO: [f64; 6] = [0.0, 0.25 * SQRT_2, 0.5 * SQRT_2, 0.25 * SQRT_2, 0.0, 0.0];

const BIOR2_4_DEC_LO: [f64; 10] = [
    0.0,
    3.0 / 128.0 * SQRT_2,
    -3.0 / 64.0 * SQRT_2,
    -0.125 * SQRT_2,
    19.0 / 64.0 * SQRT_2,
    45.0 / 64.0 * SQRT_2,
    19.0 / 64.0 * SQRT_2,
    -0.125 * SQRT_2,
    -3.0 / 64.0 * SQRT_2,
    3.0 / 128.0 * SQRT_2,
];
const BIOR2_4_REC_LO: [f64; 10] = [
    0.0,
    0.0,
    0.0,
    0.25 * SQRT_2,
    0.5 * SQRT_2,
    0.25 * SQRT_2,
    0.0,
    0.0,
    0.0,
    0.0,
];

/// The four FIR filters of a two-channel analysis/synthesis bank.
///
/// All four filters share one length. `dec_*` are the analysis filters,
/// `rec_*` the synthesis filters. For orthogonal banks `dec_lo` is the
/// reversed `rec_lo`; the high-pass pair is derived by sign alternation:
/// `dec_hi[m] = (−1)^m · rec_lo[m]` and `rec_hi[m] = (−1)^(m+1) · dec_lo[m]`,
/// which cancels aliasing exactly under the periodized transform.
#[derive(Debug, Clone)]
pub struct FilterBank {
    pub name: WaveletName,
    pub dec_lo: Vec<f64>,
    pub dec_hi: Vec<f64>,
    pub rec_lo: Vec<f64>,
    pub rec_hi: Vec<f64>,
    /// True for the db/sym families, whose analysis bank is an isometry.
    pub orthogonal: bool,
}

impl FilterBank {
    /// Filter length shared by all four filters.
    pub fn len(&self) -> usize {
        self.dec_lo.len()
    }

    /// A filter bank is never empty.
    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Build the filter bank for a wavelet from its embedded tap constants.
pub fn filter_bank(name: WaveletName) -> FilterBank {
    let (dec_lo, rec_lo, orthogonal): (Vec<f64>, Vec<f64>, bool) = match name {
        WaveletName::Db2 => from_scaling(&DB2_SCALING),
        WaveletName::Db4 => from_scaling(&DB4_SCALING),
        WaveletName::Db6 => from_scaling(&DB6_SCALING),
        WaveletName::Sym4 => from_scaling(&SYM4_SCALING),
        WaveletName::Bior1_1 => (BIOR1_1_LO.to_vec(), BIOR1_1_LO.to_vec(), false),
        WaveletName::Bior2_2 => (BIOR2_2_DEC_LO.to_vec(), BIOR2_2_REC_LO.to_vec(), false),
        WaveletName::Bior2_4 => (BIOR2_4_DEC_LO.to_vec(), BIOR2_4_REC_LO.to_vec(), false),
        // The reverse biorthogonal bank swaps the decomposition and
        // reconstruction roles of its bior counterpart (filters reversed so
        // both stay causal in the stored convention).
        WaveletName::Rbio2_2 => (
            reversed(&BIOR2_2_REC_LO),
            reversed(&BIOR2_2_DEC_LO),
            false,
        ),
    };
    let dec_hi = derive_dec_hi(&rec_lo);
    let rec_hi = derive_rec_hi(&dec_lo);
    FilterBank {
        name,
        dec_lo,
        dec_hi,
        rec_lo,
        rec_hi,
        orthogonal,
    }
}

/// Parse a wavelet name, for config/CLI plumbing.
pub fn parse_wavelet(s: &str) -> Result<WaveletName> {
    s.parse()
}

fn from_scaling(h: &[f64]) -> (Vec<f64>, Vec<f64>, bool) {
    (reversed(h), h.to_vec(), true)
}

fn reversed(f: &[f64]) -> Vec<f64> {
    f.iter().rev().copied().collect()
}

fn derive_dec_hi(rec_lo: &[f64]) -> Vec<f64> {
    rec_lo
        .iter()
        .enumerate()
        .map(|(m, &v)| if m % 2 == 0 { v } else { -v })
        .collect()
}

fn derive_rec_hi(dec_lo: &[f64]) -> Vec<f64> {
    dec_lo
        .iter()
        .enumerate()
        .map(|(m, &v)| if m % 2 == 0 { -v } else { v })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// ⟨a, a shifted by 2k⟩ for lag index k.
    fn even_shift_dot(a: &[f64], k: usize) -> f64 {
        let shift = 2 * k;
        (0..a.len().saturating_sub(shift))
            .map(|i| a[i] * a[i + shift])
            .sum()
    }

    /// Full linear convolution of two filters.
    fn conv(a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                out[i + j] += ai * bj;
            }
        }
        out
    }

    #[test]
    fn all_banks_have_consistent_shape() {
        for name in WaveletName::ALL {
            let fb = filter_bank(name);
            assert_eq!(fb.dec_lo.len(), fb.dec_hi.len());
            assert_eq!(fb.dec_lo.len(), fb.rec_lo.len());
            assert_eq!(fb.dec_lo.len(), fb.rec_hi.len());
            assert!(fb.len() >= 2 && fb.len().is_multiple_of(2));
        }
    }

    #[test]
    fn lowpass_dc_gain_is_sqrt2_and_highpass_dc_gain_is_zero() {
        for name in WaveletName::ALL {
            let fb = filter_bank(name);
            let sum_dec_lo: f64 = fb.dec_lo.iter().sum();
            let sum_dec_hi: f64 = fb.dec_hi.iter().sum();
            assert_abs_diff_eq!(sum_dec_lo, SQRT_2, epsilon = 1e-12);
            assert_abs_diff_eq!(sum_dec_hi, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn orthogonal_banks_satisfy_even_shift_orthonormality() {
        for name in WaveletName::ALL {
            let fb = filter_bank(name);
            if !fb.orthogonal {
                continue;
            }
            for k in 0..fb.len() / 2 {
                let expected = if k == 0 { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(even_shift_dot(&fb.dec_lo, k), expected, epsilon = 1e-12);
            }
            // Low- and high-pass analysis filters are mutually orthogonal.
            let cross: f64 = fb.dec_lo.iter().zip(&fb.dec_hi).map(|(a, b)| a * b).sum();
            assert_abs_diff_eq!(cross, 0.0, epsilon = 1e-12);
        }
    }

    /// The product filter dec_lo ∗ rec_lo must be half-band: 1 at the center
    /// (odd) index L−1 and 0 at every other odd index. Together with the
    /// sign-alternated high-pass construction this is exactly the condition
    /// for distortion-free, alias-free two-channel reconstruction, so it is
    /// asserted for the biorthogonal banks and (redundantly) the orthogonal
    /// ones.
    #[test]
    fn product_filters_are_half_band() {
        for name in WaveletName::ALL {
            let fb = filter_bank(name);
            for (a, b) in [(&fb.dec_lo, &fb.rec_lo), (&fb.dec_hi, &fb.rec_hi)] {
                let p = conv(a, b);
                let center = fb.len() - 1;
                let mut idx = 1;
                while idx < p.len() {
                    let expected = if idx == center { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(p[idx], expected, epsilon = 1e-12);
                    idx += 2;
                }
            }
        }
    }

    #[test]
    fn haar_bank_matches_hand_values() {
        let fb = filter_bank(WaveletName::Bior1_1);
        assert_abs_diff_eq!(fb.dec_lo[0], FRAC_1_SQRT_2, epsilon = 0.0);
        assert_abs_diff_eq!(fb.dec_lo[1], FRAC_1_SQRT_2, epsilon = 0.0);
        assert_abs_diff_eq!(fb.dec_hi[0], FRAC_1_SQRT_2, epsilon = 0.0);
        assert_abs_diff_eq!(fb.dec_hi[1], -FRAC_1_SQRT_2, epsilon = 0.0);
    }

    /// The 4-tap scaling filter has the closed form
    /// [(1+√3), (3+√3), (3−√3), (1−√3)] / (4√2).
    #[test]
    fn db2_matches_closed_form() {
        let fb = filter_bank(WaveletName::Db2);
        let s3 = 3.0_f64.sqrt();
        let d = 4.0 * SQRT_2;
        let expected = [(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d];
        for (got, want) in fb.rec_lo.iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
    }

    /// First moment of the analysis high-pass filter vanishes for db2
    /// (two vanishing moments).
    #[test]
    fn db2_high_pass_kills_linear_trends() {
        let fb = filter_bank(WaveletName::Db2);
        let first_moment: f64 = fb
            .dec_hi
            .iter()
            .enumerate()
            .map(|(m, &v)| m as f64 * v)
            .sum();
        assert_abs_diff_eq!(first_moment, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn reverse_bank_swaps_roles_of_its_counterpart() {
        let fwd = filter_bank(WaveletName::Bior2_2);
        let rev = filter_bank(WaveletName::Rbio2_2);
        let flipped: Vec<f64> = fwd.rec_lo.iter().rev().copied().collect();
        assert_eq!(rev.dec_lo, flipped);
        let flipped: Vec<f64> = fwd.dec_lo.iter().rev().copied().collect();
        assert_eq!(rev.rec_lo, flipped);
    }

    #[test]
    fn names_round_trip_and_accept_dotted_forms() {
        for name in WaveletName::ALL {
            let parsed: WaveletName = name.as_str().parse().unwrap();
            assert_eq!(parsed, name);
        }
        assert_eq!("bior2.2".parse::<WaveletName>().unwrap(), WaveletName::Bior2_2);
        assert_eq!("DB2".parse::<WaveletName>().unwrap(), WaveletName::Db2);
        assert!("db3".parse::<WaveletName>().is_err());
    }
}
