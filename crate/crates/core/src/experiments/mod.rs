//! Monte-Carlo experiment drivers.
//!
//! Every driver is deterministic for a given (config, seed): trial RNGs are
//! derived from the root seed with a splitmix step, realizations run in
//! parallel, and aggregation is an order-independent indexed reduction.

mod compare;
mod decode_sweep;
mod densify;
mod ratemap;
mod report;
mod snrcdf;
mod trial;
mod verify;

pub use compare::{run_rate_comparison, CompareBin, CompareRecord, CompareReport};
pub use decode_sweep::{run_decoding_sweep, DecodeSweepReport, SweepRow};
pub use densify::{run_densification, DensificationReport, DensifyPoint};
pub use ratemap::{run_rate_map, RateMapEntry, RateMapReport};
pub use report::{write_csv, write_json};
pub use snrcdf::{EmpiricalCdf, SnrBandProbabilities, SnrCdfReport, run_snr_cdf};
pub use trial::{derive_rng, splitmix64, TrialContext};
pub use verify::{run_verify_suite, VerifyLine};

use crate::netmodel::{PowerProfile, PropagationParams};
use serde::{Deserialize, Serialize};

/// Which links see Rayleigh fading in a Monte-Carlo run.
///
/// Fading gains are drawn once per (user, realization) and are reciprocal
/// within a node pair (time-division duplexing), so the base-relay pair and
/// the user-relay pair each get a single gain per trial shared by every
/// candidate relay. That keeps the per-relay comparison apples-to-apples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FadingMode {
    /// Rayleigh on both node pairs.
    AllLinks,
    /// Rayleigh on the user-relay pair only; the fixed infrastructure links
    /// (base station to relay) are deterministic. This is the mode the
    /// received-SNR census uses: the base-side SNR at the selected relay then
    /// takes one value per relay, which is what gives its CDF steps.
    UserSideOnly,
    /// No fading anywhere (geometry-only runs).
    None,
}

/// Configuration shared by the experiment drivers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_realizations: usize,
    pub n_users: usize,
    /// Relay grid spacings (m) for the comparison and SNR-census drivers.
    pub relay_separations: Vec<f64>,
    pub seed: u64,
    pub fading: FadingMode,
    /// User-distance bin width for rate curves (m).
    pub bin_width_m: f64,
    /// SC-PNC outage threshold (bps/Hz).
    pub target_rate: f64,
    /// Gradient-ascent step size.
    pub step: f64,
    pub max_iter: usize,
    /// Density factors relative to the reference relay density.
    pub density_factors: Vec<f64>,
    /// Reference relay density (relays per square kilometre).
    pub reference_density_per_km2: f64,
    /// Estimate the user distance through the current fading draw instead of
    /// the fading-free inversion.
    pub estimate_with_fading: bool,
    /// SNR pairs (user-link dB, base-link dB) for the decoding sweep.
    pub snr_pairs: Vec<(f64, f64)>,
    pub frames_per_pair: usize,
    pub frame_info_bits: usize,
    pub max_log_xor: bool,
    pub pilot_csi: bool,
    pub pilot_len: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_realizations: 1000,
            n_users: 100,
            relay_separations: vec![10.0, 400.0],
            seed: 1,
            fading: FadingMode::AllLinks,
            bin_width_m: 50.0,
            target_rate: 0.5,
            step: 0.01,
            max_iter: 10_000,
            density_factors: vec![1.0, 2.0, 4.0, 6.0, 8.0, 10.0],
            reference_density_per_km2: 10.0,
            estimate_with_fading: false,
            snr_pairs: vec![
                (7.0, 7.5),
                (7.0, 9.0),
                (7.0, 9.5),
                (7.5, 7.5),
                (7.5, 9.5),
                (7.5, 10.5),
                (7.5, 13.5),
                (9.5, 9.5),
                (9.5, 10.5),
                (9.5, 13.5),
                (12.5, 20.5),
            ],
            frames_per_pair: 10_000,
            frame_info_bits: 512,
            max_log_xor: false,
            pilot_csi: false,
            pilot_len: 64,
        }
    }
}

/// Bundle of the three configuration blocks a run needs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunConfig {
    pub power: PowerProfile,
    pub prop: PropagationParams,
    pub exp: ExperimentConfig,
}
