//! Simulation toolkit for two-way relay cellular networks that use
//! physical-layer network coding (PNC) under transmit-power imbalance.
//!
//! The crate is organised around six areas:
//!
//! * [`netmodel`] — cell geometry, path-loss/fading link budgets, SNR.
//! * [`rates`] — information-theoretic rates of the multiple-access and
//!   broadcast phases, equal-slot PNC, and the time-optimal PNC-B composition.
//! * [`relaysel`] — the PNC-B relay-selection objective, its gradient-ascent
//!   solver (linear and planar), the SC-PNC baseline, and a numerical
//!   log-concavity checker.
//! * [`phy`] — link-level simulation of the multiple-access phase:
//!   tail-biting convolutional coding, BPSK over a flat-fading two-user
//!   channel, and the XOR-CD / RMUD / SIC decoder pipeline with linear CRC.
//! * [`experiments`] — Monte-Carlo drivers producing CSV/JSON result files.
//! * [`config`] — plain-text `key = value` configuration loading.

pub mod config;
pub mod experiments;
pub mod netmodel;
pub mod phy;
pub mod rates;
pub mod relaysel;

/// Version string for result-file schemas emitted by the experiment drivers.
pub const SCHEMA_VERSION: &str = "1";
