//! Relay selection for the rate-balanced PNC scheme and the
//! selection-cooperation baseline.
//!
//! The selection objective composes the two bottleneck-link rates of the
//! restricted search range into their harmonic mean; its logarithm is
//! maximised by fixed-step gradient ascent. The baseline (SC-PNC) filters
//! relays that are in multiple-access outage and then maximises the minimum
//! broadcast-link rate, with equal time slots.

mod ascent;
mod concavity;
mod objective;
mod scpnc;

pub use ascent::{select_relay_pncb_linear, select_relay_pncb_planar, AscentOptions};
pub use concavity::{verify_logconcavity, ConcavityReport, ObjectiveVariant};
pub use objective::{
    classify_case, compute_big_d, gradient_logf, objective_f, GradientMode, Objective,
    PlanarObjective,
};
pub use scpnc::{select_relay_scpnc, RelayLinkSnrs};

use crate::netmodel::Point;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SelError {
    #[error("no candidate relays")]
    NoRelays,
    #[error("position {0} m is outside the search domain ({1}, {2}] m")]
    OutOfDomain(f64, f64, f64),
    #[error("relay position {0} m is outside the segment [{1}, {2}] m")]
    OutOfSegment(f64, f64, f64),
}

/// Which selector produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelectionStrategy {
    PncB,
    ScPnc,
}

/// Why the gradient ascent stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    /// The objective stopped increasing.
    Converged,
    /// A step crossed the outer domain boundary.
    Boundary,
    /// A step crossed the inner (midpoint) domain boundary.
    InnerBoundary,
    /// Iteration budget exhausted.
    MaxIter,
    /// The continuous search domain was empty; an exhaustive candidate scan
    /// was used instead.
    Degenerate,
    /// Not an iterative selection (SC-PNC).
    NotIterative,
}

/// One step of the ascent trace: position and the log-objective value there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub x: f64,
    pub y: f64,
    pub log_f: f64,
}

/// Outcome of a relay selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    /// Index of the chosen relay in the deployment's candidate list.
    pub chosen_index: usize,
    /// Position of the chosen relay.
    pub chosen_pos: Point,
    /// Continuous optimiser solution (equals `chosen_pos` for SC-PNC).
    pub x_star: Point,
    /// Ascent iterations performed (0 for SC-PNC).
    pub iterations: usize,
    /// Ascent trace; empty unless tracing was requested.
    pub trace: Vec<TracePoint>,
    /// Lattice-code PNC-B rate through the chosen relay, computed from the
    /// selector's own channel knowledge (estimated geometry).
    pub achieved_rate: f64,
    pub strategy: SelectionStrategy,
    /// SC-PNC only: every relay failed the outage filter and the best
    /// MA-rate relay was selected instead.
    pub outage: bool,
    pub stop: StopReason,
}
