//! Numerical log-concavity verification of the selection objective.

use super::objective::Objective;
use serde::{Deserialize, Serialize};

/// Which objective the checker evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObjectiveVariant {
    Standard,
    /// Negative control: the h term enters the composition with flipped
    /// sign, which destroys concavity of the log objective.
    SignFlippedH,
}

/// Report of one concavity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcavityReport {
    pub pass: bool,
    pub grid_points: usize,
    /// Largest second central difference observed (concavity wants <= 0).
    pub max_second_difference: f64,
    /// First grid position whose second difference exceeds the tolerance.
    pub first_violation: Option<(f64, f64)>,
    /// `(gamma_r0 / (e^n - 1))^(1/n)`: below this relay distance the h term
    /// stops being log-concave on its own.
    pub h_condition_threshold: f64,
    /// Threshold below the reference distance d0.
    pub h_condition_below_ref: bool,
    /// Threshold below the search domain (stronger requirement actually used
    /// by the concavity argument: the non-log-concave region of h lies
    /// outside the domain).
    pub h_condition_below_domain: bool,
    pub tolerance: f64,
}

/// Evaluate log f on a uniform grid over the search range and check that all
/// second central differences stay below `+tolerance` (1e-9).
///
/// Also reports where the h-term concavity condition starts holding and
/// whether that point lies below d0 / below the search domain.
pub fn verify_logconcavity(
    obj: &Objective,
    grid_points: usize,
    variant: ObjectiveVariant,
) -> ConcavityReport {
    assert!(grid_points >= 3, "need at least three grid points");
    let tolerance = 1e-9;
    let (lo, hi) = obj.domain();
    assert!(lo < hi, "empty search domain");
    let step = (hi - lo) / grid_points as f64;
    let values: Vec<f64> = (0..grid_points)
        .map(|i| {
            let x = lo + (i + 1) as f64 * step;
            match variant {
                ObjectiveVariant::Standard => obj.log_f(x),
                ObjectiveVariant::SignFlippedH => obj.log_f_sign_flipped_h(x),
            }
        })
        .collect();

    let mut max_sd = f64::NEG_INFINITY;
    let mut first_violation = None;
    for i in 1..grid_points - 1 {
        let sd = values[i + 1] - 2.0 * values[i] + values[i - 1];
        if sd > max_sd {
            max_sd = sd;
        }
        if sd > tolerance && first_violation.is_none() {
            first_violation = Some((lo + (i + 1) as f64 * step, sd));
        }
    }

    let n = obj.path_loss_exp;
    let threshold = (obj.gamma_r0 / (n.exp() - 1.0)).powf(1.0 / n);
    ConcavityReport {
        pass: first_violation.is_none(),
        grid_points,
        max_second_difference: max_sd,
        first_violation,
        h_condition_threshold: threshold,
        h_condition_below_ref: threshold < obj.ref_dist,
        h_condition_below_domain: threshold < lo,
        tolerance,
    }
}
