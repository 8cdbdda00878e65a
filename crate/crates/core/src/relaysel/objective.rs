//! The selection objective, its search domain and its gradient.

use super::SelError;
use crate::netmodel::{Point, PowerProfile, PropagationParams};
use crate::rates::{self, Strategy};
use serde::{Deserialize, Serialize};

/// `D = 1 + (P_B / P_A)^(1/n)` from the transmit powers in dBm.
///
/// Under the base > user power ordering, `1 < D < 2`, which makes the
/// restricted search range `(x_B/2, x_B/D]` non-empty.
pub fn compute_big_d(p_a_dbm: f64, p_b_dbm: f64, n: f64) -> f64 {
    1.0 + 10f64.powf((p_b_dbm - p_a_dbm) / (10.0 * n))
}

/// Which of the four bottleneck-pair cases applies at relay position `x_r0`
/// on the segment between the base station (origin) and the user at `x_b`.
///
/// Case 1 pairs the base-to-relay MA link with the relay-to-base BC link,
/// case 4 the user-side pair, and cases 2/3 the mixed pairs. Case 2 is empty
/// whenever `D < 2`.
pub fn classify_case(x_r0: f64, x_b: f64, d_big: f64, ref_dist: f64) -> Result<u8, SelError> {
    if x_r0 < ref_dist || x_r0 > x_b {
        return Err(SelError::OutOfSegment(x_r0, ref_dist, x_b));
    }
    let above_d = x_r0 > x_b / d_big;
    let above_half = x_r0 > x_b / 2.0;
    Ok(match (above_d, above_half) {
        (true, true) => 1,
        (true, false) => 2,
        (false, true) => 3,
        (false, false) => 4,
    })
}

/// How the gradient is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum GradientMode {
    /// Drop the `s/(1+s)` factors (valid when the link SNRs are large).
    #[default]
    Simplified,
    /// Full derivatives of g and h.
    Exact,
}

/// Linear-model selection objective: per-link SNR scale factors with the
/// distance dependence stripped out, plus the search geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    /// User-side MA scale: `pbar_B |h_BR0|^2 / N0W`.
    pub gamma_b: f64,
    /// Relay-side BC scale: `pbar_R0 |h_R0A|^2 / N0W`.
    pub gamma_r0: f64,
    /// Estimated user distance (m).
    pub x_b_hat: f64,
    /// Path loss exponent.
    pub path_loss_exp: f64,
    /// Power-imbalance constant D.
    pub d_big: f64,
    /// Reference distance d0 (m).
    pub ref_dist: f64,
    /// Transmit power ratio base/relay in linear scale; lets the selector
    /// derive the base-to-relay MA SNR from `gamma_r0`.
    pub ratio_a_over_r: f64,
    /// Transmit power ratio relay/user in linear scale.
    pub ratio_r_over_b: f64,
    /// Fading gains folded into `gamma_r0` / `gamma_b`; kept so the
    /// deterministic (unit-fading) view can be recovered.
    pub fading_a: f64,
    pub fading_b: f64,
}

impl Objective {
    /// Build the objective from network parameters and the fading gains of
    /// the current realization (`fading_a` on the base-relay pair, `fading_b`
    /// on the user-relay pair).
    pub fn from_network(
        pow: &PowerProfile,
        prop: &PropagationParams,
        fading_a: f64,
        fading_b: f64,
        x_b_hat: f64,
    ) -> Self {
        let noise = pow.noise_watts();
        let pbar_b = crate::netmodel::free_space_factor(pow.p_b_dbm, prop);
        let pbar_r = crate::netmodel::free_space_factor(pow.p_r_dbm, prop);
        Self {
            gamma_b: pbar_b * fading_b / noise,
            gamma_r0: pbar_r * fading_a / noise,
            x_b_hat,
            path_loss_exp: prop.path_loss_exp,
            d_big: compute_big_d(pow.p_a_dbm, pow.p_b_dbm, prop.path_loss_exp),
            ref_dist: prop.ref_dist_m,
            ratio_a_over_r: 10f64.powf((pow.p_a_dbm - pow.p_r_dbm) / 10.0),
            ratio_r_over_b: 10f64.powf((pow.p_r_dbm - pow.p_b_dbm) / 10.0),
            fading_a,
            fading_b,
        }
    }

    /// The unit-fading view of this objective: selection decouples the final
    /// relay pick from the current fades, judging candidates on deterministic
    /// geometry only.
    pub fn deterministic(&self) -> Self {
        Self {
            gamma_b: self.gamma_b / self.fading_b,
            gamma_r0: self.gamma_r0 / self.fading_a,
            fading_a: 1.0,
            fading_b: 1.0,
            ..*self
        }
    }

    /// Search interval `(lo, hi]`: the restricted range, further capped so
    /// the relay stays at least d0 away from the user. Empty iff `lo >= hi`.
    pub fn domain(&self) -> (f64, f64) {
        let lo = self.x_b_hat / 2.0;
        let hi = (self.x_b_hat / self.d_big).min(self.x_b_hat - self.ref_dist);
        (lo, hi)
    }

    pub(super) fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.domain();
        x > lo && x <= hi
    }

    /// g, h and their first derivatives at `x` (no domain check).
    pub(super) fn terms(&self, x: f64, mode: GradientMode) -> Terms {
        let n = self.path_loss_exp;
        let y = self.x_b_hat - x;
        let s_g = self.gamma_b * y.powf(-n);
        let s_h = self.gamma_r0 * x.powf(-n);
        let g = s_g.ln_1p();
        let h = s_h.ln_1p();
        let (g_prime, h_prime) = match mode {
            GradientMode::Simplified => (n / y, -n / x),
            GradientMode::Exact => (
                n / y * (s_g / (1.0 + s_g)),
                -n / x * (s_h / (1.0 + s_h)),
            ),
        };
        Terms { g, h, g_prime, h_prime }
    }

    /// log f at `x` (no domain check).
    pub(super) fn log_f(&self, x: f64) -> f64 {
        let t = self.terms(x, GradientMode::Simplified);
        t.g.ln() + t.h.ln() - (t.g + t.h).ln() - std::f64::consts::LN_2.ln()
    }

    /// Corrupted log-objective used as a negative control for the concavity
    /// checker: the h term enters the composition with flipped sign.
    pub(super) fn log_f_sign_flipped_h(&self, x: f64) -> f64 {
        let t = self.terms(x, GradientMode::Simplified);
        t.g.ln() + t.h.ln() - (t.g - t.h).abs().max(f64::MIN_POSITIVE).ln()
            - std::f64::consts::LN_2.ln()
    }

    /// Gradient of log f at `x` (no domain check).
    pub(super) fn grad_log_f(&self, x: f64, mode: GradientMode) -> f64 {
        let t = self.terms(x, mode);
        t.g_prime / t.g + t.h_prime / t.h - (t.g_prime + t.h_prime) / (t.g + t.h)
    }

    /// Lattice-code PNC-B rate through a relay at MA distances
    /// (`d_ar` from the base station, `d_br` from the user), using this
    /// objective's channel knowledge. Distances are floored at d0, where the
    /// propagation model stops being valid.
    pub fn lattice_rate_at(&self, d_ar: f64, d_br: f64) -> f64 {
        let n = self.path_loss_exp;
        let d_ar = d_ar.max(self.ref_dist);
        let d_br = d_br.max(self.ref_dist);
        let att_a = d_ar.powf(-n);
        let att_b = d_br.powf(-n);
        let snr_r0a = self.gamma_r0 * att_a;
        let snr_ar0 = snr_r0a * self.ratio_a_over_r;
        let snr_br0 = self.gamma_b * att_b;
        let snr_r0b = snr_br0 * self.ratio_r_over_b;
        match rates::breakdown(snr_ar0, snr_br0, snr_r0a, snr_r0b, Strategy::PncB) {
            Ok(bd) => bd.r_overall,
            Err(_) => 0.0,
        }
    }
}

pub(super) struct Terms {
    pub g: f64,
    pub h: f64,
    pub g_prime: f64,
    pub h_prime: f64,
}

/// The selection objective `f(x) = (1/ln 2) * g h / (g + h)` with
/// `g = ln(1 + gamma_b (x_b - x)^-n)` and `h = ln(1 + gamma_r0 x^-n)`,
/// defined on the restricted search range.
pub fn objective_f(x_r0: f64, obj: &Objective) -> Result<f64, SelError> {
    let (lo, hi) = obj.domain();
    if !obj.contains(x_r0) {
        return Err(SelError::OutOfDomain(x_r0, lo, hi));
    }
    Ok(obj.log_f(x_r0).exp())
}

/// Gradient of `log f` at `x_r0`.
pub fn gradient_logf(x_r0: f64, obj: &Objective, mode: GradientMode) -> Result<f64, SelError> {
    let (lo, hi) = obj.domain();
    if !obj.contains(x_r0) {
        return Err(SelError::OutOfDomain(x_r0, lo, hi));
    }
    Ok(obj.grad_log_f(x_r0, mode))
}

/// Planar-model objective: same scale factors, with the user position
/// estimate as a point in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarObjective {
    pub gamma_b: f64,
    pub gamma_r0: f64,
    /// Estimated user position.
    pub user_pos_hat: Point,
    pub path_loss_exp: f64,
    pub d_big: f64,
    pub ref_dist: f64,
    pub ratio_a_over_r: f64,
    pub ratio_r_over_b: f64,
}

impl PlanarObjective {
    pub fn from_network(
        pow: &PowerProfile,
        prop: &PropagationParams,
        fading_a: f64,
        fading_b: f64,
        user_pos_hat: Point,
    ) -> Self {
        let lin = Objective::from_network(pow, prop, fading_a, fading_b, 0.0);
        Self {
            gamma_b: lin.gamma_b,
            gamma_r0: lin.gamma_r0,
            user_pos_hat,
            path_loss_exp: lin.path_loss_exp,
            d_big: lin.d_big,
            ref_dist: lin.ref_dist,
            ratio_a_over_r: lin.ratio_a_over_r,
            ratio_r_over_b: lin.ratio_r_over_b,
        }
    }

    fn as_linear(&self) -> Objective {
        Objective {
            gamma_b: self.gamma_b,
            gamma_r0: self.gamma_r0,
            x_b_hat: self.user_pos_hat.radius(),
            path_loss_exp: self.path_loss_exp,
            d_big: self.d_big,
            ref_dist: self.ref_dist,
            ratio_a_over_r: self.ratio_a_over_r,
            ratio_r_over_b: self.ratio_r_over_b,
        }
    }

    /// log f at point `p`, or `None` when a distance falls below d0.
    pub(super) fn log_f(&self, p: Point) -> Option<f64> {
        let d_ar = p.radius();
        let d_br = p.distance_to(self.user_pos_hat);
        if d_ar < self.ref_dist || d_br < self.ref_dist {
            return None;
        }
        let n = self.path_loss_exp;
        let g = (self.gamma_b * d_br.powf(-n)).ln_1p();
        let h = (self.gamma_r0 * d_ar.powf(-n)).ln_1p();
        Some(g.ln() + h.ln() - (g + h).ln() - std::f64::consts::LN_2.ln())
    }

    /// Gradient of log f at `p`.
    pub(super) fn grad_log_f(&self, p: Point, mode: GradientMode) -> Option<(f64, f64)> {
        let d_ar = p.radius();
        let d_br = p.distance_to(self.user_pos_hat);
        if d_ar < self.ref_dist || d_br < self.ref_dist {
            return None;
        }
        let n = self.path_loss_exp;
        let s_g = self.gamma_b * d_br.powf(-n);
        let s_h = self.gamma_r0 * d_ar.powf(-n);
        let g = s_g.ln_1p();
        let h = s_h.ln_1p();
        // Radial derivatives of g and h with respect to their distances.
        let (dg_dd, dh_dd) = match mode {
            GradientMode::Simplified => (-n / d_br, -n / d_ar),
            GradientMode::Exact => (
                -n / d_br * (s_g / (1.0 + s_g)),
                -n / d_ar * (s_h / (1.0 + s_h)),
            ),
        };
        let u = self.user_pos_hat;
        let grad_g = (
            dg_dd * (p.x - u.x) / d_br,
            dg_dd * (p.y - u.y) / d_br,
        );
        let grad_h = (dh_dd * p.x / d_ar, dh_dd * p.y / d_ar);
        let sum = g + h;
        Some((
            grad_g.0 / g + grad_h.0 / h - (grad_g.0 + grad_h.0) / sum,
            grad_g.1 / g + grad_h.1 / h - (grad_g.1 + grad_h.1) / sum,
        ))
    }

    /// Lattice-code PNC-B rate through a relay at `p` (estimated geometry).
    pub fn lattice_rate_at(&self, p: Point) -> f64 {
        self.as_linear()
            .lattice_rate_at(p.radius(), p.distance_to(self.user_pos_hat))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates;

    fn table_objective(x_b_hat: f64) -> Objective {
        Objective::from_network(
            &PowerProfile::default(),
            &PropagationParams::default(),
            1.0,
            1.0,
            x_b_hat,
        )
    }

    #[test]
    fn big_d_examples() {
        let d = compute_big_d(46.0, 23.0, 3.7);
        assert!((d - 1.2390).abs() < 1e-4, "D = {d}");
        assert!((compute_big_d(30.0, 30.0, 3.7) - 2.0).abs() < 1e-12);
        assert!((compute_big_d(46.0, -1e6, 3.7) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn case_ranges() {
        let d = compute_big_d(46.0, 23.0, 3.7); // 1.239
        let x_b = 1000.0;
        // Restricted range maps to case 3.
        assert_eq!(classify_case(600.0, x_b, d, 10.0).unwrap(), 3);
        assert_eq!(classify_case(x_b / d, x_b, d, 10.0).unwrap(), 3);
        assert_eq!(classify_case(250.0, x_b, d, 10.0).unwrap(), 4);
        assert_eq!(classify_case(900.0, x_b, d, 10.0).unwrap(), 1);
        assert!(matches!(
            classify_case(5.0, x_b, d, 10.0),
            Err(SelError::OutOfSegment(..))
        ));
        assert!(matches!(
            classify_case(1100.0, x_b, d, 10.0),
            Err(SelError::OutOfSegment(..))
        ));
    }

    #[test]
    fn cases_partition_segment() {
        let d = compute_big_d(46.0, 23.0, 3.7);
        let x_b = 873.0;
        let mut seen = [0usize; 5];
        for i in 0..=10_000 {
            let x = 10.0 + (x_b - 10.0) * i as f64 / 10_000.0;
            let c = classify_case(x, x_b, d, 10.0).unwrap();
            seen[c as usize] += 1;
        }
        // Every point maps to exactly one case, and case 2 is empty for D < 2.
        assert_eq!(seen[2], 0);
        assert!(seen[1] > 0 && seen[3] > 0 && seen[4] > 0);
        assert_eq!(seen[1] + seen[3] + seen[4], 10_001);
    }

    #[test]
    fn objective_matches_rate_module_composition() {
        let obj = table_objective(1000.0);
        let n = obj.path_loss_exp;
        for x in [505.0, 600.0, 700.0, 800.0] {
            let f = objective_f(x, &obj).unwrap();
            let snr_br0 = obj.gamma_b * (1000.0 - x).powf(-n);
            let snr_r0a = obj.gamma_r0 * x.powf(-n);
            let r_br0 = (1.0 + snr_br0).log2();
            let r_r0a = (1.0 + snr_r0a).log2();
            let (harmonic, _, _) = rates::rate_pncb(r_br0, r_r0a);
            assert!(
                (f - harmonic).abs() < 1e-12,
                "x = {x}: f = {f}, harmonic = {harmonic}"
            );
        }
    }

    #[test]
    fn objective_midpoint_symmetry() {
        // Equal scale factors: just inside the midpoint the two log terms are
        // nearly equal, so f approaches half of either term over ln 2.
        let mut obj = table_objective(1000.0);
        obj.gamma_r0 = obj.gamma_b;
        let x = 500.0 + 1e-6;
        let f = objective_f(x, &obj).unwrap();
        let g = (obj.gamma_b * 500f64.powf(-obj.path_loss_exp)).ln_1p();
        let expected = g / (2.0 * std::f64::consts::LN_2);
        assert!((f - expected).abs() < 1e-6 * expected);
    }

    #[test]
    fn objective_rejects_out_of_domain() {
        let obj = table_objective(1000.0);
        assert!(matches!(
            objective_f(499.0, &obj),
            Err(SelError::OutOfDomain(..))
        ));
        assert!(matches!(
            objective_f(850.0, &obj),
            Err(SelError::OutOfDomain(..))
        ));
    }

    #[test]
    fn domain_caps_at_user_standoff() {
        // For a nearby user, the d0 standoff from the user binds before x/D.
        let obj = table_objective(40.0);
        let (lo, hi) = obj.domain();
        assert_eq!(lo, 20.0);
        assert!((hi - 30.0).abs() < 1e-12);
        // And for a very close user the domain is empty.
        let obj = table_objective(18.0);
        let (lo, hi) = obj.domain();
        assert!(lo >= hi);
    }

    #[test]
    fn exact_gradient_matches_finite_differences() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let x_b = rng.random_range(400.0..1000.0);
            let fading_a = rng.random_range(0.2..3.0);
            let fading_b = rng.random_range(0.2..3.0);
            let obj = Objective::from_network(
                &PowerProfile::default(),
                &PropagationParams::default(),
                fading_a,
                fading_b,
                x_b,
            );
            let (lo, hi) = obj.domain();
            let delta = 1e-4;
            let x = rng.random_range((lo + 2.0 * delta)..(hi - 2.0 * delta));
            let exact = gradient_logf(x, &obj, GradientMode::Exact).unwrap();
            let fd = (obj.log_f(x + delta) - obj.log_f(x - delta)) / (2.0 * delta);
            assert!(
                (exact - fd).abs() <= 1e-6 * fd.abs().max(1e-12),
                "x_b = {x_b}, x = {x}: exact {exact} vs fd {fd}"
            );
        }
    }

    #[test]
    fn simplified_gradient_tracks_exact_at_high_snr() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let mut checked = 0;
        while checked < 100 {
            let x_b = rng.random_range(400.0..1000.0);
            let obj = table_objective(x_b);
            let (lo, hi) = obj.domain();
            let x = rng.random_range(lo * 1.0001..hi);
            let t = obj.terms(x, GradientMode::Exact);
            let n = obj.path_loss_exp;
            let s_g = obj.gamma_b * (x_b - x).powf(-n);
            let s_h = obj.gamma_r0 * x.powf(-n);
            if s_g < 100.0 || s_h < 100.0 {
                continue;
            }
            checked += 1;
            // Termwise, dropping s/(1+s) changes each derivative by <= 1%.
            let g_simpl = n / (x_b - x);
            let h_simpl = -n / x;
            assert!((g_simpl - t.g_prime).abs() <= 0.02 * t.g_prime.abs());
            assert!((h_simpl - t.h_prime).abs() <= 0.02 * t.h_prime.abs());
            // Combined field, relative to the natural term scale.
            let exact = obj.grad_log_f(x, GradientMode::Exact);
            let simpl = obj.grad_log_f(x, GradientMode::Simplified);
            let scale = (t.g_prime / t.g).abs()
                + (t.h_prime / t.h).abs()
                + ((t.g_prime + t.h_prime) / (t.g + t.h)).abs();
            assert!(
                (simpl - exact).abs() <= 0.02 * scale,
                "x = {x}: simplified {simpl} vs exact {exact} (scale {scale})"
            );
        }
    }
}
