//! Shared per-trial machinery: seed derivation, user sampling, fading draws
//! and the two relay-selection strategies evaluated on true geometry.

use super::{ExperimentConfig, FadingMode};
use crate::netmodel::{
    estimate_user_distance, LinkParams, Point, PowerProfile, PropagationParams,
};
use crate::rates::{self, Strategy};
use crate::relaysel::{
    select_relay_pncb_planar, select_relay_scpnc, AscentOptions, PlanarObjective, RelayLinkSnrs,
    SelectionResult,
};
use crate::netmodel::Deployment;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// splitmix64 finaliser; used to spread structured (seed, index) pairs into
/// independent RNG seeds.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic RNG for a (root seed, stream, index) triple.
pub fn derive_rng(root: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let s = splitmix64(root ^ splitmix64(stream.wrapping_mul(0xA076_1D64_78BD_642F) ^ index));
    ChaCha8Rng::seed_from_u64(s)
}

/// Uniform user position over the cell disc, at least d0 from the origin.
pub fn sample_user_position<R: Rng + ?Sized>(rng: &mut R, prop: &PropagationParams) -> Point {
    let r2_min = prop.ref_dist_m * prop.ref_dist_m;
    let r2_max = prop.cell_radius_m * prop.cell_radius_m;
    let radius = rng.random_range(r2_min..r2_max).sqrt();
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    Point::new(radius * theta.cos(), radius * theta.sin())
}

/// Fading gains for the base-relay and user-relay node pairs of one trial.
pub fn sample_gains<R: Rng + ?Sized>(rng: &mut R, mode: FadingMode) -> (f64, f64) {
    match mode {
        FadingMode::AllLinks => (
            crate::netmodel::sample_fading(rng),
            crate::netmodel::sample_fading(rng),
        ),
        FadingMode::UserSideOnly => (1.0, crate::netmodel::sample_fading(rng)),
        FadingMode::None => (1.0, 1.0),
    }
}

/// Precomputed per-separation candidate data reused across trials.
pub struct TrialContext {
    pub deployment: Deployment,
    /// Distance of every candidate from the base station.
    pub radii: Vec<f64>,
    /// `radius^-n` of every candidate.
    pub att_a: Vec<f64>,
    pub link: LinkParams,
    pub pow: PowerProfile,
    pub prop: PropagationParams,
    pub ascent: AscentOptions,
    pub target_rate: f64,
    pub estimate_with_fading: bool,
}

impl TrialContext {
    pub fn new(
        relays: Vec<Point>,
        separation: f64,
        pow: &PowerProfile,
        prop: &PropagationParams,
        cfg: &ExperimentConfig,
    ) -> Self {
        let n = prop.path_loss_exp;
        let radii: Vec<f64> = relays.iter().map(|p| p.radius()).collect();
        let att_a: Vec<f64> = radii.iter().map(|&r| r.powf(-n)).collect();
        // The drivers never read `user_pos` from the deployment; a dummy
        // position keeps one shared deployment valid for all trials.
        let deployment = Deployment {
            model: crate::netmodel::GeometryModel::Planar,
            user_pos: Point::on_axis(prop.ref_dist_m),
            relay_positions: relays,
            relay_separation: separation,
        };
        Self {
            deployment,
            radii,
            att_a,
            link: LinkParams::new(pow, prop),
            pow: *pow,
            prop: *prop,
            ascent: AscentOptions {
                step: cfg.step,
                max_iter: cfg.max_iter,
                ..AscentOptions::default()
            },
            target_rate: cfg.target_rate,
            estimate_with_fading: cfg.estimate_with_fading,
        }
    }

    /// The user position estimate fed to the selector: true direction, with
    /// the distance recovered from the base-to-user SNR. With fading-free
    /// estimation this reproduces the true position exactly.
    pub fn estimated_user_pos<R: Rng + ?Sized>(
        &self,
        user: Point,
        rng: &mut R,
        fading: FadingMode,
    ) -> Point {
        let dist = user.radius();
        let est = if self.estimate_with_fading {
            let (_, g_est) = sample_gains(rng, fading);
            let snr = self
                .link
                .snr(self.link.pbar_a, g_est, dist.max(self.prop.ref_dist_m));
            estimate_user_distance(snr, &self.pow, &self.prop)
        } else {
            dist
        };
        Point::new(user.x * est / dist, user.y * est / dist)
    }

    /// Four directed-link SNRs of candidate `i` for a user at `user` with
    /// trial gains `(g_a, g_b)`. Sub-reference user distances are evaluated
    /// at the d0 floor, where the propagation model stops resolving.
    pub fn candidate_snrs(&self, i: usize, user: Point, g_a: f64, g_b: f64) -> RelayLinkSnrs {
        let d_br = self.deployment.relay_positions[i]
            .distance_to(user)
            .max(self.prop.ref_dist_m);
        let att_b = d_br.powf(-self.prop.path_loss_exp);
        let noise = self.link.noise_w;
        RelayLinkSnrs {
            snr_ar0: self.link.pbar_a * g_a * self.att_a[i] / noise,
            snr_br0: self.link.pbar_b * g_b * att_b / noise,
            snr_r0a: self.link.pbar_r * g_a * self.att_a[i] / noise,
            snr_r0b: self.link.pbar_r * g_b * att_b / noise,
        }
    }

    /// Lattice PNC-B rate through candidate `i` on true geometry.
    pub fn pncb_rate_at(&self, i: usize, user: Point, g_a: f64, g_b: f64) -> f64 {
        let s = self.candidate_snrs(i, user, g_a, g_b);
        rates::breakdown(s.snr_ar0, s.snr_br0, s.snr_r0a, s.snr_r0b, Strategy::PncB)
            .map(|bd| bd.r_overall)
            .unwrap_or(0.0)
    }

    /// PNC-B selection for one trial; the reported rate is re-evaluated on
    /// the true geometry.
    pub fn select_pncb(&self, user: Point, user_hat: Point, g_a: f64, g_b: f64) -> (SelectionResult, f64) {
        let obj = PlanarObjective::from_network(&self.pow, &self.prop, g_a, g_b, user_hat);
        let res = select_relay_pncb_planar(&self.deployment, &obj, &self.ascent)
            .expect("non-empty candidate set");
        let rate = self.pncb_rate_at(res.chosen_index, user, g_a, g_b);
        (res, rate)
    }

    /// SC-PNC selection for one trial, with the scratch SNR buffer supplied
    /// by the caller so scans over large grids do not reallocate.
    pub fn select_scpnc(
        &self,
        user: Point,
        g_a: f64,
        g_b: f64,
        scratch: &mut Vec<RelayLinkSnrs>,
    ) -> (SelectionResult, f64) {
        scratch.clear();
        scratch.extend(
            (0..self.deployment.relay_positions.len())
                .map(|i| self.candidate_snrs(i, user, g_a, g_b)),
        );
        let res = select_relay_scpnc(&self.deployment, scratch, self.target_rate)
            .expect("non-empty candidate set");
        let s = &scratch[res.chosen_index];
        let rate = rates::rate_pnc_equal(
            rates::rate_ma_lattice(s.snr_ar0, s.snr_br0).unwrap_or(0.0),
            rates::rate_bc(s.snr_r0a, s.snr_r0b),
        );
        (res, rate)
    }
}

/// Relay grid spacing that realises `factor` times the reference density on
/// this cell.
pub fn spacing_for_density_factor(
    factor: f64,
    reference_density_per_km2: f64,
    prop: &PropagationParams,
) -> f64 {
    let area_km2 = std::f64::consts::PI * (prop.cell_radius_m / 1000.0).powi(2);
    let n_relays = reference_density_per_km2 * factor * area_km2;
    let area_m2 = std::f64::consts::PI * prop.cell_radius_m * prop.cell_radius_m;
    (area_m2 / n_relays).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derive_rng_is_deterministic_and_stream_separated() {
        let mut a = derive_rng(42, 1, 7);
        let mut b = derive_rng(42, 1, 7);
        let mut c = derive_rng(42, 2, 7);
        let xa: u64 = a.random();
        assert_eq!(xa, b.random::<u64>());
        assert_ne!(xa, c.random::<u64>());
    }

    #[test]
    fn user_positions_fill_the_disc() {
        let prop = PropagationParams::default();
        let mut rng = derive_rng(1, 0, 0);
        let mut max_r: f64 = 0.0;
        let mut inner = 0usize;
        for _ in 0..20_000 {
            let p = sample_user_position(&mut rng, &prop);
            let r = p.radius();
            assert!(r >= prop.ref_dist_m && r <= prop.cell_radius_m);
            max_r = max_r.max(r);
            if r < 500.0 {
                inner += 1;
            }
        }
        assert!(max_r > 990.0);
        // Area-uniform: a quarter of the points fall inside half the radius.
        let frac = inner as f64 / 20_000.0;
        assert!((frac - 0.25).abs() < 0.02, "frac = {frac}");
    }

    #[test]
    fn density_spacing_matches_reference() {
        let prop = PropagationParams::default();
        let s1 = spacing_for_density_factor(1.0, 10.0, &prop);
        assert!((s1 - 316.23).abs() < 0.1);
        let s4 = spacing_for_density_factor(4.0, 10.0, &prop);
        assert!((s4 - s1 / 2.0).abs() < 1e-9);
    }
}
