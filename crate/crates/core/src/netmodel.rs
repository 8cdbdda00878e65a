//! Cell geometry, the path-loss/fading link budget, and SNR computation.
//!
//! The propagation model is the classic two-slope form: a free-space factor
//! up to a reference distance `d0`, then a power-law decay with exponent `n`.
//! All powers are handled in watts internally; configuration values are dBm.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Error, PartialEq)]
pub enum NetModelError {
    /// The path-loss model is not calibrated below the reference distance.
    #[error("distance {distance} m is below the reference distance {ref_dist} m")]
    DistanceBelowReference { distance: f64, ref_dist: f64 },
    #[error("power value {0} dBm is not finite")]
    NonFinitePower(f64),
    #[error("transmit powers must satisfy base > relay > user ({0} / {1} / {2} dBm)")]
    PowerOrdering(f64, f64, f64),
    #[error("invalid propagation parameters: {0}")]
    InvalidPropagation(String),
    #[error("invalid deployment: {0}")]
    InvalidDeployment(String),
}

/// Convert a power in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Convert a power in watts to dBm.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// Transmit powers of the three node roles plus the total noise power, all in dBm.
///
/// The default profile is the standard macro-cell setup: 46 dBm base station,
/// 30 dBm relay, 23 dBm user, with thermal noise over one 180 kHz resource
/// block (-174 dBm/Hz + 10 log10(180e3) = -121.45 dBm).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerProfile {
    /// Base station transmit power (dBm).
    pub p_a_dbm: f64,
    /// Relay transmit power (dBm).
    pub p_r_dbm: f64,
    /// User transmit power (dBm).
    pub p_b_dbm: f64,
    /// Total noise power N0·W (dBm).
    pub noise_dbm: f64,
}

impl Default for PowerProfile {
    fn default() -> Self {
        Self {
            p_a_dbm: 46.0,
            p_r_dbm: 30.0,
            p_b_dbm: 23.0,
            noise_dbm: -121.45,
        }
    }
}

impl PowerProfile {
    /// Validate the profile. `allow_any_powers` skips the base > relay > user
    /// ordering check (the ordering is assumed by the relay-selection math).
    pub fn validate(&self, allow_any_powers: bool) -> Result<(), NetModelError> {
        for p in [self.p_a_dbm, self.p_r_dbm, self.p_b_dbm, self.noise_dbm] {
            if !p.is_finite() {
                return Err(NetModelError::NonFinitePower(p));
            }
        }
        if !allow_any_powers && !(self.p_a_dbm > self.p_r_dbm && self.p_r_dbm > self.p_b_dbm) {
            return Err(NetModelError::PowerOrdering(
                self.p_a_dbm,
                self.p_r_dbm,
                self.p_b_dbm,
            ));
        }
        Ok(())
    }

    /// Noise power in watts.
    pub fn noise_watts(&self) -> f64 {
        dbm_to_watts(self.noise_dbm)
    }
}

/// Path-loss exponent, carrier frequency, reference distance and cell radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationParams {
    /// Path loss exponent n (> 2).
    pub path_loss_exp: f64,
    /// Carrier frequency f_c (Hz).
    pub carrier_freq_hz: f64,
    /// Reference distance d0 (m) below which the model is invalid.
    pub ref_dist_m: f64,
    /// Cell radius r (m).
    pub cell_radius_m: f64,
}

impl Default for PropagationParams {
    fn default() -> Self {
        Self {
            path_loss_exp: 3.7,
            carrier_freq_hz: 1.9e9,
            ref_dist_m: 10.0,
            cell_radius_m: 1000.0,
        }
    }
}

impl PropagationParams {
    pub fn validate(&self) -> Result<(), NetModelError> {
        if !(self.path_loss_exp > 2.0) {
            return Err(NetModelError::InvalidPropagation(format!(
                "path loss exponent must exceed 2, got {}",
                self.path_loss_exp
            )));
        }
        if !(self.ref_dist_m > 0.0) {
            return Err(NetModelError::InvalidPropagation(format!(
                "reference distance must be positive, got {}",
                self.ref_dist_m
            )));
        }
        if !(self.cell_radius_m > self.ref_dist_m) {
            return Err(NetModelError::InvalidPropagation(format!(
                "cell radius {} must exceed the reference distance {}",
                self.cell_radius_m, self.ref_dist_m
            )));
        }
        if !(self.carrier_freq_hz > 0.0) {
            return Err(NetModelError::InvalidPropagation(format!(
                "carrier frequency must be positive, got {}",
                self.carrier_freq_hz
            )));
        }
        Ok(())
    }
}

/// A point in the cell plane, metres from the base station at the origin.
/// Linear deployments put everything on the x axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Point on the x axis.
    pub fn on_axis(x: f64) -> Self {
        Self { x, y: 0.0 }
    }

    pub fn distance_to(&self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }

    /// Distance from the base station at the origin.
    pub fn radius(&self) -> f64 {
        (self.x * self.x + self.y * self.y).sqrt()
    }
}

/// Geometry flavour of a deployment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeometryModel {
    Linear,
    Planar,
}

/// Node placement for one scheduled user and the candidate relay set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deployment {
    pub model: GeometryModel,
    /// Position of the user (node B).
    pub user_pos: Point,
    /// Candidate relay positions.
    pub relay_positions: Vec<Point>,
    /// Grid spacing used to generate the relay set (m).
    pub relay_separation: f64,
}

impl Deployment {
    /// Linear deployment: user at `user_x`, relays at the given x positions.
    pub fn linear(
        user_x: f64,
        relay_xs: &[f64],
        separation: f64,
        prop: &PropagationParams,
    ) -> Result<Self, NetModelError> {
        let dep = Self {
            model: GeometryModel::Linear,
            user_pos: Point::on_axis(user_x),
            relay_positions: relay_xs.iter().map(|&x| Point::on_axis(x)).collect(),
            relay_separation: separation,
        };
        dep.validate(prop)?;
        Ok(dep)
    }

    /// Planar deployment with an explicit relay list.
    pub fn planar(
        user_pos: Point,
        relay_positions: Vec<Point>,
        separation: f64,
        prop: &PropagationParams,
    ) -> Result<Self, NetModelError> {
        let dep = Self {
            model: GeometryModel::Planar,
            user_pos,
            relay_positions,
            relay_separation: separation,
        };
        dep.validate(prop)?;
        Ok(dep)
    }

    fn validate(&self, prop: &PropagationParams) -> Result<(), NetModelError> {
        if self.relay_positions.is_empty() {
            return Err(NetModelError::InvalidDeployment(
                "relay list is empty".into(),
            ));
        }
        let r = prop.cell_radius_m;
        let d0 = prop.ref_dist_m;
        // Tiny slack so grid points computed at exactly the radius survive
        // floating-point rounding.
        let eps = 1e-9 * r;
        for (label, p) in std::iter::once(("user", &self.user_pos))
            .chain(self.relay_positions.iter().map(|p| ("relay", p)))
        {
            let rad = p.radius();
            if rad > r + eps {
                return Err(NetModelError::InvalidDeployment(format!(
                    "{label} at ({}, {}) lies outside the cell radius {r}",
                    p.x, p.y
                )));
            }
            if rad < d0 - eps {
                return Err(NetModelError::InvalidDeployment(format!(
                    "{label} at ({}, {}) is closer than d0 = {d0} to the base station",
                    p.x, p.y
                )));
            }
        }
        Ok(())
    }
}

/// Linear relay grid: positions d0, d0+s, d0+2s, ... up to the cell radius.
pub fn linear_relay_grid(spacing: f64, prop: &PropagationParams) -> Vec<f64> {
    let mut xs = Vec::new();
    let mut x = prop.ref_dist_m;
    while x <= prop.cell_radius_m {
        xs.push(x);
        x += spacing;
    }
    xs
}

/// Square relay lattice with the given spacing, clipped to the cell disc and
/// excluding points closer than d0 to the base station. The lattice is
/// offset by half a spacing in both axes so the cell centre is covered
/// instead of colliding with the base-station exclusion zone.
pub fn planar_relay_grid(spacing: f64, prop: &PropagationParams) -> Vec<Point> {
    let r = prop.cell_radius_m;
    let d0 = prop.ref_dist_m;
    let half = (r / spacing).ceil() as i64 + 1;
    let mut pts = Vec::new();
    for i in -half..=half {
        for j in -half..=half {
            let p = Point::new(
                (i as f64 + 0.5) * spacing,
                (j as f64 + 0.5) * spacing,
            );
            let rad = p.radius();
            if rad <= r && rad >= d0 {
                pts.push(p);
            }
        }
    }
    pts
}

/// One directed link: distance, fading power gain, received power and SNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    /// Link distance (m).
    pub distance: f64,
    /// Fading power gain |h|^2 (unit mean).
    pub fading_gain: f64,
    /// Received power (W).
    pub rx_power: f64,
    /// Linear SNR = rx_power / noise power.
    pub snr: f64,
}

/// Received power at the reference distance scale: the free-space factor
/// `(c / 4 pi f_c)^2 * d0^(n-2)` applied to the transmit power.
///
/// The returned value, multiplied by `|h|^2 d^-n`, gives the received power
/// at distance `d`.
pub fn free_space_factor(p_tx_dbm: f64, prop: &PropagationParams) -> f64 {
    let lambda_term = SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI * prop.carrier_freq_hz);
    lambda_term * lambda_term
        * prop.ref_dist_m.powf(prop.path_loss_exp - 2.0)
        * dbm_to_watts(p_tx_dbm)
}

/// Received power `pbar * |h|^2 * d^-n` in watts.
///
/// Distances below the reference distance are a hard error: the free-space
/// factor is only valid beyond it.
pub fn received_power(
    pbar: f64,
    fading_gain: f64,
    distance: f64,
    prop: &PropagationParams,
) -> Result<f64, NetModelError> {
    if distance < prop.ref_dist_m {
        return Err(NetModelError::DistanceBelowReference {
            distance,
            ref_dist: prop.ref_dist_m,
        });
    }
    Ok(pbar * fading_gain * distance.powf(-prop.path_loss_exp))
}

/// Rayleigh fading power gain: exponential with unit mean.
pub fn sample_fading<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Exp1)
}

/// Node roles used to look up positions and transmit powers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRole {
    BaseStation,
    /// Relay by index into the deployment's candidate list.
    Relay(usize),
    User,
}

fn node_position(role: NodeRole, dep: &Deployment) -> Point {
    match role {
        NodeRole::BaseStation => Point::new(0.0, 0.0),
        NodeRole::Relay(i) => dep.relay_positions[i],
        NodeRole::User => dep.user_pos,
    }
}

fn node_tx_dbm(role: NodeRole, pow: &PowerProfile) -> f64 {
    match role {
        NodeRole::BaseStation => pow.p_a_dbm,
        NodeRole::Relay(_) => pow.p_r_dbm,
        NodeRole::User => pow.p_b_dbm,
    }
}

/// Full link budget for a directed link with the given fading gain.
pub fn link_budget(
    from: NodeRole,
    to: NodeRole,
    dep: &Deployment,
    pow: &PowerProfile,
    prop: &PropagationParams,
    fading_gain: f64,
) -> Result<LinkBudget, NetModelError> {
    let noise = pow.noise_dbm;
    if !noise.is_finite() {
        return Err(NetModelError::NonFinitePower(noise));
    }
    let d = node_position(from, dep).distance_to(node_position(to, dep));
    let pbar = free_space_factor(node_tx_dbm(from, pow), prop);
    let rx = received_power(pbar, fading_gain, d, prop)?;
    Ok(LinkBudget {
        distance: d,
        fading_gain,
        rx_power: rx,
        snr: rx / pow.noise_watts(),
    })
}

/// Estimate the user distance from the base-station-to-user SNR by inverting
/// the path-loss law with fading treated as unit gain. The estimate is
/// clamped into `[d0, r]`.
pub fn estimate_user_distance(snr_ab: f64, pow: &PowerProfile, prop: &PropagationParams) -> f64 {
    assert!(snr_ab > 0.0, "SNR must be positive to invert the path loss");
    let pbar_a = free_space_factor(pow.p_a_dbm, prop);
    let est = (pbar_a / (snr_ab * pow.noise_watts())).powf(1.0 / prop.path_loss_exp);
    est.clamp(prop.ref_dist_m, prop.cell_radius_m)
}

/// Free-space factors and noise shared by rate computations; caching them
/// avoids re-deriving powers for every relay in a scan.
#[derive(Debug, Clone, Copy)]
pub struct LinkParams {
    pub pbar_a: f64,
    pub pbar_r: f64,
    pub pbar_b: f64,
    pub noise_w: f64,
    pub path_loss_exp: f64,
    pub ref_dist_m: f64,
}

impl LinkParams {
    pub fn new(pow: &PowerProfile, prop: &PropagationParams) -> Self {
        Self {
            pbar_a: free_space_factor(pow.p_a_dbm, prop),
            pbar_r: free_space_factor(pow.p_r_dbm, prop),
            pbar_b: free_space_factor(pow.p_b_dbm, prop),
            noise_w: pow.noise_watts(),
            path_loss_exp: prop.path_loss_exp,
            ref_dist_m: prop.ref_dist_m,
        }
    }

    /// Linear SNR of a link with the given free-space factor, fading gain and
    /// distance. No reference-distance check; callers filter geometry first.
    pub fn snr(&self, pbar: f64, fading_gain: f64, distance: f64) -> f64 {
        pbar * fading_gain * distance.powf(-self.path_loss_exp) / self.noise_w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn table_prop() -> PropagationParams {
        PropagationParams::default()
    }

    #[test]
    fn dbm_watts_round_trip() {
        assert!((dbm_to_watts(30.0) - 1.0).abs() < 1e-12);
        assert!((dbm_to_watts(0.0) - 1e-3).abs() < 1e-15);
        assert!((watts_to_dbm(dbm_to_watts(-121.45)) + 121.45).abs() < 1e-9);
    }

    #[test]
    fn free_space_factor_default_profile() {
        // 46 dBm at 1.9 GHz with d0 = 10 m, n = 3.7:
        // (c/4pi f_c)^2 = (0.0125565)^2, 10^1.7 = 50.119, P = 39.811 W.
        let pbar = free_space_factor(46.0, &table_prop());
        assert!((pbar - 0.3146).abs() < 5e-4, "pbar = {pbar}");
    }

    #[test]
    fn free_space_factor_exponent_two() {
        let prop = PropagationParams {
            path_loss_exp: 2.0 + 1e-15,
            ..table_prop()
        };
        let lambda_term = SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI * prop.carrier_freq_hz);
        let expected = lambda_term * lambda_term * 1e-3;
        let got = free_space_factor(0.0, &prop);
        assert!((got - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn free_space_factor_linear_in_tx_power() {
        let prop = table_prop();
        let p1 = free_space_factor(20.0, &prop);
        // +3.0103 dB is exactly a factor of two in watts.
        let p2 = free_space_factor(20.0 + 10.0 * 2f64.log10(), &prop);
        assert!((p2 / p1 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn received_power_at_500_m() {
        let prop = table_prop();
        let rx = received_power(0.3146, 1.0, 500.0, &prop).unwrap();
        // 500^3.7 = 9.7056e9, independently evaluated.
        let expected = 0.3146 / 500f64.powf(3.7);
        assert!((rx - expected).abs() < 1e-20);
        assert!((rx - 3.24e-11).abs() < 2e-13, "rx = {rx}");
    }

    #[test]
    fn received_power_deep_fade_is_zero() {
        let rx = received_power(0.3146, 0.0, 500.0, &table_prop()).unwrap();
        assert_eq!(rx, 0.0);
    }

    #[test]
    fn received_power_below_reference_rejected() {
        let err = received_power(0.3146, 1.0, 1.0, &table_prop()).unwrap_err();
        assert!(matches!(err, NetModelError::DistanceBelowReference { .. }));
    }

    #[test]
    fn fading_unit_mean_and_median() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut below_ln2 = 0usize;
        for _ in 0..n {
            let g = sample_fading(&mut rng);
            assert!(g >= 0.0);
            sum += g;
            if g <= std::f64::consts::LN_2 {
                below_ln2 += 1;
            }
        }
        let mean = sum / n as f64;
        assert!((mean - 1.0).abs() < 0.01, "mean = {mean}");
        let p_median = below_ln2 as f64 / n as f64;
        assert!((p_median - 0.5).abs() < 0.01, "P = {p_median}");
    }

    #[test]
    fn link_budget_reciprocal_deterministic_part() {
        let prop = table_prop();
        let pow = PowerProfile {
            p_a_dbm: 30.0,
            p_r_dbm: 30.0,
            p_b_dbm: 30.0,
            noise_dbm: -121.45,
        };
        let dep = Deployment::linear(800.0, &[400.0], 10.0, &prop).unwrap();
        let ar = link_budget(
            NodeRole::BaseStation,
            NodeRole::Relay(0),
            &dep,
            &pow,
            &prop,
            1.0,
        )
        .unwrap();
        let ra = link_budget(
            NodeRole::Relay(0),
            NodeRole::BaseStation,
            &dep,
            &pow,
            &prop,
            1.0,
        )
        .unwrap();
        assert_eq!(ar, ra);
    }

    #[test]
    fn link_budget_table_profile_snr() {
        // Base station to a relay 500 m out, unit fading, default noise.
        // rx = 3.244e-11 W over 7.16e-16 W of noise: 4.53e4 linear (46.6 dB).
        let prop = table_prop();
        let pow = PowerProfile::default();
        let dep = Deployment::linear(800.0, &[500.0], 10.0, &prop).unwrap();
        let lb = link_budget(
            NodeRole::BaseStation,
            NodeRole::Relay(0),
            &dep,
            &pow,
            &prop,
            1.0,
        )
        .unwrap();
        assert!((lb.snr / 4.53e4 - 1.0).abs() < 5e-3, "snr = {}", lb.snr);
    }

    #[test]
    fn link_budget_rejects_non_finite_noise() {
        let prop = table_prop();
        let pow = PowerProfile {
            noise_dbm: f64::NEG_INFINITY,
            ..PowerProfile::default()
        };
        let dep = Deployment::linear(800.0, &[500.0], 10.0, &prop).unwrap();
        let err = link_budget(
            NodeRole::BaseStation,
            NodeRole::Relay(0),
            &dep,
            &pow,
            &prop,
            1.0,
        )
        .unwrap_err();
        assert!(matches!(err, NetModelError::NonFinitePower(_)));
    }

    #[test]
    fn distance_estimate_round_trip() {
        let prop = table_prop();
        let pow = PowerProfile::default();
        let dep = Deployment::linear(800.0, &[500.0], 10.0, &prop).unwrap();
        let lb = link_budget(NodeRole::BaseStation, NodeRole::User, &dep, &pow, &prop, 1.0)
            .unwrap();
        let est = estimate_user_distance(lb.snr, &pow, &prop);
        assert!((est - 800.0).abs() < 800.0 * 1e-9, "est = {est}");
    }

    #[test]
    fn distance_estimate_folds_fading_into_distance() {
        let prop = table_prop();
        let pow = PowerProfile::default();
        let dep = Deployment::linear(800.0, &[500.0], 10.0, &prop).unwrap();
        let lb = link_budget(NodeRole::BaseStation, NodeRole::User, &dep, &pow, &prop, 2.0)
            .unwrap();
        let est = estimate_user_distance(lb.snr, &pow, &prop);
        let expected = 800.0 * 2f64.powf(-1.0 / 3.7);
        assert!((est - expected).abs() < 1e-6, "est = {est}");
        assert!((est - 663.3).abs() < 0.5);
    }

    #[test]
    fn distance_estimate_clamps() {
        let prop = table_prop();
        let pow = PowerProfile::default();
        assert_eq!(estimate_user_distance(1e30, &pow, &prop), prop.ref_dist_m);
        assert_eq!(estimate_user_distance(1e-30, &pow, &prop), prop.cell_radius_m);
    }

    #[test]
    fn monotonic_in_distance_and_power() {
        let prop = table_prop();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let d1 = rng.random_range(10.0..990.0);
            let d2 = d1 + rng.random_range(0.1..10.0);
            let p = rng.random_range(0.0..46.0);
            let pbar = free_space_factor(p, &prop);
            let r1 = received_power(pbar, 1.0, d1, &prop).unwrap();
            let r2 = received_power(pbar, 1.0, d2, &prop).unwrap();
            assert!(r2 < r1);
            let pbar_hi = free_space_factor(p + 1.0, &prop);
            let r3 = received_power(pbar_hi, 1.0, d1, &prop).unwrap();
            assert!(r3 > r1);
        }
    }

    #[test]
    fn free_space_preserves_power_ordering() {
        let prop = table_prop();
        let pow = PowerProfile::default();
        let pa = free_space_factor(pow.p_a_dbm, &prop);
        let pr = free_space_factor(pow.p_r_dbm, &prop);
        let pb = free_space_factor(pow.p_b_dbm, &prop);
        assert!(pa > pr && pr > pb);
    }

    #[test]
    fn power_profile_ordering_enforced() {
        let bad = PowerProfile {
            p_a_dbm: 20.0,
            p_r_dbm: 30.0,
            p_b_dbm: 23.0,
            noise_dbm: -121.45,
        };
        assert!(bad.validate(false).is_err());
        assert!(bad.validate(true).is_ok());
    }

    #[test]
    fn planar_grid_respects_bounds() {
        let prop = table_prop();
        let grid = planar_relay_grid(100.0, &prop);
        assert!(!grid.is_empty());
        for p in &grid {
            assert!(p.radius() <= prop.cell_radius_m + 1e-9);
            assert!(p.radius() >= prop.ref_dist_m - 1e-9);
        }
        // 100 m spacing fills the 1 km disc with roughly pi * 100 points.
        assert!(grid.len() > 300 && grid.len() < 320, "len = {}", grid.len());
    }
}
