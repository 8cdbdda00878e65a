//! Densification study: aggregate rate against relay density.

use super::report::{write_csv, write_json};
use super::trial::{
    derive_rng, sample_gains, sample_user_position, spacing_for_density_factor, TrialContext,
};
use super::ExperimentConfig;
use crate::netmodel::{planar_relay_grid, PowerProfile, PropagationParams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Aggregate-rate outcome at one density factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensifyPoint {
    pub factor: f64,
    pub spacing: f64,
    pub n_relays: usize,
    /// Mean over realizations of the 100-user aggregate rate.
    pub aggregate_pncb: f64,
    pub aggregate_scpnc: f64,
    /// Aggregate rate gain relative to the factor-1 point, per strategy.
    pub gain_pncb: f64,
    pub gain_scpnc: f64,
    /// Densification gain: rate gain divided by the density factor.
    pub rho_pncb: f64,
    pub rho_scpnc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensificationReport {
    pub seed: u64,
    pub reference_density_per_km2: f64,
    pub points: Vec<DensifyPoint>,
    /// Per (factor index, realization) aggregates, for the raw CSVs.
    #[serde(skip)]
    pub raw: Vec<Vec<(f64, f64)>>,
}

const STREAM_DENSIFY: u64 = 0x6465_6e73;

/// Run the comparison at several relay densities. Users and fading draws are
/// shared across factors (common random numbers), so the gain curves are not
/// blurred by sampling noise between densities.
pub fn run_densification(
    cfg: &ExperimentConfig,
    pow: &PowerProfile,
    prop: &PropagationParams,
) -> DensificationReport {
    let mut points = Vec::new();
    let mut raw = Vec::new();

    for &factor in &cfg.density_factors {
        let spacing = spacing_for_density_factor(factor, cfg.reference_density_per_km2, prop);
        let relays = planar_relay_grid(spacing, prop);
        let ctx = TrialContext::new(relays, spacing, pow, prop, cfg);
        let n_relays = ctx.deployment.relay_positions.len();

        let per_real: Vec<(f64, f64)> = (0..cfg.n_realizations)
            .into_par_iter()
            .map(|r| {
                // Seeds do not involve the factor: same users and fades at
                // every density.
                let mut rng = derive_rng(cfg.seed, STREAM_DENSIFY, r as u64);
                let mut scratch = Vec::new();
                let mut agg_pncb = 0.0;
                let mut agg_scpnc = 0.0;
                for _ in 0..cfg.n_users {
                    let user = sample_user_position(&mut rng, &ctx.prop);
                    let (g_a, g_b) = sample_gains(&mut rng, cfg.fading);
                    let user_hat = ctx.estimated_user_pos(user, &mut rng, cfg.fading);
                    let (_, pncb_rate) = ctx.select_pncb(user, user_hat, g_a, g_b);
                    let (_, scpnc_rate) = ctx.select_scpnc(user, g_a, g_b, &mut scratch);
                    agg_pncb += pncb_rate;
                    agg_scpnc += scpnc_rate;
                }
                (agg_pncb, agg_scpnc)
            })
            .collect();

        let n = cfg.n_realizations as f64;
        let aggregate_pncb = per_real.iter().map(|p| p.0).sum::<f64>() / n;
        let aggregate_scpnc = per_real.iter().map(|p| p.1).sum::<f64>() / n;
        points.push(DensifyPoint {
            factor,
            spacing,
            n_relays,
            aggregate_pncb,
            aggregate_scpnc,
            gain_pncb: 0.0,
            gain_scpnc: 0.0,
            rho_pncb: 0.0,
            rho_scpnc: 0.0,
        });
        raw.push(per_real);
    }

    // Normalise gains to the first configured factor (the reference).
    let base_pncb = points[0].aggregate_pncb;
    let base_scpnc = points[0].aggregate_scpnc;
    for p in &mut points {
        p.gain_pncb = p.aggregate_pncb / base_pncb;
        p.gain_scpnc = p.aggregate_scpnc / base_scpnc;
        p.rho_pncb = p.gain_pncb / p.factor;
        p.rho_scpnc = p.gain_scpnc / p.factor;
    }

    DensificationReport {
        seed: cfg.seed,
        reference_density_per_km2: cfg.reference_density_per_km2,
        points,
        raw,
    }
}

impl DensificationReport {
    pub fn emit(&self, out_dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        let mut paths = Vec::new();
        for (point, per_real) in self.points.iter().zip(&self.raw) {
            let csv_path =
                out_dir.join(format!("densify_{}_{}.csv", point.factor, self.seed));
            let rows = per_real.iter().enumerate().map(|(r, (p, s))| {
                format!("{},{},{},{}", point.factor, r, p, s)
            });
            write_csv(
                &csv_path,
                "density_factor,realization,aggregate_pncb,aggregate_scpnc",
                rows,
            )?;
            paths.push(csv_path);
        }
        let json_path = out_dir.join(format!("densify_summary_{}.json", self.seed));
        write_json(&json_path, &serde_json::json!({
            "schema": crate::SCHEMA_VERSION,
            "seed": self.seed,
            "reference_density_per_km2": self.reference_density_per_km2,
            "points": self.points,
        }))?;
        paths.push(json_path);
        Ok(paths)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_is_gain_over_factor_and_reference_normalises() {
        let cfg = ExperimentConfig {
            n_realizations: 4,
            n_users: 5,
            density_factors: vec![1.0, 4.0],
            seed: 3,
            ..ExperimentConfig::default()
        };
        let rep = run_densification(&cfg, &PowerProfile::default(), &PropagationParams::default());
        assert_eq!(rep.points[0].gain_pncb, 1.0);
        assert_eq!(rep.points[0].rho_pncb, 1.0);
        for p in &rep.points {
            assert_eq!(p.rho_pncb, p.gain_pncb / p.factor);
            assert_eq!(p.rho_scpnc, p.gain_scpnc / p.factor);
        }
    }
}
