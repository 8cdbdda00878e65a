//! Census of the received multiple-access SNRs at the selected relay.

use super::report::{write_csv, write_json};
use super::trial::{derive_rng, sample_gains, sample_user_position, TrialContext};
use super::ExperimentConfig;
use crate::netmodel::{planar_relay_grid, PowerProfile, PropagationParams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Empirical CDF over a sample set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut samples: Vec<f64>) -> Self {
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Self { sorted: samples }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// P(X <= x).
    pub fn prob_le(&self, x: f64) -> f64 {
        let k = self.sorted.partition_point(|&v| v <= x);
        k as f64 / self.sorted.len() as f64
    }

    /// Number of distinct sample values (= number of CDF steps).
    pub fn distinct_values(&self) -> usize {
        let mut count = 0;
        let mut last = f64::NAN;
        for &v in &self.sorted {
            if v != last {
                count += 1;
                last = v;
            }
        }
        count
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }
}

/// The low/medium/high band probabilities for the two MA-phase links
/// (breakpoints 7.5, 10 and 30 dB).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrBandProbabilities {
    pub p_ar0_low: f64,
    pub p_br0_low: f64,
    pub p_ar0_medium: f64,
    pub p_br0_medium: f64,
    pub p_ar0_high: f64,
    pub p_br0_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrCdfSeparation {
    pub separation: f64,
    pub n_relays: usize,
    pub n_samples: usize,
    pub bands: SnrBandProbabilities,
    #[serde(skip)]
    pub cdf_ar0_db: EmpiricalCdf,
    #[serde(skip)]
    pub cdf_br0_db: EmpiricalCdf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrCdfReport {
    pub seed: u64,
    pub per_separation: Vec<SnrCdfSeparation>,
}

const STREAM_SNRCDF: u64 = 0x736e_7263;

/// For every configured separation, select the PNC-B relay for each
/// (user, realization) and record the two multiple-access SNRs there.
pub fn run_snr_cdf(
    cfg: &ExperimentConfig,
    pow: &PowerProfile,
    prop: &PropagationParams,
) -> SnrCdfReport {
    let mut per_separation = Vec::new();
    for &separation in &cfg.relay_separations {
        let relays = planar_relay_grid(separation, prop);
        let ctx = TrialContext::new(relays, separation, pow, prop, cfg);
        let n_relays = ctx.deployment.relay_positions.len();

        let per_real: Vec<Vec<(f64, f64)>> = (0..cfg.n_realizations)
            .into_par_iter()
            .map(|r| {
                let mut rng = derive_rng(cfg.seed, STREAM_SNRCDF, r as u64);
                let mut out = Vec::with_capacity(cfg.n_users);
                for _ in 0..cfg.n_users {
                    let user = sample_user_position(&mut rng, &ctx.prop);
                    let (g_a, g_b) = sample_gains(&mut rng, cfg.fading);
                    let user_hat = ctx.estimated_user_pos(user, &mut rng, cfg.fading);
                    let (sel, _) = ctx.select_pncb(user, user_hat, g_a, g_b);
                    let s = ctx.candidate_snrs(sel.chosen_index, user, g_a, g_b);
                    out.push((
                        10.0 * s.snr_ar0.log10(),
                        10.0 * s.snr_br0.log10(),
                    ));
                }
                out
            })
            .collect();
        let samples: Vec<(f64, f64)> = per_real.into_iter().flatten().collect();

        let ar0: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let br0: Vec<f64> = samples.iter().map(|s| s.1).collect();
        let cdf_ar0 = EmpiricalCdf::new(ar0);
        let cdf_br0 = EmpiricalCdf::new(br0);
        let bands = SnrBandProbabilities {
            p_ar0_low: cdf_ar0.prob_le(7.5),
            p_br0_low: cdf_br0.prob_le(7.5),
            p_ar0_medium: cdf_ar0.prob_le(10.0) - cdf_ar0.prob_le(7.5),
            p_br0_medium: cdf_br0.prob_le(10.0) - cdf_br0.prob_le(7.5),
            p_ar0_high: cdf_ar0.prob_le(30.0) - cdf_ar0.prob_le(10.0),
            p_br0_high: cdf_br0.prob_le(30.0) - cdf_br0.prob_le(10.0),
        };
        per_separation.push(SnrCdfSeparation {
            separation,
            n_relays,
            n_samples: cdf_ar0.len(),
            bands,
            cdf_ar0_db: cdf_ar0,
            cdf_br0_db: cdf_br0,
        });
    }
    SnrCdfReport { seed: cfg.seed, per_separation }
}

impl SnrCdfReport {
    pub fn emit(&self, out_dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        let mut paths = Vec::new();
        for sep in &self.per_separation {
            let tag = format!("{}", sep.separation);
            let csv_path = out_dir.join(format!("snr_cdf_{}_{}.csv", tag, self.seed));
            let rows = sep
                .cdf_ar0_db
                .samples()
                .iter()
                .zip(sep.cdf_br0_db.samples())
                .enumerate()
                .map(|(i, (a, b))| {
                    let p = (i + 1) as f64 / sep.n_samples as f64;
                    format!("{a},{b},{p}")
                });
            write_csv(
                &csv_path,
                "gamma_ar0_db_sorted,gamma_br0_db_sorted,cumulative_probability",
                rows,
            )?;
            paths.push(csv_path);

            let json_path = out_dir.join(format!("snr_cdf_{}_{}.json", tag, self.seed));
            write_json(&json_path, &serde_json::json!({
                "schema": crate::SCHEMA_VERSION,
                "seed": self.seed,
                "summary": sep,
            }))?;
            paths.push(json_path);
        }
        Ok(paths)
    }
}
