//! Rate comparison of the two selection strategies across user positions.

use super::report::{write_csv, write_json};
use super::trial::{derive_rng, sample_gains, sample_user_position, TrialContext};
use super::{ExperimentConfig, FadingMode};
use crate::netmodel::{planar_relay_grid, Point, PowerProfile, PropagationParams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// One (separation, realization, user) trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRecord {
    pub separation: f64,
    pub realization: usize,
    pub user: usize,
    pub user_distance: f64,
    pub pncb_rate: f64,
    pub scpnc_rate: f64,
    pub scpnc_outage: bool,
    pub pncb_relay: Point,
    pub scpnc_relay: Point,
    pub pncb_iterations: usize,
    pub pncb_x_star: Point,
}

/// Mean rates within one user-distance bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub mean_pncb: f64,
    pub mean_scpnc: f64,
    /// (mean_pncb - mean_scpnc) / mean_scpnc.
    pub relative_gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareSeparation {
    pub separation: f64,
    pub n_relays: usize,
    pub bins: Vec<CompareBin>,
    /// Average of the per-bin relative gains (populated bins only).
    pub avg_relative_gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub seed: u64,
    pub fading: FadingMode,
    pub per_separation: Vec<CompareSeparation>,
    #[serde(skip)]
    pub records: Vec<CompareRecord>,
}

/// RNG stream ids per driver keep trial draws independent across drivers.
const STREAM_COMPARE: u64 = 0x636f_6d70;

/// Sweep users over the cell for every configured separation and average the
/// reported rates of both strategies per user-distance bin.
pub fn run_rate_comparison(
    cfg: &ExperimentConfig,
    pow: &PowerProfile,
    prop: &PropagationParams,
) -> CompareReport {
    let mut records = Vec::new();
    let mut per_separation = Vec::new();

    for &separation in &cfg.relay_separations {
        let relays = planar_relay_grid(separation, prop);
        let ctx = TrialContext::new(relays, separation, pow, prop, cfg);
        let n_relays = ctx.deployment.relay_positions.len();

        let mut sep_records: Vec<Vec<CompareRecord>> = (0..cfg.n_realizations)
            .into_par_iter()
            .map(|r| {
                let mut rng = derive_rng(cfg.seed, STREAM_COMPARE, r as u64);
                let mut scratch = Vec::new();
                let mut out = Vec::with_capacity(cfg.n_users);
                for u in 0..cfg.n_users {
                    let user = sample_user_position(&mut rng, &ctx.prop);
                    let (g_a, g_b) = sample_gains(&mut rng, cfg.fading);
                    let user_hat = ctx.estimated_user_pos(user, &mut rng, cfg.fading);
                    let (pncb, pncb_rate) = ctx.select_pncb(user, user_hat, g_a, g_b);
                    let (scpnc, scpnc_rate) = ctx.select_scpnc(user, g_a, g_b, &mut scratch);
                    out.push(CompareRecord {
                        separation,
                        realization: r,
                        user: u,
                        user_distance: user.radius(),
                        pncb_rate,
                        scpnc_rate,
                        scpnc_outage: scpnc.outage,
                        pncb_relay: pncb.chosen_pos,
                        scpnc_relay: scpnc.chosen_pos,
                        pncb_iterations: pncb.iterations,
                        pncb_x_star: pncb.x_star,
                    });
                }
                out
            })
            .collect();

        let flat: Vec<CompareRecord> = sep_records.drain(..).flatten().collect();
        per_separation.push(bin_records(&flat, separation, n_relays, cfg, prop));
        records.extend(flat);
    }

    CompareReport {
        seed: cfg.seed,
        fading: cfg.fading,
        per_separation,
        records,
    }
}

fn bin_records(
    records: &[CompareRecord],
    separation: f64,
    n_relays: usize,
    cfg: &ExperimentConfig,
    prop: &PropagationParams,
) -> CompareSeparation {
    let width = cfg.bin_width_m;
    let n_bins = (prop.cell_radius_m / width).ceil() as usize;
    let mut sums = vec![(0usize, 0.0f64, 0.0f64); n_bins];
    for rec in records {
        let b = ((rec.user_distance / width) as usize).min(n_bins - 1);
        sums[b].0 += 1;
        sums[b].1 += rec.pncb_rate;
        sums[b].2 += rec.scpnc_rate;
    }
    let mut bins = Vec::new();
    let mut gain_sum = 0.0;
    let mut gain_count = 0usize;
    for (i, &(count, pncb, scpnc)) in sums.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let mean_pncb = pncb / count as f64;
        let mean_scpnc = scpnc / count as f64;
        let relative_gain = if mean_scpnc > 0.0 {
            mean_pncb / mean_scpnc - 1.0
        } else {
            0.0
        };
        gain_sum += relative_gain;
        gain_count += 1;
        bins.push(CompareBin {
            lo: i as f64 * width,
            hi: (i + 1) as f64 * width,
            count,
            mean_pncb,
            mean_scpnc,
            relative_gain,
        });
    }
    CompareSeparation {
        separation,
        n_relays,
        bins,
        avg_relative_gain: gain_sum / gain_count.max(1) as f64,
    }
}

impl CompareReport {
    /// Write one raw CSV and one JSON summary per separation; returns the
    /// paths written.
    pub fn emit(&self, out_dir: &Path, with_trace_columns: bool) -> std::io::Result<Vec<PathBuf>> {
        let mut paths = Vec::new();
        for sep in &self.per_separation {
            let tag = format!("{}", sep.separation);
            let csv_path = out_dir.join(format!("compare_{}_{}.csv", tag, self.seed));
            let mut header = "separation_m,realization,user,user_distance_m,pncb_rate,scpnc_rate,\
                 scpnc_outage,pncb_relay_x,pncb_relay_y,scpnc_relay_x,scpnc_relay_y"
                .to_string();
            if with_trace_columns {
                header.push_str(",pncb_iterations,pncb_x_star_x,pncb_x_star_y");
            }
            let rows = self
                .records
                .iter()
                .filter(|r| r.separation == sep.separation)
                .map(|r| {
                    let mut row = format!(
                        "{},{},{},{},{},{},{},{},{},{},{}",
                        r.separation,
                        r.realization,
                        r.user,
                        r.user_distance,
                        r.pncb_rate,
                        r.scpnc_rate,
                        r.scpnc_outage,
                        r.pncb_relay.x,
                        r.pncb_relay.y,
                        r.scpnc_relay.x,
                        r.scpnc_relay.y
                    );
                    if with_trace_columns {
                        row.push_str(&format!(
                            ",{},{},{}",
                            r.pncb_iterations, r.pncb_x_star.x, r.pncb_x_star.y
                        ));
                    }
                    row
                });
            write_csv(&csv_path, &header, rows)?;
            paths.push(csv_path);

            let json_path = out_dir.join(format!("compare_{}_{}.json", tag, self.seed));
            write_json(&json_path, &serde_json::json!({
                "schema": crate::SCHEMA_VERSION,
                "seed": self.seed,
                "fading": self.fading,
                "summary": sep,
            }))?;
            paths.push(json_path);
        }
        Ok(paths)
    }
}
