//! Per-relay achievable-rate map for a single user, with the selector's pick.

use super::report::{write_csv, write_json};
use super::trial::TrialContext;
use super::ExperimentConfig;
use crate::netmodel::{planar_relay_grid, Point, PowerProfile, PropagationParams};
use crate::relaysel::{SelectionResult, TracePoint};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateMapEntry {
    pub index: usize,
    pub pos: Point,
    /// Lattice PNC-B rate through this relay (fading-free).
    pub rate: f64,
    /// True when the gradient-ascent selector picked this relay.
    pub selected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateMapReport {
    pub seed: u64,
    pub user_pos: Point,
    pub separation: f64,
    pub entries: Vec<RateMapEntry>,
    pub selection: SelectionResult,
    pub trace: Vec<TracePoint>,
}

/// Evaluate every candidate relay for one user position (unit fading) and
/// mark the relay the planar gradient-ascent selection chooses.
pub fn run_rate_map(
    user_pos: Point,
    separation: f64,
    cfg: &ExperimentConfig,
    pow: &PowerProfile,
    prop: &PropagationParams,
    keep_trace: bool,
) -> RateMapReport {
    let relays = planar_relay_grid(separation, prop);
    let mut ctx = TrialContext::new(relays, separation, pow, prop, cfg);
    ctx.ascent.keep_trace = keep_trace;
    let (selection, _) = ctx.select_pncb(user_pos, user_pos, 1.0, 1.0);
    let entries = ctx
        .deployment
        .relay_positions
        .iter()
        .enumerate()
        .map(|(i, &pos)| RateMapEntry {
            index: i,
            pos,
            rate: ctx.pncb_rate_at(i, user_pos, 1.0, 1.0),
            selected: i == selection.chosen_index,
        })
        .collect();
    let trace = selection.trace.clone();
    RateMapReport {
        seed: cfg.seed,
        user_pos,
        separation,
        entries,
        selection,
        trace,
    }
}

impl RateMapReport {
    pub fn emit(&self, out_dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        let csv_path = out_dir.join(format!("rate_map_{}_{}.csv", self.separation, self.seed));
        let rows = self.entries.iter().map(|e| {
            format!("{},{},{},{},{}", e.index, e.pos.x, e.pos.y, e.rate, e.selected)
        });
        write_csv(&csv_path, "relay_index,x_m,y_m,pncb_rate,selected", rows)?;
        let json_path = out_dir.join(format!("rate_map_{}_{}.json", self.separation, self.seed));
        write_json(&json_path, &serde_json::json!({
            "schema": crate::SCHEMA_VERSION,
            "seed": self.seed,
            "user_pos": self.user_pos,
            "separation": self.separation,
            "selection": self.selection,
            "trace": self.trace,
        }))?;
        Ok(vec![csv_path, json_path])
    }
}
