//! Selection-cooperation baseline with equal time slots.

use super::{SelError, SelectionResult, SelectionStrategy, StopReason};
use crate::netmodel::Deployment;
use crate::rates;
use serde::{Deserialize, Serialize};

/// Directed-link SNRs of one candidate relay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelayLinkSnrs {
    pub snr_ar0: f64,
    pub snr_br0: f64,
    pub snr_r0a: f64,
    pub snr_r0b: f64,
}

impl RelayLinkSnrs {
    fn ma_lattice(&self) -> f64 {
        rates::rate_ma_lattice(self.snr_ar0, self.snr_br0).unwrap_or(0.0)
    }

    fn bc_min(&self) -> f64 {
        rates::rate_bc(self.snr_r0a, self.snr_r0b)
    }
}

/// Two-step selection: keep the relays whose equal-slot multiple-access rate
/// clears `target_rate`, then among the survivors pick the one maximising the
/// minimum broadcast-link rate. If every relay is in outage, fall back to the
/// relay with the best MA rate and flag the result.
///
/// The reported rate is the equal-slot overall rate through the chosen relay.
pub fn select_relay_scpnc(
    dep: &Deployment,
    snrs: &[RelayLinkSnrs],
    target_rate: f64,
) -> Result<SelectionResult, SelError> {
    if dep.relay_positions.is_empty() || snrs.is_empty() {
        return Err(SelError::NoRelays);
    }
    assert_eq!(
        dep.relay_positions.len(),
        snrs.len(),
        "one SNR set per candidate relay"
    );

    let mut best_survivor: Option<(usize, f64)> = None;
    let mut best_ma: Option<(usize, f64)> = None;
    for (i, s) in snrs.iter().enumerate() {
        let ma = s.ma_lattice();
        if best_ma.map_or(true, |(_, m)| ma > m) {
            best_ma = Some((i, ma));
        }
        if 0.5 * ma >= target_rate {
            let bc = s.bc_min();
            if best_survivor.map_or(true, |(_, b)| bc > b) {
                best_survivor = Some((i, bc));
            }
        }
    }

    let (idx, outage) = match best_survivor {
        Some((i, _)) => (i, false),
        None => (best_ma.unwrap().0, true),
    };
    let achieved = rates::rate_pnc_equal(snrs[idx].ma_lattice(), snrs[idx].bc_min());
    Ok(SelectionResult {
        chosen_index: idx,
        chosen_pos: dep.relay_positions[idx],
        x_star: dep.relay_positions[idx],
        iterations: 0,
        trace: Vec::new(),
        achieved_rate: achieved,
        strategy: SelectionStrategy::ScPnc,
        outage,
        stop: StopReason::NotIterative,
    })
}
