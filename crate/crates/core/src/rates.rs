//! Information-theoretic rates for the two-phase relaying schemes.
//!
//! The multiple-access (MA) phase is the slot where base station and user
//! transmit together to the relay; the broadcast (BC) phase is the slot where
//! the relay broadcasts the network-coded message. Equal-slot PNC halves the
//! bottleneck rate; PNC-B splits the frame inversely proportional to the two
//! phase rates, which yields their harmonic composition.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RateError {
    #[error("lattice MA rate undefined when both links carry zero SNR")]
    BothLinksSilent,
}

/// Which composition produced an overall rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    /// Equal time slots, lattice MA rate.
    PncEqual,
    /// Rate-balanced slots, lattice MA rate.
    PncB,
    /// Rate-balanced slots on the MA upper bound (selection objective).
    UpperBound,
}

/// All component rates and time fractions for one (user, relay) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBreakdown {
    /// Base-station-to-relay spectral efficiency (bps/Hz).
    pub r_ar0: f64,
    /// User-to-relay spectral efficiency.
    pub r_br0: f64,
    /// Relay-to-base-station spectral efficiency.
    pub r_r0a: f64,
    /// Relay-to-user spectral efficiency.
    pub r_r0b: f64,
    /// MA-phase upper bound.
    pub r_ma: f64,
    /// MA-phase lattice-code rate.
    pub r_ma_lc: f64,
    /// BC-phase rate.
    pub r_bc: f64,
    /// Fraction of time given to the MA phase.
    pub rho_ma: f64,
    /// Fraction of time given to the BC phase.
    pub rho_bc: f64,
    /// End-to-end rate under `strategy`.
    pub r_overall: f64,
    pub strategy: Strategy,
}

fn log2_1p(snr: f64) -> f64 {
    (1.0 + snr).log2()
}

/// MA-phase upper bound: the weaker single-link capacity.
pub fn rate_ma_upper(snr_ar0: f64, snr_br0: f64) -> f64 {
    log2_1p(snr_ar0).min(log2_1p(snr_br0))
}

/// MA-phase rate achievable with nested lattice codes, within half a bit of
/// the upper bound. The received-power ratio term is expressed through the
/// SNRs (both are received powers normalised by the same noise). The raw
/// formula goes negative at very low SNR; a negative spectral efficiency is
/// meaningless for scheduling, so the result is clamped at zero.
pub fn rate_ma_lattice(snr_ar0: f64, snr_br0: f64) -> Result<f64, RateError> {
    if snr_ar0 == 0.0 && snr_br0 == 0.0 {
        return Err(RateError::BothLinksSilent);
    }
    let total = snr_ar0 + snr_br0;
    let term_a = (snr_ar0 / total + snr_ar0).log2();
    let term_b = (snr_br0 / total + snr_br0).log2();
    Ok(term_a.min(term_b).max(0.0))
}

/// BC-phase rate: the weaker of the two broadcast links.
pub fn rate_bc(snr_r0a: f64, snr_r0b: f64) -> f64 {
    log2_1p(snr_r0a).min(log2_1p(snr_r0b))
}

/// Overall rate with equal time slots.
pub fn rate_pnc_equal(r_ma_lc: f64, r_bc: f64) -> f64 {
    0.5 * r_ma_lc.min(r_bc)
}

/// Overall rate with slots allocated inversely proportional to the phase
/// rates, plus the time fractions `(rho_ma, rho_bc)` that achieve it.
///
/// If either phase rate is zero the overall rate is zero and the split is
/// reported as (0.5, 0.5) by convention.
pub fn rate_pncb(r_ma: f64, r_bc: f64) -> (f64, f64, f64) {
    if r_ma == 0.0 || r_bc == 0.0 {
        return (0.0, 0.5, 0.5);
    }
    let sum = r_ma + r_bc;
    (r_ma * r_bc / sum, r_bc / sum, r_ma / sum)
}

/// Assemble the full breakdown from the four directed-link SNRs.
pub fn breakdown(
    snr_ar0: f64,
    snr_br0: f64,
    snr_r0a: f64,
    snr_r0b: f64,
    strategy: Strategy,
) -> Result<RateBreakdown, RateError> {
    let r_ar0 = log2_1p(snr_ar0);
    let r_br0 = log2_1p(snr_br0);
    let r_ma = r_ar0.min(r_br0);
    let r_ma_lc = rate_ma_lattice(snr_ar0, snr_br0)?;
    let bc = rate_bc(snr_r0a, snr_r0b);
    let (r_overall, rho_ma, rho_bc) = match strategy {
        Strategy::PncEqual => (rate_pnc_equal(r_ma_lc, bc), 0.5, 0.5),
        Strategy::PncB => rate_pncb(r_ma_lc, bc),
        Strategy::UpperBound => rate_pncb(r_ma, bc),
    };
    Ok(RateBreakdown {
        r_ar0,
        r_br0,
        r_r0a: log2_1p(snr_r0a),
        r_r0b: log2_1p(snr_r0b),
        r_ma,
        r_ma_lc,
        r_bc: bc,
        rho_ma,
        rho_bc,
        r_overall,
        strategy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ma_upper_examples() {
        assert!((rate_ma_upper(1.0, 1.0) - 1.0).abs() < 1e-12);
        assert_eq!(rate_ma_upper(0.0, 123.0), 0.0);
        assert!((rate_ma_upper(45.2, 3.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ma_lattice_examples() {
        let r = rate_ma_lattice(1.0, 1.0).unwrap();
        assert!((r - 1.5f64.log2()).abs() < 1e-12);
        // Raw value log2(0.9) = -0.152 clamps to zero.
        assert_eq!(rate_ma_lattice(0.4, 0.4).unwrap(), 0.0);
        assert_eq!(
            rate_ma_lattice(0.0, 0.0).unwrap_err(),
            RateError::BothLinksSilent
        );
    }

    #[test]
    fn ma_lattice_within_half_bit() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let a = rng.random_range(1.0..1e6f64);
            let b = rng.random_range(1.0..1e6f64);
            let upper = rate_ma_upper(a, b);
            let lattice = rate_ma_lattice(a, b).unwrap();
            assert!(lattice <= upper + 1e-12);
            assert!(lattice >= upper - 0.5 - 1e-12);
        }
    }

    #[test]
    fn ma_lattice_symmetric_closed_form() {
        for s in [0.7, 1.0, 3.5, 120.0, 4.5e4] {
            let r = rate_ma_lattice(s, s).unwrap();
            assert!((r - (0.5 + s).log2()).abs() < 1e-12);
        }
    }

    #[test]
    fn bc_examples() {
        assert!((rate_bc(3.0, 3.0) - 2.0).abs() < 1e-12);
        assert!((rate_bc(3.0, 1.0) - 1.0).abs() < 1e-12);
        assert!((rate_bc(45.2, 45.2) - 46.2f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn pnc_equal_examples() {
        assert!((rate_pnc_equal(2.0, 2.0) - 1.0).abs() < 1e-12);
        assert!((rate_pnc_equal(1.0, 3.0) - 0.5).abs() < 1e-12);
        assert_eq!(rate_pnc_equal(0.0, 3.0), 0.0);
    }

    #[test]
    fn pncb_examples() {
        let (r, ma, bc) = rate_pncb(2.0, 2.0);
        assert!((r - 1.0).abs() < 1e-12 && ma == 0.5 && bc == 0.5);
        let (r, ma, bc) = rate_pncb(1.0, 3.0);
        assert!((r - 0.75).abs() < 1e-12);
        assert!((ma - 0.75).abs() < 1e-12 && (bc - 0.25).abs() < 1e-12);
        assert_eq!(rate_pncb(0.0, 3.0), (0.0, 0.5, 0.5));
        assert_eq!(rate_pncb(0.0, 0.0), (0.0, 0.5, 0.5));
    }

    #[test]
    fn pncb_degenerates_to_equal_slots_when_balanced() {
        for r in [0.0, 0.3, 1.0, 7.25] {
            let (pncb, _, _) = rate_pncb(r, r);
            assert!((pncb - rate_pnc_equal(r, r)).abs() < 1e-12);
            assert!((pncb - r / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pncb_never_below_equal_slots() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let ma = rng.random_range(0.0..8.0f64);
            let bc = rng.random_range(0.0..8.0f64);
            let (pncb, _, _) = rate_pncb(ma, bc);
            assert!(pncb + 1e-12 >= rate_pnc_equal(ma, bc));
        }
    }

    #[test]
    fn pncb_split_bottlenecks_both_phases() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let ma = rng.random_range(0.01..8.0f64);
            let bc = rng.random_range(0.01..8.0f64);
            let (overall, rho_ma, rho_bc) = rate_pncb(ma, bc);
            assert!((rho_ma + rho_bc - 1.0).abs() < 1e-12);
            assert!(rho_ma > 0.0 && rho_ma < 1.0);
            assert!((rho_ma * ma - overall).abs() < 1e-12);
            assert!((rho_bc * bc - overall).abs() < 1e-12);
        }
    }

    #[test]
    fn rates_monotone_in_snr() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..1000 {
            let a = rng.random_range(0.5..1e4f64);
            let b = rng.random_range(0.5..1e4f64);
            let bump = rng.random_range(1e-3..10.0);
            assert!(rate_ma_upper(a + bump, b) >= rate_ma_upper(a, b));
            assert!(rate_ma_upper(a, b + bump) >= rate_ma_upper(a, b));
            assert!(rate_bc(a + bump, b) >= rate_bc(a, b));
            let base = rate_ma_lattice(a, b).unwrap();
            // Bumping the weaker link never lowers the lattice rate.
            if a <= b {
                assert!(rate_ma_lattice(a + bump, b).unwrap() + 1e-12 >= base);
            } else {
                assert!(rate_ma_lattice(a, b + bump).unwrap() + 1e-12 >= base);
            }
        }
    }

    #[test]
    fn breakdown_is_consistent() {
        let bd = breakdown(45.2, 3.0, 12.0, 9.0, Strategy::PncB).unwrap();
        assert!(bd.r_ma <= bd.r_ar0.min(bd.r_br0) + 1e-12);
        assert!((bd.r_bc - bd.r_r0a.min(bd.r_r0b)).abs() < 1e-12);
        assert!(bd.r_ma_lc <= bd.r_ma + 1e-12);
        assert!(bd.r_overall <= bd.r_ma_lc.min(bd.r_bc) + 1e-12);
        assert!((bd.rho_ma + bd.rho_bc - 1.0).abs() < 1e-12);
    }
}
