// temporary probe: one-scalar noise calibration against the SNR-census targets
use pncsim_core::experiments::*;
use pncsim_core::netmodel::*;

fn main() {
    for noise in [-95.0, -98.0, -100.0, -102.0, -104.0, -106.0, -108.0] {
        let pow = PowerProfile { noise_dbm: noise, ..PowerProfile::default() };
        let prop = PropagationParams::default();
        let cfg = ExperimentConfig {
            n_realizations: 300,
            n_users: 100,
            relay_separations: vec![100.0, 600.0],
            fading: FadingMode::UserSideOnly,
            seed: 777,
            ..ExperimentConfig::default()
        };
        let rep = run_snr_cdf(&cfg, &pow, &prop);
        let s100 = &rep.per_separation[0].bands;
        let s600 = &rep.per_separation[1].bands;
        println!(
            "noise={noise}: BR0_low: {:.3}/{:.3} (targets 0.10/0.23)  AR0_low: {:.4}/{:.4}  AR0_high(10,30]: {:.2}/{:.2}",
            s100.p_br0_low, s600.p_br0_low, s100.p_ar0_low, s600.p_ar0_low,
            s100.p_ar0_high, s600.p_ar0_high
        );
    }
}
