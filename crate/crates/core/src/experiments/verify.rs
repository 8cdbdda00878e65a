//! Self-check suite behind the `verify` subcommand: the numerical properties
//! the toolkit's algorithms are supposed to satisfy, evaluated against
//! independent oracles (closed forms, brute-force scans, finite differences).

use super::trial::derive_rng;
use crate::netmodel::{free_space_factor, PowerProfile, PropagationParams, SPEED_OF_LIGHT};
use crate::rates;
use crate::relaysel::{
    gradient_logf, objective_f, select_relay_pncb_linear, verify_logconcavity, AscentOptions,
    GradientMode, Objective, ObjectiveVariant,
};
use crate::netmodel::Deployment;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// One pass/fail line of the verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyLine {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn line(name: &str, pass: bool, detail: String) -> VerifyLine {
    VerifyLine { name: name.to_string(), pass, detail }
}

/// Run the property suite. All checks are deterministic for a given seed.
pub fn run_verify_suite(pow: &PowerProfile, prop: &PropagationParams, seed: u64) -> Vec<VerifyLine> {
    let mut lines = Vec::new();
    let mut rng = derive_rng(seed, 0x7665_7269, 0);

    // Free-space factor against the closed form.
    {
        let lambda_term = SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI * prop.carrier_freq_hz);
        let expected = lambda_term * lambda_term
            * prop.ref_dist_m.powf(prop.path_loss_exp - 2.0)
            * crate::netmodel::dbm_to_watts(pow.p_a_dbm);
        let got = free_space_factor(pow.p_a_dbm, prop);
        lines.push(line(
            "free-space factor closed form",
            (got - expected).abs() < 1e-15 * expected.abs(),
            format!("{got:.6e} W"),
        ));
    }

    // Rate identities.
    {
        let mut ok = true;
        for _ in 0..500 {
            let ma = rng.random_range(0.0..8.0);
            let bc = rng.random_range(0.0..8.0);
            let (pncb, rho_ma, rho_bc) = rates::rate_pncb(ma, bc);
            ok &= pncb + 1e-12 >= rates::rate_pnc_equal(ma, bc);
            ok &= (rho_ma + rho_bc - 1.0).abs() < 1e-12;
            let (balanced, _, _) = rates::rate_pncb(ma, ma);
            ok &= (balanced - ma / 2.0).abs() < 1e-12;
            let s = rng.random_range(0.5..1e5);
            ok &= (rates::rate_ma_lattice(s, s).unwrap() - (0.5 + s).log2()).abs() < 1e-12;
        }
        lines.push(line("rate identities", ok, "500 random draws".into()));
    }

    // Log-concavity of the objective on fine grids, plus negative control.
    {
        let mut ok = true;
        let mut detail = String::new();
        for x_b in [200.0, 600.0, 1000.0] {
            let obj = Objective::from_network(pow, prop, 1.0, 1.0, x_b);
            let rep = verify_logconcavity(&obj, 50_000, ObjectiveVariant::Standard);
            ok &= rep.pass;
            detail.push_str(&format!(
                "x_b={x_b}: max2nd={:.2e} hthr={:.1}m; ",
                rep.max_second_difference, rep.h_condition_threshold
            ));
        }
        lines.push(line("log-concavity on fine grids", ok, detail));

        let obj = Objective::from_network(pow, prop, 1.0, 1.0, 1000.0);
        let rep = verify_logconcavity(&obj, 10_000, ObjectiveVariant::SignFlippedH);
        lines.push(line(
            "negative control fails",
            !rep.pass,
            format!("max2nd={:.2e}", rep.max_second_difference),
        ));
    }

    // Exact gradient against central finite differences.
    {
        let mut worst: f64 = 0.0;
        let mut ok = true;
        for _ in 0..100 {
            let x_b = rng.random_range(300.0..1000.0);
            let obj = Objective::from_network(
                pow,
                prop,
                rng.random_range(0.2..3.0),
                rng.random_range(0.2..3.0),
                x_b,
            );
            let (lo, hi) = obj.domain();
            let delta = 1e-4;
            let x = rng.random_range((lo + 2.0 * delta)..(hi - 2.0 * delta));
            let exact = gradient_logf(x, &obj, GradientMode::Exact).unwrap();
            let f = |x: f64| objective_f(x, &obj).unwrap().ln();
            let fd = (f(x + delta) - f(x - delta)) / (2.0 * delta);
            let rel = (exact - fd).abs() / fd.abs().max(1e-12);
            worst = worst.max(rel);
            ok &= rel <= 1e-6;
        }
        lines.push(line(
            "exact gradient vs finite differences",
            ok,
            format!("worst relative deviation {worst:.2e}"),
        ));
    }

    // Ascent solution against a 0.1 m brute-force scan of the objective.
    {
        let mut ok = true;
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let x_b = rng.random_range(300.0..1000.0);
            let obj = Objective::from_network(
                pow,
                prop,
                rng.random_range(0.2..3.0),
                rng.random_range(0.2..3.0),
                x_b,
            );
            let dep = Deployment::linear(
                x_b,
                &crate::netmodel::linear_relay_grid(10.0, prop),
                10.0,
                prop,
            )
            .unwrap();
            let res = select_relay_pncb_linear(&dep, &obj, &AscentOptions::default()).unwrap();
            let f_star = objective_f(res.x_star.x, &obj).unwrap();
            let (lo, hi) = obj.domain();
            let mut x = lo + 0.1;
            let mut grid_best = f64::NEG_INFINITY;
            while x <= hi {
                grid_best = grid_best.max(objective_f(x, &obj).unwrap());
                x += 0.1;
            }
            let gap = grid_best - f_star;
            worst = worst.max(gap);
            ok &= gap <= 1e-6;
        }
        lines.push(line(
            "ascent matches 0.1 m objective scan",
            ok,
            format!("worst value gap {worst:.2e}"),
        ));
    }

    // PHY linearity and noiseless decoding.
    {
        use crate::phy::{conv_encode, crc32_linear};
        let mut ok = true;
        for _ in 0..200 {
            let a: Vec<u8> = (0..64).map(|_| rng.random_range(0..2u8)).collect();
            let b: Vec<u8> = (0..64).map(|_| rng.random_range(0..2u8)).collect();
            let ab: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
            let enc_xor: Vec<u8> = conv_encode(&a)
                .iter()
                .zip(conv_encode(&b))
                .map(|(x, y)| x ^ y)
                .collect();
            ok &= conv_encode(&ab) == enc_xor;
            let crc_xor: Vec<u8> = crc32_linear(&a)
                .iter()
                .zip(crc32_linear(&b))
                .map(|(x, y)| x ^ y)
                .collect();
            ok &= crc32_linear(&ab) == crc_xor;
        }
        lines.push(line("code and CRC linearity", ok, "200 random pairs".into()));
    }
    {
        use crate::phy::{
            decode_pipeline, encode_frame, DecoderOptions, FrameFormat, MacChannel,
        };
        use num_complex::Complex64;
        let fmt = FrameFormat { info_bits: 96 };
        let mut ok = true;
        for _ in 0..20 {
            let info_a: Vec<u8> = (0..fmt.info_bits).map(|_| rng.random_range(0..2u8)).collect();
            let info_b: Vec<u8> = (0..fmt.info_bits).map(|_| rng.random_range(0..2u8)).collect();
            let fa = encode_frame(&info_a);
            let fb = encode_frame(&info_b);
            let ha = Complex64::from_polar(1.2, rng.random_range(0.0..6.28));
            let hb = Complex64::from_polar(0.7, rng.random_range(0.0..6.28));
            let chan = MacChannel::new(ha, hb, 0.0);
            let rx = chan.transmit(&fa.modulated, &fb.modulated, &mut rng).unwrap();
            let out = decode_pipeline(&rx, (ha, hb), &fmt, &DecoderOptions::default());
            ok &= out.xor_cd_ok;
            let want: Vec<u8> = info_a.iter().zip(&info_b).map(|(x, y)| x ^ y).collect();
            ok &= out.decoded_xor.as_deref() == Some(&want[..]);
        }
        lines.push(line("noiseless pipeline decodes", ok, "20 frames".into()));
    }

    lines
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_on_defaults() {
        let lines = run_verify_suite(&PowerProfile::default(), &PropagationParams::default(), 7);
        for l in &lines {
            assert!(l.pass, "{}: {}", l.name, l.detail);
        }
        assert!(lines.len() >= 6);
    }
}
