//! The relay's multiple-access decoder chain.
//!
//! XOR-CD soft-maps each superimposed symbol straight to the XOR of the coded
//! bits and channel-decodes once; it is tried first. When its CRC fails, two
//! fallback decoders attempt the individual streams: RMUD (max-log reduced
//! constellation) and SIC (decode the stronger user, subtract, decode the
//! weaker). All paths validate against the linear CRC.

use super::channel::MacChannelRealization;
use super::coding::{conv_encode, viterbi_decode_tb, FrameFormat};
use super::crc::crc_ok;
use num_complex::Complex64;
use rand::Rng;

/// LLR convention: positive favours bit 0 (BPSK symbol +1).
///
/// Noise variance is floored to keep noiseless test channels finite.
const NOISE_FLOOR: f64 = 1e-12;

/// Per-frame success flags of the decoder chain.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    pub xor_cd_ok: bool,
    pub rmud_ok: bool,
    pub sic_ok: bool,
    /// XOR-CD succeeded, or one of the fallbacks did.
    pub pipeline_ok: bool,
    /// Network-coded information bits from the first successful path.
    pub decoded_xor: Option<Vec<u8>>,
}

/// Decoder knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoderOptions {
    /// Use the max-log approximation in the XOR demapper instead of exact
    /// two-class marginalisation.
    pub max_log_xor: bool,
}

impl Default for DecoderOptions {
    fn default() -> Self {
        Self { max_log_xor: false }
    }
}

#[inline]
fn ln_sum_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m.is_infinite() && m < 0.0 {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// The four superposition points indexed by the bit pair (a, b); bit 0 maps
/// to symbol +1.
#[inline]
fn superposition_points(ha: Complex64, hb: Complex64) -> [Complex64; 4] {
    [
        ha + hb,  // (0, 0)
        ha - hb,  // (0, 1)
        -ha + hb, // (1, 0)
        -ha - hb, // (1, 1)
    ]
}

/// Per-symbol LLRs of the XOR of the two coded bits.
fn xor_llrs(
    y: &MacChannelRealization,
    gains: (Complex64, Complex64),
    max_log: bool,
) -> Vec<f64> {
    let pts = superposition_points(gains.0, gains.1);
    let scale = 1.0 / (2.0 * y.noise_var.max(NOISE_FLOOR));
    y.rx_symbols
        .iter()
        .map(|&r| {
            let d = pts.map(|p| (r - p).norm_sqr());
            // XOR = 0 for pairs (0,0) and (1,1); XOR = 1 for the mixed pairs.
            if max_log {
                scale * (d[1].min(d[2]) - d[0].min(d[3]))
            } else {
                ln_sum_exp(-scale * d[0], -scale * d[3])
                    - ln_sum_exp(-scale * d[1], -scale * d[2])
            }
        })
        .collect()
}

/// XOR-and-channel-decode: demap the superimposed symbols to XOR LLRs, run
/// one Viterbi pass, check the (linear) CRC of the XOR payload.
pub fn xor_cd_decode(
    y: &MacChannelRealization,
    gains: (Complex64, Complex64),
    fmt: &FrameFormat,
    opts: &DecoderOptions,
) -> (bool, Vec<u8>) {
    let llrs = xor_llrs(y, gains, opts.max_log_xor);
    let payload = viterbi_decode_tb(&llrs[..fmt.coded_len()]);
    let ok = crc_ok(&payload, fmt.info_bits);
    (ok, payload[..fmt.info_bits].to_vec())
}

/// Reduced-constellation multiuser detection: per-stream max-log LLRs over
/// the superposed constellation, two independent Viterbi passes, both CRCs
/// must pass.
pub fn rmud_decode(
    y: &MacChannelRealization,
    gains: (Complex64, Complex64),
    fmt: &FrameFormat,
) -> (bool, Vec<u8>, Vec<u8>) {
    let pts = superposition_points(gains.0, gains.1);
    let scale = 1.0 / (2.0 * y.noise_var.max(NOISE_FLOOR));
    let coded = fmt.coded_len();
    let mut llr_a = Vec::with_capacity(coded);
    let mut llr_b = Vec::with_capacity(coded);
    for &r in &y.rx_symbols[..coded] {
        let d = pts.map(|p| (r - p).norm_sqr());
        llr_a.push(scale * (d[2].min(d[3]) - d[0].min(d[1])));
        llr_b.push(scale * (d[1].min(d[3]) - d[0].min(d[2])));
    }
    let payload_a = viterbi_decode_tb(&llr_a);
    let payload_b = viterbi_decode_tb(&llr_b);
    let ok = crc_ok(&payload_a, fmt.info_bits) && crc_ok(&payload_b, fmt.info_bits);
    (
        ok,
        payload_a[..fmt.info_bits].to_vec(),
        payload_b[..fmt.info_bits].to_vec(),
    )
}

/// Successive interference cancellation: decode the stronger link treating
/// the weaker as Gaussian noise, re-encode and subtract, then decode the
/// weaker link. Gain ties go to link A.
pub fn sic_decode(
    y: &MacChannelRealization,
    gains: (Complex64, Complex64),
    fmt: &FrameFormat,
) -> (bool, Vec<u8>, Vec<u8>) {
    let (ha, hb) = gains;
    let a_stronger = ha.norm_sqr() >= hb.norm_sqr();
    let (h_strong, h_weak) = if a_stronger { (ha, hb) } else { (hb, ha) };

    let coded = fmt.coded_len();
    let noise = y.noise_var.max(NOISE_FLOOR);
    // Interference power per complex symbol is |h_weak|^2; per dimension half.
    let eff_var_strong = noise + 0.5 * h_weak.norm_sqr();
    let llr_strong: Vec<f64> = y.rx_symbols[..coded]
        .iter()
        .map(|&r| (h_strong.conj() * r).re / eff_var_strong)
        .collect();
    let payload_strong = viterbi_decode_tb(&llr_strong);

    // Reconstruct and subtract the stronger signal, then decode the weaker.
    let re_coded = conv_encode(&payload_strong);
    let llr_weak: Vec<f64> = y.rx_symbols[..coded]
        .iter()
        .zip(&re_coded)
        .map(|(&r, &bit)| {
            let sym = 1.0 - 2.0 * bit as f64;
            let cleaned = r - h_strong * sym;
            (h_weak.conj() * cleaned).re / noise
        })
        .collect();
    let payload_weak = viterbi_decode_tb(&llr_weak);

    let ok = crc_ok(&payload_strong, fmt.info_bits) && crc_ok(&payload_weak, fmt.info_bits);
    let (payload_a, payload_b) = if a_stronger {
        (payload_strong, payload_weak)
    } else {
        (payload_weak, payload_strong)
    };
    (
        ok,
        payload_a[..fmt.info_bits].to_vec(),
        payload_b[..fmt.info_bits].to_vec(),
    )
}

fn xor_bits(a: &[u8], b: &[u8]) -> Vec<u8> {
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

/// Full decoder chain: XOR-CD first; on CRC failure both fallbacks run and
/// every flag is recorded.
pub fn decode_pipeline(
    y: &MacChannelRealization,
    gains: (Complex64, Complex64),
    fmt: &FrameFormat,
    opts: &DecoderOptions,
) -> DecodeOutcome {
    let (xor_ok, xor_info) = xor_cd_decode(y, gains, fmt, opts);
    if xor_ok {
        return DecodeOutcome {
            xor_cd_ok: true,
            rmud_ok: false,
            sic_ok: false,
            pipeline_ok: true,
            decoded_xor: Some(xor_info),
        };
    }
    let (rmud_ok, ra, rb) = rmud_decode(y, gains, fmt);
    let (sic_ok, sa, sb) = sic_decode(y, gains, fmt);
    let decoded_xor = if rmud_ok {
        Some(xor_bits(&ra, &rb))
    } else if sic_ok {
        Some(xor_bits(&sa, &sb))
    } else {
        None
    };
    DecodeOutcome {
        xor_cd_ok: false,
        rmud_ok,
        sic_ok,
        pipeline_ok: rmud_ok || sic_ok,
        decoded_xor,
    }
}

/// Generate, transmit and decode one random frame pair at the given SNR pair
/// `(snr_b, snr_a)` in dB. Returns the outcome together with the true XOR of
/// the information bits.
pub fn simulate_frame<R: Rng + ?Sized>(
    snr_b_db: f64,
    snr_a_db: f64,
    fmt: &FrameFormat,
    opts: &SimulationOptions,
    rng: &mut R,
) -> (DecodeOutcome, Vec<u8>) {
    use super::channel::{estimate_gains, pilot_symbols, MacChannel};
    use super::coding::encode_frame;

    let info_a: Vec<u8> = (0..fmt.info_bits).map(|_| rng.random_range(0..2u8)).collect();
    let info_b: Vec<u8> = (0..fmt.info_bits).map(|_| rng.random_range(0..2u8)).collect();
    let frame_a = encode_frame(&info_a);
    let frame_b = encode_frame(&info_b);
    let chan = MacChannel::from_snr_db(snr_b_db, snr_a_db, rng);

    let (mut xa, mut xb) = (Vec::new(), Vec::new());
    if opts.pilot_csi {
        let (pa, pb) = pilot_symbols(opts.pilot_len);
        xa.extend_from_slice(&pa);
        xb.extend_from_slice(&pb);
    }
    xa.extend_from_slice(&frame_a.modulated);
    xb.extend_from_slice(&frame_b.modulated);
    let mut rx = chan.transmit(&xa, &xb, rng).expect("equal frame lengths");

    let gains = if opts.pilot_csi {
        let (pa, pb) = pilot_symbols(opts.pilot_len);
        let est = estimate_gains(&rx.rx_symbols[..opts.pilot_len], &pa, &pb);
        rx.rx_symbols.drain(..opts.pilot_len);
        est
    } else {
        (rx.gain_a, rx.gain_b)
    };

    let outcome = decode_pipeline(&rx, gains, fmt, &opts.decoder);
    (outcome, xor_bits(&info_a, &info_b))
}

/// Options for end-to-end frame simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationOptions {
    pub decoder: DecoderOptions,
    /// Estimate gains from a known preamble instead of genie CSI.
    pub pilot_csi: bool,
    pub pilot_len: usize,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self {
            decoder: DecoderOptions::default(),
            pilot_csi: false,
            pilot_len: 64,
        }
    }
}
