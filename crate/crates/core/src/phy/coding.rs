//! Tail-biting convolutional code (rate 1/3, constraint length 7, generators
//! 133/171/165 octal) and its soft-decision Viterbi decoder.
//!
//! Tail-biting initialises the encoder register with the last bits of the
//! message so the trellis starts and ends in the same state; no termination
//! bits are appended and the output is exactly three bits per input bit.
//! Because the code is linear and the wrap state of an XOR of two messages is
//! the XOR of their wrap states, `enc(a) ^ enc(b) = enc(a ^ b)` holds.

use super::crc::crc32_linear;

/// Constraint length of the code.
pub const CONSTRAINT_LEN: usize = 7;
/// Coded bits per information bit.
pub const CODE_STREAMS: usize = 3;
/// Generator polynomials, current bit in the MSB.
pub const GENERATORS: [u32; CODE_STREAMS] = [0o133, 0o171, 0o165];

const NUM_STATES: usize = 1 << (CONSTRAINT_LEN - 1);

#[inline]
fn parity(v: u32) -> u8 {
    (v.count_ones() & 1) as u8
}

/// Encode a bit vector with the tail-biting code. Output has length
/// `3 * bits.len()`, streams interleaved per step.
pub fn conv_encode(bits: &[u8]) -> Vec<u8> {
    assert!(!bits.is_empty(), "cannot encode an empty block");
    let len = bits.len();
    // Register state holds the previous six bits, most recent in bit 5.
    let mut state: u32 = 0;
    for j in 1..CONSTRAINT_LEN {
        let idx = (len as isize - j as isize).rem_euclid(len as isize) as usize;
        state |= (bits[idx] as u32) << (CONSTRAINT_LEN - 1 - j);
    }
    let mut out = Vec::with_capacity(CODE_STREAMS * len);
    for &b in bits {
        let v = ((b as u32) << (CONSTRAINT_LEN - 1)) | state;
        for g in GENERATORS {
            out.push(parity(v & g));
        }
        state = v >> 1;
    }
    out
}

/// Precomputed trellis: per (state, input bit) the successor state and the
/// three output bits packed into a mask (stream 0 in bit 2).
struct Trellis {
    next: [[u8; 2]; NUM_STATES],
    out_mask: [[u8; 2]; NUM_STATES],
}

impl Trellis {
    fn build() -> Self {
        let mut next = [[0u8; 2]; NUM_STATES];
        let mut out_mask = [[0u8; 2]; NUM_STATES];
        for s in 0..NUM_STATES {
            for b in 0..2u32 {
                let v = (b << (CONSTRAINT_LEN - 1)) | s as u32;
                let mut mask = 0u8;
                for (j, g) in GENERATORS.iter().enumerate() {
                    mask |= parity(v & g) << (CODE_STREAMS - 1 - j);
                }
                next[s][b as usize] = (v >> 1) as u8;
                out_mask[s][b as usize] = mask;
            }
        }
        Self { next, out_mask }
    }
}

fn trellis() -> &'static Trellis {
    use std::sync::OnceLock;
    static TRELLIS: OnceLock<Trellis> = OnceLock::new();
    TRELLIS.get_or_init(Trellis::build)
}

/// Soft Viterbi decode of a tail-biting block.
///
/// `llrs` holds one log-likelihood ratio per coded bit (positive favours
/// bit 0), three per step. Tail-biting is handled with a wrap-around pass:
/// the block is processed twice with free start metrics and the decisions are
/// read from the centre of the doubled trellis, where the path has converged
/// from both sides.
pub fn viterbi_decode_tb(llrs: &[f64]) -> Vec<u8> {
    assert!(llrs.len() % CODE_STREAMS == 0 && !llrs.is_empty());
    let n_steps = llrs.len() / CODE_STREAMS;
    let tr = trellis();
    let total = 2 * n_steps;

    let mut cur = vec![0.0f64; NUM_STATES];
    let mut nxt = vec![0.0f64; NUM_STATES];
    let mut preds = vec![[0u8; NUM_STATES]; total];

    for t in 0..total {
        let base = CODE_STREAMS * (t % n_steps);
        let (l0, l1, l2) = (llrs[base], llrs[base + 1], llrs[base + 2]);
        // Branch metric for each 3-bit output mask.
        let mut mask_metric = [0.0f64; 8];
        for (mask, m) in mask_metric.iter_mut().enumerate() {
            *m = if mask & 0b100 == 0 { l0 } else { -l0 }
                + if mask & 0b010 == 0 { l1 } else { -l1 }
                + if mask & 0b001 == 0 { l2 } else { -l2 };
        }
        nxt.fill(f64::NEG_INFINITY);
        let pred = &mut preds[t];
        for s in 0..NUM_STATES {
            let m = cur[s];
            for b in 0..2 {
                let ns = tr.next[s][b] as usize;
                let cand = m + mask_metric[tr.out_mask[s][b] as usize];
                if cand > nxt[ns] {
                    nxt[ns] = cand;
                    pred[ns] = s as u8;
                }
            }
        }
        std::mem::swap(&mut cur, &mut nxt);
    }

    // Traceback from the best end state; the entered state's top bit is the
    // input bit of that step.
    let mut state = cur
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let mut decisions = vec![0u8; total];
    for t in (0..total).rev() {
        decisions[t] = (state >> (CONSTRAINT_LEN - 2)) as u8 & 1;
        state = preds[t][state] as usize;
    }

    let mut out = vec![0u8; n_steps];
    for (offset, &d) in decisions[n_steps / 2..n_steps / 2 + n_steps].iter().enumerate() {
        out[(n_steps / 2 + offset) % n_steps] = d;
    }
    out
}

/// Frame layout: information bits followed by a 32-bit linear CRC, jointly
/// convolutionally encoded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameFormat {
    pub info_bits: usize,
}

impl Default for FrameFormat {
    fn default() -> Self {
        Self { info_bits: 512 }
    }
}

impl FrameFormat {
    pub const CRC_BITS: usize = 32;

    /// info + CRC length in bits.
    pub fn payload_len(&self) -> usize {
        self.info_bits + Self::CRC_BITS
    }

    /// Coded length in bits (and BPSK symbols).
    pub fn coded_len(&self) -> usize {
        CODE_STREAMS * self.payload_len()
    }
}

/// A source frame with its CRC, coded bits and BPSK symbols (bit 0 -> +1).
#[derive(Debug, Clone, PartialEq)]
pub struct CodedFrame {
    pub info_bits: Vec<u8>,
    pub crc_bits: Vec<u8>,
    pub coded_bits: Vec<u8>,
    pub modulated: Vec<f64>,
}

/// Attach the CRC, encode and modulate.
pub fn encode_frame(info_bits: &[u8]) -> CodedFrame {
    let crc_bits = crc32_linear(info_bits);
    let mut payload = info_bits.to_vec();
    payload.extend_from_slice(&crc_bits);
    let coded_bits = conv_encode(&payload);
    let modulated = coded_bits.iter().map(|&b| 1.0 - 2.0 * b as f64).collect();
    CodedFrame {
        info_bits: info_bits.to_vec(),
        crc_bits,
        coded_bits,
        modulated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_bits(rng: &mut ChaCha8Rng, len: usize) -> Vec<u8> {
        (0..len).map(|_| rng.random_range(0..2u8)).collect()
    }

    #[test]
    fn zero_input_gives_zero_output() {
        assert!(conv_encode(&[0; 40]).iter().all(|&b| b == 0));
    }

    #[test]
    fn output_length_is_three_per_bit() {
        assert_eq!(conv_encode(&[1, 0, 1]).len(), 9);
        assert_eq!(conv_encode(&random_bits(&mut ChaCha8Rng::seed_from_u64(1), 544)).len(), 1632);
    }

    #[test]
    fn impulse_response_matches_generators() {
        // A single one in a long zero block exposes the raw generator taps:
        // 133 = 1011011, 171 = 1111001, 165 = 1110101 (MSB = current bit).
        let mut input = vec![0u8; 32];
        input[0] = 1;
        let coded = conv_encode(&input);
        let expect_g0 = [1, 0, 1, 1, 0, 1, 1];
        let expect_g1 = [1, 1, 1, 1, 0, 0, 1];
        let expect_g2 = [1, 1, 1, 0, 1, 0, 1];
        for k in 0..7 {
            assert_eq!(coded[3 * k], expect_g0[k], "g0 tap {k}");
            assert_eq!(coded[3 * k + 1], expect_g1[k], "g1 tap {k}");
            assert_eq!(coded[3 * k + 2], expect_g2[k], "g2 tap {k}");
        }
        assert!(coded[21..].iter().all(|&b| b == 0));
    }

    #[test]
    fn encoder_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let a = random_bits(&mut rng, 64);
            let b = random_bits(&mut rng, 64);
            let ab: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
            let want: Vec<u8> = conv_encode(&a)
                .iter()
                .zip(conv_encode(&b))
                .map(|(x, y)| x ^ y)
                .collect();
            assert_eq!(conv_encode(&ab), want);
        }
    }

    #[test]
    fn tail_biting_wraps_the_state() {
        // With only the last message bit set, the wrapped register exposes
        // the delay-1..6 generator taps over the first six output steps.
        let mut input = vec![0u8; 16];
        *input.last_mut().unwrap() = 1;
        let coded = conv_encode(&input);
        let expect_g0 = [1, 0, 1, 1, 0, 1, 1];
        let expect_g1 = [1, 1, 1, 1, 0, 0, 1];
        let expect_g2 = [1, 1, 1, 0, 1, 0, 1];
        for k in 0..6 {
            assert_eq!(coded[3 * k], expect_g0[k + 1], "g0 delay {}", k + 1);
            assert_eq!(coded[3 * k + 1], expect_g1[k + 1], "g1 delay {}", k + 1);
            assert_eq!(coded[3 * k + 2], expect_g2[k + 1], "g2 delay {}", k + 1);
        }
    }

    #[test]
    fn viterbi_decodes_clean_llrs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let payload = random_bits(&mut rng, 136);
            let coded = conv_encode(&payload);
            let llrs: Vec<f64> = coded.iter().map(|&b| if b == 0 { 8.0 } else { -8.0 }).collect();
            assert_eq!(viterbi_decode_tb(&llrs), payload);
        }
    }

    #[test]
    fn viterbi_corrects_noisy_llrs() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let payload = random_bits(&mut rng, 136);
        let coded = conv_encode(&payload);
        // Strong code, mild Gaussian noise on the LLR signs.
        let llrs: Vec<f64> = coded
            .iter()
            .map(|&b| {
                let clean = if b == 0 { 2.0 } else { -2.0 };
                clean + rng.random_range(-1.5..1.5)
            })
            .collect();
        assert_eq!(viterbi_decode_tb(&llrs), payload);
    }

    #[test]
    fn frame_encode_layout() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let info = random_bits(&mut rng, 512);
        let frame = encode_frame(&info);
        assert_eq!(frame.crc_bits.len(), 32);
        assert_eq!(frame.coded_bits.len(), 1632);
        assert_eq!(frame.modulated.len(), 1632);
        assert!(frame.modulated.iter().all(|&s| s == 1.0 || s == -1.0));
    }
}
