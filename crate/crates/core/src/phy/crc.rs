//! CRC-32 with the IEEE polynomial, zero initial state and no final
//! complement. Dropping the init/complement steps makes the checksum linear
//! over XOR: `crc(a ^ b) = crc(a) ^ crc(b)`, which is what lets a decoder
//! validate a network-coded message against the XOR of the per-source CRCs.

/// IEEE CRC-32 generator polynomial (x^32 term implicit).
pub const CRC32_POLY: u32 = 0x04C1_1DB7;

/// CRC over a bit slice (values 0/1), returned as 32 bits MSB first.
pub fn crc32_linear(bits: &[u8]) -> Vec<u8> {
    let mut reg: u32 = 0;
    for &b in bits {
        let top = (reg >> 31) as u8;
        reg <<= 1;
        if top ^ b == 1 {
            reg ^= CRC32_POLY;
        }
    }
    (0..32).map(|i| ((reg >> (31 - i)) & 1) as u8).collect()
}

/// True when `payload` = info || crc checks out.
pub fn crc_ok(payload: &[u8], info_len: usize) -> bool {
    debug_assert!(payload.len() == info_len + 32);
    crc32_linear(&payload[..info_len]) == payload[info_len..]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Schoolbook polynomial long division over GF(2), as an independent
    /// oracle: divide message * x^32 by the generator and keep the remainder.
    fn long_division_crc(bits: &[u8]) -> Vec<u8> {
        let mut work: Vec<u8> = bits.to_vec();
        work.extend(std::iter::repeat(0).take(32));
        let gen_bits: Vec<u8> = std::iter::once(1)
            .chain((0..32).map(|i| ((CRC32_POLY >> (31 - i)) & 1) as u8))
            .collect();
        for i in 0..bits.len() {
            if work[i] == 1 {
                for (j, &g) in gen_bits.iter().enumerate() {
                    work[i + j] ^= g;
                }
            }
        }
        work[bits.len()..].to_vec()
    }

    fn random_bits(rng: &mut ChaCha8Rng, len: usize) -> Vec<u8> {
        (0..len).map(|_| rng.random_range(0..2u8)).collect()
    }

    #[test]
    fn zero_message_has_zero_crc() {
        assert!(crc32_linear(&[0; 64]).iter().all(|&b| b == 0));
    }

    #[test]
    fn matches_long_division_oracle() {
        let msg = [1, 0, 1, 1, 0, 0, 1, 0];
        assert_eq!(crc32_linear(&msg), long_division_crc(&msg));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let len = rng.random_range(1..200);
            let msg = random_bits(&mut rng, len);
            assert_eq!(crc32_linear(&msg), long_division_crc(&msg));
        }
    }

    #[test]
    fn linear_over_xor() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let a = random_bits(&mut rng, 96);
            let b = random_bits(&mut rng, 96);
            let ab: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
            let want: Vec<u8> = crc32_linear(&a)
                .iter()
                .zip(crc32_linear(&b))
                .map(|(x, y)| x ^ y)
                .collect();
            assert_eq!(crc32_linear(&ab), want);
        }
    }
}
