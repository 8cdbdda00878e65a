//! Flat-fading two-user multiple-access channel.
//!
//! Both sources transmit BPSK simultaneously; the receiver sees
//! `y = h_a x_a + h_b x_b + n` with per-frame constant complex gains and
//! circular white Gaussian noise. Gain magnitudes are set from the configured
//! per-link SNRs with symbol energy 1 and total noise power `2 sigma^2 = 1`,
//! so the linear SNR of link x is exactly `|h_x|^2`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PhyError {
    #[error("frame lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// Channel parameters for one multiple-access frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacChannel {
    pub gain_a: Complex64,
    pub gain_b: Complex64,
    /// Noise variance per real dimension.
    pub noise_var: f64,
}

impl MacChannel {
    pub fn new(gain_a: Complex64, gain_b: Complex64, noise_var: f64) -> Self {
        Self { gain_a, gain_b, noise_var }
    }

    /// Draw a channel for the given per-link SNR pair `(snr_b, snr_a)` in dB,
    /// with uniformly random phases. Noise is fixed at `sigma^2 = 0.5` per
    /// dimension so `|h_x|^2` equals the linear SNR.
    pub fn from_snr_db<R: Rng + ?Sized>(snr_b_db: f64, snr_a_db: f64, rng: &mut R) -> Self {
        let amp_a = 10f64.powf(snr_a_db / 20.0);
        let amp_b = 10f64.powf(snr_b_db / 20.0);
        let phase_a = rng.random_range(0.0..std::f64::consts::TAU);
        let phase_b = rng.random_range(0.0..std::f64::consts::TAU);
        Self {
            gain_a: Complex64::from_polar(amp_a, phase_a),
            gain_b: Complex64::from_polar(amp_b, phase_b),
            noise_var: 0.5,
        }
    }

    /// Superimpose the two symbol streams and add noise.
    pub fn transmit<R: Rng + ?Sized>(
        &self,
        symbols_a: &[f64],
        symbols_b: &[f64],
        rng: &mut R,
    ) -> Result<MacChannelRealization, PhyError> {
        if symbols_a.len() != symbols_b.len() {
            return Err(PhyError::LengthMismatch(symbols_a.len(), symbols_b.len()));
        }
        let sigma = self.noise_var.sqrt();
        let rx_symbols = symbols_a
            .iter()
            .zip(symbols_b)
            .map(|(&xa, &xb)| {
                let noise = Complex64::new(
                    sigma * rng.sample::<f64, _>(StandardNormal),
                    sigma * rng.sample::<f64, _>(StandardNormal),
                );
                self.gain_a * xa + self.gain_b * xb + noise
            })
            .collect();
        Ok(MacChannelRealization {
            gain_a: self.gain_a,
            gain_b: self.gain_b,
            noise_var: self.noise_var,
            rx_symbols,
        })
    }
}

/// One received multiple-access frame.
#[derive(Debug, Clone, PartialEq)]
pub struct MacChannelRealization {
    pub gain_a: Complex64,
    pub gain_b: Complex64,
    pub noise_var: f64,
    pub rx_symbols: Vec<Complex64>,
}

/// Known pilot sequences for the two sources: all-ones for A and alternating
/// signs for B, which are orthogonal over any even length.
pub fn pilot_symbols(len: usize) -> (Vec<f64>, Vec<f64>) {
    let a = vec![1.0; len];
    let b = (0..len).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    (a, b)
}

/// Least-squares gain estimates from the pilot part of a received frame.
pub fn estimate_gains(
    rx: &[Complex64],
    pilots_a: &[f64],
    pilots_b: &[f64],
) -> (Complex64, Complex64) {
    let len = pilots_a.len();
    let mut acc_a = Complex64::new(0.0, 0.0);
    let mut acc_b = Complex64::new(0.0, 0.0);
    for i in 0..len {
        acc_a += rx[i] * pilots_a[i];
        acc_b += rx[i] * pilots_b[i];
    }
    (acc_a / len as f64, acc_b / len as f64)
}
