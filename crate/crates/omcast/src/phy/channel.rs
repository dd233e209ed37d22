//! Tap-domain channel generation.
//!
//! Each `(rx, tx)` antenna pair gets `n_taps` i.i.d. complex Gaussian taps
//! whose powers follow an exponential decay profile normalized to the user's
//! large-scale gain. The frequency response on subcarrier `n` is the DFT
//! `H_n = sum_l tap_l * exp(-j 2 pi n l / N)`, so a single tap yields a flat
//! channel and more taps yield frequency selectivity with per-entry average
//! power still equal to the large-scale gain.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{PhyConfig, PhyError};
use crate::rng::{self, stream};

/// One user's channel realization for one fading epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    pub user: usize,
    pub epoch: u64,
    pub n_subcarriers: usize,
    pub n_rx: usize,
    pub n_tx: usize,
    /// Row-major `[subcarrier][rx][tx]`.
    data: Vec<Complex64>,
}

impl ChannelMatrix {
    /// Builds a channel from explicit entries (tests, hand-crafted cases).
    /// `data` is row-major `[subcarrier][rx][tx]`.
    pub fn from_data(
        user: usize,
        epoch: u64,
        n_subcarriers: usize,
        n_rx: usize,
        n_tx: usize,
        data: Vec<Complex64>,
    ) -> Result<Self, PhyError> {
        if data.len() != n_subcarriers * n_rx * n_tx {
            return Err(PhyError::DimensionMismatch("channel data length"));
        }
        Ok(Self { user, epoch, n_subcarriers, n_rx, n_tx, data })
    }

    /// The `n_rx x n_tx` matrix of one subcarrier as a row-major slice.
    #[inline]
    pub fn subcarrier(&self, sc: usize) -> &[Complex64] {
        let stride = self.n_rx * self.n_tx;
        &self.data[sc * stride..(sc + 1) * stride]
    }

    #[inline]
    pub fn entry(&self, sc: usize, rx: usize, tx: usize) -> Complex64 {
        self.data[(sc * self.n_rx + rx) * self.n_tx + tx]
    }

    /// Squared Frobenius norm of one subcarrier's matrix.
    pub fn sc_norm_sq(&self, sc: usize) -> f64 {
        self.subcarrier(sc).iter().map(|h| h.norm_sqr()).sum()
    }

    /// Mean squared magnitude over all entries and subcarriers; calibrated to
    /// the large-scale gain in expectation.
    pub fn mean_entry_power(&self) -> f64 {
        let total: f64 = self.data.iter().map(|h| h.norm_sqr()).sum();
        total / self.data.len() as f64
    }
}

/// Reusable channel generator: caches the tap power profile and DFT twiddle
/// factors so per-slot draws cost one small Gaussian batch plus a short DFT.
#[derive(Debug, Clone)]
pub struct ChannelModel {
    cfg: PhyConfig,
    /// Tap powers normalized to sum to 1.
    tap_powers: Vec<f64>,
    /// `twiddle[sc * n_taps + l] = exp(-j 2 pi sc l / n_subcarriers)`.
    twiddles: Vec<Complex64>,
}

impl ChannelModel {
    pub fn new(cfg: PhyConfig) -> Result<Self, PhyError> {
        cfg.validate()?;
        let decay = 10f64.powf(-cfg.tap_decay_db / 10.0);
        let mut tap_powers: Vec<f64> = (0..cfg.n_taps).map(|l| decay.powi(l as i32)).collect();
        let total: f64 = tap_powers.iter().sum();
        for p in &mut tap_powers {
            *p /= total;
        }
        let n = cfg.n_subcarriers as f64;
        let mut twiddles = Vec::with_capacity(cfg.n_subcarriers * cfg.n_taps);
        for sc in 0..cfg.n_subcarriers {
            for l in 0..cfg.n_taps {
                let phase = -2.0 * std::f64::consts::PI * (sc * l) as f64 / n;
                twiddles.push(Complex64::new(phase.cos(), phase.sin()));
            }
        }
        Ok(Self { cfg, tap_powers, twiddles })
    }

    pub fn config(&self) -> &PhyConfig {
        &self.cfg
    }

    /// Draws the channel for `(user, epoch)`. Deterministic in
    /// `(master_seed, user, epoch)`; the large-scale gain scales every tap so
    /// `E[|H(i,j)|^2] = gain` on every subcarrier.
    pub fn draw(&self, user: usize, gain: f64, master_seed: u64, epoch: u64) -> ChannelMatrix {
        let cfg = &self.cfg;
        let mut rng = rng::substream(master_seed, &[stream::CHANNEL, user as u64, epoch]);
        let n_pairs = cfg.n_rx * cfg.n_tx;
        // Taps per antenna pair, drawn in a fixed (pair, tap, re, im) order.
        let mut taps = vec![Complex64::new(0.0, 0.0); n_pairs * cfg.n_taps];
        for pair in 0..n_pairs {
            for (l, &p) in self.tap_powers.iter().enumerate() {
                let sigma = (p * gain / 2.0).sqrt();
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                taps[pair * cfg.n_taps + l] = Complex64::new(sigma * re, sigma * im);
            }
        }
        let mut data = vec![Complex64::new(0.0, 0.0); cfg.n_subcarriers * n_pairs];
        for sc in 0..cfg.n_subcarriers {
            let tw = &self.twiddles[sc * cfg.n_taps..(sc + 1) * cfg.n_taps];
            for pair in 0..n_pairs {
                let tp = &taps[pair * cfg.n_taps..(pair + 1) * cfg.n_taps];
                let mut acc = Complex64::new(0.0, 0.0);
                for l in 0..cfg.n_taps {
                    acc += tp[l] * tw[l];
                }
                data[sc * n_pairs + pair] = acc;
            }
        }
        ChannelMatrix {
            user,
            epoch,
            n_subcarriers: cfg.n_subcarriers,
            n_rx: cfg.n_rx,
            n_tx: cfg.n_tx,
            data,
        }
    }
}
