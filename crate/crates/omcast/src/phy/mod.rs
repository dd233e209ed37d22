//! Physical layer: frequency-selective MISO/MIMO channels, multicast
//! precoding, per-user rate evaluation, and rate-to-MCS link adaptation.
//!
//! The downlink is OFDM with `n_subcarriers` data subcarriers. Each user's
//! channel is an `n_rx x n_tx` matrix per subcarrier, generated from a short
//! exponentially decaying tap profile so adjacent subcarriers stay
//! correlated. Block fading: a channel realization is pinned to a fading
//! epoch and is fully determined by `(seed, user, epoch)`.

mod channel;
mod mcs;
mod precoder;

pub use channel::{ChannelMatrix, ChannelModel};
pub use mcs::{select_mcs, McsEntry, McsTable};
pub use precoder::{grouping_metric, multicast_precoder, user_rate, Precoder};

use thiserror::Error;

/// Channel-model geometry and tap profile.
#[derive(Debug, Clone, PartialEq)]
pub struct PhyConfig {
    /// Number of OFDM data subcarriers.
    pub n_subcarriers: usize,
    /// Transmit antennas at the AP.
    pub n_tx: usize,
    /// Receive antennas per user.
    pub n_rx: usize,
    /// Spatial streams; must not exceed `n_rx`.
    pub n_streams: usize,
    /// Number of delay taps in the power-delay profile.
    pub n_taps: usize,
    /// Per-tap power decay in dB (tap l is `l * tap_decay_db` below tap 0).
    pub tap_decay_db: f64,
}

impl Default for PhyConfig {
    fn default() -> Self {
        Self {
            n_subcarriers: 52,
            n_tx: 4,
            n_rx: 1,
            n_streams: 1,
            n_taps: 4,
            tap_decay_db: 3.0,
        }
    }
}

impl PhyConfig {
    pub fn validate(&self) -> Result<(), PhyError> {
        if self.n_subcarriers == 0 || self.n_tx == 0 || self.n_rx == 0 || self.n_taps == 0 {
            return Err(PhyError::InvalidConfig("zero-sized channel dimension"));
        }
        if self.n_streams == 0 || self.n_streams > self.n_rx {
            return Err(PhyError::InvalidConfig("n_streams must be in 1..=n_rx"));
        }
        if !(self.tap_decay_db >= 0.0) {
            return Err(PhyError::InvalidConfig("tap_decay_db must be >= 0"));
        }
        Ok(())
    }
}

/// Additive-noise floor shared by all users; per-user average SNR lives with
/// the user state so one noise model serves the whole cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    /// Noise power N0 (linear).
    pub n0: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self { n0: 1.0 }
    }
}

/// Converts an average SNR in dB into the large-scale channel gain that
/// calibrates the per-entry channel power: `E[|H(i,j)|^2] = snr_lin * n0`.
pub fn snr_db_to_gain(snr_db: f64, noise: &NoiseModel) -> f64 {
    10f64.powf(snr_db / 10.0) * noise.n0
}

#[derive(Debug, Error, PartialEq)]
pub enum PhyError {
    #[error("invalid phy config: {0}")]
    InvalidConfig(&'static str),
    #[error("degenerate channel: zero Frobenius norm")]
    DegenerateChannel,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    #[error("invalid MCS table: {0}")]
    InvalidMcsTable(String),
}
