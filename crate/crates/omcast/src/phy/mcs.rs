//! Rate-to-MCS link adaptation.
//!
//! Each MCS row carries its PHY rate, spectral efficiency, and a required
//! efficiency obtained by adding a Shannon-gap margin (in bits/s/Hz,
//! `gap_db / (10 log10 2)`) to the nominal efficiency. A user supports a row
//! when its mean achievable spectral efficiency reaches the required
//! efficiency; a group transmits at the weakest member's selection.

use super::PhyError;

/// One modulation-and-coding option.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McsEntry {
    pub index: u8,
    /// PHY data rate in Mbit/s at the table's bandwidth.
    pub rate_mbps: f64,
    /// Nominal spectral efficiency in bits/s/Hz.
    pub spectral_eff: f64,
    /// Efficiency a user must achieve to support this row (nominal + gap).
    pub required_eff: f64,
    /// AWGN SNR at which `log2(1 + snr)` equals `required_eff`.
    pub required_snr_db: f64,
}

/// Ordered MCS table; strictly increasing in rate, efficiency, and SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct McsTable {
    pub bandwidth_mhz: f64,
    pub shannon_gap_db: f64,
    entries: Vec<McsEntry>,
}

impl McsTable {
    /// Builds a table from PHY rates. The efficiency of a row is
    /// `rate / bandwidth`; the gap margin shifts the requirement.
    pub fn from_rates(
        rates_mbps: &[f64],
        bandwidth_mhz: f64,
        shannon_gap_db: f64,
    ) -> Result<Self, PhyError> {
        if rates_mbps.is_empty() {
            return Err(PhyError::InvalidMcsTable("no rates given".into()));
        }
        if !(bandwidth_mhz > 0.0) {
            return Err(PhyError::InvalidMcsTable("bandwidth must be positive".into()));
        }
        if !(shannon_gap_db >= 0.0) {
            return Err(PhyError::InvalidMcsTable("gap must be >= 0 dB".into()));
        }
        let margin = shannon_gap_db / (10.0 * 2f64.log10());
        let mut entries = Vec::with_capacity(rates_mbps.len());
        let mut prev = 0.0f64;
        for (i, &rate) in rates_mbps.iter().enumerate() {
            if !(rate > prev) {
                return Err(PhyError::InvalidMcsTable(format!(
                    "rates must be strictly increasing and positive (index {i})"
                )));
            }
            prev = rate;
            let spectral_eff = rate / bandwidth_mhz;
            let required_eff = spectral_eff + margin;
            let required_snr_db = 10.0 * (2f64.powf(required_eff) - 1.0).log10();
            entries.push(McsEntry {
                index: i as u8,
                rate_mbps: rate,
                spectral_eff,
                required_eff,
                required_snr_db,
            });
        }
        Ok(Self { bandwidth_mhz, shannon_gap_db, entries })
    }

    /// The 20 MHz single-stream ladder used by default.
    pub fn default_20mhz() -> Self {
        Self::from_rates(&[6.5, 13.0, 19.5, 26.0, 39.0, 52.0, 58.5, 65.0], 20.0, 3.0)
            .expect("default table is valid")
    }
}

impl Default for McsTable {
    fn default() -> Self {
        Self::default_20mhz()
    }
}

impl McsTable {

    pub fn entries(&self) -> &[McsEntry] {
        &self.entries
    }

    pub fn entry(&self, index: u8) -> &McsEntry {
        &self.entries[index as usize]
    }

    pub fn top(&self) -> &McsEntry {
        self.entries.last().expect("table is non-empty")
    }

    /// PHY rate of a row in bit/s.
    pub fn rate_bps(&self, index: u8) -> f64 {
        self.entry(index).rate_mbps * 1e6
    }

    /// Largest row supported by a single rate, if any.
    pub fn select_single(&self, rate: f64) -> Option<u8> {
        self.entries
            .iter()
            .rev()
            .find(|e| e.required_eff <= rate)
            .map(|e| e.index)
    }
}

/// Group MCS selection: each member picks the largest row its mean spectral
/// efficiency supports, and the group uses the minimum. `None` when some
/// member cannot support even the lowest row.
pub fn select_mcs(rates: &[f64], table: &McsTable) -> Option<u8> {
    let mut group_min: Option<u8> = None;
    for &rate in rates {
        let m = table.select_single(rate)?;
        group_min = Some(match group_min {
            None => m,
            Some(cur) => cur.min(m),
        });
    }
    group_min
}
