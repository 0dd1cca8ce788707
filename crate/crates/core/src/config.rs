//! System constants for a CP-OFDM sensing frame.

use crate::{Error, Result};

/// Microwave propagation speed in m/s.
pub const PROPAGATION_SPEED: f64 = 3.0e8;

/// OFDM system parameters shared by every stage of the sensing chain.
///
/// All remaining quantities (sample interval, bandwidth, frame duration,
/// decimation factor, wavelength) are pure functions of these five fields
/// and are exposed as methods rather than stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OfdmConfig {
    /// Number of sub-carriers per symbol (N). Power of two.
    pub n_subcarriers: usize,
    /// Cyclic prefix length in samples (Q). Power of two, divides N.
    pub cp_len: usize,
    /// Sub-carrier duration T in seconds (without the cyclic prefix).
    pub symbol_duration: f64,
    /// Carrier frequency in Hz.
    pub carrier_freq: f64,
    /// Number of OFDM symbols per coherent processing interval (M).
    pub n_symbols: usize,
}

impl OfdmConfig {
    pub fn new(
        n_subcarriers: usize,
        cp_len: usize,
        symbol_duration: f64,
        carrier_freq: f64,
        n_symbols: usize,
    ) -> Result<Self> {
        let cfg = Self {
            n_subcarriers,
            cp_len,
            symbol_duration,
            carrier_freq,
            n_symbols,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.n_subcarriers.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "n_subcarriers must be a power of two, got {}",
                self.n_subcarriers
            )));
        }
        if !self.cp_len.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "cp_len must be a power of two, got {}",
                self.cp_len
            )));
        }
        if self.cp_len >= self.n_subcarriers {
            return Err(Error::InvalidConfig(format!(
                "cp_len ({}) must be smaller than n_subcarriers ({})",
                self.cp_len, self.n_subcarriers
            )));
        }
        if !self.n_subcarriers.is_multiple_of(self.cp_len) {
            return Err(Error::InvalidConfig(format!(
                "n_subcarriers ({}) must be divisible by cp_len ({})",
                self.n_subcarriers, self.cp_len
            )));
        }
        if !(self.symbol_duration > 0.0 && self.symbol_duration.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "symbol_duration must be positive and finite, got {}",
                self.symbol_duration
            )));
        }
        if !(self.carrier_freq > 0.0 && self.carrier_freq.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "carrier_freq must be positive and finite, got {}",
                self.carrier_freq
            )));
        }
        if self.n_symbols == 0 {
            return Err(Error::InvalidConfig("n_symbols must be at least 1".into()));
        }
        Ok(())
    }

    /// Sample interval T_s = T/N in seconds.
    pub fn sample_interval(&self) -> f64 {
        self.symbol_duration / self.n_subcarriers as f64
    }

    /// Occupied bandwidth B = N/T = 1/T_s in Hz.
    pub fn bandwidth(&self) -> f64 {
        self.n_subcarriers as f64 / self.symbol_duration
    }

    /// Duration of a full CP-OFDM symbol, T + Q*T_s, in seconds.
    pub fn frame_duration(&self) -> f64 {
        self.symbol_duration + self.cp_len as f64 * self.sample_interval()
    }

    /// Decimation factor D = N/Q.
    pub fn decimation_factor(&self) -> usize {
        self.n_subcarriers / self.cp_len
    }

    /// Carrier wavelength in meters.
    pub fn wavelength(&self) -> f64 {
        PROPAGATION_SPEED / self.carrier_freq
    }

    /// Samples per CP-OFDM symbol, N + Q.
    pub fn frame_len(&self) -> usize {
        self.n_subcarriers + self.cp_len
    }
}

/// The 24 GHz automotive-style reference system: 1024 sub-carriers,
/// 11 us symbols, 128-sample cyclic prefix, 256 symbols per frame.
impl Default for OfdmConfig {
    fn default() -> Self {
        Self {
            n_subcarriers: 1024,
            cp_len: 128,
            symbol_duration: 11e-6,
            carrier_freq: 24e9,
            n_symbols: 256,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities_of_reference_config() {
        let cfg = OfdmConfig::default();
        assert!((cfg.sample_interval() - 1.07421875e-8).abs() < 1e-20);
        assert!((cfg.bandwidth() - 93.090909e6).abs() < 1e1);
        assert!((cfg.frame_duration() - 12.375e-6).abs() < 1e-18);
        assert_eq!(cfg.decimation_factor(), 8);
        assert!((cfg.wavelength() - 0.0125).abs() < 1e-15);
        assert_eq!(cfg.frame_len(), 1152);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(OfdmConfig::new(1000, 128, 11e-6, 24e9, 1).is_err());
        assert!(OfdmConfig::new(1024, 100, 11e-6, 24e9, 1).is_err());
        assert!(OfdmConfig::new(1024, 1024, 11e-6, 24e9, 1).is_err());
        assert!(OfdmConfig::new(1024, 2048, 11e-6, 24e9, 1).is_err());
        assert!(OfdmConfig::new(1024, 128, 0.0, 24e9, 1).is_err());
        assert!(OfdmConfig::new(1024, 128, 11e-6, -1.0, 1).is_err());
        assert!(OfdmConfig::new(1024, 128, 11e-6, 24e9, 0).is_err());
    }

    #[test]
    fn accepts_all_power_of_two_ratios() {
        for q in [64usize, 128, 256, 512] {
            let cfg = OfdmConfig::new(1024, q, 11e-6, 24e9, 4).unwrap();
            assert_eq!(cfg.decimation_factor() * q, 1024);
        }
    }
}
