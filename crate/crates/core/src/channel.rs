//! Point-target echo synthesis: integer sample delay, per-symbol Doppler
//! phase stepping, and receiver noise injection.

use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{OfdmConfig, PROPAGATION_SPEED};
use crate::rng::complex_gaussian;
use crate::waveform::TxFrame;
use crate::{Error, Result};

/// A single point scatterer, constant over the M-symbol frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target {
    pub range_m: f64,
    pub velocity_mps: f64,
    /// Complex reflection coefficient alpha.
    pub reflectivity: Complex64,
}

impl Target {
    pub fn new(range_m: f64, velocity_mps: f64, reflectivity: Complex64) -> Self {
        Self {
            range_m,
            velocity_mps,
            reflectivity,
        }
    }

    /// Round-trip delay in samples for this target.
    pub fn delay_samples(&self, config: &OfdmConfig) -> usize {
        delay_samples(self.range_m, config)
    }

    /// Doppler frequency in Hz for this target.
    pub fn doppler_freq(&self, config: &OfdmConfig) -> f64 {
        doppler_freq(self.velocity_mps, config)
    }

    /// A target is usable only while its echo delay fits inside the cyclic
    /// prefix; beyond that the stripped symbol no longer contains a complete
    /// circular shift.
    pub fn validate(&self, config: &OfdmConfig) -> Result<()> {
        if !(self.range_m >= 0.0 && self.range_m.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "target range must be non-negative and finite, got {}",
                self.range_m
            )));
        }
        if !self.velocity_mps.is_finite() {
            return Err(Error::InvalidConfig("target velocity must be finite".into()));
        }
        let k_r = self.delay_samples(config);
        if k_r > config.cp_len {
            return Err(Error::DelayBeyondCp {
                range_m: self.range_m,
                delay: k_r,
                cp_len: config.cp_len,
            });
        }
        Ok(())
    }
}

/// Round-trip sample delay k_r = round(2 r / (c T_s)).
pub fn delay_samples(range_m: f64, config: &OfdmConfig) -> usize {
    (2.0 * range_m / (PROPAGATION_SPEED * config.sample_interval())).round() as usize
}

/// Doppler shift mu = 2 v f_c / c in Hz. Negative for receding targets.
pub fn doppler_freq(velocity_mps: f64, config: &OfdmConfig) -> f64 {
    2.0 * velocity_mps * config.carrier_freq / PROPAGATION_SPEED
}

/// M x (N+Q) matrix of baseband echo samples at the sensing receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoFrame {
    samples: Vec<Complex64>,
    n_symbols: usize,
    frame_len: usize,
}

impl EchoFrame {
    pub fn n_symbols(&self) -> usize {
        self.n_symbols
    }

    pub fn frame_len(&self) -> usize {
        self.frame_len
    }

    pub fn row(&self, m: usize) -> &[Complex64] {
        &self.samples[m * self.frame_len..(m + 1) * self.frame_len]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.samples
    }

    /// Mean per-sample power over the whole frame.
    pub fn mean_power(&self) -> f64 {
        self.samples.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }
}

/// Superimpose the delayed, Doppler-shifted echo of every target.
///
/// Per symbol m and target, the echo is
/// `alpha * g(k) * tx[m][k - k_r] * exp(j 2 pi m T~ mu)` where the gate g
/// zeroes the first k_r samples of the symbol. Echo energy beyond the
/// symbol's last sample is truncated, not folded into the next symbol.
pub fn synthesize_echo(tx: &TxFrame, targets: &[Target], config: &OfdmConfig) -> Result<EchoFrame> {
    let frame_len = config.frame_len();
    if tx.frame_len() != frame_len || tx.n_symbols() != config.n_symbols {
        return Err(Error::DimensionMismatch {
            what: "tx frame vs config",
            expected: config.n_symbols * frame_len,
            got: tx.values().len(),
        });
    }
    for t in targets {
        t.validate(config)?;
    }
    let t_frame = config.frame_duration();
    let mut samples = vec![Complex64::default(); config.n_symbols * frame_len];
    for target in targets {
        let k_r = target.delay_samples(config);
        let mu = target.doppler_freq(config);
        for m in 0..config.n_symbols {
            let phase = Complex64::from_polar(
                1.0,
                2.0 * std::f64::consts::PI * m as f64 * t_frame * mu,
            );
            let coeff = target.reflectivity * phase;
            let tx_row = tx.row(m);
            let out = &mut samples[m * frame_len..(m + 1) * frame_len];
            for k in k_r..frame_len {
                out[k] += coeff * tx_row[k - k_r];
            }
        }
    }
    Ok(EchoFrame {
        samples,
        n_symbols: config.n_symbols,
        frame_len,
    })
}

/// Add circularly-symmetric complex white Gaussian noise so that the ratio
/// of measured mean signal power to per-sample noise variance is `snr_db`.
///
/// `f64::INFINITY` returns the frame unchanged. An all-zero frame has no
/// defined signal power and is rejected.
pub fn add_awgn(frame: &EchoFrame, snr_db: f64, seed: u64) -> Result<EchoFrame> {
    if snr_db == f64::INFINITY {
        return Ok(frame.clone());
    }
    let signal_power = frame.mean_power();
    if signal_power == 0.0 {
        return Err(Error::ZeroSignal);
    }
    let noise_var = signal_power / 10f64.powf(snr_db / 10.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = frame
        .samples
        .iter()
        .map(|v| v + complex_gaussian(&mut rng, noise_var))
        .collect();
    Ok(EchoFrame {
        samples,
        n_symbols: frame.n_symbols,
        frame_len: frame.frame_len,
    })
}
