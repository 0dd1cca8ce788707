//! Receiver pre-processing: CP removal, per-symbol DFT, and data symbol
//! division, producing the grid both sensing pipelines consume.

use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::EchoFrame;
use crate::config::OfdmConfig;
use crate::fft;
use crate::rng::complex_gaussian;
use crate::waveform::DataGrid;
use crate::{Error, Result};

/// M x N pre-processed echo grid. For a noiseless point target with delay
/// k_r and Doppler mu this is
/// `alpha * exp(-j 2 pi n k_r / N) * exp(j 2 pi m T~ mu)`:
/// a single complex tone along each axis.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoGrid {
    values: Vec<Complex64>,
    n_symbols: usize,
    n_subcarriers: usize,
}

impl EchoGrid {
    pub fn from_rows(values: Vec<Complex64>, n_symbols: usize, n_subcarriers: usize) -> Result<Self> {
        if values.len() != n_symbols * n_subcarriers {
            return Err(Error::DimensionMismatch {
                what: "echo grid",
                expected: n_symbols * n_subcarriers,
                got: values.len(),
            });
        }
        Ok(Self {
            values,
            n_symbols,
            n_subcarriers,
        })
    }

    pub fn n_symbols(&self) -> usize {
        self.n_symbols
    }

    pub fn n_subcarriers(&self) -> usize {
        self.n_subcarriers
    }

    pub fn row(&self, m: usize) -> &[Complex64] {
        &self.values[m * self.n_subcarriers..(m + 1) * self.n_subcarriers]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.values[m * self.n_subcarriers + n]
    }
}

/// Strip the cyclic prefix, DFT each symbol, and divide out the known data.
///
/// Division by unit-modulus QPSK symbols leaves both the target amplitude
/// and any noise power unchanged, so the grid SNR equals the subcarrier
/// SNR at the DFT output.
pub fn preprocess(rx: &EchoFrame, data: &DataGrid, config: &OfdmConfig) -> Result<EchoGrid> {
    let n = config.n_subcarriers;
    let q = config.cp_len;
    if rx.frame_len() != n + q || rx.n_symbols() != config.n_symbols {
        return Err(Error::DimensionMismatch {
            what: "echo frame vs config",
            expected: config.n_symbols * (n + q),
            got: rx.values().len(),
        });
    }
    if data.n_subcarriers() != n || data.n_symbols() != config.n_symbols {
        return Err(Error::DimensionMismatch {
            what: "data grid vs config",
            expected: config.n_symbols * n,
            got: data.values().len(),
        });
    }
    let mut values = vec![Complex64::default(); config.n_symbols * n];
    let mut spectrum = vec![Complex64::default(); n];
    for m in 0..config.n_symbols {
        spectrum.copy_from_slice(&rx.row(m)[q..]);
        fft::fft_in_place(&mut spectrum);
        let out = &mut values[m * n..(m + 1) * n];
        for (i, (y, s)) in spectrum.iter().zip(data.row(m)).enumerate() {
            if s.norm_sqr() == 0.0 {
                return Err(Error::ZeroDataSymbol { m, n: i });
            }
            out[i] = y / s;
        }
    }
    Ok(EchoGrid {
        values,
        n_symbols: config.n_symbols,
        n_subcarriers: n,
    })
}

/// Build the ideal noiseless grid for a list of (delay, Doppler, alpha)
/// triples without running the transmit chain. Each target contributes
/// `alpha * exp(-j 2 pi n k_r / N) * exp(j 2 pi m T~ mu)`.
pub fn ideal_grid(targets: &[(usize, f64, Complex64)], config: &OfdmConfig) -> EchoGrid {
    let n = config.n_subcarriers;
    let m_count = config.n_symbols;
    let t_frame = config.frame_duration();
    let mut values = vec![Complex64::default(); m_count * n];
    for &(k_r, mu, alpha) in targets {
        for m in 0..m_count {
            let sym_phase = Complex64::from_polar(
                1.0,
                2.0 * std::f64::consts::PI * m as f64 * t_frame * mu,
            );
            let coeff = alpha * sym_phase;
            let out = &mut values[m * n..(m + 1) * n];
            for (i, v) in out.iter_mut().enumerate() {
                let ang = -2.0 * std::f64::consts::PI * ((i * k_r) % n) as f64 / n as f64;
                *v += coeff * Complex64::from_polar(1.0, ang);
            }
        }
    }
    EchoGrid {
        values,
        n_symbols: m_count,
        n_subcarriers: n,
    }
}

/// Add complex Gaussian noise of per-entry variance `10^(-gamma_db/10)`
/// directly to the grid, i.e. set the grid SNR to `gamma_db` for a
/// unit-reflectivity target. `f64::INFINITY` is a passthrough.
pub fn inject_grid_noise(grid: &EchoGrid, gamma_db: f64, seed: u64) -> EchoGrid {
    if gamma_db == f64::INFINITY {
        return grid.clone();
    }
    let variance = 10f64.powf(-gamma_db / 10.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = grid
        .values
        .iter()
        .map(|v| v + complex_gaussian(&mut rng, variance))
        .collect();
    EchoGrid {
        values,
        n_symbols: grid.n_symbols,
        n_subcarriers: grid.n_subcarriers,
    }
}
