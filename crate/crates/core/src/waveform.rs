//! Transmitter side: random QPSK data and CP-OFDM symbol synthesis.

use num_complex::Complex64;
use rand::RngExt;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::OfdmConfig;
use crate::fft;
use crate::{Error, Result};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// The four unit-modulus QPSK points (+-1 +-j)/sqrt(2).
pub const QPSK_ALPHABET: [Complex64; 4] = [
    Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    Complex64::new(-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    Complex64::new(-FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
    Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
];

/// M x N matrix of communication data symbols s_m(n), one row per OFDM symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct DataGrid {
    symbols: Vec<Complex64>,
    n_symbols: usize,
    n_subcarriers: usize,
}

impl DataGrid {
    /// Build from an explicit row-major matrix. Intended for tests and
    /// deterministic pilots; `generate_data` is the usual entry point.
    pub fn from_rows(symbols: Vec<Complex64>, n_symbols: usize, n_subcarriers: usize) -> Result<Self> {
        if symbols.len() != n_symbols * n_subcarriers {
            return Err(Error::DimensionMismatch {
                what: "data grid",
                expected: n_symbols * n_subcarriers,
                got: symbols.len(),
            });
        }
        Ok(Self {
            symbols,
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
        &self.symbols[m * self.n_subcarriers..(m + 1) * self.n_subcarriers]
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.symbols[m * self.n_subcarriers + n]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.symbols
    }
}

/// M x (N+Q) matrix of time-domain CP-OFDM samples, one row per symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct TxFrame {
    samples: Vec<Complex64>,
    n_symbols: usize,
    frame_len: usize,
}

impl TxFrame {
    pub fn n_symbols(&self) -> usize {
        self.n_symbols
    }

    /// Samples per symbol, N + Q.
    pub fn frame_len(&self) -> usize {
        self.frame_len
    }

    pub fn row(&self, m: usize) -> &[Complex64] {
        &self.samples[m * self.frame_len..(m + 1) * self.frame_len]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.samples
    }
}

/// Draw an M x N grid of i.i.d. uniform QPSK symbols. Fully determined by
/// the seed.
pub fn generate_data(config: &OfdmConfig, seed: u64) -> DataGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = config.n_symbols * config.n_subcarriers;
    let symbols = (0..count)
        .map(|_| QPSK_ALPHABET[rng.random_range(0..4)])
        .collect();
    DataGrid {
        symbols,
        n_symbols: config.n_symbols,
        n_subcarriers: config.n_subcarriers,
    }
}

/// Synthesize the CP-OFDM frame from a data grid.
///
/// Each row is the N-point inverse DFT of the data symbols with 1/N scaling,
/// with the last Q samples copied to the front as the cyclic prefix. The CP
/// copy is bitwise, so `frame[m][k] == frame[m][k + N]` holds exactly for
/// `k < Q`.
pub fn modulate(data: &DataGrid, config: &OfdmConfig) -> Result<TxFrame> {
    let n = config.n_subcarriers;
    let q = config.cp_len;
    if data.n_subcarriers != n || data.n_symbols != config.n_symbols {
        return Err(Error::DimensionMismatch {
            what: "data grid vs config",
            expected: config.n_symbols * n,
            got: data.symbols.len(),
        });
    }
    let frame_len = n + q;
    let mut samples = vec![Complex64::default(); config.n_symbols * frame_len];
    let mut body = vec![Complex64::default(); n];
    for m in 0..config.n_symbols {
        body.copy_from_slice(data.row(m));
        fft::ifft_in_place(&mut body);
        let scale = 1.0 / n as f64;
        for v in body.iter_mut() {
            *v *= scale;
        }
        let out = &mut samples[m * frame_len..(m + 1) * frame_len];
        out[..q].copy_from_slice(&body[n - q..]);
        out[q..].copy_from_slice(&body);
    }
    Ok(TxFrame {
        samples,
        n_symbols: config.n_symbols,
        frame_len,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> OfdmConfig {
        OfdmConfig::new(64, 8, 1e-6, 24e9, 4).unwrap()
    }

    fn dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|j| {
                        let ang = -2.0 * std::f64::consts::PI * ((k * j) % n) as f64 / n as f64;
                        x[j] * Complex64::from_polar(1.0, ang)
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let cfg = small_config();
        assert_eq!(generate_data(&cfg, 7), generate_data(&cfg, 7));
        assert_ne!(generate_data(&cfg, 7), generate_data(&cfg, 8));
    }

    #[test]
    fn qpsk_symbols_have_unit_modulus() {
        let cfg = small_config();
        let grid = generate_data(&cfg, 3);
        for s in grid.values() {
            assert!((s.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn grid_dimensions_match_reference_config() {
        let cfg = OfdmConfig::default();
        let grid = generate_data(&cfg, 0);
        assert_eq!(grid.n_symbols(), 256);
        assert_eq!(grid.n_subcarriers(), 1024);
    }

    #[test]
    fn all_ones_data_gives_impulse() {
        let cfg = small_config();
        let n = cfg.n_subcarriers;
        let ones = vec![Complex64::new(1.0, 0.0); cfg.n_symbols * n];
        let grid = DataGrid::from_rows(ones, cfg.n_symbols, n).unwrap();
        let tx = modulate(&grid, &cfg).unwrap();
        let body = &tx.row(0)[cfg.cp_len..];
        assert!((body[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        for v in &body[1..] {
            assert!(v.norm() < 1e-12);
        }
    }

    #[test]
    fn dft_of_body_recovers_data() {
        let cfg = small_config();
        let grid = generate_data(&cfg, 11);
        let tx = modulate(&grid, &cfg).unwrap();
        for m in 0..cfg.n_symbols {
            let spec = dft(&tx.row(m)[cfg.cp_len..]);
            for (a, b) in spec.iter().zip(grid.row(m)) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn circular_shift_adds_linear_phase() {
        // DFT of x((k - l) mod N) must equal s(n) * exp(-j 2 pi l n / N).
        let cfg = small_config();
        let n = cfg.n_subcarriers;
        let grid = generate_data(&cfg, 5);
        let tx = modulate(&grid, &cfg).unwrap();
        let body: Vec<Complex64> = tx.row(0)[cfg.cp_len..].to_vec();
        for l in [1usize, 5, 17, 63] {
            let shifted: Vec<Complex64> = (0..n).map(|k| body[(k + n - l) % n]).collect();
            let spec = dft(&shifted);
            for (j, (a, s)) in spec.iter().zip(grid.row(0)).enumerate() {
                let ang = -2.0 * std::f64::consts::PI * (l * j % n) as f64 / n as f64;
                let expect = s * Complex64::from_polar(1.0, ang);
                assert!((a - expect).norm() < 1e-11, "l={l} bin={j}");
            }
        }
    }

    #[test]
    fn cyclic_prefix_is_bit_exact() {
        let cfg = small_config();
        let tx = modulate(&generate_data(&cfg, 2), &cfg).unwrap();
        for m in 0..cfg.n_symbols {
            let row = tx.row(m);
            for k in 0..cfg.cp_len {
                assert_eq!(row[k], row[k + cfg.n_subcarriers]);
            }
        }
    }

    #[test]
    fn parseval_with_idft_scaling() {
        let cfg = small_config();
        let grid = generate_data(&cfg, 9);
        let tx = modulate(&grid, &cfg).unwrap();
        let n = cfg.n_subcarriers as f64;
        for m in 0..cfg.n_symbols {
            let px: f64 = tx.row(m)[cfg.cp_len..].iter().map(|v| v.norm_sqr()).sum::<f64>() / n;
            let ps: f64 = grid.row(m).iter().map(|v| v.norm_sqr()).sum::<f64>() / n;
            assert!((px - ps / n).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let cfg = small_config();
        let other = OfdmConfig::new(128, 16, 1e-6, 24e9, 4).unwrap();
        let grid = generate_data(&other, 0);
        assert!(matches!(
            modulate(&grid, &cfg),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
