//! OFDM radar sensing in two flavors.
//!
//! A CP-OFDM communication frame doubles as a radar waveform: collect the
//! echo, strip the cyclic prefix, DFT each symbol, divide out the known
//! data, and a 2-D FFT of the result yields a range-Doppler map whose peaks
//! localize targets. This crate implements that classical pipeline and a
//! cheaper variant that first decimates each echo row by the ratio of
//! sub-carrier count to prefix length. The echo only ever occupies that
//! fraction of the band, so the decimated map preserves ambiguity limits,
//! resolution and processing gain while the 2-D FFT shrinks by the same
//! factor.
//!
//! ```
//! use num_complex::Complex64;
//! use ofdm_sensing::prelude::*;
//!
//! let config = OfdmConfig::new(256, 32, 11e-6, 24e9, 16)?;
//! let data = generate_data(&config, 7);
//! let tx = modulate(&data, &config)?;
//! let target = Target::new(9.0, 0.0, Complex64::new(1.0, 0.0));
//! let echo = synthesize_echo(&tx, &[target], &config)?;
//! let grid = preprocess(&echo, &data, &config)?;
//!
//! // Full-rate map.
//! let rdm = fos_rdm(&grid, Window::Rectangular, Window::Rectangular, &config)?;
//! let det = &estimate_fos(&rdm, &config, 1)?[0];
//!
//! // Decimated map: same estimate from an 8x smaller FFT.
//! let spec = design_filter(4, &config)?;
//! let small = dfos_rdm(&decimate_grid(&grid, &spec)?,
//!     Window::Rectangular, Window::Rectangular, &config)?;
//! let det_d = &estimate_dfos(&small, &config, 1)?[0];
//! assert_eq!(det.range_m, det_d.range_m);
//! # Ok::<(), ofdm_sensing::Error>(())
//! ```
//!
//! The `book/` directory of the repository walks through the signal model,
//! the decimation argument and the measurement layer chapter by chapter;
//! its code blocks compile and run as part of `cargo test`.

pub mod channel;
pub mod config;
pub mod decimator;
pub mod dfos;
mod fft;
pub mod fos;
pub mod io;
pub mod metrics;
pub mod preproc;
pub mod rdm;
mod rng;
pub mod waveform;
pub mod window;

pub use config::{OfdmConfig, PROPAGATION_SPEED};
pub use rng::trial_seed;

use thiserror::Error as ThisError;

/// Errors shared across the crate.
#[derive(Debug, ThisError)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("target at {range_m} m has a {delay}-sample delay beyond the cyclic prefix ({cp_len})")]
    DelayBeyondCp {
        range_m: f64,
        delay: usize,
        cp_len: usize,
    },
    #[error("signal is all zeros, snr is undefined")]
    ZeroSignal,
    #[error("noise floor is numerically zero, rdm appears noiseless")]
    NoiselessRdm,
    #[error("requested {requested} peaks but only {found} usable maxima exist")]
    NotEnoughPeaks { requested: usize, found: usize },
    #[error("bin {bin} out of range for {len} bins")]
    BinOutOfRange { bin: usize, len: usize },
    #[error("no -3 dB crossing around the peak")]
    NoHalfPowerCrossing,
    #[error("data symbol at ({m}, {n}) has zero magnitude")]
    ZeroDataSymbol { m: usize, n: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

// The guide's code blocks run as doc-tests so the prose cannot drift from
// the library. mdbook cannot execute snippets against a local crate, so
// the chapters are included here and `cargo test --doc` does the work.
#[cfg(doctest)]
#[doc(hidden)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/signal-model.md")]
    pub mod signal_model {}
    #[doc = include_str!("../../../book/src/preprocessing.md")]
    pub mod preprocessing {}
    #[doc = include_str!("../../../book/src/fft-sensing.md")]
    pub mod fft_sensing {}
    #[doc = include_str!("../../../book/src/decimation.md")]
    pub mod decimation {}
    #[doc = include_str!("../../../book/src/decimated-sensing.md")]
    pub mod decimated_sensing {}
    #[doc = include_str!("../../../book/src/performance.md")]
    pub mod performance {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}

    #[doc = include_str!("../../../README.md")]
    pub mod readme {}
}

/// One-stop imports for the common pipeline.
pub mod prelude {
    pub use crate::channel::{add_awgn, delay_samples, doppler_freq, synthesize_echo, Target};
    pub use crate::config::{OfdmConfig, PROPAGATION_SPEED};
    pub use crate::decimator::{
        decimate_grid, decimate_row, design_filter, direct_decimate_row, DecimatedGrid,
        DecimatorSpec,
    };
    pub use crate::dfos::{dfos_rdm, estimate_dfos, estimate_dfos_guarded, recover_kr};
    pub use crate::fos::{
        ambiguity_limits, estimate_fos, estimate_fos_guarded, fos_rdm, make_window,
        AmbiguityLimits,
    };
    pub use crate::metrics::{complexity_model, mainlobe_width, rdm_snr, ComplexityReport};
    pub use crate::preproc::{ideal_grid, inject_grid_noise, preprocess, EchoGrid};
    pub use crate::rdm::{Detection, RangeMapping, Rdm};
    pub use crate::waveform::{generate_data, modulate, DataGrid, TxFrame};
    pub use crate::window::Window;
    pub use crate::{Error, Result};
}
