//! FFT-based OFDM sensing: the windowed two-dimensional DFT of the
//! pre-processed echo and peak-based range/velocity estimation.

use num_complex::Complex64;

use crate::config::{OfdmConfig, PROPAGATION_SPEED};
use crate::fft;
use crate::preproc::EchoGrid;
use crate::rdm::{find_peaks, to_detections, Detection, RangeMapping, Rdm, DEFAULT_PEAK_GUARD};
use crate::window::Window;
use crate::{Error, Result};

pub use crate::window::make_window;

/// Closed-form ambiguity limits and resolutions of the sensing system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbiguityLimits {
    /// Maximum unambiguous range, c Q / (2 B), in meters.
    pub max_range_m: f64,
    /// Maximum unambiguous speed, lambda / (4 T~), in m/s (symmetric).
    pub max_velocity_mps: f64,
    /// Range resolution c / (2 B) in meters.
    pub range_resolution_m: f64,
    /// Velocity resolution lambda / (2 T~ M) in m/s.
    pub velocity_resolution_mps: f64,
}

/// The four closed-form limits for a configuration. Both sensing pipelines
/// share them; decimation changes neither ambiguity nor resolution.
pub fn ambiguity_limits(config: &OfdmConfig) -> AmbiguityLimits {
    let b = config.bandwidth();
    let lambda = config.wavelength();
    let t_frame = config.frame_duration();
    AmbiguityLimits {
        max_range_m: PROPAGATION_SPEED * config.cp_len as f64 / (2.0 * b),
        max_velocity_mps: lambda / (4.0 * t_frame),
        range_resolution_m: PROPAGATION_SPEED / (2.0 * b),
        velocity_resolution_mps: lambda / (2.0 * t_frame * config.n_symbols as f64),
    }
}

pub(crate) fn resolutions(config: &OfdmConfig) -> (f64, f64) {
    let lim = ambiguity_limits(config);
    (lim.range_resolution_m, lim.velocity_resolution_mps)
}

/// Windowed 2-D DFT of the echo grid with explicit window coefficients:
/// an N-point pass along sub-carriers (range) followed by an M-point pass
/// along symbols (Doppler), with no normalization on either transform.
pub fn fos_rdm_with(
    grid: &EchoGrid,
    win_range: &[f64],
    win_doppler: &[f64],
    range_tag: Window,
    doppler_tag: Window,
    config: &OfdmConfig,
) -> Result<Rdm> {
    let n = grid.n_subcarriers();
    let m = grid.n_symbols();
    if win_range.len() != n {
        return Err(Error::DimensionMismatch {
            what: "range window",
            expected: n,
            got: win_range.len(),
        });
    }
    if win_doppler.len() != m {
        return Err(Error::DimensionMismatch {
            what: "doppler window",
            expected: m,
            got: win_doppler.len(),
        });
    }
    let mut values = vec![Complex64::default(); m * n];
    for (mi, row_out) in values.chunks_exact_mut(n).enumerate() {
        for ((o, v), w) in row_out.iter_mut().zip(grid.row(mi)).zip(win_range) {
            *o = v * *w;
        }
    }
    fft::fft_rows(&mut values, m, n);
    for (mi, w) in win_doppler.iter().enumerate() {
        for v in &mut values[mi * n..(mi + 1) * n] {
            *v *= *w;
        }
    }
    fft::fft_cols(&mut values, m, n);
    let (dr, dv) = resolutions(config);
    Ok(Rdm::new(
        values,
        n,
        m,
        RangeMapping::FullRate,
        dr,
        dv,
        range_tag,
        doppler_tag,
    ))
}

/// Windowed 2-D DFT of the echo grid, building the window coefficients
/// from their kinds.
pub fn fos_rdm(
    grid: &EchoGrid,
    range_window: Window,
    doppler_window: Window,
    config: &OfdmConfig,
) -> Result<Rdm> {
    let wn = make_window(range_window, grid.n_subcarriers());
    let wm = make_window(doppler_window, grid.n_symbols());
    fos_rdm_with(grid, &wn, &wm, range_window, doppler_window, config)
}

/// Extract the `n_peaks` strongest peaks and convert them to range and
/// velocity estimates with the default guard region.
pub fn estimate_fos(rdm: &Rdm, config: &OfdmConfig, n_peaks: usize) -> Result<Vec<Detection>> {
    estimate_fos_guarded(rdm, config, n_peaks, DEFAULT_PEAK_GUARD.0, DEFAULT_PEAK_GUARD.1)
}

/// Peak extraction with an explicit guard half-width per axis.
pub fn estimate_fos_guarded(
    rdm: &Rdm,
    config: &OfdmConfig,
    n_peaks: usize,
    guard_range: usize,
    guard_doppler: usize,
) -> Result<Vec<Detection>> {
    if rdm.n_range() != config.n_subcarriers || rdm.n_doppler() != config.n_symbols {
        return Err(Error::DimensionMismatch {
            what: "rdm vs config",
            expected: config.n_subcarriers * config.n_symbols,
            got: rdm.n_range() * rdm.n_doppler(),
        });
    }
    let peaks = find_peaks(rdm, n_peaks, guard_range, guard_doppler)?;
    Ok(to_detections(rdm, &peaks))
}
