//! Decimation-based sensing: the small range-Doppler map computed from the
//! decimated grid and the delay recovery that undoes the band-center shift.

use num_complex::Complex64;

use crate::config::OfdmConfig;
use crate::decimator::DecimatedGrid;
use crate::fft;
use crate::fos::resolutions;
use crate::rdm::{find_peaks, to_detections, Detection, RangeMapping, Rdm, DEFAULT_PEAK_GUARD};
use crate::window::{make_window, Window};
use crate::{Error, Result};

/// Windowed 2-D DFT of the decimated grid with explicit coefficients.
///
/// The Q-P+1 valid samples of each row are windowed and zero-padded to a
/// Q-point FFT so delay recovery keeps the bin grid it expects; the Doppler
/// pass is the same M-point FFT as the full-rate map. No normalization.
pub fn dfos_rdm_with(
    dgrid: &DecimatedGrid,
    win_range: &[f64],
    win_doppler: &[f64],
    range_tag: Window,
    doppler_tag: Window,
    config: &OfdmConfig,
) -> Result<Rdm> {
    let n_valid = dgrid.n_samples();
    let m = dgrid.n_symbols();
    let q = dgrid.cp_len();
    if win_range.len() != n_valid {
        return Err(Error::DimensionMismatch {
            what: "range window",
            expected: n_valid,
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
    let mut values = vec![Complex64::default(); m * q];
    for (mi, row_out) in values.chunks_exact_mut(q).enumerate() {
        for ((o, v), w) in row_out.iter_mut().zip(dgrid.row(mi)).zip(win_range) {
            *o = v * *w;
        }
    }
    fft::fft_rows(&mut values, m, q);
    for (mi, w) in win_doppler.iter().enumerate() {
        for v in &mut values[mi * q..(mi + 1) * q] {
            *v *= *w;
        }
    }
    fft::fft_cols(&mut values, m, q);
    let (dr, dv) = resolutions(config);
    Ok(Rdm::new(
        values,
        q,
        m,
        RangeMapping::Decimated,
        dr,
        dv,
        range_tag,
        doppler_tag,
    ))
}

/// Windowed 2-D DFT of the decimated grid, building the windows from their
/// kinds.
pub fn dfos_rdm(
    dgrid: &DecimatedGrid,
    range_window: Window,
    doppler_window: Window,
    config: &OfdmConfig,
) -> Result<Rdm> {
    let wq = make_window(range_window, dgrid.n_samples());
    let wm = make_window(doppler_window, dgrid.n_symbols());
    dfos_rdm_with(dgrid, &wq, &wm, range_window, doppler_window, config)
}

/// Recover the sample delay from the decimated range peak bin.
///
/// The decimated tone sits at frequency -(k_r + Q/2)/Q cycles, so the peak
/// bin satisfies k_r + Q/2 + bin = aQ. Solving on k_r in [0, Q-1]:
/// bins up to Q/2 (inclusive) map to Q/2 - bin, the rest to 3Q/2 - bin.
pub fn recover_kr(peak_bin: usize, q: usize) -> Result<usize> {
    if peak_bin >= q {
        return Err(Error::BinOutOfRange {
            bin: peak_bin,
            len: q,
        });
    }
    if peak_bin <= q / 2 {
        Ok(q / 2 - peak_bin)
    } else {
        Ok(3 * q / 2 - peak_bin)
    }
}

/// Extract the `n_peaks` strongest peaks of a decimated map with the
/// default guard region.
pub fn estimate_dfos(rdm: &Rdm, config: &OfdmConfig, n_peaks: usize) -> Result<Vec<Detection>> {
    estimate_dfos_guarded(rdm, config, n_peaks, DEFAULT_PEAK_GUARD.0, DEFAULT_PEAK_GUARD.1)
}

/// Peak extraction with an explicit guard half-width per axis.
pub fn estimate_dfos_guarded(
    rdm: &Rdm,
    config: &OfdmConfig,
    n_peaks: usize,
    guard_range: usize,
    guard_doppler: usize,
) -> Result<Vec<Detection>> {
    if rdm.n_range() != config.cp_len || rdm.n_doppler() != config.n_symbols {
        return Err(Error::DimensionMismatch {
            what: "rdm vs config",
            expected: config.cp_len * config.n_symbols,
            got: rdm.n_range() * rdm.n_doppler(),
        });
    }
    let peaks = find_peaks(rdm, n_peaks, guard_range, guard_doppler)?;
    Ok(to_detections(rdm, &peaks))
}
