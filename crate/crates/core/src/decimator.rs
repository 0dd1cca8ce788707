//! Bandpass decimation of the pre-processed echo.
//!
//! The echo grid rows occupy only the band [-B/D, 0]; everything else is
//! noise. Each row is therefore anti-alias filtered, downsampled by D and
//! shifted to baseband before sensing. The filter runs as D polyphase
//! branches at the low rate, each branch convolved in the transform domain.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::Fft;

use crate::config::OfdmConfig;
use crate::fft;
use crate::preproc::EchoGrid;
use crate::window::{make_window, Window};
use crate::{Error, Result};

/// Anti-aliasing filter and its polyphase decomposition, fixed at design
/// time and shared read-only by all row decimations.
#[derive(Clone)]
pub struct DecimatorSpec {
    taps_per_branch: usize,
    factor: usize,
    cp_len: usize,
    input_len: usize,
    prototype: Vec<f64>,
    bandpass: Vec<Complex64>,
    branch_taps: Vec<Vec<Complex64>>,
    fft_size: usize,
    branch_spectra: Vec<Vec<Complex64>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for DecimatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DecimatorSpec")
            .field("taps_per_branch", &self.taps_per_branch)
            .field("factor", &self.factor)
            .field("cp_len", &self.cp_len)
            .field("fft_size", &self.fft_size)
            .finish()
    }
}

impl DecimatorSpec {
    /// P, the tap count of each polyphase branch.
    pub fn taps_per_branch(&self) -> usize {
        self.taps_per_branch
    }

    /// D, the decimation factor.
    pub fn factor(&self) -> usize {
        self.factor
    }

    /// Q, samples entering each branch (also the decimated FFT length).
    pub fn cp_len(&self) -> usize {
        self.cp_len
    }

    /// The transform length used for branch filtering.
    pub fn fft_size(&self) -> usize {
        self.fft_size
    }

    /// Valid output samples per row: Q - P + 1.
    pub fn output_len(&self) -> usize {
        self.cp_len - self.taps_per_branch + 1
    }

    /// Real lowpass prototype h_lp, length P*D, unit DC gain.
    pub fn prototype(&self) -> &[f64] {
        &self.prototype
    }

    /// Complex bandpass taps h(l) = h_lp(l) * exp(-j pi l / D).
    pub fn bandpass_taps(&self) -> &[Complex64] {
        &self.bandpass
    }

    /// Taps of branch d: h(d + p D) for p = 0..P.
    pub fn branch(&self, d: usize) -> &[Complex64] {
        &self.branch_taps[d]
    }

    /// Frequency response of the bandpass filter at angular frequency
    /// `omega` (rad/sample).
    pub fn response_at(&self, omega: f64) -> Complex64 {
        self.bandpass
            .iter()
            .enumerate()
            .map(|(l, h)| h * Complex64::from_polar(1.0, -omega * l as f64))
            .sum()
    }

    /// Total noise power transfer, sum of |h(l)|^2. Close to 1/D for a
    /// good filter with unit passband gain.
    pub fn noise_power_factor(&self) -> f64 {
        self.bandpass.iter().map(|h| h.norm_sqr()).sum()
    }
}

/// Design the anti-aliasing filter for decimating by D = N/Q with P taps
/// per polyphase branch.
///
/// The prototype is a Hamming-windowed sinc of length L = P*D with cutoff
/// pi/D, normalized to unit DC gain. Modulating by exp(-j pi l / D) centers
/// the passband on -pi/D, covering exactly the [-2 pi / D, 0] band the echo
/// rows occupy.
pub fn design_filter(taps_per_branch: usize, config: &OfdmConfig) -> Result<DecimatorSpec> {
    let d_factor = config.decimation_factor();
    let q = config.cp_len;
    let n = config.n_subcarriers;
    if taps_per_branch < 1 {
        return Err(Error::InvalidConfig("taps_per_branch must be at least 1".into()));
    }
    let len = taps_per_branch * d_factor;
    if len > n {
        return Err(Error::InvalidConfig(format!(
            "filter length P*D = {len} exceeds the row length N = {n}"
        )));
    }

    let cutoff = std::f64::consts::PI / d_factor as f64;
    let center = (len - 1) as f64 / 2.0;
    let window = make_window(Window::Hamming, len);
    let mut prototype: Vec<f64> = (0..len)
        .map(|l| {
            let x = l as f64 - center;
            let sinc = if x == 0.0 {
                cutoff / std::f64::consts::PI
            } else {
                (cutoff * x).sin() / (std::f64::consts::PI * x)
            };
            window[l] * sinc
        })
        .collect();
    let gain: f64 = prototype.iter().sum();
    for h in prototype.iter_mut() {
        *h /= gain;
    }

    let bandpass: Vec<Complex64> = prototype
        .iter()
        .enumerate()
        .map(|(l, h)| {
            Complex64::from_polar(1.0, -std::f64::consts::PI * l as f64 / d_factor as f64) * h
        })
        .collect();

    let branch_taps: Vec<Vec<Complex64>> = (0..d_factor)
        .map(|d| (0..taps_per_branch).map(|p| bandpass[d + p * d_factor]).collect())
        .collect();

    let fft_size = (taps_per_branch + q - 1).next_power_of_two();
    let fwd = fft::forward_plan(fft_size);
    let inv = fft::inverse_plan(fft_size);
    let branch_spectra = branch_taps
        .iter()
        .map(|taps| {
            let mut buf = vec![Complex64::default(); fft_size];
            buf[..taps.len()].copy_from_slice(taps);
            fwd.process(&mut buf);
            buf
        })
        .collect();

    Ok(DecimatorSpec {
        taps_per_branch,
        factor: d_factor,
        cp_len: q,
        input_len: n,
        prototype,
        bandpass,
        branch_taps,
        fft_size,
        branch_spectra,
        fwd,
        inv,
    })
}

fn check_row_len(row: &[Complex64], spec: &DecimatorSpec) -> Result<()> {
    if row.len() != spec.input_len {
        return Err(Error::DimensionMismatch {
            what: "row vs decimator",
            expected: spec.input_len,
            got: row.len(),
        });
    }
    Ok(())
}

/// Polyphase decimation of one echo row.
///
/// Branch d gathers the samples row[D-1-d + qD], filters them with its own
/// taps through a size-Q~ transform-domain convolution, the branch outputs
/// are summed, the P-1 transient outputs dropped, and the survivors
/// multiplied by (-1)^n to move the band center to zero.
pub fn decimate_row(row: &[Complex64], spec: &DecimatorSpec) -> Result<Vec<Complex64>> {
    check_row_len(row, spec)?;
    let (p, d_factor, q, qt) = (
        spec.taps_per_branch,
        spec.factor,
        spec.cp_len,
        spec.fft_size,
    );
    let mut acc = vec![Complex64::default(); qt];
    let mut buf = vec![Complex64::default(); qt];
    for d in 0..d_factor {
        buf.fill(Complex64::default());
        let base = d_factor - 1 - d;
        for (qi, b) in buf[..q].iter_mut().enumerate() {
            *b = row[base + qi * d_factor];
        }
        spec.fwd.process(&mut buf);
        for (a, (x, h)) in acc.iter_mut().zip(buf.iter().zip(&spec.branch_spectra[d])) {
            *a += x * h;
        }
    }
    spec.inv.process(&mut acc);
    let scale = 1.0 / qt as f64;
    let out = (0..spec.output_len())
        .map(|n_hat| {
            let v = acc[n_hat + p - 1] * scale;
            if n_hat % 2 == 0 {
                v
            } else {
                -v
            }
        })
        .collect();
    Ok(out)
}

/// Reference decimation without the polyphase machinery: run the bandpass
/// filter at full rate, keep every D-th output (the phase at which a branch
/// has consumed exactly Q input samples), drop the same P-1 transients and
/// apply the same (-1)^n shift. Used as the test oracle and as the direct
/// time-domain benchmark arm.
pub fn direct_decimate_row(row: &[Complex64], spec: &DecimatorSpec) -> Result<Vec<Complex64>> {
    check_row_len(row, spec)?;
    let (p, d_factor, q) = (spec.taps_per_branch, spec.factor, spec.cp_len);
    let taps = &spec.bandpass;
    let out = (p - 1..q)
        .map(|qi| {
            let n_full = qi * d_factor + d_factor - 1;
            let mut acc = Complex64::default();
            for (l, h) in taps.iter().enumerate() {
                if l <= n_full {
                    let idx = n_full - l;
                    if idx < row.len() {
                        acc += h * row[idx];
                    }
                }
            }
            let n_hat = qi - (p - 1);
            if n_hat % 2 == 0 {
                acc
            } else {
                -acc
            }
        })
        .collect();
    Ok(out)
}

/// M x (Q-P+1) grid of decimated echo rows.
#[derive(Debug, Clone, PartialEq)]
pub struct DecimatedGrid {
    values: Vec<Complex64>,
    n_symbols: usize,
    n_samples: usize,
    cp_len: usize,
}

impl DecimatedGrid {
    pub fn n_symbols(&self) -> usize {
        self.n_symbols
    }

    /// Valid samples per row, Q - P + 1.
    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    /// Q, the range FFT length the rows zero-pad to.
    pub fn cp_len(&self) -> usize {
        self.cp_len
    }

    pub fn row(&self, m: usize) -> &[Complex64] {
        &self.values[m * self.n_samples..(m + 1) * self.n_samples]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// Decimate every row of the echo grid.
pub fn decimate_grid(grid: &EchoGrid, spec: &DecimatorSpec) -> Result<DecimatedGrid> {
    let n_out = spec.output_len();
    let mut values = Vec::with_capacity(grid.n_symbols() * n_out);
    for m in 0..grid.n_symbols() {
        values.extend(decimate_row(grid.row(m), spec)?);
    }
    Ok(DecimatedGrid {
        values,
        n_symbols: grid.n_symbols(),
        n_samples: n_out,
        cp_len: spec.cp_len,
    })
}
