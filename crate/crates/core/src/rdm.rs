//! Range-Doppler matrix container and peak extraction.

use num_complex::Complex64;

use crate::window::Window;
use crate::{Error, Result};

/// How a range bin index maps back to a sample delay.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeMapping {
    /// Full-rate map over N bins: delay k_r appears at bin (N - k_r) mod N.
    FullRate,
    /// Decimated map over Q bins: the tone lands where
    /// k_r + Q/2 + bin is a multiple of Q.
    Decimated,
}

/// Complex range-Doppler matrix plus the metadata needed to convert bin
/// indices to meters and m/s. Stored row-major with range as the fast axis:
/// `values[b * n_range + k]`.
#[derive(Debug, Clone)]
pub struct Rdm {
    values: Vec<Complex64>,
    n_range: usize,
    n_doppler: usize,
    mapping: RangeMapping,
    range_resolution_m: f64,
    velocity_resolution_mps: f64,
    range_window: Window,
    doppler_window: Window,
}

impl Rdm {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        values: Vec<Complex64>,
        n_range: usize,
        n_doppler: usize,
        mapping: RangeMapping,
        range_resolution_m: f64,
        velocity_resolution_mps: f64,
        range_window: Window,
        doppler_window: Window,
    ) -> Self {
        debug_assert_eq!(values.len(), n_range * n_doppler);
        Self {
            values,
            n_range,
            n_doppler,
            mapping,
            range_resolution_m,
            velocity_resolution_mps,
            range_window,
            doppler_window,
        }
    }

    pub fn n_range(&self) -> usize {
        self.n_range
    }

    pub fn n_doppler(&self) -> usize {
        self.n_doppler
    }

    pub fn mapping(&self) -> RangeMapping {
        self.mapping
    }

    pub fn range_window(&self) -> Window {
        self.range_window
    }

    pub fn doppler_window(&self) -> Window {
        self.doppler_window
    }

    /// Meters per unit of sample delay (the range resolution c/(2B)).
    pub fn range_resolution_m(&self) -> f64 {
        self.range_resolution_m
    }

    /// m/s per Doppler bin (the velocity resolution lambda/(2 T~ M)).
    pub fn velocity_resolution_mps(&self) -> f64 {
        self.velocity_resolution_mps
    }

    pub fn value(&self, range_bin: usize, doppler_bin: usize) -> Complex64 {
        self.values[doppler_bin * self.n_range + range_bin]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// Sample delay recovered from a range bin.
    pub fn delay_at_bin(&self, range_bin: usize) -> usize {
        debug_assert!(range_bin < self.n_range);
        match self.mapping {
            RangeMapping::FullRate => (self.n_range - range_bin) % self.n_range,
            RangeMapping::Decimated => crate::dfos::recover_kr(range_bin, self.n_range)
                .expect("bin index checked against n_range"),
        }
    }

    /// Range in meters recovered from a range bin.
    pub fn range_at_bin(&self, range_bin: usize) -> f64 {
        self.delay_at_bin(range_bin) as f64 * self.range_resolution_m
    }

    /// Signed Doppler bin: indices above M/2 alias to negative velocities.
    pub fn signed_doppler_bin(&self, doppler_bin: usize) -> i64 {
        debug_assert!(doppler_bin < self.n_doppler);
        if doppler_bin <= self.n_doppler / 2 {
            doppler_bin as i64
        } else {
            doppler_bin as i64 - self.n_doppler as i64
        }
    }

    /// Velocity in m/s recovered from a Doppler bin.
    pub fn velocity_at_bin(&self, doppler_bin: usize) -> f64 {
        self.signed_doppler_bin(doppler_bin) as f64 * self.velocity_resolution_mps
    }
}

/// One extracted peak with its physical interpretation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub range_bin: usize,
    /// Unsigned Doppler bin index in [0, M).
    pub doppler_bin: usize,
    /// Signed Doppler bin in [-M/2, M/2].
    pub doppler_bin_signed: i64,
    pub range_m: f64,
    pub velocity_mps: f64,
    pub peak_mag: f64,
}

/// Default guard half-widths (range, Doppler) used when suppressing the
/// neighborhood of an accepted peak. Kept tight enough that targets one
/// resolution cell under 4 bins apart survive as separate detections.
pub const DEFAULT_PEAK_GUARD: (usize, usize) = (2, 2);

/// Greedy peak extraction: repeatedly take the global maximum of the
/// magnitude map and zero a rectangular guard region (wrapping at the
/// edges, since both axes are circular) around each accepted peak.
pub(crate) fn find_peaks(
    rdm: &Rdm,
    n_peaks: usize,
    guard_range: usize,
    guard_doppler: usize,
) -> Result<Vec<(usize, usize, f64)>> {
    let mut mags = rdm.magnitudes();
    let (n_range, n_doppler) = (rdm.n_range, rdm.n_doppler);
    let mut peaks = Vec::with_capacity(n_peaks);
    for _ in 0..n_peaks {
        let (mut best_idx, mut best) = (0usize, 0.0f64);
        for (i, &m) in mags.iter().enumerate() {
            if m > best {
                best = m;
                best_idx = i;
            }
        }
        if best <= 0.0 {
            return Err(Error::NotEnoughPeaks {
                requested: n_peaks,
                found: peaks.len(),
            });
        }
        let (k, b) = (best_idx % n_range, best_idx / n_range);
        peaks.push((k, b, best));
        for db in -(guard_doppler as i64)..=guard_doppler as i64 {
            let bb = (b as i64 + db).rem_euclid(n_doppler as i64) as usize;
            for dk in -(guard_range as i64)..=guard_range as i64 {
                let kk = (k as i64 + dk).rem_euclid(n_range as i64) as usize;
                mags[bb * n_range + kk] = 0.0;
            }
        }
    }
    Ok(peaks)
}

/// Turn raw peak coordinates into physical detections using the map's own
/// axis metadata.
pub(crate) fn to_detections(rdm: &Rdm, peaks: &[(usize, usize, f64)]) -> Vec<Detection> {
    peaks
        .iter()
        .map(|&(k, b, mag)| Detection {
            range_bin: k,
            doppler_bin: b,
            doppler_bin_signed: rdm.signed_doppler_bin(b),
            range_m: rdm.range_at_bin(k),
            velocity_mps: rdm.velocity_at_bin(b),
            peak_mag: mag,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_rdm(n_range: usize, n_doppler: usize, entries: &[(usize, usize, f64)]) -> Rdm {
        let mut values = vec![Complex64::default(); n_range * n_doppler];
        for &(k, b, mag) in entries {
            values[b * n_range + k] = Complex64::new(mag, 0.0);
        }
        Rdm::new(
            values,
            n_range,
            n_doppler,
            RangeMapping::FullRate,
            1.0,
            1.0,
            Window::Rectangular,
            Window::Rectangular,
        )
    }

    #[test]
    fn picks_peaks_in_magnitude_order() {
        let rdm = toy_rdm(16, 8, &[(3, 1, 5.0), (10, 6, 9.0), (8, 2, 7.0)]);
        let peaks = find_peaks(&rdm, 3, 1, 1).unwrap();
        assert_eq!(peaks[0].0, 10);
        assert_eq!(peaks[1].0, 8);
        assert_eq!(peaks[2].0, 3);
    }

    #[test]
    fn guard_region_suppresses_neighbors_with_wrap() {
        // A shoulder one bin away from the main peak, wrapping the range axis.
        let rdm = toy_rdm(16, 4, &[(0, 0, 10.0), (15, 0, 9.0), (5, 2, 3.0)]);
        let peaks = find_peaks(&rdm, 2, 2, 1).unwrap();
        assert_eq!((peaks[0].0, peaks[0].1), (0, 0));
        // (15, 0) is inside the wrapped guard, so the next peak is (5, 2).
        assert_eq!((peaks[1].0, peaks[1].1), (5, 2));
    }

    #[test]
    fn too_many_peaks_is_an_error() {
        let rdm = toy_rdm(8, 4, &[(1, 1, 2.0)]);
        let err = find_peaks(&rdm, 3, 1, 1).unwrap_err();
        assert!(matches!(err, Error::NotEnoughPeaks { found: 1, .. }));
    }

    #[test]
    fn signed_doppler_maps_upper_half_negative() {
        let rdm = toy_rdm(8, 8, &[(0, 0, 1.0)]);
        assert_eq!(rdm.signed_doppler_bin(0), 0);
        assert_eq!(rdm.signed_doppler_bin(4), 4); // M/2 inclusive
        assert_eq!(rdm.signed_doppler_bin(5), -3);
        assert_eq!(rdm.signed_doppler_bin(7), -1);
    }

    #[test]
    fn full_rate_delay_mapping_wraps_bin_zero() {
        let rdm = toy_rdm(8, 2, &[(0, 0, 1.0)]);
        assert_eq!(rdm.delay_at_bin(0), 0);
        assert_eq!(rdm.delay_at_bin(7), 1);
        assert_eq!(rdm.delay_at_bin(1), 7);
    }
}
