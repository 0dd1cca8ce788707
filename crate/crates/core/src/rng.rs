//! Seeded noise generation shared by the channel and grid noise paths.

use num_complex::Complex64;
use rand::{Rng, RngExt};

/// One circularly-symmetric complex Gaussian draw with E|z|^2 = `variance`.
pub(crate) fn complex_gaussian<R: Rng>(rng: &mut R, variance: f64) -> Complex64 {
    // Box-Muller on the magnitude/phase form.
    let u1: f64 = rng.random();
    let u2: f64 = rng.random();
    let radius = (-variance * (1.0 - u1).ln()).sqrt();
    let angle = 2.0 * std::f64::consts::PI * u2;
    Complex64::from_polar(radius, angle)
}

/// Mix a base seed with a trial index so per-trial streams are independent
/// but reproducible. SplitMix64 finalizer.
pub fn trial_seed(base: u64, trial: u64) -> u64 {
    let mut z = base ^ trial.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
