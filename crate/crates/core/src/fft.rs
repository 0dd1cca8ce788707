//! Thin wrappers over rustfft with per-thread plan caching.
//!
//! All transforms here are unnormalized in both directions; callers apply
//! whatever scaling their definition requires.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn forward_plan(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len))
}

pub(crate) fn inverse_plan(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len))
}

/// In-place forward DFT, no scaling.
pub(crate) fn fft_in_place(data: &mut [Complex64]) {
    forward_plan(data.len()).process(data);
}

/// In-place inverse DFT, no scaling (missing the usual 1/N).
pub(crate) fn ifft_in_place(data: &mut [Complex64]) {
    inverse_plan(data.len()).process(data);
}

/// Forward DFT over each length-`n_cols` row of a row-major matrix.
pub(crate) fn fft_rows(values: &mut [Complex64], n_rows: usize, n_cols: usize) {
    debug_assert_eq!(values.len(), n_rows * n_cols);
    let plan = forward_plan(n_cols);
    for row in values.chunks_exact_mut(n_cols) {
        plan.process(row);
    }
}

/// Forward DFT down each column of a row-major matrix.
pub(crate) fn fft_cols(values: &mut [Complex64], n_rows: usize, n_cols: usize) {
    debug_assert_eq!(values.len(), n_rows * n_cols);
    let plan = forward_plan(n_rows);
    let mut scratch = vec![Complex64::default(); n_rows];
    for col in 0..n_cols {
        for (r, s) in scratch.iter_mut().enumerate() {
            *s = values[r * n_cols + col];
        }
        plan.process(&mut scratch);
        for (r, s) in scratch.iter().enumerate() {
            values[r * n_cols + col] = *s;
        }
    }
}
