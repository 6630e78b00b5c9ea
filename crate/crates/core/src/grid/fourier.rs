//! Per-ring discrete Fourier transforms.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plans(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(n), p.plan_fft_inverse(n))
    })
}

/// Signed mode number stored at FFT index `idx` (Nyquist maps to `-n/2`).
#[inline]
pub fn mode_of(idx: usize, n: usize) -> i64 {
    if idx < n / 2 {
        idx as i64
    } else {
        idx as i64 - n as i64
    }
}

/// FFT index of signed mode `m`.
#[inline]
pub fn index_of(m: i64, n: usize) -> usize {
    m.rem_euclid(n as i64) as usize
}

/// Nodal samples to coefficients `c_m` with `f(θ_k) = Σ_m c_m e^{i m θ_k}`,
/// applied independently to each contiguous row of length `n`.
pub fn analyze_rows(data: &mut [Complex64], n: usize) {
    let (fwd, _) = plans(n);
    fwd.process(data);
    let scale = 1.0 / n as f64;
    data.iter_mut().for_each(|c| *c *= scale);
}

/// Inverse of [`analyze_rows`].
pub fn synthesize_rows(data: &mut [Complex64], n: usize) {
    let (_, inv) = plans(n);
    inv.process(data);
}
