//! Linear operators of the disk: area Cauchy and Beurling transforms, the
//! reflection operator, the Green potential, harmonic extension and
//! conjugation, and the normalized `∂̄` solver.
//!
//! Every kernel is diagonal in the angular Fourier modes, so each transform
//! is a loop over modes in the resolvable band `(-N/2, N/2)` applying a
//! radial integral operator to the mode profile. Output modes that would
//! leave the band are dropped.

mod cauchy;
mod dbar;
mod harmonic;
mod potential;
mod reflect;

pub use cauchy::{
    beurling, cauchy, cauchy_mean_on_disk, cauchy_norm_sq_on_disk, cauchy_renormalized,
};
pub use dbar::{solve_dbar, DbarResiduals};
pub use harmonic::{
    conjugate_function, harmonic_conjugate, harmonic_conjugate_with_residual,
    holomorphic_extension, poisson_extend,
};
pub use potential::green_potential;
pub use reflect::reflect_transform;

use num_complex::Complex64;

use crate::grid::{GridFunction, ModalField};

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Applies `op` to every in-band mode `n` of `h`, writing the result into
/// output mode `n + shift` when that mode is also in band.
pub(crate) fn map_modes(
    h: &GridFunction,
    shift: i64,
    op: impl Fn(i64, &[Complex64]) -> Vec<Complex64>,
) -> GridFunction {
    let g = h.grid();
    let modal = h.modal();
    let mut out = ModalField::zeros(g.n_r(), g.n_theta());
    for n in modal.band() {
        if !modal.in_band(n + shift) {
            continue;
        }
        let profile = modal.profile(n).radial_values;
        out.set_profile(n + shift, &op(n, &profile));
    }
    GridFunction::from_modal(g, &out)
}
