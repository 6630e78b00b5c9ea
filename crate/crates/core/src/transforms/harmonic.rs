use std::sync::Arc;

use num_complex::Complex64;

use super::ZERO;
use crate::grid::fourier::{index_of, mode_of};
use crate::grid::{boundary_trace, BoundaryFunction, DiskGrid, GridFunction, ModalField};

fn check_sizes(u: &BoundaryFunction, grid: &DiskGrid) {
    assert_eq!(
        u.n_theta(),
        grid.n_theta(),
        "boundary data and grid disagree on n_theta"
    );
}

/// Harmonic extension `û_n ↦ û_n r^{|n|}`; the outer ring is `u` itself.
pub fn poisson_extend(u: &BoundaryFunction, grid: &Arc<DiskGrid>) -> GridFunction {
    check_sizes(u, grid);
    let nt = grid.n_theta();
    let c = u.fourier();
    let mut modal = ModalField::zeros(grid.n_r(), nt);
    for (j, &r) in grid.radii().iter().enumerate() {
        for (idx, &cn) in c.iter().enumerate() {
            let n = mode_of(idx, nt).unsigned_abs() as i32;
            modal.coeffs[j * nt + idx] = cn * r.powi(n);
        }
    }
    let mut f = GridFunction::from_modal(grid, &modal);
    f.set_ring(grid.boundary_ring_index(), u.values());
    f
}

/// Holomorphic function on the grid whose boundary real part is `Re u`
/// (Nyquist mode excluded) and whose value at the origin is real.
pub fn holomorphic_extension(u: &BoundaryFunction, grid: &Arc<DiskGrid>) -> GridFunction {
    check_sizes(u, grid);
    let nt = grid.n_theta();
    let re = u.re();
    let c = re.fourier();
    let mut modal = ModalField::zeros(grid.n_r(), nt);
    for (j, &r) in grid.radii().iter().enumerate() {
        modal.coeffs[j * nt] = c[0];
        for n in 1..(nt / 2) as i64 {
            modal.coeffs[j * nt + index_of(n, nt)] = c[index_of(n, nt)] * (2.0 * r.powi(n as i32));
        }
    }
    GridFunction::from_modal(grid, &modal)
}

/// Boundary conjugate function: multiplier `−i·sgn(n)`, mean and Nyquist
/// mode removed.
pub fn conjugate_function(psi: &BoundaryFunction) -> BoundaryFunction {
    let nt = psi.n_theta();
    let c = psi.fourier();
    let out = c
        .iter()
        .enumerate()
        .map(|(idx, &cn)| {
            let n = mode_of(idx, nt);
            if n == 0 || 2 * n.unsigned_abs() as usize == nt {
                ZERO
            } else {
                cn * Complex64::new(0.0, -(n.signum() as f64))
            }
        })
        .collect();
    BoundaryFunction::from_fourier(out)
}

/// Harmonic conjugate `v` of a harmonic `u`, normalized by `∫_T v = 0`.
pub fn harmonic_conjugate(u: &GridFunction) -> GridFunction {
    harmonic_conjugate_with_residual(u).0
}

/// As [`harmonic_conjugate`], also returning `max |u − E(tr u)| / max |u|`,
/// which vanishes when `u` is harmonic.
pub fn harmonic_conjugate_with_residual(u: &GridFunction) -> (GridFunction, f64) {
    let g = u.grid();
    let tr = boundary_trace(u).expect("harmonic_conjugate needs an unmasked boundary ring");
    let ext = poisson_extend(&tr, g);
    let scale = u.max_abs().max(f64::MIN_POSITIVE);
    let residual = (u - &ext).max_abs() / scale;
    (poisson_extend(&conjugate_function(&tr), g), residual)
}
