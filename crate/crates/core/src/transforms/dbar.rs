use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{cauchy, holomorphic_extension};
use crate::error::{Error, Result};
use crate::grid::{
    area_lp_norm_within, boundary_trace, wirtinger_derivatives, BoundaryFunction, GridFunction,
};

/// Observed defects of a [`solve_dbar`] solution.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DbarResiduals {
    /// `‖∂̄A − a‖_{L²(D_{0.9})}`.
    pub dbar: f64,
    /// `‖tr Re(e^{iθ₀}A) − ψ‖_{L²(T)}`.
    pub boundary: f64,
    /// `|∫_T Im(e^{iθ₀}A) − λ|`.
    pub mean: f64,
}

/// The unique `A` with `∂̄A = a`, `tr Re(e^{iθ₀}A) = ψ` and
/// `∫_T Im(e^{iθ₀}A) |dξ| = λ`.
///
/// `A = C(a) + e^{−iθ₀}Φ` where `Φ` is the holomorphic function with real
/// boundary part `ψ − tr Re(e^{iθ₀}C(a))`, shifted by an imaginary constant
/// to meet the mean condition.
pub fn solve_dbar(
    a: &GridFunction,
    psi: &BoundaryFunction,
    lambda: f64,
    theta0: f64,
) -> Result<(GridFunction, DbarResiduals)> {
    if !psi.is_real(0.0) {
        return Err(Error::NonReal("solve_dbar boundary data"));
    }
    psi.require_unmasked("solve_dbar boundary data")?;
    let g = a.grid();
    if psi.n_theta() != g.n_theta() {
        return Err(Error::GridMismatch(format!(
            "boundary data has {} angles, grid has {}",
            psi.n_theta(),
            g.n_theta()
        )));
    }
    let rot = Complex64::from_polar(1.0, theta0);
    let ca = cauchy(a);
    let tr = boundary_trace(&ca)?.map(|v| v * rot);
    let u = psi.zip_map(&tr, |p, c| Complex64::new(p.re - c.re, 0.0));
    let imag_mean = tr.integral().im;
    let c = (lambda - imag_mean) / (2.0 * PI);
    let phi = holomorphic_extension(&u, g).map(|v| (v + Complex64::new(0.0, c)) * rot.conj());
    let big_a = &ca + &phi;

    let (_, db) = wirtinger_derivatives(&big_a);
    let dbar = area_lp_norm_within(&(&db - a), 2.0, 0.9)?;
    let tr_a = boundary_trace(&big_a)?.map(|v| v * rot);
    let boundary = tr_a
        .zip_map(psi, |x, p| Complex64::new(x.re - p.re, 0.0))
        .lp_norm(2.0);
    let mean = (tr_a.integral().im - lambda).abs();
    Ok((
        big_a,
        DbarResiduals {
            dbar,
            boundary,
            mean,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    fn max_err(f: &GridFunction, exact: impl Fn(Complex64) -> Complex64) -> f64 {
        let g = f.grid();
        let mut e: f64 = 0.0;
        for j in 0..g.n_r() {
            for k in 0..g.n_theta() {
                e = e.max((f.value(j, k) - exact(g.point(j, k))).norm());
            }
        }
        e
    }

    #[test]
    fn closed_form_solutions() {
        let g = make_grid(32, 32).unwrap();
        let zero = GridFunction::zeros(&g);
        let cos = BoundaryFunction::from_real_fn(32, f64::cos);
        let (a, res) = solve_dbar(&zero, &cos, 0.0, 0.0).unwrap();
        assert!(max_err(&a, |z| z) < 1e-14);
        assert!(res.boundary < 1e-13 && res.mean < 1e-13 && res.dbar < 1e-10);

        let one = GridFunction::constant(&g, Complex64::new(1.0, 0.0));
        let nil = BoundaryFunction::constant(32, Complex64::new(0.0, 0.0));
        let (a, res) = solve_dbar(&one, &nil, 0.0, 0.0).unwrap();
        assert!(max_err(&a, |z| z.conj() - z) < 1e-14);
        assert!(res.dbar < 1e-10);

        let (a, _) = solve_dbar(&zero, &nil, 2.0 * PI, 0.0).unwrap();
        assert!(max_err(&a, |_| Complex64::new(0.0, 1.0)) < 1e-14);
    }

    #[test]
    fn rotated_normalization() {
        let g = make_grid(32, 32).unwrap();
        let a = GridFunction::from_fn(&g, |z| z * 0.3 + 0.2);
        let psi = BoundaryFunction::from_real_fn(32, |t| (2.0 * t).sin());
        let (_, res) = solve_dbar(&a, &psi, 1.5, 0.7).unwrap();
        assert!(
            res.boundary < 1e-12 && res.mean < 1e-12 && res.dbar < 1e-8,
            "{res:?}"
        );
    }

    #[test]
    fn rejects_complex_boundary_data() {
        let g = make_grid(8, 4).unwrap();
        let psi = BoundaryFunction::constant(8, Complex64::new(0.0, 1.0));
        assert!(matches!(
            solve_dbar(&GridFunction::zeros(&g), &psi, 0.0, 0.0),
            Err(Error::NonReal(_))
        ));
    }
}
