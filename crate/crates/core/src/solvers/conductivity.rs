use num_complex::Complex64;

use super::{solve_riesz, SolveReport, SolverConfig};
use crate::error::{Error, Result};
use crate::grid::{
    area_lp_norm_within, boundary_trace, wirtinger_derivatives, BoundaryFunction, GridFunction,
};
use crate::similarity::RESIDUAL_RADIUS;

/// Output of [`solve_conductivity`].
#[derive(Clone, Debug)]
pub struct ConductivitySolution {
    pub u: GridFunction,
    /// Conjugate flux potential with `∂_x v = −σ ∂_y u`, `∂_y v = σ ∂_x u`.
    pub v: GridFunction,
    /// `σ^{1/2} u + i σ^{−1/2} v`.
    pub w: GridFunction,
    pub report: SolveReport,
}

/// `‖div(σ∇u)‖_{L²(D_{0.9})}` through `div(σ∇u) = 4 Re ∂(σ ∂̄u)`.
pub fn conductivity_residual(sigma: &GridFunction, u: &GridFunction) -> Result<f64> {
    sigma.check_grid(u)?;
    let (_, dbu) = wirtinger_derivatives(&u.re());
    let (d, _) = wirtinger_derivatives(&(sigma * &dbu));
    area_lp_norm_within(
        &d.map(|v| Complex64::new(4.0 * v.re, 0.0)),
        2.0,
        RESIDUAL_RADIUS,
    )
}

/// Solves `div(σ∇u) = 0` with `u = ψ` on the circle.
///
/// With `α = ∂̄ log σ^{1/2}`, `w = σ^{1/2}u + iσ^{−1/2}v` solves
/// `∂̄w = α w̄`; it is found by [`solve_riesz`] with boundary data
/// `σ_T^{1/2} ψ` and zero mean flux.
pub fn solve_conductivity(
    sigma: &GridFunction,
    psi: &BoundaryFunction,
    cfg: &SolverConfig,
) -> Result<ConductivitySolution> {
    if sigma
        .values()
        .iter()
        .any(|v| v.is_finite() && !(v.re > 0.0))
    {
        return Err(Error::NonPositive("sigma"));
    }
    if sigma.values().iter().any(|v| v.is_finite() && v.im != 0.0) {
        return Err(Error::NonReal("sigma"));
    }
    let root = sigma.map(|v| Complex64::new(v.re.sqrt(), 0.0));
    let half_log = sigma.map(|v| Complex64::new(0.5 * v.re.ln(), 0.0));
    let (_, alpha) = wirtinger_derivatives(&half_log);
    let root_t = boundary_trace(&root)?;
    let data = psi.zip_map(&root_t, |p, r| Complex64::new(p.re * r.re, 0.0));
    let sol = solve_riesz(&alpha, &data, 0.0, cfg)?;
    let w = sol.w;
    let u = w.zip_map(&root, |w, r| Complex64::new(w.re / r.re, 0.0));
    let v = w.zip_map(&root, |w, r| Complex64::new(w.im * r.re, 0.0));

    let mut report = sol.report;
    let scale = area_lp_norm_within(&u, 2.0, RESIDUAL_RADIUS)?;
    let pde = conductivity_residual(sigma, &u)?;
    let weighted = boundary_trace(&(&u * &root))?
        .zip_map(&data, |a, b| a - b)
        .lp_norm(cfg.p);
    report.boundary_mismatch = weighted;
    report
        .normalization_defects
        .push(if scale > 0.0 { pde / scale } else { pde });
    Ok(ConductivitySolution { u, v, w, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_conductivities() {
        let g = make_grid(32, 32).unwrap();
        let cos = BoundaryFunction::from_real_fn(32, f64::cos);
        for s in [1.0, 4.0] {
            let sigma = GridFunction::constant(&g, c(s, 0.0));
            let sol = solve_conductivity(&sigma, &cos, &SolverConfig::default()).unwrap();
            for j in 0..32 {
                for k in 0..32 {
                    let z = g.point(j, k);
                    assert!((sol.u.value(j, k).re - z.re).abs() < 1e-12);
                    assert!((sol.v.value(j, k).re - s * z.im).abs() < 1e-12);
                }
            }
        }
        let bad = GridFunction::constant(&g, c(-1.0, 0.0));
        assert!(solve_conductivity(&bad, &cos, &SolverConfig::default()).is_err());
    }

    #[test]
    fn residual_examples() {
        let g = make_grid(64, 64).unwrap();
        let one = GridFunction::constant(&g, c(1.0, 0.0));
        let x = GridFunction::from_fn(&g, |z| c(z.re, 0.0));
        assert!(conductivity_residual(&one, &x).unwrap() < 1e-8);
        let r2 = GridFunction::from_fn(&g, |z| c(z.norm_sqr(), 0.0));
        let r = conductivity_residual(&one, &r2).unwrap();
        assert!((r - 4.0 * (0.81 * std::f64::consts::PI).sqrt()).abs() < 1e-6);
    }
}
