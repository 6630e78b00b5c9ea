use num_complex::Complex64;

use super::parametrize::ratio;
use super::{damped_picard, SolveReport, SolverConfig};
use crate::error::{Error, Result};
use crate::grid::{boundary_trace, hardy_norm, sobolev_norm, BoundaryFunction, GridFunction};
use crate::similarity::{
    absolute_threshold, exponent_for, phase_quotient, reconstruct, residual_beltrami, Normalization,
};
use crate::transforms::{conjugate_function, holomorphic_extension};

/// Output of [`solve_riesz`].
#[derive(Clone, Debug)]
pub struct RieszSolution {
    pub w: GridFunction,
    /// `Im w_T`, the generalized conjugate of `ψ`.
    pub psi_sharp: BoundaryFunction,
    /// The exponent of `w = e^s F` (real on the circle).
    pub s: GridFunction,
    pub f: GridFunction,
    pub report: SolveReport,
}

/// The holomorphic factor for a given exponent: `Re F_T = e^{−h}ψ`,
/// `Im F_T = (e^{−h}ψ)~ + c₀` with `c₀` chosen so that `∫_T Im w_T = c`.
fn holomorphic_factor(s: &GridFunction, psi: &BoundaryFunction, c: f64) -> Result<GridFunction> {
    let grid = s.grid();
    let h = boundary_trace(s)?.re();
    let e = psi.zip_map(&h, |p, h| Complex64::new((-h.re).exp() * p.re, 0.0));
    let eh = h.map(|h| Complex64::new(h.re.exp(), 0.0));
    let et = conjugate_function(&e);
    let denom = eh.integral().re;
    if !(denom > 0.0) {
        return Err(Error::Degenerate(format!("∫_T e^h = {denom}")));
    }
    let c0 = (c - (&eh * &et).integral().re) / denom;
    // The holomorphic extension of e has boundary values e + i ẽ.
    Ok(holomorphic_extension(&e, grid).map(|v| v + Complex64::new(0.0, c0)))
}

/// `w` with `∂̄w = α w̄`, `Re w_T = ψ` and `∫_T Im w_T |dξ| = c`.
///
/// Alternates between the holomorphic factor `F` built from the current
/// exponent and the update `s = C(β) − R(β)`, `β = α conj(w)/w`.
pub fn solve_riesz(
    alpha: &GridFunction,
    psi: &BoundaryFunction,
    c: f64,
    cfg: &SolverConfig,
) -> Result<RieszSolution> {
    solve_riesz_with_initial(alpha, psi, c, cfg, None)
}

/// As [`solve_riesz`], starting from the exponent `s0` instead of zero.
pub fn solve_riesz_with_initial(
    alpha: &GridFunction,
    psi: &BoundaryFunction,
    c: f64,
    cfg: &SolverConfig,
    s0: Option<&GridFunction>,
) -> Result<RieszSolution> {
    cfg.validate()?;
    alpha.require_unmasked("alpha")?;
    psi.require_unmasked("psi")?;
    if !psi.is_real(0.0) {
        return Err(Error::NonReal("psi"));
    }
    let grid = alpha.grid();
    if psi.n_theta() != grid.n_theta() {
        return Err(Error::GridMismatch(
            "psi and grid disagree on n_theta".into(),
        ));
    }
    let zero = GridFunction::zeros(grid);
    if psi.sup_norm() == 0.0 && c == 0.0 {
        return Ok(RieszSolution {
            w: zero.clone(),
            psi_sharp: BoundaryFunction::constant(grid.n_theta(), Complex64::new(0.0, 0.0)),
            s: zero.clone(),
            f: zero,
            report: SolveReport {
                converged: true,
                damping: cfg.damping,
                ..SolveReport::default()
            },
        });
    }
    let init = s0.cloned().unwrap_or(zero);
    let out = damped_picard(
        init,
        cfg,
        |s| {
            let f = holomorphic_factor(s, psi, c)?;
            let w = reconstruct(s, &f);
            let thr = absolute_threshold(&w, cfg.zero_threshold);
            let beta = alpha.zip_map(&w, |a, w| a * phase_quotient(w, thr));
            Ok(exponent_for(&beta, Normalization::RealOnT))
        },
        |a, b, t| a.zip_map(b, |x, y| x + (y - x) * t),
        |a, b| sobolev_norm(&(a - b), 2.0),
    )?;
    let s = out.state.clone();
    let f = holomorphic_factor(&s, psi, c)?;
    let w = reconstruct(&s, &f);
    let tr = boundary_trace(&w)?;
    let psi_sharp = tr.im();

    let mut report = out.report();
    report.residual_beltrami = residual_beltrami(&w, alpha)?;
    report.boundary_mismatch = tr
        .zip_map(psi, |w, p| Complex64::new(w.re - p.re, 0.0))
        .lp_norm(cfg.p);
    let tr_s = boundary_trace(&s)?;
    report.normalization_defects = vec![
        (psi_sharp.integral().re - c).abs(),
        tr_s.values().iter().fold(0.0, |m, v| m.max(v.im.abs())),
        tr_s.integral().re.abs(),
    ];
    report.measured_constant = ratio(hardy_norm(&w, cfg.p)?, psi.lp_norm(cfg.p) + c.abs());
    Ok(RieszSolution {
        w,
        psi_sharp,
        s,
        f,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn classical_riesz_case() {
        let g = make_grid(32, 32).unwrap();
        let zero = GridFunction::zeros(&g);
        let cos = BoundaryFunction::from_real_fn(32, f64::cos);
        let sol = solve_riesz(&zero, &cos, 0.0, &SolverConfig::default()).unwrap();
        let z = GridFunction::from_fn(&g, |z| z);
        assert!((&sol.w - &z).max_abs() < 1e-13);
        for (v, t) in sol.psi_sharp.values().iter().zip(cos.angles()) {
            assert!((v.re - t.sin()).abs() < 1e-13);
        }
        let nil = BoundaryFunction::constant(32, c(0.0, 0.0));
        let sol = solve_riesz(&zero, &nil, 2.0 * PI, &SolverConfig::default()).unwrap();
        assert!(sol
            .w
            .values()
            .iter()
            .all(|v| (v - c(0.0, 1.0)).norm() < 1e-13));
        let sol = solve_riesz(&zero, &nil, 0.0, &SolverConfig::default()).unwrap();
        assert_eq!(sol.w.max_abs(), 0.0);
    }

    #[test]
    fn manufactured_exponential() {
        let g = make_grid(64, 64).unwrap();
        let half = GridFunction::constant(&g, c(0.5, 0.0));
        let psi = BoundaryFunction::from_real_fn(64, |t| t.cos().exp());
        let sol = solve_riesz(&half, &psi, 0.0, &SolverConfig::default()).unwrap();
        let exact = GridFunction::from_fn(&g, |z| c(z.re.exp(), 0.0));
        let err = (&sol.w - &exact).max_abs();
        assert!(err < 1e-6, "{err} {:?}", sol.report);
    }
}
