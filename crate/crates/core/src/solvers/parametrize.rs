use num_complex::Complex64;

use super::{damped_picard, SolveReport, SolverConfig};
use crate::error::{Error, Result};
use crate::grid::{
    area_lp_norm, boundary_trace, sobolev_norm, wirtinger_derivatives, BoundaryFunction,
    GridFunction,
};
use crate::similarity::{absolute_threshold, phase_quotient, reconstruct, residual_beltrami};
use crate::transforms::{cauchy, conjugate_function, green_potential, poisson_extend, solve_dbar};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `G_α(φ) = P(4 Im ∂(α e^{−2iφ}))` for real `φ`.
pub fn g_alpha(alpha: &GridFunction, phi: &GridFunction) -> GridFunction {
    let rotated = alpha.zip_map(phi, |a, p| a * (I * (-2.0 * p.re)).exp());
    let (d, _) = wirtinger_derivatives(&rotated);
    green_potential(&d.map(|v| Complex64::new(4.0 * v.im, 0.0)))
}

fn check_inputs(alpha: &GridFunction, f: &GridFunction, psi: &BoundaryFunction) -> Result<()> {
    alpha.check_grid(f)?;
    alpha.require_unmasked("alpha")?;
    f.require_unmasked("F")?;
    if f.max_abs() == 0.0 {
        return Err(Error::ZeroFunction("F"));
    }
    if !psi.is_real(0.0) {
        return Err(Error::NonReal("psi"));
    }
    if psi.n_theta() != alpha.grid().n_theta() {
        return Err(Error::GridMismatch(
            "psi and grid disagree on n_theta".into(),
        ));
    }
    Ok(())
}

/// `α conj(F)/F` with the zero-threshold convention.
fn twisted(alpha: &GridFunction, f: &GridFunction, rel: f64) -> GridFunction {
    let thr = absolute_threshold(f, rel);
    alpha.zip_map(f, |a, f| a * phase_quotient(f, thr))
}

/// Solves the reduced problem `∂̄s = β e^{s̄ − s}`, `Im tr s = 0`,
/// `∫_T Re s = 0` by iterating `φ ↦ G_β(φ)` on `φ = Im s`.
pub(crate) fn solve_reduced_imag(
    beta: &GridFunction,
    phi0: GridFunction,
    cfg: &SolverConfig,
) -> Result<(GridFunction, GridFunction, super::Outcome<()>)> {
    let out = damped_picard(
        phi0,
        cfg,
        |phi| Ok(g_alpha(beta, phi)),
        |a, b, t| a.zip_map(b, |x, y| x + (y - x) * t),
        |a, b| sobolev_norm(&(a - b), 2.0),
    )?;
    let phi = out.state;
    let g = beta.zip_map(&phi, |b, p| b * (I * (-2.0 * p.re)).exp());
    let s = assemble_from_phi(&g, &phi)?;
    Ok((
        s,
        phi,
        super::Outcome {
            state: (),
            history: out.history,
            damping: out.damping,
        },
    ))
}

/// `s = φ₁ + iφ` with `φ₁ = Re C(g) + v`, `v` the harmonic conjugate of the
/// harmonic function with trace `tr Im C(g) − tr φ`, shifted so that
/// `∫_T φ₁ = 0`.
fn assemble_from_phi(g: &GridFunction, phi: &GridFunction) -> Result<GridFunction> {
    let grid = g.grid();
    let cg = cauchy(g);
    let trace = boundary_trace(&cg)?.zip_map(&boundary_trace(phi)?, |c, p| {
        Complex64::new(c.im - p.re, 0.0)
    });
    let v = poisson_extend(&conjugate_function(&trace), grid);
    let mut phi1 = cg.zip_map(&v, |c, v| Complex64::new(c.re + v.re, 0.0));
    let shift = boundary_trace(&phi1)?.mean().re;
    phi1 = phi1.map(|x| x - shift);
    Ok(phi1.zip_map(phi, |a, p| Complex64::new(a.re, p.re)))
}

/// `s` with `∂̄s = α e^{s̄ − s} conj(F)/F`, `tr Im s = ψ` and
/// `∫_T Re s = λ`, so that `e^s F` solves `∂̄w = α w̄`.
pub fn parametrize_imag(
    alpha: &GridFunction,
    f: &GridFunction,
    psi: &BoundaryFunction,
    lambda: f64,
    cfg: &SolverConfig,
) -> Result<(GridFunction, SolveReport)> {
    parametrize_imag_with_initial(alpha, f, psi, lambda, cfg, None)
}

/// As [`parametrize_imag`], starting the iteration from `phi0` (the
/// imaginary part of the reduced exponent) instead of zero.
pub fn parametrize_imag_with_initial(
    alpha: &GridFunction,
    f: &GridFunction,
    psi: &BoundaryFunction,
    lambda: f64,
    cfg: &SolverConfig,
    phi0: Option<&GridFunction>,
) -> Result<(GridFunction, SolveReport)> {
    check_inputs(alpha, f, psi)?;
    let grid = alpha.grid();
    // Absorb iA, holomorphic with Im tr(iA) = ψ and ∫ Re(iA) = λ, into F.
    let (a, _) = solve_dbar(&GridFunction::zeros(grid), psi, -lambda, 0.0)?;
    let ia = a.map(|v| I * v);
    let f2 = reconstruct(&ia, f);
    let beta = twisted(alpha, &f2, cfg.zero_threshold);
    let phi0 = phi0.map_or_else(|| GridFunction::zeros(grid), |p| p.re());
    let (s_red, _, out) = solve_reduced_imag(&beta, phi0, cfg)?;
    let s = &s_red + &ia;

    let mut report = out.report();
    let tr = boundary_trace(&s)?;
    report.residual_beltrami = residual_beltrami(&reconstruct(&s, f), alpha)?;
    report.boundary_mismatch = tr
        .zip_map(psi, |s, p| Complex64::new(s.im - p.re, 0.0))
        .lp_norm(2.0);
    report.normalization_defects = vec![(tr.integral().re - lambda).abs()];
    report.measured_constant = ratio(
        sobolev_norm(&s, 2.0)?,
        area_lp_norm(alpha, 2.0)? + psi.lp_norm(2.0) + lambda.abs(),
    );
    Ok((s, report))
}

pub(crate) fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// `s` with `∂̄s = α e^{s̄ − s} conj(F)/F`, `tr Re s = ψ` and
/// `∫_T Im s = λ`.
///
/// After absorbing the boundary data into `F`, the unknown is the zero-mean
/// boundary function `u = tr Im s`; it is the fixed point of
/// `B(u) = tr Im R − (tr Re R)~`, `R = C(β e^{−2i Im s_u})` minus its
/// boundary mean, where `s_u` solves the imaginary-normalized problem with
/// data `u`.
pub fn parametrize_real(
    alpha: &GridFunction,
    f: &GridFunction,
    psi: &BoundaryFunction,
    lambda: f64,
    cfg: &SolverConfig,
) -> Result<(GridFunction, SolveReport)> {
    parametrize_real_with_initial(alpha, f, psi, lambda, cfg, None)
}

/// As [`parametrize_real`], starting from the boundary function `u0`
/// (made real and zero-mean) instead of zero.
pub fn parametrize_real_with_initial(
    alpha: &GridFunction,
    f: &GridFunction,
    psi: &BoundaryFunction,
    lambda: f64,
    cfg: &SolverConfig,
    u0: Option<&BoundaryFunction>,
) -> Result<(GridFunction, SolveReport)> {
    check_inputs(alpha, f, psi)?;
    let grid = alpha.grid();
    let nt = grid.n_theta();
    let (a, _) = solve_dbar(&GridFunction::zeros(grid), psi, lambda, 0.0)?;
    let f2 = reconstruct(&a, f);
    let beta = twisted(alpha, &f2, cfg.zero_threshold);

    let zero_mean = |u: &BoundaryFunction| {
        let m = u.mean().re;
        u.map(|v| Complex64::new(v.re - m, 0.0))
    };
    let init = u0.map_or_else(
        || BoundaryFunction::constant(nt, Complex64::new(0.0, 0.0)),
        zero_mean,
    );
    let mut warm = GridFunction::zeros(grid);
    let out = damped_picard(
        init,
        cfg,
        |u| {
            let eu = poisson_extend(u, grid);
            let bu = beta.zip_map(&eu, |b, e| b * (I * (-2.0 * e.re)).exp());
            let (_, phi, _) = solve_reduced_imag(&bu, warm.clone(), cfg)?;
            let g = bu.zip_map(&phi, |b, p| b * (I * (-2.0 * p.re)).exp());
            warm = phi;
            let r = boundary_trace(&cauchy(&g))?;
            let mean = r.mean();
            let r = r.map(|v| v - mean);
            let re_conj = conjugate_function(&r.re());
            Ok(r.zip_map(&re_conj, |r, c| Complex64::new(r.im - c.re, 0.0)))
        },
        |a, b, t| a.zip_map(b, |x, y| x + (y - x) * t),
        |a, b| sobolev_norm(&poisson_extend(&(a - b), grid), 2.0),
    )?;
    let u = zero_mean(&out.state);
    let one = GridFunction::constant(grid, Complex64::new(1.0, 0.0));
    let (s_red, _) = parametrize_imag(&beta, &one, &u, 0.0, cfg)?;
    let s = &s_red + &a;

    let mut report = out.report();
    let tr = boundary_trace(&s)?;
    report.residual_beltrami = residual_beltrami(&reconstruct(&s, f), alpha)?;
    report.boundary_mismatch = tr
        .zip_map(psi, |s, p| Complex64::new(s.re - p.re, 0.0))
        .lp_norm(2.0);
    report.normalization_defects = vec![(tr.integral().im - lambda).abs()];
    report.measured_constant = ratio(
        sobolev_norm(&s, 2.0)?,
        area_lp_norm(alpha, 2.0)? + psi.lp_norm(2.0) + lambda.abs(),
    );
    Ok((s, report))
}
