use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::{map_modes, ZERO};
use crate::error::{Error, Result};
use crate::grid::{area_integral, area_lp_norm, DiskGrid, GridFunction, ModalField};

/// `C(h)(z) = (1/π) ∫_D h(t)/(z − t) dm(t)` on the grid of `h`.
///
/// Mode `n` of `h` feeds mode `n − 1` of the result:
/// `2 ∫_0^r ĥ_n (ρ/r)^{1−n} dρ` for `n ≤ 0` and `−2 ∫_r^1 ĥ_n (r/ρ)^{n−1} dρ`
/// for `n ≥ 1`.
pub fn cauchy(h: &GridFunction) -> GridFunction {
    h.assert_transformable("cauchy");
    let t = h.grid().tables();
    map_modes(h, -1, |n, f| {
        if n <= 0 {
            t.inner((1 - n) as usize, f)
                .iter()
                .map(|v| v * 2.0)
                .collect()
        } else {
            t.outer((n - 1) as usize, f)
                .iter()
                .map(|v| v * -2.0)
                .collect()
        }
    })
}

/// `B(h) = ∂C(h)`, differentiating the per-mode Cauchy integrals exactly.
pub fn beurling(h: &GridFunction) -> GridFunction {
    h.assert_transformable("beurling");
    let g = h.grid();
    let t = g.tables();
    let radii = g.radii();
    map_modes(h, -2, |n, f| {
        let m = (n - 1) as f64;
        let signed: Vec<Complex64> = if n <= 0 {
            t.inner((1 - n) as usize, f)
        } else {
            t.outer((n - 1) as usize, f).iter().map(|v| -v).collect()
        };
        signed
            .iter()
            .zip(radii)
            .zip(f)
            .map(|((s, r), h)| s * (2.0 * m / r) + h)
            .collect()
    })
}

/// The Cauchy transform of `h` (supported in `D`) evaluated on `eval_grid`,
/// a grid of the disk `D_R`. For such `h` the renormalized kernel
/// coincides with the plain one.
pub fn cauchy_renormalized(
    h: &GridFunction,
    r_outer: f64,
    eval_grid: &Arc<DiskGrid>,
) -> Result<GridFunction> {
    if !(r_outer >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "R = {r_outer} must be >= 1"
        )));
    }
    if (eval_grid.outer_radius() - r_outer).abs() > 1e-12 * r_outer {
        return Err(Error::GridMismatch(format!(
            "evaluation grid has radius {}, expected {r_outer}",
            eval_grid.outer_radius()
        )));
    }
    h.require_unmasked("cauchy_renormalized")?;
    let g = h.grid();
    if !g.is_unit() {
        return Err(Error::GridMismatch(
            "source must live on the unit-disk grid".into(),
        ));
    }
    let t = g.tables();
    let modal = h.modal();
    let nt = eval_grid.n_theta();
    let mut out = ModalField::zeros(eval_grid.n_r(), nt);
    for n in modal.band() {
        let m = n - 1;
        if !out.in_band(m) || m.unsigned_abs() as usize >= nt / 2 {
            continue;
        }
        let f = modal.profile(n).radial_values;
        let prof: Vec<Complex64> = if n <= 0 {
            let q = (1 - n) as usize;
            let nodes = t.inner(q, &f);
            let moment = t.moment(q, &f);
            eval_grid
                .radii()
                .iter()
                .map(|&r| {
                    if r <= 1.0 {
                        t.inner_at(q, &f, &nodes, r) * 2.0
                    } else {
                        moment * (2.0 * r.powi(n as i32 - 1))
                    }
                })
                .collect()
        } else {
            let p = (n - 1) as usize;
            let nodes = t.outer(p, &f);
            eval_grid
                .radii()
                .iter()
                .map(|&r| {
                    if r < 1.0 {
                        t.outer_at(p, &f, &nodes, r) * -2.0
                    } else {
                        ZERO
                    }
                })
                .collect()
        };
        out.set_profile(m, &prof);
    }
    Ok(GridFunction::from_modal(eval_grid, &out))
}

/// `(1/πR²) ∫_{D_R} C(h) dm` for `h` supported in `D`.
///
/// Outside `D` only the modes `n − 1 ≤ −1` of `C(h)` survive, and they
/// integrate to zero over circles, so the annulus contributes nothing.
pub fn cauchy_mean_on_disk(h: &GridFunction, r_outer: f64) -> Result<Complex64> {
    if !(r_outer >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "R = {r_outer} must be >= 1"
        )));
    }
    h.require_unmasked("cauchy_mean_on_disk")?;
    Ok(area_integral(&cauchy(h))? / (PI * r_outer * r_outer))
}

/// `‖C(h)‖²_{L²(D_R)}` for `h` supported in `D`: the disk part by quadrature
/// and the annulus `1 < |z| < R` from the exterior expansion
/// `Σ_{n≤0} 2 M_n z^{n−1}`, `M_n = ∫_0^1 ĥ_n ρ^{1−n} dρ`.
pub fn cauchy_norm_sq_on_disk(h: &GridFunction, r_outer: f64) -> Result<f64> {
    if !(r_outer >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "R = {r_outer} must be >= 1"
        )));
    }
    h.require_unmasked("cauchy_norm_sq_on_disk")?;
    let inside = area_lp_norm(&cauchy(h), 2.0)?.powi(2);
    let t = h.grid().tables();
    let modal = h.modal();
    let mut outside = 0.0;
    for n in modal.band() {
        if n > 0 || !modal.in_band(n - 1) {
            continue;
        }
        let moment = t.moment((1 - n) as usize, &modal.profile(n).radial_values);
        let radial = if n == 0 {
            r_outer.ln()
        } else {
            (1.0 - r_outer.powi(2 * n as i32)) / (2.0 * n.unsigned_abs() as f64)
        };
        outside += moment.norm_sqr() * radial;
    }
    Ok(inside + 8.0 * PI * outside)
}
