//! Norms, traces, Wirtinger derivatives and the non-tangential maximal
//! function on polar grids.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::fourier::mode_of;
use super::quadrature::RadialTables;
use super::{BoundaryFunction, DiskGrid, GridFunction};
use crate::error::{Error, Result};

/// `∫_D f dm` over the whole grid disk.
pub fn area_integral(f: &GridFunction) -> Result<Complex64> {
    f.require_unmasked("area_integral")?;
    let g = f.grid();
    Ok(weighted_sum(f, g.radial_weights(), |v| v))
}

fn weighted_sum(
    f: &GridFunction,
    weights: &[f64],
    h: impl Fn(Complex64) -> Complex64,
) -> Complex64 {
    let g = f.grid();
    let dt = g.dtheta();
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, w) in weights.iter().enumerate().filter(|(_, w)| **w != 0.0) {
        let ring: Complex64 = f.ring(j).iter().map(|&v| h(v)).sum();
        acc += ring * (w * dt);
    }
    acc
}

/// `∫_D f dm` using interior rings only: the outermost cell is covered by
/// extrapolating the last interior stencil, so a singular boundary ring
/// does not enter.
pub fn area_integral_open(f: &GridFunction) -> Result<Complex64> {
    let g = f.grid();
    let n = g.n_r() - 1;
    if f.masked_within(n) {
        return Err(Error::Masked("area_integral_open"));
    }
    let radii = &g.radii()[..n];
    let t = RadialTables::new(radii, 0);
    let mut w = t.area_node_weights();
    let last = n - 1;
    let tail = t.partial_weights(last, radii[last], g.outer_radius(), |r| r);
    for (l, wl) in tail.iter().enumerate().take(t.width()) {
        w[t.start[last] + l] += wl;
    }
    Ok(weighted_sum(f, &w, |v| v))
}

/// Per-ring weights for `∫_0^ρ f(r) r dr`; the cell containing `ρ` is
/// integrated partially, so the weights may reach a few rings past `ρ`.
pub(crate) fn radial_weights_within(grid: &DiskGrid, rho: f64) -> Vec<f64> {
    if rho >= grid.outer_radius() {
        return grid.radial_weights().to_vec();
    }
    let t = grid.tables();
    let mut out = vec![0.0; grid.n_r()];
    if rho <= 0.0 {
        return out;
    }
    let last = t.cell_of(rho);
    for i in 0..=last {
        let w = if i == last {
            t.partial_weights(i, t.lo[i], rho, |r| r)
        } else {
            t.cell_weights(i, |r| r)
        };
        for (l, wl) in w.iter().enumerate().take(t.width()) {
            out[t.start[i] + l] += wl;
        }
    }
    out
}

/// `(∫_D |f|^p dm)^{1/p}`.
pub fn area_lp_norm(f: &GridFunction, p: f64) -> Result<f64> {
    f.require_unmasked("area_lp_norm")?;
    lp_with(f, p, f.grid().radial_weights())
}

/// `(∫_{D_ρ} |f|^p dm)^{1/p}`.
pub fn area_lp_norm_within(f: &GridFunction, p: f64, rho: f64) -> Result<f64> {
    let w = radial_weights_within(f.grid(), rho);
    let reach = w.iter().rposition(|&x| x != 0.0).map_or(0, |j| j + 1);
    if f.masked_within(reach) {
        return Err(Error::Masked("area_lp_norm_within"));
    }
    lp_with(f, p, &w)
}

fn lp_with(f: &GridFunction, p: f64, weights: &[f64]) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("exponent {p} must be >= 1")));
    }
    let s = weighted_sum(f, weights, |v| Complex64::new(v.norm().powf(p), 0.0)).re;
    // Higher-order weights can be slightly negative; clamp round-off.
    Ok(s.max(0.0).powf(1.0 / p))
}

/// `(∫_{T_ρ} |f|^p |dξ|)^{1/p}` with unnormalized arclength.
pub fn circle_norm(f: &GridFunction, rho: f64, p: f64) -> Result<f64> {
    let g = f.grid();
    let j = g.ring_of(rho)?;
    ring_norm(f, j, p)
}

pub(crate) fn ring_norm(f: &GridFunction, j: usize, p: f64) -> Result<f64> {
    let g = f.grid();
    if (0..g.n_theta()).any(|k| f.is_masked_at(j, k)) {
        return Err(Error::Masked("circle_norm"));
    }
    let s: f64 = f.ring(j).iter().map(|v| v.norm().powf(p)).sum();
    Ok((s * g.radius(j) * g.dtheta()).powf(1.0 / p))
}

/// Discrete Hardy norm: the largest circle norm over the interior rings.
pub fn hardy_norm(f: &GridFunction, p: f64) -> Result<f64> {
    let g = f.grid();
    let mut best: f64 = 0.0;
    for j in 0..g.boundary_ring_index() {
        best = best.max(ring_norm(f, j, p)?);
    }
    Ok(best)
}

/// `(∫_T |b|^p |dξ|)^{1/p}`.
pub fn boundary_lp_norm(b: &BoundaryFunction, p: f64) -> Result<f64> {
    b.require_unmasked("boundary_lp_norm")?;
    Ok(b.lp_norm(p))
}

/// Values on the outer ring; fails if any of them is masked.
pub fn boundary_trace(f: &GridFunction) -> Result<BoundaryFunction> {
    let g = f.grid();
    let j = g.boundary_ring_index();
    if (0..g.n_theta()).any(|k| f.is_masked_at(j, k)) {
        return Err(Error::Masked("boundary_trace"));
    }
    Ok(BoundaryFunction::from_raw(f.ring(j).to_vec()))
}

/// Values on the outer ring with masked nodes carried over.
pub fn boundary_trace_masked(f: &GridFunction) -> BoundaryFunction {
    let j = f.grid().boundary_ring_index();
    BoundaryFunction::from_raw(f.ring(j).to_vec())
}

/// Derivative weights of the Lagrange interpolant through `xs` at `x`.
fn lagrange_derivative(xs: &[f64], x: f64) -> Vec<f64> {
    let n = xs.len();
    (0..n)
        .map(|i| {
            let mut total = 0.0;
            for m in 0..n {
                if m == i {
                    continue;
                }
                let mut prod = 1.0 / (xs[i] - xs[m]);
                for k in 0..n {
                    if k != i && k != m {
                        prod *= (x - xs[k]) / (xs[i] - xs[k]);
                    }
                }
                total += prod;
            }
            total
        })
        .collect()
}

/// Points per radial derivative stencil.
const STENCIL: usize = 7;

/// Radial derivative stencils. Nodes at `-r_k` stand for `f(r_k, θ + π)`.
struct RadialStencil {
    /// Per ring: (signed node index, weight); negative index `-(k+1)` is the
    /// reflected ring `k`.
    taps: Vec<Vec<(isize, f64)>>,
}

impl RadialStencil {
    fn new(radii: &[f64]) -> Self {
        let m = radii.len();
        let mut xs: Vec<f64> = radii.iter().rev().map(|r| -r).collect();
        xs.extend_from_slice(radii);
        let taps = (0..m)
            .map(|j| {
                let centre = m + j;
                let lo = centre.saturating_sub(STENCIL / 2).min(2 * m - STENCIL);
                let w = lagrange_derivative(&xs[lo..lo + STENCIL], radii[j]);
                (lo..lo + STENCIL)
                    .zip(w)
                    .map(|(pos, w)| {
                        let idx = if pos >= m {
                            (pos - m) as isize
                        } else {
                            -((m - pos) as isize)
                        };
                        (idx, w)
                    })
                    .collect()
            })
            .collect();
        RadialStencil { taps }
    }
}

/// `(∂f, ∂̄f)` with spectral angular and sixth-order radial differences.
pub fn wirtinger_derivatives(f: &GridFunction) -> (GridFunction, GridFunction) {
    let g = f.grid();
    let nt = g.n_theta();
    let nr = g.n_r();

    let mut modal = f.modal();
    for j in 0..nr {
        for idx in 0..nt {
            let m = mode_of(idx, nt);
            let c = &mut modal.coeffs[j * nt + idx];
            *c = if 2 * m.unsigned_abs() as usize == nt {
                Complex64::new(0.0, 0.0)
            } else {
                *c * Complex64::new(0.0, m as f64)
            };
        }
    }
    let f_theta = GridFunction::from_modal(g, &modal);

    let stencil = RadialStencil::new(g.radii());
    let half = nt / 2;
    let vals = f.values();
    let mut d = Vec::with_capacity(g.len());
    let mut db = Vec::with_capacity(g.len());
    for j in 0..nr {
        let r = g.radius(j);
        for k in 0..nt {
            let mut fr = Complex64::new(0.0, 0.0);
            for &(idx, w) in &stencil.taps[j] {
                let v = if idx >= 0 {
                    vals[idx as usize * nt + k]
                } else {
                    vals[(-idx - 1) as usize * nt + (k + half) % nt]
                };
                fr += v * w;
            }
            let ft = f_theta.values()[j * nt + k] * Complex64::new(0.0, 1.0 / r);
            let e = Complex64::from_polar(0.5, g.theta(k));
            d.push(e.conj() * (fr - ft));
            db.push(e * (fr + ft));
        }
    }
    (
        GridFunction::from_raw(g.clone(), d),
        GridFunction::from_raw(g.clone(), db),
    )
}

/// `‖f‖_{L^p} + ‖∂f‖_{L^p} + ‖∂̄f‖_{L^p}` over the disk.
pub fn sobolev_norm(f: &GridFunction, p: f64) -> Result<f64> {
    let (d, db) = wirtinger_derivatives(f);
    Ok(area_lp_norm(f, p)? + area_lp_norm(&d, p)? + area_lp_norm(&db, p)?)
}

/// Same three-term norm restricted to `D_ρ`.
pub fn sobolev_norm_within(f: &GridFunction, p: f64, rho: f64) -> Result<f64> {
    let (d, db) = wirtinger_derivatives(f);
    Ok(area_lp_norm_within(f, p, rho)?
        + area_lp_norm_within(&d, p, rho)?
        + area_lp_norm_within(&db, p, rho)?)
}

/// The approach region `Γ_{ξ,γ}`: the part of the cone with vertex `ξ`,
/// half-opening `γ` and axis through the origin lying between `ξ` and the
/// disk `D̄_{sin γ}`, together with that disk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cone {
    pub vertex: Complex64,
    pub gamma: f64,
}

impl Cone {
    pub fn new(vertex: Complex64, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < PI / 2.0) {
            return Err(Error::InvalidArgument(format!(
                "cone half-angle {gamma} outside (0, π/2)"
            )));
        }
        if (vertex.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(
                "cone vertex must be unimodular".into(),
            ));
        }
        Ok(Cone { vertex, gamma })
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let s = self.gamma.sin();
        if z.norm() <= s {
            return true;
        }
        let w = z * self.vertex.conj();
        (Complex64::new(1.0, 0.0) - w).arg().abs() < self.gamma && w.re > s * s
    }
}

/// `M_γ f(ξ_k)`: the largest `|f|` over interior nodes inside `Γ_{ξ_k,γ}`.
pub fn nontangential_max(f: &GridFunction, gamma: f64) -> Result<BoundaryFunction> {
    let g = f.grid();
    assert!(g.is_unit(), "nontangential_max needs a unit-disk grid");
    let cone = Cone::new(Complex64::new(1.0, 0.0), gamma)?;
    let nt = g.n_theta();
    // Membership is rotation invariant on the grid: find offsets at ξ = 1.
    let mut offsets = Vec::new();
    for j in 0..g.boundary_ring_index() {
        for k in 0..nt {
            if cone.contains(g.point(j, k)) {
                offsets.push((j, k));
            }
        }
    }
    if offsets.is_empty() {
        return Err(Error::EmptyCone { node: 0, gamma });
    }
    let mut out = Vec::with_capacity(nt);
    for l in 0..nt {
        let mut m: f64 = 0.0;
        for &(j, k) in &offsets {
            let kk = (k + l) % nt;
            if f.is_masked_at(j, kk) {
                return Err(Error::Masked("nontangential_max"));
            }
            m = m.max(f.value(j, kk).norm());
        }
        out.push(Complex64::new(m, 0.0));
    }
    Ok(BoundaryFunction::from_raw(out))
}
