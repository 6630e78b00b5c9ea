use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{median, DiagnosticReport};
use crate::error::{Error, Result};
use crate::grid::{
    area_integral_open, area_lp_norm, boundary_lp_norm, nontangential_max, ring_norm, DiskGrid,
    GridFunction,
};
use crate::transforms::{beurling, cauchy_norm_sq_on_disk};

const LAMBDAS: [f64; 4] = [0.5, 1.0, 2.0, 4.0];

fn require_real(f: &GridFunction, what: &'static str) -> Result<()> {
    let scale = f.max_abs().max(1.0);
    if f.max_abs_im() > 1e-12 * scale {
        return Err(Error::NonReal(what));
    }
    Ok(())
}

/// Coefficient of determination of the least-squares fit of `y` on the
/// columns `basis(x)`.
fn r_squared(xs: &[f64], ys: &[f64], basis: impl Fn(f64) -> Vec<f64>) -> f64 {
    let n = ys.len();
    let mean = ys.iter().sum::<f64>() / n as f64;
    let tss: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    if tss <= 1e-24 * (1.0 + mean * mean) {
        return 1.0;
    }
    let cols = basis(xs[0]).len();
    let a = DMatrix::from_fn(n, cols, |i, j| basis(xs[i])[j]);
    let y = DVector::from_column_slice(ys);
    let coef = a
        .clone()
        .svd(true, true)
        .solve(&y, 1e-14)
        .expect("SVD with both factors");
    let rss = (a * coef - y).norm_squared();
    (1.0 - rss / tss).clamp(0.0, 1.0)
}

/// Exponential summability of `λ f` for `λ ∈ {1/2, 1, 2, 4}`.
///
/// For each `ℓ`, `log ∫_D e^{ℓλ|f|}` is fitted by `a + bλ²` and by a cubic
/// in `λ`; `measured = 1 − R²_quad / R²_cubic` against the bound 0.05. The
/// integrals skip the boundary ring, so `f` may be singular there.
pub fn exp_integrability_report(f: &GridFunction, ells: &[f64]) -> Result<DiagnosticReport> {
    require_real(f, "exp_integrability_report argument")?;
    let abs = f.abs();
    let mut measured = Vec::with_capacity(ells.len());
    let mut integrals = Vec::new();
    let mut slopes = Vec::new();
    for &ell in ells {
        let mut logs = Vec::with_capacity(LAMBDAS.len());
        for &lam in &LAMBDAS {
            let i = area_integral_open(&abs.map(|v| (v * (ell * lam)).exp()))
                .map_err(|_| {
                    Error::Degenerate(format!(
                        "e^(l*lambda*|f|) overflows at l = {ell}, lambda = {lam}; reduce the exponent range"
                    ))
                })?
                .re;
            if !(i.is_finite() && i > 0.0) {
                return Err(Error::Degenerate(format!(
                    "non-finite integral at l = {ell}, lambda = {lam}; reduce the exponent range"
                )));
            }
            integrals.push(i);
            logs.push(i.ln());
        }
        let quad = r_squared(&LAMBDAS, &logs, |x| vec![1.0, x * x]);
        let cubic = r_squared(&LAMBDAS, &logs, |x| vec![1.0, x, x * x, x * x * x]);
        measured.push(1.0 - quad / cubic.max(quad));
        slopes.push((logs[3] - logs[2]) / (16.0 - 4.0));
    }
    let n = measured.len();
    Ok(
        DiagnosticReport::new("exp_integrability", measured, vec![0.05; n], 0.0)
            .with_detail("ells", ells.to_vec())
            .with_detail("lambdas", LAMBDAS.to_vec())
            .with_detail("integrals", integrals)
            .with_detail("quadratic_slope", slopes),
    )
}

/// Positive cell weights `r Δr Δθ` (half a cell on the boundary ring).
fn node_weights(g: &DiskGrid) -> Vec<f64> {
    let n = g.n_r();
    let dr = g.outer_radius() / n as f64;
    (0..n)
        .map(|j| {
            let w = g.radius(j) * dr * g.dtheta();
            if j + 1 == n {
                0.5 * w
            } else {
                w
            }
        })
        .collect()
}

struct CellSums {
    cells: usize,
    cell: f64,
    derivative: Vec<f64>,
    mass: Vec<f64>,
}

fn cell_sums(beta: &GridFunction, b: &GridFunction, eps: f64) -> CellSums {
    let g = beta.grid();
    let cell = eps / 2.0;
    let cells = (2.0 / cell).ceil() as usize;
    let mut derivative = vec![0.0; cells * cells];
    let mut mass = vec![0.0; cells * cells];
    let w = node_weights(g);
    for j in 0..g.n_r() {
        for k in 0..g.n_theta() {
            let z = g.point(j, k);
            let cx = (((z.re + 1.0) / cell) as usize).min(cells - 1);
            let cy = (((z.im + 1.0) / cell) as usize).min(cells - 1);
            let m = beta.value(j, k).norm_sqr() * w[j];
            derivative[cy * cells + cx] += b.value(j, k).norm_sqr() * w[j];
            mass[cy * cells + cx] += m;
        }
    }
    CellSums {
        cells,
        cell,
        derivative,
        mass,
    }
}

/// Local energy moduli of the Cauchy transform.
///
/// For each side `ε` (expected in decreasing order), squares of side `ε`
/// slide over `[−1, 1]²` in steps of `ε/2`. `measured[i]` is the largest
/// `‖∂C(β)‖_{L²(Q∩D)} + ‖∂̄C(β)‖_{L²(Q∩D)}`, and the detail `beta_mass`
/// the largest `‖β‖_{L²(Q∩D)}`. Entries are satisfied when they do not
/// exceed the previous one.
pub fn equicontinuity_modulus(
    beta: &GridFunction,
    side_lengths: &[f64],
) -> Result<DiagnosticReport> {
    beta.require_unmasked("equicontinuity_modulus")?;
    if side_lengths.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::InvalidArgument(
            "side lengths must be positive".into(),
        ));
    }
    let b = beurling(beta);
    let mut measured = Vec::new();
    let mut masses = Vec::new();
    let mut centers = Vec::new();
    for &eps in side_lengths {
        let s = cell_sums(beta, &b, eps);
        let (mut best, mut best_mass, mut at) = (0.0f64, 0.0f64, (0.0, 0.0));
        let last = s.cells.saturating_sub(1).max(1);
        for y in 0..last {
            for x in 0..last {
                let (mut d, mut m) = (0.0, 0.0);
                for (dy, dx) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    let (yy, xx) = (y + dy, x + dx);
                    if yy < s.cells && xx < s.cells {
                        d += s.derivative[yy * s.cells + xx];
                        m += s.mass[yy * s.cells + xx];
                    }
                }
                let v = d.sqrt() + m.sqrt();
                if v > best {
                    best = v;
                    at = (
                        -1.0 + (x as f64 + 1.0) * s.cell,
                        -1.0 + (y as f64 + 1.0) * s.cell,
                    );
                }
                best_mass = best_mass.max(m.sqrt());
            }
        }
        measured.push(best);
        masses.push(best_mass);
        centers.push(at.0);
        centers.push(at.1);
    }
    let bound = (0..measured.len())
        .map(|i| if i == 0 { measured[0] } else { measured[i - 1] })
        .collect();
    Ok(
        DiagnosticReport::new("equicontinuity_modulus", measured, bound, 1e-12)
            .with_detail("side_lengths", side_lengths.to_vec())
            .with_detail("beta_mass", masses)
            .with_detail("argmax_center", centers),
    )
}

/// `‖∂C(β)‖_{L²(Q∩D)} + ‖∂̄C(β)‖_{L²(Q∩D)}` for the axis-parallel square
/// `Q` of side `side` centered at `center`.
pub fn square_energy(beta: &GridFunction, center: Complex64, side: f64) -> Result<f64> {
    beta.require_unmasked("square_energy")?;
    let b = beurling(beta);
    let g = beta.grid();
    let w = node_weights(g);
    let (mut d, mut m) = (0.0, 0.0);
    for j in 0..g.n_r() {
        for k in 0..g.n_theta() {
            let z = g.point(j, k) - center;
            if z.re.abs() < side / 2.0 && z.im.abs() < side / 2.0 {
                d += b.value(j, k).norm_sqr() * w[j];
                m += beta.value(j, k).norm_sqr() * w[j];
            }
        }
    }
    Ok(d.sqrt() + m.sqrt())
}

/// `‖C(h)‖_{L²(D_R)} / (R (1 + √log R) ‖h‖_{L²(D)})` for each `R ≥ 1`.
///
/// The absolute constant is measured, not asserted: entry `i` is satisfied
/// when it does not exceed the largest earlier ratio.
pub fn c2_growth_curve(h: &GridFunction, radii: &[f64]) -> Result<DiagnosticReport> {
    let norm_h = area_lp_norm(h, 2.0)?;
    let mut measured = Vec::with_capacity(radii.len());
    let mut norms = Vec::with_capacity(radii.len());
    for &r in radii {
        let sq = cauchy_norm_sq_on_disk(h, r)?;
        norms.push(sq);
        measured.push(if norm_h == 0.0 {
            0.0
        } else {
            sq.max(0.0).sqrt() / (r * (1.0 + r.ln().sqrt()) * norm_h)
        });
    }
    let mut bound = Vec::with_capacity(measured.len());
    let mut running = measured.first().copied().unwrap_or(0.0);
    for m in &measured {
        bound.push(running);
        running = running.max(*m);
    }
    Ok(
        DiagnosticReport::new("c2_growth_curve", measured, bound, 1e-9)
            .with_detail("radii", radii.to_vec())
            .with_detail("norm_sq", norms),
    )
}

fn multiplier_value(f: &GridFunction, g: &GridFunction, p: f64, gamma: f64) -> Result<f64> {
    require_real(f, "multiplier f")?;
    f.check_grid(g)?;
    let grid = f.grid();
    let nb = grid.boundary_ring_index();
    let trace = f.ring(nb).iter().fold(0.0f64, |m, v| m.max(v.norm()));
    if trace > 1e-8 {
        return Err(Error::InvalidArgument(format!(
            "f must vanish on the boundary (sup |tr f| = {trace:.3e})"
        )));
    }
    let rhs = boundary_lp_norm(&nontangential_max(g, gamma)?, p)?;
    if rhs == 0.0 {
        return Err(Error::ZeroFunction("non-tangential maximal function of g"));
    }
    let prod = &f.map(|v| Complex64::new(v.re.exp(), 0.0)) * g;
    let mut lhs: f64 = 0.0;
    for j in 0..nb {
        lhs = lhs.max(ring_norm(&prod, j, p)?);
    }
    Ok(lhs / rhs)
}

/// `sup_ρ (∫_{T_ρ} e^{pf}|g|^p)^{1/p} / ‖M_γ g‖_{L^p(T)}` for `f` vanishing
/// on `T`. The single-pair report only requires finiteness.
pub fn multiplier_ratio(
    f: &GridFunction,
    g: &GridFunction,
    p: f64,
    gamma: f64,
) -> Result<DiagnosticReport> {
    let r = multiplier_value(f, g, p, gamma)?;
    Ok(DiagnosticReport::new(
        "multiplier_ratio",
        vec![r],
        vec![f64::INFINITY],
        0.0,
    ))
}

/// Ratios over all pairs `(f, g)`, each bounded by ten times the median.
pub fn multiplier_family(
    fs: &[GridFunction],
    gs: &[GridFunction],
    p: f64,
    gamma: f64,
) -> Result<DiagnosticReport> {
    let mut ratios = Vec::with_capacity(fs.len() * gs.len());
    for f in fs {
        for g in gs {
            ratios.push(multiplier_value(f, g, p, gamma)?);
        }
    }
    let bound = 10.0 * median(&ratios);
    let n = ratios.len();
    Ok(
        DiagnosticReport::new("multiplier_family", ratios, vec![bound; n], 0.0)
            .with_detail("p", vec![p])
            .with_detail("gamma", vec![gamma]),
    )
}

/// `‖tr_T w_ρ − w_T‖_{L^p(T)}` over the top quartile of rings (excluding
/// the boundary itself). Entries must stay below the first one and the last
/// must be at most half of it.
pub fn trace_convergence(w: &GridFunction, p: f64) -> Result<DiagnosticReport> {
    let g = w.grid();
    let n = g.n_r();
    let nb = n - 1;
    let boundary = w.ring(nb).to_vec();
    let start = (3 * n / 4).min(nb - 1);
    let mut measured = Vec::new();
    let mut radii = Vec::new();
    for j in start..nb {
        if (0..g.n_theta()).any(|k| w.is_masked_at(j, k) || w.is_masked_at(nb, k)) {
            return Err(Error::Masked("trace_convergence"));
        }
        let s: f64 = w
            .ring(j)
            .iter()
            .zip(&boundary)
            .map(|(a, b)| (a - b).norm().powf(p))
            .sum();
        measured.push((s * g.dtheta()).powf(1.0 / p));
        radii.push(g.radius(j));
    }
    let first = measured[0];
    let last = measured.len() - 1;
    let bound = (0..measured.len())
        .map(|i| if i == last { 0.5 * first } else { first })
        .collect();
    Ok(
        DiagnosticReport::new("trace_convergence", measured, bound, 0.0)
            .with_detail("radii", radii),
    )
}
