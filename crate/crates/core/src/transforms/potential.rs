use num_complex::Complex64;

use crate::grid::GridFunction;

/// Dirichlet Green potential `P(ψ) = −(1/2π) ∫_D log|(1 − z̄t)/(z − t)| ψ(t) dm(t)`,
/// so that `ΔP(ψ) = ψ` and `P(ψ) = 0` on the circle.
///
/// Mode 0: `log r ∫_0^r ψ̂ ρ dρ + ∫_r^1 ψ̂ ρ log ρ dρ`. Mode `n`, `k = |n|`:
/// `−(1/2k) [∫_0^r ψ̂ ρ (ρ/r)^k + ∫_r^1 ψ̂ ρ (r/ρ)^k − ∫_0^1 ψ̂ ρ (rρ)^k]`.
pub fn green_potential(psi: &GridFunction) -> GridFunction {
    psi.assert_transformable("green_potential");
    let g = psi.grid();
    let t = g.tables();
    let radii = g.radii();
    let mut out = super::map_modes(psi, 0, |n, f| {
        let k = n.unsigned_abs() as usize;
        if k == 0 {
            let inner = t.inner(1, f);
            let log = t.outer_log(f);
            radii
                .iter()
                .zip(inner.iter().zip(&log))
                .map(|(&r, (i, l))| i * (r * r.ln()) + l)
                .collect()
        } else {
            let inner = t.inner(k + 1, f);
            let outer = t.outer(k - 1, f);
            let moment = t.moment(k + 1, f);
            radii
                .iter()
                .zip(inner.iter().zip(&outer))
                .map(|(&r, (i, o))| ((i + o) * r - moment * r.powi(k as i32)) * (-0.5 / k as f64))
                .collect()
        }
    });
    let nt = g.n_theta();
    out.set_ring(g.boundary_ring_index(), &vec![Complex64::new(0.0, 0.0); nt]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn potential_of_constant() {
        let g = make_grid(16, 32).unwrap();
        let four = GridFunction::constant(&g, Complex64::new(4.0, 0.0));
        let p = green_potential(&four);
        for j in 0..32 {
            for k in 0..16 {
                let r = g.radius(j);
                assert!((p.value(j, k).re - (r * r - 1.0)).abs() < 1e-13);
            }
        }
        assert!(p.ring(31).iter().all(|v| *v == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn potential_of_a_harmonic_mode() {
        // Δ(z|z|²) = 4∂∂̄(z² z̄) = 8z, and z(|z|² − 1) vanishes on the circle.
        let g = make_grid(16, 32).unwrap();
        let psi = GridFunction::from_fn(&g, |z| z * 8.0);
        let p = green_potential(&psi);
        for j in 0..32 {
            for k in 0..16 {
                let z = g.point(j, k);
                assert!((p.value(j, k) - z * (z.norm_sqr() - 1.0)).norm() < 1e-13);
            }
        }
    }
}
