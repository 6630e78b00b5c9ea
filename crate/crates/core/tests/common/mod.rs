//! Shared fixtures: seeded random families and a finite-difference oracle
//! for `div(σ∇u) = 0`.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use phdisk_core::{BoundaryFunction, DiskGrid, GridFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `h = Σ_{|n| ≤ N/4} c_n r^{|n|}(a₀ + a₁r² + a₂r⁴) e^{inθ}` with
/// `c_n ~ e^{−|n|/8}·U(−1, 1)²` and `a_i ~ U(−1, 1)`.
pub fn random_interior(grid: &Arc<DiskGrid>, rng: &mut ChaCha8Rng) -> GridFunction {
    let top = (grid.n_theta() / 4) as i64;
    let modes: Vec<(i64, Complex64, [f64; 3])> = (-top..=top)
        .map(|n| {
            let d = (-(n.abs() as f64) / 8.0).exp();
            let cn = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * d;
            let a = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            (n, cn, a)
        })
        .collect();
    GridFunction::from_polar(grid, |r, t| {
        let r2 = r * r;
        modes
            .iter()
            .map(|(n, cn, a)| {
                cn * (r.powi(n.abs() as i32) * (a[0] + a[1] * r2 + a[2] * r2 * r2))
                    * Complex64::from_polar(1.0, *n as f64 * t)
            })
            .sum()
    })
}

/// Real trigonometric polynomial `a₀ + Σ_{1..=modes} (a_n cos nθ + b_n sin nθ)/n`.
pub fn random_boundary(
    n_theta: usize,
    modes: usize,
    mean: f64,
    rng: &mut ChaCha8Rng,
) -> BoundaryFunction {
    let coeffs: Vec<(f64, f64)> = (1..=modes)
        .map(|n| {
            let s = 1.0 / n as f64;
            (rng.gen_range(-1.0..1.0) * s, rng.gen_range(-1.0..1.0) * s)
        })
        .collect();
    BoundaryFunction::from_real_fn(n_theta, |t| {
        mean + coeffs
            .iter()
            .enumerate()
            .map(|(i, (a, b))| {
                let n = (i + 1) as f64;
                a * (n * t).cos() + b * (n * t).sin()
            })
            .sum::<f64>()
    })
}

/// Cartesian Shortley–Weller discretization of `div(σ∇u) = 0` on the unit
/// disk with `u = ψ(θ)` on the circle, solved by SOR.
pub struct FdSolution {
    pub h: f64,
    pub points: Vec<Complex64>,
    pub values: Vec<f64>,
}

pub fn fd_conductivity(
    sigma: impl Fn(f64, f64) -> f64,
    psi: impl Fn(f64) -> f64,
    h: f64,
    omega: f64,
) -> FdSolution {
    let m = (2.0 / h).round() as usize;
    let h = 2.0 / m as f64;
    let coord = |i: usize| -1.0 + i as f64 * h;
    let inside = |x: f64, y: f64| x * x + y * y < 1.0 - 1e-9;
    let mut id = vec![usize::MAX; (m + 1) * (m + 1)];
    let mut points = Vec::new();
    for iy in 0..=m {
        for ix in 0..=m {
            if inside(coord(ix), coord(iy)) {
                id[iy * (m + 1) + ix] = points.len();
                points.push((ix, iy));
            }
        }
    }
    enum Arm {
        Node(usize),
        Wall(f64),
    }
    // Per node: four arms (east, west, north, south) with coefficients.
    let mut stencils: Vec<[(f64, Arm); 4]> = Vec::with_capacity(points.len());
    for &(ix, iy) in &points {
        let (x, y) = (coord(ix), coord(iy));
        let arm = |dx: i64, dy: i64| -> (f64, Arm) {
            let (nx, ny) = (ix as i64 + dx, iy as i64 + dy);
            let (px, py) = (x + dx as f64 * h, y + dy as f64 * h);
            if inside(px, py) {
                (h, Arm::Node(id[ny as usize * (m + 1) + nx as usize]))
            } else if dx != 0 {
                let xb = (1.0 - y * y).sqrt() * dx as f64;
                ((xb - x).abs(), Arm::Wall(psi(y.atan2(xb))))
            } else {
                let yb = (1.0 - x * x).sqrt() * dy as f64;
                ((yb - y).abs(), Arm::Wall(psi(yb.atan2(x))))
            }
        };
        let (e, w, n, s) = (arm(1, 0), arm(-1, 0), arm(0, 1), arm(0, -1));
        let coef = |d: f64, dopp: f64, mx: f64, my: f64| sigma(mx, my) / (d * 0.5 * (d + dopp));
        let ce = coef(e.0, w.0, x + e.0 / 2.0, y);
        let cw = coef(w.0, e.0, x - w.0 / 2.0, y);
        let cn = coef(n.0, s.0, x, y + n.0 / 2.0);
        let cs = coef(s.0, n.0, x, y - s.0 / 2.0);
        stencils.push([(ce, e.1), (cw, w.1), (cn, n.1), (cs, s.1)]);
    }
    let mut u = vec![0.0; points.len()];
    for _ in 0..100_000 {
        let mut change: f64 = 0.0;
        for i in 0..u.len() {
            let (mut num, mut den) = (0.0, 0.0);
            for (a, arm) in &stencils[i] {
                den += a;
                num += a * match arm {
                    Arm::Node(k) => u[*k],
                    Arm::Wall(v) => *v,
                };
            }
            let new = (1.0 - omega) * u[i] + omega * num / den;
            change = change.max((new - u[i]).abs());
            u[i] = new;
        }
        if change < 1e-13 {
            break;
        }
    }
    FdSolution {
        h,
        points: points
            .iter()
            .map(|&(ix, iy)| c(coord(ix), coord(iy)))
            .collect(),
        values: u,
    }
}

impl FdSolution {
    /// Discrete `L²(D)` distance to `other` sampled at the same points.
    pub fn l2_distance(&self, other: &[f64]) -> f64 {
        self.values
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
            * self.h
    }
}

pub fn angle_of(z: Complex64) -> f64 {
    z.arg().rem_euclid(2.0 * PI)
}
