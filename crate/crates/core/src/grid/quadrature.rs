//! Radial product-integration tables.
//!
//! Each radial cell `[a_i, b_i]` (with `a_0 = 0`, `b_i = r_i`) carries a local
//! Lagrange interpolant through up to six neighbouring nodes. Kernel integrals
//! `∫ K(ρ) f(ρ) dρ` over the cell are then reduced to six weights applied to
//! the nodal values, with the kernel itself evaluated exactly at Gauss points.

use num_complex::Complex64;

/// Nodes per local interpolation stencil.
pub(crate) const STENCIL: usize = 6;
const GAUSS_POINTS: usize = 12;

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub(crate) fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = 0.5 * (1.0 - x);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Lagrange basis values at `x` for abscissas `xs`.
pub(crate) fn lagrange_basis(xs: &[f64], x: f64) -> [f64; STENCIL] {
    let mut out = [0.0; STENCIL];
    for (l, &xl) in xs.iter().enumerate() {
        let mut v = 1.0;
        for (m, &xm) in xs.iter().enumerate() {
            if m != l {
                v *= (x - xm) / (xl - xm);
            }
        }
        out[l] = v;
    }
    out
}

/// Stencil start and Lagrange weights for interpolating nodal values at `r`.
pub(crate) fn stencil_at(radii: &[f64], r: f64) -> (usize, Vec<f64>) {
    let n_r = radii.len();
    let width = STENCIL.min(n_r);
    let i = radii.partition_point(|&b| b < r).min(n_r - 1);
    let s = (i as isize - 3).clamp(0, (n_r - width) as isize) as usize;
    let xs = &radii[s..s + width];
    let b = lagrange_basis(xs, r);
    (s, b[..width].to_vec())
}

/// Weights of the cell stencil: `Σ_l w[l] f(node[start + l])`.
pub(crate) type CellWeights = [f64; STENCIL];

#[derive(Debug)]
pub(crate) struct RadialTables {
    n_r: usize,
    width: usize,
    /// `start[i]`: first node index of cell `i`'s stencil.
    pub(crate) start: Vec<usize>,
    /// Cell endpoints.
    pub(crate) lo: Vec<f64>,
    pub(crate) hi: Vec<f64>,
    radii: Vec<f64>,
    gauss_x: Vec<f64>,
    gauss_w: Vec<f64>,
    /// Lagrange basis at the Gauss points of each cell, `[cell][gauss]`.
    basis: Vec<Vec<[f64; STENCIL]>>,
    q_max: usize,
    /// `(ρ/b_i)^q` kernel weights, indexed `q * n_r + i`.
    inner_w: Vec<CellWeights>,
    /// `(a_i/ρ)^p` kernel weights, indexed `p * n_r + i`.
    outer_w: Vec<CellWeights>,
    /// `(a_i/b_i)^q`, indexed `q * n_r + i`.
    ratio_pow: Vec<f64>,
    /// `ρ log ρ` kernel weights per cell.
    log_w: Vec<CellWeights>,
    /// `ρ` kernel weights per cell (area quadrature).
    area_w: Vec<CellWeights>,
}

impl RadialTables {
    pub(crate) fn new(radii: &[f64], q_max: usize) -> Self {
        let n_r = radii.len();
        let width = STENCIL.min(n_r);
        let (gauss_x, gauss_w) = gauss_legendre_unit(GAUSS_POINTS);
        let mut start = Vec::with_capacity(n_r);
        let mut lo = Vec::with_capacity(n_r);
        let mut hi = Vec::with_capacity(n_r);
        let mut basis = Vec::with_capacity(n_r);
        for i in 0..n_r {
            let a = if i == 0 { 0.0 } else { radii[i - 1] };
            let b = radii[i];
            let s = (i as isize - 3).clamp(0, (n_r - width) as isize) as usize;
            start.push(s);
            lo.push(a);
            hi.push(b);
            let xs = &radii[s..s + width];
            basis.push(
                gauss_x
                    .iter()
                    .map(|&g| lagrange_basis(xs, a + (b - a) * g))
                    .collect::<Vec<_>>(),
            );
        }
        let mut t = RadialTables {
            n_r,
            width,
            start,
            lo,
            hi,
            radii: radii.to_vec(),
            gauss_x,
            gauss_w,
            basis,
            q_max,
            inner_w: Vec::new(),
            outer_w: Vec::new(),
            ratio_pow: Vec::new(),
            log_w: Vec::new(),
            area_w: Vec::new(),
        };
        let mut inner_w = Vec::with_capacity((q_max + 1) * n_r);
        let mut outer_w = Vec::with_capacity((q_max + 1) * n_r);
        let mut ratio_pow = Vec::with_capacity((q_max + 1) * n_r);
        for q in 0..=q_max {
            for i in 0..n_r {
                let (a, b) = (t.lo[i], t.hi[i]);
                inner_w.push(t.cell_weights(i, |rho| (rho / b).powi(q as i32)));
                outer_w.push(if i == 0 {
                    // a = 0: the kernel is 1 for p = 0 and vanishes otherwise.
                    if q == 0 {
                        t.cell_weights(i, |_| 1.0)
                    } else {
                        [0.0; STENCIL]
                    }
                } else {
                    t.cell_weights(i, |rho| (a / rho).powi(q as i32))
                });
                ratio_pow.push((a / b).powi(q as i32));
            }
        }
        t.log_w = (0..n_r)
            .map(|i| t.cell_weights(i, |rho| rho * rho.ln()))
            .collect();
        t.area_w = (0..n_r).map(|i| t.cell_weights(i, |rho| rho)).collect();
        t.inner_w = inner_w;
        t.outer_w = outer_w;
        t.ratio_pow = ratio_pow;
        t
    }

    pub(crate) fn width(&self) -> usize {
        self.width
    }

    /// Weights of `∫_{cell i} K(ρ) f(ρ) dρ`.
    pub(crate) fn cell_weights(&self, i: usize, kernel: impl Fn(f64) -> f64) -> CellWeights {
        let (a, b) = (self.lo[i], self.hi[i]);
        let mut w = [0.0; STENCIL];
        for (g, (&x, &gw)) in self.gauss_x.iter().zip(&self.gauss_w).enumerate() {
            let k = kernel(a + (b - a) * x) * gw * (b - a);
            for l in 0..self.width {
                w[l] += k * self.basis[i][g][l];
            }
        }
        w
    }

    /// Weights of `∫_{lo}^{hi} K(ρ) f(ρ) dρ` for a sub-interval of cell `i`.
    pub(crate) fn partial_weights(
        &self,
        i: usize,
        lo: f64,
        hi: f64,
        kernel: impl Fn(f64) -> f64,
    ) -> CellWeights {
        let s = self.start[i];
        let xs = &self.radii[s..s + self.width];
        let mut w = [0.0; STENCIL];
        for (&x, &gw) in self.gauss_x.iter().zip(&self.gauss_w) {
            let rho = lo + (hi - lo) * x;
            let k = kernel(rho) * gw * (hi - lo);
            let basis = lagrange_basis(xs, rho);
            for l in 0..self.width {
                w[l] += k * basis[l];
            }
        }
        w
    }

    /// Cell index containing radius `r` (cells are `(lo, hi]`).
    pub(crate) fn cell_of(&self, r: f64) -> usize {
        self.hi.partition_point(|&b| b < r).min(self.n_r - 1)
    }

    #[inline]
    pub(crate) fn apply<T>(&self, i: usize, w: &CellWeights, f: &[T]) -> T
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::iter::Sum<T>,
    {
        let s = self.start[i];
        (0..self.width).map(|l| f[s + l] * w[l]).sum()
    }

    /// Weights for `∫_0^R f(r) r dr`, assembled per node.
    pub(crate) fn area_node_weights(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_r];
        for i in 0..self.n_r {
            let s = self.start[i];
            for l in 0..self.width {
                out[s + l] += self.area_w[i][l];
            }
        }
        out
    }

    /// `I(r_i) = ∫_0^{r_i} f(ρ) (ρ/r_i)^q dρ` at every node.
    pub(crate) fn inner(&self, q: usize, f: &[Complex64]) -> Vec<Complex64> {
        assert!(q <= self.q_max, "kernel exponent {q} beyond table");
        let mut out = vec![Complex64::new(0.0, 0.0); self.n_r];
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.n_r {
            let idx = q * self.n_r + i;
            acc = acc * self.ratio_pow[idx] + self.apply(i, &self.inner_w[idx], f);
            out[i] = acc;
        }
        out
    }

    /// `J(r_i) = ∫_{r_i}^{R} f(ρ) (r_i/ρ)^p dρ` at every node.
    pub(crate) fn outer(&self, p: usize, f: &[Complex64]) -> Vec<Complex64> {
        assert!(p <= self.q_max, "kernel exponent {p} beyond table");
        let mut out = vec![Complex64::new(0.0, 0.0); self.n_r];
        let mut acc = Complex64::new(0.0, 0.0);
        for i in (0..self.n_r.saturating_sub(1)).rev() {
            let idx = p * self.n_r + i + 1;
            acc = acc * self.ratio_pow[idx] + self.apply(i + 1, &self.outer_w[idx], f);
            out[i] = acc;
        }
        out
    }

    /// `∫_0^R f(ρ) ρ^q dρ` (for unit grids, the full moment).
    pub(crate) fn moment(&self, q: usize, f: &[Complex64]) -> Complex64 {
        let last = self.radii[self.n_r - 1];
        self.inner(q, f)[self.n_r - 1] * last.powi(q as i32)
    }

    /// `L(r_i) = ∫_{r_i}^{R} f(ρ) ρ log ρ dρ` at every node.
    pub(crate) fn outer_log(&self, f: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.n_r];
        let mut acc = Complex64::new(0.0, 0.0);
        for i in (0..self.n_r.saturating_sub(1)).rev() {
            acc += self.apply(i + 1, &self.log_w[i + 1], f);
            out[i] = acc;
        }
        out
    }

    /// `I(r)` at an arbitrary radius `0 < r <= R`.
    pub(crate) fn inner_at(
        &self,
        q: usize,
        f: &[Complex64],
        inner_nodes: &[Complex64],
        r: f64,
    ) -> Complex64 {
        let i = self.cell_of(r);
        let a = self.lo[i];
        let base = if i == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            inner_nodes[i - 1] * (a / r).powi(q as i32)
        };
        let w = self.partial_weights(i, a, r, |rho| (rho / r).powi(q as i32));
        base + self.apply(i, &w, f)
    }

    /// `J(r)` at an arbitrary radius `0 < r <= R`.
    pub(crate) fn outer_at(
        &self,
        p: usize,
        f: &[Complex64],
        outer_nodes: &[Complex64],
        r: f64,
    ) -> Complex64 {
        let i = self.cell_of(r);
        let b = self.hi[i];
        let w = self.partial_weights(i, r, b, |rho| (r / rho).powi(p as i32));
        outer_nodes[i] * (r / b).powi(p as i32) + self.apply(i, &w, f)
    }
}
