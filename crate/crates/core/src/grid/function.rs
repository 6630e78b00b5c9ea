use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use super::fourier::{analyze_rows, index_of, mode_of, synthesize_rows};
use super::DiskGrid;
use crate::error::{Error, Result};

/// Complex samples of a function on a [`DiskGrid`], stored row-major by
/// radius: `values[j * n_theta + k] = f(r_j e^{iθ_k})`.
///
/// Nodes where the sampled function is singular (non-finite) are carried in a
/// mask; integrals and norms touching a masked node fail rather than skip it.
#[derive(Clone, Debug)]
pub struct GridFunction {
    grid: Arc<DiskGrid>,
    values: Vec<Complex64>,
    mask: Option<Vec<bool>>,
}

impl GridFunction {
    pub fn new(grid: Arc<DiskGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a {}x{} grid",
                values.len(),
                grid.n_r(),
                grid.n_theta()
            )));
        }
        Ok(Self::from_raw(grid, values))
    }

    /// Wraps values, masking any non-finite entry.
    pub(crate) fn from_raw(grid: Arc<DiskGrid>, values: Vec<Complex64>) -> Self {
        let mut f = GridFunction {
            grid,
            values,
            mask: None,
        };
        f.remask();
        f
    }

    fn remask(&mut self) {
        let bad: Vec<bool> = self.values.iter().map(|v| !v.is_finite()).collect();
        let merged = match self.mask.take() {
            Some(m) => m.iter().zip(&bad).map(|(a, b)| *a || *b).collect(),
            None => bad,
        };
        if merged.iter().any(|&b| b) {
            for (v, &m) in self.values.iter_mut().zip(&merged) {
                if m {
                    *v = Complex64::new(f64::NAN, f64::NAN);
                }
            }
            self.mask = Some(merged);
        } else {
            self.mask = None;
        }
    }

    pub fn zeros(grid: &Arc<DiskGrid>) -> Self {
        Self::constant(grid, Complex64::new(0.0, 0.0))
    }

    pub fn constant(grid: &Arc<DiskGrid>, c: Complex64) -> Self {
        GridFunction {
            grid: grid.clone(),
            values: vec![c; grid.len()],
            mask: None,
        }
    }

    /// Samples `f(z)` at every node.
    pub fn from_fn(grid: &Arc<DiskGrid>, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self::from_polar(grid, |r, t| f(Complex64::from_polar(r, t)))
    }

    /// Samples `f(r, θ)` at every node.
    pub fn from_polar(grid: &Arc<DiskGrid>, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let nt = grid.n_theta();
        let mut values = Vec::with_capacity(grid.len());
        for &r in grid.radii() {
            for k in 0..nt {
                values.push(f(r, grid.theta(k)));
            }
        }
        Self::from_raw(grid.clone(), values)
    }

    /// Real-valued samples `f(r, θ)`.
    pub fn from_real_polar(grid: &Arc<DiskGrid>, f: impl Fn(f64, f64) -> f64) -> Self {
        Self::from_polar(grid, |r, t| Complex64::new(f(r, t), 0.0))
    }

    pub fn grid(&self) -> &Arc<DiskGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn value(&self, j: usize, k: usize) -> Complex64 {
        self.values[j * self.grid.n_theta() + k]
    }

    pub fn ring(&self, j: usize) -> &[Complex64] {
        let nt = self.grid.n_theta();
        &self.values[j * nt..(j + 1) * nt]
    }

    /// Overwrites ring `j` (used by constructors that own the boundary ring).
    pub fn set_ring(&mut self, j: usize, ring: &[Complex64]) {
        let nt = self.grid.n_theta();
        self.values[j * nt..(j + 1) * nt].copy_from_slice(ring);
        self.remask();
    }

    pub fn mask(&self) -> Option<&[bool]> {
        self.mask.as_deref()
    }

    pub fn is_masked(&self) -> bool {
        self.mask.is_some()
    }

    pub fn is_masked_at(&self, j: usize, k: usize) -> bool {
        self.mask
            .as_ref()
            .is_some_and(|m| m[j * self.grid.n_theta() + k])
    }

    /// True when any node of rings `0..rings` is masked.
    pub fn masked_within(&self, rings: usize) -> bool {
        let nt = self.grid.n_theta();
        self.mask
            .as_ref()
            .is_some_and(|m| m[..rings * nt].iter().any(|&b| b))
    }

    pub(crate) fn require_unmasked(&self, what: &'static str) -> Result<()> {
        if self.is_masked() {
            Err(Error::Masked(what))
        } else {
            Ok(())
        }
    }

    pub(crate) fn assert_transformable(&self, what: &str) {
        assert!(
            !self.is_masked(),
            "{what}: input has masked nodes; transforms need finite samples"
        );
        assert!(
            self.grid.is_unit(),
            "{what}: transforms operate on unit-disk grids"
        );
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    pub(crate) fn check_grid(&self, other: &GridFunction) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid, other.grid
            )))
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let mut out = GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            mask: self.mask.clone(),
        };
        out.remask();
        out
    }

    /// Pointwise `f(z, value)`.
    pub fn map_with_point(&self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let nt = self.grid.n_theta();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| f(self.grid.point(i / nt, i % nt), v))
            .collect();
        let mut out = GridFunction {
            grid: self.grid.clone(),
            values,
            mask: self.mask.clone(),
        };
        out.remask();
        out
    }

    /// Pointwise combination of two functions on the same grid.
    pub fn zip_map(
        &self,
        other: &GridFunction,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Self {
        assert!(self.same_grid(other), "zip_map on different grids");
        let mask = match (&self.mask, &other.mask) {
            (None, None) => None,
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (Some(a), Some(b)) => Some(a.iter().zip(b).map(|(x, y)| *x || *y).collect()),
        };
        let mut out = GridFunction {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            mask,
        };
        out.remask();
        out
    }

    pub fn re(&self) -> Self {
        self.map(|v| Complex64::new(v.re, 0.0))
    }

    pub fn im(&self) -> Self {
        self.map(|v| Complex64::new(v.im, 0.0))
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn exp(&self) -> Self {
        self.map(|v| v.exp())
    }

    pub fn abs(&self) -> Self {
        self.map(|v| Complex64::new(v.norm(), 0.0))
    }

    /// Largest modulus over unmasked nodes.
    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .filter(|v| v.is_finite())
            .fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Largest `|Im f|` over unmasked nodes.
    pub fn max_abs_im(&self) -> f64 {
        self.values
            .iter()
            .filter(|v| v.is_finite())
            .fold(0.0, |m, v| m.max(v.im.abs()))
    }

    /// Largest modulus over rings with radius `<= rho`.
    pub fn max_abs_within(&self, rho: f64) -> f64 {
        let n = self.grid.rings_within(rho) * self.grid.n_theta();
        self.values[..n]
            .iter()
            .filter(|v| v.is_finite())
            .fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn is_identically_zero(&self, threshold: f64) -> bool {
        self.values
            .iter()
            .all(|v| v.is_finite() && v.norm() <= threshold)
    }

    /// Angular Fourier coefficients of every ring.
    pub fn modal(&self) -> ModalField {
        let nt = self.grid.n_theta();
        let mut coeffs = self.values.clone();
        for row in coeffs.chunks_mut(nt) {
            analyze_rows(row, nt);
        }
        ModalField {
            n_r: self.grid.n_r(),
            n_theta: nt,
            coeffs,
        }
    }

    pub fn from_modal(grid: &Arc<DiskGrid>, modal: &ModalField) -> Self {
        assert_eq!(modal.n_r, grid.n_r());
        assert_eq!(modal.n_theta, grid.n_theta());
        let nt = grid.n_theta();
        let mut values = modal.coeffs.clone();
        for row in values.chunks_mut(nt) {
            synthesize_rows(row, nt);
        }
        Self::from_raw(grid.clone(), values)
    }

    /// Evaluates the trigonometric-in-θ, quintic-in-r interpolant at `z`,
    /// `|z| <= outer radius`.
    pub fn sample_at(&self, z: Complex64) -> Complex64 {
        let modal = self.modal();
        self.sample_modal(&modal, z)
    }

    /// [`sample_at`](Self::sample_at) for many points, sharing one modal
    /// decomposition.
    pub fn sample_many(&self, points: &[Complex64]) -> Vec<Complex64> {
        let modal = self.modal();
        points
            .iter()
            .map(|&z| self.sample_modal(&modal, z))
            .collect()
    }

    pub(crate) fn sample_modal(&self, modal: &ModalField, z: Complex64) -> Complex64 {
        let g = &self.grid;
        let nt = g.n_theta();
        let (r, t) = z.to_polar();
        let (start, basis) = super::quadrature::stencil_at(g.radii(), r);
        let mut acc = Complex64::new(0.0, 0.0);
        for (l, b) in basis.iter().enumerate() {
            let j = start + l;
            let mut ring = Complex64::new(0.0, 0.0);
            for idx in 0..nt {
                let m = mode_of(idx, nt);
                let c = modal.coeffs[j * nt + idx];
                if m == -(nt as i64) / 2 {
                    ring += c * (m as f64 * t).cos();
                } else {
                    ring += c * Complex64::from_polar(1.0, m as f64 * t);
                }
            }
            acc += ring * *b;
        }
        acc
    }
}

fn combine(
    a: &GridFunction,
    b: &GridFunction,
    f: impl Fn(Complex64, Complex64) -> Complex64,
) -> GridFunction {
    a.zip_map(b, f)
}

impl Add for &GridFunction {
    type Output = GridFunction;
    fn add(self, rhs: &GridFunction) -> GridFunction {
        combine(self, rhs, |a, b| a + b)
    }
}

impl Sub for &GridFunction {
    type Output = GridFunction;
    fn sub(self, rhs: &GridFunction) -> GridFunction {
        combine(self, rhs, |a, b| a - b)
    }
}

impl Mul for &GridFunction {
    type Output = GridFunction;
    fn mul(self, rhs: &GridFunction) -> GridFunction {
        combine(self, rhs, |a, b| a * b)
    }
}

impl Mul<Complex64> for &GridFunction {
    type Output = GridFunction;
    fn mul(self, rhs: Complex64) -> GridFunction {
        self.map(|a| a * rhs)
    }
}

impl Mul<f64> for &GridFunction {
    type Output = GridFunction;
    fn mul(self, rhs: f64) -> GridFunction {
        self.map(|a| a * rhs)
    }
}

impl Neg for &GridFunction {
    type Output = GridFunction;
    fn neg(self) -> GridFunction {
        self.map(|a| -a)
    }
}

/// Angular Fourier coefficients of a [`GridFunction`], ring by ring.
#[derive(Clone, Debug)]
pub struct ModalField {
    pub(crate) n_r: usize,
    pub(crate) n_theta: usize,
    pub(crate) coeffs: Vec<Complex64>,
}

/// Radial profile of one angular mode.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeProfile {
    pub mode_index: i64,
    pub radial_values: Vec<Complex64>,
}

impl ModalField {
    pub fn zeros(n_r: usize, n_theta: usize) -> Self {
        ModalField {
            n_r,
            n_theta,
            coeffs: vec![Complex64::new(0.0, 0.0); n_r * n_theta],
        }
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    /// Resolvable modes `(-n_theta/2, n_theta/2)`, Nyquist excluded.
    pub fn band(&self) -> std::ops::Range<i64> {
        let h = (self.n_theta / 2) as i64;
        (-h + 1)..h
    }

    pub fn in_band(&self, m: i64) -> bool {
        self.band().contains(&m)
    }

    pub fn profile(&self, m: i64) -> ModeProfile {
        let idx = index_of(m, self.n_theta);
        ModeProfile {
            mode_index: m,
            radial_values: (0..self.n_r)
                .map(|j| self.coeffs[j * self.n_theta + idx])
                .collect(),
        }
    }

    pub fn set_profile(&mut self, m: i64, values: &[Complex64]) {
        let idx = index_of(m, self.n_theta);
        for (j, v) in values.iter().enumerate() {
            self.coeffs[j * self.n_theta + idx] = *v;
        }
    }

    pub fn coeff(&self, j: usize, m: i64) -> Complex64 {
        self.coeffs[j * self.n_theta + index_of(m, self.n_theta)]
    }
}

/// Complex samples on the unit circle at `θ_k = 2πk/n`.
#[derive(Clone, Debug)]
pub struct BoundaryFunction {
    values: Vec<Complex64>,
    mask: Option<Vec<bool>>,
    fourier: OnceLock<Vec<Complex64>>,
}

impl PartialEq for BoundaryFunction {
    fn eq(&self, other: &Self) -> bool {
        self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a == b || (a.is_nan() && b.is_nan()))
    }
}

impl BoundaryFunction {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        let n = values.len();
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidThetaCount(n));
        }
        Ok(Self::from_raw(values))
    }

    pub(crate) fn from_raw(values: Vec<Complex64>) -> Self {
        let bad: Vec<bool> = values.iter().map(|v| !v.is_finite()).collect();
        let mask = bad.iter().any(|&b| b).then_some(bad);
        BoundaryFunction {
            values,
            mask,
            fourier: OnceLock::new(),
        }
    }

    pub fn from_fn(n_theta: usize, f: impl Fn(f64) -> Complex64) -> Self {
        Self::from_raw(
            (0..n_theta)
                .map(|k| f(2.0 * PI * k as f64 / n_theta as f64))
                .collect(),
        )
    }

    pub fn from_real_fn(n_theta: usize, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(n_theta, |t| Complex64::new(f(t), 0.0))
    }

    pub fn constant(n_theta: usize, c: Complex64) -> Self {
        Self::from_raw(vec![c; n_theta])
    }

    /// Builds the samples from Fourier coefficients in FFT index order.
    pub fn from_fourier(coeffs: Vec<Complex64>) -> Self {
        let n = coeffs.len();
        let mut values = coeffs.clone();
        synthesize_rows(&mut values, n);
        let out = Self::from_raw(values);
        let _ = out.fourier.set(coeffs);
        out
    }

    pub fn n_theta(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn angles(&self) -> Vec<f64> {
        let n = self.n_theta();
        (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
    }

    pub fn dtheta(&self) -> f64 {
        2.0 * PI / self.n_theta() as f64
    }

    pub fn mask(&self) -> Option<&[bool]> {
        self.mask.as_deref()
    }

    pub fn is_masked(&self) -> bool {
        self.mask.is_some()
    }

    pub(crate) fn require_unmasked(&self, what: &'static str) -> Result<()> {
        if self.is_masked() {
            Err(Error::Masked(what))
        } else {
            Ok(())
        }
    }

    /// Fourier coefficients (cached), FFT index order.
    pub fn fourier(&self) -> &[Complex64] {
        self.fourier.get_or_init(|| {
            let n = self.n_theta();
            let mut c = self.values.clone();
            analyze_rows(&mut c, n);
            c
        })
    }

    pub fn coefficient(&self, m: i64) -> Complex64 {
        self.fourier()[index_of(m, self.n_theta())]
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self::from_raw(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(
        &self,
        other: &BoundaryFunction,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Self {
        assert_eq!(self.n_theta(), other.n_theta(), "boundary sizes differ");
        Self::from_raw(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn re(&self) -> Self {
        self.map(|v| Complex64::new(v.re, 0.0))
    }

    pub fn im(&self) -> Self {
        self.map(|v| Complex64::new(v.im, 0.0))
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.im.abs() <= tol)
    }

    /// `∫_T f |dξ|` (unnormalized arclength).
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.dtheta()
    }

    /// `(1/2π) ∫_T f |dξ|`.
    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.n_theta() as f64
    }

    /// `(∫_T |f|^p |dξ|)^{1/p}`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        (self.values.iter().map(|v| v.norm().powf(p)).sum::<f64>() * self.dtheta()).powf(1.0 / p)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}

impl Add for &BoundaryFunction {
    type Output = BoundaryFunction;
    fn add(self, rhs: &BoundaryFunction) -> BoundaryFunction {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &BoundaryFunction {
    type Output = BoundaryFunction;
    fn sub(self, rhs: &BoundaryFunction) -> BoundaryFunction {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Mul for &BoundaryFunction {
    type Output = BoundaryFunction;
    fn mul(self, rhs: &BoundaryFunction) -> BoundaryFunction {
        self.zip_map(rhs, |a, b| a * b)
    }
}

impl Mul<f64> for &BoundaryFunction {
    type Output = BoundaryFunction;
    fn mul(self, rhs: f64) -> BoundaryFunction {
        self.map(|a| a * rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn modal_round_trip() {
        let g = make_grid(32, 8).unwrap();
        let f = GridFunction::from_fn(&g, |z| z * z.conj() * z + Complex64::new(0.3, -1.0));
        let back = GridFunction::from_modal(&g, &f.modal());
        for (a, b) in f.values().iter().zip(back.values()) {
            assert!((a - b).norm() < 1e-13);
        }
        let m = f.modal();
        // |z|² z = r³ e^{iθ}
        assert!((m.coeff(3, 1).re - 0.5f64.powi(3)).abs() < 1e-14);
        assert!(m.coeff(3, 2).norm() < 1e-14);
    }

    #[test]
    fn non_finite_samples_are_masked() {
        let g = make_grid(8, 4).unwrap();
        let f = GridFunction::from_fn(&g, |z| 1.0 / (z - 1.0));
        assert!(f.is_masked());
        assert!(f.is_masked_at(3, 0));
        assert!(!f.is_masked_at(3, 1));
        assert!(!f.masked_within(3));
    }

    #[test]
    fn sample_at_reproduces_polynomials() {
        let g = make_grid(16, 12).unwrap();
        let f = GridFunction::from_fn(&g, |z| z * z + z.conj() * 0.5);
        let z = Complex64::new(0.31, -0.42);
        let v = f.sample_at(z);
        assert!((v - (z * z + z.conj() * 0.5)).norm() < 1e-12);
        assert_eq!(f.sample_many(&[z, z * 0.5])[0], v);
    }

    #[test]
    fn boundary_integrals() {
        let b = BoundaryFunction::from_real_fn(64, |t| 1.0 + t.cos());
        assert!((b.integral().re - 2.0 * PI).abs() < 1e-13);
        assert!((b.mean().re - 1.0).abs() < 1e-14);
        let one = BoundaryFunction::constant(64, Complex64::new(1.0, 0.0));
        assert!((one.lp_norm(2.0) - (2.0 * PI).sqrt()).abs() < 1e-13);
    }
}
