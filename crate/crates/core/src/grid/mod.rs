//! Polar discretization of the closed unit disk.
//!
//! Nodes sit at `r_j = R j / n_r` (`j = 1..=n_r`, the origin is excluded and
//! the last ring is the circle of radius `R`) and `θ_k = 2πk / n_theta`.
//! Angular structure is handled spectrally; radial integrals use local
//! quintic product integration, see [`quadrature`].

mod calculus;
pub mod fourier;
mod function;
pub mod io;
pub(crate) mod quadrature;

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

pub(crate) use calculus::ring_norm;
pub use calculus::{
    area_integral, area_integral_open, area_lp_norm, area_lp_norm_within, boundary_lp_norm,
    boundary_trace, boundary_trace_masked, circle_norm, hardy_norm, nontangential_max,
    sobolev_norm, sobolev_norm_within, wirtinger_derivatives, Cone,
};
pub use function::{BoundaryFunction, GridFunction, ModalField, ModeProfile};

use crate::error::{Error, Result};
use quadrature::RadialTables;

/// Polar tensor grid on a disk of radius `outer_radius` (1 for the unit disk).
pub struct DiskGrid {
    n_theta: usize,
    n_r: usize,
    outer_radius: f64,
    radii: Vec<f64>,
    radial_weights: Vec<f64>,
    tables: OnceLock<RadialTables>,
}

impl fmt::Debug for DiskGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiskGrid")
            .field("n_theta", &self.n_theta)
            .field("n_r", &self.n_r)
            .field("outer_radius", &self.outer_radius)
            .finish()
    }
}

impl PartialEq for DiskGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n_theta == other.n_theta
            && self.n_r == other.n_r
            && self.outer_radius == other.outer_radius
    }
}

/// Builds the unit-disk grid with `n_theta` angles and `n_r` rings.
pub fn make_grid(n_theta: usize, n_r: usize) -> Result<Arc<DiskGrid>> {
    DiskGrid::scaled(n_theta, n_r, 1.0)
}

impl DiskGrid {
    /// Grid on the disk of radius `outer_radius`.
    pub fn scaled(n_theta: usize, n_r: usize, outer_radius: f64) -> Result<Arc<DiskGrid>> {
        if n_theta < 8 || !n_theta.is_power_of_two() {
            return Err(Error::InvalidThetaCount(n_theta));
        }
        if n_r < 4 {
            return Err(Error::InvalidRadialCount(n_r));
        }
        if !(outer_radius.is_finite() && outer_radius > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "outer radius {outer_radius} must be positive"
            )));
        }
        let radii: Vec<f64> = (1..=n_r)
            .map(|j| outer_radius * j as f64 / n_r as f64)
            .collect();
        let tables = RadialTables::new(&radii, 0);
        let radial_weights = tables.area_node_weights();
        Ok(Arc::new(DiskGrid {
            n_theta,
            n_r,
            outer_radius,
            radii,
            radial_weights,
            tables: OnceLock::new(),
        }))
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    pub fn is_unit(&self) -> bool {
        self.outer_radius == 1.0
    }

    /// Node radii, strictly increasing, last entry equal to the outer radius.
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn radius(&self, j: usize) -> f64 {
        self.radii[j]
    }

    pub fn theta(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.n_theta as f64
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.n_theta).map(|k| self.theta(k)).collect()
    }

    /// Weights of `∫_0^R f(r) r dr`, one per ring.
    pub fn radial_weights(&self) -> &[f64] {
        &self.radial_weights
    }

    /// Index of the outermost ring (the circle itself).
    pub fn boundary_ring_index(&self) -> usize {
        self.n_r - 1
    }

    pub fn len(&self) -> usize {
        self.n_r * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dtheta(&self) -> f64 {
        2.0 * PI / self.n_theta as f64
    }

    /// Node `(j, k)` as a point of the plane.
    pub fn point(&self, j: usize, k: usize) -> num_complex::Complex64 {
        num_complex::Complex64::from_polar(self.radii[j], self.theta(k))
    }

    /// Ring index whose radius equals `r` (to 1e-12).
    pub fn ring_of(&self, r: f64) -> Result<usize> {
        let tol = 1e-12 * self.outer_radius;
        let j = ((r / self.outer_radius) * self.n_r as f64).round() as isize - 1;
        if j >= 0 && (j as usize) < self.n_r && (self.radii[j as usize] - r).abs() <= tol {
            Ok(j as usize)
        } else {
            Err(Error::OffGridRadius(r))
        }
    }

    /// Angle index whose angle equals `theta` modulo 2π (to 1e-12).
    pub fn angle_index_of(&self, theta: f64) -> Result<usize> {
        let t = theta.rem_euclid(2.0 * PI) / self.dtheta();
        let k = t.round();
        if (t - k).abs() <= 1e-9 {
            Ok(k as usize % self.n_theta)
        } else {
            Err(Error::OffGridAngle(theta))
        }
    }

    /// Number of rings with radius `<= rho` (used for interior restrictions).
    pub fn rings_within(&self, rho: f64) -> usize {
        self.radii.partition_point(|&r| r <= rho + 1e-12)
    }

    pub(crate) fn tables(&self) -> &RadialTables {
        self.tables
            .get_or_init(|| RadialTables::new(&self.radii, self.n_theta / 2 + 1))
    }
}
