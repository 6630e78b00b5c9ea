//! Numerical probes of the oscillation, weight and summability inequalities:
//! BMO oscillation and `A_p` constants over dyadic arcs, the John–Nirenberg
//! exponential bound, Trudinger–Moser type growth, local energy moduli of the
//! Cauchy transform, growth of the renormalized transform, the multiplier
//! ratio and trace convergence.
//!
//! Inequalities with explicit constants are asserted; those with unspecified
//! constants are measured and reported.

mod arcs;
mod interior;

pub use arcs::{
    ap_constant, arc_mean_oscillation, bmo_oscillation, boundary_sobolev_seminorm,
    boundary_sobolev_seminorm_on, conjugate_weighted_ratio, jn_exp_check, local_oscillation,
    ArcFamily, BmoTable, BoundaryArc,
};
pub use interior::{
    c2_growth_curve, equicontinuity_modulus, exp_integrability_report, multiplier_family,
    multiplier_ratio, square_energy, trace_convergence,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Measured quantities against their bounds.
///
/// `satisfied[i]` holds exactly when `measured[i] <= bound[i] * (1 + slack)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub name: String,
    pub measured: Vec<f64>,
    pub bound: Vec<f64>,
    pub satisfied: Vec<bool>,
    pub slack: f64,
    /// Auxiliary tables (inputs, intermediate values) keyed by name.
    pub details: BTreeMap<String, Vec<f64>>,
}

impl DiagnosticReport {
    pub fn new(name: &str, measured: Vec<f64>, bound: Vec<f64>, slack: f64) -> Self {
        assert_eq!(measured.len(), bound.len());
        let satisfied = measured
            .iter()
            .zip(&bound)
            .map(|(m, b)| *m <= b * (1.0 + slack))
            .collect();
        DiagnosticReport {
            name: name.to_string(),
            measured,
            bound,
            satisfied,
            slack,
            details: BTreeMap::new(),
        }
    }

    pub fn with_detail(mut self, key: &str, values: Vec<f64>) -> Self {
        self.details.insert(key.to_string(), values);
        self
    }

    pub fn all_satisfied(&self) -> bool {
        self.satisfied.iter().all(|&s| s)
    }
}

pub(crate) fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
