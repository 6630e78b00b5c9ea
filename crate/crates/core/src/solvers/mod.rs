//! Damped fixed-point solvers for the holomorphic parametrization, the
//! generalized Riesz problem and the conductivity equation.

mod conductivity;
mod parametrize;
mod riesz;

pub use conductivity::{conductivity_residual, solve_conductivity, ConductivitySolution};
pub use parametrize::{
    g_alpha, parametrize_imag, parametrize_imag_with_initial, parametrize_real,
    parametrize_real_with_initial,
};
pub use riesz::{solve_riesz, solve_riesz_with_initial, RieszSolution};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest damping factor the solvers fall back to.
pub const MIN_DAMPING: f64 = 1.0 / 64.0;

/// Iteration controls shared by all solvers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Stop when the fixed-point increment (discrete `W^{1,2}` norm) drops
    /// below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Initial damping `τ`; halved whenever the increment grows.
    pub damping: f64,
    /// Relative modulus below which phase quotients `conj(w)/w` are zero.
    pub zero_threshold: f64,
    /// Hardy exponent used in reported norms.
    pub p: f64,
    /// Cone half-angle used by maximal-function diagnostics.
    pub gamma: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-8,
            max_iter: 200,
            damping: 1.0,
            zero_threshold: 1e-12,
            p: 2.0,
            gamma: std::f64::consts::FRAC_PI_4,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tol = {} must be positive",
                self.tol
            )));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "damping = {} must lie in (0, 1]",
                self.damping
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be positive".into()));
        }
        if !(self.zero_threshold >= 0.0) {
            return Err(Error::InvalidArgument("zero_threshold must be >= 0".into()));
        }
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "p = {} must lie in (1, ∞)",
                self.p
            )));
        }
        if !(self.gamma > 0.0 && self.gamma < std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidArgument(format!(
                "gamma = {} must lie in (0, π/2)",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// Convergence record and observed defects of a solve.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub increment_history: Vec<f64>,
    /// `‖∂̄w − α w̄‖_{L²(D_{0.9})}` of the assembled solution.
    pub residual_beltrami: f64,
    /// Defect in the prescribed boundary values.
    pub boundary_mismatch: f64,
    /// Defects of the remaining normalization conditions.
    pub normalization_defects: Vec<f64>,
    /// Output norm over input norm for the relevant a-priori bound.
    pub measured_constant: f64,
    /// Damping in force when the iteration stopped.
    pub damping: f64,
    pub converged: bool,
}

pub(crate) struct Outcome<S> {
    pub state: S,
    pub history: Vec<f64>,
    pub damping: f64,
}

impl<S> Outcome<S> {
    pub fn report(&self) -> SolveReport {
        SolveReport {
            iterations: self.history.len(),
            increment_history: self.history.clone(),
            damping: self.damping,
            converged: true,
            ..SolveReport::default()
        }
    }
}

/// Growth steps tolerated at the damping floor before giving up.
const FLOOR_PATIENCE: usize = 5;

/// `x ← (1 − τ)x + τG(x)` until `dist(G(x), x) < tol`.
///
/// `τ` halves whenever the increment grows; repeated growth at the floor
/// `MIN_DAMPING`, a non-finite increment or running out of iterations is a
/// [`Error::NonConvergence`].
pub(crate) fn damped_picard<S>(
    init: S,
    cfg: &SolverConfig,
    mut step: impl FnMut(&S) -> Result<S>,
    mix: impl Fn(&S, &S, f64) -> S,
    dist: impl Fn(&S, &S) -> Result<f64>,
) -> Result<Outcome<S>> {
    cfg.validate()?;
    let mut x = init;
    let mut tau = cfg.damping;
    let mut history: Vec<f64> = Vec::new();
    let mut strikes = 0;
    let fail = |history: Vec<f64>, tau: f64| Error::NonConvergence {
        iterations: history.len(),
        last: history.last().copied().unwrap_or(f64::NAN),
        damping: tau,
        history,
    };
    for _ in 0..cfg.max_iter {
        let gx = step(&x)?;
        let inc = dist(&gx, &x)?;
        history.push(inc);
        if !inc.is_finite() {
            return Err(fail(history, tau));
        }
        if inc < cfg.tol {
            return Ok(Outcome {
                state: gx,
                history,
                damping: tau,
            });
        }
        let n = history.len();
        if n >= 2 && inc > history[n - 2] {
            if tau <= MIN_DAMPING {
                strikes += 1;
                if strikes >= FLOOR_PATIENCE {
                    return Err(fail(history, tau));
                }
            }
            tau = (tau / 2.0).max(MIN_DAMPING);
        }
        x = mix(&x, &gx, tau);
    }
    Err(fail(history, tau))
}
