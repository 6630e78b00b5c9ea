//! Command dispatch: loads inputs, calls into the core library and collects
//! the artifacts to write.

use std::sync::Arc;

use num_complex::Complex64;
use phdisk_core::diagnostics::{
    ap_constant, bmo_oscillation, boundary_sobolev_seminorm, boundary_sobolev_seminorm_on,
    c2_growth_curve, conjugate_weighted_ratio, equicontinuity_modulus, exp_integrability_report,
    jn_exp_check, multiplier_ratio, trace_convergence, ArcFamily, BoundaryArc, DiagnosticReport,
};
use phdisk_core::grid::boundary_trace;
use phdisk_core::grid::io::read_raw;
use phdisk_core::similarity::{factorize, reconstruct, Normalization};
use phdisk_core::solvers::{
    parametrize_imag, parametrize_real, solve_conductivity, solve_riesz, SolveReport,
};
use phdisk_core::transforms::{
    beurling, cauchy, conjugate_function, green_potential, harmonic_conjugate_with_residual,
    holomorphic_extension, poisson_extend, reflect_transform, solve_dbar,
};
use phdisk_core::{make_grid, BoundaryFunction, DiskGrid, GridFunction};
use serde_json::{json, Value};

use crate::config::{Command, Input, Operator, RunConfig};
use crate::error::CliError;

pub enum Artifact {
    Grid(GridFunction),
    Boundary(BoundaryFunction),
}

pub struct Outcome {
    pub report: Value,
    /// Named outputs in the order they are written.
    pub artifacts: Vec<(String, Artifact)>,
    /// Set when the run completed but its checks did not pass.
    pub failure: Option<CliError>,
}

impl Outcome {
    fn new(report: Value) -> Self {
        Outcome {
            report,
            artifacts: Vec::new(),
            failure: None,
        }
    }

    fn grid(mut self, name: &str, f: GridFunction) -> Self {
        self.artifacts.push((name.to_string(), Artifact::Grid(f)));
        self
    }

    fn boundary(mut self, name: &str, b: BoundaryFunction) -> Self {
        self.artifacts
            .push((name.to_string(), Artifact::Boundary(b)));
        self
    }
}

/// Resolves the working grid and the named inputs of a config.
pub struct Inputs<'a> {
    cfg: &'a RunConfig,
    grid: Option<Arc<DiskGrid>>,
}

impl<'a> Inputs<'a> {
    pub fn new(cfg: &'a RunConfig) -> Self {
        Inputs { cfg, grid: None }
    }

    /// The grid from the config, or else from the first multi-ring input file.
    pub fn grid(&mut self) -> Result<Arc<DiskGrid>, CliError> {
        if let Some(g) = &self.grid {
            return Ok(g.clone());
        }
        let g = match self.cfg.grid {
            Some(spec) => make_grid(spec.n_theta, spec.n_r)?,
            None => {
                let mut found = None;
                for input in self.cfg.inputs.values() {
                    if let Input::Path(p) = input {
                        let raw = read_raw(p)?;
                        if raw.n_r > 1 {
                            found = Some(make_grid(raw.n_theta, raw.n_r)?);
                            break;
                        }
                    }
                }
                found.ok_or_else(|| {
                    CliError::Config(
                        "no \"grid\" given and no grid-valued input to infer it from".into(),
                    )
                })?
            }
        };
        self.grid = Some(g.clone());
        Ok(g)
    }

    fn spec(&self, name: &str) -> Result<&'a Input, CliError> {
        self.cfg
            .inputs
            .get(name)
            .ok_or_else(|| CliError::Config(format!("missing input {name:?}")))
    }

    pub fn grid_fn(&mut self, name: &str) -> Result<GridFunction, CliError> {
        let grid = self.grid()?;
        let f = match self.spec(name)? {
            Input::Constant(v) => GridFunction::constant(&grid, Complex64::new(*v, 0.0)),
            Input::Path(p) => {
                let raw = read_raw(p)?;
                if raw.n_r != grid.n_r() || raw.n_theta != grid.n_theta() {
                    return Err(phdisk_core::Error::GridMismatch(format!(
                        "input {name:?} is {}x{}, grid is {}x{} (n_r x n_theta)",
                        raw.n_r,
                        raw.n_theta,
                        grid.n_r(),
                        grid.n_theta()
                    ))
                    .into());
                }
                GridFunction::new(grid, raw.values)?
            }
        };
        log::info!("input {name}: grid function, max |f| = {:e}", f.max_abs());
        Ok(f)
    }

    /// A grid input that must have no masked nodes.
    pub fn finite_grid_fn(&mut self, name: &str) -> Result<GridFunction, CliError> {
        let f = self.grid_fn(name)?;
        if f.is_masked() {
            return Err(CliError::Config(format!(
                "input {name:?} has masked or non-finite nodes"
            )));
        }
        Ok(f)
    }

    /// Boundary data: a constant, a single-ring file, or the trace of a grid file.
    pub fn boundary(&mut self, name: &str) -> Result<BoundaryFunction, CliError> {
        let b = match self.spec(name)? {
            Input::Constant(v) => {
                let n = self.grid()?.n_theta();
                BoundaryFunction::constant(n, Complex64::new(*v, 0.0))
            }
            Input::Path(p) => {
                let raw = read_raw(p)?;
                if raw.n_r == 1 {
                    raw.into_boundary()?
                } else {
                    boundary_trace(&self.grid_fn(name)?)?
                }
            }
        };
        if let Some(g) = &self.grid {
            if b.n_theta() != g.n_theta() {
                return Err(phdisk_core::Error::GridMismatch(format!(
                    "input {name:?} has {} angles, grid has {}",
                    b.n_theta(),
                    g.n_theta()
                ))
                .into());
            }
        }
        if b.is_masked() {
            return Err(CliError::Config(format!(
                "input {name:?} has masked or non-finite nodes"
            )));
        }
        log::info!("input {name}: boundary function, sup = {:e}", b.sup_norm());
        Ok(b)
    }

    /// All inputs whose name starts with `prefix`, in name order.
    fn boundaries_with_prefix(&mut self, prefix: &str) -> Result<Vec<BoundaryFunction>, CliError> {
        let names: Vec<String> = self
            .cfg
            .inputs
            .keys()
            .filter(|k| k.starts_with(prefix))
            .cloned()
            .collect();
        names.iter().map(|n| self.boundary(n)).collect()
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize to JSON")
}

fn solve_report(r: &SolveReport) -> Value {
    log::info!(
        "converged after {} iterations, residual {:e}",
        r.iterations,
        r.residual_beltrami
    );
    to_value(r)
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let command = cfg
        .command
        .ok_or_else(|| CliError::Config("no command given".into()))?;
    let mut inputs = Inputs::new(cfg);
    if command != Command::Selftest || cfg.grid.is_some() {
        let g = inputs.grid()?;
        for s in &cfg.emit_slices {
            match s.slice() {
                phdisk_core::grid::io::Slice::Radius(r) => g.ring_of(r).map(drop)?,
                phdisk_core::grid::io::Slice::Angle(t) => g.angle_index_of(t).map(drop)?,
            }
        }
    }
    match command {
        Command::Transform => transform(cfg, &mut inputs),
        Command::Factorize => {
            let w = inputs.finite_grid_fn("w")?;
            let alpha = inputs.finite_grid_fn("alpha")?;
            let normalization = cfg.params.normalization.unwrap_or(Normalization::RealOnT);
            let fac = factorize(&w, &alpha, normalization, cfg.solver.zero_threshold)?;
            let report = json!({
                "normalization": normalization,
                "degenerate": fac.is_degenerate(),
                "residual_holo": fac.residual_holo,
                "residual_beltrami": fac.residual_beltrami,
            });
            let mut out = Outcome::new(report);
            if let Some(s) = fac.s {
                out = out.grid("s", s);
            }
            Ok(out.grid("f", fac.f))
        }
        Command::SolveDbar => {
            let a = inputs.finite_grid_fn("a")?;
            let psi = inputs.boundary("psi")?;
            let (sol, res) = solve_dbar(&a, &psi, cfg.params.lambda, cfg.params.theta0)?;
            Ok(Outcome::new(to_value(&res)).grid("A", sol))
        }
        Command::SolveBeltrami => {
            let alpha = inputs.finite_grid_fn("alpha")?;
            let f = inputs.finite_grid_fn("f")?;
            let psi = inputs.boundary("psi")?;
            let (s, report) = match cfg.params.normalization.unwrap_or(Normalization::RealOnT) {
                Normalization::RealOnT => {
                    parametrize_real(&alpha, &f, &psi, cfg.params.lambda, &cfg.solver)?
                }
                Normalization::ImaginaryOnT => {
                    parametrize_imag(&alpha, &f, &psi, cfg.params.lambda, &cfg.solver)?
                }
            };
            let w = reconstruct(&s, &f);
            Ok(Outcome::new(solve_report(&report))
                .grid("s", s)
                .grid("w", w))
        }
        Command::SolveRiesz => {
            let alpha = inputs.finite_grid_fn("alpha")?;
            let psi = inputs.boundary("psi")?;
            let sol = solve_riesz(&alpha, &psi, cfg.params.c, &cfg.solver)?;
            Ok(Outcome::new(solve_report(&sol.report))
                .grid("w", sol.w)
                .grid("s", sol.s)
                .grid("f", sol.f)
                .boundary("psi_sharp", sol.psi_sharp))
        }
        Command::SolveConductivity => {
            let sigma = inputs.finite_grid_fn("sigma")?;
            let psi = inputs.boundary("psi")?;
            let sol = solve_conductivity(&sigma, &psi, &cfg.solver)?;
            Ok(Outcome::new(solve_report(&sol.report))
                .grid("u", sol.u)
                .grid("v", sol.v)
                .grid("w", sol.w))
        }
        Command::Diagnose => diagnose(cfg, &mut inputs),
        Command::Selftest => selftest(cfg),
    }
}

fn transform(cfg: &RunConfig, inputs: &mut Inputs) -> Result<Outcome, CliError> {
    let op = cfg
        .params
        .operator
        .ok_or_else(|| CliError::Config("transform needs params.operator".into()))?;
    let grid = inputs.grid()?;
    let report = |max_abs: f64| json!({ "operator": op, "max_abs": max_abs });
    let out = match op {
        Operator::Conjugate => {
            let b = conjugate_function(&inputs.boundary("psi")?);
            return Ok(Outcome::new(report(b.sup_norm())).boundary("result", b));
        }
        Operator::Poisson => poisson_extend(&inputs.boundary("psi")?, &grid),
        Operator::HolomorphicExtension => holomorphic_extension(&inputs.boundary("psi")?, &grid),
        Operator::HarmonicConjugate => {
            let (v, residual) = harmonic_conjugate_with_residual(&inputs.finite_grid_fn("h")?);
            let mut r = report(v.max_abs());
            r["cauchy_riemann_residual"] = json!(residual);
            return Ok(Outcome::new(r).grid("result", v));
        }
        Operator::Cauchy => cauchy(&inputs.finite_grid_fn("h")?),
        Operator::Beurling => beurling(&inputs.finite_grid_fn("h")?),
        Operator::Reflect => reflect_transform(&inputs.finite_grid_fn("h")?),
        Operator::GreenPotential => green_potential(&inputs.finite_grid_fn("h")?),
    };
    Ok(Outcome::new(report(out.max_abs())).grid("result", out))
}

fn arc_param(cfg: &RunConfig, n_theta: usize) -> Result<BoundaryArc, CliError> {
    Ok(match cfg.params.arc {
        Some([a, b]) => BoundaryArc::from_angles(a, b, n_theta)?,
        None => BoundaryArc::full(n_theta),
    })
}

fn diagnose(cfg: &RunConfig, inputs: &mut Inputs) -> Result<Outcome, CliError> {
    let name = cfg
        .params
        .diagnostic
        .as_deref()
        .ok_or_else(|| CliError::Config("diagnose needs a diagnostic name".into()))?;
    let n_theta = inputs.grid()?.n_theta();
    let family = || ArcFamily::dyadic(n_theta, cfg.params.n_coarse.unwrap_or(4));
    let p = cfg.solver.p;
    let report: DiagnosticReport = match name {
        "bmo_oscillation" => {
            let table = bmo_oscillation(&inputs.boundary("h")?, &family()?)?;
            let (starts, (ends, osc)): (Vec<f64>, (Vec<f64>, Vec<f64>)) = table
                .per_arc
                .iter()
                .map(|(a, o)| (a.start_angle(), (a.end_angle(), *o)))
                .unzip();
            DiagnosticReport::new(name, vec![table.sup], vec![f64::INFINITY], 0.0)
                .with_detail("arc_start", starts)
                .with_detail("arc_end", ends)
                .with_detail("oscillation", osc)
        }
        "ap_constant" => {
            let a = ap_constant(&inputs.boundary("weight")?, p, &family()?)?;
            DiagnosticReport::new(name, vec![a], vec![f64::INFINITY], 0.0).with_detail("p", vec![p])
        }
        "jn_exp_check" => jn_exp_check(&inputs.boundary("h")?, &arc_param(cfg, n_theta)?)?,
        "boundary_sobolev_seminorm" => {
            let g = inputs.boundary("g")?;
            let v = match cfg.params.arc {
                Some(_) => boundary_sobolev_seminorm_on(&g, &arc_param(cfg, n_theta)?)?,
                None => boundary_sobolev_seminorm(&g)?,
            };
            DiagnosticReport::new(name, vec![v], vec![f64::INFINITY], 0.0)
        }
        "conjugate_weighted_ratio" => {
            let psis = inputs.boundaries_with_prefix("psi")?;
            if psis.is_empty() {
                return Err(CliError::Config(
                    "conjugate_weighted_ratio needs inputs named psi*".into(),
                ));
            }
            conjugate_weighted_ratio(&inputs.boundary("weight")?, &psis)?
        }
        "exp_integrability_report" => {
            let ells = cfg
                .params
                .ells
                .clone()
                .unwrap_or_else(|| vec![1.0, 2.0, 4.0]);
            exp_integrability_report(&inputs.finite_grid_fn("f")?, &ells)?
        }
        "equicontinuity_modulus" => {
            let sides = cfg
                .params
                .side_lengths
                .clone()
                .unwrap_or_else(|| vec![0.4, 0.2, 0.1, 0.05]);
            equicontinuity_modulus(&inputs.finite_grid_fn("beta")?, &sides)?
        }
        "c2_growth_curve" => {
            let radii = cfg
                .params
                .radii
                .clone()
                .unwrap_or_else(|| vec![1.0, 2.0, 4.0, 8.0]);
            c2_growth_curve(&inputs.finite_grid_fn("h")?, &radii)?
        }
        "multiplier_ratio" => multiplier_ratio(
            &inputs.finite_grid_fn("f")?,
            &inputs.finite_grid_fn("g")?,
            p,
            cfg.solver.gamma,
        )?,
        "trace_convergence" => trace_convergence(&inputs.finite_grid_fn("w")?, p)?,
        other => {
            return Err(CliError::Config(format!(
                "unknown diagnostic {other:?}; expected one of {}",
                DIAGNOSTICS.join(", ")
            )))
        }
    };
    log::info!("{name}: all bounds satisfied = {}", report.all_satisfied());
    Ok(Outcome::new(to_value(&report)))
}

pub const DIAGNOSTICS: [&str; 10] = [
    "bmo_oscillation",
    "ap_constant",
    "jn_exp_check",
    "boundary_sobolev_seminorm",
    "conjugate_weighted_ratio",
    "exp_integrability_report",
    "equicontinuity_modulus",
    "c2_growth_curve",
    "multiplier_ratio",
    "trace_convergence",
];

fn max_err_within(a: &GridFunction, b: &GridFunction, rho: f64) -> f64 {
    (a - b).max_abs_within(rho)
}

/// Closed-form transform checks on the configured grid (128 x 128 by default).
fn selftest(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let g = match cfg.grid {
        Some(s) => make_grid(s.n_theta, s.n_r)?,
        None => make_grid(128, 128)?,
    };
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let one = GridFunction::constant(&g, c(1.0, 0.0));
    let zbar = GridFunction::from_fn(&g, |z| z.conj());
    let quad = GridFunction::from_fn(&g, |z| c(z.norm_sqr() - 1.0, 0.0));
    let t = GridFunction::from_fn(&g, |z| z);
    let inner = g.radius(g.boundary_ring_index() - 1);
    let cos = BoundaryFunction::from_real_fn(g.n_theta(), f64::cos);
    let sin = BoundaryFunction::from_real_fn(g.n_theta(), f64::sin);

    let checks = [
        (
            "cauchy of 1 is conj(z)",
            max_err_within(&cauchy(&one), &zbar, 0.9) / zbar.max_abs_within(0.9),
            1e-8,
        ),
        (
            "cauchy of z is |z|^2 - 1",
            max_err_within(&cauchy(&t), &quad, 0.9) / quad.max_abs_within(0.9),
            1e-8,
        ),
        (
            "beurling of 1 vanishes",
            beurling(&one).max_abs_within(inner),
            1e-8,
        ),
        (
            "green potential of 4 is |z|^2 - 1",
            (&green_potential(&one.map(|v| 4.0 * v)) - &quad).max_abs(),
            1e-10,
        ),
        (
            "conjugate of cos is sin",
            conjugate_function(&cos)
                .zip_map(&sin, |a, b| a - b)
                .sup_norm(),
            1e-12,
        ),
    ];
    let report = DiagnosticReport::new(
        "selftest",
        checks.iter().map(|c| c.1).collect(),
        checks.iter().map(|c| c.2).collect(),
        0.0,
    )
    .with_detail("grid", vec![g.n_theta() as f64, g.n_r() as f64]);
    let failed: Vec<&str> = checks
        .iter()
        .zip(&report.satisfied)
        .filter(|(_, ok)| !**ok)
        .map(|(c, _)| c.0)
        .collect();
    let mut value = to_value(&report);
    value["checks"] = json!(checks.iter().map(|c| c.0).collect::<Vec<_>>());
    let mut out = Outcome::new(value);
    if !failed.is_empty() {
        out.failure = Some(CliError::SelfTest(failed.join("; ")));
    }
    Ok(out)
}
