use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use phdisk_core::grid::io::Slice;
use phdisk_core::similarity::Normalization;
use phdisk_core::solvers::SolverConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Transform,
    Factorize,
    SolveDbar,
    SolveBeltrami,
    SolveRiesz,
    SolveConductivity,
    Diagnose,
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Transform => "transform",
            Command::Factorize => "factorize",
            Command::SolveDbar => "solve-dbar",
            Command::SolveBeltrami => "solve-beltrami",
            Command::SolveRiesz => "solve-riesz",
            Command::SolveConductivity => "solve-conductivity",
            Command::Diagnose => "diagnose",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n_theta: usize,
    pub n_r: usize,
}

/// A grid input: a file path, or a real constant filling the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Input {
    Constant(f64),
    Path(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SliceSpec {
    Radius(f64),
    Angle(f64),
}

impl SliceSpec {
    pub fn slice(self) -> Slice {
        match self {
            SliceSpec::Radius(r) => Slice::Radius(r),
            SliceSpec::Angle(t) => Slice::Angle(t),
        }
    }

    /// File stem suffix, e.g. `radius_1`.
    pub fn tag(self) -> String {
        match self {
            SliceSpec::Radius(r) => format!("radius_{r}"),
            SliceSpec::Angle(t) => format!("angle_{t}"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridFormat {
    #[default]
    Phd1,
    Csv,
}

impl GridFormat {
    pub fn extension(self) -> &'static str {
        match self {
            GridFormat::Phd1 => "phd",
            GridFormat::Csv => "csv",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Operator {
    Cauchy,
    Beurling,
    Reflect,
    GreenPotential,
    HarmonicConjugate,
    Poisson,
    HolomorphicExtension,
    Conjugate,
}

/// Command-specific parameters; unused fields are ignored by other commands.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub operator: Option<Operator>,
    pub normalization: Option<Normalization>,
    pub lambda: f64,
    pub theta0: f64,
    /// Prescribed `∫_T Im w_T` for `solve-riesz`.
    pub c: f64,
    pub diagnostic: Option<String>,
    pub n_coarse: Option<usize>,
    /// Arc `[start, end]` in radians, node-aligned.
    pub arc: Option<[f64; 2]>,
    pub ells: Option<Vec<f64>>,
    pub side_lengths: Option<Vec<f64>>,
    pub radii: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub command: Option<Command>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub inputs: BTreeMap<String, Input>,
    #[serde(default)]
    pub outputs: Option<PathBuf>,
    #[serde(default)]
    pub emit_slices: Vec<SliceSpec>,
    #[serde(default)]
    pub format: GridFormat,
    #[serde(default)]
    pub params: Params,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Resolves relative input paths against `base` (the config's directory).
    pub fn rebase_inputs(&mut self, base: &Path) {
        for input in self.inputs.values_mut() {
            if let Input::Path(p) = input {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
    }

    /// Checks that every referenced file exists and the solver settings are sane.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.command.is_none() {
            return Err(CliError::Config(
                "no command given (set \"command\" or pass it on the command line)".into(),
            ));
        }
        self.solver.validate()?;
        for (name, input) in &self.inputs {
            match input {
                Input::Path(p) if !p.is_file() => {
                    return Err(CliError::Config(format!(
                        "input {name:?}: {} does not exist",
                        p.display()
                    )));
                }
                Input::Constant(v) if !v.is_finite() => {
                    return Err(CliError::Config(format!("input {name:?} is not finite")));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_config() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{
                "command": "solve-riesz",
                "grid": {"n_theta": 64, "n_r": 32},
                "solver": {"tol": 1e-9},
                "inputs": {"alpha": 0.0, "psi": "psi.phd"},
                "outputs": "out",
                "emit_slices": [{"radius": 1.0}, {"angle": 0.0}],
                "params": {"c": 1.5}
            }"#,
        )
        .unwrap();
        assert_eq!(cfg.command, Some(Command::SolveRiesz));
        assert_eq!(cfg.solver.tol, 1e-9);
        assert_eq!(cfg.solver.max_iter, SolverConfig::default().max_iter);
        assert_eq!(cfg.inputs["alpha"], Input::Constant(0.0));
        assert_eq!(cfg.inputs["psi"], Input::Path("psi.phd".into()));
        assert_eq!(cfg.emit_slices[1], SliceSpec::Angle(0.0));
        assert_eq!(cfg.params.c, 1.5);
    }

    #[test]
    fn rejects_unknown_fields() {
        assert!(
            serde_json::from_str::<RunConfig>(r#"{"command": "selftest", "bogus": 1}"#).is_err()
        );
        assert!(serde_json::from_str::<RunConfig>(r#"{"params": {"lamda": 1}}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"command": "solve"}"#).is_err());
    }

    #[test]
    fn missing_input_file_fails_validation() {
        let mut cfg = RunConfig {
            command: Some(Command::Transform),
            ..RunConfig::default()
        };
        cfg.inputs
            .insert("h".into(), Input::Path("/nonexistent/h.phd".into()));
        assert!(matches!(cfg.validate(), Err(CliError::Config(_))));
    }

    #[test]
    fn slice_tags() {
        assert_eq!(SliceSpec::Radius(0.5).tag(), "radius_0.5");
        assert_eq!(SliceSpec::Angle(0.0).tag(), "angle_0");
    }
}
