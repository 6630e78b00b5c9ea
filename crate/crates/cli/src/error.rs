use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("selftest failed: {0}")]
    SelfTest(String),

    #[error(transparent)]
    Core(#[from] phdisk_core::Error),

    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for solver non-convergence, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(phdisk_core::Error::NonConvergence { .. }) => 2,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        use phdisk_core::Error as E;
        match self {
            CliError::Config(_) => "config",
            CliError::SelfTest(_) => "selftest",
            CliError::Output { .. } => "output",
            CliError::Core(e) => match e {
                E::InvalidThetaCount(_) | E::InvalidRadialCount(_) => "grid",
                E::OffGridRadius(_) | E::OffGridAngle(_) => "off_grid",
                E::Masked(_) => "masked",
                E::EmptyCone { .. } => "empty_cone",
                E::NonReal(_) => "non_real",
                E::NonPositive(_) => "non_positive",
                E::ZeroFunction(_) => "zero_function",
                E::Degenerate(_) => "degenerate",
                E::InvalidArgument(_) => "invalid_argument",
                E::GridMismatch(_) => "grid_mismatch",
                E::NonConvergence { .. } => "non_convergence",
                E::Format(_) => "format",
                E::Io(_) => "io",
            },
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "kind": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        });
        if let CliError::Core(phdisk_core::Error::NonConvergence {
            iterations,
            last,
            damping,
            history,
        }) = self
        {
            v["iterations"] = json!(iterations);
            v["last_increment"] = json!(last);
            v["damping"] = json!(damping);
            v["increment_history"] = json!(history);
        }
        v
    }
}
