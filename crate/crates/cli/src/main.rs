//! `phdisk`: batch front end for the disk transforms, solvers and diagnostics.
//!
//! A run reads a JSON [`config::RunConfig`], writes its grid outputs and a
//! `report.json` into the output directory, and exits with 0 on success, 1 on
//! invalid input and 2 when a fixed-point solver fails to converge. Errors are
//! also printed to stderr as a single JSON object.

mod config;
mod error;
mod run;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use phdisk_core::grid::io::{emit_slice, write_boundary, write_grid_function};
use serde_json::{json, Value};

use config::{Command, GridFormat, RunConfig, SliceSpec};
use error::CliError;
use run::Artifact;

const DEFAULT_OUT: &str = "phdisk-out";

#[derive(Debug, Parser)]
#[command(name = "phdisk", version, about)]
struct Cli {
    /// Command to run; overrides `command` in the config.
    #[arg(value_enum)]
    command: Option<Command>,

    /// Diagnostic name for `diagnose`; overrides `params.diagnostic`.
    name: Option<String>,

    /// JSON run configuration. Relative input paths resolve against its directory.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory; overrides `outputs` in the config.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Log progress to stderr.
    #[arg(long, short)]
    verbose: bool,
}

fn build_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let mut cfg = RunConfig::load(path)?;
            if let Some(dir) = path.parent() {
                cfg.rebase_inputs(dir);
            }
            cfg
        }
        None => RunConfig::default(),
    };
    if let Some(c) = cli.command {
        cfg.command = Some(c);
    }
    if let Some(n) = &cli.name {
        cfg.params.diagnostic = Some(n.clone());
    }
    if let Some(o) = &cli.out {
        cfg.outputs = Some(o.clone());
    }
    cfg.outputs
        .get_or_insert_with(|| PathBuf::from(DEFAULT_OUT));
    Ok(cfg)
}

/// `PHDISK_THREADS`, if set, must be a positive integer. Work runs on one
/// thread regardless, so any cap is satisfied.
fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var("PHDISK_THREADS") {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!(
                "PHDISK_THREADS = {s:?} is not a positive integer"
            ))),
        },
    }
}

fn output_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Output {
        path: path.display().to_string(),
        source,
    }
}

fn write_artifacts(
    dir: &Path,
    format: GridFormat,
    slices: &[SliceSpec],
    artifacts: &[(String, Artifact)],
) -> Result<Vec<String>, CliError> {
    let mut written = Vec::new();
    for (name, artifact) in artifacts {
        let file = format!("{name}.{}", format.extension());
        let path = dir.join(&file);
        match artifact {
            Artifact::Grid(f) => {
                write_grid_function(&path, f)?;
                written.push(file);
                for s in slices {
                    let file = format!("{name}_{}.csv", s.tag());
                    emit_slice(f, s.slice(), &dir.join(&file))?;
                    written.push(file);
                }
            }
            Artifact::Boundary(b) => {
                write_boundary(&path, b)?;
                written.push(file);
            }
        }
        log::info!("wrote {name}");
    }
    Ok(written)
}

fn write_report(dir: &Path, report: &Value) -> Result<(), CliError> {
    let path = dir.join("report.json");
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    fs::write(&path, text).map_err(output_err(&path))
}

fn execute(
    cfg: &RunConfig,
    dir: &Path,
    envelope: &mut Value,
) -> Result<Option<CliError>, CliError> {
    cfg.validate()?;
    let threads = thread_cap()?;
    envelope["threads"] = json!({ "requested": threads, "used": 1 });
    log::info!("running {}", cfg.command.map_or("?", Command::name));
    let outcome = run::run(cfg)?;
    let written = write_artifacts(dir, cfg.format, &cfg.emit_slices, &outcome.artifacts)?;
    envelope["report"] = outcome.report;
    envelope["outputs"] = json!(written);
    Ok(outcome.failure)
}

fn fail(err: &CliError) -> ExitCode {
    eprintln!("{}", json!({ "error": err.to_json() }));
    ExitCode::from(err.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::Config(e.to_string().trim_end().to_string())),
    };
    env_logger::Builder::new()
        .filter_level(if cli.verbose {
            log::LevelFilter::Info
        } else {
            log::LevelFilter::Warn
        })
        .format_timestamp(None)
        .init();

    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => return fail(&e),
    };
    let dir = cfg
        .outputs
        .clone()
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    if let Err(e) = fs::create_dir_all(&dir).map_err(output_err(&dir)) {
        return fail(&e);
    }

    let mut envelope = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "command": cfg.command.map(Command::name),
        "config": cfg,
    });
    let result = execute(&cfg, &dir, &mut envelope);
    let error = match result {
        Ok(failure) => failure,
        Err(e) => Some(e),
    };
    envelope["status"] = json!(if error.is_none() { "ok" } else { "error" });
    if let Some(e) = &error {
        envelope["error"] = e.to_json();
    }
    if let Err(e) = write_report(&dir, &envelope) {
        return fail(error.as_ref().unwrap_or(&e));
    }
    match error {
        Some(e) => fail(&e),
        None => ExitCode::SUCCESS,
    }
}
