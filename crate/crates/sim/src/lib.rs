//! Command-line runner for the descriptor experiments: config resolution,
//! execution and report rendering.

pub mod config;
pub mod report;
pub mod run;

use std::io::Write;
use std::process::ExitCode;

pub use config::{
    resolve, Cli, Command, ConfigError, Experiment, FileConfig, Format, Preset, RunArgs, RunConfig,
};
pub use report::{Check, Report, Row, Section};
pub use run::execute;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_RESIDUAL: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;

/// Resolves, runs and writes one report. Returns the process exit code.
pub fn main_with(cli: Cli, env_tolerance: Option<&str>) -> ExitCode {
    let Command::Run(args) = cli.command;
    let cfg = match resolve(&args, env_tolerance) {
        Ok(cfg) => cfg,
        Err(e) => return fail(&e),
    };
    let report = match execute(&cfg) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let text = report.render(cfg.format);
    let written = match &cfg.output {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        return fail(&e);
    }
    ExitCode::from(if report.passed() {
        EXIT_PASS
    } else {
        EXIT_RESIDUAL
    })
}

fn fail(e: &dyn std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_CONFIG)
}
