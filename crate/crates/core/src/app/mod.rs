//! File-based orchestration behind the `freqgate` binary.
//!
//! Each command reads a JSON [`RunConfig`] (or defaults), derives its own
//! seed from the global one, writes its artifacts atomically into the output
//! directory and records a [`RunManifest`] next to them.

mod artifacts;
mod config;
mod report;
mod run;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use artifacts::{read_envelope, sha256_hex, stage_seed, write_atomic, Envelope, FileDigest, RunManifest};
pub use config::{
    CharacterizeStage, DesignStage, InferStage, ReportStage, RunConfig, SimulateStage, TransformSource, FORMAT_VERSION,
};
pub use report::{build_report, Report, Table, TableRow, BASIS};
pub use run::{
    execute, exit_code, run, CharacterizationOutput, Command, InferenceOutput, OutputFormat, StageOutput, EXIT_CONFIG,
    EXIT_INFEASIBLE, EXIT_NONFINITE_INIT, EXIT_OK, EXIT_RUNTIME,
};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "freqgate", version, about = "Frequency-bin gate design, simulation and characterization")]
pub struct Cli {
    #[command(subcommand)]
    command: CliCommand,
    /// JSON run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Global seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Format of tabular artifacts (counts, report tables).
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: FormatArg,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Optimize an EOM/PS cascade for the configured gate.
    Design {
        /// Number of independent optimizer restarts.
        #[arg(long)]
        restarts: Option<usize>,
        /// Minimum acceptable gate fidelity.
        #[arg(long)]
        fidelity_floor: Option<f64>,
    },
    /// Draw photon counts for all 16 input/output settings.
    Simulate,
    /// Reconstruct the mode transform from simulated classical probes.
    Characterize,
    /// Sample the posterior of the mode transform and noise from counts.
    Infer,
    /// Coincidence, accidental and pathway tables.
    Report,
}

impl Cli {
    fn command(&self) -> Command {
        match self.command {
            CliCommand::Design { .. } => Command::Design,
            CliCommand::Simulate => Command::Simulate,
            CliCommand::Characterize => Command::Characterize,
            CliCommand::Infer => Command::Infer,
            CliCommand::Report => Command::Report,
        }
    }

    /// Config file (or defaults) with command-line overrides applied.
    pub fn effective_config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.out_dir = o.clone();
        }
        if let CliCommand::Design { restarts, fidelity_floor } = self.command {
            if let Some(r) = restarts {
                cfg.design.optimizer.restarts = r;
            }
            if let Some(f) = fidelity_floor {
                cfg.design.problem.fidelity_floor = f;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::NonFiniteInit(_) => "non_finite_init",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
        Error::Csv(_) => "csv",
        Error::FormatVersion { .. } => "format_version",
        _ => "invalid_input",
    }
}

/// Parse `args`, run, and return the process exit code. Failures are
/// reported on stderr as one JSON object and still leave a manifest.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let cmd = cli.command();
    let format = match cli.format {
        FormatArg::Json => OutputFormat::Json,
        FormatArg::Csv => OutputFormat::Csv,
    };
    let started_at = artifacts::unix_now();
    let (out, seed, result) = match cli.effective_config() {
        Ok(cfg) => {
            let r = run(cmd, &cfg, format, cli.config.as_deref());
            (cfg.out_dir, cfg.seed, r)
        }
        Err(e) => (
            cli.out.clone().unwrap_or_else(|| PathBuf::from("out")),
            cli.seed.unwrap_or(0),
            Err(e),
        ),
    };
    match result {
        Ok(m) => m.exit_code,
        Err(e) => {
            let code = exit_code(&e);
            let diag = serde_json::json!({
                "command": cmd.name(),
                "error": error_kind(&e),
                "message": e.to_string(),
                "exit_code": code,
            });
            eprintln!("{diag}");
            let manifest = RunManifest {
                format_version: FORMAT_VERSION,
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                command: cmd.name().to_string(),
                seed,
                stage_seed: stage_seed(seed, cmd.name()),
                config_sha256: String::new(),
                inputs: Vec::new(),
                artifacts: Vec::new(),
                started_at,
                finished_at: artifacts::unix_now(),
                exit_code: code,
            };
            let _ = run::write_manifest(&out, &manifest);
            code
        }
    }
}
