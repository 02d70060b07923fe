use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::artifacts::{read_envelope, sha256_file, sha256_hex, stage_seed, unix_now, write_atomic, Envelope, FileDigest, RunManifest};
use super::config::{RunConfig, TransformSource, FORMAT_VERSION};
use super::report::build_report;
use crate::bayes::{infer, summarize, Diagnostics, ParamVector, PosteriorSummary};
use crate::coherent::{characterize, designed_gauge, embed_matrix, InferredMetrics, ReconstructedMatrix};
use crate::counting::{simulate_dataset, CountDataset};
use crate::design::{optimize, DesignResult};
use crate::error::{Error, Result};
use crate::linalg::Mat4;
use crate::optics::{compose, projected_transform, ModeTransform, QubitModeMap};
use crate::reference;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Design,
    Simulate,
    Characterize,
    Infer,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Design => "design",
            Command::Simulate => "simulate",
            Command::Characterize => "characterize",
            Command::Infer => "infer",
            Command::Report => "report",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_NONFINITE_INIT: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonFiniteInit(_) => EXIT_NONFINITE_INIT,
        Error::Io(_) => EXIT_RUNTIME,
        _ => EXIT_CONFIG,
    }
}

/// Everything a run produced, before it is written.
pub struct StageOutput {
    pub artifacts: Vec<(PathBuf, Vec<u8>)>,
    pub inputs: Vec<PathBuf>,
    /// Human-readable digest for stdout.
    pub message: String,
    pub exit_code: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacterizationOutput {
    pub reconstruction: ReconstructedMatrix,
    pub metrics: InferredMetrics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InferenceOutput {
    pub summary: PosteriorSummary,
    pub burn_in: usize,
    pub thinning: usize,
    pub evaluations: u64,
    pub darks: (f64, f64),
    pub diagnostics: Diagnostics,
}

#[derive(Serialize)]
struct ChainHeader<'a> {
    format_version: u32,
    kind: &'a str,
    samples: usize,
    darks: (f64, f64),
}

#[derive(Serialize)]
struct ChainLine<'a> {
    log_posterior: f64,
    params: &'a ParamVector,
}

fn json_bytes<T: Serialize>(kind: &str, data: T) -> Result<Vec<u8>> {
    Ok(Envelope::new(kind, data).to_json()?.into_bytes())
}

fn read_dataset(path: &Path) -> Result<CountDataset> {
    let data = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        CountDataset::read_csv(std::fs::File::open(path)?)?
    } else {
        CountDataset::from_json(&std::fs::read_to_string(path)?)?
    };
    Ok(data)
}

/// Explicit path, else `counts.json` or `counts.csv` in the output directory.
fn dataset_path(explicit: &Option<PathBuf>, out: &Path) -> Result<PathBuf> {
    if let Some(p) = explicit {
        return Ok(p.clone());
    }
    ["counts.json", "counts.csv"]
        .iter()
        .map(|n| out.join(n))
        .find(|p| p.exists())
        .ok_or_else(|| Error::Config(format!("no dataset configured and no counts file in {}", out.display())))
}

/// The full mode transform and placement named by `src`.
fn resolve_transform(src: &TransformSource, out: &Path, inputs: &mut Vec<PathBuf>) -> Result<(ModeTransform, QubitModeMap)> {
    let from_design = |path: PathBuf, inputs: &mut Vec<PathBuf>| -> Result<(ModeTransform, QubitModeMap)> {
        let d: DesignResult = read_envelope(&path, "design_result")?;
        inputs.push(path);
        Ok((compose(&d.circuit), d.map))
    };
    match src {
        TransformSource::Designed => {
            let map = QubitModeMap::experiment();
            Ok((embed_matrix(&reference::designed_transform(), &map)?, map))
        }
        TransformSource::DesignOutput => from_design(out.join("design.json"), inputs),
        TransformSource::DesignFile { path } => from_design(path.clone(), inputs),
        TransformSource::Matrix { matrix } => {
            let map = QubitModeMap::experiment();
            Ok((embed_matrix(matrix, &map)?, map))
        }
        TransformSource::Circuit { circuit, map } => {
            map.check_inside(&circuit.grid)?;
            Ok((compose(circuit), map.clone()))
        }
    }
}

fn resolve_matrix(src: &TransformSource, out: &Path, inputs: &mut Vec<PathBuf>) -> Result<Mat4> {
    match src {
        TransformSource::Matrix { matrix } => Ok(*matrix),
        TransformSource::Circuit { circuit, map } => projected_transform(circuit, map),
        TransformSource::DesignOutput | TransformSource::DesignFile { .. } => {
            let (v, map) = resolve_transform(src, out, inputs)?;
            crate::optics::project_computational(&v, &map)
        }
        TransformSource::Designed => Ok(reference::designed_transform()),
    }
}

/// Run one stage without touching the filesystem beyond reading inputs.
pub fn execute(cmd: Command, cfg: &RunConfig, format: OutputFormat) -> Result<StageOutput> {
    let out = cfg.out_dir.as_path();
    let seed = stage_seed(cfg.seed, cmd.name());
    let mut inputs = Vec::new();
    let mut artifacts = Vec::new();
    let mut exit = EXIT_OK;
    let message = match cmd {
        Command::Design => {
            let r = optimize(&cfg.design.problem, &cfg.design.optimizer, seed)?;
            if !r.is_feasible() {
                exit = EXIT_INFEASIBLE;
            }
            let msg = r.summary();
            artifacts.push((out.join("design.json"), json_bytes("design_result", &r)?));
            msg
        }
        Command::Simulate => {
            let s = &cfg.simulate;
            let v4 = resolve_matrix(&s.transform, out, &mut inputs)?;
            let data = simulate_dataset(&v4, &s.noise, s.frames, seed)?;
            match format {
                OutputFormat::Json => artifacts.push((out.join("counts.json"), (data.to_json()? + "\n").into_bytes())),
                OutputFormat::Csv => {
                    let mut buf = Vec::new();
                    data.write_csv(&mut buf)?;
                    artifacts.push((out.join("counts.csv"), buf));
                }
            }
            let total: u64 = data.records.iter().map(|r| r.counts.n_ab).sum();
            format!("simulated 16 settings x {} frames, {total} coincidences", s.frames)
        }
        Command::Characterize => {
            let c = &cfg.characterize;
            let (v, map) = resolve_transform(&c.transform, out, &mut inputs)?;
            let gauge = c.gauge.clone().unwrap_or_else(designed_gauge);
            let reconstruction = characterize(&v, &map, &gauge, &c.settings, seed)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(u64::MAX);
            let metrics = reconstruction.metrics(&c.target, c.draws, &mut rng)?;
            let msg = format!(
                "F_inf = {:.5} (undetermined-phase spread {:.1e}), P_inf = {:.4}, {} undetermined phases",
                metrics.fidelity,
                metrics.fidelity_spread,
                metrics.success,
                reconstruction.undetermined().len()
            );
            artifacts.push((
                out.join("characterization.json"),
                json_bytes("characterization", CharacterizationOutput { reconstruction, metrics })?,
            ));
            msg
        }
        Command::Infer => {
            let path = dataset_path(&cfg.infer.dataset, out)?;
            let data = read_dataset(&path)?;
            inputs.push(path);
            let chain = infer(&data, &cfg.infer.prior, &cfg.infer.sampler, seed)?;
            let summary = summarize(&chain, &cfg.infer.sampler.target)?;
            let mut lines = serde_json::to_string(&ChainHeader {
                format_version: FORMAT_VERSION,
                kind: "posterior_chain",
                samples: chain.samples.len(),
                darks: chain.darks,
            })?;
            lines.push('\n');
            for (params, &log_posterior) in chain.samples.iter().zip(&chain.log_posterior) {
                lines.push_str(&serde_json::to_string(&ChainLine { log_posterior, params })?);
                lines.push('\n');
            }
            artifacts.push((out.join("chain.jsonl"), lines.into_bytes()));
            let msg = format!(
                "F = {:.4} +- {:.4}, P = {:.4} +- {:.4}, mu = {:.4} +- {:.4}, correct output {:.3} +- {:.3}",
                summary.fidelity.mean,
                summary.fidelity.std,
                summary.success.mean,
                summary.success.std,
                summary.mu.mean,
                summary.mu.std,
                summary.correct_output_probability.mean,
                summary.correct_output_probability.std,
            );
            let result = InferenceOutput {
                summary,
                burn_in: chain.burn_in,
                thinning: chain.thinning,
                evaluations: chain.evaluations,
                darks: chain.darks,
                diagnostics: chain.diagnostics,
            };
            artifacts.push((out.join("posterior_summary.json"), json_bytes("posterior_summary", &result)?));
            msg
        }
        Command::Report => {
            let path = dataset_path(&cfg.report.dataset, out)?;
            let data = read_dataset(&path)?;
            inputs.push(path);
            let summary_path = cfg
                .report
                .summary
                .clone()
                .or_else(|| Some(out.join("posterior_summary.json")).filter(|p| p.exists()));
            let summary = match &summary_path {
                Some(p) => {
                    let s: InferenceOutput = read_envelope(p, "posterior_summary")?;
                    inputs.push(p.clone());
                    Some(s.summary)
                }
                None => None,
            };
            let report = build_report(&data, summary.as_ref())?;
            match format {
                OutputFormat::Json => artifacts.push((out.join("report.json"), json_bytes("report", &report)?)),
                OutputFormat::Csv => {
                    for t in report.tables() {
                        artifacts.push((out.join(format!("{}.csv", t.name)), t.to_csv()?));
                    }
                }
            }
            report.render()
        }
    };
    Ok(StageOutput {
        artifacts,
        inputs,
        message,
        exit_code: exit,
    })
}

/// Execute, write artifacts atomically and record the manifest at
/// `<out>/manifest-<command>.json`. Returns the manifest.
pub fn run(cmd: Command, cfg: &RunConfig, format: OutputFormat, config_path: Option<&Path>) -> Result<RunManifest> {
    let started_at = unix_now();
    let stage = execute(cmd, cfg, format)?;
    let mut artifacts = Vec::with_capacity(stage.artifacts.len());
    for (path, bytes) in &stage.artifacts {
        write_atomic(path, bytes)?;
        artifacts.push(FileDigest {
            path: path.clone(),
            sha256: sha256_hex(bytes),
        });
    }
    let mut inputs = Vec::new();
    for p in config_path.into_iter().map(Path::to_path_buf).chain(stage.inputs) {
        inputs.push(FileDigest {
            sha256: sha256_file(&p)?,
            path: p,
        });
    }
    let manifest = RunManifest {
        format_version: FORMAT_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command: cmd.name().to_string(),
        seed: cfg.seed,
        stage_seed: stage_seed(cfg.seed, cmd.name()),
        config_sha256: sha256_hex(serde_json::to_string(cfg)?.as_bytes()),
        inputs,
        artifacts,
        started_at,
        finished_at: unix_now(),
        exit_code: stage.exit_code,
    };
    write_manifest(&cfg.out_dir, &manifest)?;
    println!("{}", stage.message.trim_end());
    Ok(manifest)
}

pub fn write_manifest(out: &Path, m: &RunManifest) -> Result<()> {
    let mut text = serde_json::to_string_pretty(m)?;
    text.push('\n');
    write_atomic(&out.join(format!("manifest-{}.json", m.command)), text.as_bytes())
}
