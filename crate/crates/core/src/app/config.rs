use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bayes::{InferenceConfig, PriorSpec};
use crate::coherent::{CharacterizationConfig, FixedPhase};
use crate::counting::NoiseParams;
use crate::design::{DesignProblem, OptimizerConfig, Topology};
use crate::error::{Error, Result};
use crate::linalg::Mat4;
use crate::optics::{CircuitSpec, QubitModeMap};
use crate::reference;

/// Major version of run configs and of every JSON artifact envelope.
pub const FORMAT_VERSION: u32 = 1;

/// Where a stage takes its single-photon transform from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TransformSource {
    /// The tabulated 2EOM/1PS design.
    #[default]
    Designed,
    /// `design.json` in the output directory.
    DesignOutput,
    /// A design artifact at an explicit path.
    DesignFile { path: PathBuf },
    Matrix { matrix: Mat4 },
    Circuit { circuit: CircuitSpec, map: QubitModeMap },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DesignStage {
    pub problem: DesignProblem,
    pub optimizer: OptimizerConfig,
}

impl Default for DesignStage {
    fn default() -> Self {
        DesignStage {
            problem: DesignProblem::cnot(Topology::two_eom_one_ps()),
            optimizer: OptimizerConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateStage {
    pub transform: TransformSource,
    pub noise: NoiseParams,
    pub frames: u64,
}

impl Default for SimulateStage {
    fn default() -> Self {
        SimulateStage {
            transform: TransformSource::Designed,
            noise: NoiseParams::retrieved(),
            frames: reference::FRAMES,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CharacterizeStage {
    pub transform: TransformSource,
    pub settings: CharacterizationConfig,
    /// Gauge-fixed phases; the designed values on the standard six slots
    /// when absent.
    pub gauge: Option<Vec<FixedPhase>>,
    /// Uniform draws of undetermined phases used to bound their effect on F.
    pub draws: usize,
    pub target: Mat4,
}

impl Default for CharacterizeStage {
    fn default() -> Self {
        CharacterizeStage {
            transform: TransformSource::Designed,
            settings: CharacterizationConfig::default(),
            gauge: None,
            draws: 1000,
            target: crate::optics::cnot(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InferStage {
    /// Count dataset (JSON or CSV by extension); `counts.json` in the output
    /// directory when absent.
    pub dataset: Option<PathBuf>,
    pub prior: PriorSpec,
    pub sampler: InferenceConfig,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportStage {
    pub dataset: Option<PathBuf>,
    /// Posterior summary; without one the pathway table is built from the
    /// raw coincidences.
    pub summary: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub format_version: u32,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub design: DesignStage,
    #[serde(default)]
    pub simulate: SimulateStage,
    #[serde(default)]
    pub characterize: CharacterizeStage,
    #[serde(default)]
    pub infer: InferStage,
    #[serde(default)]
    pub report: ReportStage,
}

fn default_seed() -> u64 {
    2019
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            format_version: FORMAT_VERSION,
            seed: default_seed(),
            out_dir: default_out(),
            design: DesignStage::default(),
            simulate: SimulateStage::default(),
            characterize: CharacterizeStage::default(),
            infer: InferStage::default(),
            report: ReportStage::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let probe: serde_json::Value = serde_json::from_str(text)?;
        check_version(probe.get("format_version"), "run config")?;
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::FormatVersion {
                found: self.format_version.to_string(),
                supported: FORMAT_VERSION.to_string(),
            });
        }
        self.design.problem.validate()?;
        self.simulate.noise.validate()?;
        if self.simulate.frames == 0 {
            return Err(Error::Config("simulate.frames must be positive".into()));
        }
        self.characterize.settings.validate()?;
        self.infer.prior.validate()?;
        if self.infer.sampler.samples == 0 {
            return Err(Error::Config("infer.sampler.samples must be positive".into()));
        }
        Ok(())
    }
}

pub(crate) fn check_version(v: Option<&serde_json::Value>, what: &str) -> Result<()> {
    match v.and_then(|v| v.as_u64()) {
        Some(n) if n == FORMAT_VERSION as u64 => Ok(()),
        Some(n) => Err(Error::FormatVersion {
            found: n.to_string(),
            supported: FORMAT_VERSION.to_string(),
        }),
        None => Err(Error::Config(format!("{what} lacks a numeric format_version"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = RunConfig::from_json(r#"{"format_version": 1}"#).unwrap();
        assert_eq!(c, RunConfig::default());
    }

    #[test]
    fn round_trips() {
        let c = RunConfig::default();
        let text = serde_json::to_string_pretty(&c).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), c);
    }

    #[test]
    fn rejects_unknown_fields() {
        assert!(RunConfig::from_json(r#"{"format_version": 1, "sed": 3}"#).is_err());
        let nested = r#"{"format_version": 1, "simulate": {"frames": 10, "nosie": {}}}"#;
        assert!(RunConfig::from_json(nested).is_err());
    }

    #[test]
    fn rejects_other_versions() {
        assert!(matches!(
            RunConfig::from_json(r#"{"format_version": 2}"#),
            Err(Error::FormatVersion { .. })
        ));
        assert!(RunConfig::from_json(r#"{"seed": 2}"#).is_err());
    }

    #[test]
    fn rejects_bad_values() {
        let bad = r#"{"format_version": 1, "simulate": {"frames": 0}}"#;
        assert!(RunConfig::from_json(bad).is_err());
        let bad = r#"{"format_version": 1, "simulate": {"noise": {"mu": 2.0, "eta_a": 0.1, "eta_b": 0.1, "dark_a": 0.0, "dark_b": 0.0}}}"#;
        assert!(RunConfig::from_json(bad).is_err());
    }

    #[test]
    fn transform_sources_parse() {
        let t: TransformSource = serde_json::from_str(r#"{"kind": "design_output"}"#).unwrap();
        assert_eq!(t, TransformSource::DesignOutput);
        let t: TransformSource = serde_json::from_str(r#"{"kind": "design_file", "path": "x.json"}"#).unwrap();
        assert!(matches!(t, TransformSource::DesignFile { .. }));
    }
}
