use serde::{Deserialize, Serialize};

use super::params::{log_density_packed, pack, unpack, ParamVector, PriorSpec};
use super::slice::{slice_sample, Diagnostics, SliceBasis, SliceConfig};
use super::params::PHASE_COORDS;
use crate::counting::{CountDataset, NoiseParams};
use crate::error::{Error, Result};
use crate::linalg::Mat4;
use crate::optics::{cnot, gate_metrics};
use crate::reference;

/// Settings for [`infer`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InferenceConfig {
    pub samples: usize,
    pub sampler: SliceConfig,
    /// Starting `(mu, eta_a, eta_b)`.
    pub initial_rates: (f64, f64, f64),
    /// Fixed dark probabilities; taken from the dataset metadata when absent.
    pub darks: Option<(f64, f64)>,
    /// Start from a prior draw instead of the designed transform.
    pub cold_start: bool,
    /// Gate whose fidelity drives automatic thinning.
    pub target: Mat4,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        // Simplex coordinates are fractions; rates are sampled as
        // logarithms, where a width of 0.5 is about half the current value.
        let mut widths = vec![0.05; 15];
        widths.extend([0.1; 10]);
        widths.extend([0.5; 3]);
        InferenceConfig {
            samples: 4096,
            sampler: SliceConfig {
                widths,
                basis: SliceBasis::Adaptive,
                ..SliceConfig::default()
            },
            initial_rates: (reference::RETRIEVED_MU, reference::RETRIEVED_ETA_A, reference::RETRIEVED_ETA_B),
            darks: None,
            cold_start: false,
            target: cnot(),
        }
    }
}

/// Posterior samples in model parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PosteriorChain {
    pub samples: Vec<ParamVector>,
    pub log_posterior: Vec<f64>,
    pub burn_in: usize,
    pub thinning: usize,
    pub darks: (f64, f64),
    pub evaluations: u64,
    /// Per sampler coordinate; the statistic is the target-gate fidelity.
    pub diagnostics: Diagnostics,
}

fn resolve_darks(data: &CountDataset, cfg: &InferenceConfig) -> (f64, f64) {
    cfg.darks
        .or_else(|| data.metadata.noise.map(|n: NoiseParams| (n.dark_a, n.dark_b)))
        .unwrap_or((reference::DARK_A, reference::DARK_B))
}

/// Starting point of the chain.
pub fn initial_point(prior: &PriorSpec, cfg: &InferenceConfig, seed: u64) -> Result<ParamVector> {
    if cfg.cold_start {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_c01d);
        Ok(ParamVector::random(cfg.initial_rates, prior, &mut rng))
    } else {
        ParamVector::from_transform(&reference::designed_transform(), cfg.initial_rates, prior)
    }
}

/// Slice-sample the posterior of `(V, mu, eta_a, eta_b)` given a complete
/// 16-setting dataset.
pub fn infer(data: &CountDataset, prior: &PriorSpec, cfg: &InferenceConfig, seed: u64) -> Result<PosteriorChain> {
    data.require_complete()?;
    prior.validate()?;
    if cfg.samples == 0 {
        return Err(Error::InvalidSampler("samples must be positive".into()));
    }
    let darks = resolve_darks(data, cfg);
    let start = initial_point(prior, cfg, seed)?;
    let z0 = pack(&start, prior);
    let target = |z: &[f64]| log_density_packed(z, data, prior, darks);
    let fidelity = |z: &[f64]| {
        unpack(z, prior)
            .ok()
            .and_then(|b| gate_metrics(&b.v4(), &cfg.target).ok())
            .map_or(0.0, |m| m.fidelity)
    };
    let chain = slice_sample(target, Some(&fidelity), &z0, cfg.samples, &cfg.sampler, seed)?;
    let samples = chain
        .samples
        .iter()
        .map(|z| unpack(z, prior))
        .collect::<Result<Vec<_>>>()?;
    Ok(PosteriorChain {
        samples,
        log_posterior: chain.log_density,
        burn_in: chain.burn_in,
        thinning: chain.thinning,
        darks,
        evaluations: chain.evaluations,
        diagnostics: Diagnostics::new(&chain.samples, &PHASE_COORDS, &chain.statistic),
    })
}
