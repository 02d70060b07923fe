use serde::{Deserialize, Serialize};

use super::dataset::{ConfigCounts, CountDataset, ExperimentConfig};
use crate::error::{Error, Result};
use crate::linalg::Mat4;
use crate::optics::ModeTransform;
use crate::reference;

/// Category probabilities below this are treated as zero in likelihoods.
pub const PROB_FLOOR: f64 = 1e-300;

/// Source and detector parameters, all per frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseParams {
    pub mu: f64,
    pub eta_a: f64,
    pub eta_b: f64,
    pub dark_a: f64,
    pub dark_b: f64,
}

impl NoiseParams {
    /// Values retrieved for the 2EOM/1PS experiment.
    pub fn retrieved() -> Self {
        NoiseParams {
            mu: reference::RETRIEVED_MU,
            eta_a: reference::RETRIEVED_ETA_A,
            eta_b: reference::RETRIEVED_ETA_B,
            dark_a: reference::DARK_A,
            dark_b: reference::DARK_B,
        }
    }

    pub fn noiseless(mu: f64, eta_a: f64, eta_b: f64) -> Self {
        NoiseParams { mu, eta_a, eta_b, dark_a: 0.0, dark_b: 0.0 }
    }

    fn fields(&self) -> [(&'static str, f64); 5] {
        [
            ("mu", self.mu),
            ("eta_a", self.eta_a),
            ("eta_b", self.eta_b),
            ("dark_a", self.dark_a),
            ("dark_b", self.dark_b),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.fields() {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::InvalidNoise(format!("{name} = {v} outside [0, 1)")));
            }
        }
        Ok(())
    }

    /// Names of parameters above 0.1, where the small-probability model is
    /// no longer trustworthy.
    pub fn large_parameters(&self) -> Vec<&'static str> {
        self.fields().into_iter().filter(|(_, v)| *v > 0.1).map(|(n, _)| n).collect()
    }
}

/// Which singles expression to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SinglesForm {
    /// First order in the efficiencies; the form used in the likelihood.
    #[default]
    Simplified,
    /// Keeps the double-occupancy click probability `eta + (1 - eta) eta`.
    Exact,
}

/// Detection probabilities of one input/output configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConfigProbs {
    pub p_a: f64,
    pub p_b: f64,
    pub p_ab: f64,
}

fn entry(v: &ModeTransform, out: i64, inp: i64) -> Result<num_complex::Complex64> {
    v.get(out, inp)
}

/// Probability of one photon in bin `m` and one in bin `n` (`m != n`) for
/// photons entering bins `u != v_in`.
pub fn per_pair_joint(v: &ModeTransform, u: i64, v_in: i64, m: i64, n: i64) -> Result<f64> {
    distinct(u, v_in)?;
    distinct(m, n)?;
    Ok((entry(v, m, u)? * entry(v, n, v_in)? + entry(v, m, v_in)? * entry(v, n, u)?).norm_sqr())
}

/// Probability of both photons leaving in bin `m`.
pub fn per_pair_double(v: &ModeTransform, u: i64, v_in: i64, m: i64) -> Result<f64> {
    distinct(u, v_in)?;
    Ok(2.0 * (entry(v, m, u)? * entry(v, m, v_in)?).norm_sqr())
}

/// Probability of exactly one photon in bin `m`, closed form (needs `V`
/// unitary over the window).
pub fn per_pair_marginal(v: &ModeTransform, u: i64, v_in: i64, m: i64) -> Result<f64> {
    distinct(u, v_in)?;
    let a = entry(v, m, u)?;
    let b = entry(v, m, v_in)?;
    Ok(a.norm_sqr() + b.norm_sqr() - 4.0 * (a * b).norm_sqr())
}

/// Same quantity as [`per_pair_marginal`] by summing the joint probability
/// over every other bin of the window.
pub fn per_pair_marginal_direct(v: &ModeTransform, u: i64, v_in: i64, m: i64) -> Result<f64> {
    let mut total = 0.0;
    for n in v.grid.bins().filter(|&n| n != m) {
        total += per_pair_joint(v, u, v_in, m, n)?;
    }
    Ok(total)
}

fn distinct(a: i64, b: i64) -> Result<()> {
    if a == b {
        return Err(Error::InvalidCounts(format!("bins must differ, got {a} twice")));
    }
    Ok(())
}

fn modes(cfg: &ExperimentConfig) -> (usize, usize, usize, usize) {
    let (k, l) = cfg.input;
    let (r, s) = cfg.output;
    (k as usize, 2 + l as usize, r as usize, 2 + s as usize)
}

/// Singles probabilities on detectors A (control output) and B (target output).
pub fn singles_probs(v4: &Mat4, cfg: &ExperimentConfig, p: &NoiseParams, form: SinglesForm) -> (f64, f64) {
    let (u, v, m, n) = modes(cfg);
    let one = |row: usize, eta: f64, dark: f64| {
        let a = v4[(row, u)];
        let b = v4[(row, v)];
        let linear = p.mu * eta * (a.norm_sqr() + b.norm_sqr());
        match form {
            SinglesForm::Simplified => linear + dark,
            SinglesForm::Exact => {
                // mu [eta + (1-eta) eta] p(2_m) + mu eta p(1_m), p(2_m) = 2|ab|^2
                let ab = (a * b).norm_sqr();
                let double = p.mu * (eta + (1.0 - eta) * eta) * 2.0 * ab;
                let single = p.mu * eta * (a.norm_sqr() + b.norm_sqr() - 4.0 * ab);
                double + single + dark
            }
        }
    };
    (one(m, p.eta_a, p.dark_a), one(n, p.eta_b, p.dark_b))
}

/// Total coincidence probability: correlated pairs plus `2 p_A p_B`
/// accidentals, singles in the simplified form.
pub fn coincidence_prob(v4: &Mat4, cfg: &ExperimentConfig, p: &NoiseParams) -> f64 {
    config_probs(v4, cfg, p).p_ab
}

pub fn config_probs(v4: &Mat4, cfg: &ExperimentConfig, p: &NoiseParams) -> ConfigProbs {
    let (u, v, m, n) = modes(cfg);
    let (p_a, p_b) = singles_probs(v4, cfg, p, SinglesForm::Simplified);
    let perm = v4[(m, u)] * v4[(n, v)] + v4[(m, v)] * v4[(n, u)];
    let p_ab = p.mu * p.eta_a * p.eta_b * perm.norm_sqr() + 2.0 * p_a * p_b;
    ConfigProbs { p_a, p_b, p_ab }
}

fn term(count: u64, prob: f64) -> f64 {
    if count == 0 {
        return 0.0;
    }
    if !(prob >= PROB_FLOOR) {
        return f64::NEG_INFINITY;
    }
    count as f64 * prob.ln()
}

/// Multinomial log-likelihood of one configuration, dropping the
/// parameter-independent normalization. Inconsistent counts or a nonzero
/// count in an impossible category give `-inf`.
pub fn config_log_likelihood(counts: &ConfigCounts, probs: &ConfigProbs, frames: u64) -> f64 {
    if counts.validate(frames).is_err() {
        return f64::NEG_INFINITY;
    }
    let ConfigProbs { p_a, p_b, p_ab } = *probs;
    let none = frames - counts.n_a - counts.n_b + counts.n_ab;
    // ln(1 - x) through ln_1p keeps the dominant "no click" category accurate.
    let x = p_a + p_b - p_ab;
    let none_term = if none == 0 {
        0.0
    } else if x < 1.0 {
        none as f64 * (-x).ln_1p()
    } else {
        f64::NEG_INFINITY
    };
    term(counts.n_a - counts.n_ab, p_a - p_ab) + term(counts.n_b - counts.n_ab, p_b - p_ab) + term(counts.n_ab, p_ab)
        + none_term
}

/// Sum of [`config_log_likelihood`] over every record of the dataset.
pub fn dataset_log_likelihood(data: &CountDataset, v4: &Mat4, p: &NoiseParams) -> f64 {
    data.records
        .iter()
        .map(|r| config_log_likelihood(&r.counts, &config_probs(v4, &r.config, p), r.config.frames))
        .sum()
}
