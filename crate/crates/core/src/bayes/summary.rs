use serde::{Deserialize, Serialize};

use super::posterior::PosteriorChain;
use crate::error::{Error, Result};
use crate::linalg::{wrap_phase, Mat4};
use crate::optics::{fidelity, success_probability, two_photon_map};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std: f64,
}

impl Estimate {
    pub fn of(x: &[f64]) -> Self {
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let var = if x.len() > 1 {
            x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Estimate { mean, std: var.sqrt() }
    }

    /// Circular mean (in `(-pi, pi]`) and circular standard deviation
    /// `sqrt(-2 ln R)`.
    pub fn circular(angles: &[f64]) -> Self {
        let n = angles.len() as f64;
        let (s, c) = angles.iter().fold((0.0, 0.0), |(s, c), a| (s + a.sin(), c + a.cos()));
        let r = ((s / n).powi(2) + (c / n).powi(2)).sqrt().min(1.0);
        Estimate {
            mean: wrap_phase(s.atan2(c)),
            std: if r > 0.0 { (-2.0 * r.ln()).max(0.0).sqrt() } else { f64::INFINITY },
        }
    }
}

/// Posterior means and spreads of the quantities reported for a gate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub samples: usize,
    pub fidelity: Estimate,
    pub success: Estimate,
    pub mu: Estimate,
    pub eta_a: Estimate,
    pub eta_b: Estimate,
    pub v_amplitudes: [[Estimate; 4]; 4],
    pub v_phases: [[Estimate; 4]; 4],
    /// `[input][output]`, basis `C0T0, C0T1, C1T0, C1T1`; rows sum to 1.
    pub pathway_probabilities: [[f64; 4]; 4],
    pub pathway_std: [[f64; 4]; 4],
    /// Pathway probability of the target gate's output, averaged over inputs.
    pub correct_output_probability: Estimate,
}

/// `|W[out, in]|^2` normalized over outputs for each input.
pub fn pathway_probabilities(v4: &Mat4) -> [[f64; 4]; 4] {
    let w = two_photon_map(v4);
    let mut p = [[0.0; 4]; 4];
    for (input, row) in p.iter_mut().enumerate() {
        let total: f64 = (0..4).map(|o| w.0[(o, input)].norm_sqr()).sum();
        for (o, x) in row.iter_mut().enumerate() {
            *x = if total > 0.0 { w.0[(o, input)].norm_sqr() / total } else { 0.25 };
        }
    }
    p
}

pub fn summarize(chain: &PosteriorChain, target: &Mat4) -> Result<PosteriorSummary> {
    let n = chain.samples.len();
    if n == 0 {
        return Err(Error::InvalidSampler("empty chain".into()));
    }
    let correct: [usize; 4] = std::array::from_fn(|input| {
        (0..4)
            .max_by(|&a, &b| target[(a, input)].norm_sqr().total_cmp(&target[(b, input)].norm_sqr()))
            .unwrap_or(input)
    });

    let mut fid = Vec::with_capacity(n);
    let mut succ = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    let mut paths = vec![[[0.0; 4]; 4]; n];
    let mut amps = vec![[[0.0; 4]; 4]; n];
    let mut phases = vec![[[0.0; 4]; 4]; n];
    for (k, s) in chain.samples.iter().enumerate() {
        let v4 = s.v4();
        let w = two_photon_map(&v4);
        succ.push(success_probability(&w));
        fid.push(fidelity(&w, target)?);
        paths[k] = pathway_probabilities(&v4);
        right.push((0..4).map(|i| paths[k][i][correct[i]]).sum::<f64>() / 4.0);
        amps[k] = v4.amplitudes();
        phases[k] = v4.phases();
    }
    let grid = |src: &[[[f64; 4]; 4]], f: fn(&[f64]) -> Estimate| -> [[Estimate; 4]; 4] {
        std::array::from_fn(|i| std::array::from_fn(|j| f(&src.iter().map(|m| m[i][j]).collect::<Vec<_>>())))
    };
    let path_est = grid(&paths, Estimate::of);
    let rates = |f: fn(&super::ParamVector) -> f64| Estimate::of(&chain.samples.iter().map(f).collect::<Vec<_>>());
    Ok(PosteriorSummary {
        samples: n,
        fidelity: Estimate::of(&fid),
        success: Estimate::of(&succ),
        mu: rates(|s| s.mu),
        eta_a: rates(|s| s.eta_a),
        eta_b: rates(|s| s.eta_b),
        v_amplitudes: grid(&amps, Estimate::of),
        v_phases: grid(&phases, Estimate::circular),
        pathway_probabilities: path_est.map(|row| row.map(|e| e.mean)),
        pathway_std: path_est.map(|row| row.map(|e| e.std)),
        correct_output_probability: Estimate::of(&right),
    })
}
