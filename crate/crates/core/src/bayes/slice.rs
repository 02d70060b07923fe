//! Univariate slice sampling with stepping-out and shrinkage.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the post-burn-in stride is chosen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Thinning {
    Fixed(usize),
    /// Run `pilot` sweeps after burn-in and keep every k-th sweep, with k
    /// the smallest lag at which the statistic's autocorrelation drops
    /// below `threshold` (at most `max_stride`).
    Auto { pilot: usize, max_stride: usize, threshold: f64 },
}

/// Directions the univariate updates move along.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SliceBasis {
    /// Coordinate axes with the configured widths.
    #[default]
    Coordinate,
    /// Eigenvectors of the sample covariance, re-estimated at the quarter
    /// points of burn-in and frozen afterwards, with widths from the
    /// eigenvalues. Each sweep then also runs over the coordinate axes.
    Adaptive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SliceConfig {
    /// Initial width per coordinate; empty means 1 everywhere.
    pub widths: Vec<f64>,
    pub max_step_outs: usize,
    pub burn_in: usize,
    pub thinning: Thinning,
    pub basis: SliceBasis,
}

impl Default for SliceConfig {
    fn default() -> Self {
        SliceConfig {
            widths: Vec::new(),
            max_step_outs: 32,
            burn_in: 1024,
            thinning: Thinning::Auto {
                pilot: 2048,
                max_stride: 256,
                threshold: 0.5,
            },
            basis: SliceBasis::Coordinate,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Lag-1 autocorrelation per coordinate of the kept samples.
    pub lag1: Vec<f64>,
    /// Effective sample size per coordinate.
    pub ess: Vec<f64>,
    pub statistic_lag1: f64,
    pub statistic_ess: f64,
}

/// Kept samples and their bookkeeping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub samples: Vec<Vec<f64>>,
    pub log_density: Vec<f64>,
    pub statistic: Vec<f64>,
    /// Sweeps discarded before the first kept sample (burn-in plus pilot).
    pub burn_in: usize,
    pub thinning: usize,
    pub evaluations: u64,
    pub diagnostics: Diagnostics,
}

struct Slicer<'a, F> {
    f: &'a F,
    x: Vec<f64>,
    fx: f64,
    rng: ChaCha8Rng,
    dirs: Option<Vec<Vec<f64>>>,
    widths: Vec<f64>,
    max_step_outs: usize,
    evals: u64,
    trial: Vec<f64>,
    axis_widths: Vec<f64>,
}

impl<F: Fn(&[f64]) -> f64> Slicer<'_, F> {
    fn eval_at(&mut self, i: usize, t: f64) -> f64 {
        match &self.dirs {
            None => {
                self.trial.copy_from_slice(&self.x);
                self.trial[i] += t;
            }
            Some(dirs) => {
                for ((y, x), d) in self.trial.iter_mut().zip(&self.x).zip(&dirs[i]) {
                    *y = x + t * d;
                }
            }
        }
        self.evals += 1;
        (self.f)(&self.trial)
    }

    fn update(&mut self, i: usize) {
        let w = self.widths[i];
        let e: f64 = Exp1.sample(&mut self.rng);
        let level = self.fx - e;
        let mut lo = -w * self.rng.random::<f64>();
        let mut hi = lo + w;
        let m = self.max_step_outs;
        let mut j = (m as f64 * self.rng.random::<f64>()).floor() as usize;
        let mut k = (m - 1).saturating_sub(j);
        while j > 0 && self.eval_at(i, lo) > level {
            lo -= w;
            j -= 1;
        }
        while k > 0 && self.eval_at(i, hi) > level {
            hi += w;
            k -= 1;
        }
        for _ in 0..200 {
            let t = lo + (hi - lo) * self.rng.random::<f64>();
            let ft = self.eval_at(i, t);
            if ft > level {
                self.x.copy_from_slice(&self.trial);
                self.fx = ft;
                return;
            }
            if t < 0.0 {
                lo = t;
            } else {
                hi = t;
            }
        }
    }

    fn sweep(&mut self, order: &mut [usize]) {
        order.shuffle(&mut self.rng);
        for &i in order.iter() {
            self.update(i);
        }
        // With an adapted basis, follow each sweep along the principal axes
        // by one along the coordinate axes.
        if self.dirs.is_some() {
            let dirs = self.dirs.take();
            let w = std::mem::replace(&mut self.widths, self.axis_widths.clone());
            order.shuffle(&mut self.rng);
            for &i in order.iter() {
                self.update(i);
            }
            self.dirs = dirs;
            self.widths = w;
        }
    }

    /// Replace the directions by the eigenvectors of the covariance of
    /// `window`.
    fn adapt(&mut self, window: &[Vec<f64>]) {
        let d = self.x.len();
        let n = window.len();
        if n < 2 * d {
            return;
        }
        let mean: Vec<f64> = (0..d).map(|i| window.iter().map(|s| s[i]).sum::<f64>() / n as f64).collect();
        let cov = DMatrix::from_fn(d, d, |a, b| {
            window.iter().map(|s| (s[a] - mean[a]) * (s[b] - mean[b])).sum::<f64>() / (n - 1) as f64
        });
        let eig = SymmetricEigen::new(cov);
        let top = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
        if !(top > 0.0 && top.is_finite()) {
            return;
        }
        self.dirs = Some((0..d).map(|c| eig.eigenvectors.column(c).iter().copied().collect()).collect());
        self.widths = eig.eigenvalues.iter().map(|&l| 3.0 * l.max(top * 1e-14).sqrt()).collect();
    }
}

/// Sample from `exp(target)` starting at `init`, keeping `n` samples.
/// Thinning is judged on `statistic` (the log density when `None`).
pub fn slice_sample<F>(
    target: F,
    statistic: Option<&dyn Fn(&[f64]) -> f64>,
    init: &[f64],
    n: usize,
    cfg: &SliceConfig,
    seed: u64,
) -> Result<Chain>
where
    F: Fn(&[f64]) -> f64,
{
    let d = init.len();
    if d == 0 {
        return Err(Error::InvalidSampler("empty initial point".into()));
    }
    let widths = if cfg.widths.is_empty() { vec![1.0; d] } else { cfg.widths.clone() };
    if widths.len() != d || widths.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(Error::InvalidSampler(format!(
            "need {d} positive widths, got {:?}",
            cfg.widths
        )));
    }
    if cfg.max_step_outs == 0 {
        return Err(Error::InvalidSampler("max_step_outs must be positive".into()));
    }
    let f0 = target(init);
    if !f0.is_finite() {
        return Err(Error::NonFiniteInit(f0));
    }
    let stat = |x: &[f64], fx: f64| statistic.map_or(fx, |s| s(x));

    let mut s = Slicer {
        f: &target,
        x: init.to_vec(),
        fx: f0,
        rng: ChaCha8Rng::seed_from_u64(seed),
        dirs: None,
        axis_widths: widths.clone(),
        widths,
        max_step_outs: cfg.max_step_outs,
        evals: 1,
        trial: vec![0.0; d],
    };
    let mut order: Vec<usize> = (0..d).collect();

    let mut window = Vec::new();
    for it in 1..=cfg.burn_in {
        s.sweep(&mut order);
        if cfg.basis == SliceBasis::Adaptive {
            window.push(s.x.clone());
            if it % (cfg.burn_in / 4).max(1) == 0 && it < cfg.burn_in {
                s.adapt(&window);
                window.clear();
            }
        }
    }

    let (stride, pilot) = match cfg.thinning {
        Thinning::Fixed(k) => (k.max(1), 0),
        Thinning::Auto {
            pilot,
            max_stride,
            threshold,
        } => {
            let mut trace = Vec::with_capacity(pilot);
            for _ in 0..pilot {
                s.sweep(&mut order);
                trace.push(stat(&s.x, s.fx));
            }
            let max_stride = max_stride.max(1);
            let k = (1..=max_stride)
                .find(|&k| k >= trace.len() || autocorrelation(&trace, k) < threshold)
                .unwrap_or(max_stride);
            (k, pilot)
        }
    };

    let mut samples = Vec::with_capacity(n);
    let mut log_density = Vec::with_capacity(n);
    let mut statistic_trace = Vec::with_capacity(n);
    for _ in 0..n {
        for _ in 0..stride {
            s.sweep(&mut order);
        }
        statistic_trace.push(stat(&s.x, s.fx));
        samples.push(s.x.clone());
        log_density.push(s.fx);
    }

    let diagnostics = diagnose(&samples, &statistic_trace);
    Ok(Chain {
        samples,
        log_density,
        statistic: statistic_trace,
        burn_in: cfg.burn_in + pilot,
        thinning: stride,
        evaluations: s.evals,
        diagnostics,
    })
}

fn diagnose(samples: &[Vec<f64>], stat: &[f64]) -> Diagnostics {
    Diagnostics::new(samples, &[], stat)
}

impl Diagnostics {
    /// Per-coordinate lag-1 autocorrelation and ESS. Coordinates listed in
    /// `angles` are judged through their cosine and sine (worst of the two),
    /// since an unwrapped angle on a flat direction never settles.
    pub fn new(samples: &[Vec<f64>], angles: &[usize], stat: &[f64]) -> Self {
        let d = samples.first().map_or(0, Vec::len);
        let column = |i: usize, f: fn(f64) -> f64| samples.iter().map(|s| f(s[i])).collect::<Vec<f64>>();
        let mut lag1 = Vec::with_capacity(d);
        let mut ess = Vec::with_capacity(d);
        for i in 0..d {
            if angles.contains(&i) {
                let (c, s) = (column(i, f64::cos), column(i, f64::sin));
                lag1.push(autocorrelation(&c, 1).max(autocorrelation(&s, 1)));
                ess.push(effective_sample_size(&c).min(effective_sample_size(&s)));
            } else {
                let x = column(i, |v| v);
                lag1.push(autocorrelation(&x, 1));
                ess.push(effective_sample_size(&x));
            }
        }
        Diagnostics {
            lag1,
            ess,
            statistic_lag1: autocorrelation(stat, 1),
            statistic_ess: effective_sample_size(stat),
        }
    }
}

/// Sample autocorrelation at `lag` (0 for constant or too-short series).
pub fn autocorrelation(x: &[f64], lag: usize) -> f64 {
    let n = x.len();
    if lag >= n {
        return 0.0;
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let var: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    if var <= 0.0 {
        return 0.0;
    }
    let cov: f64 = x[..n - lag].iter().zip(&x[lag..]).map(|(a, b)| (a - mean) * (b - mean)).sum();
    cov / var
}

/// Effective sample size with Geyer's initial positive sequence estimator.
pub fn effective_sample_size(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 4 {
        return n as f64;
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    if x.iter().all(|v| (v - mean).abs() == 0.0) {
        return n as f64;
    }
    let mut tau = -1.0;
    let mut k = 0;
    while 2 * k + 1 < n {
        let pair = autocorrelation(x, 2 * k) + autocorrelation(x, 2 * k + 1);
        if pair <= 0.0 {
            break;
        }
        tau += 2.0 * pair;
        k += 1;
    }
    n as f64 / tau.max(1.0 / n as f64)
}

/// Difference of the two half-chain means in units of its standard error,
/// with each half's error from its effective sample size.
pub fn split_half_z(x: &[f64]) -> f64 {
    let (a, b) = x.split_at(x.len() / 2);
    let stats = |h: &[f64]| {
        let n = h.len() as f64;
        let m = h.iter().sum::<f64>() / n;
        let v = h.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        (m, v / effective_sample_size(h).max(1.0))
    };
    let (ma, va) = stats(a);
    let (mb, vb) = stats(b);
    if va + vb == 0.0 {
        return 0.0;
    }
    (ma - mb).abs() / (va + vb).sqrt()
}
