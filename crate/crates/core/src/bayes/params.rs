use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::counting::{dataset_log_likelihood, CountDataset, NoiseParams};
use crate::error::{Error, Result};
use crate::linalg::Mat4;
use crate::reference;

/// Slots `(row, col)` of the 4x4 transform whose phases are sampled, in
/// packing order. Rows and columns run over `C0, C1, T0, T1`.
pub const FREE_PHASE_SLOTS: [(usize, usize); 10] =
    [(0, 1), (0, 2), (0, 3), (1, 0), (2, 0), (2, 2), (2, 3), (3, 0), (3, 2), (3, 3)];

/// Slots whose phases are held at constants (one gauge choice).
pub const FIXED_PHASE_SLOTS: [(usize, usize); 6] = reference::GAUGE_FIXED_SLOTS;

/// Sampler dimension: 15 simplex coordinates, 10 phases, 3 rates.
pub const DIM: usize = 28;
const N_SIMPLEX: usize = 15;
const PHASE0: usize = N_SIMPLEX;
const RATE0: usize = N_SIMPLEX + 10;
/// Sampler coordinates holding phases.
pub const PHASE_COORDS: [usize; 10] = [15, 16, 17, 18, 19, 20, 21, 22, 23, 24];

/// One point of the model parameter space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamVector {
    pub squared_moduli: [[f64; 4]; 4],
    pub free_phases: [f64; 10],
    pub fixed_phases: [f64; 6],
    pub mu: f64,
    pub eta_a: f64,
    pub eta_b: f64,
}

/// Uniform priors: rates on `rate_support`, phases on the circle, squared
/// moduli uniform on the simplex `sum r^2 = norm_constraint`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PriorSpec {
    pub norm_constraint: f64,
    pub rate_support: (f64, f64),
    /// Values of the fixed phase slots, in [`FIXED_PHASE_SLOTS`] order.
    pub fixed_phases: [f64; 6],
}

impl Default for PriorSpec {
    fn default() -> Self {
        let phases = reference::designed_transform().phases();
        PriorSpec {
            norm_constraint: reference::NORM_CONSTRAINT,
            rate_support: (0.0, 1.0),
            fixed_phases: FIXED_PHASE_SLOTS.map(|(i, j)| phases[i][j]),
        }
    }
}

impl PriorSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.norm_constraint > 0.0 && self.norm_constraint.is_finite()) {
            return Err(Error::InvalidSampler(format!(
                "norm constraint must be positive, got {}",
                self.norm_constraint
            )));
        }
        let (lo, hi) = self.rate_support;
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(Error::InvalidSampler(format!("rate support ({lo}, {hi}) not inside [0, 1]")));
        }
        Ok(())
    }

    fn rate_inside(&self, x: f64) -> bool {
        x > self.rate_support.0 && x < self.rate_support.1
    }
}

impl ParamVector {
    /// Transform `V` with amplitude `sqrt(r^2)` and the assembled phases.
    pub fn v4(&self) -> Mat4 {
        let mut phases = [[0.0; 4]; 4];
        for (k, &(i, j)) in FREE_PHASE_SLOTS.iter().enumerate() {
            phases[i][j] = self.free_phases[k];
        }
        for (k, &(i, j)) in FIXED_PHASE_SLOTS.iter().enumerate() {
            phases[i][j] = self.fixed_phases[k];
        }
        let amps = self.squared_moduli.map(|row| row.map(|r2| r2.max(0.0).sqrt()));
        Mat4::from_polar(&amps, &phases)
    }

    pub fn noise(&self, dark_a: f64, dark_b: f64) -> NoiseParams {
        NoiseParams {
            mu: self.mu,
            eta_a: self.eta_a,
            eta_b: self.eta_b,
            dark_a,
            dark_b,
        }
    }

    pub fn moduli_sum(&self) -> f64 {
        self.squared_moduli.iter().flatten().sum()
    }

    /// Start from a transform: squared moduli rescaled onto the prior's
    /// simplex, free phases copied, fixed phases from the prior.
    pub fn from_transform(v4: &Mat4, rates: (f64, f64, f64), prior: &PriorSpec) -> Result<Self> {
        let amps = v4.amplitudes();
        let phases = v4.phases();
        let total: f64 = amps.iter().flatten().map(|a| a * a).sum();
        if !(total > 0.0) {
            return Err(Error::NonFiniteInit(total));
        }
        let scale = prior.norm_constraint / total;
        Ok(ParamVector {
            squared_moduli: amps.map(|row| row.map(|a| a * a * scale)),
            free_phases: FREE_PHASE_SLOTS.map(|(i, j)| phases[i][j].rem_euclid(TAU)),
            fixed_phases: prior.fixed_phases,
            mu: rates.0,
            eta_a: rates.1,
            eta_b: rates.2,
        })
    }

    /// A draw from the prior over moduli and phases, with the given rates.
    pub fn random<R: Rng + ?Sized>(rates: (f64, f64, f64), prior: &PriorSpec, rng: &mut R) -> Self {
        let e: Vec<f64> = (0..16).map(|_| Exp1.sample(rng)).collect();
        let sum: f64 = e.iter().sum();
        let mut squared_moduli = [[0.0; 4]; 4];
        for (k, x) in e.iter().enumerate() {
            squared_moduli[k / 4][k % 4] = prior.norm_constraint * x / sum;
        }
        ParamVector {
            squared_moduli,
            free_phases: std::array::from_fn(|_| rng.random_range(0.0..TAU)),
            fixed_phases: prior.fixed_phases,
            mu: rates.0,
            eta_a: rates.1,
            eta_b: rates.2,
        }
    }
}

/// Sampler coordinates, chosen so the directions the counts cannot see
/// are coordinate axes:
///
/// - `z[0] = w`, the share of the norm in the control rows (`C0, C1`);
/// - `z[1..8]`: squared moduli of rows `C0, C1` (row-major, `C1T1`
///   implied) as fractions of `w * norm`;
/// - `z[8..15]`: the same for rows `T0, T1` (`T1T1` implied) over
///   `(1 - w) * norm`;
/// - `z[15..25]`: the free phases;
/// - `z[25..28]`: `ln mu`, `ln(mu eta_a w)`, `ln(mu eta_b (1 - w))`.
///
/// Singles fix `mu eta_a w` and `mu eta_b (1 - w)`; moving `w` with those
/// held leaves every count probability unchanged.
pub fn pack(beta: &ParamVector, prior: &PriorSpec) -> [f64; DIM] {
    let r = &beta.squared_moduli;
    let control: f64 = r[..2].iter().flatten().sum();
    let target: f64 = r[2..].iter().flatten().sum();
    let w = control / prior.norm_constraint;
    let mut z = [0.0; DIM];
    z[0] = w;
    for (k, r2) in r[..2].iter().flatten().take(7).enumerate() {
        z[1 + k] = r2 / control;
    }
    for (k, r2) in r[2..].iter().flatten().take(7).enumerate() {
        z[8 + k] = r2 / target;
    }
    z[PHASE0..RATE0].copy_from_slice(&beta.free_phases);
    z[RATE0] = beta.mu.ln();
    z[RATE0 + 1] = (beta.mu * beta.eta_a * w).ln();
    z[RATE0 + 2] = (beta.mu * beta.eta_b * (1.0 - w)).ln();
    z
}

/// Inverse of [`pack`]; phases are wrapped to `[0, 2 pi)`. Coordinates
/// outside the support map to moduli or rates outside it, which
/// [`log_prior`] rejects.
pub fn unpack(z: &[f64], prior: &PriorSpec) -> Result<ParamVector> {
    if z.len() != DIM {
        return Err(Error::ParamLength { expected: DIM, found: z.len() });
    }
    let w = z[0];
    let block = |fr: &[f64], share: f64| -> [f64; 8] {
        let mut out = [0.0; 8];
        let mut rest = 1.0;
        for (o, f) in out.iter_mut().zip(fr) {
            *o = f * share * prior.norm_constraint;
            rest -= f;
        }
        out[7] = rest * share * prior.norm_constraint;
        out
    };
    let c = block(&z[1..8], w);
    let t = block(&z[8..15], 1.0 - w);
    let mut squared_moduli = [[0.0; 4]; 4];
    for k in 0..8 {
        squared_moduli[k / 4][k % 4] = c[k];
        squared_moduli[2 + k / 4][k % 4] = t[k];
    }
    let mu = z[RATE0].exp();
    Ok(ParamVector {
        squared_moduli,
        free_phases: std::array::from_fn(|k| z[PHASE0 + k].rem_euclid(TAU)),
        fixed_phases: prior.fixed_phases,
        mu,
        eta_a: (z[RATE0 + 1] - z[RATE0]).exp() / w,
        eta_b: (z[RATE0 + 2] - z[RATE0]).exp() / (1.0 - w),
    })
}

/// Log prior density of `beta`, up to a constant: 0 inside the support and
/// `-inf` outside. A moduli sum off the constraint can only come from a
/// parameterization bug and is reported as an error.
pub fn log_prior(beta: &ParamVector, prior: &PriorSpec) -> Result<f64> {
    let sum = beta.moduli_sum();
    if (sum - prior.norm_constraint).abs() > 1e-12 * prior.norm_constraint.max(1.0) {
        return Err(Error::SimplexViolation {
            sum,
            expected: prior.norm_constraint,
        });
    }
    let inside = beta.squared_moduli.iter().flatten().all(|&r2| r2 > 0.0)
        && [beta.mu, beta.eta_a, beta.eta_b].iter().all(|&x| prior.rate_inside(x))
        && beta.free_phases.iter().all(|p| p.is_finite());
    Ok(if inside { 0.0 } else { f64::NEG_INFINITY })
}

/// Unnormalized log posterior; darks are taken from `darks` (fixed, not sampled).
pub fn log_posterior(beta: &ParamVector, data: &CountDataset, prior: &PriorSpec, darks: (f64, f64)) -> Result<f64> {
    let lp = log_prior(beta, prior)?;
    if lp == f64::NEG_INFINITY {
        return Ok(lp);
    }
    Ok(lp + dataset_log_likelihood(data, &beta.v4(), &beta.noise(darks.0, darks.1)))
}

/// Log density in sampler coordinates: the posterior plus the log
/// Jacobian of the coordinate map.
pub fn log_density_packed(z: &[f64], data: &CountDataset, prior: &PriorSpec, darks: (f64, f64)) -> f64 {
    log_density_with(z, prior, |b| log_posterior(b, data, prior, darks))
}

/// Prior alone in sampler coordinates, Jacobian included.
pub fn log_prior_packed(z: &[f64], prior: &PriorSpec) -> f64 {
    log_density_with(z, prior, |b| log_prior(b, prior))
}

fn log_density_with(z: &[f64], prior: &PriorSpec, f: impl Fn(&ParamVector) -> Result<f64>) -> f64 {
    let w = z.first().copied().unwrap_or(f64::NAN);
    if !(w > 0.0 && w < 1.0) {
        return f64::NEG_INFINITY;
    }
    let Ok(beta) = unpack(z, prior) else {
        return f64::NEG_INFINITY;
    };
    match f(&beta) {
        // Splitting a flat 16-simplex into a share and two flat 8-simplices
        // gives w^7 (1 - w)^7; the log rates contribute mu eta_a eta_b.
        Ok(lp) if lp > f64::NEG_INFINITY => {
            lp + 7.0 * (w.ln() + (1.0 - w).ln()) + beta.mu.ln() + beta.eta_a.ln() + beta.eta_b.ln()
        }
        _ => f64::NEG_INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::designed_transform;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn start() -> ParamVector {
        ParamVector::from_transform(&designed_transform(), (0.024, 3.5e-4, 4.7e-4), &PriorSpec::default()).unwrap()
    }

    #[test]
    fn dimension_count() {
        assert_eq!(N_SIMPLEX + FREE_PHASE_SLOTS.len() + 3, 28);
        let mut all: Vec<_> = FREE_PHASE_SLOTS.iter().chain(&FIXED_PHASE_SLOTS).copied().collect();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 16);
    }

    #[test]
    fn warm_start_sits_on_the_simplex() {
        let b = start();
        assert!((b.moduli_sum() - 1.6558).abs() < 1e-12);
        assert_eq!(log_prior(&b, &PriorSpec::default()).unwrap(), 0.0);
        // Rescaling the moduli leaves fidelity unchanged.
        let f0 = crate::optics::gate_metrics(&designed_transform(), &crate::optics::cnot()).unwrap();
        let f1 = crate::optics::gate_metrics(&b.v4(), &crate::optics::cnot()).unwrap();
        assert!((f0.fidelity - f1.fidelity).abs() < 1e-12);
    }

    #[test]
    fn pack_round_trip() {
        let prior = PriorSpec::default();
        let b = start();
        let back = unpack(&pack(&b, &prior), &prior).unwrap();
        for (x, y) in b.squared_moduli.iter().flatten().zip(back.squared_moduli.iter().flatten()) {
            assert!((x - y).abs() < 1e-12);
        }
        for (x, y) in b.free_phases.iter().zip(&back.free_phases) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!((b.mu - back.mu).abs() < 1e-12 && (b.eta_b - back.eta_b).abs() < 1e-16);
        assert!(unpack(&[0.0; 5], &prior).is_err());
    }

    #[test]
    fn support_boundaries() {
        let prior = PriorSpec::default();
        let mut b = start();
        b.mu = 1.5;
        assert_eq!(log_prior(&b, &prior).unwrap(), f64::NEG_INFINITY);
        let mut z = pack(&start(), &prior);
        z[3] = -1e-3;
        assert_eq!(log_prior(&unpack(&z, &prior).unwrap(), &prior).unwrap(), f64::NEG_INFINITY);
        assert_eq!(log_prior_packed(&z, &prior), f64::NEG_INFINITY);
        let mut z = pack(&start(), &prior);
        z[9] += 1.0;
        assert_eq!(log_prior_packed(&z, &prior), f64::NEG_INFINITY);
        let mut z = pack(&start(), &prior);
        z[RATE0] = 0.5;
        assert_eq!(log_prior_packed(&z, &prior), f64::NEG_INFINITY);
        for w in [0.0, 1.0, -0.2] {
            let mut z = pack(&start(), &prior);
            z[0] = w;
            assert_eq!(log_prior_packed(&z, &prior), f64::NEG_INFINITY);
        }
        assert!(log_prior_packed(&pack(&start(), &prior), &prior).is_finite());
    }

    #[test]
    fn unseen_direction_leaves_likelihood_unchanged() {
        use crate::counting::{simulate_dataset, NoiseParams};
        let prior = PriorSpec::default();
        let data = simulate_dataset(&designed_transform(), &NoiseParams::retrieved(), 4e11 as u64, 4).unwrap();
        let z = pack(&start(), &prior);
        let darks = (crate::reference::DARK_A, crate::reference::DARK_B);
        let base = log_posterior(&unpack(&z, &prior).unwrap(), &data, &prior, darks).unwrap();
        for w in [0.2, 0.4, 0.7] {
            let mut y = z;
            y[0] = w;
            let lp = log_posterior(&unpack(&y, &prior).unwrap(), &data, &prior, darks).unwrap();
            assert!((lp - base).abs() < 1e-6 * base.abs(), "{lp} vs {base}");
        }
    }

    #[test]
    fn packed_prior_reproduces_dirichlet_moments() {
        // Slice-sample the prior in sampler coordinates; the squared moduli
        // must then follow a flat Dirichlet over 16 components.
        use crate::bayes::{slice_sample, SliceConfig, Thinning};
        let prior = PriorSpec {
            rate_support: (0.0, 1.0),
            ..PriorSpec::default()
        };
        let z0 = pack(&start(), &prior);
        let mut widths = vec![0.2; 15];
        widths.extend([1.0; 10]);
        widths.extend([1.0; 3]);
        let cfg = SliceConfig {
            widths,
            burn_in: 200,
            thinning: Thinning::Fixed(2),
            ..SliceConfig::default()
        };
        let n = 6000;
        let chain = slice_sample(|z: &[f64]| log_prior_packed(z, &prior), None, &z0, n, &cfg, 8).unwrap();
        let xs: Vec<[f64; 16]> = chain
            .samples
            .iter()
            .map(|z| {
                let b = unpack(z, &prior).unwrap();
                let mut x = [0.0; 16];
                for (o, r2) in x.iter_mut().zip(b.squared_moduli.iter().flatten()) {
                    *o = r2 / prior.norm_constraint;
                }
                x
            })
            .collect();
        let mean_sd = (15.0f64 / (16.0 * 16.0 * 17.0)).sqrt() / (n as f64).sqrt();
        for k in 0..16 {
            let col: Vec<f64> = xs.iter().map(|x| x[k]).collect();
            let m = col.iter().sum::<f64>() / n as f64;
            let v = col.iter().map(|c| (c - m).powi(2)).sum::<f64>() / n as f64;
            // Autocorrelated draws: allow a generous multiple of the iid error.
            assert!((m - 1.0 / 16.0).abs() < 12.0 * mean_sd, "mean[{k}] = {m}");
            assert!((v / (15.0 / (256.0 * 17.0)) - 1.0).abs() < 0.25, "var[{k}] = {v}");
        }
        let c01: f64 = xs.iter().map(|x| (x[0] - 1.0 / 16.0) * (x[9] - 1.0 / 16.0)).sum::<f64>() / n as f64;
        let expected = -1.0 / (256.0 * 17.0);
        assert!((c01 - expected).abs() < 0.5 * expected.abs() + 1e-4, "cov {c01}");
    }

    #[test]
    fn simplex_violation_is_an_error() {
        let mut b = start();
        b.squared_moduli[0][0] += 1e-3;
        assert!(matches!(log_prior(&b, &PriorSpec::default()), Err(Error::SimplexViolation { .. })));
    }

    #[test]
    fn random_draws_are_valid() {
        let prior = PriorSpec::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let b = ParamVector::random((0.1, 0.2, 0.3), &prior, &mut rng);
            assert_eq!(log_prior(&b, &prior).unwrap(), 0.0);
        }
    }

    #[test]
    fn prior_validation() {
        assert!(PriorSpec::default().validate().is_ok());
        let bad = PriorSpec {
            norm_constraint: -1.0,
            ..PriorSpec::default()
        };
        assert!(bad.validate().is_err());
    }
}
