//! Oracle comparisons shared by the oracle suite and the acceptance run.
//! Each returns whether the tolerance held and a one-line detail.

use freqgate::bayes::{slice_sample, SliceBasis, SliceConfig, Thinning};
use freqgate::counting::{per_pair_double, per_pair_joint, per_pair_marginal, per_pair_marginal_direct};
use freqgate::optics::{eom_transform, two_photon_map, EomElement, FrequencyGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{fock_two_photon, mat4_rows, random_mat4, random_transform, sideband_by_quadrature, transform_rows};

pub struct Check {
    pub pass: bool,
    pub detail: String,
}

pub fn bessel_mixing(cases: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = FrequencyGrid::new(193.45e12, 25e9, -12, 12).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let m = rng.random_range(0.0..3.0);
        let theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let v = eom_transform(&EomElement::new(m, theta), grid);
        for (i, n) in grid.bins().enumerate() {
            for (j, np) in grid.bins().enumerate() {
                let oracle = sideband_by_quadrature(m, theta, n - np, 512);
                worst = worst.max((v.entries[[i, j]] - oracle).norm());
            }
        }
    }
    Check {
        pass: worst <= 1e-10,
        detail: format!("{cases} modulators, max |V - quadrature| = {worst:.2e} (tol 1e-10)"),
    }
}

pub fn permanents_vs_fock(cases: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let m = random_mat4(&mut rng);
        let w = two_photon_map(&m);
        let rows = mat4_rows(&m);
        for k in 0..2 {
            for l in 0..2 {
                let fock = fock_two_photon(&rows, k, 2 + l);
                for r in 0..2 {
                    for s in 0..2 {
                        let oracle = fock.get(&(r, 2 + s)).copied().unwrap_or_default();
                        worst = worst.max((w.0[(2 * r + s, 2 * k + l)] - oracle).norm());
                    }
                }
            }
        }
        // Bunched and anti-bunched probabilities on a full unitary.
        let v = random_transform(6, &mut rng);
        let fock = fock_two_photon(&transform_rows(&v), 1, 4);
        for a in 0..6i64 {
            let double = per_pair_double(&v, 1, 4, a).unwrap();
            let oracle = fock.get(&(a as usize, a as usize)).map_or(0.0, |c| c.norm_sqr());
            worst = worst.max((double - oracle).abs());
            for b in a + 1..6 {
                let joint = per_pair_joint(&v, 1, 4, a, b).unwrap();
                let oracle = fock.get(&(a as usize, b as usize)).map_or(0.0, |c| c.norm_sqr());
                worst = worst.max((joint - oracle).abs());
            }
        }
    }
    Check {
        pass: worst <= 1e-12,
        detail: format!("{cases} random matrices, max deviation from Fock expansion = {worst:.2e} (tol 1e-12)"),
    }
}

pub fn marginal_closed_form(cases: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let v = random_transform(8, &mut rng);
        let u = rng.random_range(0..8);
        let w = (u + rng.random_range(1..8)) % 8;
        for m in 0..8 {
            let closed = per_pair_marginal(&v, u, w, m).unwrap();
            let direct = per_pair_marginal_direct(&v, u, w, m).unwrap();
            worst = worst.max((closed - direct).abs());
        }
    }
    Check {
        pass: worst <= 1e-10,
        detail: format!("{cases} random unitaries, max |closed form - direct sum| = {worst:.2e} (tol 1e-10)"),
    }
}

pub fn completeness(cases: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let v = random_transform(8, &mut rng);
        let u = rng.random_range(0..8);
        let w = (u + rng.random_range(1..8)) % 8;
        let mut total = 0.0;
        for m in 0..8 {
            total += per_pair_double(&v, u, w, m).unwrap();
            for n in m + 1..8 {
                total += per_pair_joint(&v, u, w, m, n).unwrap();
            }
        }
        worst = worst.max((total - 1.0).abs());
    }
    Check {
        pass: worst <= 1e-9,
        detail: format!("{cases} random unitaries, max |sum p - 1| = {worst:.2e} (tol 1e-9)"),
    }
}

/// Correlated 3-d Gaussian: sample means within 4/sqrt(n) standard
/// deviations, covariance entries within 10% of the scale
/// `sqrt(S_ii S_jj)`.
pub fn slice_gaussian_moments(n: usize, seed: u64) -> Check {
    let mean = [1.0, -2.0, 0.5];
    let sd = [1.0, 2.0, 0.5];
    let rho = [[1.0, 0.6, -0.3], [0.6, 1.0, 0.2], [-0.3, 0.2, 1.0]];
    let cov = nalgebra::Matrix3::from_fn(|i, j| rho[i][j] * sd[i] * sd[j]);
    let prec = cov.try_inverse().unwrap();
    let target = move |x: &[f64]| {
        let d = nalgebra::Vector3::new(x[0] - mean[0], x[1] - mean[1], x[2] - mean[2]);
        -0.5 * (d.transpose() * prec * d)[(0, 0)]
    };
    let cfg = SliceConfig {
        widths: vec![1.0; 3],
        thinning: Thinning::Fixed(2),
        basis: SliceBasis::Adaptive,
        ..SliceConfig::default()
    };
    let chain = slice_sample(target, None, &[0.0; 3], n, &cfg, seed).unwrap();
    let nf = n as f64;
    let mut m = [0.0; 3];
    for s in &chain.samples {
        for k in 0..3 {
            m[k] += s[k] / nf;
        }
    }
    let mut worst_mean: f64 = 0.0;
    for k in 0..3 {
        worst_mean = worst_mean.max((m[k] - mean[k]).abs() / sd[k]);
    }
    let mut worst_cov: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let c = chain.samples.iter().map(|s| (s[i] - m[i]) * (s[j] - m[j])).sum::<f64>() / (nf - 1.0);
            worst_cov = worst_cov.max((c - cov[(i, j)]).abs() / (sd[i] * sd[j]));
        }
    }
    let mean_tol = 4.0 / nf.sqrt();
    Check {
        pass: worst_mean <= mean_tol && worst_cov <= 0.10,
        detail: format!(
            "n = {n}: max mean error {worst_mean:.4} sd (tol {mean_tol:.4}), max covariance error {worst_cov:.3} (tol 0.10)"
        ),
    }
}
