use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use super::dataset::{ConfigCounts, CountDataset, CountRecord, DatasetMetadata, ExperimentConfig};
use super::model::{config_probs, NoiseParams};
use crate::error::{Error, Result};
use crate::linalg::Mat4;

fn binomial(n: u64, p: f64, rng: &mut ChaCha8Rng) -> Result<u64> {
    if n == 0 || p <= 0.0 {
        return Ok(0);
    }
    let d = Binomial::new(n, p.min(1.0)).map_err(|e| Error::InvalidNoise(format!("binomial({n}, {p}): {e}")))?;
    Ok(d.sample(rng))
}

/// Draw counts for all 16 settings. Each setting has its own RNG stream
/// `(seed, setting index)`, so a record does not depend on the others.
pub fn simulate_dataset(v4: &Mat4, p: &NoiseParams, frames: u64, seed: u64) -> Result<CountDataset> {
    p.validate()?;
    let mut records = Vec::with_capacity(16);
    for config in ExperimentConfig::all(frames) {
        let q = config_probs(v4, &config, p);
        let (a_only, b_only) = (q.p_a - q.p_ab, q.p_b - q.p_ab);
        let none = 1.0 - q.p_a - q.p_b + q.p_ab;
        if [q.p_ab, a_only, b_only, none].iter().any(|x| !(*x >= 0.0) || *x > 1.0) {
            return Err(Error::InvalidNoise(format!(
                "category probabilities out of range for input {:?} output {:?}: {q:?}",
                config.input, config.output
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(config.index() as u64);
        // Multinomial by conditional binomials.
        let n_ab = binomial(frames, q.p_ab, &mut rng)?;
        let rest = frames - n_ab;
        let n_a_only = binomial(rest, a_only / (1.0 - q.p_ab), &mut rng)?;
        let rest2 = rest - n_a_only;
        let n_b_only = binomial(rest2, b_only / (1.0 - q.p_ab - a_only), &mut rng)?;
        records.push(CountRecord {
            config,
            counts: ConfigCounts::new(n_a_only + n_ab, n_b_only + n_ab, n_ab),
        });
    }
    CountDataset::new(
        records,
        DatasetMetadata {
            noise: Some(*p),
            notes: vec![format!("simulated, seed {seed}")],
        },
    )
}

/// Fraction of coincidences landing in the output the target gate sends
/// each computational input to, averaged over the four inputs.
pub fn correct_output_fraction(data: &CountDataset, target: &Mat4) -> Result<f64> {
    data.require_complete()?;
    let mut total = 0.0;
    for k in 0..2u8 {
        for l in 0..2u8 {
            let col = 2 * k as usize + l as usize;
            let best = (0..4)
                .max_by(|&a, &b| target[(a, col)].norm_sqr().total_cmp(&target[(b, col)].norm_sqr()))
                .unwrap_or(0);
            let mut all = 0u64;
            let mut right = 0u64;
            for r in 0..2u8 {
                for s in 0..2u8 {
                    let n = data.get((k, l), (r, s)).map_or(0, |rec| rec.counts.n_ab);
                    all += n;
                    if 2 * r as usize + s as usize == best {
                        right += n;
                    }
                }
            }
            if all == 0 {
                return Err(Error::InvalidDataset(format!("no coincidences for input ({k}, {l})")));
            }
            total += right as f64 / all as f64;
        }
    }
    Ok(total / 4.0)
}
