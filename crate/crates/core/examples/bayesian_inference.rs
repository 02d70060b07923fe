//! Simulate a counting experiment on the designed gate and recover the
//! transform, pair rate and efficiencies by slice sampling.
//!
//! ```text
//! cargo run --release -p freqgate --example bayesian_inference -- [samples] [seed] [burn-in]
//! ```

use std::time::Instant;

use freqgate::bayes::{infer, split_half_z, summarize, InferenceConfig, PriorSpec};
use freqgate::counting::{correct_output_fraction, simulate_dataset, NoiseParams};
use freqgate::optics::{cnot, gate_metrics};
use freqgate::reference::{designed_transform, FRAMES};

fn main() -> freqgate::Result<()> {
    let mut args = std::env::args().skip(1);
    let samples = args.next().and_then(|s| s.parse().ok()).unwrap_or(4096);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(2019);

    let truth = designed_transform();
    let noise = NoiseParams::retrieved();
    let data = simulate_dataset(&truth, &noise, FRAMES as u64, seed)?;
    let true_f = gate_metrics(&truth, &cnot())?.fidelity;
    println!("ground truth: F = {true_f:.6}, mu = {}, eta_a = {}, eta_b = {}", noise.mu, noise.eta_a, noise.eta_b);
    println!("raw correct-output fraction: {:.3}", correct_output_fraction(&data, &cnot())?);

    let mut config = InferenceConfig {
        samples,
        ..InferenceConfig::default()
    };
    if let Some(burn_in) = args.next().and_then(|s| s.parse().ok()) {
        config.sampler.burn_in = burn_in;
    }
    let start = Instant::now();
    let chain = infer(&data, &PriorSpec::default(), &config, seed)?;
    let elapsed = start.elapsed().as_secs_f64();
    let s = summarize(&chain, &cnot())?;

    println!(
        "{} samples, burn-in {} sweeps, thinning {}, {} density evaluations, {elapsed:.1} s",
        s.samples, chain.burn_in, chain.thinning, chain.evaluations
    );
    let fid: Vec<f64> = chain
        .samples
        .iter()
        .map(|b| gate_metrics(&b.v4(), &cnot()).map(|m| m.fidelity))
        .collect::<Result<_, _>>()?;
    println!(
        "fidelity lag-1 {:.3}, ESS {:.0}, split-half z {:.2}",
        chain.diagnostics.statistic_lag1,
        chain.diagnostics.statistic_ess,
        split_half_z(&fid)
    );
    let min_ess = chain.diagnostics.ess.iter().cloned().fold(f64::INFINITY, f64::min);
    println!("smallest coordinate ESS {min_ess:.0}");
    if std::env::var_os("FREQGATE_VERBOSE").is_some() {
        println!("ESS per coordinate: {:?}", chain.diagnostics.ess.iter().map(|e| e.round()).collect::<Vec<_>>());
    }
    println!("F    = {:.4} +- {:.4}", s.fidelity.mean, s.fidelity.std);
    println!("P    = {:.4} +- {:.4}", s.success.mean, s.success.std);
    println!("mu   = {:.4} +- {:.4}", s.mu.mean, s.mu.std);
    println!("etaA = {:.3e} +- {:.1e}", s.eta_a.mean, s.eta_a.std);
    println!("etaB = {:.3e} +- {:.1e}", s.eta_b.mean, s.eta_b.std);
    println!(
        "correct-output probability = {:.3} +- {:.3}",
        s.correct_output_probability.mean, s.correct_output_probability.std
    );
    println!("pathway probabilities [input][output], basis C0T0 C0T1 C1T0 C1T1:");
    for row in s.pathway_probabilities {
        println!("  {}", row.map(|p| format!("{p:.3}")).join("  "));
    }
    Ok(())
}
