//! Simulated coincidence counts for all 16 input/output settings, with the
//! multipair and dark-count model, plus the model's own prediction.
//!
//! ```text
//! cargo run --release -p freqgate --example counting_simulation -- [mu] [seed]
//! ```

use freqgate::counting::{config_probs, correct_output_fraction, simulate_dataset, NoiseParams};
use freqgate::optics::cnot;
use freqgate::reference;

fn main() -> freqgate::Result<()> {
    let mut args = std::env::args().skip(1);
    let mu: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(reference::RETRIEVED_MU);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(2019);

    let v = reference::designed_transform();
    let noise = NoiseParams {
        mu,
        ..NoiseParams::retrieved()
    };
    let data = simulate_dataset(&v, &noise, reference::FRAMES, seed)?;
    println!("mu = {mu}, {} frames per setting", reference::FRAMES);
    println!("in    out    N_A        N_B        N_AB  expected N_AB  accidentals");
    for r in &data.records {
        let q = config_probs(&v, &r.config, &noise);
        let m = r.config.frames as f64;
        let (i, o) = (r.config.input, r.config.output);
        println!(
            "C{}T{}  C{}T{}  {:>9}  {:>9}  {:>5}  {:>13.1}  {:>11.1}",
            i.0,
            i.1,
            o.0,
            o.1,
            r.counts.n_a,
            r.counts.n_b,
            r.counts.n_ab,
            q.p_ab * m,
            2.0 * m * q.p_a * q.p_b
        );
    }
    println!("fraction of coincidences in the CNOT output: {:.3}", correct_output_fraction(&data, &cnot())?);
    Ok(())
}
