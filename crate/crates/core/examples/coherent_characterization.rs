//! Reconstruct the qubit-mode block of a mode transform from simulated
//! classical probes, then evaluate the tabulated measurement.
//!
//! ```text
//! cargo run --release -p freqgate --example coherent_characterization -- [repeats] [rin-sigma] [seed]
//! ```

use freqgate::coherent::{characterize, designed_gauge, embed_matrix, tabulated_reconstruction, CharacterizationConfig, PhaseStatus, ProbeSettings, ReconstructedMatrix};
use freqgate::optics::{cnot, gate_metrics, QubitModeMap};
use freqgate::reference;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn print_matrix(r: &ReconstructedMatrix) {
    println!("  amplitude +- std  /  phase +- std  (F fixed, ? undetermined)");
    for i in 0..4 {
        let cells: Vec<String> = (0..4)
            .map(|j| {
                let a = r.amplitudes[i][j];
                let p = r.phases[i][j];
                let phase = match (p.status, p.estimate) {
                    (PhaseStatus::Fixed, Some(e)) => format!("{:+.4} F", e.mean),
                    (_, Some(e)) => format!("{:+.4}+-{:.3}", e.mean, e.std),
                    _ => "   ?    ".to_string(),
                };
                format!("{:.4}+-{:.4} {phase}", a.mean, a.std)
            })
            .collect();
        println!("  {}", cells.join(" | "));
    }
}

fn main() -> freqgate::Result<()> {
    let mut args = std::env::args().skip(1);
    let repeats = args.next().and_then(|s| s.parse().ok()).unwrap_or(5);
    let rin_sigma = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.01);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);

    let map = QubitModeMap::experiment();
    let truth = reference::designed_transform();
    let v = embed_matrix(&truth, &map)?;
    let cfg = CharacterizationConfig {
        repeats,
        probe: ProbeSettings {
            rin_sigma,
            ..ProbeSettings::default()
        },
        ..CharacterizationConfig::default()
    };
    let r = characterize(&v, &map, &designed_gauge(), &cfg, seed)?;
    println!("designed transform probed {repeats}x with RIN sigma {rin_sigma}:");
    print_matrix(&r);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = r.metrics(&cnot(), 1000, &mut rng)?;
    let t = gate_metrics(&truth, &cnot())?;
    println!(
        "  F_inf = {:.5} (spread over undetermined phases {:.1e}), P_inf = {:.4}; true F = {:.5}, P = {:.4}",
        m.fidelity, m.fidelity_spread, m.success, t.fidelity, t.success
    );

    let tabulated = tabulated_reconstruction();
    println!("tabulated measurement:");
    print_matrix(&tabulated);
    let m = tabulated.metrics(&cnot(), 1000, &mut rng)?;
    println!(
        "  F_inf = {:.5} (spread {:.1e} over {} draws), P_inf = {:.4}",
        m.fidelity, m.fidelity_spread, m.draws, m.success
    );
    Ok(())
}
