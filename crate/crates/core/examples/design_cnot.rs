//! Synthesize a frequency-bin CNOT from an EOM/PS cascade.
//!
//! ```text
//! cargo run --release -p freqgate --example design_cnot -- [2EOM/1PS|3EOM/2PS] [restarts] [seed] [fidelity-floor]
//! ```

use std::time::Instant;

use freqgate::design::{optimize, DesignProblem, OptimizerConfig, Topology};

fn main() -> freqgate::Result<()> {
    let mut args = std::env::args().skip(1);
    let topology: Topology = args.next().as_deref().unwrap_or("2EOM/1PS").parse()?;
    let restarts = args.next().and_then(|s| s.parse().ok()).unwrap_or(16);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(2019);

    let floor = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.9999);

    let mut problem = DesignProblem::cnot(topology);
    problem.fidelity_floor = floor;
    let config = OptimizerConfig {
        restarts,
        ..OptimizerConfig::default()
    };

    let start = Instant::now();
    let result = optimize(&problem, &config, seed)?;
    println!("{}", result.summary());
    println!("elapsed: {:.1} s over {restarts} restarts", start.elapsed().as_secs_f64());

    let amps = result.v_projected.amplitudes();
    let phases = result.v_projected.phases();
    println!("projected V (amplitude angle phase), rows/cols C0 C1 T0 T1:");
    for i in 0..4 {
        let row: Vec<String> = (0..4)
            .map(|j| format!("{:.4}<{:+.4}", amps[i][j], phases[i][j]))
            .collect();
        println!("  {}", row.join("  "));
    }

    let mut finals: Vec<(usize, f64, f64)> = Vec::new();
    for t in &result.optimizer_trace {
        match finals.last_mut() {
            Some(last) if last.0 == t.restart => *last = (t.restart, t.success, t.fidelity),
            _ => finals.push((t.restart, t.success, t.fidelity)),
        }
    }
    println!("per-restart final (success, fidelity):");
    for (r, p, f) in finals {
        println!("  restart {r:>3}: P = {p:.6}  F = {f:.8}");
    }
    Ok(())
}
