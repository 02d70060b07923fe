//! Compare qubit-mode placements for the 2EOM/1PS CNOT.
//!
//! ```text
//! cargo run --release -p freqgate --example placement_search -- [restarts] [seed]
//! ```

use freqgate::design::{placement_search, DesignProblem, OptimizerConfig, Topology};
use freqgate::optics::QubitModeMap;

fn main() -> freqgate::Result<()> {
    let mut args = std::env::args().skip(1);
    let restarts = args.next().and_then(|s| s.parse().ok()).unwrap_or(4);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);

    let candidates = vec![
        QubitModeMap::experiment(),
        QubitModeMap::new(0, 1, 2, 3)?,
        QubitModeMap::new(0, 2, 1, 3)?,
        QubitModeMap::new(0, 3, 1, 2)?,
    ];
    let template = DesignProblem::cnot(Topology::two_eom_one_ps());
    let config = OptimizerConfig {
        restarts,
        ..OptimizerConfig::default()
    };
    let ranked = placement_search(&template, &candidates, &config, seed)?;
    println!("ranked placements ({restarts} restarts each):");
    for (i, r) in ranked.iter().enumerate() {
        println!(
            "  {}. C0={} C1={} T0={} T1={}  {}  P = {:.6}  F = {:.8}  depth = {:.3}",
            i + 1,
            r.map.c0,
            r.map.c1,
            r.map.t0,
            r.map.t1,
            if r.is_feasible() { "feasible  " } else { "infeasible" },
            r.achieved_success,
            r.achieved_fidelity,
            r.total_modulation_depth()
        );
    }
    Ok(())
}
