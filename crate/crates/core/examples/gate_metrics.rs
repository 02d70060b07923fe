//! Success probability and fidelity of the tabulated designed transform,
//! and of a few reference matrices.
//!
//! ```text
//! cargo run --release -p freqgate --example gate_metrics
//! ```

use freqgate::optics::{cnot, gate_metrics, two_photon_map};
use freqgate::{reference, Mat4};

fn main() -> freqgate::Result<()> {
    let target = cnot();
    let designed = reference::designed_transform();
    let cases = [
        ("designed 2EOM/1PS", designed),
        ("identity", Mat4::identity()),
        ("designed, T1 column blocked", {
            let mut v = designed;
            for r in 0..4 {
                v[(r, 3)] = Default::default();
            }
            v
        }),
    ];
    for (name, v) in cases {
        match gate_metrics(&v, &target) {
            Ok(m) => println!("{name:<28} P = {:.6}  F = {:.8}", m.success, m.fidelity),
            Err(e) => println!("{name:<28} {e}"),
        }
    }

    let w = two_photon_map(&designed);
    println!("|W|^2 of the designed transform, rows = outputs, cols = inputs (C0T0 C0T1 C1T0 C1T1):");
    for r in 0..4 {
        let row: Vec<String> = (0..4).map(|c| format!("{:.5}", w.0[(r, c)].norm_sqr())).collect();
        println!("  {}", row.join("  "));
    }
    println!("upper bound for this class of gate: P = 1/9 = {:.6}", reference::OPTIMAL_SUCCESS);
    Ok(())
}
