//! Sideband spectrum of a single sinusoidally driven phase modulator.
//!
//! ```text
//! cargo run --release -p freqgate --example eom_sidebands -- [modulation-index] [max-order]
//! ```

use freqgate::optics::{eom_coefficients, eom_transform, EomElement, FrequencyGrid};

fn main() -> freqgate::Result<()> {
    let mut args = std::env::args().skip(1);
    let m: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1.4347);
    let max_k: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(6);

    let eom = EomElement::new(m, 0.0);
    let c = eom_coefficients(&eom, max_k);
    println!("m = {m}: power in sideband k is J_k(m)^2");
    let mut total = 0.0;
    for (i, z) in c.iter().enumerate() {
        let k = i as i64 - max_k as i64;
        total += z.norm_sqr();
        println!("  k = {k:+3}  {:.6}  {}", z.norm_sqr(), "#".repeat((z.norm_sqr() * 60.0).round() as usize));
    }
    println!("  captured {:.8} of the input power within +-{max_k}", total);

    // Same numbers as a column of the truncated Toeplitz matrix.
    let grid = FrequencyGrid::new(193.45e12, 25e9, -20, 20)?;
    let v = eom_transform(&eom, grid);
    println!("column norm of bin 0 on a 41-bin window: {:.12}", v.column_norm(0)?);
    println!("column norm of bin 20 (window edge):     {:.12}", v.column_norm(20)?);
    Ok(())
}
