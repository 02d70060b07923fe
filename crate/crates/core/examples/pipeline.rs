//! The command-line workflow driven from code: design, simulate, infer and
//! report into a temporary directory.
//!
//! ```text
//! cargo run --release -p freqgate --example pipeline -- [seed] [samples]
//! ```

use freqgate::app::{run, Command, OutputFormat, RunConfig, TransformSource};

fn main() -> freqgate::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(2019);
    let samples = args.next().and_then(|s| s.parse().ok()).unwrap_or(1024);

    let dir = tempfile::tempdir()?;
    let mut cfg = RunConfig {
        seed,
        out_dir: dir.path().to_path_buf(),
        ..RunConfig::default()
    };
    cfg.design.optimizer.restarts = 8;
    cfg.simulate.transform = TransformSource::DesignOutput;
    cfg.infer.sampler.samples = samples;

    for cmd in [Command::Design, Command::Simulate, Command::Infer, Command::Report] {
        println!("== {}", cmd.name());
        let m = run(cmd, &cfg, OutputFormat::Json, None)?;
        for a in &m.artifacts {
            println!("   wrote {} ({}...)", a.path.display(), &a.sha256[..12]);
        }
    }
    Ok(())
}
