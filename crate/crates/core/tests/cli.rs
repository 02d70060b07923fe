use std::path::Path;

use freqgate::app::{main_with, RunConfig, TransformSource, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_NONFINITE_INIT, EXIT_OK};
use freqgate::bayes::Thinning;
use freqgate::counting::{CountDataset, NoiseParams};

fn run(args: &[&str]) -> i32 {
    let mut v = vec!["freqgate"];
    v.extend_from_slice(args);
    main_with(v)
}

fn write_config(dir: &Path, cfg: &RunConfig) -> String {
    let p = dir.join("config.json");
    std::fs::write(&p, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    p.to_string_lossy().into_owned()
}

fn manifest(out: &Path, cmd: &str) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(out.join(format!("manifest-{cmd}.json"))).unwrap()).unwrap()
}

#[test]
fn simulate_without_light_or_darks_gives_zero_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::default();
    cfg.simulate.noise = NoiseParams {
        mu: 0.0,
        eta_a: 0.1,
        eta_b: 0.1,
        dark_a: 0.0,
        dark_b: 0.0,
    };
    cfg.simulate.frames = 1_000_000;
    let config = write_config(dir.path(), &cfg);
    let out = dir.path().join("out");
    let code = run(&["simulate", "--config", &config, "--out", out.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    let data = CountDataset::read_csv(std::fs::File::open(out.join("counts.csv")).unwrap()).unwrap();
    assert_eq!(data.records.len(), 16);
    assert!(data.records.iter().all(|r| r.counts.n_a == 0 && r.counts.n_b == 0 && r.counts.n_ab == 0));
    let m = manifest(&out, "simulate");
    assert_eq!(m["exit_code"], 0);
    assert_eq!(m["inputs"].as_array().unwrap().len(), 1);
    assert_eq!(m["artifacts"].as_array().unwrap().len(), 1);
}

#[test]
fn invalid_config_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"format_version": 1, "simulate": {"frames": 10, "extra": true}}"#).unwrap();
    let out = dir.path().join("out");
    let code = run(&["simulate", "--config", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(!out.join("counts.json").exists());
    assert_eq!(manifest(&out, "simulate")["exit_code"], EXIT_CONFIG);

    std::fs::write(&bad, r#"{"format_version": 2}"#).unwrap();
    assert_eq!(run(&["simulate", "--config", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]), EXIT_CONFIG);
    assert_eq!(run(&["simulate", "--format", "xml"]), EXIT_CONFIG);
    assert_eq!(run(&["design", "--fidelity-floor", "1.5", "--out", out.to_str().unwrap()]), EXIT_CONFIG);
}

#[test]
fn unreachable_floor_exits_infeasible_but_writes_design() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::default();
    cfg.design.optimizer.restarts = 1;
    cfg.design.optimizer.max_penalty_rounds = 2;
    cfg.design.problem.fidelity_floor = 1.0;
    let config = write_config(dir.path(), &cfg);
    let out = dir.path().join("out");
    assert_eq!(run(&["design", "--config", &config, "--out", out.to_str().unwrap()]), EXIT_INFEASIBLE);
    let text = std::fs::read_to_string(out.join("design.json")).unwrap();
    assert!(text.contains("\"infeasible\""));
    assert_eq!(manifest(&out, "design")["exit_code"], EXIT_INFEASIBLE);
}

#[test]
fn sampler_start_outside_support_exits_with_init_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    assert_eq!(run(&["simulate", "--out", out.to_str().unwrap()]), EXIT_OK);
    let mut cfg = RunConfig::default();
    cfg.out_dir = out.clone();
    cfg.infer.sampler.initial_rates = (1.5, 1e-3, 1e-3);
    let config = write_config(dir.path(), &cfg);
    assert_eq!(run(&["infer", "--config", &config]), EXIT_NONFINITE_INIT);
}

#[test]
fn missing_dataset_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("empty");
    assert_eq!(run(&["report", "--out", out.to_str().unwrap()]), EXIT_CONFIG);
}

fn pipeline(root: &Path) -> (Vec<u8>, Vec<u8>) {
    let out = root.join("out");
    let mut cfg = RunConfig::default();
    cfg.seed = 11;
    cfg.out_dir = out.clone();
    cfg.design.optimizer.restarts = 2;
    cfg.simulate.transform = TransformSource::DesignOutput;
    cfg.infer.sampler.samples = 64;
    cfg.infer.sampler.sampler.burn_in = 64;
    cfg.infer.sampler.sampler.thinning = Thinning::Fixed(1);
    let config = write_config(root, &cfg);
    for cmd in ["design", "simulate", "infer", "report", "characterize"] {
        assert_eq!(run(&[cmd, "--config", &config]), EXIT_OK, "{cmd}");
    }
    let summary = std::fs::read(out.join("posterior_summary.json")).unwrap();
    let report = std::fs::read(out.join("report.json")).unwrap();
    (summary, report)
}

#[test]
fn pipeline_is_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (sa, ra) = pipeline(a.path());
    let (sb, rb) = pipeline(b.path());
    assert_eq!(sa, sb);
    assert_eq!(ra, rb);

    let report: serde_json::Value = serde_json::from_slice(&ra).unwrap();
    assert_eq!(report["data"]["pathway_source"], "posterior");
    for row in report["data"]["pathways"]["rows"].as_array().unwrap() {
        let s: f64 = row["values"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).sum();
        assert!((s - 1.0).abs() < 1e-9);
    }
    let chain = std::fs::read_to_string(a.path().join("out/chain.jsonl")).unwrap();
    assert_eq!(chain.lines().count(), 65);
    assert!(chain.lines().next().unwrap().contains("\"format_version\":1"));
    let m = manifest(&a.path().join("out"), "infer");
    assert_eq!(m["inputs"].as_array().unwrap().len(), 2);
}
