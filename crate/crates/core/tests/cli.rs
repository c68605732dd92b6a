use std::fs;
use std::path::Path;
use std::process::Command;

const CONFIG: &str = r#"
output = "tiny"

[environment]
kind = "random"
graph = { kind = "line", n = 3 }
gamma = 0.7
tau = 0.2
interaction_budget = 0.4
seed = 4

[lpi]
kappa = 1
eta = 1.0
outer_iterations = 0
trajectory_len = 100
eval_episodes = 4

[sweep]
seeds = [0, 1]
"#;

fn netlpi(args: &[&str], out_root: &Path) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_netlpi"))
        .args(args)
        .env("NETLPI_OUT", out_root)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn zero_iterations_write_only_the_initial_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tiny.toml");
    fs::write(&cfg, CONFIG).unwrap();
    netlpi(&["train", "--config", cfg.to_str().unwrap()], dir.path());
    let csv = fs::read_to_string(dir.path().join("tiny/kappa-1_beta-1/seed-0.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("iteration,"));
    assert!(rows[1].starts_with("0,"));
    assert!(dir.path().join("tiny/manifest.toml").exists());
    assert!(dir.path().join("tiny/kappa-1_beta-1/aggregate.csv").exists());
}

#[test]
fn solve_diagnose_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tiny.toml");
    fs::write(&cfg, CONFIG).unwrap();
    let cfg = cfg.to_str().unwrap();
    let exact = dir.path().join("exact");
    let stdout = netlpi(&["solve-exact", "--config", cfg, "--out", exact.to_str().unwrap()], dir.path());
    assert!(stdout.contains("kappa 2 gap"));
    let gaps = fs::read_to_string(exact.join("kappa_gap.csv")).unwrap();
    assert!(gaps.starts_with("# schema: netlpi-kappa-gap/v1"));

    let diag = dir.path().join("diag");
    netlpi(&["diagnose", "--config", cfg, "--out", diag.to_str().unwrap()], dir.path());
    for f in ["c_matrix.csv", "policy_matrix.csv", "q_matrix.csv", "truncation.csv", "report.txt"] {
        assert!(diag.join(f).exists(), "{f}");
    }

    netlpi(&["sweep", "--config", cfg, "--seed-override", "5"], dir.path());
    let agg = dir.path().join("tiny/kappa-1_beta-1/aggregate.csv");
    assert!(dir.path().join("tiny/kappa-1_beta-1/seed-5.csv").exists());
    let svg = dir.path().join("chart.svg");
    netlpi(&["plot", agg.to_str().unwrap(), "--out", svg.to_str().unwrap()], dir.path());
    assert!(fs::read_to_string(svg).unwrap().starts_with("<svg"));
}

#[test]
fn unknown_config_keys_fail() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, CONFIG.replace("eval_episodes = 4", "eval_episodes = 4\nepisodes = 3")).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_netlpi"))
        .args(["train", "--config", cfg.to_str().unwrap()])
        .env("NETLPI_OUT", dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
}
