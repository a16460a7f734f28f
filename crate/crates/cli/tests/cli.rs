use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sporobs"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    bin()
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn edited(dir: &TempDir, name: &str, from: &str, to: &str) -> PathBuf {
    let text = std::fs::read_to_string(scenario(name)).unwrap();
    assert!(text.contains(from), "{from} not in {name}");
    let path = dir.path().join(format!("edited-{name}"));
    std::fs::write(&path, text.replacen(from, to, 1)).unwrap();
    path
}

#[test]
fn design_writes_result_and_gains() {
    let dir = TempDir::new().unwrap();
    let o = run(&["design"], &scenario("example1.json"), dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let design: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("design.json")).unwrap()).unwrap();
    let gamma = design["gamma"].as_f64().unwrap();
    assert!(gamma > 0.0 && gamma <= 40.0, "gamma {gamma}");
    assert_eq!(design["report"]["pass"], true);
    assert!(dir.path().join("gains.json").exists());
}

#[test]
fn gains_written_by_design_verify_unchanged() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario("example1.json");
    assert_eq!(code(&run(&["design"], &cfg, dir.path())), 0);
    let gains = dir.path().join("gains.json");
    let before = std::fs::read(&gains).unwrap();
    let o = run(&["verify", "--gains", gains.to_str().unwrap()], &cfg, dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read(&gains).unwrap(), before);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify.json")).unwrap()).unwrap();
    assert_eq!(v["report"]["pass"], true);
}

#[test]
fn huge_t2_is_infeasible() {
    let dir = TempDir::new().unwrap();
    let cfg = edited(&dir, "example1.json", "\"t2\": 0.41,", "\"t2\": 100.0,");
    let o = run(&["design"], &cfg, &dir.path().join("out"));
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn malformed_json_exits_1() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, "{\"plant\": [").unwrap();
    assert_eq!(code(&run(&["design"], &cfg, dir.path())), 1);
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = edited(&dir, "example1.json", "\"lambda_t\": 0.05,", "\"lambda_t\": 0.05, \"lambda\": 1,");
    let o = run(&["design"], &cfg, dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown field"));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&bin().arg("frobnicate").output().unwrap()), 1);
    assert_eq!(code(&bin().arg("design").output().unwrap()), 1);
    let dir = TempDir::new().unwrap();
    let o = run(&["design", "--delta-grid", "1,2,three,log"], &scenario("example1.json"), dir.path());
    assert_eq!(code(&o), 1);
    let o = run(&["design", "--method", "Luenberger"], &scenario("example1.json"), dir.path());
    assert_eq!(code(&o), 1);
    assert_eq!(code(&bin().arg("--help").output().unwrap()), 0);
}

#[test]
fn delta_grid_flag_overrides_config() {
    let dir = TempDir::new().unwrap();
    let o = run(&["design", "--delta-grid", "2.5,3.5,3,lin"], &scenario("example1.json"), dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let design: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("design.json")).unwrap()).unwrap();
    let delta = design["delta"].as_f64().unwrap();
    assert!([2.5, 3.0, 3.5].contains(&delta), "delta {delta}");
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let dir = TempDir::new().unwrap();
    let cfg = edited(
        &dir,
        "example1.json",
        "\"jitter\": { \"kind\": \"deterministic\" }",
        "\"jitter\": { \"kind\": \"uniform\" }",
    );
    let csv = |sub: &str, seed: &str| {
        let out = dir.path().join(sub);
        let o = run(&["simulate", "--seed", seed, "--plot"], &cfg, &out);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        assert!(out.join("arc.svg").exists());
        std::fs::read(out.join("arc.csv")).unwrap()
    };
    let a = csv("a", "11");
    let b = csv("b", "11");
    let c = csv("c", "12");
    assert_eq!(a, b);
    assert_ne!(a, c);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "t,j,side,z1,z2,eps1,eps2,theta_tilde1,tau,dist_A,V"
    );
    assert!(text.contains(",pre-jump,") && text.contains(",post-jump,"));
}

#[test]
fn pareto_writes_curve_and_plot() {
    let dir = TempDir::new().unwrap();
    let o = run(&["pareto", "--plot"], &scenario("example1.json"), dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("pareto.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("T2,gamma,delta,method"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').take(3).map(|v| v.parse().unwrap()).collect())
        .collect();
    assert!(!rows.is_empty());
    for w in rows.windows(2) {
        assert!(w[0][0] < w[1][0] && w[0][1] <= w[1][1] * (1.0 + 1e-6), "{w:?}");
    }
    assert!(std::fs::read_to_string(dir.path().join("pareto.svg")).unwrap().contains("<polyline"));
}

#[test]
fn exported_sdpa_parses() {
    let dir = TempDir::new().unwrap();
    for args in [&["export-sdpa"][..], &["export-sdpa", "--method", "ZOH"][..]] {
        let o = run(args, &scenario("example1.json"), dir.path());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let text = std::fs::read_to_string(dir.path().join("problem.dat-s")).unwrap();
        let p = sporadic_observer::sdp::import_sdpa(&text).unwrap();
        assert!(p.num_vars() > 0);
    }
}

#[test]
fn bundled_scenarios_parse_and_export() {
    let dir = TempDir::new().unwrap();
    for name in ["example1.json", "example2.json", "example3.json"] {
        let o = run(&["export-sdpa"], &scenario(name), &dir.path().join(name));
        assert_eq!(code(&o), 0, "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
}
