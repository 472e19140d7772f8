use std::path::Path;
use std::process::{Command, Output};

use multact_core::numtheory::FactorTable;
use serde_json::Value;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multact-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn run_ok(cfg: &str, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", cfg, "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = lab(&args);
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    o
}

fn summary(out: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join(format!("{name}.json"))).unwrap()).unwrap()
}

#[test]
fn folner_density_row_for_k2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "f.json",
        r#"{"experiment": "folner-density", "params": {"k_values": [2]}}"#,
    );
    run_ok(&cfg, dir.path(), &[]);
    let csv = std::fs::read_to_string(dir.path().join("folner-density.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("k,s_k,q_k,density"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..4], &["2", "864", "1296", "2/3"]);
    let s = summary(dir.path(), "folner-density");
    assert_eq!(s["passes"]["density-equals-closed-form"], true);
    assert_eq!(s["config_sha256"].as_str().unwrap().len(), 64);
    assert!(s["version"]["multact-core"].is_string());
    assert!(s["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn unknown_experiment_exits_2_and_lists_registry() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "u.json", r#"{"experiment": "no-such-thing"}"#);
    let o = lab(&["run", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    for name in ["folner-density", "counterexample-dilation", "katai-diagnostic"] {
        assert!(err.contains(name), "{err}");
    }
    assert!(!dir.path().join("no-such-thing.csv").exists());
}

#[test]
fn schema_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for (i, body) in [
        r#"{"experiment": "folner-density", "colour": 1}"#,
        r#"{"experiment": "folner-density", "params": {"k_values": [2], "extra": true}}"#,
        r#"{"experiment": "mainA-linear", "params": {"forms": ["m + k"]}}"#,
        r#"not json"#,
    ]
    .iter()
    .enumerate()
    {
        let cfg = write_config(dir.path(), &format!("s{i}.json"), body);
        let o = lab(&["run", &cfg, "--out", dir.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{body}");
    }
}

#[test]
fn computation_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"experiment": "folner-density", "params": {"k_values": [1]}}"#,
    );
    let o = lab(&["run", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let configs = [
        (
            "gowers-oracle",
            r#"{"experiment": "gowers-oracle", "seed": 11, "params": {"sequences": 8, "n_max": 64, "pairs": 4, "pair_n_max": 12, "s_max": 3}}"#,
        ),
        (
            "chu-inequality",
            r#"{"experiment": "chu-inequality", "params": {"instances": 20}}"#,
        ),
        (
            "recurrence-profile",
            r#"{"experiment": "recurrence-profile", "params": {"n": 150, "q_trick": {"k": 3, "samples": 2, "offset_m": 1}}}"#,
        ),
    ];
    for (name, body) in configs {
        let cfg = write_config(dir.path(), &format!("{name}.json"), body);
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        run_ok(&cfg, &a, &[]);
        run_ok(&cfg, &b, &["--threads", "2"]);
        let x = std::fs::read(a.join(format!("{name}.csv"))).unwrap();
        let y = std::fs::read(b.join(format!("{name}.csv"))).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{name}");
        assert_eq!(summary(&a, name)["config_sha256"], summary(&b, name)["config_sha256"]);
    }
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "l.json",
        r#"{"experiment": "lattice-identity", "seed": 1, "params": {"instances": 50}}"#,
    );
    run_ok(&cfg, &dir.path().join("a"), &[]);
    run_ok(&cfg, &dir.path().join("b"), &["--seed", "2"]);
    let sa = summary(&dir.path().join("a"), "lattice-identity");
    let sb = summary(&dir.path().join("b"), "lattice-identity");
    assert_eq!(sa["seed"], 1);
    assert_eq!(sb["seed"], 2);
    assert_ne!(sa["config_sha256"], sb["config_sha256"]);
    assert_eq!(sb["all_passed"], true);
}

#[test]
fn counterexample_dilation_matches_direct_count() {
    let dir = tempfile::tempdir().unwrap();
    let m = 1009u64;
    let cfg = write_config(
        dir.path(),
        "d.json",
        &format!(r#"{{"experiment": "counterexample-dilation", "params": {{"modulus": {m}, "n_values": [30]}}}}"#),
    );
    run_ok(&cfg, dir.path(), &[]);
    let csv = std::fs::read_to_string(dir.path().join("counterexample-dilation.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let in_a = |x: u64| 3 * x >= m && 3 * x < 2 * m;
    let mut worst = 0u64;
    for a in 1..=30u64 {
        for b in 1..=30u64 {
            let hits = (0..m)
                .filter(|&x| in_a(a * x % m) && in_a(b * x % m) && in_a((a + b) * x % m))
                .count() as u64;
            worst = worst.max(hits);
        }
    }
    let got: f64 = row[3].parse().unwrap();
    assert!((got - worst as f64 / m as f64).abs() < 1e-12, "{got} vs {worst}/{m}");
    assert_eq!(
        summary(dir.path(), "counterexample-dilation")["passes"]["intersection-small"],
        true
    );
}

#[test]
fn sieve_cache_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spf.bin");
    let o = lab(&["sieve", "--limit", "100000", "--sieve-cache", path.to_str().unwrap()]);
    assert!(o.status.success());
    let t = FactorTable::read_cache(&path).unwrap();
    assert!(t.limit() >= 100_000);
    assert_eq!(t.spf(99_991), 99_991);
    assert_eq!(t.spf(91), 7);

    let cfg = write_config(
        dir.path(),
        "a.json",
        r#"{"experiment": "aperiodicity-liouville", "params": {"a_max": 2, "b_max": 1, "n_values": [1000, 20000], "tolerance": 1.0}}"#,
    );
    run_ok(&cfg, dir.path(), &["--sieve-cache", path.to_str().unwrap()]);
    let s = summary(dir.path(), "aperiodicity-liouville");
    assert!(s["sieve_cache"].as_str().unwrap().ends_with("spf.bin"));
}

#[test]
fn list_prints_every_experiment() {
    let o = lab(&["list"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(text.lines().count(), 19);
    assert!(text.contains("mainB-rational"));
}
