use std::process::{Command, Output};

fn lab(args: &[&str], env: &[(&str, &str)]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kneser-lab")).args(args).env_clear().envs(env.iter().copied()).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn hitting_emits_provenance_and_exits_zero() {
    let out = lab(&["hitting", "--trials", "20", "--seed", "3"], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["config"]["seed"], 3);
    assert_eq!(v["config"]["trials"], 20);
    assert_eq!(v["results"]["trials"].as_array().unwrap().len(), 20);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["violations"] == 0));
    assert!(v["timings"].get("elapsed_ms").is_none());
}

#[test]
fn environment_is_overridden_by_flags() {
    let env = [("KNESER_N", "7"), ("KNESER_K", "3"), ("KNESER_TRIALS", "4"), ("KNESER_SEED", "9")];
    let v = json(&lab(&["hitting"], &env));
    assert_eq!((v["config"]["n"].as_u64(), v["config"]["trials"].as_u64()), (Some(7), Some(4)));
    let v = json(&lab(&["hitting", "--trials", "2", "--n", "5", "--k", "2"], &env));
    assert_eq!((v["config"]["n"].as_u64(), v["config"]["trials"].as_u64()), (Some(5), Some(2)));
    assert_eq!(v["config"]["seed"], 9);
}

#[test]
fn csv_has_provenance_line_then_header() {
    let out = lab(&["hitting", "--trials", "3", "--format", "csv"], &[]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let prov: serde_json::Value = serde_json::from_str(lines.next().unwrap().strip_prefix("# ").unwrap()).unwrap();
    assert_eq!(prov["config"]["command"], "hitting");
    assert!(lines.next().unwrap().starts_with("trial,seed,tau_super,"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn injected_fault_fails_with_witness() {
    let out = lab(&["verify", "--inject-fault"], &[]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let failed: Vec<&serde_json::Value> =
        v["checks"].as_array().unwrap().iter().filter(|c| c["violations"].as_u64() > Some(0)).collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0]["name"], "edge-identity");
    assert!(failed[0]["witness"].is_string());
    assert_eq!(lab(&["verify"], &[]).status.code(), Some(0));
}

#[test]
fn exact_is_refused_beyond_the_guard() {
    let out = lab(&["exact", "--n", "7", "--k", "3"], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("70 edges"));
    assert!(out.stdout.is_empty());
}

#[test]
fn exact_table_is_monotone() {
    let v = json(&lab(&["exact", "--p-grid", "0:1:0.25"], &[]));
    let rows = v["results"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for event in ["no-independent-superstar", "no-independent-near-star", "ekr", "alpha-equals-star-size"] {
        let curve: Vec<f64> = rows.iter().map(|r| r["probabilities"][event].as_f64().unwrap()).collect();
        assert!(curve.windows(2).all(|w| w[0] <= w[1]), "{event}: {curve:?}");
        assert_eq!((curve[0], curve[4]), (0.0, 1.0));
    }
}

#[test]
fn invalid_arguments_exit_two() {
    assert_eq!(lab(&["hitting", "--n", "4", "--k", "2"], &[]).status.code(), Some(2));
    assert_eq!(lab(&["sweep", "--p-grid", "0:2:0.5"], &[]).status.code(), Some(2));
}

#[test]
fn output_is_identical_across_worker_counts() {
    let run = |w: &str| lab(&["sweep", "--trials", "50", "--p-grid", "0.4,0.8", "--workers", w], &[]).stdout;
    assert_eq!(run("1"), run("3"));
    let certs = |w: &str| lab(&["certificate", "--n", "9", "--k", "4", "--trials", "5", "--workers", w], &[]).stdout;
    assert_eq!(certs("1"), certs("4"));
}

#[test]
fn wall_clock_is_opt_in() {
    let v = json(&lab(&["hitting", "--trials", "2", "--wall-clock"], &[]));
    assert!(v["timings"]["elapsed_ms"].is_u64());
}
