use mermin::cli::{run, EXIT_DOMAIN, EXIT_USAGE};
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let code = run(std::iter::once("mermin").chain(args.iter().copied()), &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out) = call(args);
    assert_eq!(code, 0, "{out}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn ext_check_reports_witness() {
    let v = json(&["ext-check", "--group", "4", "--subgroup", "2"]);
    assert_eq!(v["command"], "ext-check");
    assert_eq!(v["result"]["trivial"], false);
    assert_eq!(v["result"]["witness"], "2x=2");
    let v = json(&["ext-check", "--group", "2,2", "--subgroup", "1,0"]);
    assert_eq!(v["result"]["trivial"], true);
    assert!(v["result"]["witness"].is_null());
}

#[test]
fn classic_scenario_commands() {
    let v = json(&["scenario-validate", "--preset", "classic-322"]);
    assert_eq!(v["result"]["valid"], true);
    let v = json(&["lhv-check", "--preset", "classic-322", "--mode", "parity"]);
    assert_eq!(v["result"]["lhv_exists"], false);
    assert_eq!(v["result"]["verdict"]["certificate"]["modulus"], 2);
    let (code, csv) = call(&["simulate", "--preset", "classic-322", "--csv"]);
    assert_eq!(code, 0);
    assert!(csv.starts_with("row,outcome_tuple,probability\n"));
    // 4 rows × 8 tuples.
    assert_eq!(csv.lines().count(), 33);
}

#[test]
fn newcond_scan_and_pairs() {
    let v = json(&["newcond", "--D", "2", "--V", "3", "--beta", "1", "--scan", "360"]);
    let sols = v["result"]["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 1, "{sols:?}");
    let v = json(&["pairs-count", "--D", "2", "--N", "3..3", "--q", "4"]);
    assert_eq!(v["result"]["rows"][0]["count"], 1);
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = call(&["pairs-count", "--D", "2", "--N", "3..5", "--q", "4", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(dir.path().join("pairs_D2.csv").exists());
    assert!(dir.path().join("pairs_D2.gp").exists());
}

#[test]
fn frel_and_qss() {
    let v = json(&["frel-verify", "--G", "2", "--H", "2"]);
    assert_eq!(v["result"]["all_laws_hold"], true);
    assert_eq!(v["result"]["phase_count"], 4);
    assert_eq!(v["result"]["classical_count"], 2);
    assert_eq!(v["result"]["locality"]["trivial"], true);
    let v = json(&["qss-run", "--N", "3", "--D", "2", "--alphabet", "0;1/4", "--rounds", "500", "--seed", "7"]);
    assert_eq!(v["result"]["accuracy"], 1.0);
    let (code, csv) = call(&["qss-run", "--N", "3", "--D", "2", "--alphabet", "0;1/4", "--rounds", "200", "--csv"]);
    assert_eq!(code, 0);
    assert!(csv.starts_with("rounds,accuracy,failure_rate,tv_distance\n"));
}

#[test]
fn exit_codes() {
    let (code, out) = call(&["ext-check", "--group", "4", "--subgroup", "x"]);
    assert_eq!(code, EXIT_DOMAIN, "{out}");
    let err: Value = serde_json::from_str(&out).unwrap();
    assert!(err["error"].is_string() && err["message"].is_string());
    assert_eq!(call(&["no-such-command"]).0, EXIT_USAGE);
    assert_eq!(call(&["ext-check", "--group", "4"]).0, EXIT_USAGE);
    assert_eq!(call(&["frel-verify", "--G", "2", "--H", "2", "--csv"]).0, EXIT_USAGE);
    assert_eq!(call(&["--help"]).0, 0);
    // Carrier 4·4·4 = 64 exceeds a bound of 16.
    assert_eq!(call(&["frel-verify", "--G", "4", "--H", "4,4", "--bound", "16"]).0, EXIT_DOMAIN);
}

#[test]
fn envelopes_round_trip_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["ext-check", "--group", "2,4", "--subgroup", "0,2"],
        &["scenario-build", "--preset", "qutrit-five-party"],
        &["scenario-validate", "--D", "3", "--rows", "0;0|1/3,2/3;0"],
        &["simulate", "--preset", "classic-322", "--tol", "1e-10"],
        &["lhv-check", "--preset", "classic-322"],
        &["newcond", "--D", "3", "--V", "10", "--beta", "3", "--b", "1/9,8/9"],
        &["pairs-count", "--D", "2", "--N", "3..6", "--q", "8", "--policy", "cyclic"],
        &["frel-verify", "--G", "3", "--H", "2"],
        &["qss-run", "--N", "2", "--D", "2", "--alphabet", "0;1/4", "--rounds", "300", "--seed", "11"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let (code, first) = call(args);
        assert_eq!(code, 0, "{args:?}: {first}");
        let path = dir.path().join(format!("env{i}.json"));
        std::fs::write(&path, &first).unwrap();
        let (code, second) = call(&[args[0], "--input", path.to_str().unwrap()]);
        assert_eq!(code, 0, "{args:?}: {second}");
        assert_eq!(first, second, "{args:?}");
    }
}
