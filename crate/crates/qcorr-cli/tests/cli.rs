//! End-to-end tests of the binary: exit-code contract, document round
//! trips, CSV schema and determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn qcorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcorr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("qcorr-cli-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn bell_round_trip_is_bitwise_and_measures_correctly() {
    let path = tmp("bell.json");
    let out = qcorr(&["state", "make", "bell", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    // the written document parses back to the exact in-memory amplitudes
    let text = std::fs::read_to_string(&path).unwrap();
    match qcorr::io::parse_state(&text).unwrap() {
        qcorr::io::StateDocument::Pure(p) => {
            assert_eq!(p.amplitudes(), qcorr::states::bell_state().amplitudes());
        }
        _ => panic!("expected a pure state document"),
    }

    let out = qcorr(&[
        "measure",
        path.to_str().unwrap(),
        "--measures",
        "entropy,discord",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(doc["entropy"]["s_joint"].as_f64().unwrap().abs() < 1e-10);
    assert!((doc["discord"]["discord"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!((doc["entropy"]["mutual_information"].as_f64().unwrap() - 2.0).abs() < 1e-10);
    std::fs::remove_file(&path).ok();
}

#[test]
fn exit_codes_follow_the_contract() {
    // parse failure: exit 2
    let path = tmp("bad.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = qcorr(&["measure", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_file(&path).ok();

    // invariant failure (eigenvalue -0.1): exit 3
    let path = tmp("nonpsd.json");
    std::fs::write(
        &path,
        r#"{"dims": [2], "labels": ["a"],
            "re": [[1.1, 0.0], [0.0, -0.1]], "im": [[0.0, 0.0], [0.0, 0.0]]}"#,
    )
    .unwrap();
    let out = qcorr(&["measure", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    std::fs::remove_file(&path).ok();

    // unwritable output path: exit 4
    let out = qcorr(&[
        "state",
        "make",
        "bell",
        "--out",
        "/nonexistent-dir/out.json",
    ]);
    assert_eq!(out.status.code(), Some(4));

    // unknown campaign: exit 2
    let out = qcorr(&["verify", "--campaign", "nope"]);
    assert_eq!(out.status.code(), Some(2));

    // angles outside the family range: exit 2
    let out = qcorr(&["state", "make", "example", "--theta", "2pi", "--phi", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_schema_determinism_and_identities() {
    let args = [
        "sweep",
        "--thetas",
        "pi/4",
        "--phi-steps",
        "9",
        "--seed",
        "5",
        "--budget-starts",
        "8",
        "--budget-iters",
        "100",
    ];
    let out1 = qcorr(&args);
    assert_eq!(out1.status.code(), Some(0));
    let text1 = stdout(&out1);
    let out2 = qcorr(&args);
    assert_eq!(text1, stdout(&out2), "same seed and flags must be byte-identical");

    let mut lines = text1.lines();
    assert_eq!(
        lines.next().unwrap(),
        "phi,theta,E_C,E_D,Delta,discord_ab_numeric,S_cond_ab,ree_upper,ppt_ac"
    );
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(|s| s.to_string()).collect())
        .collect();
    assert_eq!(rows.len(), 9);
    for r in &rows {
        assert_eq!(r.len(), 9);
        let (e_c, e_d, delta): (f64, f64, f64) =
            (r[2].parse().unwrap(), r[3].parse().unwrap(), r[4].parse().unwrap());
        assert!(
            (delta - (e_c - e_d)).abs() <= 2e-9,
            "emitted delta inconsistent: {delta} vs {e_c} - {e_d}"
        );
        assert!(r[8] == "true" || r[8] == "false");
    }
    // phi = 0 endpoint: pure state, Delta = 0
    let delta0: f64 = rows[0][4].parse().unwrap();
    assert!(delta0.abs() <= 1e-9);
}

#[test]
fn sweep_separable_endpoint_vanishes() {
    let out = qcorr(&[
        "sweep",
        "--thetas",
        "pi/6",
        "--phi-steps",
        "3",
        "--budget-starts",
        "8",
        "--budget-iters",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let last = text.lines().last().unwrap();
    let cols: Vec<&str> = last.split(',').collect();
    // phi = pi/2: all measure columns vanish
    for idx in [2usize, 3, 4, 5] {
        let v: f64 = cols[idx].parse().unwrap();
        assert!(v.abs() <= 1e-9, "column {idx} = {v} at the separable endpoint");
    }
    assert_eq!(cols[8], "true");
}

#[test]
fn sweep_spot_values_on_the_mc_axis() {
    let out = qcorr(&[
        "sweep",
        "--thetas",
        "pi/2",
        "--phi-steps",
        "3",
        "--budget-starts",
        "12",
        "--budget-iters",
        "150",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    // middle row is phi = pi/4
    let row = text.lines().nth(2).unwrap();
    let cols: Vec<&str> = row.split(',').collect();
    let e_c: f64 = cols[2].parse().unwrap();
    let e_d: f64 = cols[3].parse().unwrap();
    let delta: f64 = cols[4].parse().unwrap();
    assert!((e_c - 0.600876037).abs() < 1e-6);
    assert!((e_d - 0.399123963).abs() < 1e-6);
    assert!((delta - 0.201752073).abs() < 1e-6);
}

#[test]
fn sweep_json_format_carries_the_same_rows() {
    let out = qcorr(&[
        "sweep",
        "--thetas",
        "pi/4",
        "--phi-steps",
        "3",
        "--format",
        "json",
        "--budget-starts",
        "6",
        "--budget-iters",
        "80",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for r in rows {
        let e_c = r["E_C"].as_f64().unwrap();
        let e_d = r["E_D"].as_f64().unwrap();
        let delta = r["Delta"].as_f64().unwrap();
        assert!((delta - (e_c - e_d)).abs() <= 2e-9);
    }
}

#[test]
fn verify_campaign_passes_and_reports() {
    let out = qcorr(&[
        "verify",
        "--campaign",
        "koashi-winter",
        "--trials",
        "15",
        "--seed",
        "3",
        "--budget-starts",
        "12",
        "--budget-iters",
        "120",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("verify: koashi-winter: PASS"), "{text}");
    assert!(text.contains("worst |dev|"));
}

#[test]
fn state_make_random_and_one_mc_documents_load_back() {
    let path = tmp("random.json");
    let out = qcorr(&[
        "state", "make", "random", "--dims", "2,2", "--rank", "3", "--seed", "11", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(matches!(
        qcorr::io::parse_state(&text).unwrap(),
        qcorr::io::StateDocument::Density(_)
    ));
    std::fs::remove_file(&path).ok();

    let spec_path = tmp("onemc.json");
    std::fs::write(
        &spec_path,
        r#"{
        "alphas": {"re": [0.7071067811865476, 0.7071067811865476], "im": [0.0, 0.0]},
        "a_states": [{"re": [1.0, 0.0], "im": [0.0, 0.0]},
                     {"re": [0.0, 1.0], "im": [0.0, 0.0]}],
        "c_states": [{"re": [1.0, 0.0], "im": [0.0, 0.0]},
                     {"re": [0.7071067811865476, 0.7071067811865476], "im": [0.0, 0.0]}]
    }"#,
    )
    .unwrap();
    let out = qcorr(&[
        "state", "make", "one-mc", "--spec", spec_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["dims"], serde_json::json!([2, 2]));
    std::fs::remove_file(&spec_path).ok();
}
