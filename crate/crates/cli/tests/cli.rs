use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cosetope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cosetope"))
        .args(args)
        .env_remove("COSETOPE_BUDGET")
        .output()
        .expect("binary runs")
}

fn cosetope_env(args: &[&str], budget: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cosetope"))
        .args(args)
        .env("COSETOPE_BUDGET", budget)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

/// A degree-7 non-congruence subgroup (level 6, surjects onto every SL2(Z/m)).
const NONCONGRUENCE_REP: &str = r#"{"degree":7,"s":[0,2,1,4,3,6,5],"t":[1,2,3,5,0,4,6]}"#;

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn report_header_and_string_numbers() {
    let r = report(&cosetope(&["quotient", "--m", "2"]));
    let text = serde_json::to_string(&r).unwrap();
    assert!(text.starts_with(r#"{"schema":1,"command":"quotient""#));
    assert_eq!(r["output"]["order"], "96");
    assert_eq!(r["input"]["spec"]["m"], "2");
}

#[test]
fn lowindex_to_degree_seven() {
    let r = report(&cosetope(&["lowindex", "--max-degree", "7"]));
    let rows = r["output"].as_array().unwrap();
    assert_eq!(rows.len(), 1 + 1 + 4 + 8 + 5 + 22 + 42);
    assert!(rows.iter().any(|row| row["congruence"] == false));
    for row in rows {
        assert!(row["level"].is_string());
        assert!(row["cusp_widths"].is_array());
    }
}

#[test]
fn gs_demo_contents_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("demo.json");
    let out = cosetope(&[
        "gs-demo",
        "--max-level",
        "12",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let output = &r["output"];
    for row in output["intersections"].as_array().unwrap() {
        assert_eq!(row["intersection_size"], "1");
    }
    assert!(!output["hk_certificates"].as_array().unwrap().is_empty());
    assert_eq!(output["evidence"]["ambient_member"], false);

    let v = report(&cosetope(&["verify", "--report", path.to_str().unwrap()]));
    assert_eq!(v["identical"], true);
}

#[test]
fn same_seed_same_bytes() {
    let a = cosetope(&["gs-demo", "--max-level", "8", "--seed", "7"]);
    let b = cosetope(&["gs-demo", "--max-level", "8", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn tractable_with_equal_subgroups_picks_m_spec() {
    let dir = tempfile::tempdir().unwrap();
    let tower = write(
        dir.path(),
        "tower.json",
        r#"[{"m":2},{"m":3},{"m":4},{"m":6}]"#,
    );
    let args = [
        "tractable",
        "--tower",
        &tower,
        "--m-spec",
        "2",
        "--h",
        ":S",
        "--h",
        ":T",
        "--k",
        ":S",
        "--k",
        ":T",
        "--cap",
        ":S",
        "--cap",
        ":T",
    ];
    let r = report(&cosetope(&args));
    assert_eq!(r["output"]["found_n"]["m"], "2");
}

#[test]
fn gap_witness_and_congruence_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let rep = write(dir.path(), "rep.json", NONCONGRUENCE_REP);
    let c = report(&cosetope(&["congruence", "--rep", &rep]));
    assert_eq!(c["output"]["congruence"], false);
    assert_eq!(c["output"]["level"], "6");

    let path = dir.path().join("gw.json");
    let out = cosetope(&[
        "gap-witness",
        "--rep",
        &rep,
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["output"]["outcome"], "found");
    let v = report(&cosetope(&["verify", "--report", path.to_str().unwrap()]));
    assert_eq!(v["identical"], true);
}

#[test]
fn tampered_report_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let out = cosetope(&["intersect", "--m", "3", "--standard"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let tampered = text.replacen(
        r#""intersection_size": "1""#,
        r#""intersection_size": "2""#,
        1,
    );
    assert_ne!(text, tampered);
    let path = write(dir.path(), "bad.json", &tampered);
    let v = cosetope(&["verify", "--report", &path]);
    assert_eq!(v.status.code(), Some(2));
    let body: Value = serde_json::from_slice(&v.stdout).unwrap();
    assert_eq!(body["identical"], false);
}

#[test]
fn separation_probe_and_membership() {
    let probe = report(&cosetope(&["thm-b-probe", "--standard", "--g", "1,0,0,2:"]));
    assert_eq!(probe["output"]["outcome"], "certified");
    let member = report(&cosetope(&[
        "dcoset-member",
        "--m",
        "3",
        "--standard",
        "--g",
        "0,1,0,0:",
    ]));
    assert_eq!(member["output"]["member"], true);
}

#[test]
fn validation_errors_exit_two() {
    assert_eq!(cosetope(&["quotient", "--m", "0"]).status.code(), Some(2));
    assert_eq!(
        cosetope(&["congruence", "--rep", "/nonexistent/rep.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cosetope(&["image", "--m", "3", "--gen", "1,2:S"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cosetope(&["quotient", "--m", "3", "--filter", "nilpotent"])
            .status
            .code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let rep = write(dir.path(), "gamma.json", r#"{"degree":1,"s":[0],"t":[0]}"#);
    // A congruence subgroup has no gap witness.
    assert_eq!(
        cosetope(&["gap-witness", "--rep", &rep]).status.code(),
        Some(2)
    );
}

#[test]
fn budget_exhaustion_exits_three() {
    let out = cosetope_env(&["intersect", "--m", "3", "--standard"], "closure=10");
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
    let out = cosetope(&["lowindex", "--max-degree", "6", "--budget", "degree=3"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(
        cosetope_env(&["quotient", "--m", "2"], "closure=0")
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn timing_is_opt_in() {
    let plain = report(&cosetope(&["quotient", "--m", "2"]));
    assert!(plain.get("timing_ms").is_none());
    let timed = report(&cosetope(&["quotient", "--m", "2", "--timing"]));
    assert!(timed["timing_ms"].is_string() || timed["timing_ms"].is_number());
}
