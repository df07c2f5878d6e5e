use std::io::Write;
use std::process::{Command, Output};

fn llab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_llab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn llab_env(args: &[&str], key: &str, val: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_llab"))
        .args(args)
        .env(key, val)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn field_file(body: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(body.as_bytes()).unwrap();
    f
}

fn q2() -> tempfile::NamedTempFile {
    field_file(r#"{"p":2,"f":1,"eisenstein":[[-2],[1]]}"#)
}

fn q3zeta3() -> tempfile::NamedTempFile {
    field_file(r#"{"p":3,"f":1,"eisenstein":[[3],[-3],[1]]}"#)
}

fn q2_cbrt2() -> tempfile::NamedTempFile {
    field_file(r#"{"p":2,"f":1,"eisenstein":[[-2],[0],[0],[1]]}"#)
}

#[test]
fn census_and_mass() {
    let f = q3zeta3();
    let out = llab(&["census", "--field", f.path().to_str().unwrap(), "--l", "3"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["result"]["rows"], serde_json::json!([[1, 3], [2, 9], [3, 27]]));

    let f = q2();
    let out = llab(&["mass", "--field", f.path().to_str().unwrap(), "--l", "2"]);
    assert_eq!(json_of(&out)["result"], "2");

    let f = q3zeta3();
    let out = llab(&["mass", "--field", f.path().to_str().unwrap(), "--l", "3"]);
    assert_eq!(json_of(&out)["result"], "13/27");
}

#[test]
fn classify_with_verification() {
    let f = q2();
    let p = f.path().to_str().unwrap();
    let out = llab(&["classify", "--field", p, "--l", "2", "--mu", "-1", "--verify"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["verified"], true);
    assert_eq!(v["result"]["t"], 1);
    assert_eq!(v["result"]["v_disc"], 2);

    let out = llab(&["classify", "--field", p, "--l", "2", "--mu", "2", "--verify"]);
    let v = json_of(&out);
    assert_eq!(v["verified"], true);
    assert_eq!(v["result"]["t"], 2);
}

#[test]
fn reproduce_examples() {
    for (name, expect) in [
        ("ex47", serde_json::json!(["1", "1+pi^2+pi^4", "1+pi^2+pi^5", "1+pi^4+pi^5"])),
        ("ex48", serde_json::json!(["1", "1+pi^6"])),
        ("ex50", serde_json::json!({"level": 4, "is_unramified": true})),
    ] {
        let out = llab(&["reproduce", name]);
        assert!(out.status.success(), "{name}");
        assert_eq!(json_of(&out)["result"], expect, "{name}");
    }
}

#[test]
fn exit_codes_distinguish_domain_and_precision() {
    let f = q2();
    let p = f.path().to_str().unwrap();
    // 17 is a square: not a line
    let out = llab(&["classify", "--field", p, "--l", "2", "--mu", "17"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json_of(&out);
    assert!(v["detail"].as_str().unwrap().contains("not a line"));

    // starved precision
    let f = q2_cbrt2();
    let out = llab_env(
        &["census", "--field", f.path().to_str().unwrap(), "--l", "2"],
        "LLAB_PREC",
        "2",
    );
    assert_eq!(out.status.code(), Some(3));

    // malformed field spec
    let f = field_file(r#"{"p":2}"#);
    let out = llab(&["field-info", "--field", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let f = q3zeta3();
    let p = f.path().to_str().unwrap();
    let a = llab(&["census", "--field", p, "--l", "3"]);
    let b = llab(&["census", "--field", p, "--l", "3"]);
    assert_eq!(a.stdout, b.stdout);

    let a = llab(&["pairing", "--field", p, "--generator"]);
    let b = llab(&["pairing", "--field", p, "--generator"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn pipeline_from_chain_file() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(
        br#"[
  {"field": {"p":2,"f":1,"eisenstein":[[-2],[1]]}, "l": 2, "mu": 5},
  {"field": {"p":2,"f":2,"eisenstein":[[-2],[1]]}, "l": 2, "mu": -1}
]"#,
    )
    .unwrap();
    let out = llab(&["pipeline", "--chain", f.path().to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(json_of(&out)["result"]["total_v_base"], 4);
}

#[test]
fn ff_disc_reports_both_certificates() {
    let out = llab(&["ff-disc", "--p", "2", "--poly", "1,1,1"]);
    let v = json_of(&out);
    assert_eq!(v["result"]["class_trivial"], false);
    assert_eq!(v["result"]["lift_class"], 1);

    let out = llab(&["ff-disc", "--p", "5", "--poly", "1,0,1"]);
    let v = json_of(&out);
    assert_eq!(v["result"]["lift_class"], serde_json::Value::Null);
}

#[test]
fn elliptic_round_trip_through_the_binary() {
    let f = q2();
    let p = f.path().to_str().unwrap();
    let out = llab(&["ec-realize", "--field", p, "--delta", "-1"]);
    assert!(out.status.success());
    let out = llab(&["ec-class", "--field", p, "--a1", "1", "--a6", "1"]);
    let v = json_of(&out);
    // d = -433 is a 2-adic unit
    assert_eq!(v["result"]["valuation"], 0);
}
