use std::process::{Command, Output};

use serde_json::Value;

fn qexp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qexp"))
        .args(args)
        .env_remove("QEXP_PRECISION")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let o = qexp(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn assert_envelope(v: &Value, command: &str) {
    let obj = v.as_object().unwrap();
    let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    keys.sort();
    assert_eq!(keys, ["base", "command", "ok", "result"]);
    assert_eq!(v["command"], command);
    assert!(v["ok"].is_boolean());
    assert!(v["result"].is_object() || v["result"].is_array());
}

#[test]
fn value_of_zero_word() {
    let o = qexp(&["value", "0^inf"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("decimal       0.00000000000000000000"));
    let v = json(&["value", "0^inf"]);
    assert_envelope(&v, "value");
    assert_eq!(v["result"]["value"]["coefficients"], serde_json::json!(["0", "0", "0", "0"]));
}

#[test]
fn count_two_expansions() {
    let o = qexp(&["count", "0^2(01)^3(10)^inf"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("Exact(2)\n"), "{text}");
    assert!(text.contains("certificate verified: true"));
    let v = json(&["count", "0^2(01)^3(10)^inf"]);
    assert_envelope(&v, "count");
    let ws = v["result"]["count"]["expansions"].as_array().unwrap();
    assert_eq!(ws.len(), 2);
    // Text and JSON list the same certificate words.
    for w in ws {
        assert!(text.contains(w["word"].as_str().unwrap()));
    }
}

#[test]
fn count_infinite_witness() {
    let v = json(&["count", "(0110)^inf"]);
    assert_eq!(v["result"]["count"]["kind"], "infinite_witness");
    assert_eq!(v["result"]["verified"], true);
}

#[test]
fn count_tree_as_dot() {
    let o = qexp(&["count", "01^3(10)^inf", "--dot"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("digraph"));
}

#[test]
fn orbit_composition_order_lands_on_target() {
    let o = qexp(&["orbit", "01^2(01)(10)^inf", "--word", "0001", "--order", "paper"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("result   0.734788"), "{}", stdout(&o));
    let composed = json(&["orbit", "01^2(01)(10)^inf", "--word", "0001"]);
    let forward = json(&["orbit", "01^2(01)(10)^inf", "--word", "1000", "--order", "forward"]);
    assert_eq!(composed["result"]["result"], forward["result"]["result"]);
}

#[test]
fn orbit_from_coefficients() {
    // T0 multiplies 1/2 by q.
    let v = json(&["orbit", "1/2,0,0,0", "--word", "0"]);
    assert_eq!(v["result"]["result"]["coefficients"], serde_json::json!(["0", "1/2", "0", "0"]));
}

#[test]
fn orbit_domain_violation_is_reported() {
    let o = qexp(&["orbit", "0^inf", "--word", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("undefined"));
}

#[test]
fn classify_a1_point() {
    let o = qexp(&["classify", "01(10)^inf"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("branch       A1"));
    assert!(text.contains("expansions   two"));
    let v = json(&["classify", "10^3(01)^inf"]);
    assert_eq!(v["result"]["branch"]["kind"], "A1");
}

#[test]
fn escape_certificates() {
    let v = json(&["escape", "--m", "1", "--k", "3"]);
    assert_envelope(&v, "escape");
    assert_eq!(v["ok"], true);
    assert!(v["result"]["landing"].as_str().unwrap().starts_with("0.734788"));
    let o = qexp(&["escape", "--m", "2", "--k", "1", "--family", "type10"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("verified true"));
    let o = qexp(&["escape", "--m", "4", "--family", "limit", "--reflected"]);
    assert!(o.status.success());
}

#[test]
fn table_reproduction() {
    let text = stdout(&qexp(&["table1"]));
    for s in ["[0.602117, 0.670382]", "[0.636592, 0.659920]", "[0.778554, 0.792191]", "J = [0.613089, 0.794085]"] {
        assert!(text.contains(s), "{s}");
    }
    assert_envelope(&json(&["table1"]), "table1");
}

#[test]
fn constants_listing() {
    let text = stdout(&qexp(&["constants"]));
    assert!(text.contains("1.71064409504503293599"));
    let v = json(&["constants"]);
    assert_eq!(v["result"].as_array().unwrap().len(), 4);
}

#[test]
fn verify_small_bounds() {
    let o = qexp(&["verify", "--k-max", "2", "--m-max", "1", "--word-len", "6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("[pass] final/no-null-infinite-point"));
}

#[test]
fn precision_option_and_env() {
    let o = qexp(&["--precision", "5", "value", "1^inf"]);
    assert!(stdout(&o).contains("decimal       1.40717\n"));
    let o = Command::new(env!("CARGO_BIN_EXE_qexp"))
        .args(["value", "1^inf"])
        .env("QEXP_PRECISION", "3")
        .output()
        .unwrap();
    assert!(stdout(&o).contains("decimal       1.407\n"));
}

#[test]
fn other_bases() {
    let o = qexp(&["--base", "qG", "value", "1^inf"]);
    assert!(stdout(&o).contains("1.61803398874989484820"));
    let o = qexp(&["--minpoly=-1,-1,1", "--interval", "3/2,2", "value", "(10)^inf"]);
    assert!(o.status.success());
    let o = qexp(&["--base", "qf", "table1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["value", "012"],
        vec!["--base", "nope", "value", "0^inf"],
        vec!["frobnicate"],
        vec!["escape", "--m", "1"],
        vec!["--minpoly=-1,-1,1", "--interval", "3,4", "value", "0^inf"],
    ] {
        let o = qexp(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn identical_invocations_identical_bytes() {
    let a = qexp(&["--format", "json", "count", "0^2(01)^3(10)^inf"]);
    let b = qexp(&["--format", "json", "count", "0^2(01)^3(10)^inf"]);
    assert_eq!(a.stdout, b.stdout);
}
