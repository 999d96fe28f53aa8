use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn vvmf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vvmf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(args: &[&str]) -> Value {
    let mut a = vec!["--format", "json"];
    a.extend_from_slice(args);
    let o = vvmf(&a);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn write_json(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name);
    let p = path.to_str().unwrap().to_string();
    let mut a = vec!["--format", "json", "--out", &p];
    a.extend_from_slice(args);
    assert!(vvmf(&a).status.success());
    p
}

#[test]
fn eisenstein_text_and_json() {
    let o = vvmf(&["eis", "--weight", "4", "--prec", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("1 + 240*q + 2160*q^2 + O(q^3)"));
    let v = json(&["eis", "--weight", "12", "--prec", "2"]);
    assert_eq!(v["weight"], 12);
    assert_eq!(v["prec"], "2");
}

#[test]
fn cosets_listing_and_counts() {
    let o = vvmf(&["hecke", "cosets", "--index", "3"]);
    assert_eq!(stdout(&o), "(3,0;0,1)\n(1,0;0,3)\n(1,1;0,3)\n(1,2;0,3)\n");
    let o = vvmf(&[
        "hecke",
        "cosets",
        "--genus",
        "2",
        "--index",
        "2",
        "--count-only",
    ]);
    assert_eq!(stdout(&o).trim(), "15");
}

#[test]
fn homspace_and_decompose() {
    let v = json(&["homspace", "--from", "rho3*rho3", "--to", "rho3"]);
    assert_eq!(v["dim"], 2);
    let v = json(&["decompose", "--type", "rho3*rho3"]);
    let m: Vec<(String, u64)> = serde_json::from_value(v["multiplicities"].clone()).unwrap();
    assert_eq!(
        m,
        vec![
            ("1".to_string(), 1),
            ("rho3".to_string(), 2),
            ("rho_zeta".to_string(), 1),
            ("rho_zeta2".to_string(), 1)
        ]
    );
}

#[test]
fn vveis_dimension() {
    let v = json(&[
        "vveis", "--weight", "12", "--type", "rho3", "--index", "3", "--prec", "3",
    ]);
    assert_eq!(v["grades"].as_array().unwrap().len(), 1);
    assert_eq!(v["grades"][0]["dim"], 1);
}

#[test]
fn file_based_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let e4 = write_json(d, "e4.json", &["eis", "--weight", "4", "--prec", "5"]);
    let e8 = write_json(d, "e8.json", &["eis", "--weight", "8", "--prec", "5"]);

    let t2 = json(&["hecke", "apply", "--index", "2", "--form", &e4]);
    assert_eq!(t2["components"].as_array().unwrap().len(), 3);

    let r = write_json(d, "r.json", &["ahol", "raise", "--form", &e4]);
    let v = json(&["ahol", "decompose", "--form", &r]);
    assert_eq!(v["parts"].as_array().unwrap().len(), 2);
    let low = json(&["ahol", "lower", "--form", &r]);
    assert_eq!(low["weight"], 4);

    let span = write_json(
        d,
        "span.json",
        &["hyperprod", "--left", &e4, "--right", &e8],
    );
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&span).unwrap()).unwrap();
    assert_eq!(v["grades"][0]["weight"], 12);
    assert_eq!(v["grades"][0]["dim"], 1);

    let c = json(&[
        "ahol",
        "closure",
        "--span",
        &span,
        "--window",
        "10:14",
        "--max-rounds",
        "2",
    ]);
    assert!(c["rounds"].as_u64().unwrap() >= 1);
}

#[test]
fn verify_exit_codes() {
    let o = vvmf(&["verify", "example32"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# generated "));
    assert!(text.contains("564856947200/1594323"));

    let o = vvmf(&["verify", "thm11", "--indices", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = vvmf(&["verify", "thm11", "--indices", "1,2"]);
    assert_eq!(o.status.code(), Some(0));
    let o = vvmf(&["verify", "thm11", "--prec", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = vvmf(&["eis", "--weight", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = vvmf(&["no-such-command"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    let a = stdout(&vvmf(&["verify", "counts"]));
    let b = stdout(&vvmf(&["verify", "counts"]));
    let body = |s: &str| s.lines().skip(1).collect::<Vec<_>>().join("\n");
    assert_eq!(body(&a), body(&b));
    let j1 = stdout(&vvmf(&["--format", "json", "verify", "counts"]));
    let j2 = stdout(&vvmf(&["--format", "json", "verify", "counts"]));
    assert_eq!(j1, j2);
}
