//! End-to-end runs of the compiled binary: exit codes, output determinism,
//! and the documented file interfaces.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_flatquot"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("flatquot-cli-{}-{name}", std::process::id()));
    p
}

#[test]
fn family_bs_writes_deterministic_reports() {
    let csv1 = tmp("bs1.csv");
    let json1 = tmp("bs1.json");
    let csv2 = tmp("bs2.csv");
    let json2 = tmp("bs2.json");
    let base = [
        "family", "--kind", "bs", "--k", "2", "--n", "2..9", "--alpha", "1/2", "--eps", "1",
    ];
    let out1 = run(&[&base[..], &["--out", csv1.to_str().unwrap(), "--json", json1.to_str().unwrap()]].concat());
    assert!(out1.status.success(), "stderr: {}", String::from_utf8_lossy(&out1.stderr));
    let out2 = run(&[&base[..], &["--out", csv2.to_str().unwrap(), "--json", json2.to_str().unwrap()]].concat());
    assert!(out2.status.success());
    assert_eq!(out1.stdout, out2.stdout, "stdout must be reproducible");
    let (a, b) = (std::fs::read(&csv1).unwrap(), std::fs::read(&csv2).unwrap());
    assert_eq!(a, b, "CSV must be byte-identical across runs");
    let (a, b) = (std::fs::read(&json1).unwrap(), std::fs::read(&json2).unwrap());
    assert_eq!(a, b, "JSON must be byte-identical across runs");
    let text = String::from_utf8_lossy(&out1.stdout);
    assert!(text.contains("VIOLATED"));
    let csv = std::fs::read_to_string(&csv1).unwrap();
    assert!(csv.starts_with("family,parameter,index,diam_exact,diam_bound,mode,alpha_ratio\n"));
    assert_eq!(csv.lines().count(), 9); // header + 8 records

    // Report round trip over the written CSV.
    let rep = run(&["report", "--in", csv1.to_str().unwrap(), "--alpha", "1/2", "--eps", "1"]);
    assert!(rep.status.success());
    assert!(String::from_utf8_lossy(&rep.stdout).contains("VIOLATED"));

    for p in [csv1, json1, csv2, json2] {
        let _ = std::fs::remove_file(p);
    }
}

#[test]
fn family_spec_file_matches_flags() {
    let spec = tmp("spec.json");
    std::fs::write(&spec, r#"{"family":"wreath","p":2,"n_min":2,"n_max":6}"#).unwrap();
    let a = run(&["family", "--spec", spec.to_str().unwrap()]);
    let b = run(&["family", "--kind", "wreath", "--p", "2", "--n", "2..6"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let _ = std::fs::remove_file(spec);
}

#[test]
fn bpq_validity_gate_exits_2() {
    let out = run(&["family", "--kind", "bpq", "--p", "2", "--q", "3", "--m", "5"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("validity check failed"), "stderr: {err}");
}

#[test]
fn primes_zero_constant_term_exits_2() {
    let out = run(&["primes", "--poly", "x^2", "--count", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("zero constant term"));

    let ok = run(&["primes", "--poly", "x^2+2/3", "--count", "1"]);
    assert!(ok.status.success());
    let text = String::from_utf8_lossy(&ok.stdout);
    assert!(text.contains("p=5") && text.contains("[1, 4]") && text.contains("lambda=2"));
}

#[test]
fn decide_reports_the_three_verdict_flavours() {
    let dir = tmp("decide");
    std::fs::create_dir_all(&dir).unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.join(name);
        std::fs::write(&p, body).unwrap();
        p
    };
    let doubling = write("m2.json", r#"{"n":1,"matrices":[[["2"]]]}"#);
    let out = run(&["decide", "--file", doubling.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("virtually nilpotent: false"));

    let rotation = write("rot.json", r#"{"n":2,"matrices":[[["0","-1"],["1","0"]]]}"#);
    let out = run(&["decide", "--file", rotation.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("virtually nilpotent: true"));

    let unipotent = write("uni.json", r#"{"n":2,"matrices":[[["1","1"],["0","1"]]]}"#);
    let out = run(&["decide", "--file", unipotent.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("nilpotent, class <= 2"));

    let broken = write("bad.json", r#"{"n":2,"matrices":[[["0","x"],["1","0"]]]}"#);
    let out = run(&["decide", "--file", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn diam_on_ad_hoc_group_file() {
    let path = tmp("group.json");
    std::fs::write(
        &path,
        r#"{"a_moduli":[7],"b_moduli":[3],"action":[[[2]]],
           "generators":[{"a":[1],"b":[0]},{"a":[0],"b":[1]}]}"#,
    )
    .unwrap();
    let out = run(&["diam", "--file", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("order 21") && text.contains("diameter 3"), "got: {text}");
    let _ = std::fs::remove_file(path);
}

#[test]
fn verify_all_passes() {
    let out = run(&["verify", "all"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(!text.contains("FAIL"), "battery output: {text}");
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 14);

    let unknown = bin().args(["verify", "nonsense"]).output().unwrap();
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn missing_input_file_exits_1() {
    let out = run(&["decide", "--file", "/nonexistent/family.json"]);
    assert_eq!(out.status.code(), Some(1));
}
