use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn geopath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geopath"))
        .args(args)
        .output()
        .expect("spawn geopath")
}

fn tmp(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    p.push(name);
    p.to_str().unwrap().to_string()
}

const DOMAIN: &str = "\
outer 4
0 0
10 0
10 10
0 10
hole 4
4 4
4 6
6 6
6 4
";

fn write_domain() -> String {
    let path = tmp("dom.poly");
    fs::write(&path, DOMAIN).unwrap();
    path
}

#[test]
fn build_dist_roundtrip() {
    let dom = write_domain();
    let idx = tmp("dist.idx.json");
    let out = geopath(&["build", "--domain", &dom, "--eps", "0.5", "--out", &idx]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let svg = tmp("path.svg");
    let out = geopath(&[
        "dist", "--index", &idx, "--from", "2,5", "--to", "8,5", "--exact", "--svg", &svg,
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let est: f64 = lines.next().unwrap().strip_prefix("distance ").unwrap().parse().unwrap();
    let exact: f64 = lines.next().unwrap().strip_prefix("exact ").unwrap().parse().unwrap();
    assert!(exact <= est + 1e-9 && est <= 1.5 * exact + 1e-9);
    assert!(fs::read_to_string(svg).unwrap().starts_with("<svg"));
}

#[test]
fn nn_script_replay() {
    let dom = write_domain();
    let idx = tmp("nn.idx.json");
    assert!(geopath(&["nn", "build", "--domain", &dom, "--eps", "0.5", "--out", &idx])
        .status
        .success());
    assert!(geopath(&["nn", "insert", "--index", &idx, "--site", "2,2", "--id", "1"])
        .status
        .success());

    let ops = tmp("ops.txt");
    fs::write(&ops, "I 2 8 8\nQ 7.5 8\nD 2\nQ 7.5 8\n").unwrap();
    let out = geopath(&["nn", "script", "--index", &idx, &ops]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let answers: Vec<&str> = text.lines().collect();
    assert_eq!(answers.len(), 2);
    assert!(answers[0].starts_with("site 2 "));
    assert!(answers[1].starts_with("site 1 "));
}

#[test]
fn nn_index_file_persists_sites() {
    let dom = write_domain();
    let idx = tmp("persist.idx.json");
    geopath(&["nn", "build", "--domain", &dom, "--eps", "0.5", "--out", &idx]);
    geopath(&["nn", "insert", "--index", &idx, "--site", "3,3", "--id", "7"]);
    let out = geopath(&["nn", "query", "--index", &idx, "--at", "3,3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("site 7 estimate 0"), "{text}");
    geopath(&["nn", "delete", "--index", &idx, "--id", "7"]);
    let out = geopath(&["nn", "query", "--index", &idx, "--at", "3,3"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "empty");
}

#[test]
fn verify_deterministic_report_and_exit_codes() {
    let args = [
        "verify", "--seed", "11", "--domains", "2", "--budget", "16", "--holes", "1",
        "--queries", "5", "--eps", "0.5", "--mode", "distance",
    ];
    let a = geopath(&args);
    let b = geopath(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "report must be byte-identical per seed");

    let bad = geopath(&["verify", "--eps", "0"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn bad_domain_is_config_error() {
    let path = tmp("bad.poly");
    // CW outer ring: parser must reject with a descriptive error.
    fs::write(&path, "outer 3\n0 0\n0 4\n4 0\n").unwrap();
    let out = geopath(&["build", "--domain", &path, "--eps", "0.5", "--out", tmp("x.json").as_str()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}
