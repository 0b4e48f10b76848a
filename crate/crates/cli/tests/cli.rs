use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cycles(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cycles"))
        .args(args)
        .current_dir(dir)
        .env_remove("CYCLES_MAX_CAP")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn report(dir: &Path, args: &[&str]) -> (i32, Value, String) {
    let path = dir.join("report.json");
    let mut full: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap();
    full.extend(["--report", p]);
    let o = cycles(dir, &full);
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    (code(&o), r, stdout(&o))
}

#[test]
fn identities_table() {
    let dir = tempfile::tempdir().unwrap();
    let (c, r, out) = report(dir.path(), &["identities", "--kmax", "12"]);
    assert_eq!(c, 0);
    assert_eq!(r["verdict"], "pass");
    assert_eq!(r["report_version"], 1);
    assert_eq!(r["exact_arithmetic"], true);
    assert!(out.contains("5\t3\t0/1\t0/1\n"));
    assert!(out.contains("12\t12\t479001600/1\t479001600/1\n"));
}

#[test]
fn thresholds_row_for_k2() {
    let dir = tempfile::tempdir().unwrap();
    let o = cycles(dir.path(), &["thresholds", "--k", "2", "--format", "tsv"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("g_gonality\t3\n"));
    assert!(out.contains("g_orbit_all\t12\n"));
    assert!(out.contains("(conjecture)"));

    let (c, r, _) = report(dir.path(), &["thresholds", "--g", "11", "--format", "json"]);
    assert_eq!(c, 0);
    assert_eq!(r["witness"]["gonality_at_least"], 4);
}

#[test]
fn verify_relation_writes_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let (c, r, _) = report(dir.path(), &["verify-relation", "--k", "2", "--g", "3"]);
    assert_eq!(c, 0);
    let cert_path = dir.path().join(r["certificate_path"].as_str().unwrap());
    let cert = cycles_core::relation::MembershipCertificate::from_json(&std::fs::read_to_string(cert_path).unwrap()).unwrap();
    cert.verify().unwrap();
    assert!(cert.nilpotent_part.is_empty());
}

#[test]
fn verify_relation_inconclusive_within_small_caps() {
    let dir = tempfile::tempdir().unwrap();
    let (c, r, _) = report(dir.path(), &["verify-relation", "--k", "3", "--g", "4", "--jmax", "1", "--cap", "3"]);
    assert_eq!(c, 2);
    assert_eq!(r["verdict"], "inconclusive");
    assert_eq!(r["witness"]["caps_tried"], serde_json::json!([3, 6]));
}

#[test]
fn cap_env_var_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_cycles"))
        .args(["verify-relation", "--k", "3", "--g", "4", "--jmax", "1"])
        .current_dir(dir.path())
        .env("CYCLES_MAX_CAP", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("[2, 4]"));
}

#[test]
fn algebra_subcommands_pass() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["alpha", "--k", "6"],
        vec!["recursion-check", "--k", "4"],
        vec!["gamma-check", "--g", "3", "--x", "2,-1"],
    ] {
        let (c, r, _) = report(dir.path(), &args);
        assert_eq!(c, 0, "{args:?}");
        assert_eq!(r["verdict"], "pass");
    }
}

#[test]
fn subspace_file_checks() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_owned()
    };
    let good = write("good.txt", "# two lines in Q^3\n3 2\n1\n1 -1 0\n1\n1 1 -2\n");
    let bad = write("bad.txt", "3 1\n1\n1 0 0\n");
    let star_bad = write("star.txt", "2 2\n1\n1 0 0 0\n");
    let star_good = write("star_ok.txt", "3 1\n2\n1 -1 0\n0 1 -1\n");

    let (c, _, out) = report(dir.path(), &["check-doublestar", "--file", &good]);
    assert_eq!(c, 0, "{out}");
    let (c, r, _) = report(dir.path(), &["check-doublestar", "--file", &bad]);
    assert_eq!(c, 4);
    assert_eq!(r["witness"]["value"], "1/1");
    let (c, r, _) = report(dir.path(), &["check-star", "--file", &star_bad]);
    assert_eq!(c, 4);
    assert_eq!(r["witness"]["degree"], 1);
    let (c, _, _) = report(dir.path(), &["check-star", "--file", &star_good]);
    assert_eq!(c, 0);

    let (c, r, _) = report(dir.path(), &["pair-lemma", "--file", &good]);
    assert_eq!(c, 0);
    assert_eq!((r["witness"]["lhs"].as_u64(), r["witness"]["rhs"].as_u64()), (Some(2), Some(2)));
    let (c, r, _) = report(dir.path(), &["mu-rank", "--file", &good, "--seed", "3"]);
    assert_eq!(c, 0);
    assert_eq!(r["witness"]["rank"], 2);

    let o = cycles(dir.path(), &["pair-lemma", "--file", &bad]);
    assert_eq!(code(&o), 1);
}

#[test]
fn search_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["search", "--k", "3", "--n", "2", "--budget", "500", "--seed", "4"];
    let (c, a, out_a) = report(dir.path(), &args);
    assert_eq!(c, 0);
    let (_, b, out_b) = report(dir.path(), &args);
    assert_eq!(out_a, out_b);
    let strip = |mut v: Value| {
        v["wall_time_ms"] = Value::Null;
        v
    };
    assert_eq!(strip(a.clone()), strip(b));
    assert_eq!(a["witness"]["best_sum"], 2);

    let mut par = args.to_vec();
    par.extend(["--workers", "3"]);
    let (_, p, _) = report(dir.path(), &par);
    assert_eq!(p["witness"]["best_sum"], a["witness"]["best_sum"]);
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&cycles(dir.path(), &["frobnicate"])), 1);
    assert_eq!(code(&cycles(dir.path(), &["thresholds"])), 1);
    assert_eq!(code(&cycles(dir.path(), &["thresholds", "--k", "1"])), 1);
    assert_eq!(code(&cycles(dir.path(), &["check-star", "--file", "missing.txt"])), 1);
    assert_eq!(code(&cycles(dir.path(), &["--help"])), 0);
}
