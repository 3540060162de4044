use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn opflab(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opflab"))
        .args(args)
        .env("OPFLAB_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn text(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn dim_prints_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = opflab(&["dim", "--j", "2", "--d", "3"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(text(&out), "27\n");
}

#[test]
fn quantum_certificate_reports_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = opflab(
        &["certify-lt", "--j", "1", "--da", "3", "--db", "3"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let body = text(&out);
    assert!(body.contains("multiplicity: 0"), "{body}");
    assert!(body.contains("locally tomographic (quantum)"), "{body}");
}

#[test]
fn certificate_json_shape() {
    let dir = tempfile::tempdir().unwrap();
    let direct = json(&opflab(
        &[
            "--format",
            "json",
            "certify-lt",
            "--j",
            "2",
            "--da",
            "3",
            "--db",
            "3",
        ],
        dir.path(),
    ));
    assert_eq!(direct["method"], "direct");
    assert_eq!(direct["multiplicity"], "1");
    assert_eq!(direct["holistic"], true);
    for key in ["j", "d_a", "d_b"] {
        assert!(direct[key].is_u64(), "{key}");
    }

    let out = opflab(
        &[
            "--format",
            "json",
            "certify-lt",
            "--j",
            "5",
            "--da",
            "3",
            "--db",
            "3",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let inductive = json(&out);
    assert_eq!(inductive["method"], "inductive");
    assert!(inductive["multiplicity"].is_null());
    assert_eq!(inductive["chain"], serde_json::json!([3, 5]));
}

#[test]
fn toy_verify_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = opflab(
        &[
            "toy", "verify", "--da", "2", "--db", "2", "--trials", "100", "--seed", "7",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["all_pass"], true);
    assert_eq!(report["results"].as_array().unwrap().len(), 7);
}

#[test]
fn artifacts_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["toy", "verify", "--trials", "20", "--seed", "11"][..],
        &["toy", "figure", "--samples", "200", "--seed", "3"][..],
        &["--format", "json", "toy", "figure", "--samples", "50"][..],
        &["toy", "reduce", "--da", "2", "--db", "3", "--seed", "5"][..],
        &[
            "--format", "json", "branch", "--lambda", "2,1", "--m", "2", "--n", "3",
        ][..],
    ] {
        let first = opflab(args, dir.path());
        let second = opflab(args, dir.path());
        assert!(first.status.success(), "{args:?}");
        assert_eq!(first.stdout, second.stdout, "{args:?}");
    }
}

#[test]
fn figure_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = opflab(&["toy", "figure", "--samples", "5"], dir.path());
    let body = text(&out);
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("kind,x,y"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 15);
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert!(["pure", "mixed", "reduced"].contains(&fields[0]));
        assert!(fields[1].parse::<f64>().is_ok() && fields[2].parse::<f64>().is_ok());
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.json");
    let out = opflab(
        &[
            "--format",
            "json",
            "--out",
            path.to_str().unwrap(),
            "k-values",
            "--d",
            "2",
            "--limit",
            "3",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(written["values"], serde_json::json!([3]));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        opflab(&["toy", "mub", "--d", "4"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        opflab(&["toy", "mub", "--d", "5"], dir.path())
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        opflab(&["no-such-command"], dir.path()).status.code(),
        Some(2)
    );
    assert_eq!(
        opflab(
            &["kron", "--lambda", "2", "--mu", "1", "--nu", "2"],
            dir.path()
        )
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        opflab(&["dim", "--j", "1"], dir.path()).status.code(),
        Some(2)
    );
    assert_eq!(
        opflab(&["cache", "warm", "--n", "10"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        opflab(&["toy", "witness"], dir.path()).status.code(),
        Some(0)
    );
    let control = opflab(
        &["toy", "verify", "--trials", "10", "--negative-control"],
        dir.path(),
    );
    assert_eq!(control.status.code(), Some(0));
    assert_eq!(json(&control)["all_pass"], false);
    let missing = dir.path().join("missing").join("out.txt");
    let out = opflab(
        &[
            "--out",
            missing.to_str().unwrap(),
            "dim",
            "--j",
            "1",
            "--d",
            "2",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cache_lifecycle() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let stat = |c: &Path| text(&opflab(&["cache", "stat"], c));
    assert_eq!(stat(&cache), "total 0\n");

    let warm = opflab(&["cache", "warm", "--n", "18"], &cache);
    assert!(warm.status.success());
    let report = stat(&cache);
    assert!(report.starts_with("n=18 entries="), "{report}");
    assert_ne!(report.trim_end(), "total 0");

    let cold_dir = dir.path().join("cold");
    let args = [
        "--format",
        "json",
        "certify-lt",
        "--j",
        "2",
        "--da",
        "3",
        "--db",
        "3",
    ];
    assert_eq!(
        json(&opflab(&args, &cache)),
        json(&opflab(&args, &cold_dir))
    );
    assert!(
        !cold_dir.exists(),
        "computing commands must not write the cache"
    );

    assert!(opflab(&["cache", "clear"], &cache).status.success());
    assert_eq!(stat(&cache), "total 0\n");
}

#[test]
fn branch_text_lists_terms() {
    let dir = tempfile::tempdir().unwrap();
    let out = opflab(
        &["branch", "--lambda", "2", "--m", "2", "--n", "2"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        text(&out),
        "(2) ⊠ (2) : 1\n(1^2) ⊠ (1^2) : 1\ndimension check: 10 = 10 (ok)\n"
    );
}
