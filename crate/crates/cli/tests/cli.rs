use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn g2hyp(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_g2hyp"))
        .args(args)
        .current_dir(cwd)
        .env_remove("G2HYP_CACHE_DIR")
        .env_remove("G2HYP_LEDGER")
        .output()
        .expect("binary runs")
}

fn ok_json(args: &[&str], cwd: &Path) -> Value {
    let out = g2hyp(args, cwd);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn err_json(out: &Output) -> Value {
    let line = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(line.trim()).expect("stderr is JSON")
}

fn csv_body(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn group_moment_prints_fixed_precision() {
    let dir = tempfile::tempdir().unwrap();
    let out = g2hyp(&["group-moment", "--group", "g2", "--order", "4"], dir.path());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "4.000000\n");
    let out = g2hyp(&["group-moment", "--group", "sl2", "--order", "4"], dir.path());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "7.000000\n");
}

#[test]
fn naive_and_mellin_agree() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["hyp", "--p", "5", "--n", "1", "--a", "0", "--chi", "1", "--no-ledger"];
    let naive = ok_json(&[&base[..], &["--method", "naive"]].concat(), dir.path());
    let mellin = ok_json(&[&base[..], &["--method", "mellin"]].concat(), dir.path());
    for part in ["re", "im"] {
        let x = naive["raw"][part].as_f64().unwrap();
        let y = mellin["raw"][part].as_f64().unwrap();
        assert!((x - y).abs() < 1e-7 * 5f64.powf(3.5));
    }
    assert_eq!(naive["cross_check"]["agree"], Value::Bool(true));
    assert_eq!(mellin["cross_check"]["method"], "conv");
}

#[test]
fn exit_codes_and_error_json() {
    let dir = tempfile::tempdir().unwrap();
    let usage = g2hyp(&["moment", "--p"], dir.path());
    assert_eq!(usage.status.code(), Some(2));
    assert_eq!(err_json(&usage)["error"], "Usage");

    let workers = g2hyp(&["--workers", "0", "field-info", "--p", "5"], dir.path());
    assert_eq!(workers.status.code(), Some(2));

    let tol = g2hyp(&["--classify-tol", "-1", "field-info", "--p", "5"], dir.path());
    assert_eq!(tol.status.code(), Some(2));

    let domain = g2hyp(&["field-info", "--p", "9"], dir.path());
    assert_eq!(domain.status.code(), Some(3));
    assert_eq!(err_json(&domain)["error"], "NonPrime");

    let even = g2hyp(&["field-info", "--p", "2"], dir.path());
    assert_eq!(even.status.code(), Some(3));

    let limit = g2hyp(&["--table-limit", "100", "field-info", "--p", "3", "--n", "5"], dir.path());
    assert_eq!(limit.status.code(), Some(4));
    assert_eq!(err_json(&limit)["error"], "FieldTooLarge");

    let f9 = g2hyp(&["f-direct", "--n", "2", "--a", "0", "--no-ledger"], dir.path());
    assert_eq!(f9.status.code(), Some(4));

    let naive = g2hyp(&["hyp", "--p", "19", "--a", "0", "--chi", "1", "--method", "naive"], dir.path());
    assert_eq!(naive.status.code(), Some(4));
    assert_eq!(err_json(&naive)["error"], "FieldTooLargeForNaive");

    let order = g2hyp(&["group-moment", "--group", "g2", "--order", "14"], dir.path());
    assert_eq!(order.status.code(), Some(4));
}

#[test]
fn equal_headers_give_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let run = |name: &str, extra: &[&str]| {
        let path = dir.path().join(name);
        let mut args = vec!["hyp-matrix", "--p", "5", "--n", "2", "--out", path.to_str().unwrap()];
        args.extend_from_slice(extra);
        let out = g2hyp(&args, dir.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read_to_string(path).unwrap()
    };
    let plain = run("a.csv", &[]);
    let again = run("b.csv", &[]);
    assert_eq!(plain, again);
    let cold = run("c.csv", &["--cache-dir", cache.to_str().unwrap()]);
    let warm = run("d.csv", &["--cache-dir", cache.to_str().unwrap()]);
    assert!(cache.join("field-p5-n2.bin").exists());
    assert_eq!(cold, plain);
    assert_eq!(warm, plain);

    let header: Value = serde_json::from_str(plain.lines().next().unwrap().trim_start_matches("# ")).unwrap();
    for key in ["p", "n", "modulus", "generator", "psi_scale", "tool_version", "config_hash"] {
        assert!(header.get(key).is_some(), "header lacks {key}");
    }
    let body = csv_body(&plain);
    assert_eq!(body[0], "a_exp,chi_index,re,im");
    assert_eq!(body.len(), 1 + 24 * 24);
}

#[test]
fn moment_runs_append_to_ledger() {
    let dir = tempfile::tempdir().unwrap();
    let ledger = dir.path().join("runs.jsonl");
    let args = ["--ledger", ledger.to_str().unwrap(), "moment", "--p", "7", "--a", "1", "--order", "4"];
    let first = ok_json(&args, dir.path());
    ok_json(&args, dir.path());
    for key in ["p", "n", "a_exp", "order", "value_excl", "value_all", "lambda2_term", "seconds"] {
        assert!(first.get(key).is_some(), "report lacks {key}");
    }
    let lines: Vec<Value> = std::fs::read_to_string(&ledger)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["report"]["value_excl"], first["value_excl"]);

    ok_json(&["--no-ledger", "moment", "--p", "7", "--a", "1"], dir.path());
    assert!(!dir.path().join("g2hyp-ledger.jsonl").exists());
    ok_json(&["moment", "--p", "7", "--a", "1"], dir.path());
    assert!(dir.path().join("g2hyp-ledger.jsonl").exists());
}

#[test]
fn moment_seq_and_identity() {
    let dir = tempfile::tempdir().unwrap();
    let seq = ok_json(&["--no-ledger", "moment-seq", "--p", "5", "--a", "0", "--order", "2", "--n-max", "2"], dir.path());
    assert_eq!(seq["reports"].as_array().unwrap().len(), 2);
    assert!(seq["limit"]["verdict"].is_string());

    let id = ok_json(&["--no-ledger", "identity-check", "--p", "5", "--a", "2"], dir.path());
    assert!(id["relative_residual"].as_f64().unwrap() < 1e-6);

    let short = g2hyp(&["--no-ledger", "moment-seq", "--p", "5", "--a", "0", "--n-max", "1"], dir.path());
    assert_eq!(short.status.code(), Some(3));
}

#[test]
fn classify_reports_the_verdict_of_its_m4() {
    let dir = tempfile::tempdir().unwrap();
    let v = ok_json(&["--no-ledger", "classify", "--p", "17", "--n", "2", "--a", "1"], dir.path());
    let m4 = v["m4"].as_f64().unwrap();
    let want = if (m4 - 4.0).abs() <= 0.5 {
        "G2"
    } else if (m4 - 7.0).abs() <= 0.5 {
        "SL2"
    } else {
        "Inconclusive"
    };
    assert_eq!(v["group"], want);
}

#[test]
fn satotate_csv_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let out = g2hyp(&["satotate", "--group", "g2", "--bins", "14"], dir.path());
    let text = String::from_utf8(out.stdout).unwrap();
    let body = csv_body(&text);
    assert_eq!(body[0], "bin_center,mass");
    assert_eq!(body.len(), 15);
    let total: f64 = body[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-8);

    let path = dir.path().join("st.csv");
    let v = ok_json(
        &["satotate", "--p", "17", "--n", "2", "--a", "0", "--bins", "10", "--out", path.to_str().unwrap()],
        dir.path(),
    );
    let d = v["distance"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&d));
    let text = std::fs::read_to_string(path).unwrap();
    let body = csv_body(&text);
    assert_eq!(body[0], "bin_center,empirical_mass,model_mass");
    assert_eq!(body.len(), 11);
}

#[test]
fn scan_and_gauss_exports() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.json");
    let out = g2hyp(&["scan", "--p-list", "3,13", "--n-max", "1", "--out", path.to_str().unwrap()], dir.path());
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.iter().filter(|r| r["p"] == 13).count(), 6);
    assert!(rows.iter().all(|r| r["exploratory"] == Value::Bool(true)));

    let out = g2hyp(&["gauss", "--p", "7", "--n", "2", "--lambda", "3"], dir.path());
    let text = String::from_utf8(out.stdout).unwrap();
    let body = csv_body(&text);
    assert_eq!(body[0], "index,re,im,abs");
    assert_eq!(body.len(), 49);
    for line in &body[2..] {
        let abs: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!((abs - 7.0).abs() < 1e-9 * 7.0);
    }
}
