use std::process::{Command, Output};

fn eatkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eatkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn result(text: &str, key: &str) -> String {
    let prefix = format!("RESULT {key}=");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no RESULT {key} in {text}"))
        .to_string()
}

fn read_csv(path: &std::path::Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn rate_curve_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rates.csv");
    let out = eatkit(&["rate-curve", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(result(&stdout(&out), "rows"), "20");
    let (header, rows) = read_csv(&path);
    assert_eq!(header, ["n", "gamma", "rate", "alpha_star", "p_b"]);
    assert_eq!(rows.len(), 20);
    assert_eq!(rows[0][0], "100000");
    assert_eq!(rows[19][0], "10000000000");
    let mut last = f64::NEG_INFINITY;
    for row in &rows {
        let n: u64 = row[0].parse().unwrap();
        let rate: f64 = row[2].parse().unwrap();
        assert!(rate < 0.3461, "rate {rate} at n = {n}");
        assert!(rate >= last);
        // The smallest grid values sit below the point where the finite-size
        // penalty is paid off.
        if n >= 200_000 {
            assert!(rate > 0.0, "rate {rate} at n = {n}");
        }
        last = rate;
    }
    let raw = std::fs::read_to_string(&path).unwrap();
    assert!(!raw.contains('\r'));
}

#[test]
fn rate_curve_two_points_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |p: &std::path::Path| {
        vec![
            "rate-curve".to_string(),
            "--points".into(),
            "2".into(),
            "--gamma".into(),
            "1".into(),
            "--gamma".into(),
            "0.1".into(),
            "--out".into(),
            p.to_str().unwrap().to_string(),
        ]
    };
    for p in [&a, &b] {
        let argv: Vec<String> = args(p);
        let refs: Vec<&str> = argv.iter().map(|s| s.as_str()).collect();
        assert!(eatkit(&refs).status.success());
    }
    let (_, rows) = read_csv(&a);
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0][0], "100000");
    assert_eq!(rows[1][0], "10000000000");
    let r1: f64 = rows[1][2].parse().unwrap();
    let r01: f64 = rows[3][2].parse().unwrap();
    assert!(r1 >= r01);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn rate_curve_rejects_bad_flags() {
    for (args, flag) in [
        (vec!["rate-curve", "--gamma", "0"], "--gamma"),
        (vec!["rate-curve", "--e", "0.9"], "--e"),
        (vec!["rate-curve", "--points", "1"], "--points"),
        (vec!["rate-curve", "--n-min", "1e6", "--n-max", "1e5"], "--n-max"),
    ] {
        let out = eatkit(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(stderr(&out).contains(flag), "{}", stderr(&out));
    }
}

#[test]
fn bound_report() {
    let out = eatkit(&[
        "bound",
        "--n",
        "1e8",
        "--h",
        "0.3",
        "--max-f",
        "0.35",
        "--min-sigma-f",
        "-2",
        "--var-f",
        "5",
        "--d-a",
        "4",
        "--classical-a",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let term: f64 = result(&text, "dimension_term").parse().unwrap();
    assert!((term - 33f64.log2()).abs() < 1e-11);
    assert!(text.contains("log2(33)"));
    let closed: f64 = result(&text, "closed_form_bound").parse().unwrap();
    let opt: f64 = result(&text, "optimized_bound").parse().unwrap();
    assert!(opt >= closed);
    assert_eq!(result(&text, "small_n"), "false");
}

#[test]
fn bound_fixed_alpha_and_small_n() {
    let out = eatkit(&[
        "bound",
        "--n",
        "3",
        "--h",
        "0.5",
        "--max-f",
        "1",
        "--min-sigma-f",
        "0",
        "--d-a",
        "2",
        "--alpha",
        "1.5",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(result(&text, "small_n"), "true");
    assert_eq!(result(&text, "alpha"), "1.500000000000e0");
    assert!(!text.contains("alpha_star"));

    let bad = eatkit(&[
        "bound",
        "--n",
        "3",
        "--h",
        "0.5",
        "--max-f",
        "1",
        "--min-sigma-f",
        "0",
        "--d-a",
        "2",
        "--alpha",
        "2.5",
    ]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("--alpha"));
}

#[test]
fn variance_curve() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.csv");
    let out = eatkit(&["variance-curve", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let q_max: f64 = result(&stdout(&out), "q_max").parse().unwrap();
    let v_max: f64 = result(&stdout(&out), "v_max").parse().unwrap();
    assert!((q_max - 0.083).abs() <= 0.002);
    assert!((v_max - 0.9142).abs() <= 1e-3);

    let (header, rows) = read_csv(&path);
    assert_eq!(header, ["q", "v"]);
    let v: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    for (a, b) in v.iter().zip(v.iter().rev()) {
        assert!((a - b).abs() < 1e-9);
    }
    let half = rows.iter().find(|r| r[0] == "5.000000000000e-1").unwrap();
    assert_eq!(half[1].parse::<f64>().unwrap(), 0.0);

    let bad = eatkit(&["variance-curve", "--steps", "1"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("--steps"));
}

#[test]
fn verify_filter_and_exit_codes() {
    let out = eatkit(&["verify", "--suite", "additivity", "--trials", "20"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert_eq!(result(&text, "suite"), "additivity passed=20 failed=0");
    assert_eq!(text.matches("RESULT suite=").count(), 1);
    assert_eq!(
        out.stdout,
        eatkit(&["verify", "--suite", "additivity", "--trials", "20"]).stdout
    );

    let bad = eatkit(&["verify", "--suite", "nonexistent"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("--suite"));
    let bad = eatkit(&["verify", "--trials", "x"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn verify_default_run_passes() {
    let out = eatkit(&["verify", "--trials", "10"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(!stdout(&out).contains("FAILED"));
}
