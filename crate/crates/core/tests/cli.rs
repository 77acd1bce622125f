use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

fn smoothsel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smoothsel"))
        .args(args)
        .env_remove("SMOOTHSEL_THREADS")
        .output()
        .expect("binary runs")
}

fn write_csv(dir: &Path, name: &str, header: &str, rows: impl Iterator<Item = (f64, f64)>) -> PathBuf {
    let path = dir.join(name);
    let mut text = format!("{header}\n");
    for (a, b) in rows {
        text.push_str(&format!("{a},{b}\n"));
    }
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn fit_constant_response_selects_zero() {
    let dir = TempDir::new().unwrap();
    let data = write_csv(dir.path(), "c.csv", "x,y", (0..50).map(|i| (i as f64 / 49.0, 3.5)));
    let out = dir.path().join("fit.json");
    let curve = dir.path().join("curve.csv");
    let post = dir.path().join("post.csv");
    let o = smoothsel(&[
        "fit",
        "-i",
        s(&data),
        "-o",
        s(&out),
        "--curve",
        s(&curve),
        "--posterior",
        s(&post),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["selected_order"], 0);
    let curve = fs::read_to_string(&curve).unwrap();
    assert!(curve.starts_with("x,fitted\n"));
    assert_eq!(curve.lines().count(), 202);
    for line in curve.lines().skip(1) {
        let fitted: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((fitted - 3.5).abs() < 1e-9);
    }
    let post = fs::read_to_string(&post).unwrap();
    assert!(post.starts_with("order,posterior,inclusion,shrinkage"));
}

#[test]
fn fit_uses_named_columns() {
    let dir = TempDir::new().unwrap();
    let data = write_csv(
        dir.path(),
        "d.csv",
        "age,height",
        (0..80).map(|i| {
            let u = i as f64 / 79.0;
            (10.0 * u, (3.0 * u).sin() + 0.05 * ((37 * i) % 11) as f64 / 11.0)
        }),
    );
    let o = smoothsel(&["fit", "-i", s(&data), "--x", "age", "--y", "height", "--rule", "loss"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["rule"], "loss");
    assert!(doc["selected_order"].as_u64().unwrap() >= 1);
}

#[test]
fn fit_missing_column_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let data = write_csv(dir.path(), "d.csv", "x,y", (0..20).map(|i| (i as f64, i as f64)));
    let o = smoothsel(&["fit", "-i", s(&data), "--y", "weight"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("weight"));
}

#[test]
fn fit_bad_cell_names_row_and_column() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "x,y\n0.1,1\n0.2,\n").unwrap();
    let o = smoothsel(&["fit", "-i", s(&path)]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(msg.contains("row 3") && msg.contains("'y'"), "{msg}");
}

#[test]
fn fit_noiseless_line_is_numeric_failure() {
    let dir = TempDir::new().unwrap();
    let data = write_csv(
        dir.path(),
        "l.csv",
        "x,y",
        (0..40).map(|i| (i as f64, 2.0 * i as f64 + 1.0)),
    );
    let o = smoothsel(&["fit", "-i", s(&data)]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn fit_rejects_unknown_flags_and_bad_priors() {
    let dir = TempDir::new().unwrap();
    let data = write_csv(dir.path(), "d.csv", "x,y", (0..20).map(|i| (i as f64, i as f64)));
    assert_eq!(smoothsel(&["fit", "-i", s(&data), "--bogus"]).status.code(), Some(2));
    assert_eq!(
        smoothsel(&["fit", "-i", s(&data), "--prior-a", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        smoothsel(&["fit", "-i", s(&data), "--omega-prior", "intrinsic", "--nu", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        smoothsel(&["fit", "-i", s(&data), "--omega-prior", "hyper-g", "--hg-a", "-1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn fit_binary_routes_to_probit() {
    let dir = TempDir::new().unwrap();
    // deterministic pattern with a clear upward trend in P(y = 1)
    let data = write_csv(
        dir.path(),
        "b.csv",
        "x,y",
        (0..60).map(|i| {
            let u = i as f64 / 59.0;
            let y = if (i * 7919) % 60 < (10.0 + 40.0 * u) as usize {
                1.0
            } else {
                0.0
            };
            (u, y)
        }),
    );
    let o = smoothsel(&["fit", "-i", s(&data), "--binary", "--mc-draws", "1000", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["response"], "binary");
    let post: Vec<f64> = serde_json::from_value(doc["posterior"].clone()).unwrap();
    assert!((post.iter().sum::<f64>() - 1.0).abs() < 1e-9);

    let o = smoothsel(&["fit", "-i", s(&data), "--binary", "--mc-draws", "10"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fit_binary_rejects_non_binary_response() {
    let dir = TempDir::new().unwrap();
    let data = write_csv(dir.path(), "b.csv", "x,y", (0..30).map(|i| (i as f64, (i % 3) as f64)));
    let o = smoothsel(&["fit", "-i", s(&data), "--binary"]);
    assert_eq!(o.status.code(), Some(2));
}

fn simulate_args<'a>(out: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![
        "simulate",
        "--function",
        "poly5",
        "--n",
        "100",
        "--snr",
        "1",
        "--reps",
        "3",
        "--seed",
        "7",
        "-o",
        out,
    ];
    v.extend_from_slice(extra);
    v
}

#[test]
fn simulate_writes_reproducible_rows() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let o = smoothsel(&simulate_args(s(&a), &["--no-timing"]));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("poly5"));
    smoothsel(&simulate_args(s(&b), &["--no-timing"]));
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert_eq!(
        text.lines().next().unwrap(),
        "rep,n,snr,fn,order_bayes,supnorm_bayes,supnorm_full"
    );
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn simulate_with_timing_has_time_column() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let o = smoothsel(&simulate_args(s(&a), &[]));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&a).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.ends_with("time_bayes") && !header.contains("cv"));
}

#[test]
fn compare_methods_control_cv_columns() {
    let dir = TempDir::new().unwrap();
    let both = dir.path().join("both.csv");
    let bayes = dir.path().join("bayes.csv");
    let base = [
        "compare",
        "--function",
        "pwlinear",
        "--n",
        "60",
        "--snr",
        "2",
        "--reps",
        "2",
        "--seed",
        "1",
    ];
    let mut args = base.to_vec();
    args.extend(["-o", s(&both)]);
    assert_eq!(smoothsel(&args).status.code(), Some(0));
    let mut args = base.to_vec();
    args.extend(["-o", s(&bayes), "--methods", "bayes"]);
    assert_eq!(smoothsel(&args).status.code(), Some(0));
    let header = |p: &Path| fs::read_to_string(p).unwrap().lines().next().unwrap().to_string();
    assert_eq!(
        header(&both),
        "rep,n,snr,fn,order_bayes,order_cv,supnorm_bayes,supnorm_cv,supnorm_full,time_bayes,time_cv"
    );
    assert!(!header(&bayes).contains("cv"));
    let mut args = base.to_vec();
    args.extend(["--methods", "cv"]);
    assert_eq!(smoothsel(&args).status.code(), Some(2));
}

#[test]
fn invalid_scenarios_exit_two() {
    for extra in [["--reps", "0"], ["--snr", "0"], ["--n", "3"], ["--function", "cubic"]] {
        let mut args = vec!["simulate"];
        args.extend(extra);
        assert_eq!(smoothsel(&args).status.code(), Some(2), "{extra:?}");
    }
    assert_eq!(
        smoothsel(&["compare", "--folds", "1", "--reps", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn threads_env_fallback_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_smoothsel"))
        .args(["simulate", "--reps", "1", "--n", "50", "--no-timing"])
        .env("SMOOTHSEL_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_smoothsel"))
        .args(["simulate", "--reps", "2", "--n", "50", "--no-timing"])
        .env("SMOOTHSEL_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    // no output path: CSV on stdout, summary on stderr
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("rep,n,snr,fn"));
}

#[test]
fn report_round_trip() {
    let dir = TempDir::new().unwrap();
    let res = dir.path().join("res.csv");
    let o = smoothsel(&[
        "compare",
        "--function",
        "pwlinear",
        "--n",
        "40",
        "--snr",
        "2",
        "--reps",
        "100",
        "--seed",
        "9",
        "-o",
        s(&res),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let freq = dir.path().join("freq.csv");
    let o = smoothsel(&[
        "report",
        "-i",
        s(&res),
        "--format",
        "csv",
        "--table",
        "frequency",
        "-o",
        s(&freq),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut reader = csv::Reader::from_path(&freq).unwrap();
    let mut totals = std::collections::BTreeMap::<String, usize>::new();
    for row in reader.records() {
        let row = row.unwrap();
        *totals.entry(row[3].to_string()).or_default() += row[5].parse::<usize>().unwrap();
    }
    assert_eq!(totals.get("bayes"), Some(&100));
    assert_eq!(totals.get("cv"), Some(&100));

    let timing = dir.path().join("timing.csv");
    let o = smoothsel(&[
        "report",
        "-i",
        s(&res),
        "--format",
        "csv",
        "--table",
        "timing",
        "-o",
        s(&timing),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut reader = csv::Reader::from_path(&timing).unwrap();
    let mut rows = 0;
    for row in reader.records() {
        let row = row.unwrap();
        let q: Vec<f64> = (4..7).map(|i| row[i].parse().unwrap()).collect();
        assert!(q[0] <= q[1] && q[1] <= q[2], "{q:?}");
        rows += 1;
    }
    assert_eq!(rows, 2);

    let o = smoothsel(&["report", "-i", s(&res)]);
    let md = String::from_utf8_lossy(&o.stdout);
    assert!(md.contains("| fn | n | snr | method | order | count |"));
    assert!(md.contains("q025"));
}

#[test]
fn report_accepts_untimed_simulate_output() {
    let dir = TempDir::new().unwrap();
    let res = dir.path().join("res.csv");
    smoothsel(&simulate_args(s(&res), &["--no-timing"]));
    let o = smoothsel(&["report", "-i", s(&res), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        smoothsel(&["report", "-i", s(&res), "--table", "timing"]).status.code(),
        Some(2)
    );
}

#[test]
fn report_rejects_empty_and_foreign_files() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    assert_eq!(smoothsel(&["report", "-i", s(&empty)]).status.code(), Some(2));
    let foreign = dir.path().join("foreign.csv");
    fs::write(&foreign, "a,b\n1,2\n").unwrap();
    assert_eq!(smoothsel(&["report", "-i", s(&foreign)]).status.code(), Some(2));
    let missing = dir.path().join("nope.csv");
    assert_eq!(smoothsel(&["report", "-i", s(&missing)]).status.code(), Some(2));
}
