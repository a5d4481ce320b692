use std::path::Path;
use std::process::{Command, Output};

fn otterlab(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_otterlab"))
        .args(args)
        .env("OTTERLAB_CACHE", cache)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let dir = tempfile::tempdir().unwrap();
    let out = otterlab(args, dir.path());
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn data_rows(out: &str) -> Vec<Vec<String>> {
    out.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn lines(out: &str) -> Vec<&str> {
    out.lines().collect()
}

#[test]
fn seq_prefixes() {
    assert_eq!(lines(&stdout(&["seq", "rooted", "--n-max", "8"])), ["1", "1", "1", "2", "3", "6", "11", "23"]);
    assert_eq!(
        lines(&stdout(&["seq", "unrooted", "--n-max", "11"])),
        ["0", "1", "1", "1", "1", "2", "2", "4", "6", "11", "18"]
    );
    assert_eq!(
        lines(&stdout(&["seq", "odd-diameter", "--n-max", "11"])),
        ["0", "1", "0", "1", "0", "1", "1", "2", "2", "6", "8"]
    );
    assert_eq!(
        lines(&stdout(&["seq", "even-diameter", "--n-max", "11"])),
        ["0", "0", "1", "0", "1", "1", "1", "2", "4", "5", "10"]
    );
    assert_eq!(lines(&stdout(&["seq", "odd-diameter", "--n-max", "1"])), ["0"]);
}

#[test]
fn seq_json_is_an_array_of_strings() {
    let v: serde_json::Value = serde_json::from_str(&stdout(&["seq", "rooted", "--n-max", "5", "--format", "json"])).unwrap();
    assert_eq!(v, serde_json::json!(["1", "1", "1", "2", "3"]));
}

#[test]
fn height_dist_small() {
    let out = stdout(&["height-dist", "--n", "4"]);
    assert!(out.starts_with("# h,mass,cumulative\n"));
    assert_eq!(data_rows(&out), [["2", "1/2", "1/2"], ["3", "1/2", "1/1"]]);
}

#[test]
fn diameter_dist_two_leaves() {
    let out = stdout(&["diameter-dist", "--n", "2", "--compare-limit"]);
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][..3], ["1", "1/1", "1/1"]);
    assert_eq!(rows[0].len(), 7);
}

#[test]
fn compare_limit_columns() {
    let out = stdout(&["height-dist", "--n", "30", "--compare-limit"]);
    assert!(out.starts_with("# h,mass,cumulative,x,limit_mass,tail,limit_tail\n"));
    let rows = data_rows(&out);
    // exact tail at the first row is one; limit tail decreases down the table
    assert_eq!(rows[0][5], "1.0");
    let limit: Vec<f64> = rows.iter().map(|r| r[6].parse().unwrap()).collect();
    assert!(limit.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn moment_ratio_at_500() {
    let out = stdout(&["height-dist", "--n", "500", "--moment", "1"]);
    let rows = data_rows(&out);
    assert!(rows[0][1].contains('/'));
    let ratio: f64 = rows[0][4].parse().unwrap();
    assert!((ratio - 1.0).abs() <= 0.15, "ratio {ratio}");
}

#[test]
fn constants_ten_digits() {
    let rows = data_rows(&stdout(&["constants", "--digits", "10"]));
    assert_eq!(rows[0][..2], ["rho", "0.4026975037"]);
    // correctly rounded; the truncated form is 1.1300337163
    assert_eq!(rows[1][..2], ["lambda", "1.1300337164"]);
    assert!(rows.iter().all(|r| r[2].parse::<f64>().unwrap() < 1e-11));
}

#[test]
fn rate_function_grid() {
    let rows = data_rows(&stdout(&["rate-function", "--x-grid", "0.1:0.9:0.1"]));
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[2][0], "0.3");
    let rates: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(rates[0] > 0.0 && rates.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn validate_eh_rel_err_decreases() {
    let out = stdout(&["validate", "eh", "--grid", "rho:50,100,200"]);
    assert!(out.contains("# fitted_c="));
    let rel: Vec<f64> = data_rows(&out).iter().map(|r| r[4].parse().unwrap()).collect();
    assert_eq!(rel.len(), 3);
    assert!(rel.windows(2).all(|w| w[1] < w[0]), "{rel:?}");
}

#[test]
fn validate_ud_runs() {
    let rows = data_rows(&stdout(&["validate", "ud", "--grid", "0.4:10,20", "--n-max", "120"]));
    assert_eq!(rows.len(), 2);
    let rel: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    assert!(rel[1] < rel[0]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| otterlab(args, dir.path()).status.code();
    assert_eq!(code(&["seq", "binary", "--n-max", "5"]), Some(2));
    assert_eq!(code(&["seq", "rooted", "--n-max", "0"]), Some(2));
    assert_eq!(code(&["rate-function", "--x-grid", "0.1:0.9"]), Some(2));
    assert_eq!(code(&["validate", "eh", "--grid", "rho"]), Some(2));
    assert_eq!(code(&["constants", "--digits", "0"]), Some(2));
    assert_eq!(code(&["height-dist", "--n", "501"]), Some(3));
    assert_eq!(code(&["diameter-dist", "--n", "1000"]), Some(3));
    let refusal = otterlab(&["height-dist", "--n", "800"], dir.path());
    let msg = String::from_utf8_lossy(&refusal.stderr);
    assert!(msg.contains("--allow-large") && msg.contains("products"), "{msg}");
    assert_eq!(code(&["seq", "rooted", "--n-max", "3"]), Some(0));
}

#[test]
fn output_is_deterministic_and_cache_transparent() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["height-dist", "--n", "80", "--compare-limit"][..],
        &["diameter-dist", "--n", "60", "--format", "json"],
        &["seq", "odd-diameter", "--n-max", "70"],
    ] {
        let cold = otterlab(args, dir.path());
        let warm = otterlab(args, dir.path());
        let mut no_cache = args.to_vec();
        no_cache.push("--no-cache");
        let bypass = otterlab(&no_cache, dir.path());
        assert!(cold.status.success());
        assert_eq!(cold.stdout, warm.stdout, "{args:?}");
        assert_eq!(cold.stdout, bypass.stdout, "{args:?}");
    }
    assert!(std::fs::read_dir(dir.path()).unwrap().count() >= 2);
}

#[test]
fn corrupt_cache_is_ignored() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["height-dist", "--n", "25"];
    let first = otterlab(&args, dir.path());
    for entry in std::fs::read_dir(dir.path()).unwrap() {
        std::fs::write(entry.unwrap().path(), b"garbage").unwrap();
    }
    let second = otterlab(&args, dir.path());
    assert!(second.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert!(String::from_utf8_lossy(&second.stderr).contains("warning"));
}

#[test]
fn timestamp_is_opt_in() {
    assert!(!stdout(&["seq", "rooted", "--n-max", "3"]).starts_with("# generated"));
    assert!(stdout(&["seq", "rooted", "--n-max", "3", "--timestamp"]).starts_with("# generated "));
}
