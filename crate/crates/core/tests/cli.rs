use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn polydiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polydiv"))
        .args(args)
        .env_remove("POLYDIV_THREADS")
        .output()
        .unwrap()
}

fn model() -> String {
    fixtures().join("four_factor.txt").to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key)?.trim().strip_prefix('=')?.trim().parse().ok())
        .unwrap_or_else(|| panic!("no '{key}' in\n{text}"))
}

#[test]
fn bond_at_time_zero_is_one() {
    let o = polydiv(&["price", "--model", &model(), "--kind", "bond", "--T", "0"]);
    assert!(o.status.success());
    assert_eq!(value(&stdout(&o), "value"), 1.0);
}

#[test]
fn futures_over_empty_period_is_zero() {
    let o = polydiv(&["price", "--model", &model(), "--kind", "div_future", "--T1", "2", "--T2", "2"]);
    assert!(o.status.success());
    assert_eq!(value(&stdout(&o), "value"), 0.0);
}

#[test]
fn input_errors_exit_with_two() {
    let missing = polydiv(&["price", "--model", "/no/such/model.txt", "--kind", "stock"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(!missing.stderr.is_empty());
    assert_eq!(polydiv(&["price", "--model", &model(), "--kind", "stock", "--bogus"]).status.code(), Some(2));
    let order = polydiv(&["price", "--model", &model(), "--kind", "stock_option", "--T", "0.25", "--n", "9"]);
    assert_eq!(order.status.code(), Some(2));
    let dates = polydiv(&["price", "--model", &model(), "--kind", "div_future", "--T1", "3", "--T2", "1"]);
    assert_eq!(dates.status.code(), Some(2));
}

#[test]
fn strike_ladder_is_decreasing() {
    let o = polydiv(&[
        "price", "--model", &model(), "--kind", "div_option", "--T1", "1", "--T2", "2", "--strike",
        "0.016,0.018,0.02,0.022,0.024",
    ]);
    assert!(o.status.success());
    let prices: Vec<f64> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(prices.len(), 5);
    assert!(prices.windows(2).all(|w| w[1] <= w[0]), "{prices:?}");
}

#[test]
fn fit_maxent_writes_multipliers() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lambda.txt");
    let moments = fixtures().join("gaussian.moments");
    let o = polydiv(&["fit-maxent", "--moments", moments.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let (_, lambdas) = polydiv::maxent::lambdas_from_text(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!((lambdas[2] - 0.5).abs() < 1e-6);
}

#[test]
fn warm_start_resumes_from_previous_result() {
    let dir = tempfile::tempdir().unwrap();
    let (first, second) = (dir.path().join("a"), dir.path().join("b"));
    let quotes = fixtures().join("quotes.csv");
    let initial = fixtures().join("initial.txt");
    let cold = polydiv(&[
        "calibrate", "--quotes", quotes.to_str().unwrap(), "--initial", initial.to_str().unwrap(), "--out-dir",
        first.to_str().unwrap(), "--max-evals", "80",
    ]);
    assert!(cold.status.success(), "{}", String::from_utf8_lossy(&cold.stderr));
    let previous = first.join("model.txt");
    let warm = polydiv(&[
        "calibrate", "--quotes", quotes.to_str().unwrap(), "--warm-start", previous.to_str().unwrap(), "--out-dir",
        second.to_str().unwrap(), "--max-evals", "80",
    ]);
    assert!(warm.status.success());
    let (a, b) = (value(&stdout(&cold), "objective"), value(&stdout(&warm), "objective"));
    assert!(b <= a, "warm start {b} worse than the result it started from {a}");
    let errors = std::fs::read_to_string(second.join("errors.csv")).unwrap();
    assert!(errors.starts_with("kind,measure,unit,count,Mean,Median,Std,Max"));
}

#[test]
fn bootstrap_reports_a_curve() {
    let o = polydiv(&[
        "bootstrap",
        "--targets",
        fixtures().join("targets.csv").to_str().unwrap(),
        "--weights",
        fixtures().join("monthly_weights.csv").to_str().unwrap(),
        "--points-per-year",
        "24",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("t,f0\n"));
    assert_eq!(text.lines().count(), 1 + 5 * 24 + 1);
}
