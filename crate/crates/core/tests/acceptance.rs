//! Acceptance suite. Every test prints one `PASS`/`FAIL` line and then
//! asserts, so the summary survives output capture.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polydiv::calibration::{calibrate, error_table, read_quotes, CalibrationOptions, QuoteKind};
use polydiv::ljd::{
    beta_lower_bound, build_generator, g2_eigenvalues_closed_form, g2_eigenvalues_numeric, spec_from_text,
    FourFactorParams, JumpDistribution, JumpLaw, ModelSpec,
};
use polydiv::maxent::quadrature::Grid;
use polydiv::maxent::{fit_maxent, price_option, MomentSet, OptionKind, PayoffSpec, Support};
use polydiv::mc::{estimate, negative_dividend_rates, truncated_stock, Estimate, Quantity, SimConfig};
use polydiv::poly::{MomentEngine, Poly};
use polydiv::pricing::{PricingModel, SwapSchedule};
use polydiv::seasonality::{bootstrap_curve, read_targets, read_weights, BootstrapOptions, SeasonalCurve};

fn report(n: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr().lock(), "criterion {n:>2} {verdict}: {name}: {detail}");
    assert!(pass, "criterion {n} failed: {name}: {detail}");
}

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn fixture() -> (PricingModel, Vec<f64>) {
    let p = FourFactorParams::fixture();
    (PricingModel::new(p.to_spec().unwrap()).unwrap(), p.x0.to_vec())
}

#[test]
fn c01_maxent_closed_form_recovery() {
    let start = Instant::now();
    let gauss = fit_maxent(&MomentSet::new(vec![1.0, 0.0, 1.0], Support::FullLine).unwrap()).unwrap();
    let gauss_star = [(2.0 * std::f64::consts::PI).sqrt().ln(), 0.0, 0.5];
    let expo = fit_maxent(&MomentSet::new(vec![1.0, 1.0], Support::HalfLine(0.0)).unwrap()).unwrap();
    let expo_star = [0.0, 1.0];
    let err = |l: &[f64], s: &[f64]| l.iter().zip(s).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let (eg, ee) = (err(&gauss.lambdas, &gauss_star), err(&expo.lambdas, &expo_star));
    let elapsed = start.elapsed();
    report(
        1,
        "maxent closed-form recovery",
        eg <= 1e-6 && ee <= 1e-6 && elapsed < Duration::from_secs(1),
        &format!("gaussian max|dλ| {eg:.2e}, exponential max|dλ| {ee:.2e}, {elapsed:.2?} (limits 1e-6, 1s)"),
    );
}

struct OptionRun {
    name: &'static str,
    price: f64,
    mc: Estimate,
}

/// Maxent prices at N = 4 and 10^5-path weekly Euler estimates of the three
/// at-the-money options, with the time both took.
fn option_runs() -> &'static (Vec<OptionRun>, Duration) {
    static RUNS: OnceLock<(Vec<OptionRun>, Duration)> = OnceLock::new();
    RUNS.get_or_init(|| {
        let start = Instant::now();
        let (model, x) = fixture();
        let sched = SwapSchedule::regular(0.25, 10.0, 1.0).unwrap();
        let options = [
            (
                "3m x 10y swaption",
                OptionKind::Swaption {
                    strike: model.forward_swap_rate(&x, 0.0, &sched).unwrap(),
                    schedule: sched,
                },
            ),
            (
                "2y dividend option",
                OptionKind::DividendOption {
                    t1: 1.0,
                    t2: 2.0,
                    strike: model.dividend_forward(&x, 0.0, 1.0, 2.0).unwrap(),
                },
            ),
            (
                "3m stock option",
                OptionKind::StockOption {
                    expiry: 0.25,
                    strike: model.stock_forward(&x, 0.0, 0.25).unwrap(),
                },
            ),
        ];
        let runs = options
            .into_iter()
            .map(|(name, kind)| {
                let payoff = PayoffSpec::call(kind);
                let price = price_option(&model, &x, 0.0, &payoff, 4).unwrap().value;
                let cfg = SimConfig {
                    horizon: payoff.payment_date(),
                    ..SimConfig::default()
                };
                let mc = estimate(&model, &x, &cfg, &Quantity::Option(payoff)).unwrap();
                OptionRun { name, price, mc }
            })
            .collect();
        (runs, start.elapsed())
    })
}

#[test]
fn c02_moment_convergence_inside_mc_band() {
    let (runs, elapsed) = option_runs();
    let mut pass = *elapsed < Duration::from_secs(120);
    let mut detail = Vec::new();
    for r in runs {
        let (lo, hi) = r.mc.ci95();
        pass &= lo <= r.price && r.price <= hi;
        detail.push(format!("{} {:.8} in [{lo:.8}, {hi:.8}]", r.name, r.price));
    }
    detail.push(format!("{elapsed:.1?} (limit 2 min)"));
    report(2, "N=4 maxent prices inside the 95% MC interval", pass, &detail.join("; "));
}

#[test]
fn c03_closed_forms_against_monte_carlo() {
    let (model, x) = fixture();
    let checks = [
        ("futures [1,2]", Quantity::DividendFutures { t1: 1.0, t2: 2.0 }, 2.0, model.dividend_futures(&x, 0.0, 1.0, 2.0).unwrap()),
        ("futures [4,5]", Quantity::DividendFutures { t1: 4.0, t2: 5.0 }, 5.0, model.dividend_futures(&x, 0.0, 4.0, 5.0).unwrap()),
        ("bond 2y", Quantity::Bond { maturity: 2.0 }, 2.0, model.zero_coupon_bond(&x, 0.0, 2.0).unwrap()),
        ("bond 10y", Quantity::Bond { maturity: 10.0 }, 10.0, model.zero_coupon_bond(&x, 0.0, 10.0).unwrap()),
        ("forward [1,2]", Quantity::DividendForward { t1: 1.0, t2: 2.0 }, 2.0, model.dividend_forward(&x, 0.0, 1.0, 2.0).unwrap()),
        ("forward [4,5]", Quantity::DividendForward { t1: 4.0, t2: 5.0 }, 5.0, model.dividend_forward(&x, 0.0, 4.0, 5.0).unwrap()),
        ("stock to 200y", Quantity::FundamentalStock { truncation: 200.0 }, 200.0, truncated_stock(&model, &x, 200.0).unwrap().0),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, q, horizon, closed) in checks {
        let cfg = SimConfig {
            horizon,
            ..SimConfig::default()
        };
        let e = estimate(&model, &x, &cfg, &q).unwrap();
        let z = e.z_score(closed);
        pass &= z <= 3.0;
        detail.push(format!("{name} z={z:.2}"));
    }
    for r in &option_runs().0 {
        let vr = r.mc.variance_reduction.unwrap_or(0.0);
        pass &= vr >= 2.0;
        detail.push(format!("{} variance reduction {vr:.2}", r.name));
    }
    report(3, "closed forms within 3 MC standard errors, control variate >= 2x", pass, &detail.join("; "));
}

fn random_spec(rng: &mut ChaCha8Rng, with_jumps: bool) -> ModelSpec {
    let d = rng.random_range(1..=4);
    let upper = rng.random_bool(0.5);
    let mut kappa = DMatrix::zeros(d, d);
    let mut sigma = DMatrix::zeros(d, d);
    for i in 0..d {
        kappa[(i, i)] = rng.random_range(0.05..2.0);
        sigma[(i, i)] = rng.random_range(0.0..0.6);
        for j in 0..i {
            let (r, c) = if upper { (j, i) } else { (i, j) };
            kappa[(r, c)] = -rng.random_range(0.0..1.0);
            sigma[(i, j)] = rng.random_range(-0.3..0.3);
        }
    }
    let jumps = with_jumps.then(|| JumpLaw {
        intensity: rng.random_range(0.1..2.0),
        distribution: if rng.random_bool(0.5) {
            JumpDistribution::LogNormal {
                mean: (0..d).map(|_| rng.random_range(-0.2..0.2)).collect(),
                cov: DMatrix::from_fn(d, d, |i, j| if i == j { rng.random_range(0.001..0.05) } else { 0.0 }),
            }
        } else {
            JumpDistribution::TwoPoint {
                up: (0..d).map(|_| rng.random_range(0.0..0.5)).collect(),
                down: (0..d).map(|_| rng.random_range(-0.5..0.0)).collect(),
                prob_up: rng.random_range(0.1..0.9),
            }
        },
    });
    let mut p = vec![0.0; d + 1];
    p[d] = 1.0;
    let mut q = vec![0.0; d + 1];
    q[1] = 1.0;
    ModelSpec {
        kappa,
        theta: (0..d).map(|_| rng.random_range(0.5..2.0)).collect(),
        sigma,
        jumps,
        p,
        q,
        beta: 0.0,
        gamma: 0.05,
        x0: vec![1.0; d],
    }
}

#[test]
fn c04_eigenvalue_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut specs = 0;
    for with_jumps in [false, true] {
        for _ in 0..100 {
            let spec = random_spec(&mut rng, with_jumps);
            assert_eq!(build_generator(&spec, 2).unwrap().degree(), 2);
            let mut closed = g2_eigenvalues_closed_form(&spec).unwrap();
            closed.sort_by(f64::total_cmp);
            let mut numeric = g2_eigenvalues_numeric(&spec).unwrap();
            numeric.sort_by(|a, b| a.0.total_cmp(&b.0));
            assert_eq!(closed.len(), numeric.len());
            for (c, (re, im)) in closed.iter().zip(&numeric) {
                worst = worst.max((c - re).abs()).max(im.abs());
            }
            specs += 1;
        }
    }
    let elapsed = start.elapsed();
    report(
        4,
        "closed-form G_2 eigenvalues match the dense eigensolver",
        worst <= 1e-8 && elapsed < Duration::from_secs(10),
        &format!("{specs} specs, max deviation {worst:.2e}, {elapsed:.2?} (limits 1e-8, 10s)"),
    );
}

#[test]
fn c05_positivity_bound_is_sharp() {
    let spec = FourFactorParams::fixture().to_spec().unwrap();
    let bound = beta_lower_bound(&spec).unwrap();
    let cfg = SimConfig {
        paths: 10_000,
        horizon: 10.0,
        ..SimConfig::default()
    };
    let count = |beta: f64| {
        let mut s = spec.clone();
        s.beta = beta;
        negative_dividend_rates(&s, &cfg).unwrap()
    };
    let (above, obs) = count(bound + 1e-6);
    let (below, _) = count(bound - 0.05);
    report(
        5,
        "dividend positivity bound is sharp",
        above == 0 && below > 0,
        &format!(
            "bound {bound:.6}; {above} negatives above, {below} of {obs} below ({:.3}%)",
            100.0 * below as f64 / obs as f64
        ),
    );
}

#[test]
fn c06_duration() {
    let (model, x) = fixture();
    let spec = model.spec().clone();
    let formula = model.stock_duration(&x).unwrap();
    let g2 = build_generator(&spec, 2).unwrap();
    let engine = MomentEngine::new(&g2, &x).unwrap();
    let integrand = Poly::linear(&spec.q).multiply(&Poly::linear(&model.dividend_rate_loading()));
    let pv = |s: f64| ((spec.beta - spec.gamma) * s).exp() * engine.expect(&integrand, s).unwrap();
    let grid = Grid::uniform(0.0, 2000.0, 2000);
    let quad = grid.integrate(|s| s * pv(s)) / grid.integrate(pv);
    let rel = (formula - quad).abs() / quad;

    let gordon = PricingModel::new(ModelSpec {
        kappa: DMatrix::zeros(1, 1),
        theta: vec![0.7],
        sigma: DMatrix::zeros(1, 1),
        jumps: None,
        p: vec![0.0, 1.0],
        q: vec![0.0, 1.0],
        beta: 0.02,
        gamma: 0.07,
        x0: vec![2.0],
    })
    .unwrap();
    let gerr = (gordon.stock_duration(&[2.0]).unwrap() - 1.0 / 0.05).abs();
    report(
        6,
        "stock duration",
        rel <= 1e-3 && gerr <= 1e-10,
        &format!("formula {formula:.6} vs quadrature {quad:.6} (rel {rel:.2e}, limit 1e-3); Gordon error {gerr:.2e} (limit 1e-10)"),
    );
}

#[test]
fn c07_convexity_adjustment_sign() {
    let periods = [(0.0, 1.0), (1.0, 2.0), (4.0, 5.0), (9.0, 10.0)];
    let gap = |rho: f64| {
        let mut p = FourFactorParams::fixture();
        p.rho = rho;
        let model = PricingModel::new(p.to_spec().unwrap()).unwrap();
        let x = p.x0.to_vec();
        periods
            .iter()
            .map(|&(a, b)| model.dividend_forward(&x, 0.0, a, b).unwrap() - model.dividend_futures(&x, 0.0, a, b).unwrap())
            .collect::<Vec<_>>()
    };
    let independent = gap(0.0).into_iter().map(f64::abs).fold(0.0, f64::max);
    let correlated = gap(0.8);
    let min_gap = correlated.iter().copied().fold(f64::INFINITY, f64::min);
    report(
        7,
        "forward equals futures when independent, exceeds it when rho = 0.8",
        independent <= 1e-10 && min_gap > 0.0,
        &format!("independent max|fwd-fut| {independent:.2e} (limit 1e-10); rho 0.8 smallest gap {min_gap:.3e}"),
    );
}

#[test]
fn c08_calibration_round_trip() {
    let start = Instant::now();
    let dir = fixture_dir();
    let quotes = read_quotes(std::fs::File::open(dir.join("quotes.csv")).unwrap()).unwrap();
    let initial = spec_from_text(&std::fs::read_to_string(dir.join("initial.txt")).unwrap()).unwrap();
    let initial = FourFactorParams::from_spec(&initial).unwrap();
    let fit = calibrate(&quotes, &initial, &CalibrationOptions::default()).unwrap();
    let table = error_table(&fit.errors);
    let mean_of = |kind: QuoteKind, measure: &str| {
        table.iter().find(|s| s.kind == kind && s.measure == measure).map(|s| s.mean).unwrap()
    };
    let fut_are = mean_of(QuoteKind::DivFuture, "ARE");
    let swap_ae = mean_of(QuoteKind::SwapRate, "AE");
    let elapsed = start.elapsed();
    report(
        8,
        "calibration round trip",
        fut_are < 0.01 && swap_ae < 2.0 && elapsed < Duration::from_secs(600),
        &format!(
            "futures ARE mean {:.3}% (limit 1%), swap AE mean {swap_ae:.3}bp (limit 2bp), {} evaluations, {elapsed:.1?} (limit 10 min)",
            100.0 * fut_are,
            fit.evaluations
        ),
    );
}

fn worst_repricing(c: &SeasonalCurve) -> f64 {
    let j = c.weights.len();
    c.bucket_integrals()
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let target = c.weights[k % j] * c.targets[k / j];
            if target == 0.0 { v.abs() } else { (v - target).abs() / target.abs() }
        })
        .fold(0.0, f64::max)
}

#[test]
fn c09_seasonal_bootstrap() {
    let dir = fixture_dir();
    let weights = read_weights(std::fs::File::open(dir.join("monthly_weights.csv")).unwrap()).unwrap();
    let targets = read_targets(std::fs::File::open(dir.join("targets.csv")).unwrap()).unwrap();
    let plain = bootstrap_curve(&targets, &weights, &BootstrapOptions::default()).unwrap();

    // Quiet months and a sharp drop push the unconstrained curve below zero.
    let sparse = [0.0, 0.0, 0.05, 0.45, 0.35, 0.05, 0.0, 0.0, 0.0, 0.05, 0.05, 0.0];
    let falling = [0.04, 0.01, 0.035, 0.005, 0.02];
    let free = bootstrap_curve(&falling, &sparse, &BootstrapOptions::default()).unwrap();
    let opts = BootstrapOptions {
        nonnegative: true,
        ..BootstrapOptions::default()
    };
    let signed = bootstrap_curve(&falling, &sparse, &opts).unwrap();
    let free_min = free.values.iter().copied().fold(f64::INFINITY, f64::min);
    let signed_min = signed.values.iter().copied().fold(f64::INFINITY, f64::min);

    let rep = worst_repricing(&plain).max(worst_repricing(&signed));
    let kkt = plain.kkt_residual.max(signed.kkt_residual);
    report(
        9,
        "seasonal bootstrap",
        rep <= 1e-8 && kkt < 1e-8 && free_min < 0.0 && signed_min >= 0.0,
        &format!(
            "worst bucket repricing {rep:.2e} (limit 1e-8), KKT residual {kkt:.2e} (limit 1e-8), \
             min f0 {free_min:.3e} unconstrained vs {signed_min:.3e} with the sign constraint"
        ),
    );
}

struct CliRun {
    stdout: Vec<u8>,
    stderr: Vec<u8>,
    files: Vec<(String, Vec<u8>)>,
    code: Option<i32>,
}

fn run_cli(args: &[&str], threads: usize) -> CliRun {
    let dir = tempfile::tempdir().unwrap();
    let fixtures = fixture_dir();
    let expanded: Vec<String> = args
        .iter()
        .map(|a| {
            a.replace("{fixtures}", fixtures.to_str().unwrap())
                .replace("{out}", dir.path().to_str().unwrap())
        })
        .collect();
    let out = Command::new(env!("CARGO_BIN_EXE_polydiv"))
        .args(&expanded)
        .args(["--threads", &threads.to_string()])
        .env_remove("POLYDIV_THREADS")
        .output()
        .unwrap();
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    CliRun {
        stdout: out.stdout,
        stderr: out.stderr,
        files,
        code: out.status.code(),
    }
}

fn same(a: &CliRun, b: &CliRun) -> bool {
    a.stdout == b.stdout && a.stderr == b.stderr && a.files == b.files && a.code == b.code
}

#[test]
fn c10_cli_determinism() {
    let model = "{fixtures}/four_factor.txt";
    let commands: Vec<(&str, Vec<&str>)> = vec![
        ("price", vec!["price", "--model", model, "--kind", "stock"]),
        (
            "price ladder",
            vec![
                "price", "--model", model, "--kind", "swaption", "--T", "1", "--tenor", "5", "--strike", "0.03,atm,0.05",
                "--verify", "--paths", "4000", "--csv", "{out}/ladder.csv",
            ],
        ),
        ("fit-maxent", vec!["fit-maxent", "--moments", "{fixtures}/exponential.moments", "--out", "{out}/lambda.txt"]),
        (
            "simulate",
            vec![
                "simulate", "--model", model, "--kind", "div_option", "--T1", "1", "--T2", "2", "--paths", "3000",
                "--dump", "{out}/paths.csv",
            ],
        ),
        (
            "calibrate",
            vec![
                "calibrate", "--quotes", "{fixtures}/quotes.csv", "--initial", "{fixtures}/initial.txt", "--out-dir",
                "{out}", "--max-evals", "60",
            ],
        ),
        (
            "convergence",
            vec!["convergence", "--model", model, "--kind", "stock_option", "--T", "0.25", "--n-max", "4", "--paths", "3000"],
        ),
        (
            "bootstrap",
            vec![
                "bootstrap", "--targets", "{fixtures}/targets.csv", "--weights", "{fixtures}/monthly_weights.csv",
                "--nonnegative", "--out", "{out}/curve.csv",
            ],
        ),
    ];
    let mut failures = Vec::new();
    for (name, args) in &commands {
        let first = run_cli(args, 1);
        if first.code != Some(0) {
            failures.push(format!("{name} exited with {:?}: {}", first.code, String::from_utf8_lossy(&first.stderr)));
            continue;
        }
        if !same(&first, &run_cli(args, 1)) {
            failures.push(format!("{name} differs between two runs"));
        }
        if !same(&first, &run_cli(args, 8)) {
            failures.push(format!("{name} differs between 1 and 8 threads"));
        }
    }
    let detail = if failures.is_empty() {
        format!("{} subcommand runs identical across repeats and 1 vs 8 threads", commands.len())
    } else {
        failures.join("; ")
    };
    report(10, "CLI determinism", failures.is_empty(), &detail);
}
