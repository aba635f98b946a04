//! The `polydiv` command-line tool.
//!
//! Every subcommand is a pure function of its files and flags: output goes
//! into an [`Output`] that the binary prints, so runs can be compared byte for
//! byte. Errors map to exit code 2 (inputs) or 3 (numerics).

mod args;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

pub use args::{
    BootstrapArgs, CalibrateArgs, Cli, Command, ConvergenceArgs, FitArgs, InstrumentArgs, Kind, McArgs, PriceArgs,
    SimulateArgs,
};

use crate::calibration::{self, CalibrationOptions, SimplexOptions};
use crate::error::{Error, Result};
use crate::ljd::{spec_from_text, spec_to_text, FourFactorParams, ModelSpec};
use crate::maxent::{self, fit_maxent, price_option, OptionKind, PayoffSpec, Transform};
use crate::mc::{self, Estimate, Quantity, SimConfig};
use crate::pricing::{PricingModel, SwapSchedule};
use crate::seasonality::{self, BootstrapOptions};

/// Text destined for standard output and standard error.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
}

/// 2 for input and validation errors, 3 for numerical failures.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        3
    } else {
        2
    }
}

pub fn run(cli: &Cli) -> Result<Output> {
    match cli.threads {
        Some(0) => Err(Error::InvalidArgument("--threads must be positive".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(|| dispatch(&cli.command)),
        None => dispatch(&cli.command),
    }
}

fn dispatch(cmd: &Command) -> Result<Output> {
    match cmd {
        Command::Price(a) => cmd_price(a),
        Command::FitMaxent(a) => cmd_fit_maxent(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Calibrate(a) => cmd_calibrate(a),
        Command::Convergence(a) => cmd_convergence(a),
        Command::Bootstrap(a) => cmd_bootstrap(a),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_spec(path: &Path) -> Result<ModelSpec> {
    spec_from_text(&read(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<(PricingModel, Vec<f64>)> {
    let spec = load_spec(path)?;
    let x = spec.x0.clone();
    Ok((PricingModel::new(spec)?, x))
}

fn need(v: Option<f64>, flag: &str, kind: Kind) -> Result<f64> {
    v.ok_or_else(|| Error::InvalidArgument(format!("{flag} is required for {kind:?}")))
}

fn schedule(a: &InstrumentArgs) -> Result<SwapSchedule> {
    let start = if a.kind == Kind::Swaption {
        need(a.maturity, "--T", a.kind)?
    } else {
        a.maturity.unwrap_or(0.0)
    };
    SwapSchedule::regular(start, need(a.tenor, "--tenor", a.kind)?, a.period)
}

fn dividend_period(a: &InstrumentArgs) -> Result<(f64, f64)> {
    Ok((need(a.t1, "--T1", a.kind)?, need(a.t2, "--T2", a.kind)?))
}

/// Value of a non-option instrument.
fn linear_value(model: &PricingModel, x: &[f64], a: &InstrumentArgs) -> Result<f64> {
    match a.kind {
        Kind::Bond => model.zero_coupon_bond(x, 0.0, need(a.maturity, "--T", a.kind)?),
        Kind::ShortRate => model.short_rate(x),
        Kind::DivFuture => {
            let (t1, t2) = dividend_period(a)?;
            model.dividend_futures(x, 0.0, t1, t2)
        }
        Kind::DivForward => {
            let (t1, t2) = dividend_period(a)?;
            model.dividend_forward(x, 0.0, t1, t2)
        }
        Kind::SwapRate => model.forward_swap_rate(x, 0.0, &schedule(a)?),
        Kind::Annuity => model.annuity(x, 0.0, &schedule(a)?),
        Kind::Stock => model.fundamental_stock(x, 0.0),
        Kind::Duration => model.stock_duration(x),
        Kind::Swaption | Kind::DivOption | Kind::StockOption => unreachable!("options are priced separately"),
    }
}

/// Forward of the option underlying under the payment measure; `atm`
/// strikes resolve to it.
fn option_forward(model: &PricingModel, x: &[f64], a: &InstrumentArgs) -> Result<f64> {
    match a.kind {
        Kind::Swaption => model.forward_swap_rate(x, 0.0, &schedule(a)?),
        Kind::DivOption => {
            let (t1, t2) = dividend_period(a)?;
            model.dividend_forward(x, 0.0, t1, t2)
        }
        Kind::StockOption => model.stock_forward(x, 0.0, need(a.maturity, "--T", a.kind)?),
        _ => Err(Error::InvalidArgument(format!("{:?} is not an option", a.kind))),
    }
}

fn strikes(model: &PricingModel, x: &[f64], a: &InstrumentArgs) -> Result<Vec<f64>> {
    let mut fwd = None;
    let mut out = Vec::new();
    for s in &a.strike {
        let s = s.trim();
        if s.eq_ignore_ascii_case("atm") {
            if fwd.is_none() {
                fwd = Some(option_forward(model, x, a)?);
            }
            out.push(fwd.unwrap());
        } else {
            let k: f64 = s
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("strike '{s}' is neither a number nor atm")))?;
            out.push(k);
        }
    }
    Ok(out)
}

fn payoff(a: &InstrumentArgs, strike: f64) -> Result<PayoffSpec> {
    let kind = match a.kind {
        Kind::Swaption => OptionKind::Swaption {
            schedule: schedule(a)?,
            strike,
        },
        Kind::DivOption => {
            let (t1, t2) = dividend_period(a)?;
            OptionKind::DividendOption { t1, t2, strike }
        }
        Kind::StockOption => OptionKind::StockOption {
            expiry: need(a.maturity, "--T", a.kind)?,
            strike,
        },
        _ => return Err(Error::InvalidArgument(format!("{:?} is not an option", a.kind))),
    };
    Ok(PayoffSpec {
        kind,
        transform: if a.put { Transform::Put } else { Transform::Call },
    })
}

fn sim_config(m: &McArgs, horizon: f64) -> SimConfig {
    SimConfig {
        paths: m.paths,
        step: m.step,
        horizon,
        seed: m.seed,
        control_variate: !m.no_control_variate,
        threads: None,
    }
}

fn check_order(n: usize) -> Result<()> {
    if !(2..=maxent::MAX_ORDER).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "number of moments must lie in [2, {}], got {n}",
            maxent::MAX_ORDER
        )));
    }
    Ok(())
}

fn put_estimate(s: &mut String, prefix: &str, e: &Estimate) {
    let (lo, hi) = e.ci95();
    let _ = writeln!(s, "{prefix}mean = {:?}", e.mean);
    let _ = writeln!(s, "{prefix}std_error = {:?}", e.std_error);
    let _ = writeln!(s, "{prefix}ci95_low = {lo:?}");
    let _ = writeln!(s, "{prefix}ci95_high = {hi:?}");
    let _ = writeln!(s, "{prefix}paths = {}", e.paths);
    if let Some(v) = e.variance_reduction {
        let _ = writeln!(s, "{prefix}variance_reduction = {v:?}");
    }
}

fn cmd_price(a: &PriceArgs) -> Result<Output> {
    let (model, x) = load_model(&a.model)?;
    let ins = &a.instrument;
    let mut out = Output::default();
    if !ins.kind.is_option() {
        let v = linear_value(&model, &x, ins)?;
        out.stdout = format!("value = {v:?}\n");
        if let Some(p) = &a.csv {
            write_file(p, &format!("value\n{v:?}\n"))?;
        }
        return Ok(out);
    }
    check_order(a.n)?;
    let ks = strikes(&model, &x, ins)?;
    let mut rows = Vec::new();
    for &k in &ks {
        let spec = payoff(ins, k)?;
        let price = price_option(&model, &x, 0.0, &spec, a.n)?.value;
        let mc = if a.verify {
            let cfg = sim_config(&a.mc, spec.payment_date());
            Some(mc::estimate(&model, &x, &cfg, &Quantity::Option(spec))?)
        } else {
            None
        };
        rows.push((k, price, mc));
    }
    let mut csv = String::from(if a.verify {
        "strike,value,mc_mean,mc_std_error,inside_ci95\n"
    } else {
        "strike,value\n"
    });
    for (k, v, mc) in &rows {
        let _ = write!(csv, "{k:?},{v:?}");
        if let Some(e) = mc {
            let (lo, hi) = e.ci95();
            let _ = write!(csv, ",{:?},{:?},{}", e.mean, e.std_error, lo <= *v && *v <= hi);
        }
        csv.push('\n');
    }
    if rows.len() == 1 {
        let (k, v, mc) = &rows[0];
        let mut s = format!("value = {v:?}\nstrike = {k:?}\nN = {}\n", a.n);
        if let Some(e) = mc {
            put_estimate(&mut s, "mc_", e);
            let (lo, hi) = e.ci95();
            let _ = writeln!(s, "inside_ci95 = {}", lo <= *v && *v <= hi);
        }
        out.stdout = s;
    } else {
        out.stdout = csv.clone();
    }
    if let Some(p) = &a.csv {
        write_file(p, &csv)?;
    }
    Ok(out)
}

fn cmd_fit_maxent(a: &FitArgs) -> Result<Output> {
    let ms = maxent::moments_from_text(&read(&a.moments)?)
        .map_err(|e| Error::Parse(format!("{}: {e}", a.moments.display())))?;
    let d = fit_maxent(&ms)?;
    let text = maxent::density_to_text(&d);
    let stderr = format!("iterations = {}\ngradient_norm = {:e}\n", d.iterations, d.gradient_norm);
    Ok(match &a.out {
        Some(p) => {
            write_file(p, &text)?;
            Output { stdout: String::new(), stderr }
        }
        None => Output { stdout: text, stderr },
    })
}

/// MC quantity, reference value with its name, and the instrument's last
/// date.
fn simulation_target(
    model: &PricingModel,
    x: &[f64],
    a: &InstrumentArgs,
) -> Result<(Quantity, f64, &'static str, f64)> {
    const CLOSED: &str = "closed_form";
    Ok(match a.kind {
        Kind::Bond => {
            let t = need(a.maturity, "--T", a.kind)?;
            (Quantity::Bond { maturity: t }, model.zero_coupon_bond(x, 0.0, t)?, CLOSED, t)
        }
        Kind::DivFuture => {
            let (t1, t2) = dividend_period(a)?;
            (Quantity::DividendFutures { t1, t2 }, model.dividend_futures(x, 0.0, t1, t2)?, CLOSED, t2)
        }
        Kind::DivForward => {
            let (t1, t2) = dividend_period(a)?;
            (Quantity::DividendForward { t1, t2 }, model.dividend_forward(x, 0.0, t1, t2)?, CLOSED, t2)
        }
        Kind::Stock => {
            let h = a.truncation;
            let (v, _) = mc::truncated_stock(model, x, h)?;
            (Quantity::FundamentalStock { truncation: h }, v, CLOSED, h)
        }
        Kind::Swaption | Kind::DivOption | Kind::StockOption => {
            let ks = strikes(model, x, a)?;
            if ks.len() != 1 {
                return Err(Error::InvalidArgument("simulate takes a single strike".into()));
            }
            let spec = payoff(a, ks[0])?;
            let date = spec.payment_date();
            let v = price_option(model, x, 0.0, &spec, maxent::MAX_ORDER)?.value;
            (Quantity::Option(spec), v, "maxent_price", date)
        }
        k => return Err(Error::InvalidArgument(format!("no Monte-Carlo estimator for {k:?}"))),
    })
}

fn cmd_simulate(a: &SimulateArgs) -> Result<Output> {
    let (model, x) = load_model(&a.model)?;
    let (q, reference, name, last) = simulation_target(&model, &x, &a.instrument)?;
    let cfg = sim_config(&a.mc, a.horizon.unwrap_or(last));
    let e = mc::estimate(&model, &x, &cfg, &q)?;
    let mut s = String::new();
    put_estimate(&mut s, "mc_", &e);
    if let Some(t) = e.truncation_tail {
        let _ = writeln!(s, "truncation_tail = {t:?}");
    }
    let _ = writeln!(s, "{name} = {reference:?}");
    let _ = writeln!(s, "z_score = {:?}", e.z_score(reference));
    if let Some(p) = &a.dump {
        let bundle = mc::simulate_paths(model.spec(), &cfg)?;
        let mut buf = Vec::new();
        bundle.write_csv(&mut buf)?;
        fs::write(p, buf).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
    }
    Ok(Output {
        stdout: s,
        stderr: String::new(),
    })
}

fn cmd_calibrate(a: &CalibrateArgs) -> Result<Output> {
    let quotes = calibration::read_quotes(read(&a.quotes)?.as_bytes())
        .map_err(|e| Error::Parse(format!("{}: {e}", a.quotes.display())))?;
    let start_file = a.warm_start.as_ref().or(a.initial.as_ref()).expect("clap requires one of them");
    let initial = FourFactorParams::from_spec(&load_spec(start_file)?)?;
    let opts = CalibrationOptions {
        moments: a.n,
        step: 0.1,
        simplex: SimplexOptions {
            max_evaluations: a.max_evals,
            diameter_tol: a.tol,
            restarts: a.restarts,
        },
    };
    check_order(a.n)?;
    let r = calibration::calibrate(&quotes, &initial, &opts)?;
    fs::create_dir_all(&a.out_dir).map_err(|e| Error::Io(format!("{}: {e}", a.out_dir.display())))?;
    let model_text = spec_to_text(&r.params.to_spec()?);
    write_file(&a.out_dir.join("model.txt"), &model_text)?;
    let table = calibration::error_table(&r.errors);
    let mut buf = Vec::new();
    calibration::write_error_table(&mut buf, &table)?;
    let csv = String::from_utf8(buf).expect("ascii table");
    write_file(&a.out_dir.join("errors.csv"), &csv)?;
    let mut s = String::new();
    let _ = writeln!(s, "objective = {:?}", r.objective);
    let _ = writeln!(s, "evaluations = {}", r.evaluations);
    let _ = writeln!(s, "iterations = {}", r.iterations);
    let _ = writeln!(s, "converged = {}", r.converged);
    s.push_str(&csv);
    Ok(Output {
        stdout: s,
        stderr: String::new(),
    })
}

fn cmd_convergence(a: &ConvergenceArgs) -> Result<Output> {
    check_order(a.n_min)?;
    check_order(a.n_max)?;
    if a.n_min > a.n_max {
        return Err(Error::InvalidArgument("--n-min exceeds --n-max".into()));
    }
    let (model, x) = load_model(&a.model)?;
    let ins = &a.instrument;
    if !ins.kind.is_option() {
        return Err(Error::InvalidArgument(format!("{:?} is not an option", ins.kind)));
    }
    let ks = strikes(&model, &x, ins)?;
    if ks.len() != 1 {
        return Err(Error::InvalidArgument("convergence takes a single strike".into()));
    }
    let spec = payoff(ins, ks[0])?;
    let cfg = sim_config(&a.mc, spec.payment_date());
    let e = mc::estimate(&model, &x, &cfg, &Quantity::Option(spec.clone()))?;
    let mut s = String::from("N,price,mc_mean,mc_std_error\n");
    for n in a.n_min..=a.n_max {
        let v = price_option(&model, &x, 0.0, &spec, n)?.value;
        let _ = writeln!(s, "{n},{v:?},{:?},{:?}", e.mean, e.std_error);
    }
    Ok(Output {
        stdout: s,
        stderr: String::new(),
    })
}

fn cmd_bootstrap(a: &BootstrapArgs) -> Result<Output> {
    let targets = seasonality::read_targets(read(&a.targets)?.as_bytes())
        .map_err(|e| Error::Parse(format!("{}: {e}", a.targets.display())))?;
    let weights = seasonality::read_weights(read(&a.weights)?.as_bytes())
        .map_err(|e| Error::Parse(format!("{}: {e}", a.weights.display())))?;
    let opts = BootstrapOptions {
        points_per_year: a.points_per_year,
        nonnegative: a.nonnegative,
        ..BootstrapOptions::default()
    };
    let c = seasonality::bootstrap_curve(&targets, &weights, &opts)?;
    let mut buf = Vec::new();
    seasonality::write_curve(&mut buf, &c)?;
    let csv = String::from_utf8(buf).expect("ascii curve");
    let stderr = format!(
        "kkt_residual = {:e}\nconstraint_error = {:e}\nactive_set_iterations = {}\n",
        c.kkt_residual, c.constraint_error, c.iterations
    );
    Ok(match &a.out {
        Some(p) => {
            write_file(p, &csv)?;
            Output { stdout: String::new(), stderr }
        }
        None => Output { stdout: csv, stderr },
    })
}
