//! Monte-Carlo estimates next to the closed forms: dividend futures and
//! forwards, a bond, the truncated stock price, and three options priced
//! with eight moments.
//!
//! `cargo run --release --example monte_carlo_check -- [paths]`

use polydiv::ljd::FourFactorParams;
use polydiv::maxent::{price_option, OptionKind, PayoffSpec};
use polydiv::mc::{estimate, truncated_stock, Quantity, SimConfig};
use polydiv::pricing::{PricingModel, SwapSchedule};

fn main() -> polydiv::Result<()> {
    let paths = std::env::args().nth(1).map_or(10_000, |s| s.parse().expect("path count"));
    let params = FourFactorParams::fixture();
    let model = PricingModel::new(params.to_spec()?)?;
    let x = params.x0.to_vec();

    let sched = SwapSchedule::regular(0.25, 10.0, 1.0)?;
    let options = [
        OptionKind::Swaption {
            strike: model.forward_swap_rate(&x, 0.0, &sched)?,
            schedule: sched,
        },
        OptionKind::DividendOption {
            t1: 1.0,
            t2: 2.0,
            strike: model.dividend_forward(&x, 0.0, 1.0, 2.0)?,
        },
        OptionKind::StockOption {
            expiry: 0.25,
            strike: model.stock_forward(&x, 0.0, 0.25)?,
        },
    ];
    let mut checks = vec![
        ("dividend futures [1,2]", Quantity::DividendFutures { t1: 1.0, t2: 2.0 }, model.dividend_futures(&x, 0.0, 1.0, 2.0)?),
        ("bond 5y", Quantity::Bond { maturity: 5.0 }, model.zero_coupon_bond(&x, 0.0, 5.0)?),
        ("dividend forward [1,2]", Quantity::DividendForward { t1: 1.0, t2: 2.0 }, model.dividend_forward(&x, 0.0, 1.0, 2.0)?),
        ("stock, 50y truncation", Quantity::FundamentalStock { truncation: 50.0 }, truncated_stock(&model, &x, 50.0)?.0),
    ];
    for (name, kind) in ["swaption 3m x 10y", "dividend option", "stock option 3m"].into_iter().zip(options) {
        let payoff = PayoffSpec::call(kind);
        let v = price_option(&model, &x, 0.0, &payoff, 8)?.value;
        checks.push((name, Quantity::Option(payoff), v));
    }

    println!("{:<24}{:>14}{:>14}{:>12}{:>8}{:>10}", "quantity", "closed form", "mc mean", "std err", "z", "var red");
    for (name, q, closed) in checks {
        let horizon = match &q {
            Quantity::DividendFutures { t2, .. } | Quantity::DividendForward { t2, .. } => *t2,
            Quantity::Bond { maturity } => *maturity,
            Quantity::FundamentalStock { truncation } => *truncation,
            Quantity::Option(p) => p.payment_date(),
            Quantity::Moment { expiry, .. } => *expiry,
        };
        let cfg = SimConfig {
            paths,
            horizon,
            ..SimConfig::default()
        };
        let e = estimate(&model, &x, &cfg, &q)?;
        let vr = e.variance_reduction.map_or(String::from("-"), |v| format!("{v:.2}"));
        println!(
            "{name:<24}{closed:>14.8}{:>14.8}{:>12.2e}{:>8.2}{vr:>10}",
            e.mean,
            e.std_error,
            e.z_score(closed)
        );
    }
    Ok(())
}
