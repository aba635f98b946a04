//! Maximum-entropy option prices for moment orders 2 to 8 on the four-factor
//! fixture, at-the-money forward strikes.

use polydiv::ljd::FourFactorParams;
use polydiv::maxent::{price_option, OptionKind, PayoffSpec};
use polydiv::pricing::{PricingModel, SwapSchedule};

fn main() -> polydiv::Result<()> {
    let params = FourFactorParams::fixture();
    let model = PricingModel::new(params.to_spec()?)?;
    let x = params.x0.to_vec();

    let sched = SwapSchedule::regular(0.25, 10.0, 1.0)?;
    let swap_rate = model.forward_swap_rate(&x, 0.0, &sched)?;
    let div_fwd = model.dividend_forward(&x, 0.0, 1.0, 2.0)?;
    let stock_fwd = model.stock_forward(&x, 0.0, 0.25)?;
    let options = [
        ("swaption 3m x 10y", OptionKind::Swaption { schedule: sched, strike: swap_rate }),
        ("dividend option 2y", OptionKind::DividendOption { t1: 1.0, t2: 2.0, strike: div_fwd }),
        ("stock option 3m", OptionKind::StockOption { expiry: 0.25, strike: stock_fwd }),
    ];
    for (name, kind) in options {
        let payoff = PayoffSpec::call(kind);
        print!("{name:<20}");
        for n in 2..=8 {
            match price_option(&model, &x, 0.0, &payoff, n) {
                Ok(r) => print!(" N={n}: {:.8}", r.value),
                Err(e) => print!(" N={n}: {e}"),
            }
        }
        println!();
    }
    Ok(())
}
