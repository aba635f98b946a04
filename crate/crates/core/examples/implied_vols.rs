//! Quotes the fixture's option prices as implied volatilities: Bachelier for
//! swaptions, Black for dividend and stock options, across a strike ladder
//! around the forward.

use polydiv::calibration::{implied_black_vol, implied_normal_vol};
use polydiv::ljd::FourFactorParams;
use polydiv::maxent::{price_option, OptionKind, PayoffSpec};
use polydiv::pricing::{PricingModel, SwapSchedule};

fn main() -> polydiv::Result<()> {
    let params = FourFactorParams::fixture();
    let model = PricingModel::new(params.to_spec()?)?;
    let x = params.x0.to_vec();
    let moneyness = [0.8, 0.9, 1.0, 1.1, 1.2];

    let sched = SwapSchedule::regular(1.0, 5.0, 1.0)?;
    let fwd = model.forward_swap_rate(&x, 0.0, &sched)?;
    let annuity = model.annuity(&x, 0.0, &sched)?;
    println!("1y x 5y swaption, forward {fwd:.5}");
    for m in moneyness {
        let strike = fwd * m;
        let kind = OptionKind::Swaption { schedule: sched.clone(), strike };
        let p = price_option(&model, &x, 0.0, &PayoffSpec::call(kind), 6)?.value;
        let vol = implied_normal_vol(p, fwd, strike, 1.0, annuity, true)?;
        println!("  K {strike:.5}  price {p:.6e}  normal vol {:.2} bp", vol * 1e4);
    }

    let fwd = model.dividend_forward(&x, 0.0, 1.0, 2.0)?;
    let df = model.zero_coupon_bond(&x, 0.0, 2.0)?;
    println!("dividends over [1, 2], forward {fwd:.5}");
    for m in moneyness {
        let strike = fwd * m;
        let kind = OptionKind::DividendOption { t1: 1.0, t2: 2.0, strike };
        let p = price_option(&model, &x, 0.0, &PayoffSpec::call(kind), 6)?.value;
        let vol = implied_black_vol(p, fwd, strike, 2.0, df, true)?;
        println!("  K {strike:.5}  price {p:.6e}  Black vol {:.2}%", vol * 100.0);
    }

    let fwd = model.stock_forward(&x, 0.0, 0.5)?;
    let df = model.zero_coupon_bond(&x, 0.0, 0.5)?;
    println!("stock, 6m expiry, forward {fwd:.5}");
    for m in moneyness {
        let strike = fwd * m;
        let kind = OptionKind::StockOption { expiry: 0.5, strike };
        let p = price_option(&model, &x, 0.0, &PayoffSpec::call(kind), 6)?.value;
        let vol = implied_black_vol(p, fwd, strike, 0.5, df, true)?;
        println!("  K {strike:.5}  price {p:.6e}  Black vol {:.2}%", vol * 100.0);
    }
    Ok(())
}
