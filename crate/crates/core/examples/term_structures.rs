//! Closed-form term structures of the four-factor fixture: dividend
//! futures and forwards, zero-coupon bonds, par swap rates, the fundamental
//! stock price and its duration.

use polydiv::ljd::FourFactorParams;
use polydiv::pricing::{PricingModel, SwapSchedule};

fn main() -> polydiv::Result<()> {
    let params = FourFactorParams::fixture();
    let model = PricingModel::new(params.to_spec()?)?;
    let x = params.x0.to_vec();

    println!("year,futures,forward,bond,swap_rate");
    for i in 1..=10 {
        let (t1, t2) = ((i - 1) as f64, i as f64);
        let fut = model.dividend_futures(&x, 0.0, t1, t2)?;
        let fwd = model.dividend_forward(&x, 0.0, t1, t2)?;
        let bond = model.zero_coupon_bond(&x, 0.0, t2)?;
        let swap = model.forward_swap_rate(&x, 0.0, &SwapSchedule::regular(0.0, t2, 1.0)?)?;
        println!("{i},{fut:.8},{fwd:.8},{bond:.8},{swap:.8}");
    }
    println!();
    println!("short rate     {:.6}", model.short_rate(&x)?);
    println!("dividend rate  {:.6}", model.dividend_rate(&x, 0.0)?);
    println!("stock price    {:.6}", model.fundamental_stock(&x, 0.0)?);
    println!("duration       {:.4} years", model.stock_duration(&x)?);
    Ok(())
}
