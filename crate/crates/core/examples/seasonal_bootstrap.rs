//! Bootstraps a monthly seasonal dividend curve from five annual futures,
//! with and without the sign constraint, then shifts the fixture model so
//! that it reprices the bootstrapped curve.

use polydiv::ljd::FourFactorParams;
use polydiv::pricing::PricingModel;
use polydiv::seasonality::{
    accrued_shift, bootstrap_curve, shifted_futures, shifted_strike, BootstrapOptions,
};

fn main() -> polydiv::Result<()> {
    let weights = [0.02, 0.03, 0.10, 0.20, 0.25, 0.15, 0.07, 0.05, 0.04, 0.03, 0.03, 0.03];
    let targets = [0.0216, 0.0202, 0.0193, 0.0186, 0.0181];

    for nonnegative in [false, true] {
        let opts = BootstrapOptions {
            nonnegative,
            ..BootstrapOptions::default()
        };
        let c = bootstrap_curve(&targets, &weights, &opts)?;
        let min = c.values.iter().copied().fold(f64::INFINITY, f64::min);
        println!(
            "nonnegative {nonnegative}: {} grid points, min f0 {min:.3e}, constraint error {:.1e}, kkt {:.1e}, {} active-set iterations",
            c.times.len(),
            c.constraint_error,
            c.kkt_residual,
            c.iterations
        );
    }

    let curve = bootstrap_curve(&targets, &weights, &BootstrapOptions::default())?;
    println!("\nfirst year, month by month");
    for (j, v) in curve.bucket_integrals().iter().take(12).enumerate() {
        println!("  month {:>2}: {v:.6}  (target {:.6})", j + 1, weights[j] * targets[0]);
    }

    let params = FourFactorParams::fixture();
    let model = PricingModel::new(params.to_spec()?)?;
    let x = params.x0.to_vec();
    println!("\nshifted model against the curve");
    for (t1, t2) in [(0.0, 0.25), (0.25, 0.5), (1.0, 2.0), (3.5, 4.0)] {
        let plain = model.dividend_futures(&x, 0.0, t1, t2)?;
        let shifted = shifted_futures(&model, &x, &curve, t1, t2)?;
        let shift = accrued_shift(&model, &x, &curve, t1, t2)?;
        let k = shifted_strike(&model, &x, &curve, t1, t2, shifted)?;
        println!(
            "  [{t1}, {t2}]  model {plain:.6}  curve {:.6}  shifted {shifted:.6}  shift {shift:+.6}  ATM strike for the unshifted model {k:.6}",
            curve.integral(t1, t2)?
        );
    }
    Ok(())
}
