//! Fits the four-factor model to noise-free quotes generated by the fixture,
//! starting from a perturbed point, and reports how far the fitted quotes
//! and parameters moved.
//!
//! `cargo run --release --example calibrate_round_trip -- [max_evals]`

use polydiv::calibration::{
    calibrate, error_table, model_values, write_error_table, CalibrationOptions, InstrumentQuote, QuoteKind,
    SimplexOptions,
};
use polydiv::ljd::FourFactorParams;

fn main() -> polydiv::Result<()> {
    let max_evaluations = std::env::args().nth(1).map_or(2000, |s| s.parse().expect("evaluation budget"));
    let truth = FourFactorParams::fixture();
    let q = InstrumentQuote::new;
    let mut quotes: Vec<InstrumentQuote> =
        (0..10).map(|i| q(QuoteKind::DivFuture, i as f64, i as f64 + 1.0, None, 0.0)).collect();
    for t in [1.0, 2.0, 3.0, 5.0, 7.0, 10.0] {
        quotes.push(q(QuoteKind::SwapRate, 0.0, t, None, 0.0));
    }
    for e in [1.0, 2.0, 5.0] {
        quotes.push(q(QuoteKind::SwaptionNormalVol, e, 5.0, None, 0.0));
    }
    quotes.push(q(QuoteKind::IndexLevel, 0.0, 0.0, None, 0.0));
    let values = model_values(&truth, &quotes, 4)?;
    for (q, v) in quotes.iter_mut().zip(values) {
        q.value = v;
    }

    let mut start = truth;
    start.kappa0_i *= 1.2;
    start.kappa1_i *= 0.85;
    start.kappa1_d *= 0.8;
    start.sigma_i *= 0.8;
    start.sigma_d *= 1.2;
    start.gamma += 0.005;
    start.x0[1] *= 0.95;

    let opts = CalibrationOptions {
        simplex: SimplexOptions {
            max_evaluations,
            ..SimplexOptions::default()
        },
        ..CalibrationOptions::default()
    };
    let fit = calibrate(&quotes, &start, &opts)?;
    println!(
        "objective {:.3e} after {} evaluations, {} iterations, converged {}",
        fit.objective, fit.evaluations, fit.iterations, fit.converged
    );
    println!("{:<10}{:>12}{:>12}{:>12}", "parameter", "truth", "start", "fitted");
    let rows = |p: &FourFactorParams| {
        [
            p.kappa0_i, p.kappa1_i, p.kappa0_d, p.kappa1_d, p.theta_d, p.sigma_i, p.sigma_d, p.rho, p.gamma,
            p.x0[0], p.x0[1], p.x0[3],
        ]
    };
    let names = ["k0i", "k1i", "k0d", "k1d", "thetaD", "sigmaI", "sigmaD", "rho", "gamma", "x0I", "x1I", "x1D"];
    for (i, name) in names.iter().enumerate() {
        println!("{name:<10}{:>12.5}{:>12.5}{:>12.5}", rows(&truth)[i], rows(&start)[i], rows(&fit.params)[i]);
    }
    println!();
    write_error_table(std::io::stdout().lock(), &error_table(&fit.errors))
}
