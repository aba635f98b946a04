//! The smallest β keeping dividends positive, checked by simulation on both
//! sides, and the eigenvalues of `G_2` that decide whether the stock price
//! is finite.

use polydiv::ljd::{beta_lower_bound, g2_eigenvalues_closed_form, g2_eigenvalues_numeric, FourFactorParams};
use polydiv::mc::{negative_dividend_rates, SimConfig};

fn main() -> polydiv::Result<()> {
    let spec = FourFactorParams::fixture().to_spec()?;
    let bound = beta_lower_bound(&spec)?;
    println!("beta bound = {bound}");

    let cfg = SimConfig {
        paths: 2000,
        horizon: 10.0,
        ..SimConfig::default()
    };
    for beta in [bound + 1e-6, bound - 0.05] {
        let mut s = spec.clone();
        s.beta = beta;
        let (neg, obs) = negative_dividend_rates(&s, &cfg)?;
        println!("beta = {beta:.6}: {neg} negative dividend rates in {obs} observations");
    }

    let mut closed = g2_eigenvalues_closed_form(&spec)?;
    closed.sort_by(f64::total_cmp);
    let mut numeric: Vec<f64> = g2_eigenvalues_numeric(&spec)?.iter().map(|e| e.0).collect();
    numeric.sort_by(f64::total_cmp);
    println!("eigenvalues of G_2 (closed form vs numeric):");
    for (a, b) in closed.iter().zip(&numeric) {
        println!("  {a:>12.8} {b:>12.8}");
    }
    Ok(())
}
