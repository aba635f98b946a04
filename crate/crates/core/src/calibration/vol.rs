//! Black and Bachelier quote conventions and their inverses.

use statrs::function::erf::erfc;

use crate::error::{Error, Result};

const VOL_TOL: f64 = 1e-10;

fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Black price `df·[F Φ(d1) − K Φ(d2)]` of a call (or the put by parity).
pub fn black_price(forward: f64, strike: f64, vol: f64, expiry: f64, df: f64, call: bool) -> f64 {
    let intrinsic = if call { forward - strike } else { strike - forward };
    let sd = vol * expiry.sqrt();
    if sd <= 0.0 || strike <= 0.0 {
        return df * intrinsic.max(0.0);
    }
    let d1 = ((forward / strike).ln() + 0.5 * sd * sd) / sd;
    let d2 = d1 - sd;
    let c = forward * norm_cdf(d1) - strike * norm_cdf(d2);
    df * if call { c } else { c - forward + strike }
}

/// Bachelier price `A·[(F−K)Φ(d) + σ√T φ(d)]` of a payer (or receiver).
pub fn bachelier_price(forward: f64, strike: f64, vol: f64, expiry: f64, annuity: f64, call: bool) -> f64 {
    let m = if call { forward - strike } else { strike - forward };
    let sd = vol * expiry.sqrt();
    if sd <= 0.0 {
        return annuity * m.max(0.0);
    }
    let d = m / sd;
    annuity * (m * norm_cdf(d) + sd * norm_pdf(d))
}

fn black_vega(forward: f64, strike: f64, vol: f64, expiry: f64, df: f64) -> f64 {
    let sd = vol * expiry.sqrt();
    if sd <= 0.0 {
        return 0.0;
    }
    let d1 = ((forward / strike).ln() + 0.5 * sd * sd) / sd;
    df * forward * norm_pdf(d1) * expiry.sqrt()
}

fn bachelier_vega(forward: f64, strike: f64, vol: f64, expiry: f64, annuity: f64) -> f64 {
    let sd = vol * expiry.sqrt();
    if sd <= 0.0 {
        return 0.0;
    }
    annuity * norm_pdf((forward - strike) / sd) * expiry.sqrt()
}

/// Solves `price(σ) = target` for increasing `price`: bracket, bisect, then
/// polish with Newton steps that stay inside the bracket.
fn invert(
    target: f64,
    lower_price: f64,
    start_hi: f64,
    price: impl Fn(f64) -> f64,
    vega: impl Fn(f64) -> f64,
) -> Result<f64> {
    let scale = target.abs().max(f64::MIN_POSITIVE);
    if target - lower_price <= 1e-14 * scale {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, start_hi);
    let mut doublings = 0;
    while price(hi) < target {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::NoArbitrage {
                price: target,
                bound: "no finite volatility reproduces the price".into(),
            });
        }
    }
    while hi - lo > 1e-6 * hi.max(1e-12) {
        let mid = 0.5 * (lo + hi);
        if price(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut v = 0.5 * (lo + hi);
    for _ in 0..50 {
        let f = price(v) - target;
        if f < 0.0 {
            lo = v;
        } else {
            hi = v;
        }
        let g = vega(v);
        let mut next = if g > 0.0 { v - f / g } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let done = (next - v).abs() <= VOL_TOL * 1e-2 * v.max(1.0) || hi - lo <= VOL_TOL * 1e-2;
        v = next;
        if done {
            break;
        }
    }
    Ok(v)
}

/// Black implied volatility. Errors if the price is outside the band
/// `(df·(F−K)⁺, df·F)` for calls, `(df·(K−F)⁺, df·K)` for puts.
pub fn implied_black_vol(price: f64, forward: f64, strike: f64, expiry: f64, df: f64, call: bool) -> Result<f64> {
    if !(forward > 0.0 && strike > 0.0 && expiry > 0.0 && df > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Black inputs need positive forward, strike, expiry and discount (F={forward}, K={strike}, T={expiry}, df={df})"
        )));
    }
    let intrinsic = df * if call { forward - strike } else { strike - forward }.max(0.0);
    let upper = df * if call { forward } else { strike };
    let tol = 1e-12 * upper;
    if !price.is_finite() || price < intrinsic - tol {
        return Err(Error::NoArbitrage {
            price,
            bound: format!("below intrinsic value {intrinsic}"),
        });
    }
    if price >= upper {
        return Err(Error::NoArbitrage {
            price,
            bound: format!("at or above the upper bound {upper}"),
        });
    }
    invert(
        price,
        intrinsic,
        0.5,
        |v| black_price(forward, strike, v, expiry, df, call),
        |v| black_vega(forward, strike, v, expiry, df),
    )
}

/// Bachelier (normal) implied volatility. Errors below intrinsic value.
pub fn implied_normal_vol(price: f64, forward: f64, strike: f64, expiry: f64, annuity: f64, call: bool) -> Result<f64> {
    if !(expiry > 0.0 && annuity > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Bachelier inputs need positive expiry and annuity (T={expiry}, A={annuity})"
        )));
    }
    let intrinsic = annuity * if call { forward - strike } else { strike - forward }.max(0.0);
    if !price.is_finite() || price < intrinsic - 1e-12 * annuity * (forward.abs() + strike.abs()).max(1e-4) {
        return Err(Error::NoArbitrage {
            price,
            bound: format!("below intrinsic value {intrinsic}"),
        });
    }
    let start = ((forward - strike).abs() + 0.01) / expiry.sqrt();
    invert(
        price,
        intrinsic,
        start,
        |v| bachelier_price(forward, strike, v, expiry, annuity, call),
        |v| bachelier_vega(forward, strike, v, expiry, annuity),
    )
}

/// Linear interpolation in total variance `σ²τ` between quoted expiries,
/// flat extrapolation of the volatility outside.
pub fn interpolate_total_variance(expiries: &[f64], vols: &[f64], t: f64) -> Result<f64> {
    if expiries.is_empty() || expiries.len() != vols.len() {
        return Err(Error::InvalidArgument("need matching, non-empty expiries and vols".into()));
    }
    if expiries.windows(2).any(|w| !(w[0] < w[1])) || expiries[0] <= 0.0 {
        return Err(Error::InvalidArgument("expiries must be positive and increasing".into()));
    }
    if t <= expiries[0] {
        return Ok(vols[0]);
    }
    let last = expiries.len() - 1;
    if t >= expiries[last] {
        return Ok(vols[last]);
    }
    let k = expiries.partition_point(|&e| e <= t) - 1;
    let (t0, t1) = (expiries[k], expiries[k + 1]);
    let (w0, w1) = (vols[k] * vols[k] * t0, vols[k + 1] * vols[k + 1] * t1);
    let w = w0 + (w1 - w0) * (t - t0) / (t1 - t0);
    Ok((w / t).sqrt())
}
