//! Least-squares calibration of the four-factor model to market quotes.
//!
//! The free parameters are `κ0^I, κ1^I, κ0^D, κ1^D, θ^D, σ^I, σ^D, ρ, γ` and
//! the initial state `X0^I, X1^I, X1^D`; `θ^I = 1` and `X0^D = 1` are fixed.
//! The simplex works on `ln` of the positive parameters, `atanh ρ` and `10γ`.
//! The finiteness condition on `γ` is enforced by a penalty.

mod quotes;
mod simplex;
mod vol;

use std::io::Write;

use rayon::prelude::*;
use statrs::statistics::{Data, Median, Statistics};

pub use quotes::{read_quotes, write_quotes, InstrumentQuote, QuoteKind, QUOTE_HEADER};
pub use simplex::{nelder_mead, Minimum, SimplexOptions};
pub use vol::{
    bachelier_price, black_price, implied_black_vol, implied_normal_vol, interpolate_total_variance,
};

use crate::error::{Error, Result};
use crate::ljd::FourFactorParams;
use crate::maxent::{price_option, OptionKind, PayoffSpec};
use crate::pricing::{PricingModel, SwapSchedule};

/// Objective value assigned to parameters that are invalid or cannot price
/// every quote.
pub const PENALTY: f64 = 1e12;

/// Number of free parameters.
pub const FREE_PARAMETERS: usize = 12;

const GAMMA_SCALE: f64 = 0.1;

/// Maps parameters to the unconstrained simplex coordinates.
pub fn to_free(p: &FourFactorParams) -> Vec<f64> {
    vec![
        p.kappa0_i.ln(),
        p.kappa1_i.ln(),
        p.kappa0_d.ln(),
        p.kappa1_d.ln(),
        p.theta_d.ln(),
        p.sigma_i.ln(),
        p.sigma_d.ln(),
        p.rho.clamp(-1.0 + 1e-15, 1.0 - 1e-15).atanh(),
        p.gamma / GAMMA_SCALE,
        p.x0[0].ln(),
        p.x0[1].ln(),
        p.x0[3].ln(),
    ]
}

/// Inverse of [`to_free`]; `X0^D` is set to 1.
pub fn from_free(u: &[f64]) -> FourFactorParams {
    FourFactorParams {
        kappa0_i: u[0].exp(),
        kappa1_i: u[1].exp(),
        kappa0_d: u[2].exp(),
        kappa1_d: u[3].exp(),
        theta_d: u[4].exp(),
        sigma_i: u[5].exp(),
        sigma_d: u[6].exp(),
        rho: u[7].tanh(),
        gamma: u[8] * GAMMA_SCALE,
        x0: [u[9].exp(), u[10].exp(), 1.0, u[11].exp()],
    }
}

fn schedule(q: &InstrumentQuote) -> Result<SwapSchedule> {
    SwapSchedule::regular(q.expiry, q.tenor_or_t2, 1.0)
}

/// Model value of one quote in its quoting convention.
///
/// Options are priced with `n` moments and converted with:
/// swaptions, Bachelier on the forward swap rate with the annuity;
/// dividend options, Black on the dividend forward with `P(0, T2)` and
/// maturity `T2`; stock options, Black on the stock forward with `P(0, T)`.
/// A missing strike means at the money forward.
pub fn model_value(model: &PricingModel, x: &[f64], q: &InstrumentQuote, n: usize) -> Result<f64> {
    let (t1, t2) = (q.expiry, q.tenor_or_t2);
    match q.kind {
        QuoteKind::DivFuture => model.dividend_futures(x, 0.0, t1, t2),
        QuoteKind::SwapRate => model.forward_swap_rate(x, 0.0, &schedule(q)?),
        QuoteKind::IndexLevel => model.fundamental_stock(x, 0.0),
        QuoteKind::SwaptionNormalVol => {
            let sched = schedule(q)?;
            let f = model.forward_swap_rate(x, 0.0, &sched)?;
            let a = model.annuity(x, 0.0, &sched)?;
            let k = q.strike.unwrap_or(f);
            let kind = OptionKind::Swaption { schedule: sched, strike: k };
            let price = price_option(model, x, 0.0, &PayoffSpec::call(kind), n)?.value;
            implied_normal_vol(price, f, k, t1, a, true)
        }
        QuoteKind::DivOptionBlackVol => {
            let f = model.dividend_forward(x, 0.0, t1, t2)?;
            let df = model.zero_coupon_bond(x, 0.0, t2)?;
            let k = q.strike.unwrap_or(f);
            let kind = OptionKind::DividendOption { t1, t2, strike: k };
            let price = price_option(model, x, 0.0, &PayoffSpec::call(kind), n)?.value;
            implied_black_vol(price, f, k, t2, df, true)
        }
        QuoteKind::StockOptionBsVol => {
            let f = model.stock_forward(x, 0.0, t1)?;
            let df = model.zero_coupon_bond(x, 0.0, t1)?;
            let k = q.strike.unwrap_or(f);
            let kind = OptionKind::StockOption { expiry: t1, strike: k };
            let price = price_option(model, x, 0.0, &PayoffSpec::call(kind), n)?.value;
            implied_black_vol(price, f, k, t1, df, true)
        }
    }
}

/// Model values of all quotes under `params`.
pub fn model_values(params: &FourFactorParams, quotes: &[InstrumentQuote], n: usize) -> Result<Vec<f64>> {
    let model = PricingModel::new(params.to_spec()?)?;
    let x = params.x0.to_vec();
    quotes.par_iter().map(|q| model_value(&model, &x, q, n)).collect()
}

/// `Σ w_i (model_i − quote_i)²`, or [`PENALTY`] if the parameters are
/// invalid or some quote cannot be priced.
pub fn objective(params: &FourFactorParams, quotes: &[InstrumentQuote], n: usize) -> f64 {
    match model_values(params, quotes, n) {
        Ok(v) => {
            let s: f64 = quotes
                .iter()
                .zip(&v)
                .map(|(q, m)| q.effective_weight() * (m - q.value).powi(2))
                .sum();
            if s.is_finite() {
                s.min(PENALTY)
            } else {
                PENALTY
            }
        }
        Err(_) => PENALTY,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationOptions {
    /// Moments matched when pricing options.
    pub moments: usize,
    /// Initial simplex edge in free coordinates.
    pub step: f64,
    pub simplex: SimplexOptions,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        CalibrationOptions {
            moments: 4,
            step: 0.1,
            simplex: SimplexOptions::default(),
        }
    }
}

/// Fit error of one quote.
#[derive(Debug, Clone, PartialEq)]
pub struct QuoteError {
    pub kind: QuoteKind,
    pub quote: f64,
    pub model: f64,
    /// `|model − quote|` in the class unit (bp, vol points or price).
    pub abs_error: f64,
    /// `|model − quote| / |quote|`.
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationResult {
    pub params: FourFactorParams,
    pub objective: f64,
    pub errors: Vec<QuoteError>,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Best objective after each simplex iteration.
    pub trace: Vec<f64>,
}

/// Per-quote errors of `params`.
pub fn quote_errors(params: &FourFactorParams, quotes: &[InstrumentQuote], n: usize) -> Result<Vec<QuoteError>> {
    let values = model_values(params, quotes, n)?;
    Ok(quotes
        .iter()
        .zip(values)
        .map(|(q, m)| QuoteError {
            kind: q.kind,
            quote: q.value,
            model: m,
            abs_error: (m - q.value).abs() / q.kind.unit(),
            rel_error: (m - q.value).abs() / q.value.abs(),
        })
        .collect())
}

/// Fits the parameters starting from `initial` (for example the previous
/// date's result).
pub fn calibrate(
    quotes: &[InstrumentQuote],
    initial: &FourFactorParams,
    opts: &CalibrationOptions,
) -> Result<CalibrationResult> {
    for q in quotes {
        q.check()?;
    }
    let effective = quotes.iter().filter(|q| q.effective_weight() > 0.0).count();
    if effective < FREE_PARAMETERS {
        return Err(Error::InvalidArgument(format!(
            "{effective} weighted quotes for {FREE_PARAMETERS} free parameters"
        )));
    }
    let mut start = *initial;
    start.x0[2] = 1.0;
    start.to_spec()?;
    let n = opts.moments;
    if objective(&start, quotes, n) >= PENALTY {
        let reason = model_values(&start, quotes, n).err().map_or("objective overflow".into(), |e| e.to_string());
        return Err(Error::InvalidModel(format!("initial point cannot price the quotes: {reason}")));
    }
    let u0 = to_free(&start);
    let steps = vec![opts.step; u0.len()];
    let m = nelder_mead(|u| objective(&from_free(u), quotes, n), &u0, &steps, &opts.simplex);
    let params = from_free(&m.x);
    Ok(CalibrationResult {
        params,
        objective: m.value,
        errors: quote_errors(&params, quotes, n)?,
        evaluations: m.evaluations,
        iterations: m.iterations,
        converged: m.converged,
        trace: m.trace,
    })
}

/// Summary statistics of one error measure over one instrument class.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorStats {
    pub kind: QuoteKind,
    /// `AE` or `ARE`.
    pub measure: &'static str,
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub max: f64,
}

/// AE and ARE statistics per quoted class, in class order.
pub fn error_table(errors: &[QuoteError]) -> Vec<ErrorStats> {
    let mut out = Vec::new();
    for kind in QuoteKind::ALL {
        let sel: Vec<&QuoteError> = errors.iter().filter(|e| e.kind == kind).collect();
        if sel.is_empty() {
            continue;
        }
        for measure in ["AE", "ARE"] {
            let v: Vec<f64> = sel
                .iter()
                .map(|e| if measure == "AE" { e.abs_error } else { e.rel_error })
                .collect();
            let std = if v.len() > 1 { v.iter().std_dev() } else { 0.0 };
            out.push(ErrorStats {
                kind,
                measure,
                count: v.len(),
                mean: v.iter().mean(),
                median: Data::new(v.clone()).median(),
                std,
                max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            });
        }
    }
    out
}

/// CSV `kind,measure,unit,count,Mean,Median,Std,Max`; AE is in bp for rates
/// and normal vols, vol points for Black vols, price units otherwise; ARE
/// is a fraction.
pub fn write_error_table<W: Write>(mut w: W, table: &[ErrorStats]) -> Result<()> {
    writeln!(w, "kind,measure,unit,count,Mean,Median,Std,Max")?;
    for s in table {
        let unit = match (s.measure, s.kind) {
            ("ARE", _) => "fraction",
            (_, QuoteKind::SwapRate | QuoteKind::SwaptionNormalVol) => "bp",
            (_, QuoteKind::DivOptionBlackVol | QuoteKind::StockOptionBsVol) => "vol_pt",
            _ => "price",
        };
        writeln!(
            w,
            "{},{},{unit},{},{:?},{:?},{:?},{:?}",
            s.kind, s.measure, s.count, s.mean, s.median, s.std, s.max
        )?;
    }
    Ok(())
}
