//! Monte Carlo oracle: Euler paths of the factor process and path-wise
//! estimates of every priced quantity, with standard errors.
//!
//! Paths start at time 0 from the given state; instrument dates are absolute
//! and inserted into the weekly grid exactly. Path `i` always draws from its
//! own random stream, and per-path results are reduced in path order, so
//! estimates do not depend on the number of threads.

mod path;

pub use path::{path_rng, run_path, simulate_paths, time_grid, PathBundle, Stepper};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ljd::{build_generator, ModelSpec};
use crate::maxent::{payoff_moments, stock_option_variable, swaption_variable, OptionKind, PayoffSpec};
use crate::poly::{Basis, Poly};
use crate::pricing::PricingModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub paths: usize,
    /// Euler step in years.
    pub step: f64,
    pub horizon: f64,
    pub seed: u64,
    pub control_variate: bool,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            paths: 100_000,
            step: 1.0 / 52.0,
            horizon: 1.0,
            seed: 42,
            control_variate: true,
            threads: None,
        }
    }
}

impl SimConfig {
    fn check(&self) -> Result<()> {
        if self.paths == 0 {
            return Err(Error::InvalidArgument("need at least one path".into()));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidArgument(format!("step must be positive, got {}", self.step)));
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidArgument(format!("invalid horizon {}", self.horizon)));
        }
        Ok(())
    }

    fn run<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.threads {
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build()
                    .map_err(|e| Error::InvalidArgument(e.to_string()))?;
                Ok(pool.install(f))
            }
            None => Ok(f()),
        }
    }

    fn require(&self, maturity: f64) -> Result<()> {
        if maturity > self.horizon + 1e-12 {
            return Err(Error::HorizonTooShort {
                horizon: self.horizon,
                maturity,
            });
        }
        Ok(())
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub paths: usize,
    /// Standard error without the control variate.
    pub plain_std_error: f64,
    /// `Var(plain) / Var(adjusted)` when a control variate was used.
    pub variance_reduction: Option<f64>,
    /// Discounted value beyond the truncation horizon, for `S*`.
    pub truncation_tail: Option<f64>,
}

impl Estimate {
    pub fn ci95(&self) -> (f64, f64) {
        (self.mean - 1.96 * self.std_error, self.mean + 1.96 * self.std_error)
    }

    /// `|value − mean|` in standard errors.
    pub fn z_score(&self, value: f64) -> f64 {
        if self.std_error == 0.0 {
            return if value == self.mean { 0.0 } else { f64::INFINITY };
        }
        (value - self.mean).abs() / self.std_error
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn variance(v: &[f64], m: f64) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64
}

/// Plain estimate, or control-variate estimate when `control` is given as
/// per-path control values with their known mean.
pub fn summarize(y: &[f64], control: Option<(&[f64], f64)>) -> Estimate {
    let n = y.len();
    let my = mean(y);
    let vy = variance(y, my);
    let plain = (vy / n as f64).sqrt();
    let Some((c, c_mean)) = control else {
        return Estimate {
            mean: my,
            std_error: plain,
            paths: n,
            plain_std_error: plain,
            variance_reduction: None,
            truncation_tail: None,
        };
    };
    let mc = mean(c);
    let vc = variance(c, mc);
    let cov = if n > 1 {
        y.iter().zip(c).map(|(a, b)| (a - my) * (b - mc)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    let beta = if vc > 0.0 { cov / vc } else { 0.0 };
    let adj: Vec<f64> = y.iter().zip(c).map(|(a, b)| a - beta * (b - c_mean)).collect();
    let ma = mean(&adj);
    let va = variance(&adj, ma);
    Estimate {
        mean: ma,
        std_error: (va / n as f64).sqrt(),
        paths: n,
        plain_std_error: plain,
        variance_reduction: (va > 0.0).then(|| vy / va),
        truncation_tail: None,
    }
}

/// `Σa / Σb` with a delta-method standard error.
pub fn summarize_ratio(a: &[f64], b: &[f64]) -> Estimate {
    let n = a.len();
    let mb = mean(b);
    let r = mean(a) / mb;
    let resid: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - r * y) / mb).collect();
    let se = (variance(&resid, mean(&resid)) / n as f64).sqrt();
    Estimate {
        mean: r,
        std_error: se,
        paths: n,
        plain_std_error: se,
        variance_reduction: None,
        truncation_tail: None,
    }
}

/// Applies `f` to the states at `dates` on every path. Results come back in
/// path order.
pub fn sample_at_dates<T: Send>(
    spec: &ModelSpec,
    x0: &[f64],
    cfg: &SimConfig,
    dates: &[f64],
    f: impl Fn(&[Vec<f64>]) -> T + Sync + Send,
) -> Result<Vec<T>> {
    cfg.check()?;
    for &d in dates {
        if d < 0.0 {
            return Err(Error::InvalidDates(format!("date {d} before the simulation start")));
        }
        cfg.require(d)?;
    }
    let end = dates.iter().copied().fold(0.0, f64::max);
    let grid = time_grid(cfg.step, end, dates);
    let idx: Vec<usize> = dates
        .iter()
        .map(|&d| grid.iter().position(|&t| (t - d).abs() <= 1e-12 * (1.0 + d)).unwrap())
        .collect();
    cfg.run(|| {
        (0..cfg.paths)
            .into_par_iter()
            .map(|p| {
                let mut at = vec![Vec::new(); dates.len()];
                run_path(spec, x0, &grid, cfg.seed, p, &mut |k, _, x| {
                    for (slot, &i) in at.iter_mut().zip(&idx) {
                        if i == k {
                            *slot = x.to_vec();
                        }
                    }
                });
                f(&at)
            })
            .collect()
    })
}

/// `aᵀH_1(x)`.
fn affine(a: &[f64], x: &[f64]) -> f64 {
    a[0] + a[1..].iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Quantities the oracle can estimate.
#[derive(Debug, Clone, PartialEq)]
pub enum Quantity {
    /// `C_{T2} − C_{T1}`.
    DividendFutures { t1: f64, t2: f64 },
    /// `ζ_T / ζ_0`.
    Bond { maturity: f64 },
    /// `E[ζ_{T2}(C_{T2} − C_{T1})] / E[ζ_{T2}]`.
    DividendForward { t1: f64, t2: f64 },
    /// `(1/ζ_0) ∫_0^H ζ_s D_s ds` with `H = truncation`.
    FundamentalStock { truncation: f64 },
    /// Discounted option payoff; the control variate is the discounted
    /// underlying forward value.
    Option(PayoffSpec),
    /// `E[p(X_T)]`.
    Moment { expiry: f64, poly: Poly },
}

/// Closed-form value of `(1/ζ_0) E[∫_0^H ζ_s D_s ds]`: the stock price less
/// the discounted value of the stock at `H`.
pub fn truncated_stock(model: &PricingModel, x: &[f64], truncation: f64) -> Result<(f64, f64)> {
    let spec = model.spec();
    let full = model.fundamental_stock(x, 0.0)?;
    let w = &model.stock_coordinates()?.w;
    let m = model.expected_h2(x, truncation)?;
    let tail = ((spec.beta - spec.gamma) * truncation).exp() * dot(w, m.as_slice()) / affine(&spec.q, x);
    Ok((full - tail, tail))
}

/// Monte Carlo estimate of `q` for the model started at `x` at time 0.
pub fn estimate(model: &PricingModel, x: &[f64], cfg: &SimConfig, q: &Quantity) -> Result<Estimate> {
    let spec = model.spec();
    let beta = spec.beta;
    let gamma = spec.gamma;
    let p = spec.p.clone();
    let qv = spec.q.clone();
    let zeta0 = affine(&qv, x);
    let cum = move |t: f64, x: &[f64]| (beta * t).exp() * affine(&p, x);
    match q {
        Quantity::DividendFutures { t1, t2 } => {
            let (t1, t2) = (*t1, *t2);
            let y = sample_at_dates(spec, x, cfg, &[t1, t2], |s| cum(t2, &s[1]) - cum(t1, &s[0]))?;
            Ok(summarize(&y, None))
        }
        Quantity::Bond { maturity } => {
            let t = *maturity;
            let y = sample_at_dates(spec, x, cfg, &[t], |s| (-gamma * t).exp() * affine(&qv, &s[0]) / zeta0)?;
            Ok(summarize(&y, None))
        }
        Quantity::DividendForward { t1, t2 } => {
            let (t1, t2) = (*t1, *t2);
            let ab = sample_at_dates(spec, x, cfg, &[t1, t2], |s| {
                let z = affine(&qv, &s[1]);
                (z * (cum(t2, &s[1]) - cum(t1, &s[0])), z)
            })?;
            let (a, b): (Vec<f64>, Vec<f64>) = ab.into_iter().unzip();
            Ok(summarize_ratio(&a, &b))
        }
        Quantity::Moment { expiry, poly } => {
            if poly.vars() != spec.dim() {
                return Err(Error::Dimension("moment polynomial in the wrong number of variables".into()));
            }
            let y = sample_at_dates(spec, x, cfg, &[*expiry], |s| poly.eval(&s[0]))?;
            Ok(summarize(&y, None))
        }
        Quantity::FundamentalStock { truncation } => stock_estimate(model, x, cfg, *truncation),
        Quantity::Option(payoff) => option_estimate(model, x, cfg, payoff),
    }
}

fn stock_estimate(model: &PricingModel, x: &[f64], cfg: &SimConfig, horizon: f64) -> Result<Estimate> {
    cfg.check()?;
    cfg.require(horizon)?;
    let spec = model.spec();
    let rate = model.dividend_rate_loading();
    let (beta, gamma) = (spec.beta, spec.gamma);
    let q = spec.q.clone();
    let zeta0 = affine(&q, x);
    let grid = time_grid(cfg.step, horizon, &[]);
    let y: Vec<f64> = cfg.run(|| {
        (0..cfg.paths)
            .into_par_iter()
            .map(|path| {
                let mut acc = 0.0;
                let mut prev: Option<(f64, f64)> = None;
                run_path(spec, x, &grid, cfg.seed, path, &mut |_, t, s| {
                    let v = ((beta - gamma) * t).exp() * affine(&q, s) * affine(&rate, s);
                    if let Some((t0, v0)) = prev {
                        acc += 0.5 * (t - t0) * (v + v0);
                    }
                    prev = Some((t, v));
                });
                acc / zeta0
            })
            .collect()
    })?;
    let mut e = summarize(&y, None);
    e.truncation_tail = Some(truncated_stock(model, x, horizon)?.1);
    Ok(e)
}

fn option_estimate(model: &PricingModel, x: &[f64], cfg: &SimConfig, payoff: &PayoffSpec) -> Result<Estimate> {
    let spec = model.spec();
    let pay = payoff.payment_date();
    let prefactor = model.discount_prefactor(x, 0.0, pay)?;
    let transform = payoff.transform;
    let samples: Vec<(f64, f64)> = match &payoff.kind {
        OptionKind::DividendOption { t1, t2, strike } => {
            let (t1, t2, k) = (*t1, *t2, *strike);
            let (beta, p, q) = (spec.beta, spec.p.clone(), spec.q.clone());
            sample_at_dates(spec, x, cfg, &[t1, t2], |s| {
                let c2 = (beta * t2).exp() * affine(&p, &s[1]);
                let c1 = (beta * t1).exp() * affine(&p, &s[0]);
                let y = affine(&q, &s[1]) * (c2 - c1 - k);
                (prefactor * transform.apply(y), prefactor * y)
            })?
        }
        kind => {
            let (expiry, g) = match kind {
                OptionKind::Swaption { schedule, strike } => {
                    (schedule.reset(), swaption_variable(model, schedule, *strike)?)
                }
                OptionKind::StockOption { expiry, strike } => {
                    (*expiry, stock_option_variable(model, *expiry, *strike)?)
                }
                OptionKind::Generic { expiry, g } => (*expiry, g.clone()),
                OptionKind::DividendOption { .. } => unreachable!(),
            };
            let basis = Basis::new(spec.dim(), g.degree());
            sample_at_dates(spec, x, cfg, &[expiry], |s| {
                let y = g.pair(&basis.evaluate(&s[0]));
                (prefactor * transform.apply(y), prefactor * y)
            })?
        }
    };
    let (y, c): (Vec<f64>, Vec<f64>) = samples.into_iter().unzip();
    if !cfg.control_variate {
        return Ok(summarize(&y, None));
    }
    let forward = payoff_moments(model, x, 0.0, payoff, 1)?;
    Ok(summarize(&y, Some((&c, forward.prefactor * forward.mean()))))
}

/// Number of negative dividend-rate observations over all grid points of
/// all paths, and the number of observations.
pub fn negative_dividend_rates(spec: &ModelSpec, cfg: &SimConfig) -> Result<(usize, usize)> {
    cfg.check()?;
    let g1 = build_generator(spec, 1)?.dense();
    let d = spec.dim();
    let rate: Vec<f64> = (0..=d)
        .map(|j| (0..=d).map(|i| g1[(i, j)] * spec.p[i]).sum::<f64>() + spec.beta * spec.p[j])
        .collect();
    let grid = time_grid(cfg.step, cfg.horizon, &[]);
    let counts: Vec<usize> = cfg.run(|| {
        (0..cfg.paths)
            .into_par_iter()
            .map(|path| {
                let mut neg = 0;
                run_path(spec, &spec.x0, &grid, cfg.seed, path, &mut |_, _, s| {
                    if affine(&rate, s) < 0.0 {
                        neg += 1;
                    }
                });
                neg
            })
            .collect()
    })?;
    Ok((counts.iter().sum(), cfg.paths * grid.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ljd::FourFactorParams;

    #[test]
    fn deterministic_model_has_zero_error() {
        let mut p = FourFactorParams::fixture();
        p.sigma_i = 0.0;
        p.sigma_d = 0.0;
        let model = PricingModel::new_unchecked(p.to_spec_unchecked()).unwrap();
        let cfg = SimConfig {
            paths: 50,
            horizon: 2.0,
            ..SimConfig::default()
        };
        let e = estimate(&model, &p.x0, &cfg, &Quantity::Bond { maturity: 2.0 }).unwrap();
        assert!(e.std_error < 1e-14);
        let want = model.zero_coupon_bond(&p.x0, 0.0, 2.0).unwrap();
        assert!((e.mean - want).abs() < 1e-3 * want);
    }

    #[test]
    fn horizon_must_cover_maturity() {
        let p = FourFactorParams::fixture();
        let model = PricingModel::new(p.to_spec().unwrap()).unwrap();
        let cfg = SimConfig {
            paths: 10,
            horizon: 1.0,
            ..SimConfig::default()
        };
        let r = estimate(&model, &p.x0, &cfg, &Quantity::Bond { maturity: 3.0 });
        assert!(matches!(r, Err(Error::HorizonTooShort { .. })));
    }

    #[test]
    fn control_variate_removes_linear_noise() {
        let c: Vec<f64> = (0..1000).map(|i| ((i * 7919) % 1000) as f64 / 1000.0).collect();
        let y: Vec<f64> = c.iter().enumerate().map(|(i, v)| 2.0 * v + 0.01 * ((i % 3) as f64)).collect();
        let plain = summarize(&y, None);
        let cv = summarize(&y, Some((&c, 0.4995)));
        assert!(cv.std_error < 0.05 * plain.std_error);
        assert!(cv.variance_reduction.unwrap() > 100.0);
    }
}
