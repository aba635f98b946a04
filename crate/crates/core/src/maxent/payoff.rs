use nalgebra::DVector;

use super::density::{fit_maxent, MaxEntDensity, MomentSet, Support};
use crate::error::{Error, Result};
use crate::ljd::{build_accrual_generator, build_generator};
use crate::poly::{binomial, matrix_exponential, rank_unchecked, Basis, MomentEngine, Poly};
use crate::pricing::{PricingModel, SwapSchedule};

/// The option written on the scalar variable `g`.
#[derive(Debug, Clone, PartialEq)]
pub enum OptionKind {
    /// Payer swaption with fixed rate `strike`, exercised at the reset date.
    Swaption { schedule: SwapSchedule, strike: f64 },
    /// Call on the fundamental stock price at `expiry`.
    StockOption { expiry: f64, strike: f64 },
    /// Call on the dividends realized over `[t1, t2]`, paid at `t2`.
    DividendOption { t1: f64, t2: f64, strike: f64 },
    /// `F(g(X_T))` with `g` already multiplied by `qᵀH_1(X_T)`.
    Generic { expiry: f64, g: Poly },
}

/// Scalar transform `F`: `Call` is `max(y, 0)`, `Put` is `max(−y, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    Call,
    Put,
}

impl Transform {
    pub fn apply(self, y: f64) -> f64 {
        match self {
            Transform::Call => y.max(0.0),
            Transform::Put => (-y).max(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PayoffSpec {
    pub kind: OptionKind,
    pub transform: Transform,
}

impl PayoffSpec {
    pub fn call(kind: OptionKind) -> Self {
        PayoffSpec {
            kind,
            transform: Transform::Call,
        }
    }

    pub fn put(kind: OptionKind) -> Self {
        PayoffSpec {
            kind,
            transform: Transform::Put,
        }
    }

    /// Date at which the payoff is discounted.
    pub fn payment_date(&self) -> f64 {
        match &self.kind {
            OptionKind::Swaption { schedule, .. } => schedule.reset(),
            OptionKind::StockOption { expiry, .. } | OptionKind::Generic { expiry, .. } => *expiry,
            OptionKind::DividendOption { t2, .. } => *t2,
        }
    }
}

/// Moments of the payoff variable `Y`, stored for `Z = (Y − center)/scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffMoments {
    pub standardized: MomentSet,
    pub center: f64,
    pub scale: f64,
    pub payment_date: f64,
    /// `e^{−γ(T−t)}/qᵀH_1(x)`.
    pub prefactor: f64,
}

impl PayoffMoments {
    /// Raw moments `E[Y^k]`.
    pub fn raw(&self) -> Vec<f64> {
        let z = &self.standardized.moments;
        (0..z.len())
            .map(|k| {
                (0..=k)
                    .map(|j| {
                        binomial(k, j) as f64
                            * self.center.powi((k - j) as i32)
                            * self.scale.powi(j as i32)
                            * z[j]
                    })
                    .sum()
            })
            .collect()
    }

    /// `E[Y]`.
    pub fn mean(&self) -> f64 {
        self.center + self.scale * self.standardized.moments.get(1).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone)]
pub struct PriceResult {
    pub value: f64,
    /// `E[F(Y)]` before the prefactor.
    pub expectation: f64,
    pub moments: PayoffMoments,
    pub density: MaxEntDensity,
}

fn check_dates(t: f64, dates: &[f64]) -> Result<()> {
    let mut prev = t;
    for &d in dates {
        if !(d >= prev) || !d.is_finite() {
            return Err(Error::InvalidDates(format!(
                "option dates must not precede the pricing date {t} or each other, got {d}"
            )));
        }
        prev = d;
    }
    Ok(())
}

/// `qᵀ(Id − e^{(G_1−γ)(T_n−T_0)} − K Σ δ_k e^{(G_1−γ)(T_k−T_0)})` as a
/// polynomial of `X_{T_0}`.
pub fn swaption_variable(model: &PricingModel, schedule: &SwapSchedule, strike: f64) -> Result<Poly> {
    let spec = model.spec();
    let q = DVector::from_column_slice(&spec.q);
    let g1t = model.g1().transpose();
    let push = |dt: f64| -> Result<DVector<f64>> {
        Ok(matrix_exponential(&(&g1t * dt))? * &q * (-spec.gamma * dt).exp())
    };
    let t0 = schedule.reset();
    let mut c = q.clone() - push(schedule.maturity() - t0)?;
    for (d, acc) in schedule.dates().iter().zip(schedule.accruals()) {
        c -= push(d - t0)? * (strike * acc);
    }
    Ok(Poly::linear(c.as_slice()))
}

/// `e^{βT} wᵀH_2 − K qᵀH_1`.
pub fn stock_option_variable(model: &PricingModel, expiry: f64, strike: f64) -> Result<Poly> {
    let spec = model.spec();
    let w = &model.stock_coordinates()?.w;
    let lead = Poly::from_coeffs(spec.dim(), 2, w.clone()).scale((spec.beta * expiry).exp());
    Ok(lead.sub(&Poly::linear(&spec.q).scale(strike)))
}

fn abs_value(p: &Poly, x: &[f64]) -> f64 {
    let h = Basis::new(p.vars(), p.degree()).evaluate(x);
    p.coeffs().iter().zip(&h).map(|(c, v)| (c * v).abs()).sum()
}

fn engine(model: &PricingModel, x: &[f64], degree: usize) -> Result<MomentEngine> {
    let g = build_generator(model.spec(), degree.max(1))?;
    MomentEngine::new(&g, x)
}

/// Standardizes raw moments of `Y/unit` into a `PayoffMoments`.
fn standardize(raw: &[f64], unit: f64, magnitude: f64, payment_date: f64, prefactor: f64) -> Result<PayoffMoments> {
    let n = raw.len() - 1;
    if raw.iter().any(|m| !m.is_finite()) {
        return Err(Error::MomentOverflow);
    }
    let mean = if n >= 1 { raw[1] } else { 0.0 };
    // central moments of Y/unit
    let central: Vec<f64> = (0..=n)
        .map(|k| {
            (0..=k)
                .map(|j| binomial(k, j) as f64 * raw[j] * (-mean).powi((k - j) as i32))
                .sum()
        })
        .collect();
    let var = if n >= 2 { central[2] } else { 0.0 };
    let degenerate = n >= 2 && var <= 1e-14 * (mean * mean + magnitude * magnitude);
    let s = if n >= 2 && !degenerate { var.sqrt() } else { 1.0 };
    let z: Vec<f64> = central
        .iter()
        .enumerate()
        .map(|(k, c)| if degenerate && k > 0 { 0.0 } else { c / s.powi(k as i32) })
        .collect();
    Ok(PayoffMoments {
        standardized: MomentSet::new(z, Support::FullLine)?,
        center: mean * unit,
        scale: s * unit,
        payment_date,
        prefactor,
    })
}

/// Moments of the payoff variable up to order `n` under `E_t`.
pub fn payoff_moments(model: &PricingModel, x: &[f64], t: f64, payoff: &PayoffSpec, n: usize) -> Result<PayoffMoments> {
    if n > super::density::MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "moment order {n} above {}",
            super::density::MAX_ORDER
        )));
    }
    let pay = payoff.payment_date();
    let prefactor = model.discount_prefactor(x, t, pay)?;
    let g = match &payoff.kind {
        OptionKind::Swaption { schedule, strike } => {
            check_dates(t, &[schedule.reset()])?;
            swaption_variable(model, schedule, *strike)?
        }
        OptionKind::StockOption { expiry, strike } => {
            check_dates(t, &[*expiry])?;
            stock_option_variable(model, *expiry, *strike)?
        }
        OptionKind::Generic { expiry, g } => {
            check_dates(t, &[*expiry])?;
            if g.vars() != model.spec().dim() {
                return Err(Error::Dimension("payoff polynomial in the wrong number of variables".into()));
            }
            g.clone()
        }
        OptionKind::DividendOption { t1, t2, strike } => {
            check_dates(t, &[*t1, *t2])?;
            return dividend_option_moments(model, x, t, *t1, *t2, *strike, n, prefactor);
        }
    };
    let dt = pay - t;
    let magnitude = abs_value(&g, x).max(f64::MIN_POSITIVE);
    let eng = engine(model, x, g.degree() * n)?;
    let u = eng.scaled_expectations(dt, g.degree() * n)?;
    let gs = g.rescale(eng.scale()).scale(1.0 / magnitude);
    let mean = gs.pair(&u);
    // centre before powering so high moments carry no cancellation
    let centred = gs.add_constant(-mean);
    let mut raw: Vec<f64> = centred.powers(n).iter().map(|p| p.pair(&u)).collect();
    raw[0] = 1.0;
    let mut out = standardize(&raw, magnitude, 1.0, pay, prefactor)?;
    out.center += mean * magnitude;
    Ok(out)
}

/// Moments of `qᵀH_1(X_{T2})·(C_{T2} − C_{T1} − K)`, computed on the state
/// extended by the dividends accrued since `T1` so that the small accrual is
/// never formed as a difference of two large cumulative amounts.
#[allow(clippy::too_many_arguments)]
fn dividend_option_moments(
    model: &PricingModel,
    x: &[f64],
    t: f64,
    t1: f64,
    t2: f64,
    strike: f64,
    n: usize,
    prefactor: f64,
) -> Result<PayoffMoments> {
    let spec = model.spec();
    let d = spec.dim();
    let q = Poly::linear(&spec.q);
    let accrual_rate = {
        let g1 = model.g1();
        let rate: Vec<f64> = (0..=d)
            .map(|j| (0..=d).map(|i| g1[(i, j)] * spec.p[i]).sum::<f64>() + spec.beta * spec.p[j])
            .collect();
        Poly::linear(&rate)
    };
    // typical size of V_{T2}
    let v_size = (abs_value(&accrual_rate, x) * (t2 - t1)).max(1e-300);
    let growth = (spec.beta * t2).exp();
    let magnitude = (abs_value(&q, x) * (growth * v_size + strike.abs())).max(f64::MIN_POSITIVE);

    let ext = build_accrual_generator(spec, 2 * n.max(1))?;
    let mut x_ext = x.to_vec();
    x_ext.push(if t2 > t1 { v_size } else { 1.0 });
    let eng_ext = MomentEngine::new(&ext, &x_ext)?;
    let eng = engine(model, x, 2 * n)?;
    let u = eng.scaled_expectations(t1 - t, 2 * n)?;

    let mut q_ext = spec.q.clone();
    q_ext.push(0.0);
    let mut payoff = vec![-strike / magnitude];
    payoff.extend(std::iter::repeat_n(0.0, d));
    payoff.push(growth / magnitude);
    let y = Poly::linear(&q_ext).multiply(&Poly::linear(&payoff));

    let mut raw = vec![1.0; n + 1];
    for (k, yk) in y.powers(n).iter().enumerate().skip(1) {
        let pushed = eng_ext.conditional(yk, t2 - t1)?;
        // V_{T1} = 0: keep the monomials without V
        let ebasis = Basis::new(d + 1, pushed.degree());
        let mut at_start = Poly::zero(d, pushed.degree());
        let mut coeffs = at_start.clone().into_coeffs();
        for (r, c) in pushed.coeffs().iter().enumerate() {
            let ex = ebasis.exponents(r);
            if ex[d] == 0 {
                coeffs[rank_unchecked(&ex[..d])] += c;
            }
        }
        at_start = Poly::from_coeffs(d, pushed.degree(), coeffs);
        raw[k] = at_start.pair(&u);
    }
    standardize(&raw, magnitude, 1.0, t2, prefactor)
}

/// Prices the option by fitting the maximum-entropy density to `n` moments
/// of the payoff variable.
pub fn price_option(model: &PricingModel, x: &[f64], t: f64, payoff: &PayoffSpec, n: usize) -> Result<PriceResult> {
    let moments = payoff_moments(model, x, t, payoff, n)?;
    price_from_moments(moments, payoff.transform)
}

pub fn price_from_moments(moments: PayoffMoments, transform: Transform) -> Result<PriceResult> {
    if moments.standardized.order() < 2 {
        return Err(Error::InvalidArgument(
            "pricing on the full line needs at least two moments".into(),
        ));
    }
    let density = fit_maxent(&moments.standardized)?;
    let (c, s) = (moments.center, moments.scale);
    let expectation = density.expect(|z| transform.apply(c + s * z), &[-c / s])?;
    Ok(PriceResult {
        value: moments.prefactor * expectation,
        expectation,
        moments,
        density,
    })
}
