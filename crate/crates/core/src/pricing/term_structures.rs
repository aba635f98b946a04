use nalgebra::{DMatrix, DVector};

use super::schedule::SwapSchedule;
use crate::error::{Error, Result};
use crate::ljd::{build_generator, ensure_valid, g2_max_real_eigenvalue, ModelSpec};
use crate::poly::{matrix_exponential, Basis, Poly};

/// Coordinates behind the fundamental stock price.
#[derive(Debug, Clone, PartialEq)]
pub struct StockCoordinates {
    /// `vᵀH_2(x) = pᵀ(β + G_1)H_1(x) · qᵀH_1(x)`.
    pub v: Vec<f64>,
    /// `w = [(γ−β)Id − G_2ᵀ]⁻¹ v`.
    pub w: Vec<f64>,
    /// `wᵀ[(γ−β)Id − G_2]⁻¹`, the duration numerator.
    pub duration_weights: Vec<f64>,
    /// 1-norm condition number of `(γ−β)Id − G_2`.
    pub condition: f64,
}

/// A model ready for closed-form pricing: the `ModelSpec` plus `G_1`, `G_2` and
/// the stock coordinates.
///
/// All dates are absolute years from the valuation epoch; `x` is the factor
/// state at the pricing date `t`.
#[derive(Debug, Clone)]
pub struct PricingModel {
    spec: ModelSpec,
    g1: DMatrix<f64>,
    g2: DMatrix<f64>,
    stock: std::result::Result<StockCoordinates, Error>,
}

fn h1(x: &[f64]) -> DVector<f64> {
    let mut v = Vec::with_capacity(x.len() + 1);
    v.push(1.0);
    v.extend_from_slice(x);
    DVector::from_vec(v)
}

fn dotv(a: &[f64], b: &DVector<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn check_dates(t: f64, t1: f64, t2: f64) -> Result<()> {
    if !(t <= t1 && t1 <= t2) {
        return Err(Error::InvalidDates(format!(
            "need t <= T1 <= T2, got t={t}, T1={t1}, T2={t2}"
        )));
    }
    Ok(())
}

impl PricingModel {
    /// Validates the model and precomputes the pricing matrices.
    pub fn new(spec: ModelSpec) -> Result<Self> {
        ensure_valid(&spec)?;
        Self::new_unchecked(spec)
    }

    /// Skips the model conditions; only the dimensions are checked. Stock
    /// quantities still error if the eigenvalue condition fails.
    pub fn new_unchecked(spec: ModelSpec) -> Result<Self> {
        let g1 = build_generator(&spec, 1)?.dense();
        let g2 = build_generator(&spec, 2)?.dense();
        let stock = stock_coordinates(&spec, &g1, &g2);
        Ok(PricingModel {
            spec,
            g1,
            g2,
            stock,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn g1(&self) -> &DMatrix<f64> {
        &self.g1
    }

    pub fn g2(&self) -> &DMatrix<f64> {
        &self.g2
    }

    pub fn stock_coordinates(&self) -> Result<&StockCoordinates> {
        self.stock.as_ref().map_err(|e| e.clone())
    }

    fn check_state(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.spec.dim() {
            return Err(Error::Dimension(format!(
                "state of length {} for a {}-factor model",
                x.len(),
                self.spec.dim()
            )));
        }
        Ok(())
    }

    /// `e^{G_1 dt} H_1(x)`.
    pub fn expected_h1(&self, x: &[f64], dt: f64) -> Result<DVector<f64>> {
        self.check_state(x)?;
        if dt < 0.0 {
            return Err(Error::InvalidDates(format!("negative horizon {dt}")));
        }
        if dt == 0.0 {
            return Ok(h1(x));
        }
        Ok(matrix_exponential(&(&self.g1 * dt))? * h1(x))
    }

    /// `e^{G_2 dt} H_2(x)`.
    pub fn expected_h2(&self, x: &[f64], dt: f64) -> Result<DVector<f64>> {
        self.check_state(x)?;
        if dt < 0.0 {
            return Err(Error::InvalidDates(format!("negative horizon {dt}")));
        }
        let h = DVector::from_vec(Basis::new(self.spec.dim(), 2).evaluate(x));
        if dt == 0.0 {
            return Ok(h);
        }
        Ok(matrix_exponential(&(&self.g2 * dt))? * h)
    }

    /// `C_t = e^{βt} pᵀH_1(x)`.
    pub fn cumulative_dividends(&self, x: &[f64], t: f64) -> f64 {
        (self.spec.beta * t).exp() * dotv(&self.spec.p, &h1(x))
    }

    /// `ζ_t = e^{−γt} qᵀH_1(x)`.
    pub fn discount_factor(&self, x: &[f64], t: f64) -> f64 {
        (-self.spec.gamma * t).exp() * dotv(&self.spec.q, &h1(x))
    }

    /// Coefficients of `pᵀ(β Id + G_1)H_1`.
    pub fn dividend_rate_loading(&self) -> Vec<f64> {
        let p = DVector::from_column_slice(&self.spec.p);
        let l = self.g1.transpose() * &p + p * self.spec.beta;
        l.iter().copied().collect()
    }

    /// `D_t = e^{βt} pᵀ(β Id + G_1)H_1(x)`.
    pub fn dividend_rate(&self, x: &[f64], t: f64) -> Result<f64> {
        self.check_state(x)?;
        Ok((self.spec.beta * t).exp() * dotv(&self.dividend_rate_loading(), &h1(x)))
    }

    /// Expected cumulative dividends `E_t[C_T]`.
    pub fn expected_cumulative(&self, x: &[f64], t: f64, big_t: f64) -> Result<f64> {
        let m = self.expected_h1(x, big_t - t)?;
        Ok((self.spec.beta * big_t).exp() * dotv(&self.spec.p, &m))
    }

    /// Price of the futures on dividends paid over `[T1, T2]`.
    pub fn dividend_futures(&self, x: &[f64], t: f64, t1: f64, t2: f64) -> Result<f64> {
        check_dates(t, t1, t2)?;
        if t1 == t2 {
            return Ok(0.0);
        }
        Ok(self.expected_cumulative(x, t, t2)? - self.expected_cumulative(x, t, t1)?)
    }

    fn denominator(&self, x: &[f64]) -> Result<f64> {
        self.check_state(x)?;
        let den = dotv(&self.spec.q, &h1(x));
        if !(den > 0.0) {
            return Err(Error::InvalidDiscountState(den));
        }
        Ok(den)
    }

    /// Zero-coupon bond `P(t, T)`.
    pub fn zero_coupon_bond(&self, x: &[f64], t: f64, big_t: f64) -> Result<f64> {
        let den = self.denominator(x)?;
        if big_t < t {
            return Err(Error::InvalidDates(format!("bond maturity {big_t} before {t}")));
        }
        if big_t == t {
            return Ok(1.0);
        }
        let m = self.expected_h1(x, big_t - t)?;
        Ok((-self.spec.gamma * (big_t - t)).exp() * dotv(&self.spec.q, &m) / den)
    }

    /// `r_t = γ − qᵀG_1H_1(x) / qᵀH_1(x)`.
    pub fn short_rate(&self, x: &[f64]) -> Result<f64> {
        let den = self.denominator(x)?;
        let gq = &self.g1 * h1(x);
        Ok(self.spec.gamma - dotv(&self.spec.q, &gq) / den)
    }

    /// `Σ δ_k P(t, T_k)`.
    pub fn annuity(&self, x: &[f64], t: f64, sched: &SwapSchedule) -> Result<f64> {
        let mut a = 0.0;
        for (d, acc) in sched.dates().iter().zip(sched.accruals()) {
            a += acc * self.zero_coupon_bond(x, t, *d)?;
        }
        Ok(a)
    }

    /// Value of a payer swap with fixed rate `k`.
    pub fn swap_value(&self, x: &[f64], t: f64, sched: &SwapSchedule, k: f64) -> Result<f64> {
        if sched.reset() < t {
            return Err(Error::InvalidDates("swap reset before pricing date".into()));
        }
        let p0 = self.zero_coupon_bond(x, t, sched.reset())?;
        let pn = self.zero_coupon_bond(x, t, sched.maturity())?;
        Ok(p0 - pn - k * self.annuity(x, t, sched)?)
    }

    pub fn forward_swap_rate(&self, x: &[f64], t: f64, sched: &SwapSchedule) -> Result<f64> {
        if sched.reset() < t {
            return Err(Error::InvalidDates("swap reset before pricing date".into()));
        }
        let a = self.annuity(x, t, sched)?;
        if a == 0.0 || !a.is_finite() {
            return Err(Error::ZeroAnnuity);
        }
        let p0 = self.zero_coupon_bond(x, t, sched.reset())?;
        let pn = self.zero_coupon_bond(x, t, sched.maturity())?;
        Ok((p0 - pn) / a)
    }

    /// Fundamental stock price `S*_t = e^{βt} wᵀH_2(x) / qᵀH_1(x)`.
    pub fn fundamental_stock(&self, x: &[f64], t: f64) -> Result<f64> {
        let den = self.denominator(x)?;
        let sc = self.stock_coordinates()?;
        let h = Basis::new(self.spec.dim(), 2).evaluate(x);
        Ok((self.spec.beta * t).exp() * Poly::from_coeffs(self.spec.dim(), 2, sc.w.clone()).pair(&h) / den)
    }

    /// Forward price `E_t[ζ_T S*_T] / (ζ_t P(t, T))` of the fundamental stock.
    pub fn stock_forward(&self, x: &[f64], t: f64, big_t: f64) -> Result<f64> {
        let den = self.denominator(x)?;
        let sc = self.stock_coordinates()?;
        let m = self.expected_h2(x, big_t - t)?;
        let pv = (-self.spec.gamma * (big_t - t) + self.spec.beta * big_t).exp()
            * sc.w.iter().zip(m.iter()).map(|(a, b)| a * b).sum::<f64>()
            / den;
        Ok(pv / self.zero_coupon_bond(x, t, big_t)?)
    }

    /// Present value weighted average waiting time of future dividends.
    pub fn stock_duration(&self, x: &[f64]) -> Result<f64> {
        self.check_state(x)?;
        let sc = self.stock_coordinates()?;
        let h = Basis::new(self.spec.dim(), 2).evaluate(x);
        let num: f64 = sc.duration_weights.iter().zip(&h).map(|(a, b)| a * b).sum();
        let den: f64 = sc.w.iter().zip(&h).map(|(a, b)| a * b).sum();
        Ok(num / den)
    }

    /// Dividend forward (swap) price for dividends over `[T1, T2]` paid at `T2`.
    pub fn dividend_forward(&self, x: &[f64], t: f64, t1: f64, t2: f64) -> Result<f64> {
        check_dates(t, t1, t2)?;
        self.denominator(x)?;
        if t1 == t2 {
            return Ok(0.0);
        }
        let p = Poly::linear(&self.spec.p);
        let q = Poly::linear(&self.spec.q);
        let eq = matrix_exponential(&(self.g1.transpose() * (t2 - t1)))?
            * DVector::from_column_slice(&self.spec.q);
        let q_fwd = Poly::linear(eq.as_slice());
        let w2 = p.multiply(&q);
        let w1 = p.multiply(&q_fwd);
        let m2 = self.expected_h2(x, t2 - t)?;
        let m1 = self.expected_h2(x, t1 - t)?;
        let num = (self.spec.beta * t2).exp() * w2.pair(m2.as_slice())
            - (self.spec.beta * t1).exp() * w1.pair(m1.as_slice());
        let den = dotv(&self.spec.q, &self.expected_h1(x, t2 - t)?);
        Ok(num / den)
    }

    /// `e^{−γ(T−t)} / qᵀH_1(x)`, the prefactor that turns `E_t[ζ_T·…]/e^{−γT}`
    /// into a time-`t` price.
    pub fn discount_prefactor(&self, x: &[f64], t: f64, big_t: f64) -> Result<f64> {
        Ok((-self.spec.gamma * (big_t - t)).exp() / self.denominator(x)?)
    }
}

fn stock_coordinates(
    spec: &ModelSpec,
    g1: &DMatrix<f64>,
    g2: &DMatrix<f64>,
) -> std::result::Result<StockCoordinates, Error> {
    let gap = spec.gamma - spec.beta;
    let max_eig = g2_max_real_eigenvalue(spec)?;
    if !(gap > max_eig) {
        return Err(Error::StockPriceInfinite { max_eig, gap });
    }
    let p = DVector::from_column_slice(&spec.p);
    let rate = g1.transpose() * &p + &p * spec.beta;
    let v = Poly::linear(rate.as_slice()).multiply(&Poly::linear(&spec.q));
    let n = g2.nrows();
    let m = DMatrix::<f64>::identity(n, n) * gap - g2;
    let inv = m
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("(γ−β)Id − G_2".into()))?;
    let norm1 = |a: &DMatrix<f64>| {
        a.column_iter()
            .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let condition = norm1(&m) * norm1(&inv);
    let vv = DVector::from_column_slice(v.coeffs());
    let w = inv.transpose() * &vv;
    let dw = inv.transpose() * &w;
    Ok(StockCoordinates {
        v: v.into_coeffs(),
        w: w.iter().copied().collect(),
        duration_weights: dw.iter().copied().collect(),
        condition,
    })
}
