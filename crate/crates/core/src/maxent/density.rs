use nalgebra::{DMatrix, DVector};

use super::quadrature::Grid;
use crate::error::{Error, Result};
use crate::poly::binomial;

/// Support of a scalar random variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    FullLine,
    /// `(a, ∞)`.
    HalfLine(f64),
    /// `[a, b]`.
    Interval(f64, f64),
}

impl Support {
    fn map(&self, shift: f64, scale: f64) -> Support {
        match *self {
            Support::FullLine => Support::FullLine,
            Support::HalfLine(a) => Support::HalfLine((a - shift) / scale),
            Support::Interval(a, b) => Support::Interval((a - shift) / scale, (b - shift) / scale),
        }
    }
}

/// Raw moments `M_0..M_N` of a scalar variable.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet {
    pub moments: Vec<f64>,
    pub support: Support,
}

pub const MAX_ORDER: usize = 8;

/// Half-width, in standard deviations, of the integration window on
/// unbounded supports before tail checks extend it.
const WINDOW: f64 = 12.0;
const TAIL_MASS: f64 = 1e-10;
const GRAD_TOL: f64 = 1e-9;
const MAX_NEWTON: usize = 200;

/// Moments of `(X − shift)/scale` from the raw moments of `X`.
pub fn standardize_moments(m: &[f64], shift: f64, scale: f64) -> Vec<f64> {
    (0..m.len())
        .map(|k| {
            let s: f64 = (0..=k)
                .map(|j| binomial(k, j) as f64 * m[j] * (-shift).powi((k - j) as i32))
                .sum();
            s / scale.powi(k as i32)
        })
        .collect()
}

impl MomentSet {
    pub fn new(moments: Vec<f64>, support: Support) -> Result<Self> {
        if moments.is_empty() || moments.len() > MAX_ORDER + 1 {
            return Err(Error::InvalidArgument(format!(
                "need between 1 and {} moments, got {}",
                MAX_ORDER + 1,
                moments.len()
            )));
        }
        if moments.iter().any(|m| !m.is_finite()) {
            return Err(Error::InfeasibleMoments("non-finite moment".into()));
        }
        Ok(MomentSet { moments, support })
    }

    /// `N`, the highest moment order.
    pub fn order(&self) -> usize {
        self.moments.len() - 1
    }

    pub fn mean(&self) -> Option<f64> {
        self.moments.get(1).map(|m| m / self.moments[0])
    }

    pub fn variance(&self) -> Option<f64> {
        if self.moments.len() < 3 {
            return None;
        }
        let m = self.mean().unwrap();
        Some(self.moments[2] / self.moments[0] - m * m)
    }

    /// True when the variance vanishes relative to the mean.
    pub fn is_degenerate(&self) -> bool {
        match (self.mean(), self.variance()) {
            (Some(m), Some(v)) => v <= 1e-12 * m * m.max(1e-300) || v <= 0.0 && m == 0.0,
            _ => false,
        }
    }

    /// Affine map `(shift, scale)` used before fitting.
    fn standardization(&self) -> Result<(f64, f64)> {
        let n = self.order();
        if n >= 2 {
            let v = self.variance().unwrap();
            if v > 0.0 {
                return Ok((self.mean().unwrap(), v.sqrt()));
            }
        }
        match self.support {
            Support::Interval(a, b) => Ok((a, b - a)),
            Support::HalfLine(a) if n >= 1 => {
                let m = self.mean().unwrap() - a;
                if m > 0.0 {
                    Ok((a, m))
                } else {
                    Err(Error::InfeasibleMoments(format!(
                        "mean {} not above the lower bound {a}",
                        self.mean().unwrap()
                    )))
                }
            }
            _ => Err(Error::InfeasibleMoments(
                "unbounded support needs a mean (half line) or a positive variance".into(),
            )),
        }
    }

    /// Smallest eigenvalue of the Hankel matrix of the standardized
    /// moments; negative values mean no distribution has these moments.
    pub fn hankel_min_eigenvalue(&self) -> Result<f64> {
        let (s, c) = self.standardization()?;
        let m = standardize_moments(&self.moments, s, c);
        let k = self.order() / 2 + 1;
        let h = DMatrix::from_fn(k, k, |i, j| m[i + j]);
        Ok(h.symmetric_eigenvalues().min())
    }

    pub fn check_feasible(&self) -> Result<()> {
        if (self.moments[0] - 1.0).abs() > 1e-12 {
            return Err(Error::InfeasibleMoments(format!("M_0 = {} is not 1", self.moments[0])));
        }
        let e = self.hankel_min_eigenvalue()?;
        if e < -1e-10 {
            return Err(Error::InfeasibleMoments(format!(
                "Hankel matrix has eigenvalue {e:e}"
            )));
        }
        Ok(())
    }
}

/// Fitted maximum-entropy density `f(x) = exp(−Σ λ_i x^i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntDensity {
    /// Multipliers in the original units of the variable.
    pub lambdas: Vec<f64>,
    /// Multipliers of the standardized variable `(x − shift)/scale`.
    pub std_lambdas: Vec<f64>,
    pub shift: f64,
    pub scale: f64,
    pub support: Support,
    /// Integration window in standardized units.
    pub window: (f64, f64),
    pub point_mass: Option<f64>,
    pub iterations: usize,
    pub gradient_norm: f64,
    grid: Grid,
}

fn poly_eval(c: &[f64], y: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * y + a)
}

fn poly_deriv(c: &[f64], y: f64) -> f64 {
    c.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (i, a)| acc * y + i as f64 * a)
}

/// `∫ y^k exp(−Σλ_i y^i) dy` for `k = 0..=kmax` on the grid, plus the
/// potential's integral term.
fn grid_moments(grid: &Grid, lambdas: &[f64], kmax: usize) -> Vec<f64> {
    let mut out = vec![0.0; kmax + 1];
    for (&y, &w) in grid.nodes.iter().zip(&grid.weights) {
        let f = (-poly_eval(lambdas, y)).exp() * w;
        let mut p = f;
        for o in out.iter_mut() {
            *o += p;
            p *= y;
        }
    }
    out
}

/// `P(λ) = ∫ exp(−Σλ_i y^i) dy + Σ λ_i m_i` over `[lo, hi]`.
pub fn potential(moments: &[f64], lambdas: &[f64], lo: f64, hi: f64) -> f64 {
    let grid = Grid::uniform(lo, hi, 200);
    potential_on(&grid, moments, lambdas)
}

fn potential_on(grid: &Grid, moments: &[f64], lambdas: &[f64]) -> f64 {
    let z = grid_moments(grid, lambdas, 0)[0];
    z + lambdas.iter().zip(moments).map(|(l, m)| l * m).sum::<f64>()
}

struct Newton {
    lambdas: Vec<f64>,
    iterations: usize,
}

fn newton(grid: &Grid, m: &[f64], start: &[f64], budget: usize) -> Newton {
    let n = m.len();
    let mut lam = start.to_vec();
    let mut mu = grid_moments(grid, &lam, 2 * (n - 1));
    let mut pot = mu[0] + lam.iter().zip(m).map(|(l, v)| l * v).sum::<f64>();
    let mut iterations = 0;
    let grad_of = |mu: &[f64]| -> Vec<f64> { (0..n).map(|i| m[i] - mu[i]).collect() };
    let mut g = grad_of(&mu);
    let norm = |g: &[f64]| g.iter().map(|v| v * v).sum::<f64>().sqrt();
    while iterations < budget && norm(&g) > 0.1 * GRAD_TOL {
        iterations += 1;
        let mut h = DMatrix::from_fn(n, n, |i, j| mu[i + j]);
        let ev = h.symmetric_eigenvalues();
        let (emin, emax) = (ev.min(), ev.max());
        if !(emin > 0.0) || emax / emin > 1e12 {
            let damp = emax.abs() * 1e-12 - emin.min(0.0);
            for i in 0..n {
                h[(i, i)] += damp;
            }
        }
        let rhs = DVector::from_vec(g.iter().map(|v| -v).collect());
        let step = match h.clone().cholesky() {
            Some(c) => c.solve(&rhs),
            None => match h.lu().solve(&rhs) {
                Some(s) => s,
                None => break,
            },
        };
        // P decreases along `step`: ∇P = g, so the slope is g·step
        let slope: f64 = g.iter().zip(step.iter()).map(|(a, b)| a * b).sum();
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = lam.iter().zip(step.iter()).map(|(l, s)| l + alpha * s).collect();
            let tmu = grid_moments(grid, &trial, 2 * (n - 1));
            let tpot = tmu[0] + trial.iter().zip(m).map(|(l, v)| l * v).sum::<f64>();
            if tpot.is_finite() && tpot <= pot + 1e-4 * alpha * slope.min(0.0) + 1e-15 * pot.abs() {
                lam = trial;
                mu = tmu;
                pot = tpot;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        g = grad_of(&mu);
        if !accepted {
            break;
        }
    }
    Newton {
        lambdas: lam,
        iterations,
    }
}

fn initial_lambdas(n: usize, lo: f64, hi: f64, support: Support) -> Vec<f64> {
    let mut lam = vec![0.0; n + 1];
    match support {
        Support::FullLine if n >= 2 => {
            lam[0] = (2.0 * std::f64::consts::PI).sqrt().ln();
            lam[2] = 0.5;
        }
        Support::HalfLine(a) if n >= 2 => {
            lam[2] = 0.5;
            let z = Grid::uniform(a.max(lo), hi, 64).integrate(|y| (-0.5 * y * y).exp());
            lam[0] = z.ln();
        }
        Support::HalfLine(a) if n == 1 => {
            lam[0] = -a;
            lam[1] = 1.0;
        }
        _ => lam[0] = (hi - lo).ln(),
    }
    lam
}

fn window(support: Support, mean: f64) -> (f64, f64) {
    match support {
        Support::FullLine => (mean - WINDOW, mean + WINDOW),
        Support::HalfLine(a) => (a, (mean + WINDOW).max(a + WINDOW)),
        Support::Interval(a, b) => (a, b),
    }
}

/// Fits the maximum-entropy density to the moments by Newton's method on the
/// convex potential, in standardized units.
pub fn fit_maxent(ms: &MomentSet) -> Result<MaxEntDensity> {
    let n = ms.order();
    if ms.is_degenerate() {
        let x = ms.mean().unwrap();
        return Ok(MaxEntDensity {
            lambdas: vec![],
            std_lambdas: vec![],
            shift: x,
            scale: 1.0,
            support: ms.support,
            window: (0.0, 0.0),
            point_mass: Some(x),
            iterations: 0,
            gradient_norm: 0.0,
            grid: Grid::from_panels(vec![]),
        });
    }
    ms.check_feasible()?;
    let (shift, scale) = ms.standardization()?;
    let m = standardize_moments(&ms.moments, shift, scale);
    let support = ms.support.map(shift, scale);
    let mean = if n >= 1 { m[1] } else { 0.0 };
    let (mut lo, mut hi) = window(support, mean);

    let mut lam = initial_lambdas(n, lo, hi, support);
    let mut iterations = 0;
    let mut grad_norm = f64::INFINITY;
    let mut grid = Grid::uniform(lo, hi, 48);
    for _round in 0..12 {
        let r = newton(&grid, &m, &lam, MAX_NEWTON.saturating_sub(iterations).max(1));
        iterations += r.iterations;
        lam = r.lambdas;

        // re-adapt the grid to the current density and check the tails
        let kmax = 2 * n;
        let lam_ref = lam.clone();
        let integrand = move |y: f64| (-poly_eval(&lam_ref, y)).exp() * (1.0 + y.abs().powi(kmax as i32));
        let fine = Grid::adaptive(&integrand, lo, hi, &[], 1e-13)?;
        let mu = grid_moments(&fine, &lam, n);
        grad_norm = (0..=n).map(|i| (m[i] - mu[i]).powi(2)).sum::<f64>().sqrt();
        grid = fine;

        let mut extended = false;
        let unbounded_hi = !matches!(support, Support::Interval(..));
        let unbounded_lo = matches!(support, Support::FullLine);
        for (is_hi, open) in [(true, unbounded_hi), (false, unbounded_lo)] {
            if !open {
                continue;
            }
            let b = if is_hi { hi } else { lo };
            let slope = if is_hi { poly_deriv(&lam, b) } else { -poly_deriv(&lam, b) };
            if slope > 0.0 {
                let tail = (-poly_eval(&lam, b)).exp() / slope;
                if tail > TAIL_MASS {
                    let ext = ((tail / (1e-3 * TAIL_MASS)).ln() / slope).clamp(1.0, 4.0 * WINDOW);
                    if is_hi {
                        hi += ext;
                    } else {
                        lo -= ext;
                    }
                    extended = true;
                }
            }
        }
        if extended {
            grid = Grid::uniform(lo, hi, 48);
            continue;
        }
        if grad_norm <= GRAD_TOL || iterations >= MAX_NEWTON {
            break;
        }
    }
    if !(grad_norm <= GRAD_TOL) {
        return Err(Error::MaxEntFailed {
            iterations,
            residual: grad_norm,
        });
    }

    // λ in original units: −ln f_X(x) = Σλ'_i ((x−s)/c)^i + ln c
    let mut orig = vec![0.0; n + 1];
    for (i, l) in lam.iter().enumerate() {
        for (j, o) in orig.iter_mut().enumerate().take(i + 1) {
            *o += l * binomial(i, j) as f64 * (-shift).powi((i - j) as i32) / scale.powi(i as i32);
        }
    }
    orig[0] += scale.ln();
    Ok(MaxEntDensity {
        lambdas: orig,
        std_lambdas: lam,
        shift,
        scale,
        support: ms.support,
        window: (lo, hi),
        point_mass: None,
        iterations,
        gradient_norm: grad_norm,
        grid,
    })
}

impl MaxEntDensity {
    pub fn pdf(&self, x: f64) -> f64 {
        if self.point_mass.is_some() {
            return 0.0;
        }
        let y = (x - self.shift) / self.scale;
        if y < self.window.0 || y > self.window.1 {
            return 0.0;
        }
        (-poly_eval(&self.std_lambdas, y)).exp() / self.scale
    }

    /// `∫ F(x) f(x) dx`; `kinks` are points where `F` is not smooth.
    pub fn expect(&self, f: impl Fn(f64) -> f64, kinks: &[f64]) -> Result<f64> {
        if let Some(x) = self.point_mass {
            return Ok(f(x));
        }
        let (s, c) = (self.shift, self.scale);
        let lam = &self.std_lambdas;
        let integrand = |y: f64| f(s + c * y) * (-poly_eval(lam, y)).exp();
        let breaks: Vec<f64> = kinks.iter().map(|k| (k - s) / c).collect();
        let (lo, hi) = self.window;
        let grid = Grid::adaptive(&integrand, lo, hi, &breaks, 1e-12)?;
        let v = grid.integrate(integrand);
        if !v.is_finite() {
            return Err(Error::Quadrature("non-finite expectation".into()));
        }
        Ok(v)
    }

    /// Raw moments `∫ x^k f(x) dx`, `k = 0..=n`, recomputed from the fit.
    pub fn moments(&self, n: usize) -> Vec<f64> {
        if let Some(x) = self.point_mass {
            return (0..=n).map(|k| x.powi(k as i32)).collect();
        }
        let mu = grid_moments(&self.grid, &self.std_lambdas, n);
        // back to original units: x = s + c y
        (0..=n)
            .map(|k| {
                (0..=k)
                    .map(|j| {
                        binomial(k, j) as f64
                            * self.shift.powi((k - j) as i32)
                            * self.scale.powi(j as i32)
                            * mu[j]
                    })
                    .sum()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_special_case() {
        let ms = MomentSet::new(vec![1.0, 0.0, 1.0], Support::FullLine).unwrap();
        let d = fit_maxent(&ms).unwrap();
        let want = [(2.0 * std::f64::consts::PI).sqrt().ln(), 0.0, 0.5];
        for (a, b) in d.lambdas.iter().zip(want) {
            assert!((a - b).abs() < 1e-9, "{:?}", d.lambdas);
        }
    }

    #[test]
    fn exponential_special_case() {
        let ms = MomentSet::new(vec![1.0, 1.0], Support::HalfLine(0.0)).unwrap();
        let d = fit_maxent(&ms).unwrap();
        assert!(d.lambdas[0].abs() < 1e-9 && (d.lambdas[1] - 1.0).abs() < 1e-9, "{:?}", d.lambdas);
    }

    #[test]
    fn uniform_special_case() {
        let ms = MomentSet::new(vec![1.0], Support::Interval(0.0, 1.0)).unwrap();
        let d = fit_maxent(&ms).unwrap();
        assert!(d.lambdas[0].abs() < 1e-12);
        assert!((d.pdf(0.3) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shifted_gaussian_recovers_moments() {
        // N(2, 0.25): moments 1, 2, 4.25, 9.5, 22.1875
        let ms = MomentSet::new(vec![1.0, 2.0, 4.25, 9.5, 22.1875], Support::FullLine).unwrap();
        let d = fit_maxent(&ms).unwrap();
        let m = d.moments(4);
        for (a, b) in m.iter().zip(&ms.moments) {
            assert!((a - b).abs() < 1e-9 * b.abs().max(1.0), "{m:?}");
        }
        assert!((d.lambdas[2] - 2.0).abs() < 1e-6, "{:?}", d.lambdas);
    }

    #[test]
    fn infeasible_moments_are_rejected() {
        let ms = MomentSet::new(vec![1.0, 0.0, 1.0, 0.0, 0.5], Support::FullLine).unwrap();
        assert!(matches!(fit_maxent(&ms), Err(Error::InfeasibleMoments(_))));
    }

    #[test]
    fn point_mass_bypasses_fit() {
        let ms = MomentSet::new(vec![1.0, 3.0, 9.0], Support::FullLine).unwrap();
        let d = fit_maxent(&ms).unwrap();
        assert_eq!(d.point_mass, Some(3.0));
        assert_eq!(d.expect(|x| (x - 1.0).max(0.0), &[1.0]).unwrap(), 2.0);
    }
}
