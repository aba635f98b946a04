//! Seasonal dividend futures curves and the matching deterministic shift of
//! the dividend rate.
//!
//! The curve `f_0` lives on a uniform grid over `[0, I]` years. It minimizes
//! `a f(0)² + b f'(0)² + ∫ f''(u)² du` (discretized with one-sided first and
//! central second differences) subject to trapezoidal bucket integrals
//! `∫_{bucket j of year i} f = w_j F_i`, optionally with `f ≥ 0`.

use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::pricing::PricingModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapOptions {
    /// Grid intervals per year; rounded up to a multiple of the bucket count.
    pub points_per_year: usize,
    pub nonnegative: bool,
    /// Weights of the `f(0)²` and `f'(0)²` terms.
    pub boundary_weights: (f64, f64),
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        BootstrapOptions {
            points_per_year: 52,
            nonnegative: false,
            boundary_weights: (1.0, 1.0),
        }
    }
}

/// A bootstrapped instantaneous futures curve, linear between grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct SeasonalCurve {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
    pub targets: Vec<f64>,
    /// Normwise relative residual of the stationarity condition, counting
    /// negative bound multipliers as violations.
    pub kkt_residual: f64,
    /// Largest absolute bucket constraint error.
    pub constraint_error: f64,
    /// Active-set iterations (0 without the sign constraint).
    pub iterations: usize,
}

fn check_weights(w: &[f64]) -> Result<()> {
    if w.is_empty() {
        return Err(Error::InvalidArgument("need at least one bucket weight".into()));
    }
    if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidArgument("bucket weights must be finite and non-negative".into()));
    }
    let s: f64 = w.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("bucket weights sum to {s}, not 1")));
    }
    Ok(())
}

/// Normalized bucket weights from a series of `(time, amount)` payments:
/// amounts are summed by position within the year.
pub fn estimate_weights(payments: &[(f64, f64)], buckets: usize) -> Result<Vec<f64>> {
    if buckets == 0 {
        return Err(Error::InvalidArgument("need at least one bucket".into()));
    }
    let mut w = vec![0.0; buckets];
    for &(t, a) in payments {
        if !(t.is_finite() && a.is_finite() && a >= 0.0) {
            return Err(Error::InvalidArgument(format!("bad payment ({t}, {a})")));
        }
        let j = ((t - t.floor()) * buckets as f64).floor() as usize;
        w[j.min(buckets - 1)] += a;
    }
    let total: f64 = w.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidArgument("payments sum to zero".into()));
    }
    Ok(w.into_iter().map(|v| v / total).collect())
}

struct Problem {
    h: f64,
    q: DMatrix<f64>,
    a: DMatrix<f64>,
    b: DVector<f64>,
}

/// Builds the discrete program scaled so that `Q` and `A` have entries of
/// order one: `Q ← h³Q`, rows of `A` and `b` divided by `h`.
fn build_problem(targets: &[f64], weights: &[f64], per_year: usize, opts: &BootstrapOptions) -> Problem {
    let years = targets.len();
    let buckets = weights.len();
    let m = years * per_year;
    let n = m + 1;
    let h = 1.0 / per_year as f64;
    let h3 = h * h * h;
    let mut q = DMatrix::zeros(n, n);
    q[(0, 0)] += opts.boundary_weights.0 * h3;
    // f'(0) ≈ (f1 − f0)/h
    let c = opts.boundary_weights.1 * h;
    q[(0, 0)] += c;
    q[(1, 1)] += c;
    q[(0, 1)] -= c;
    q[(1, 0)] -= c;
    // h Σ ((f_{k+1} − 2f_k + f_{k−1})/h²)², times h³
    let stencil = [1.0, -2.0, 1.0];
    for k in 1..m {
        for (r, sr) in stencil.iter().enumerate() {
            for (s, ss) in stencil.iter().enumerate() {
                q[(k - 1 + r, k - 1 + s)] += sr * ss;
            }
        }
    }
    let per_bucket = per_year / buckets;
    let mut a = DMatrix::zeros(years * buckets, n);
    let mut b = DVector::zeros(years * buckets);
    for i in 0..years {
        for j in 0..buckets {
            let row = i * buckets + j;
            let lo = i * per_year + j * per_bucket;
            for k in lo..lo + per_bucket {
                a[(row, k)] += 0.5;
                a[(row, k + 1)] += 0.5;
            }
            b[row] = weights[j] * targets[i] / h;
        }
    }
    Problem { h, q, a, b }
}

/// Minimizes `½gᵀQg` subject to `Ag = b` and `g_k = 0` for `k ∈ fixed`.
/// Returns `g` and the equality multipliers `μ` (with `Qg + Aᵀμ = ν`, `ν`
/// supported on `fixed`).
fn solve_eqp(p: &Problem, fixed: &[bool]) -> Result<(DVector<f64>, DVector<f64>)> {
    let free: Vec<usize> = (0..fixed.len()).filter(|&k| !fixed[k]).collect();
    let rows: Vec<usize> = (0..p.a.nrows())
        .filter(|&r| free.iter().any(|&k| p.a[(r, k)] != 0.0) || p.b[r] != 0.0)
        .collect();
    let (nf, nr) = (free.len(), rows.len());
    let mut kkt = DMatrix::zeros(nf + nr, nf + nr);
    for (i, &ki) in free.iter().enumerate() {
        for (j, &kj) in free.iter().enumerate() {
            kkt[(i, j)] = p.q[(ki, kj)];
        }
        for (r, &row) in rows.iter().enumerate() {
            kkt[(i, nf + r)] = p.a[(row, ki)];
            kkt[(nf + r, i)] = p.a[(row, ki)];
        }
    }
    let mut rhs = DVector::zeros(nf + nr);
    for (r, &row) in rows.iter().enumerate() {
        rhs[nf + r] = p.b[row];
    }
    let lu = kkt.clone().lu();
    let mut z = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("bootstrap optimality system".into()))?;
    for _ in 0..2 {
        let r = &rhs - &kkt * &z;
        if let Some(dz) = lu.solve(&r) {
            z += dz;
        }
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular("bootstrap optimality system".into()));
    }
    let mut g = DVector::zeros(fixed.len());
    for (i, &k) in free.iter().enumerate() {
        g[k] = z[i];
    }
    let mut mu = DVector::zeros(p.a.nrows());
    for (r, &row) in rows.iter().enumerate() {
        mu[row] = z[nf + r];
    }
    Ok((g, mu))
}

/// `(normwise stationarity residual ‖Qg + Aᵀμ − ν‖ / (‖Q‖‖g‖ + ‖Aᵀ‖‖μ‖),
/// max |Ag − b|)`, the latter in unscaled units. The bound multipliers `ν`
/// are read off the fixed coordinates.
fn residuals(p: &Problem, g: &DVector<f64>, mu: &DVector<f64>, fixed: &[bool], forced: &[bool]) -> (f64, f64) {
    let qg = &p.q * g;
    let am = p.a.transpose() * mu;
    let mut stat: f64 = 0.0;
    // points of zero-target buckets are pinned by their own free multiplier
    for k in (0..g.len()).filter(|&k| !forced[k]) {
        let r = qg[k] + am[k];
        // a bound multiplier must be non-negative; otherwise it counts
        let r = if fixed[k] { (-r).max(0.0) } else { r.abs() };
        stat = stat.max(r);
    }
    let norm_inf = |m: &DMatrix<f64>| m.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let scale = (norm_inf(&p.q) * g.amax() + norm_inf(&p.a.transpose()) * mu.amax()).max(f64::MIN_POSITIVE);
    let cons = (&p.a * g - &p.b).amax() * p.h;
    (stat / scale, cons)
}

/// A feasible non-negative start: in every bucket the interior grid points
/// carry a constant, the boundary points are zero.
fn feasible_start(p: &Problem, per_bucket: usize) -> DVector<f64> {
    let n = p.q.nrows();
    let mut g = DVector::zeros(n);
    for row in 0..p.a.nrows() {
        let lo = row * per_bucket;
        let c = p.b[row] / (per_bucket - 1) as f64;
        for k in lo + 1..lo + per_bucket {
            g[k] = c;
        }
    }
    g
}

/// Maximum-smoothness curve reproducing `w_j F_i` on every bucket.
pub fn bootstrap_curve(targets: &[f64], weights: &[f64], opts: &BootstrapOptions) -> Result<SeasonalCurve> {
    check_weights(weights)?;
    if targets.is_empty() || targets.iter().any(|f| !f.is_finite()) {
        return Err(Error::InvalidArgument("need at least one finite futures target".into()));
    }
    if opts.points_per_year == 0 {
        return Err(Error::InvalidArgument("points per year must be positive".into()));
    }
    let buckets = weights.len();
    let per_bucket = opts.points_per_year.div_ceil(buckets).max(2);
    let per_year = per_bucket * buckets;
    let p = build_problem(targets, weights, per_year, opts);
    let n = p.q.nrows();
    let mut fixed = vec![false; n];
    // with f >= 0, a zero target forces the whole bucket to zero
    let mut forced = vec![false; n];
    if opts.nonnegative {
        for r in 0..p.b.len() {
            if p.b[r] == 0.0 {
                let lo = r * per_bucket;
                forced[lo..=lo + per_bucket].iter_mut().for_each(|v| *v = true);
            }
        }
    }
    let (g, mu, iterations) = if !opts.nonnegative {
        let (g, mu) = solve_eqp(&p, &fixed)?;
        (g, mu, 0)
    } else {
        if let Some(r) = (0..p.b.len()).find(|&r| p.b[r] < 0.0) {
            return Err(Error::Infeasible(format!(
                "bucket {} of year {} has negative target {} with f >= 0",
                r % buckets + 1,
                r / buckets + 1,
                p.b[r] * p.h
            )));
        }
        fixed.copy_from_slice(&forced);
        let mut g = feasible_start(&p, per_bucket);
        let mut it = 0;
        loop {
            it += 1;
            if it > 10 * n {
                return Err(Error::Singular("active set did not terminate".into()));
            }
            let (cand, mu) = solve_eqp(&p, &fixed)?;
            let step = &cand - &g;
            let scale = cand.amax().max(f64::MIN_POSITIVE);
            if step.amax() <= 1e-13 * scale {
                let lam = &p.q * &cand + p.a.transpose() * &mu;
                let release = (0..n)
                    .filter(|&k| fixed[k] && !forced[k])
                    .filter(|&k| lam[k] < -1e-12 * lam.amax())
                    .min_by(|&a, &b| lam[a].total_cmp(&lam[b]));
                match release {
                    Some(k) => {
                        fixed[k] = false;
                        g = cand;
                    }
                    None => break (cand, mu, it),
                }
            } else {
                let mut alpha = 1.0;
                let mut block = None;
                for k in 0..n {
                    if !fixed[k] && step[k] < 0.0 {
                        let a = -g[k] / step[k];
                        if a < alpha {
                            alpha = a;
                            block = Some(k);
                        }
                    }
                }
                g += step * alpha;
                if let Some(k) = block {
                    g[k] = 0.0;
                    fixed[k] = true;
                }
            }
        }
    };
    let mut values: Vec<f64> = g.iter().copied().collect();
    if opts.nonnegative {
        values.iter_mut().for_each(|v| *v = v.max(0.0));
    }
    let (kkt, cons) = residuals(&p, &DVector::from_vec(values.clone()), &mu, &fixed, &forced);
    Ok(SeasonalCurve {
        times: (0..n).map(|k| k as f64 * p.h).collect(),
        values,
        weights: weights.to_vec(),
        targets: targets.to_vec(),
        kkt_residual: kkt,
        constraint_error: cons,
        iterations,
    })
}

impl SeasonalCurve {
    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    fn step(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    fn check(&self, t: f64) -> Result<()> {
        if !(t >= 0.0 && t <= self.horizon() * (1.0 + 1e-14)) {
            return Err(Error::InvalidDates(format!(
                "time {t} outside the curve horizon [0, {}]",
                self.horizon()
            )));
        }
        Ok(())
    }

    /// Linear interpolation of `f_0`.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        let h = self.step();
        let k = ((t / h).floor() as usize).min(self.values.len() - 2);
        let s = (t - k as f64 * h) / h;
        Ok(self.values[k] * (1.0 - s) + self.values[k + 1] * s)
    }

    /// Exact integral of the interpolated curve over `[a, b]`.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        self.check(a)?;
        self.check(b)?;
        if b < a {
            return Ok(-self.integral(b, a)?);
        }
        let h = self.step();
        let cum = |t: f64| -> f64 {
            let k = ((t / h).floor() as usize).min(self.values.len() - 2);
            let full: f64 = (0..k).map(|i| 0.5 * h * (self.values[i] + self.values[i + 1])).sum();
            let s = t - k as f64 * h;
            let slope = (self.values[k + 1] - self.values[k]) / h;
            full + s * self.values[k] + 0.5 * slope * s * s
        };
        Ok(cum(b) - cum(a))
    }

    /// Integrals over every bucket, year by year.
    pub fn bucket_integrals(&self) -> Vec<f64> {
        let j = self.weights.len() as f64;
        let mut out = Vec::new();
        for i in 0..self.targets.len() {
            for b in 0..self.weights.len() {
                let a = i as f64 + b as f64 / j;
                let e = i as f64 + (b + 1) as f64 / j;
                out.push(self.integral(a, e.min(self.horizon())).unwrap_or(f64::NAN));
            }
        }
        out
    }
}

/// Instantaneous model futures rate `∂_T E_t[C_T] = e^{βT} pᵀ(β+G_1)E_t[H_1(X_T)]`.
pub fn model_futures_rate(model: &PricingModel, x: &[f64], t: f64, big_t: f64) -> Result<f64> {
    let m = model.expected_h1(x, big_t - t)?;
    let l = model.dividend_rate_loading();
    Ok((model.spec().beta * big_t).exp() * l.iter().zip(m.iter()).map(|(a, b)| a * b).sum::<f64>())
}

/// `δ(T) = f_0(T) − ∂_T E_0[C_T]`, the deterministic shift of the dividend
/// rate that makes the model reproduce the curve.
pub fn delta_shift(model: &PricingModel, x: &[f64], curve: &SeasonalCurve, big_t: f64) -> Result<f64> {
    Ok(curve.value_at(big_t)? - model_futures_rate(model, x, 0.0, big_t)?)
}

/// `∫_{T1}^{T2} δ(u) du`: added to every dividend accrual over `[T1, T2]`.
pub fn accrued_shift(model: &PricingModel, x: &[f64], curve: &SeasonalCurve, t1: f64, t2: f64) -> Result<f64> {
    Ok(curve.integral(t1, t2)? - model.dividend_futures(x, 0.0, t1, t2)?)
}

/// Dividend futures price in the shifted model.
pub fn shifted_futures(model: &PricingModel, x: &[f64], curve: &SeasonalCurve, t1: f64, t2: f64) -> Result<f64> {
    Ok(model.dividend_futures(x, 0.0, t1, t2)? + accrued_shift(model, x, curve, t1, t2)?)
}

/// Strike to use in the unshifted model for a dividend option on `[T1, T2]`
/// with strike `k` in the shifted model.
pub fn shifted_strike(
    model: &PricingModel,
    x: &[f64],
    curve: &SeasonalCurve,
    t1: f64,
    t2: f64,
    k: f64,
) -> Result<f64> {
    Ok(k - accrued_shift(model, x, curve, t1, t2)?)
}

fn parse_rows<R: Read>(r: R, header: [&str; 2]) -> Result<Vec<(String, f64)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(r);
    let got = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    if got.iter().collect::<Vec<_>>() != header {
        return Err(Error::Parse(format!("header must be '{}'", header.join(","))));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let v: f64 = rec[1]
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: bad number '{}'", i + 2, &rec[1])))?;
        out.push((rec[0].to_string(), v));
    }
    Ok(out)
}

fn indexed<R: Read>(r: R, header: [&str; 2]) -> Result<Vec<f64>> {
    let rows = parse_rows(r, header)?;
    let mut out = Vec::with_capacity(rows.len());
    for (i, (key, v)) in rows.into_iter().enumerate() {
        if key.parse::<usize>().ok() != Some(i + 1) {
            return Err(Error::Parse(format!(
                "{} must run 1, 2, ... in order; got '{key}' on line {}",
                header[0],
                i + 2
            )));
        }
        out.push(v);
    }
    Ok(out)
}

/// Weights CSV `bucket,weight` with buckets numbered from 1.
pub fn read_weights<R: Read>(r: R) -> Result<Vec<f64>> {
    let w = indexed(r, ["bucket", "weight"])?;
    check_weights(&w).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(w)
}

/// Futures targets CSV `year,futures` with years numbered from 1.
pub fn read_targets<R: Read>(r: R) -> Result<Vec<f64>> {
    indexed(r, ["year", "futures"])
}

/// Curve CSV `t,f0`.
pub fn write_curve<W: Write>(mut w: W, curve: &SeasonalCurve) -> Result<()> {
    writeln!(w, "t,f0")?;
    for (t, f) in curve.times.iter().zip(&curve.values) {
        writeln!(w, "{t:?},{f:?}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bucket_single_year() {
        let c = bootstrap_curve(&[1.0], &[1.0], &BootstrapOptions::default()).unwrap();
        assert!((c.integral(0.0, 1.0).unwrap() - 1.0).abs() < 1e-8);
        assert!(c.kkt_residual < 1e-8, "{}", c.kkt_residual);
    }

    #[test]
    fn mass_goes_to_the_weighted_bucket() {
        let c = bootstrap_curve(&[2.0, 3.0], &[0.0, 1.0, 0.0, 0.0], &BootstrapOptions::default()).unwrap();
        let want = [0.0, 2.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0];
        for (g, w) in c.bucket_integrals().iter().zip(want) {
            assert!((g - w).abs() < 1e-8, "{g} vs {w}");
        }
        assert!(c.constraint_error < 1e-8);
    }

    #[test]
    fn positivity_is_honoured() {
        let opts = BootstrapOptions {
            nonnegative: true,
            ..BootstrapOptions::default()
        };
        let c = bootstrap_curve(&[1.0, 1.5], &[0.1, 0.6, 0.0, 0.3], &opts).unwrap();
        assert!(c.values.iter().all(|v| *v >= 0.0));
        assert!(c.constraint_error < 1e-8);
        assert!(c.kkt_residual < 1e-8, "{}", c.kkt_residual);
        let free = bootstrap_curve(&[1.0, 1.5], &[0.1, 0.6, 0.0, 0.3], &BootstrapOptions::default()).unwrap();
        assert!(free.values.iter().any(|v| *v < 0.0));
    }

    #[test]
    fn negative_target_with_positivity_is_infeasible() {
        let opts = BootstrapOptions {
            nonnegative: true,
            ..BootstrapOptions::default()
        };
        assert!(matches!(bootstrap_curve(&[-1.0], &[1.0], &opts), Err(Error::Infeasible(_))));
    }

    #[test]
    fn weights_from_payments() {
        let w = estimate_weights(&[(0.1, 1.0), (0.4, 3.0), (1.45, 4.0)], 4).unwrap();
        assert_eq!(w, vec![0.125, 0.875, 0.0, 0.0]);
    }

    fn fixture() -> (PricingModel, Vec<f64>) {
        let p = crate::ljd::FourFactorParams::fixture();
        (PricingModel::new(p.to_spec().unwrap()).unwrap(), p.x0.to_vec())
    }

    #[test]
    fn shifted_model_reprices_the_targets() {
        let (model, x) = fixture();
        let targets = [0.02, 0.021, 0.019];
        let w = [0.05, 0.1, 0.15, 0.2, 0.05, 0.05, 0.1, 0.1, 0.05, 0.05, 0.05, 0.05];
        let c = bootstrap_curve(&targets, &w, &BootstrapOptions::default()).unwrap();
        for (i, f) in targets.iter().enumerate() {
            let got = shifted_futures(&model, &x, &c, i as f64, i as f64 + 1.0).unwrap();
            assert!((got - f).abs() < 1e-8 * f, "{got} vs {f}");
        }
        // δ is the gap between the curve and the model's futures rate
        let t = 1.3;
        let d = delta_shift(&model, &x, &c, t).unwrap();
        let h = 1e-5;
        let rate = (model.expected_cumulative(&x, 0.0, t + h).unwrap()
            - model.expected_cumulative(&x, 0.0, t - h).unwrap())
            / (2.0 * h);
        assert!((d - (c.value_at(t).unwrap() - rate)).abs() < 1e-8);
        assert!(delta_shift(&model, &x, &c, 3.5).is_err());
        let k = shifted_strike(&model, &x, &c, 1.0, 2.0, 0.02).unwrap();
        assert!((k - (0.02 - accrued_shift(&model, &x, &c, 1.0, 2.0).unwrap())).abs() < 1e-15);
    }

    #[test]
    fn self_consistent_targets_need_no_net_shift() {
        let (model, x) = fixture();
        let targets: Vec<f64> = (0..4)
            .map(|i| model.dividend_futures(&x, 0.0, i as f64, i as f64 + 1.0).unwrap())
            .collect();
        let c = bootstrap_curve(&targets, &[1.0], &BootstrapOptions::default()).unwrap();
        for i in 0..4 {
            let s = accrued_shift(&model, &x, &c, i as f64, i as f64 + 1.0).unwrap();
            assert!(s.abs() < 1e-8, "{s}");
        }
    }

    #[test]
    fn refinement_is_stable() {
        let w = [0.1, 0.4, 0.3, 0.2];
        let t = [1.0, 1.2];
        let coarse = bootstrap_curve(&t, &w, &BootstrapOptions::default()).unwrap();
        let fine = bootstrap_curve(
            &t,
            &w,
            &BootstrapOptions {
                points_per_year: 104,
                ..BootstrapOptions::default()
            },
        )
        .unwrap();
        for (a, b) in coarse.bucket_integrals().iter().zip(fine.bucket_integrals()) {
            assert!((a - b).abs() < 1e-8);
        }
        // L2 norm of the piecewise linear curve
        let l2 = |c: &SeasonalCurve| {
            let h = c.times[1] - c.times[0];
            c.values.windows(2).map(|v| h * (v[0] * v[0] + v[0] * v[1] + v[1] * v[1]) / 3.0).sum::<f64>().sqrt()
        };
        let diff = (l2(&coarse) - l2(&fine)).abs();
        assert!(diff < 1e-3, "{diff}");
    }

    #[test]
    fn monthly_positive_bootstrap_over_ten_years() {
        let w = [0.0, 0.02, 0.08, 0.25, 0.3, 0.15, 0.05, 0.03, 0.04, 0.03, 0.03, 0.02];
        let targets: Vec<f64> = (0..10).map(|i| 1.0 + 0.05 * i as f64).collect();
        let opts = BootstrapOptions {
            nonnegative: true,
            ..BootstrapOptions::default()
        };
        let c = bootstrap_curve(&targets, &w, &opts).unwrap();
        assert!(c.values.iter().all(|v| *v >= 0.0));
        assert!(c.constraint_error < 1e-8, "{}", c.constraint_error);
        assert!(c.kkt_residual < 1e-8, "{}", c.kkt_residual);
    }
}
