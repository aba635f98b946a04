//! Gauss-Legendre rules and adaptive composite grids.

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            // p1 = P_n(z), p0 = P_{n-1}(z)
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// A composite quadrature rule: concatenated Gauss-Legendre panels.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub panels: Vec<(f64, f64)>,
}

pub const ORDER: usize = 20;
const MAX_PANELS: usize = 4096;

fn panel_rule(a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> impl Iterator<Item = (f64, f64)> + '_ {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    rule.0.iter().zip(&rule.1).map(move |(x, w)| (c + h * x, h * w))
}

fn panel_sum(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    panel_rule(a, b, rule).map(|(x, w)| w * f(x)).sum()
}

impl Grid {
    pub fn from_panels(panels: Vec<(f64, f64)>) -> Grid {
        let rule = gauss_legendre(ORDER);
        let mut nodes = Vec::with_capacity(panels.len() * ORDER);
        let mut weights = Vec::with_capacity(panels.len() * ORDER);
        for &(a, b) in &panels {
            for (x, w) in panel_rule(a, b, &rule) {
                nodes.push(x);
                weights.push(w);
            }
        }
        Grid {
            nodes,
            weights,
            panels,
        }
    }

    /// Uniform panels over `[a, b]`.
    pub fn uniform(a: f64, b: f64, panels: usize) -> Grid {
        let h = (b - a) / panels as f64;
        Grid::from_panels(
            (0..panels)
                .map(|i| (a + h * i as f64, if i + 1 == panels { b } else { a + h * (i + 1) as f64 }))
                .collect(),
        )
    }

    /// Bisects panels of `[a, b]` until each panel of `f` agrees with the sum
    /// over its two halves to `tol` (or to rounding level where the panel
    /// integral is large). `breaks` are forced panel boundaries.
    pub fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], tol: f64) -> Result<Grid> {
        let rule = gauss_legendre(ORDER);
        let mut cuts = vec![a];
        let mut inner: Vec<f64> = breaks.iter().copied().filter(|&c| c > a && c < b).collect();
        inner.sort_by(|x, y| x.partial_cmp(y).unwrap());
        cuts.extend(inner);
        cuts.push(b);
        // start from a few panels per segment so narrow features are seen
        let mut stack: Vec<(f64, f64, usize)> = Vec::new();
        for s in cuts.windows(2).rev() {
            let n = 8;
            let h = (s[1] - s[0]) / n as f64;
            for i in (0..n).rev() {
                let hi = if i + 1 == n { s[1] } else { s[0] + h * (i + 1) as f64 };
                stack.push((s[0] + h * i as f64, hi, 0));
            }
        }
        let mut panels = Vec::new();
        while let Some((lo, hi, depth)) = stack.pop() {
            let whole = panel_sum(f, lo, hi, &rule);
            let mid = 0.5 * (lo + hi);
            let halves = panel_sum(f, lo, mid, &rule) + panel_sum(f, mid, hi, &rule);
            if !whole.is_finite() || !halves.is_finite() {
                return Err(Error::Quadrature(format!("non-finite integrand on [{lo}, {hi}]")));
            }
            // absolute tolerance, or rounding level on large panels
            if (whole - halves).abs() <= tol.max(1e-12 * halves.abs()) {
                panels.push((lo, mid));
                panels.push((mid, hi));
            } else if depth >= 40 || panels.len() + stack.len() > MAX_PANELS {
                return Err(Error::Quadrature(format!(
                    "no convergence on [{lo}, {hi}] at tolerance {tol}"
                )));
            } else {
                stack.push((mid, hi, depth + 1));
                stack.push((lo, mid, depth + 1));
            }
        }
        Ok(Grid::from_panels(panels))
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}
