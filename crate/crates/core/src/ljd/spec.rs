use std::fmt;

use nalgebra::DMatrix;

use super::generator::build_generator;
use super::jumps::JumpLaw;
use crate::error::{Error, Result};

/// Parameters of a linear jump-diffusion factor model together with the
/// dividend and discount loadings.
///
/// Dynamics: `dX = κ(θ − X)dt + diag(X_{t−})(Σ dB + dJ)`, cumulative
/// dividends `C_t = e^{βt} pᵀH_1(X_t)` and discount factor
/// `ζ_t = e^{−γt} qᵀH_1(X_t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub kappa: DMatrix<f64>,
    pub theta: Vec<f64>,
    pub sigma: DMatrix<f64>,
    pub jumps: Option<JumpLaw>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub beta: f64,
    pub gamma: f64,
    pub x0: Vec<f64>,
}

/// One failed model condition.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Dimension(String),
    /// 1-based indices `(i, j)` with `κ_ij > 0`, `i ≠ j`.
    OffDiagonalKappa(usize, usize),
    /// 1-based index `i` with `(κθ)_i < 0`.
    NegativeDrift(usize),
    SigmaNotLowerTriangular(usize, usize),
    NegativeSigmaDiagonal(usize),
    NegativeLoading { vector: char, index: usize },
    ZeroLoading(char),
    NonPositiveState(usize),
    NegativeIntensity,
    JumpSupport,
    JumpMoments,
    DividendBound { beta: f64, bound: f64 },
    StockPriceInfinite { gap: f64, max_eig: f64 },
    NonFinite(&'static str),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Dimension(s) => write!(f, "dimension mismatch: {s}"),
            Violation::OffDiagonalKappa(i, j) => write!(f, "off-diagonal κ_{{{i}{j}}}>0"),
            Violation::NegativeDrift(i) => write!(f, "(κθ)_{i}<0"),
            Violation::SigmaNotLowerTriangular(i, j) => {
                write!(f, "Σ not lower triangular: Σ_{{{i}{j}}}≠0")
            }
            Violation::NegativeSigmaDiagonal(i) => write!(f, "Σ_{{{i}{i}}}<0"),
            Violation::NegativeLoading { vector, index } => {
                write!(f, "negative loading {vector}_{index}")
            }
            Violation::ZeroLoading(v) => write!(f, "loading {v} has no positive entry"),
            Violation::NonPositiveState(i) => write!(f, "initial state x0_{i} not positive"),
            Violation::NegativeIntensity => write!(f, "negative jump intensity"),
            Violation::JumpSupport => write!(f, "jump support not inside (-1,∞)^d"),
            Violation::JumpMoments => write!(f, "jump moments unavailable"),
            Violation::DividendBound { beta, bound } => {
                write!(f, "dividend rate can turn negative: β={beta} < bound {bound}")
            }
            Violation::StockPriceInfinite { gap, max_eig } => write!(
                f,
                "stock price not finite: γ−β={gap} does not exceed max eigenvalue {max_eig} of G_2"
            ),
            Violation::NonFinite(what) => write!(f, "non-finite {what}"),
        }
    }
}

impl ModelSpec {
    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    pub fn jump_intensity(&self) -> f64 {
        self.jumps.as_ref().map_or(0.0, |j| j.intensity)
    }

    /// `ΣΣᵀ`.
    pub fn diffusion_covariance(&self) -> DMatrix<f64> {
        &self.sigma * self.sigma.transpose()
    }

    /// `κθ`.
    pub fn drift_constant(&self) -> Vec<f64> {
        let d = self.dim();
        (0..d)
            .map(|i| (0..d).map(|j| self.kappa[(i, j)] * self.theta[j]).sum())
            .collect()
    }

    /// `ξ ∫ z_i z_j F(dz)`, zero without jumps.
    pub fn jump_cross_moment(&self, i: usize, j: usize) -> f64 {
        self.jumps
            .as_ref()
            .map_or(0.0, |law| law.intensity * law.distribution.cross_moment(i, j))
    }

    fn dimension_errors(&self) -> Vec<Violation> {
        let d = self.dim();
        let mut v = Vec::new();
        let mut check = |ok: bool, what: String| {
            if !ok {
                v.push(Violation::Dimension(what));
            }
        };
        check(d > 0, "no factors".into());
        check(
            self.kappa.nrows() == d && self.kappa.ncols() == d,
            format!("κ is {}x{}, expected {d}x{d}", self.kappa.nrows(), self.kappa.ncols()),
        );
        check(
            self.sigma.nrows() == d && self.sigma.ncols() == d,
            format!("Σ is {}x{}, expected {d}x{d}", self.sigma.nrows(), self.sigma.ncols()),
        );
        check(self.theta.len() == d, format!("θ has length {}", self.theta.len()));
        check(self.p.len() == d + 1, format!("p has length {}", self.p.len()));
        check(self.q.len() == d + 1, format!("q has length {}", self.q.len()));
        if let Some(j) = &self.jumps {
            check(j.dim() == d, format!("jump law has dimension {}", j.dim()));
        }
        v
    }

    fn finiteness_errors(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        let fields: [(&'static str, bool); 7] = [
            ("κ", self.kappa.iter().all(|x| x.is_finite())),
            ("θ", self.theta.iter().all(|x| x.is_finite())),
            ("Σ", self.sigma.iter().all(|x| x.is_finite())),
            ("p", self.p.iter().all(|x| x.is_finite())),
            ("q", self.q.iter().all(|x| x.is_finite())),
            ("β or γ", self.beta.is_finite() && self.gamma.is_finite()),
            ("x0", self.x0.iter().all(|x| x.is_finite())),
        ];
        for (name, ok) in fields {
            if !ok {
                v.push(Violation::NonFinite(name));
            }
        }
        v
    }
}

/// Checks every model condition; an empty list means the model is usable.
pub fn validate_spec(spec: &ModelSpec) -> Vec<Violation> {
    let mut out = spec.dimension_errors();
    if !out.is_empty() {
        return out;
    }
    out.extend(spec.finiteness_errors());
    if !out.is_empty() {
        return out;
    }
    let d = spec.dim();
    for i in 0..d {
        for j in 0..d {
            if i != j && spec.kappa[(i, j)] > 0.0 {
                out.push(Violation::OffDiagonalKappa(i + 1, j + 1));
            }
        }
    }
    for (i, b) in spec.drift_constant().iter().enumerate() {
        if *b < 0.0 {
            out.push(Violation::NegativeDrift(i + 1));
        }
    }
    for i in 0..d {
        for j in (i + 1)..d {
            if spec.sigma[(i, j)] != 0.0 {
                out.push(Violation::SigmaNotLowerTriangular(i + 1, j + 1));
            }
        }
        if spec.sigma[(i, i)] < 0.0 {
            out.push(Violation::NegativeSigmaDiagonal(i + 1));
        }
    }
    for (name, vec) in [('p', &spec.p), ('q', &spec.q)] {
        for (k, &c) in vec.iter().enumerate() {
            if c < 0.0 {
                out.push(Violation::NegativeLoading {
                    vector: name,
                    index: k,
                });
            }
        }
        if !vec.iter().any(|&c| c > 0.0) {
            out.push(Violation::ZeroLoading(name));
        }
    }
    for (i, &x) in spec.x0.iter().enumerate() {
        if x <= 0.0 {
            out.push(Violation::NonPositiveState(i + 1));
        }
    }
    if let Some(j) = &spec.jumps {
        if j.intensity < 0.0 || !j.intensity.is_finite() {
            out.push(Violation::NegativeIntensity);
        }
        if !j.distribution.support_ok() {
            out.push(Violation::JumpSupport);
        }
        let ok = (0..d).all(|i| {
            let mut a = vec![0u32; d];
            a[i] = 2;
            j.mixed_moment(&a).is_finite()
        });
        if !ok {
            out.push(Violation::JumpMoments);
        }
    }
    if !out.is_empty() {
        return out;
    }

    let bound = match beta_lower_bound(spec) {
        Ok(b) => b,
        // constant dividend stream e^{βt}βp_0 needs β ≥ 0
        Err(Error::DeterministicDividends) => 0.0,
        Err(_) => f64::NAN,
    };
    if spec.beta < bound {
        out.push(Violation::DividendBound {
            beta: spec.beta,
            bound,
        });
    }
    match g2_max_real_eigenvalue(spec) {
        Ok(max_eig) => {
            let gap = spec.gamma - spec.beta;
            if gap <= max_eig {
                out.push(Violation::StockPriceInfinite { gap, max_eig });
            }
        }
        Err(_) => out.push(Violation::JumpMoments),
    }
    out
}

/// Validates and converts violations into an error.
pub fn ensure_valid(spec: &ModelSpec) -> Result<()> {
    let v = validate_spec(spec);
    if v.is_empty() {
        return Ok(());
    }
    let msg = v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ");
    if let Some(Violation::StockPriceInfinite { gap, max_eig }) = v
        .iter()
        .find(|x| matches!(x, Violation::StockPriceInfinite { .. }))
        .filter(|_| v.len() == 1)
    {
        return Err(Error::StockPriceInfinite {
            max_eig: *max_eig,
            gap: *gap,
        });
    }
    Err(Error::InvalidModel(msg))
}

/// Smallest β that keeps the dividend rate non-negative on `(0,∞)^d`.
pub fn beta_lower_bound(spec: &ModelSpec) -> Result<f64> {
    let d = spec.dim();
    if spec.p.len() != d + 1 || spec.kappa.nrows() != d {
        return Err(Error::Dimension("p or κ does not match the state".into()));
    }
    let pt = &spec.p[1..];
    if !pt.iter().any(|&c| c > 0.0) {
        return Err(Error::DeterministicDividends);
    }
    let mut bound = f64::NEG_INFINITY;
    if spec.p[0] > 0.0 {
        let kt = spec.drift_constant();
        let num: f64 = pt.iter().zip(&kt).map(|(a, b)| a * b).sum();
        bound = bound.max(-num / spec.p[0]);
    }
    for j in 0..d {
        if pt[j] > 0.0 {
            let col: f64 = (0..d).map(|i| pt[i] * spec.kappa[(i, j)]).sum();
            bound = bound.max(col / pt[j]);
        }
    }
    Ok(bound)
}

fn triangular(m: &DMatrix<f64>) -> bool {
    m.is_square() && (m.upper_triangle() == *m || m.lower_triangle() == *m)
}

/// Eigenvalues of `G_2` for a triangular κ in closed form: `0`, `−κ_ii`, and
/// `−κ_ii − κ_jj + (ΣΣᵀ)_ij + ξ∫z_i z_j F(dz)` for `i ≤ j`.
pub fn g2_eigenvalues_closed_form(spec: &ModelSpec) -> Result<Vec<f64>> {
    if !triangular(&spec.kappa) {
        return Err(Error::NotTriangular);
    }
    let d = spec.dim();
    let a = spec.diffusion_covariance();
    let mut out = vec![0.0];
    out.extend((0..d).map(|i| -spec.kappa[(i, i)]));
    for i in 0..d {
        for j in i..d {
            out.push(
                -spec.kappa[(i, i)] - spec.kappa[(j, j)]
                    + a[(i, j)]
                    + spec.jump_cross_moment(i, j),
            );
        }
    }
    if out.iter().any(|v| !v.is_finite()) {
        let alpha = vec![0u32; d];
        return Err(Error::JumpMomentsUnavailable(alpha));
    }
    Ok(out)
}

/// Eigenvalues of `G_2` from a dense eigensolver, as `(re, im)` pairs.
pub fn g2_eigenvalues_numeric(spec: &ModelSpec) -> Result<Vec<(f64, f64)>> {
    let ev = build_generator(spec, 2)?.dense().complex_eigenvalues();
    Ok(ev.iter().map(|c| (c.re, c.im)).collect())
}

/// Largest real part among the eigenvalues of `G_2`; uses the closed form
/// when κ is triangular.
pub fn g2_max_real_eigenvalue(spec: &ModelSpec) -> Result<f64> {
    let ev: Vec<f64> = match g2_eigenvalues_closed_form(spec) {
        Ok(v) => v,
        Err(Error::NotTriangular) => g2_eigenvalues_numeric(spec)?
            .into_iter()
            .map(|(re, _)| re)
            .collect(),
        Err(e) => return Err(e),
    };
    Ok(ev.into_iter().fold(f64::NEG_INFINITY, f64::max))
}
