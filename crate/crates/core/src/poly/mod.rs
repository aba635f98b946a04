//! Polynomial machinery: the monomial basis, polynomial coordinates, generator
//! matrices and the moment formula `E_t[H_n(X_T)] = e^{G_n (T-t)} H_n(X_t)`.

mod action;
mod basis;
mod coords;
mod expm;

pub use action::{expm_action, SparseMatrix};
pub(crate) use basis::rank_unchecked;
pub use basis::{basis_dim, basis_index, binomial, Basis, MultiIndex};
pub use coords::{poly_multiply, Poly};
pub use expm::matrix_exponential;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Matrix of a generator acting on `Pol_n` in the graded-lex monomial basis.
///
/// Row `f` holds the coordinates of `𝒢f`, so that
/// `d/dt E[H_n(X_t)] = G_n E[H_n(X_t)]`. The row of the constant monomial is
/// zero.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    basis: Basis,
    entries: SparseMatrix,
}

impl GeneratorMatrix {
    pub fn new(basis: Basis, entries: SparseMatrix) -> Result<Self> {
        if entries.dim() != basis.len() {
            return Err(Error::Dimension(format!(
                "generator of size {} for a basis of {} monomials",
                entries.dim(),
                basis.len()
            )));
        }
        Ok(GeneratorMatrix { basis, entries })
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn vars(&self) -> usize {
        self.basis.vars()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn sparse(&self) -> &SparseMatrix {
        &self.entries
    }

    pub fn dense(&self) -> DMatrix<f64> {
        self.entries.to_dense()
    }

    /// The generator restricted to `Pol_m`, `m ≤ n`.
    pub fn restrict(&self, m: usize) -> GeneratorMatrix {
        assert!(m <= self.degree(), "cannot restrict to a higher degree");
        let basis = Basis::new(self.vars(), m);
        let entries = self.entries.leading(basis.len());
        GeneratorMatrix { basis, entries }
    }

    /// `e^{G_n dt}` as a dense matrix.
    pub fn exp(&self, dt: f64) -> Result<DMatrix<f64>> {
        matrix_exponential(&(self.dense() * dt))
    }
}

/// Returns `e^{G_n dt} H_n(x)`, the conditional expectations of all basis
/// monomials `dt` years ahead given the current state `x`.
pub fn moment_formula(g: &GeneratorMatrix, x: &[f64], dt: f64) -> Result<Vec<f64>> {
    if dt < 0.0 {
        return Err(Error::InvalidDates(format!("negative horizon {dt}")));
    }
    MomentEngine::new(g, x)?.basis_expectations(dt, g.degree())
}

/// `E_t[outer(X_{t1}) · E_{t1}[inner(X_{t2})]]` for a process started at `x`
/// at time `t`.
pub fn two_date_moments(
    g: &GeneratorMatrix,
    x: &[f64],
    t: f64,
    t1: f64,
    t2: f64,
    inner: &Poly,
    outer: &Poly,
) -> Result<f64> {
    if !(t <= t1 && t1 <= t2) {
        return Err(Error::InvalidDates(format!(
            "two-date moment needs t <= t1 <= t2, got {t}, {t1}, {t2}"
        )));
    }
    let engine = MomentEngine::new(g, x)?;
    let pushed = engine.conditional(inner, t2 - t1)?;
    let product = outer.rescale(engine.scale()).multiply(&pushed);
    let u = engine.scaled_expectations(t1 - t, product.degree())?;
    Ok(product.pair(&u))
}

/// Moment computations anchored at a fixed current state.
///
/// Internally the state is rescaled componentwise so that the anchor becomes
/// the all-ones vector; the generator is transformed by the matching diagonal
/// similarity. This keeps every vector entry of order one even when factors
/// live on very different scales.
#[derive(Debug, Clone)]
pub struct MomentEngine {
    d: usize,
    scale: Vec<f64>,
    // x / scale: entries are ±1, or 0 for zero coordinates
    anchor: Vec<f64>,
    scaled: SparseMatrix,
    degree: usize,
}

impl MomentEngine {
    pub fn new(g: &GeneratorMatrix, x: &[f64]) -> Result<Self> {
        if x.len() != g.vars() {
            return Err(Error::Dimension(format!(
                "state of length {} for a {}-factor generator",
                x.len(),
                g.vars()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite state".into()));
        }
        let scale: Vec<f64> = x
            .iter()
            .map(|&v| if v != 0.0 { v.abs() } else { 1.0 })
            .collect();
        let anchor = x.iter().zip(&scale).map(|(v, s)| v / s).collect();
        let weights = g.basis().evaluate(&scale);
        let scaled = g.sparse().similarity(&weights);
        Ok(MomentEngine {
            d: g.vars(),
            scale,
            anchor,
            scaled,
            degree: g.degree(),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    fn check_degree(&self, m: usize) -> Result<()> {
        if m > self.degree {
            return Err(Error::MonomialOutsideBasis {
                degree: m,
                max: self.degree,
            });
        }
        Ok(())
    }

    /// `E[H_m(X_{t+dt}/s)]` in rescaled coordinates.
    pub fn scaled_expectations(&self, dt: f64, m: usize) -> Result<Vec<f64>> {
        self.check_degree(m)?;
        let basis = Basis::new(self.d, m);
        let h0 = basis.evaluate(&self.anchor);
        let a = self.scaled.leading(basis.len());
        expm_action(&a, dt, &h0, false)
    }

    /// `E[H_m(X_{t+dt})]` in original coordinates.
    pub fn basis_expectations(&self, dt: f64, m: usize) -> Result<Vec<f64>> {
        let u = self.scaled_expectations(dt, m)?;
        let w = Basis::new(self.d, m).evaluate(&self.scale);
        Ok(u.iter().zip(&w).map(|(a, b)| a * b).collect())
    }

    /// `E_t[p(X_{t+dt})]`.
    pub fn expect(&self, p: &Poly, dt: f64) -> Result<f64> {
        let u = self.scaled_expectations(dt, p.degree())?;
        Ok(p.rescale(&self.scale).pair(&u))
    }

    /// Rescaled coordinates of `y ↦ E[p(X_{s+dt}) | X_s = s ⊙ y]`.
    pub fn conditional(&self, p: &Poly, dt: f64) -> Result<Poly> {
        self.check_degree(p.degree())?;
        let c = p.rescale(&self.scale);
        let a = self.scaled.leading(c.coeffs().len());
        let pushed = expm_action(&a, dt, c.coeffs(), true)?;
        Ok(Poly::from_coeffs(self.d, p.degree(), pushed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Generator of the deterministic ODE dx = k(θ - x)dt on Pol_n, d = 1.
    fn ou_generator(k: f64, theta: f64, n: usize) -> GeneratorMatrix {
        let basis = Basis::new(1, n);
        let mut t = Vec::new();
        for a in 1..=n {
            // G x^a = a kθ x^{a-1} - a k x^a
            t.push((a, a - 1, a as f64 * k * theta));
            t.push((a, a, -(a as f64) * k));
        }
        let m = SparseMatrix::from_triplets(basis.len(), t);
        GeneratorMatrix::new(basis, m).unwrap()
    }

    #[test]
    fn zero_horizon_returns_basis() {
        let g = ou_generator(0.7, 2.0, 3);
        let m = moment_formula(&g, &[1.5], 0.0).unwrap();
        assert_eq!(m, vec![1.0, 1.5, 2.25, 3.375]);
    }

    #[test]
    fn scalar_ode_mean() {
        let (k, th, x) = (0.8, 2.0, 0.5);
        let g = ou_generator(k, th, 1);
        for &dt in &[0.1, 1.0, 3.0] {
            let m = moment_formula(&g, &[x], dt).unwrap();
            assert_eq!(m[0], 1.0);
            let want = th + (-k * dt).exp() * (x - th);
            assert!((m[1] - want).abs() < 1e-13);
        }
    }

    #[test]
    fn two_date_reductions() {
        let g = ou_generator(0.8, 2.0, 4);
        let x = [0.5];
        let inner = Poly::linear(&[0.3, 1.0]).powers(2).pop().unwrap();
        let outer = Poly::linear(&[1.0, -0.5]);
        // t1 = t2 collapses to a single expectation of the product
        let a = two_date_moments(&g, &x, 0.0, 1.3, 1.3, &inner, &outer).unwrap();
        let b = MomentEngine::new(&g, &x)
            .unwrap()
            .expect(&outer.multiply(&inner), 1.3)
            .unwrap();
        assert!((a - b).abs() < 1e-12 * b.abs());
        // outer ≡ 1 is the tower property
        let one = Poly::constant(1, 1.0);
        let c = two_date_moments(&g, &x, 0.0, 0.4, 1.3, &inner, &one).unwrap();
        let e = MomentEngine::new(&g, &x).unwrap().expect(&inner, 1.3).unwrap();
        assert!((c - e).abs() < 1e-12 * e.abs());
    }

    #[test]
    fn negative_horizon_is_rejected() {
        let g = ou_generator(0.8, 2.0, 1);
        assert!(moment_formula(&g, &[1.0], -0.1).is_err());
    }
}
