use nalgebra::DMatrix;

use super::spec::{validate_spec, ModelSpec, Violation};
use crate::error::{Error, Result};

/// Parsimonious four-factor model on `X = (X0^I, X1^I, X0^D, X1^D)`.
///
/// The rate block `X0^I → X1^I → θ^I = 1` drives the discount factor
/// `ζ_t = e^{−γt} X0^I`, the dividend block drives `C_t = e^{βt} X0^D`
/// with `β = κ0^D`, so that `D_t = e^{βt} κ0^D X1^D`. `ρ` couples the
/// Brownian motions of `X1^I` and `X1^D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourFactorParams {
    pub kappa0_i: f64,
    pub kappa1_i: f64,
    pub kappa0_d: f64,
    pub kappa1_d: f64,
    pub theta_d: f64,
    pub sigma_i: f64,
    pub sigma_d: f64,
    pub rho: f64,
    pub gamma: f64,
    /// `(X0^I, X1^I, X0^D, X1^D)`; `X0^D` is normalized to 1.
    pub x0: [f64; 4],
}

impl FourFactorParams {
    pub fn beta(&self) -> f64 {
        self.kappa0_d
    }

    /// `max{0, (σ^I)² − 2κ1^I, (σ^D)² − 2κ1^D, σ^Iσ^Dρ − κ1^I − κ1^D}`, the
    /// level that `γ − β` must exceed for a finite stock price.
    pub fn finiteness_threshold(&self) -> f64 {
        [
            0.0,
            self.sigma_i * self.sigma_i - 2.0 * self.kappa1_i,
            self.sigma_d * self.sigma_d - 2.0 * self.kappa1_d,
            self.sigma_i * self.sigma_d * self.rho - self.kappa1_i - self.kappa1_d,
        ]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let positive = [
            self.kappa0_i,
            self.kappa1_i,
            self.kappa0_d,
            self.kappa1_d,
            self.theta_d,
            self.sigma_i,
            self.sigma_d,
        ];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            out.push(Violation::NonFinite("non-positive rate, level or volatility"));
        }
        if !(-1.0..=1.0).contains(&self.rho) {
            out.push(Violation::NonFinite("correlation outside [-1,1]"));
        }
        for (i, &x) in self.x0.iter().enumerate() {
            if !(x.is_finite() && x > 0.0) {
                out.push(Violation::NonPositiveState(i + 1));
            }
        }
        let gap = self.gamma - self.beta();
        let max_eig = self.finiteness_threshold();
        if !(gap > max_eig) {
            out.push(Violation::StockPriceInfinite { gap, max_eig });
        }
        out
    }

    /// Equivalent [`ModelSpec`]. Errors if the parameter constraints fail.
    pub fn to_spec(&self) -> Result<ModelSpec> {
        let v = self.violations();
        if !v.is_empty() {
            let msg = v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ");
            return Err(Error::InvalidModel(msg));
        }
        Ok(self.to_spec_unchecked())
    }

    /// Builds the `ModelSpec` without checking the parameter constraints.
    pub fn to_spec_unchecked(&self) -> ModelSpec {
        let (k0i, k1i, k0d, k1d) = (self.kappa0_i, self.kappa1_i, self.kappa0_d, self.kappa1_d);
        #[rustfmt::skip]
        let kappa = DMatrix::from_row_slice(4, 4, &[
            k0i, -k0i, 0.0, 0.0,
            0.0, k1i, 0.0, 0.0,
            0.0, 0.0, k0d, -k0d,
            0.0, 0.0, 0.0, k1d,
        ]);
        let rho_c = (1.0 - self.rho * self.rho).max(0.0).sqrt();
        let mut sigma = DMatrix::zeros(4, 4);
        sigma[(1, 1)] = self.sigma_i;
        sigma[(3, 1)] = self.sigma_d * self.rho;
        sigma[(3, 3)] = self.sigma_d * rho_c;
        ModelSpec {
            kappa,
            theta: vec![1.0, 1.0, self.theta_d, self.theta_d],
            sigma,
            jumps: None,
            p: vec![0.0, 0.0, 0.0, 1.0, 0.0],
            q: vec![0.0, 1.0, 0.0, 0.0, 0.0],
            beta: self.beta(),
            gamma: self.gamma,
            x0: self.x0.to_vec(),
        }
    }

    /// Recovers the parameters from a spec with the four-factor structure.
    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        if spec.dim() != 4 || spec.jumps.as_ref().is_some_and(|j| j.intensity != 0.0) {
            return Err(Error::InvalidModel("not a four-factor diffusion".into()));
        }
        let k = &spec.kappa;
        let sigma_i = spec.sigma[(1, 1)];
        let sd_rho = spec.sigma[(3, 1)];
        let sd_c = spec.sigma[(3, 3)];
        let sigma_d = (sd_rho * sd_rho + sd_c * sd_c).sqrt();
        let rho = if sigma_d > 0.0 { sd_rho / sigma_d } else { 0.0 };
        let params = FourFactorParams {
            kappa0_i: k[(0, 0)],
            kappa1_i: k[(1, 1)],
            kappa0_d: k[(2, 2)],
            kappa1_d: k[(3, 3)],
            theta_d: spec.theta[3],
            sigma_i,
            sigma_d,
            rho,
            gamma: spec.gamma,
            x0: [spec.x0[0], spec.x0[1], spec.x0[2], spec.x0[3]],
        };
        let rebuilt = params.to_spec_unchecked();
        let close = |a: &[f64], b: &[f64]| {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12 * (1.0 + y.abs()))
        };
        let same = close(rebuilt.kappa.as_slice(), spec.kappa.as_slice())
            && close(rebuilt.sigma.as_slice(), spec.sigma.as_slice())
            && close(&rebuilt.theta, &spec.theta)
            && close(&rebuilt.p, &spec.p)
            && close(&rebuilt.q, &spec.q)
            && (rebuilt.beta - spec.beta).abs() <= 1e-12 * (1.0 + spec.beta.abs());
        if !same {
            return Err(Error::InvalidModel(
                "spec does not have the four-factor structure".into(),
            ));
        }
        Ok(params)
    }

    /// A fixed, moderately volatile parameter set used by examples and tests.
    pub fn fixture() -> Self {
        FourFactorParams {
            kappa0_i: 0.1,
            kappa1_i: 0.05,
            kappa0_d: 0.015,
            kappa1_d: 0.3,
            theta_d: 1.0,
            sigma_i: 0.1,
            sigma_d: 0.25,
            rho: 0.3,
            gamma: 0.055,
            x0: [1.0, 1.3, 1.0, 1.5],
        }
    }

    /// Validates the resulting spec with the general model checks as well.
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = self.violations();
        if v.is_empty() {
            v = validate_spec(&self.to_spec_unchecked());
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ljd::spec::{g2_eigenvalues_closed_form, g2_max_real_eigenvalue};

    #[test]
    fn kappa_has_block_upper_triangular_form() {
        let p = FourFactorParams::fixture();
        let s = p.to_spec().unwrap();
        assert_eq!(s.kappa[(0, 1)], -p.kappa0_i);
        assert_eq!(s.kappa[(2, 3)], -p.kappa0_d);
        assert_eq!(s.kappa[(1, 0)], 0.0);
        assert_eq!(s.kappa.upper_triangle(), s.kappa);
        let a = s.diffusion_covariance();
        assert!((a[(1, 3)] - p.sigma_i * p.sigma_d * p.rho).abs() < 1e-15);
        assert!((a[(3, 3)] - p.sigma_d * p.sigma_d).abs() < 1e-15);
    }

    #[test]
    fn fixture_is_valid_and_round_trips() {
        let p = FourFactorParams::fixture();
        assert!(p.validate().is_empty(), "{:?}", p.validate());
        let back = FourFactorParams::from_spec(&p.to_spec().unwrap()).unwrap();
        for (a, b) in [
            (back.rho, p.rho),
            (back.sigma_d, p.sigma_d),
            (back.gamma, p.gamma),
        ] {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn threshold_matches_spectrum() {
        let p = FourFactorParams::fixture();
        let s = p.to_spec().unwrap();
        let max_eig = g2_max_real_eigenvalue(&s).unwrap();
        assert!((max_eig - p.finiteness_threshold()).abs() < 1e-14);
        assert_eq!(g2_eigenvalues_closed_form(&s).unwrap().len(), 15);
    }

    #[test]
    fn zero_gap_is_rejected() {
        let mut p = FourFactorParams::fixture();
        p.gamma = p.beta();
        let v = validate_spec(&p.to_spec_unchecked());
        assert!(v.iter().any(|x| x.to_string().starts_with("stock price not finite")));
    }
}
