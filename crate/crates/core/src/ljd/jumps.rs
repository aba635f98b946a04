use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

/// Distribution `F(dz)` of the relative jump sizes `z ∈ (-1, ∞)^d`.
///
/// The generator only consumes the mixed moments
/// `∫ Π_j (1 + z_j)^{α_j} F(dz)`; the simulation oracle also draws samples.
#[derive(Debug, Clone, PartialEq)]
pub enum JumpDistribution {
    /// `log(1 + z) ~ N(mean, cov)`.
    LogNormal { mean: Vec<f64>, cov: DMatrix<f64> },
    /// `z = up` with probability `prob_up`, otherwise `z = down`.
    TwoPoint {
        up: Vec<f64>,
        down: Vec<f64>,
        prob_up: f64,
    },
}

/// Compound Poisson jump component: arrival intensity plus size law.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpLaw {
    pub intensity: f64,
    pub distribution: JumpDistribution,
}

impl JumpDistribution {
    pub fn dim(&self) -> usize {
        match self {
            JumpDistribution::LogNormal { mean, .. } => mean.len(),
            JumpDistribution::TwoPoint { up, .. } => up.len(),
        }
    }

    /// `∫ Π_j (1 + z_j)^{α_j} F(dz)`.
    pub fn mixed_moment(&self, alpha: &[u32]) -> f64 {
        match self {
            JumpDistribution::LogNormal { mean, cov } => {
                let a: Vec<f64> = alpha.iter().map(|&v| v as f64).collect();
                let mut quad = 0.0;
                for i in 0..a.len() {
                    for j in 0..a.len() {
                        quad += a[i] * cov[(i, j)] * a[j];
                    }
                }
                let lin: f64 = a.iter().zip(mean).map(|(x, m)| x * m).sum();
                (lin + 0.5 * quad).exp()
            }
            JumpDistribution::TwoPoint { up, down, prob_up } => {
                let prod = |z: &[f64]| -> f64 {
                    z.iter()
                        .zip(alpha)
                        .map(|(zj, &aj)| (1.0 + zj).powi(aj as i32))
                        .product()
                };
                prob_up * prod(up) + (1.0 - prob_up) * prod(down)
            }
        }
    }

    /// `∫ z F(dz)`.
    pub fn mean(&self) -> Vec<f64> {
        let d = self.dim();
        (0..d)
            .map(|i| {
                let mut e = vec![0u32; d];
                e[i] = 1;
                self.mixed_moment(&e) - 1.0
            })
            .collect()
    }

    /// `∫ z_i z_j F(dz)`.
    pub fn cross_moment(&self, i: usize, j: usize) -> f64 {
        let d = self.dim();
        let mut e = vec![0u32; d];
        e[i] += 1;
        e[j] += 1;
        let mut ei = vec![0u32; d];
        ei[i] = 1;
        let mut ej = vec![0u32; d];
        ej[j] = 1;
        self.mixed_moment(&e) - self.mixed_moment(&ei) - self.mixed_moment(&ej) + 1.0
    }

    /// True when the support lies in `(-1, ∞)^d`.
    pub fn support_ok(&self) -> bool {
        match self {
            JumpDistribution::LogNormal { mean, cov } => {
                mean.iter().all(|m| m.is_finite())
                    && cov.iter().all(|c| c.is_finite())
                    && cov.clone().cholesky().is_some()
                    || cov.iter().all(|&c| c == 0.0)
            }
            JumpDistribution::TwoPoint { up, down, prob_up } => {
                (0.0..=1.0).contains(prob_up)
                    && up.iter().chain(down).all(|&z| z > -1.0 && z.is_finite())
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            JumpDistribution::LogNormal { mean, cov } => {
                let d = mean.len();
                let l = cov
                    .clone()
                    .cholesky()
                    .map(|c| c.l())
                    .unwrap_or_else(|| DMatrix::zeros(d, d));
                let z = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
                let y = l * z;
                (0..d).map(|i| (mean[i] + y[i]).exp() - 1.0).collect()
            }
            JumpDistribution::TwoPoint { up, down, prob_up } => {
                if rng.random::<f64>() < *prob_up {
                    up.clone()
                } else {
                    down.clone()
                }
            }
        }
    }
}

impl JumpLaw {
    pub fn dim(&self) -> usize {
        self.distribution.dim()
    }

    pub fn mixed_moment(&self, alpha: &[u32]) -> f64 {
        self.distribution.mixed_moment(alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn zero_exponent_moment_is_one() {
        let ln = JumpDistribution::LogNormal {
            mean: vec![-0.1, 0.05],
            cov: DMatrix::from_row_slice(2, 2, &[0.04, 0.01, 0.01, 0.09]),
        };
        assert_eq!(ln.mixed_moment(&[0, 0]), 1.0);
        let tp = JumpDistribution::TwoPoint {
            up: vec![0.2],
            down: vec![-0.3],
            prob_up: 0.4,
        };
        assert_eq!(tp.mixed_moment(&[0]), 1.0);
        assert!((tp.mean()[0] - (0.4 * 0.2 - 0.6 * 0.3)).abs() < 1e-15);
        assert!((tp.cross_moment(0, 0) - (0.4 * 0.04 + 0.6 * 0.09)).abs() < 1e-15);
    }

    #[test]
    fn lognormal_sample_moments() {
        let ln = JumpDistribution::LogNormal {
            mean: vec![-0.1, 0.05],
            cov: DMatrix::from_row_slice(2, 2, &[0.04, 0.01, 0.01, 0.09]),
        };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let n = 200_000;
        let mut acc = [0.0; 3];
        for _ in 0..n {
            let z = ln.sample(&mut rng);
            acc[0] += z[0];
            acc[1] += z[1];
            acc[2] += z[0] * z[1];
        }
        let m = ln.mean();
        assert!((acc[0] / n as f64 - m[0]).abs() < 3e-3);
        assert!((acc[1] / n as f64 - m[1]).abs() < 3e-3);
        assert!((acc[2] / n as f64 - ln.cross_moment(0, 1)).abs() < 3e-3);
    }

    #[test]
    fn two_point_support_check() {
        let bad = JumpDistribution::TwoPoint {
            up: vec![0.5],
            down: vec![-1.0],
            prob_up: 0.5,
        };
        assert!(!bad.support_ok());
    }
}
