use super::spec::ModelSpec;
use crate::error::{Error, Result};
use crate::poly::{binomial, rank_unchecked, Basis, GeneratorMatrix, SparseMatrix};

/// Matrix of the LJD generator on `Pol_n`.
///
/// For `f = x^α`:
/// * drift `Σ_i α_i x^{α−e_i} [(κθ)_i − Σ_j κ_ij x_j]`,
/// * diffusion `½ Σ_ij (ΣΣᵀ)_ij (α_iα_j − δ_ij α_i) x^α`,
/// * jumps `ξ x^α [∫Π(1+z_j)^{α_j}F(dz) − 1 − αᵀ∫zF(dz)]`.
///
/// Diffusion and jumps are diagonal in the monomial basis, so `G_1` only
/// sees the drift.
pub fn build_generator(spec: &ModelSpec, n: usize) -> Result<GeneratorMatrix> {
    let d = spec.dim();
    if spec.kappa.nrows() != d || spec.kappa.ncols() != d || spec.theta.len() != d {
        return Err(Error::Dimension("κ or θ does not match the state".into()));
    }
    if spec.sigma.nrows() != d || spec.sigma.ncols() != d {
        return Err(Error::Dimension("Σ does not match the state".into()));
    }
    let basis = Basis::new(d, n);
    let kt = spec.drift_constant();
    let a = spec.diffusion_covariance();
    let jump = spec.jumps.as_ref().filter(|j| j.intensity != 0.0);
    let jump_mean = jump.map(|j| j.distribution.mean());
    if let Some(m) = &jump_mean {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::JumpMomentsUnavailable(vec![0; d]));
        }
    }

    let mut triplets = Vec::new();
    let mut e = vec![0u32; d];
    for r in 0..basis.len() {
        let alpha = basis.exponents(r).to_vec();
        if alpha.iter().all(|&v| v == 0) {
            continue;
        }
        for i in 0..d {
            if alpha[i] == 0 {
                continue;
            }
            let ai = alpha[i] as f64;
            e.copy_from_slice(&alpha);
            e[i] -= 1;
            if kt[i] != 0.0 {
                triplets.push((r, rank_unchecked(&e), ai * kt[i]));
            }
            for j in 0..d {
                let k = spec.kappa[(i, j)];
                if k != 0.0 {
                    e[j] += 1;
                    triplets.push((r, rank_unchecked(&e), -ai * k));
                    e[j] -= 1;
                }
            }
        }
        let mut diag = 0.0;
        for i in 0..d {
            for j in 0..d {
                let aa = alpha[i] as f64 * alpha[j] as f64;
                let corr = if i == j { alpha[i] as f64 } else { 0.0 };
                diag += 0.5 * a[(i, j)] * (aa - corr);
            }
        }
        if let (Some(law), Some(m1)) = (jump, &jump_mean) {
            let mixed = law.mixed_moment(&alpha);
            if !mixed.is_finite() {
                return Err(Error::JumpMomentsUnavailable(alpha));
            }
            let lin: f64 = alpha.iter().zip(m1).map(|(&a, m)| a as f64 * m).sum();
            diag += law.intensity * (mixed - 1.0 - lin);
        }
        if diag != 0.0 {
            triplets.push((r, r, diag));
        }
    }
    let entries = SparseMatrix::from_triplets(basis.len(), triplets);
    GeneratorMatrix::new(basis, entries)
}

/// `∫ Π_j (1+z_j)^{α_j} z_j^{b_j} F(dz)`, expanding `z = (1+z) − 1`.
fn jump_product_moment(mixed: &dyn Fn(&[u32]) -> f64, alpha: &[u32], b: &[u32]) -> f64 {
    let d = alpha.len();
    let mut g = vec![0u32; d];
    let mut total = 0.0;
    loop {
        let mut coef = 1.0;
        let mut e = alpha.to_vec();
        for i in 0..d {
            coef *= binomial(b[i] as usize, g[i] as usize) as f64;
            if (b[i] - g[i]) % 2 == 1 {
                coef = -coef;
            }
            e[i] += g[i];
        }
        total += coef * mixed(&e);
        // next γ ≤ b in odometer order
        let mut i = 0;
        while i < d && g[i] == b[i] {
            g[i] = 0;
            i += 1;
        }
        if i == d {
            return total;
        }
        g[i] += 1;
    }
}

/// Generator on `Pol_n` of the state `(X, V)` where
/// `V_t = e^{−βt}(C_t − C_s)` accrues dividends from a start date `s` with
/// `V_s = 0`. `V` follows
/// `dV = [(β + G_1ᵀ)p]ᵀH_1(X) dt − βV dt + pᵀ diag(X_−)(Σ dB + dJ)`,
/// which keeps `(X, V)` polynomial. The last coordinate is `V`.
pub fn build_accrual_generator(spec: &ModelSpec, n: usize) -> Result<GeneratorMatrix> {
    let d = spec.dim();
    if spec.p.len() != d + 1 {
        return Err(Error::Dimension("p does not match the state".into()));
    }
    let base = build_generator(spec, 1)?.dense();
    let rate: Vec<f64> = (0..=d)
        .map(|j| (0..=d).map(|i| base[(i, j)] * spec.p[i]).sum::<f64>() + spec.beta * spec.p[j])
        .collect();
    let pl = &spec.p[1..];
    let kt = spec.drift_constant();
    let a = spec.diffusion_covariance();
    let jump = spec.jumps.as_ref().filter(|j| j.intensity != 0.0);
    let jump_mean = jump.map(|j| j.distribution.mean());
    let basis = Basis::new(d + 1, n);
    let loaded: Vec<usize> = (0..d).filter(|&i| pl[i] != 0.0).collect();

    let mut triplets = Vec::new();
    let mut e = vec![0u32; d + 1];
    for r in 0..basis.len() {
        let ex = basis.exponents(r).to_vec();
        let alpha = &ex[..d];
        let m = ex[d];
        if ex.iter().all(|&v| v == 0) {
            continue;
        }
        let mut push = |e: &[u32], v: f64| {
            if v != 0.0 {
                triplets.push((r, rank_unchecked(e), v));
            }
        };
        // drift of X
        for i in 0..d {
            if alpha[i] == 0 {
                continue;
            }
            let ai = alpha[i] as f64;
            e.copy_from_slice(&ex);
            e[i] -= 1;
            push(&e, ai * kt[i]);
            for j in 0..d {
                e[j] += 1;
                push(&e, -ai * spec.kappa[(i, j)]);
                e[j] -= 1;
            }
        }
        let mf = m as f64;
        let mut diag = -spec.beta * mf;
        for i in 0..d {
            for j in 0..d {
                let aa = alpha[i] as f64 * alpha[j] as f64;
                let corr = if i == j { alpha[i] as f64 } else { 0.0 };
                diag += 0.5 * a[(i, j)] * (aa - corr);
            }
        }
        if m >= 1 {
            // drift of V and the X-V covariation
            e.copy_from_slice(&ex);
            e[d] -= 1;
            push(&e, mf * rate[0]);
            for j in 0..d {
                let cross: f64 = (0..d).map(|i| alpha[i] as f64 * a[(i, j)]).sum::<f64>() * pl[j];
                e[j] += 1;
                push(&e, mf * (rate[1 + j] + cross));
                e[j] -= 1;
            }
        }
        if m >= 2 {
            e.copy_from_slice(&ex);
            e[d] -= 2;
            for j in 0..d {
                for k in 0..d {
                    e[j] += 1;
                    e[k] += 1;
                    push(&e, 0.5 * mf * (mf - 1.0) * pl[j] * pl[k] * a[(j, k)]);
                    e[j] -= 1;
                    e[k] -= 1;
                }
            }
        }
        if let (Some(law), Some(m1)) = (jump, &jump_mean) {
            let mixed = |al: &[u32]| law.mixed_moment(al);
            let mx = mixed(alpha);
            if !mx.is_finite() {
                return Err(Error::JumpMomentsUnavailable(alpha.to_vec()));
            }
            let lin: f64 = alpha.iter().zip(m1).map(|(&a, m)| a as f64 * m).sum();
            diag += law.intensity * (mx - 1.0 - lin);
            // V jumps by Σ p_i X_i z_i
            for rr in 1..=m as usize {
                let sub = Basis::new(d, rr);
                for s in 0..sub.len() {
                    let b = sub.exponents(s);
                    let deg: u32 = b.iter().sum();
                    if deg as usize != rr || (0..d).any(|i| b[i] > 0 && !loaded.contains(&i)) {
                        continue;
                    }
                    let mut multinom = (1..=rr).product::<usize>() as f64;
                    let mut pw = 1.0;
                    for i in 0..d {
                        multinom /= (1..=b[i] as usize).product::<usize>() as f64;
                        pw *= pl[i].powi(b[i] as i32);
                    }
                    let mut mom = jump_product_moment(&mixed, alpha, b);
                    if rr == 1 {
                        let i = b.iter().position(|&v| v == 1).unwrap();
                        mom -= m1[i];
                    }
                    if !mom.is_finite() {
                        return Err(Error::JumpMomentsUnavailable(alpha.to_vec()));
                    }
                    e.copy_from_slice(&ex);
                    e[d] -= rr as u32;
                    for i in 0..d {
                        e[i] += b[i];
                    }
                    let c = law.intensity * binomial(m as usize, rr) as f64 * multinom * pw * mom;
                    push(&e, c);
                }
            }
        }
        if diag != 0.0 {
            triplets.push((r, r, diag));
        }
    }
    let entries = SparseMatrix::from_triplets(basis.len(), triplets);
    GeneratorMatrix::new(basis, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ljd::jumps::{JumpDistribution, JumpLaw};
    use nalgebra::DMatrix;

    fn spec2() -> ModelSpec {
        ModelSpec {
            kappa: DMatrix::from_row_slice(2, 2, &[0.8, -0.3, -0.1, 1.5]),
            theta: vec![1.0, 0.5],
            sigma: DMatrix::from_row_slice(2, 2, &[0.2, 0.0, 0.1, 0.3]),
            jumps: Some(JumpLaw {
                intensity: 0.5,
                distribution: JumpDistribution::TwoPoint {
                    up: vec![0.1, 0.2],
                    down: vec![-0.2, -0.1],
                    prob_up: 0.3,
                },
            }),
            p: vec![0.0, 1.0, 0.0],
            q: vec![1.0, 0.0, 1.0],
            beta: 1.0,
            gamma: 3.0,
            x0: vec![1.0, 0.7],
        }
    }

    #[test]
    fn degree_one_block_is_drift_only() {
        let s = spec2();
        let g = build_generator(&s, 1).unwrap().dense();
        let kt = s.drift_constant();
        for i in 0..2 {
            assert_eq!(g[(0, i)], 0.0);
            assert_eq!(g[(0, i + 1)], 0.0);
            assert!((g[(1 + i, 0)] - kt[i]).abs() < 1e-15);
            for j in 0..2 {
                assert_eq!(g[(1 + i, 1 + j)], -s.kappa[(i, j)]);
            }
        }
    }

    #[test]
    fn restriction_matches_lower_degree() {
        let s = spec2();
        let g4 = build_generator(&s, 4).unwrap();
        let g2 = build_generator(&s, 2).unwrap();
        assert_eq!(g4.restrict(2).dense(), g2.dense());
    }

    #[test]
    fn scalar_square_diagonal() {
        let law = JumpLaw {
            intensity: 0.4,
            distribution: JumpDistribution::TwoPoint {
                up: vec![0.3],
                down: vec![-0.2],
                prob_up: 0.5,
            },
        };
        let s = ModelSpec {
            kappa: DMatrix::from_element(1, 1, 1.2),
            theta: vec![1.0],
            sigma: DMatrix::from_element(1, 1, 0.25),
            jumps: Some(law.clone()),
            p: vec![0.0, 1.0],
            q: vec![1.0, 0.0],
            beta: 1.2,
            gamma: 2.0,
            x0: vec![1.0],
        };
        let g = build_generator(&s, 2).unwrap();
        let ez2 = 0.5 * 0.09 + 0.5 * 0.04;
        let want = -2.0 * 1.2 + 0.0625 + 0.4 * ez2;
        assert!((g.sparse().get(2, 2) - want).abs() < 1e-14);
    }

    #[test]
    fn accrual_moments_match_direct_expansion() {
        // from V_s = 0, V_T = P(X_T) − e^{−βΔ}P(x) with P = pᵀH_1
        let s = spec2();
        let (x, dt, n) = (vec![1.0, 0.7], 0.7, 3);
        let ext = build_accrual_generator(&s, n).unwrap();
        let mut x_ext = x.clone();
        x_ext.push(0.0);
        let got = crate::poly::moment_formula(&ext, &x_ext, dt).unwrap();
        let base = crate::poly::MomentEngine::new(&build_generator(&s, n).unwrap(), &x).unwrap();
        let pp = crate::poly::Poly::linear(&s.p);
        let shift = (-s.beta * dt).exp() * pp.eval(&x);
        let v = pp.add_constant(-shift);
        let ebasis = Basis::new(3, n);
        for r in 0..ebasis.len() {
            let ex = ebasis.exponents(r);
            let mut f = crate::poly::Poly::constant(2, 1.0);
            for _ in 0..ex[0] {
                f = f.multiply(&crate::poly::Poly::variable(2, 0));
            }
            for _ in 0..ex[1] {
                f = f.multiply(&crate::poly::Poly::variable(2, 1));
            }
            for _ in 0..ex[2] {
                f = f.multiply(&v);
            }
            let want = base.expect(&f, dt).unwrap();
            assert!((got[r] - want).abs() < 1e-12 * (1.0 + want.abs()), "{ex:?}: {} vs {want}", got[r]);
        }
    }
}
