use std::io::Write;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use super::SimConfig;
use crate::error::{Error, Result};
use crate::ljd::ModelSpec;

/// Time grid of `step`-spaced points on `[0, horizon]` with the dates in
/// `keys` inserted exactly.
pub fn time_grid(step: f64, horizon: f64, keys: &[f64]) -> Vec<f64> {
    let n = (horizon / step - 1e-9).ceil().max(0.0) as usize;
    let mut t: Vec<f64> = (0..=n).map(|k| (k as f64 * step).min(horizon)).collect();
    t.extend(keys.iter().copied().filter(|&k| k >= 0.0 && k <= horizon));
    t.sort_by(|a, b| a.partial_cmp(b).unwrap());
    t.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
    t
}

/// Per-path Euler stepper for `dX = κ(θ − X)dt + diag(X_−)(Σ dB + dJ)`.
///
/// Diffusion and jump amplitudes use `max(X, 0)` (full truncation). The jump
/// count per step is Poisson and the compensator `ξ E[z] dt` is subtracted.
#[derive(Debug, Clone)]
pub struct Stepper<'a> {
    spec: &'a ModelSpec,
    kt: Vec<f64>,
    jump_mean: Vec<f64>,
    z: Vec<f64>,
    jsum: Vec<f64>,
    prev: Vec<f64>,
    // columns of Σ with a non-zero entry; only these need a normal draw
    active: Vec<usize>,
}

impl<'a> Stepper<'a> {
    pub fn new(spec: &'a ModelSpec) -> Self {
        let d = spec.dim();
        let jump_mean = spec
            .jumps
            .as_ref()
            .filter(|j| j.intensity > 0.0)
            .map_or(vec![0.0; d], |j| j.distribution.mean());
        Stepper {
            spec,
            kt: spec.drift_constant(),
            jump_mean,
            z: vec![0.0; d],
            jsum: vec![0.0; d],
            prev: vec![0.0; d],
            active: (0..d).filter(|&j| (0..d).any(|i| spec.sigma[(i, j)] != 0.0)).collect(),
        }
    }

    pub fn step<R: Rng>(&mut self, x: &mut [f64], h: f64, rng: &mut R) {
        let spec = self.spec;
        let d = x.len();
        let sh = h.sqrt();
        for &j in &self.active {
            self.z[j] = rng.sample(StandardNormal);
        }
        self.jsum.iter_mut().for_each(|v| *v = 0.0);
        if let Some(law) = spec.jumps.as_ref().filter(|j| j.intensity > 0.0) {
            let count = Poisson::new(law.intensity * h).map_or(0.0, |p| p.sample(rng)) as usize;
            for _ in 0..count {
                for (s, v) in self.jsum.iter_mut().zip(law.distribution.sample(rng)) {
                    *s += v;
                }
            }
            for i in 0..d {
                self.jsum[i] -= law.intensity * self.jump_mean[i] * h;
            }
        }
        self.prev.copy_from_slice(x);
        let old = &self.prev;
        for i in 0..d {
            let mut drift = self.kt[i];
            for j in 0..d {
                drift -= spec.kappa[(i, j)] * old[j];
            }
            let noise: f64 = self.active.iter().map(|&j| spec.sigma[(i, j)] * self.z[j]).sum();
            let amp = old[i].max(0.0);
            x[i] = old[i] + drift * h + amp * (noise * sh + self.jsum[i]);
        }
    }
}

/// Random stream of path `path`: independent of how paths are scheduled.
pub fn path_rng(seed: u64, path: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path as u64);
    rng
}

/// Runs path `path` on `grid`, calling `visit(k, t_k, X_{t_k})` at every
/// grid point including `t_0`.
pub fn run_path(
    spec: &ModelSpec,
    x0: &[f64],
    grid: &[f64],
    seed: u64,
    path: usize,
    visit: &mut dyn FnMut(usize, f64, &[f64]),
) {
    let mut rng = path_rng(seed, path);
    let mut stepper = Stepper::new(spec);
    let mut x = x0.to_vec();
    visit(0, grid[0], &x);
    for k in 1..grid.len() {
        stepper.step(&mut x, grid[k] - grid[k - 1], &mut rng);
        visit(k, grid[k], &x);
    }
}

/// States of every path at every grid time.
#[derive(Debug, Clone, PartialEq)]
pub struct PathBundle {
    pub times: Vec<f64>,
    /// `states[path][k]` is the state at `times[k]`.
    pub states: Vec<Vec<Vec<f64>>>,
}

/// Simulates and stores all paths. Intended for small runs; estimators
/// stream paths instead.
pub fn simulate_paths(spec: &ModelSpec, cfg: &SimConfig) -> Result<PathBundle> {
    cfg.check()?;
    let grid = time_grid(cfg.step, cfg.horizon, &[]);
    let x0 = spec.x0.clone();
    let states = cfg.run(|| {
        use rayon::prelude::*;
        (0..cfg.paths)
            .into_par_iter()
            .map(|p| {
                let mut out = Vec::with_capacity(grid.len());
                run_path(spec, &x0, &grid, cfg.seed, p, &mut |_, _, x| out.push(x.to_vec()));
                out
            })
            .collect()
    })?;
    Ok(PathBundle { times: grid, states })
}

impl PathBundle {
    /// CSV with header `t,path,x1,…,xd`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let d = self.states.first().and_then(|p| p.first()).map_or(0, |x| x.len());
        let mut header = String::from("t,path");
        for i in 1..=d {
            header.push_str(&format!(",x{i}"));
        }
        writeln!(w, "{header}").map_err(Error::from)?;
        for (p, path) in self.states.iter().enumerate() {
            for (t, x) in self.times.iter().zip(path) {
                write!(w, "{t:?},{p}").map_err(Error::from)?;
                for v in x {
                    write!(w, ",{v:?}").map_err(Error::from)?;
                }
                writeln!(w).map_err(Error::from)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ljd::FourFactorParams;

    #[test]
    fn grid_contains_key_dates() {
        let g = time_grid(0.25, 1.0, &[0.3, 1.0]);
        assert_eq!(g, vec![0.0, 0.25, 0.3, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn deterministic_model_follows_the_ode() {
        let mut p = FourFactorParams::fixture();
        p.sigma_i = 0.0;
        p.sigma_d = 0.0;
        let spec = p.to_spec_unchecked();
        let grid = time_grid(1.0 / 52.0, 1.0, &[]);
        let mut last = vec![];
        run_path(&spec, &spec.x0, &grid, 1, 0, &mut |_, _, x| last = x.to_vec());
        // X1^I solves x' = κ(1 − x)
        let want = 1.0 + (p.x0[1] - 1.0) * (-p.kappa1_i).exp();
        assert!((last[1] - want).abs() < 1e-3, "{} vs {want}", last[1]);
    }

    #[test]
    fn same_seed_same_path() {
        let spec = FourFactorParams::fixture().to_spec().unwrap();
        let cfg = SimConfig {
            paths: 3,
            horizon: 0.5,
            ..SimConfig::default()
        };
        let a = simulate_paths(&spec, &cfg).unwrap();
        let b = simulate_paths(&spec, &SimConfig { threads: Some(2), ..cfg }).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.states[0], a.states[1]);
    }
}
