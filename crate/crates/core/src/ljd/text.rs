//! Flat `key = value` text format for [`ModelSpec`].
//!
//! ```text
//! d = 1
//! kappa[0][0] = 0.5
//! theta[0] = 1.0
//! sigma[0][0] = 0.2
//! jump.intensity = 0.0
//! p[0] = 0.0
//! p[1] = 1.0
//! ...
//! ```
//! Values are written with the shortest representation that parses back to
//! the same `f64`, so writing and reading is lossless. `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::Write;

use nalgebra::DMatrix;

use super::jumps::{JumpDistribution, JumpLaw};
use super::spec::ModelSpec;
use crate::error::{Error, Result};

pub fn spec_to_text(spec: &ModelSpec) -> String {
    let d = spec.dim();
    let mut s = format!("d = {d}\n");
    let mut put = |k: String, v: f64| {
        let _ = writeln!(s, "{k} = {v:?}");
    };
    for i in 0..d {
        for j in 0..d {
            put(format!("kappa[{i}][{j}]"), spec.kappa[(i, j)]);
        }
    }
    for i in 0..d {
        put(format!("theta[{i}]"), spec.theta[i]);
    }
    for i in 0..d {
        for j in 0..d {
            put(format!("sigma[{i}][{j}]"), spec.sigma[(i, j)]);
        }
    }
    put("jump.intensity".into(), spec.jump_intensity());
    for (i, v) in spec.p.iter().enumerate() {
        put(format!("p[{i}]"), *v);
    }
    for (i, v) in spec.q.iter().enumerate() {
        put(format!("q[{i}]"), *v);
    }
    put("beta".into(), spec.beta);
    put("gamma".into(), spec.gamma);
    for (i, v) in spec.x0.iter().enumerate() {
        put(format!("x0[{i}]"), *v);
    }
    let mut out = s;
    if let Some(law) = &spec.jumps {
        match &law.distribution {
            JumpDistribution::LogNormal { mean, cov } => {
                out.push_str("jump.kind = lognormal\n");
                for (i, m) in mean.iter().enumerate() {
                    let _ = writeln!(out, "jump.mean[{i}] = {m:?}");
                }
                for i in 0..d {
                    for j in 0..d {
                        let _ = writeln!(out, "jump.cov[{i}][{j}] = {:?}", cov[(i, j)]);
                    }
                }
            }
            JumpDistribution::TwoPoint { up, down, prob_up } => {
                out.push_str("jump.kind = two_point\n");
                for (i, z) in up.iter().enumerate() {
                    let _ = writeln!(out, "jump.up[{i}] = {z:?}");
                }
                for (i, z) in down.iter().enumerate() {
                    let _ = writeln!(out, "jump.down[{i}] = {z:?}");
                }
                let _ = writeln!(out, "jump.prob_up = {prob_up:?}");
            }
        }
    }
    out
}

fn parse_key(key: &str) -> Result<(String, Vec<usize>)> {
    let (name, rest) = match key.find('[') {
        Some(i) => (&key[..i], &key[i..]),
        None => (key, ""),
    };
    let mut idx = Vec::new();
    let mut r = rest;
    while !r.is_empty() {
        let close = r
            .find(']')
            .filter(|_| r.starts_with('['))
            .ok_or_else(|| Error::Parse(format!("malformed key '{key}'")))?;
        let n = r[1..close]
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad index in key '{key}'")))?;
        idx.push(n);
        r = &r[close + 1..];
    }
    Ok((name.trim().to_string(), idx))
}

struct Fields(BTreeMap<(String, Vec<usize>), f64>);

impl Fields {
    fn take(&mut self, name: &str, idx: &[usize]) -> Result<f64> {
        self.0
            .remove(&(name.to_string(), idx.to_vec()))
            .ok_or_else(|| Error::Parse(format!("missing key {name}{idx:?}")))
    }

    fn vector(&mut self, name: &str, n: usize) -> Result<Vec<f64>> {
        (0..n).map(|i| self.take(name, &[i])).collect()
    }

    fn matrix(&mut self, name: &str, d: usize) -> Result<DMatrix<f64>> {
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = self.take(name, &[i, j])?;
            }
        }
        Ok(m)
    }
}

pub fn spec_from_text(text: &str) -> Result<ModelSpec> {
    let mut values: BTreeMap<(String, Vec<usize>), f64> = BTreeMap::new();
    let mut kind: Option<String> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k == "jump.kind" {
            kind = Some(v.to_string());
            continue;
        }
        let key = parse_key(k)?;
        let val: f64 = v
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: '{v}' is not a number", lineno + 1)))?;
        if values.insert(key, val).is_some() {
            return Err(Error::Parse(format!("line {}: duplicate key '{k}'", lineno + 1)));
        }
    }

    let mut f = Fields(values);
    let dv = f.take("d", &[])?;
    if dv.fract() != 0.0 || dv < 1.0 {
        return Err(Error::Parse(format!("d must be a positive integer, got {dv}")));
    }
    let d = dv as usize;
    let kappa = f.matrix("kappa", d)?;
    let sigma = f.matrix("sigma", d)?;
    let theta = f.vector("theta", d)?;
    let p = f.vector("p", d + 1)?;
    let q = f.vector("q", d + 1)?;
    let x0 = f.vector("x0", d)?;
    let beta = f.take("beta", &[])?;
    let gamma = f.take("gamma", &[])?;
    let intensity = f.take("jump.intensity", &[])?;

    let jumps = match kind.as_deref() {
        None | Some("none") => {
            if intensity != 0.0 {
                return Err(Error::Parse("jump.intensity > 0 needs jump.kind".into()));
            }
            None
        }
        Some("lognormal") => {
            let mean = f.vector("jump.mean", d)?;
            let cov = f.matrix("jump.cov", d)?;
            Some(JumpLaw {
                intensity,
                distribution: JumpDistribution::LogNormal { mean, cov },
            })
        }
        Some("two_point") => {
            let up = f.vector("jump.up", d)?;
            let down = f.vector("jump.down", d)?;
            let prob_up = f.take("jump.prob_up", &[])?;
            Some(JumpLaw {
                intensity,
                distribution: JumpDistribution::TwoPoint { up, down, prob_up },
            })
        }
        Some(other) => return Err(Error::Parse(format!("unknown jump.kind '{other}'"))),
    };
    if let Some(((name, idx), _)) = f.0.iter().next() {
        return Err(Error::Parse(format!("unknown key {name}{idx:?}")));
    }
    Ok(ModelSpec {
        kappa,
        theta,
        sigma,
        jumps,
        p,
        q,
        beta,
        gamma,
        x0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ljd::FourFactorParams;

    #[test]
    fn four_factor_round_trip() {
        let s = FourFactorParams::fixture().to_spec().unwrap();
        let text = spec_to_text(&s);
        assert!(text.starts_with("d = 4\n"));
        assert_eq!(spec_from_text(&text).unwrap(), s);
    }

    #[test]
    fn jump_law_round_trip() {
        let mut s = FourFactorParams::fixture().to_spec().unwrap();
        s.jumps = Some(JumpLaw {
            intensity: 0.3,
            distribution: JumpDistribution::TwoPoint {
                up: vec![0.1, 0.0, 1.0 / 3.0, 0.0],
                down: vec![-0.1, 0.0, -0.2, 1e-300],
                prob_up: 0.25,
            },
        });
        let text = spec_to_text(&s);
        assert_eq!(spec_from_text(&text).unwrap(), s);
    }

    #[test]
    fn unknown_and_missing_keys_are_errors() {
        let s = FourFactorParams::fixture().to_spec().unwrap();
        let text = spec_to_text(&s);
        assert!(spec_from_text(&format!("{text}bogus = 1\n")).is_err());
        assert!(spec_from_text(&text.replace("gamma", "# gamma")).is_err());
    }
}
