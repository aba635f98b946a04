//! Plain-text moment and multiplier files.
//!
//! ```text
//! support = half 0.0
//! N = 2
//! M[0] = 1.0
//! M[1] = 1.0
//! M[2] = 2.0
//! ```
//! `support` is `full`, `half a` or `interval a b`. A fitted density is
//! written in the same layout with `lambda[i]` in place of `M[i]`.

use std::collections::BTreeMap;

use super::density::{MaxEntDensity, MomentSet, Support};
use crate::error::{Error, Result};

fn support_text(s: &Support) -> String {
    match s {
        Support::FullLine => "full".into(),
        Support::HalfLine(a) => format!("half {a:?}"),
        Support::Interval(a, b) => format!("interval {a:?} {b:?}"),
    }
}

fn parse_support(v: &str) -> Result<Support> {
    let parts: Vec<&str> = v.split_whitespace().collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad support bound '{s}'")));
    match parts.as_slice() {
        ["full"] => Ok(Support::FullLine),
        ["half", a] => Ok(Support::HalfLine(num(a)?)),
        ["interval", a, b] => Ok(Support::Interval(num(a)?, num(b)?)),
        _ => Err(Error::Parse(format!(
            "support must be 'full', 'half a' or 'interval a b', got '{v}'"
        ))),
    }
}

fn parse(text: &str, array: &str) -> Result<(Support, Vec<f64>)> {
    let mut support = None;
    let mut n = None;
    let mut entries = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: String| Error::Parse(format!("line {}: {m}", lineno + 1));
        let (k, v) = line.split_once('=').ok_or_else(|| err("expected key = value".into()))?;
        let (k, v) = (k.trim(), v.trim());
        if k == "support" {
            support = Some(parse_support(v).map_err(|e| err(e.to_string()))?);
        } else if k == "N" {
            n = Some(v.parse::<usize>().map_err(|_| err(format!("N must be an integer, got '{v}'")))?);
        } else if let Some(idx) = k.strip_prefix(array).and_then(|r| r.strip_prefix('[')).and_then(|r| r.strip_suffix(']')) {
            let i: usize = idx.parse().map_err(|_| err(format!("bad index in '{k}'")))?;
            let val: f64 = v.parse().map_err(|_| err(format!("'{v}' is not a number")))?;
            if entries.insert(i, val).is_some() {
                return Err(err(format!("duplicate key '{k}'")));
            }
        } else {
            return Err(err(format!("unknown key '{k}'")));
        }
    }
    let support = support.ok_or_else(|| Error::Parse("missing 'support'".into()))?;
    let n = n.ok_or_else(|| Error::Parse("missing 'N'".into()))?;
    let values: Vec<f64> = (0..=n)
        .map(|i| entries.remove(&i).ok_or_else(|| Error::Parse(format!("missing {array}[{i}]"))))
        .collect::<Result<_>>()?;
    if let Some(i) = entries.keys().next() {
        return Err(Error::Parse(format!("{array}[{i}] beyond N = {n}")));
    }
    Ok((support, values))
}

fn write(support: &Support, array: &str, values: &[f64]) -> String {
    let mut s = format!("support = {}\nN = {}\n", support_text(support), values.len() - 1);
    for (i, v) in values.iter().enumerate() {
        s.push_str(&format!("{array}[{i}] = {v:?}\n"));
    }
    s
}

pub fn moments_from_text(text: &str) -> Result<MomentSet> {
    let (support, m) = parse(text, "M")?;
    MomentSet::new(m, support)
}

pub fn moments_to_text(m: &MomentSet) -> String {
    write(&m.support, "M", &m.moments)
}

/// Multipliers of a fitted density in original units.
pub fn density_to_text(d: &MaxEntDensity) -> String {
    write(&d.support, "lambda", &d.lambdas)
}

/// Reads multipliers written by [`density_to_text`].
pub fn lambdas_from_text(text: &str) -> Result<(Support, Vec<f64>)> {
    parse(text, "lambda")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_round_trip() {
        let m = MomentSet::new(vec![1.0, 0.5, 0.5], Support::Interval(0.0, 1.0)).unwrap();
        assert_eq!(moments_from_text(&moments_to_text(&m)).unwrap(), m);
        let text = "support = half 0\nN = 1\nM[0] = 1\nM[1] = 1\n";
        let m = moments_from_text(text).unwrap();
        assert_eq!(m.support, Support::HalfLine(0.0));
    }

    #[test]
    fn rejects_incomplete_files() {
        assert!(moments_from_text("support = full\nN = 2\nM[0] = 1\nM[1] = 0\n").is_err());
        assert!(moments_from_text("support = left\nN = 0\nM[0] = 1\n").is_err());
        assert!(moments_from_text("N = 0\nM[0] = 1\n").is_err());
        assert!(moments_from_text("support = full\nN = 0\nM[0] = 1\nM[3] = 1\n").is_err());
    }
}
