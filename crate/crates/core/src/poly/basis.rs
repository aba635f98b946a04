//! Monomial bookkeeping for the graded lexicographic basis.
//!
//! Monomials of degree at most `n` in `d` variables are ordered by total degree
//! first and, within a degree, lexicographically with `x1 ≻ x2 ≻ … ≻ xd`. For
//! `d = 2, n = 2` the order is `1, x1, x2, x1², x1x2, x2²`. Because the order is
//! graded, the basis of `Pol_m` is a prefix of the basis of `Pol_n` for `m ≤ n`.

use crate::error::{Error, Result};

/// Exponent vector of a monomial `x^α = x1^α1 ⋯ xd^αd`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(d: usize) -> Self {
        MultiIndex(vec![0; d])
    }

    /// The monomial `x_i`.
    pub fn unit(d: usize, i: usize) -> Self {
        let mut e = vec![0; d];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&a| a as usize).sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }
}

/// Binomial coefficient `C(n, k)`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Dimension `N_n = C(n + d, d)` of `Pol_n(R^d)`.
pub fn basis_dim(d: usize, n: usize) -> usize {
    binomial(n + d, d)
}

/// Number of monomials of exact degree `k` in `d` variables.
fn count_exact(d: usize, k: usize) -> usize {
    if d == 0 {
        return usize::from(k == 0);
    }
    binomial(k + d - 1, d - 1)
}

/// Graded-lex rank of `alpha` within the basis of `Pol_n`.
pub fn basis_index(alpha: &MultiIndex, n: usize) -> Result<usize> {
    let deg = alpha.degree();
    if deg > n {
        return Err(Error::MonomialOutsideBasis { degree: deg, max: n });
    }
    Ok(rank_unchecked(alpha.exponents()))
}

/// Rank of an exponent slice, without the degree check.
#[inline]
pub(crate) fn rank_unchecked(exps: &[u32]) -> usize {
    let d = exps.len();
    let deg: usize = exps.iter().map(|&a| a as usize).sum();
    let mut rank = if deg == 0 { 0 } else { basis_dim(d, deg - 1) };
    let mut rem = deg;
    for (i, &a) in exps.iter().enumerate() {
        let a = a as usize;
        let vars_after = d - i - 1;
        // monomials sharing the prefix but with a larger exponent at position i
        for v in (a + 1)..=rem {
            rank += count_exact(vars_after, rem - v);
        }
        rem -= a;
    }
    rank
}

/// Ordered list of the monomials spanning `Pol_n(R^d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    d: usize,
    n: usize,
    exps: Vec<u32>,
}

impl Basis {
    pub fn new(d: usize, n: usize) -> Self {
        let mut exps = Vec::with_capacity(basis_dim(d, n) * d);
        let mut cur = vec![0u32; d];
        for k in 0..=n {
            push_exact(&mut exps, &mut cur, 0, k);
        }
        Basis { d, n, exps }
    }

    pub fn vars(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        if self.d == 0 {
            1
        } else {
            self.exps.len() / self.d
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Exponents of the monomial with the given rank.
    pub fn exponents(&self, rank: usize) -> &[u32] {
        &self.exps[rank * self.d..(rank + 1) * self.d]
    }

    pub fn basis_monomial(&self, rank: usize) -> MultiIndex {
        MultiIndex(self.exponents(rank).to_vec())
    }

    pub fn index_of(&self, alpha: &MultiIndex) -> Result<usize> {
        if alpha.dim() != self.d {
            return Err(Error::Dimension(format!(
                "multi-index of length {} in a {}-variable basis",
                alpha.dim(),
                self.d
            )));
        }
        basis_index(alpha, self.n)
    }

    /// The vector `H_n(x)` of all basis monomials evaluated at `x`.
    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.d, "state dimension does not match basis");
        let len = self.len();
        let mut out = vec![1.0; len];
        // every non-constant monomial is x_j times an earlier one
        for r in 1..len {
            let e = self.exponents(r);
            let j = e.iter().position(|&a| a > 0).unwrap();
            let mut prev = e.to_vec();
            prev[j] -= 1;
            out[r] = out[rank_unchecked(&prev)] * x[j];
        }
        out
    }
}

fn push_exact(out: &mut Vec<u32>, cur: &mut [u32], pos: usize, rem: usize) {
    let d = cur.len();
    if d == 0 {
        return;
    }
    if pos == d - 1 {
        cur[pos] = rem as u32;
        out.extend_from_slice(cur);
        cur[pos] = 0;
        return;
    }
    for a in (0..=rem).rev() {
        cur[pos] = a as u32;
        push_exact(out, cur, pos + 1, rem - a);
    }
    cur[pos] = 0;
}
