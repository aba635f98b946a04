//! Sparse generator storage and the action of its exponential on a vector.
//!
//! Moment computations only ever need `e^{tA} v` (or `e^{tA^T} v`), never the
//! full exponential, so high-degree generators are kept in compressed rows and
//! propagated with a scaled truncated Taylor series.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Square matrix in compressed sparse row form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// explicit zeros dropped.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(r < n && c < n, "triplet outside matrix");
            if let (Some(&lr), Some(&lc)) = (rows.last(), cols.last()) {
                if lr == r && lc == c {
                    *vals.last_mut().unwrap() += v;
                    continue;
                }
            }
            rows.push(r);
            cols.push(c);
            vals.push(v);
        }
        let mut keep_rows = Vec::new();
        let mut keep_cols = Vec::new();
        let mut keep_vals = Vec::new();
        for ((r, c), v) in rows.into_iter().zip(cols).zip(vals) {
            if v != 0.0 {
                keep_rows.push(r);
                keep_cols.push(c);
                keep_vals.push(v);
            }
        }
        for &r in &keep_rows {
            row_ptr[r + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseMatrix {
            n,
            row_ptr,
            cols: keep_cols,
            vals: keep_vals,
        }
    }

    pub fn from_dense(a: &DMatrix<f64>) -> Self {
        let mut t = Vec::new();
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                if a[(i, j)] != 0.0 {
                    t.push((i, j, a[(i, j)]));
                }
            }
        }
        SparseMatrix::from_triplets(a.nrows(), t)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i)
            .find(|&(c, _)| c == j)
            .map(|(_, v)| v)
            .unwrap_or(0.0)
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.cols[a..b].iter().copied().zip(self.vals[a..b].iter().copied())
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Top-left `m × m` block.
    pub fn leading(&self, m: usize) -> SparseMatrix {
        assert!(m <= self.n);
        let mut t = Vec::new();
        for i in 0..m {
            for (j, v) in self.row(i) {
                if j < m {
                    t.push((i, j, v));
                }
            }
        }
        SparseMatrix::from_triplets(m, t)
    }

    /// `D^{-1} A D` for `D = diag(weights)`.
    pub fn similarity(&self, weights: &[f64]) -> SparseMatrix {
        assert_eq!(weights.len(), self.n);
        let mut out = self.clone();
        for i in 0..self.n {
            for k in out.row_ptr[i]..out.row_ptr[i + 1] {
                let j = out.cols[k];
                out.vals[k] *= weights[j] / weights[i];
            }
        }
        out
    }

    /// `out = A v`.
    pub fn mul_vec(&self, v: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * v[self.cols[k]];
            }
            out[i] = acc;
        }
    }

    /// `out = A^T v`.
    pub fn tmul_vec(&self, v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for i in 0..self.n {
            let vi = v[i];
            if vi == 0.0 {
                continue;
            }
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                out[self.cols[k]] += self.vals[k] * vi;
            }
        }
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        let mut col = vec![0.0; self.n];
        for (c, v) in self.cols.iter().zip(&self.vals) {
            col[*c] += v.abs();
        }
        col.into_iter().fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Per-substep bound on `‖tA‖₁`; keeps every Taylor term below the running sum.
const STEP_NORM: f64 = 1.0;
const MAX_TERMS: usize = 60;

/// Computes `e^{tA} v`, or `e^{tA^T} v` when `transpose` is set.
pub fn expm_action(a: &SparseMatrix, t: f64, v: &[f64], transpose: bool) -> Result<Vec<f64>> {
    assert_eq!(v.len(), a.dim(), "vector length does not match matrix");
    if !t.is_finite() {
        return Err(Error::NonFiniteMatrix);
    }
    let mut x = v.to_vec();
    if t == 0.0 || a.nnz() == 0 {
        return Ok(x);
    }
    let norm = if transpose { a.norm_inf() } else { a.norm1() } * t.abs();
    let steps = (norm / STEP_NORM).ceil().max(1.0) as usize;
    let h = t / steps as f64;

    let n = a.dim();
    let mut term = vec![0.0; n];
    let mut next = vec![0.0; n];
    for _ in 0..steps {
        term.copy_from_slice(&x);
        let mut prev_norm = f64::INFINITY;
        for k in 1..=MAX_TERMS {
            if transpose {
                a.tmul_vec(&term, &mut next);
            } else {
                a.mul_vec(&term, &mut next);
            }
            let c = h / k as f64;
            let mut term_norm = 0.0f64;
            let mut acc_norm = 0.0f64;
            for i in 0..n {
                term[i] = next[i] * c;
                x[i] += term[i];
                term_norm = term_norm.max(term[i].abs());
                acc_norm = acc_norm.max(x[i].abs());
            }
            if term_norm + prev_norm <= f64::EPSILON * 0.5 * acc_norm {
                break;
            }
            prev_norm = term_norm;
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::MomentOverflow);
        }
    }
    Ok(x)
}
