use super::basis::{basis_dim, rank_unchecked, Basis};

/// A polynomial in `d` variables stored by its coordinates in the graded-lex
/// monomial basis of `Pol_degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    d: usize,
    degree: usize,
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn zero(d: usize, degree: usize) -> Self {
        Poly {
            d,
            degree,
            coeffs: vec![0.0; basis_dim(d, degree)],
        }
    }

    pub fn constant(d: usize, c: f64) -> Self {
        Poly {
            d,
            degree: 0,
            coeffs: vec![c],
        }
    }

    /// Builds a polynomial from coordinates aligned with `Basis::new(d, degree)`.
    pub fn from_coeffs(d: usize, degree: usize, coeffs: Vec<f64>) -> Self {
        assert_eq!(
            coeffs.len(),
            basis_dim(d, degree),
            "coefficient vector does not match basis dimension"
        );
        Poly { d, degree, coeffs }
    }

    /// The linear form `l^T H_1(x)` for a loading vector `l` of length `1 + d`.
    pub fn linear(loading: &[f64]) -> Self {
        assert!(!loading.is_empty());
        let d = loading.len() - 1;
        Poly::from_coeffs(d, 1, loading.to_vec())
    }

    /// The monomial `x_i`.
    pub fn variable(d: usize, i: usize) -> Self {
        let mut p = Poly::zero(d, 1);
        p.coeffs[1 + i] = 1.0;
        p
    }

    pub fn vars(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Same polynomial expressed in the larger basis of `Pol_degree`.
    pub fn lift(&self, degree: usize) -> Poly {
        assert!(degree >= self.degree, "cannot lift to a lower degree");
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(basis_dim(self.d, degree), 0.0);
        Poly {
            d: self.d,
            degree,
            coeffs,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let h = Basis::new(self.d, self.degree).evaluate(x);
        dot(&self.coeffs, &h)
    }

    /// Dot product of the coordinates with a vector of basis expectations
    /// of at least this polynomial's length (e.g. `E[H_n(X_T)]` for `n ≥ degree`).
    pub fn pair(&self, basis_values: &[f64]) -> f64 {
        assert!(basis_values.len() >= self.coeffs.len());
        dot(&self.coeffs, &basis_values[..self.coeffs.len()])
    }

    pub fn scale(&self, c: f64) -> Poly {
        Poly {
            d: self.d,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.d, other.d);
        let degree = self.degree.max(other.degree);
        let mut out = self.lift(degree);
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn add_constant(&self, c: f64) -> Poly {
        let mut out = self.clone();
        out.coeffs[0] += c;
        out
    }

    /// Product polynomial in the basis of degree `deg a + deg b`.
    pub fn multiply(&self, other: &Poly) -> Poly {
        assert_eq!(self.d, other.d, "polynomials live in different spaces");
        let d = self.d;
        let degree = self.degree + other.degree;
        let mut out = Poly::zero(d, degree);
        let ba = Basis::new(d, self.degree);
        let bb = Basis::new(d, other.degree);
        let mut e = vec![0u32; d];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let ea = ba.exponents(i);
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b == 0.0 {
                    continue;
                }
                let eb = bb.exponents(j);
                for k in 0..d {
                    e[k] = ea[k] + eb[k];
                }
                out.coeffs[rank_unchecked(&e)] += a * b;
            }
        }
        out
    }

    /// Successive powers `1, p, p², …, p^k`.
    pub fn powers(&self, k: usize) -> Vec<Poly> {
        let mut out = Vec::with_capacity(k + 1);
        out.push(Poly::constant(self.d, 1.0));
        for i in 1..=k {
            let next = out[i - 1].multiply(self);
            out.push(next);
        }
        out
    }

    /// Multiplies the coefficient of every monomial `x^α` by `s^α`, so that
    /// `p.rescale(s)(y) = p(s ⊙ y)`.
    pub fn rescale(&self, s: &[f64]) -> Poly {
        let h = Basis::new(self.d, self.degree).evaluate(s);
        Poly {
            d: self.d,
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&h).map(|(a, w)| a * w).collect(),
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Coordinates of the product of two polynomials (convenience wrapper).
pub fn poly_multiply(a: &Poly, b: &Poly) -> Poly {
    a.multiply(b)
}
