//! Dense univariate polynomials in the monomial basis.

use serde::{Deserialize, Serialize};

/// `coeffs[k]` multiplies `x^k`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    /// Builds `Σ c_j x^(first + j)`.
    pub fn from_offset(first: usize, coeffs: &[f64]) -> Self {
        let mut all = vec![0.0; first];
        all.extend_from_slice(coeffs);
        Poly::new(all)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|&c| c != 0.0)
            .unwrap_or(0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    /// Lowest power with a nonzero coefficient (`None` for the zero polynomial).
    pub fn vanishing_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c != 0.0)
    }

    /// Expands `Σ w_k (1 - 2x)^k` into monomials.
    pub fn from_shifted_basis(weights: &[(usize, f64)]) -> Poly {
        let max = weights.iter().map(|&(k, _)| k).max().unwrap_or(0);
        let mut out = vec![0.0; max + 1];
        for &(k, w) in weights {
            // (1 - 2x)^k = Σ_j C(k, j) (-2)^j x^j
            let mut binom = 1.0;
            for j in 0..=k {
                out[j] += w * binom * (-2.0f64).powi(j as i32);
                binom = binom * (k - j) as f64 / (j + 1) as f64;
            }
        }
        Poly::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horner_and_derivative() {
        let p = Poly::new(vec![1.0, -2.0, 0.0, 3.0]);
        assert_eq!(p.eval(2.0), 1.0 - 4.0 + 24.0);
        assert_eq!(p.derivative().coeffs(), &[-2.0, 0.0, 9.0]);
        assert_eq!(p.degree(), 3);
        assert_eq!(Poly::zero().degree(), 0);
        assert!(Poly::zero().derivative().is_zero());
    }

    #[test]
    fn shifted_basis_expansion() {
        let p = Poly::from_shifted_basis(&[(0, 0.5), (1, 2.0), (3, -1.0)]);
        for &x in &[0.0f64, 0.3, 0.71, 1.0] {
            let direct = 0.5 + 2.0 * (1.0 - 2.0 * x) - (1.0 - 2.0 * x).powi(3);
            assert!((p.eval(x) - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn offset_and_vanishing_order() {
        let p = Poly::from_offset(3, &[0.0237, -0.00744, 0.00174]);
        assert_eq!(p.vanishing_order(), Some(3));
        assert_eq!(p.degree(), 5);
        assert_eq!(Poly::zero().vanishing_order(), None);
    }
}
