//! Ridge regression on an orthonormal design as a hemi-metric at the
//! non-canonical coefficient a = −1/(1+λ) of the Euclidean structure.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, RngCore};

use super::vector::Euclidean;
use crate::comparison::rho_raw;
use crate::error::{Error, Result};

/// Largest entry of |XᵀX − I| accepted as orthonormal.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct TichonovModel {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
}

impl TichonovModel {
    pub fn new(x: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::Domain(format!("design has {} rows, response has {}", x.nrows(), y.len())));
        }
        let dev = (x.transpose() * &x - DMatrix::identity(x.ncols(), x.ncols())).amax();
        if dev > ORTHONORMAL_TOL {
            return Err(Error::DesignNotOrthogonal(dev));
        }
        Ok(TichonovModel { x, y })
    }

    /// A random n×p design with orthonormal columns (thin QR of a Gaussian-ish
    /// matrix) and a random response.
    pub fn random(rng: &mut dyn RngCore, n: usize, p: usize) -> Result<Self> {
        if p == 0 || p > n {
            return Err(Error::Config(format!("need 1 ≤ p ≤ n, got n = {n}, p = {p}")));
        }
        let g = DMatrix::from_fn(n, p, |_, _| rng.gen_range(-1.0..1.0));
        let q = g.qr().q();
        let y = DVector::from_fn(n, |_, _| rng.gen_range(-2.0..2.0));
        Self::new(q, y)
    }

    pub fn coefficient(lambda: f64) -> f64 {
        -1.0 / (1.0 + lambda)
    }

    pub fn fitted(&self, beta: &[f64]) -> Vec<f64> {
        (&self.x * DVector::from_column_slice(beta)).iter().copied().collect()
    }

    /// ‖y − Xβ‖² + λ‖β‖².
    pub fn ridge_objective(&self, beta: &[f64], lambda: f64) -> f64 {
        let r = &self.y - &self.x * DVector::from_column_slice(beta);
        r.norm_squared() + lambda * beta.iter().map(|b| b * b).sum::<f64>()
    }

    /// ρ_a(y, Xβ) on ℝⁿ with a = −1/(1+λ). Equals
    /// (ridge_objective + λ‖y‖²)/(1+λ).
    pub fn rho_objective(&self, beta: &[f64], lambda: f64) -> f64 {
        let s = Euclidean { d: self.y.len() };
        let y: Vec<f64> = self.y.iter().copied().collect();
        rho_raw(&s, Self::coefficient(lambda), &y, &self.fitted(beta))
    }

    /// Xᵀy/(1+λ).
    pub fn closed_form(&self, lambda: f64) -> Vec<f64> {
        (self.x.transpose() * &self.y / (1.0 + lambda)).iter().copied().collect()
    }

    pub fn ordinary_least_squares(&self) -> Vec<f64> {
        self.closed_form(0.0)
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_example() {
        assert_eq!(TichonovModel::coefficient(1.0), -0.5);
    }

    #[test]
    fn objectives_differ_by_a_constant() {
        let mut rng = crate::par::rng(5);
        let m = TichonovModel::random(&mut rng, 12, 4).unwrap();
        let lambda = 0.7;
        let shift = lambda * m.y.norm_squared();
        for k in 0..5 {
            let beta: Vec<f64> = (0..4).map(|j| ((k * 4 + j) as f64).sin()).collect();
            let lhs = (1.0 + lambda) * m.rho_objective(&beta, lambda);
            let rhs = m.ridge_objective(&beta, lambda) + shift;
            assert!((lhs - rhs).abs() < 1e-10 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn non_orthogonal_design_is_rejected() {
        let x = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(matches!(
            TichonovModel::new(x, DVector::zeros(2)),
            Err(Error::DesignNotOrthogonal(_))
        ));
    }
}
