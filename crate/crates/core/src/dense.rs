//! Exact propagation through a dense Hermitian eigendecomposition.
//!
//! Cubic in the dimension, so only meant for small systems; it serves as the
//! independent reference for the Chebyshev propagator and for spectral checks.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::sparse::CsrMatrix;

pub struct DenseSpectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl DenseSpectrum {
    pub fn new(h: &CsrMatrix) -> Self {
        let n = h.dim();
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for (r, c, v) in h.triplets() {
            m[(r, c)] = v;
        }
        let eig = SymmetricEigen::new(m);
        Self {
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            eigenvectors: eig.eigenvectors,
        }
    }

    /// Eigenvalues in ascending order.
    pub fn sorted_eigenvalues(&self) -> Vec<f64> {
        let mut e = self.eigenvalues.clone();
        e.sort_by(|a, b| a.total_cmp(b));
        e
    }

    /// `exp(−iHt)·psi0`.
    pub fn evolve(&self, psi0: &[Complex64], t: f64) -> Vec<Complex64> {
        let v = &self.eigenvectors;
        let psi = DVector::from_column_slice(psi0);
        let mut coeff = v.adjoint() * psi;
        for (c, &e) in coeff.iter_mut().zip(&self.eigenvalues) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        (v * coeff).iter().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_level_rabi() {
        let g = 0.4;
        let h = CsrMatrix::from_triplets(
            2,
            &[(0, 1, Complex64::new(g, 0.0)), (1, 0, Complex64::new(g, 0.0))],
        );
        let d = DenseSpectrum::new(&h);
        assert!((d.sorted_eigenvalues()[0] + g).abs() < 1e-14);
        let psi = d.evolve(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], 2.0);
        assert!((psi[0].norm_sqr() - (g * 2.0).cos().powi(2)).abs() < 1e-14);
    }
}
