//! Validated density matrices with a cached spectral decomposition.

use crate::error::{Error, Result};
use crate::linalg::{self, c, eigendecompose, ComplexMatrix, HermitianEigen};

/// Relative rank cutoff: eigenvalues `<= DEFAULT_RANK_TOL * lambda_max` are outside the support.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
/// Eigenvalues down to `-NEGATIVE_CLIP` are clipped to zero; anything lower is rejected.
pub const NEGATIVE_CLIP: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    eigen: HermitianEigen,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let eigen = eigendecompose(&matrix)?;
        let min_eigenvalue = eigen.values[0];
        if min_eigenvalue < -NEGATIVE_CLIP {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        let trace: f64 = eigen.values.iter().sum();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::BadTrace { trace });
        }
        Ok(Self::from_eigen(eigen))
    }

    /// Builds the state from a spectral decomposition, clipping small negative eigenvalues.
    fn from_eigen(mut eigen: HermitianEigen) -> Self {
        for v in eigen.values.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let matrix = eigen.reconstruct();
        Self { matrix, eigen }
    }

    /// `(1/2)(I + r r_hat . sigma)` with `r_hat = (sin t cos p, sin t sin p, cos t)`.
    pub fn from_bloch(r: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::OutOfRange { name: "r", value: r });
        }
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::OutOfRange {
                name: "theta",
                value: theta,
            });
        }
        if !(0.0..=2.0 * std::f64::consts::PI).contains(&phi) {
            return Err(Error::OutOfRange {
                name: "phi",
                value: phi,
            });
        }
        let n = bloch_direction(theta, phi);
        let m = (linalg::identity(2) + linalg::pauli_dot([r * n[0], r * n[1], r * n[2]])) * c(0.5, 0.0);
        Self::new(m)
    }

    /// `|psi><psi|` for a (not necessarily normalized) vector.
    pub fn pure(psi: &[num_complex::Complex64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::OutOfRange {
                name: "norm",
                value: norm,
            });
        }
        let d = psi.len();
        let m = ComplexMatrix::from_fn(d, d, |i, j| psi[i] * psi[j].conj() / (norm * norm));
        Self::new(m)
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self::new(linalg::identity(d) * c(1.0 / d as f64, 0.0)).expect("I/d is a valid state")
    }

    pub fn dim(&self) -> usize {
        self.eigen.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eigen(&self) -> &HermitianEigen {
        &self.eigen
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigen.values[0]
    }

    pub fn lambda_max(&self) -> f64 {
        *self.eigen.values.last().expect("non-empty spectrum")
    }

    /// Absolute eigenvalue cutoff for a relative `rank_tol`.
    pub fn cutoff(&self, rank_tol: f64) -> f64 {
        rank_tol * self.lambda_max()
    }

    pub fn rank(&self, rank_tol: f64) -> usize {
        let cut = self.cutoff(rank_tol);
        self.eigen.values.iter().filter(|&&v| v > cut).count()
    }

    pub fn is_full_rank(&self, rank_tol: f64) -> bool {
        self.lambda_min() > self.cutoff(rank_tol)
    }

    /// `rho^a`. Eigenvalues at or below the rank cutoff contribute exactly zero for `a > 0`;
    /// `a <= 0` requires a full-rank state.
    pub fn power(&self, a: f64) -> Result<ComplexMatrix> {
        self.power_with_tol(a, DEFAULT_RANK_TOL)
    }

    pub fn power_with_tol(&self, a: f64, rank_tol: f64) -> Result<ComplexMatrix> {
        let cut = self.cutoff(rank_tol);
        if a <= 0.0 && self.lambda_min() <= cut {
            return Err(Error::SingularPower {
                exponent: a,
                lambda_min: self.lambda_min(),
            });
        }
        Ok(self.eigen.map(|x| if x <= cut { 0.0 } else { x.powf(a) }))
    }

    pub fn log(&self) -> Result<ComplexMatrix> {
        if !self.is_full_rank(DEFAULT_RANK_TOL) {
            return Err(Error::SingularLog {
                lambda_min: self.lambda_min(),
            });
        }
        Ok(self.eigen.map(f64::ln))
    }

    /// Orthogonal projector onto the span of eigenvectors above the rank cutoff.
    pub fn support_projector(&self, rank_tol: f64) -> ComplexMatrix {
        let cut = self.cutoff(rank_tol);
        self.eigen.map(|x| if x > cut { 1.0 } else { 0.0 })
    }

    /// `U rho U^dagger` for unitary `U`, with eigenvectors rotated rather than recomputed.
    pub fn evolved(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimMismatch(u.nrows(), self.dim()));
        }
        let eigen = HermitianEigen {
            values: self.eigen.values.clone(),
            vectors: u * &self.eigen.vectors,
        };
        let matrix = eigen.reconstruct();
        Ok(Self { matrix, eigen })
    }

    /// `U rho U^dagger`, re-diagonalized.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimMismatch(u.nrows(), self.dim()));
        }
        let m = linalg::conjugate(u, &self.matrix);
        let eigen = eigendecompose(&m)?;
        Ok(Self::from_eigen(eigen))
    }
}

pub fn bloch_direction(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::schatten2;
    use approx::assert_relative_eq;
    use std::f64::consts::{LN_2, PI};

    #[test]
    fn bloch_special_cases() {
        let mixed = DensityMatrix::from_bloch(0.0, 0.3, 1.0).unwrap();
        assert!(schatten2(&(mixed.matrix() - linalg::identity(2) * c(0.5, 0.0))) < 1e-15);

        let up = DensityMatrix::from_bloch(1.0, 0.0, 0.0).unwrap();
        assert_relative_eq!(up.matrix()[(0, 0)].re, 1.0, epsilon = 1e-15);
        assert!(up.matrix()[(1, 1)].norm() < 1e-15);

        let fig1 = DensityMatrix::from_bloch(0.25, PI / 4.0, PI / 4.0).unwrap();
        assert_relative_eq!(fig1.lambda_min(), 0.375, epsilon = 1e-15);
    }

    #[test]
    fn bloch_out_of_range() {
        assert!(matches!(
            DensityMatrix::from_bloch(1.5, 0.0, 0.0),
            Err(Error::OutOfRange { name: "r", .. })
        ));
        assert!(matches!(
            DensityMatrix::from_bloch(0.5, 4.0, 0.0),
            Err(Error::OutOfRange { name: "theta", .. })
        ));
        assert!(matches!(
            DensityMatrix::from_bloch(0.5, 1.0, -0.1),
            Err(Error::OutOfRange { name: "phi", .. })
        ));
    }

    #[test]
    fn validation_rejects_bad_inputs() {
        let bad_trace = linalg::identity(2);
        assert!(matches!(DensityMatrix::new(bad_trace), Err(Error::BadTrace { .. })));
        let negative = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.1, 0.0), c(-0.1, 0.0)]));
        assert!(matches!(DensityMatrix::new(negative), Err(Error::NotPositive { .. })));
        let slightly_negative =
            ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0 + 5e-11, 0.0), c(-5e-11, 0.0)]));
        let rho = DensityMatrix::new(slightly_negative).unwrap();
        assert_eq!(rho.lambda_min(), 0.0);
    }

    #[test]
    fn scalar_power() {
        let rho = DensityMatrix::maximally_mixed(2);
        let a = 0.37;
        let p = rho.power(a).unwrap();
        let expected = linalg::identity(2) * c(2f64.powf(-a), 0.0);
        assert!(schatten2(&(p - expected)) < 1e-15);
    }

    #[test]
    fn projector_power_is_projector() {
        let rho = DensityMatrix::pure(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let p = rho.power(0.3).unwrap();
        assert!(schatten2(&(p - rho.matrix())) < 1e-14);
    }

    #[test]
    fn square_root_of_bloch_state() {
        let rho = DensityMatrix::from_bloch(0.25, PI / 4.0, PI / 4.0).unwrap();
        let root = DensityMatrix::new(rho.power(0.5).unwrap() * c(1.0, 0.0));
        // sqrt(rho) is not unit trace; check its spectrum directly.
        assert!(root.is_err());
        let eig = linalg::eigendecompose(&rho.power(0.5).unwrap()).unwrap();
        assert_relative_eq!(eig.values[0], 0.612_372_435_695_794_5, epsilon = 1e-14);
        assert_relative_eq!(eig.values[1], 0.790_569_415_042_094_8, epsilon = 1e-14);
    }

    #[test]
    fn singular_power_and_log() {
        let pure = DensityMatrix::from_bloch(1.0, 0.4, 0.2).unwrap();
        assert!(matches!(pure.power(-0.5), Err(Error::SingularPower { .. })));
        assert!(matches!(pure.power(0.0), Err(Error::SingularPower { .. })));
        assert!(matches!(pure.log(), Err(Error::SingularLog { .. })));
    }

    #[test]
    fn log_values() {
        let rho = DensityMatrix::maximally_mixed(2);
        let l = rho.log().unwrap();
        assert!(schatten2(&(l + linalg::identity(2) * c(LN_2, 0.0))) < 1e-15);

        let fig1 = DensityMatrix::from_bloch(0.25, PI / 4.0, PI / 4.0).unwrap();
        // Extended-precision value of sqrt(ln^2 0.375 + ln^2 0.625).
        assert_relative_eq!(
            schatten2(&fig1.log().unwrap()),
            1.087_625_595_077_508_2,
            epsilon = 1e-13
        );
    }

    #[test]
    fn support_projectors() {
        let full = DensityMatrix::from_bloch(0.3, 1.0, 2.0).unwrap();
        assert!(schatten2(&(full.support_projector(DEFAULT_RANK_TOL) - linalg::identity(2))) < 1e-14);

        let pure = DensityMatrix::pure(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let p = pure.support_projector(DEFAULT_RANK_TOL);
        assert!(schatten2(&(&p - pure.matrix())) < 1e-14);
        assert!(schatten2(&(&p * &p - &p)) < 1e-14);

        let eps = 1e-12;
        let m = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0 - eps, 0.0), c(eps, 0.0)]));
        let rho = DensityMatrix::new(m).unwrap();
        let p = rho.support_projector(DEFAULT_RANK_TOL);
        assert_relative_eq!(p[(0, 0)].re, 1.0, epsilon = 1e-15);
        assert_eq!(p[(1, 1)].re, 0.0);
        assert_eq!(rho.rank(DEFAULT_RANK_TOL), 1);
    }
}
