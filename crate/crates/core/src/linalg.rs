//! Dense complex linear algebra for small Hermitian operators.
//!
//! Everything here targets dimensions of a few to a few tens. The Hermitian
//! eigensolver is a cyclic Jacobi iteration, which is slow asymptotically but
//! delivers eigenvectors that are unitary to machine precision, and the
//! spectral functions (powers, logarithm, exponential) are built on it.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Absolute Hermiticity tolerance, scaled by `max(1, |M|_2)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 100;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

pub fn zeros(d: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(d, d)
}

/// Pauli matrices (x, y, z).
pub fn pauli() -> [ComplexMatrix; 3] {
    let o = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        ComplexMatrix::from_row_slice(2, 2, &[o, one, one, o]),
        ComplexMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        ComplexMatrix::from_row_slice(2, 2, &[one, o, o, -one]),
    ]
}

/// `v . sigma` for a real 3-vector.
pub fn pauli_dot(v: [f64; 3]) -> ComplexMatrix {
    let [sx, sy, sz] = pauli();
    sx * c(v[0], 0.0) + sy * c(v[1], 0.0) + sz * c(v[2], 0.0)
}

/// Schatten 2-norm `sqrt(Tr(M^dagger M))`.
pub fn schatten2(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_square(a)?;
    check_square(b)?;
    if a.nrows() != b.nrows() {
        return Err(Error::DimMismatch(a.nrows(), b.nrows()));
    }
    Ok(a * b - b * a)
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `Tr(A B)` without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let d = a.nrows();
    let mut acc = c(0.0, 0.0);
    for i in 0..d {
        for k in 0..d {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// `U M U^dagger`.
pub fn conjugate(u: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
    u * m * u.adjoint()
}

pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    schatten2(&(m - m.adjoint()))
}

/// `|U^dagger U - I|_2`.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    schatten2(&(u.adjoint() * u - identity(u.nrows())))
}

pub(crate) fn check_square(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

pub fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    check_square(m)?;
    let deviation = hermiticity_defect(m);
    if deviation > HERMITIAN_TOL * schatten2(m).max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// Spectral decomposition `M = V diag(values) V^dagger` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, unitary.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V diag(f(lambda_i)) V^dagger`.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> ComplexMatrix {
        self.map_complex(|x| c(f(x), 0.0))
    }

    pub fn map_complex<F: Fn(f64) -> Complex64>(&self, f: F) -> ComplexMatrix {
        let d = self.dim();
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            for i in 0..d {
                scaled[(i, j)] *= w;
            }
        }
        scaled * self.vectors.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Input is symmetrized as `(M + M^dagger)/2` after the Hermiticity check.
pub fn eigendecompose(m: &ComplexMatrix) -> Result<HermitianEigen> {
    check_hermitian(m)?;
    let d = m.nrows();
    let mut a = (m + m.adjoint()) * c(0.5, 0.0);
    let mut v = identity(d);

    let scale = schatten2(&a);
    let mut converged = d < 2 || scale == 0.0;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..d - 1 {
            for q in p + 1..d {
                rotate(&mut a, &mut v, p, q);
            }
        }
        converged = off_diagonal_norm(&a) <= 1e-15 * scale;
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(d, d, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let d = a.nrows();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One Jacobi rotation annihilating `a[p][q]`; `a <- J^dagger a J`, `v <- v J`.
///
/// `J = W P` where `W = diag(1, e^{-i phi})` on (p, q) makes the pivot real and
/// `P` is the classical real rotation.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    if mag <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = c(0.0, 0.0);
        a[(q, p)] = c(0.0, 0.0);
        return;
    }
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;

    // J entries on the (p, q) block.
    let jpp = c(cs, 0.0);
    let jpq = c(sn, 0.0);
    let jqp = -phase.conj() * sn;
    let jqq = phase.conj() * cs;

    let d = a.nrows();
    for k in 0..d {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    for k in 0..d {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    for k in 0..d {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
    a[(p, q)] = c(0.0, 0.0);
    a[(q, p)] = c(0.0, 0.0);
    a[(p, p)] = c(a[(p, p)].re, 0.0);
    a[(q, q)] = c(a[(q, q)].re, 0.0);
}

/// `exp(-i H dt)` for Hermitian `H`.
pub fn exp_minus_i_h_dt(h: &ComplexMatrix, dt: f64) -> Result<ComplexMatrix> {
    if dt == 0.0 {
        check_hermitian(h)?;
        return Ok(identity(h.nrows()));
    }
    let eig = eigendecompose(h)?;
    Ok(eig.map_complex(|lambda| Complex64::from_polar(1.0, -lambda * dt)))
}

/// Nearest unitary `U (U^dagger U)^{-1/2}`.
pub fn reunitarize(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    let gram = u.adjoint() * u;
    let eig = eigendecompose(&gram)?;
    Ok(u * eig.map(|x| 1.0 / x.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{PI, SQRT_2};

    #[test]
    fn identity_spectrum() {
        let eig = eigendecompose(&identity(2)).unwrap();
        assert_eq!(eig.values, vec![1.0, 1.0]);
        assert!(unitarity_defect(&eig.vectors) < 1e-14);
    }

    #[test]
    fn pauli_z_spectrum() {
        let [_, _, sz] = pauli();
        let eig = eigendecompose(&sz).unwrap();
        assert_relative_eq!(eig.values[0], -1.0);
        assert_relative_eq!(eig.values[1], 1.0);
    }

    #[test]
    fn bloch_state_spectrum_matches_closed_form_2x2() {
        // Closed-form eigenvalues of [[a, b], [b*, d]]: (a+d)/2 -+ sqrt(((a-d)/2)^2 + |b|^2).
        let r = 0.25;
        let n = [
            (PI / 4.0).sin() * (PI / 4.0).cos(),
            (PI / 4.0).sin() * (PI / 4.0).sin(),
            (PI / 4.0).cos(),
        ];
        let rho = (identity(2) + pauli_dot([r * n[0], r * n[1], r * n[2]])) * c(0.5, 0.0);
        let (a, b, d) = (rho[(0, 0)].re, rho[(0, 1)], rho[(1, 1)].re);
        let mid = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        let eig = eigendecompose(&rho).unwrap();
        assert_relative_eq!(eig.values[0], mid - rad, epsilon = 1e-15);
        assert_relative_eq!(eig.values[1], mid + rad, epsilon = 1e-15);
        assert_relative_eq!(eig.values[0], 0.375, epsilon = 1e-15);
        assert_relative_eq!(eig.values[1], 0.625, epsilon = 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(eigendecompose(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn rejects_non_square() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(eigendecompose(&m), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn schatten_norms() {
        let [sx, _, _] = pauli();
        assert_relative_eq!(schatten2(&identity(2)), SQRT_2);
        assert_relative_eq!(schatten2(&sx), SQRT_2);
        assert_eq!(schatten2(&zeros(3)), 0.0);
    }

    #[test]
    fn pauli_commutator() {
        let [sx, sy, sz] = pauli();
        let comm = commutator(&sz, &sx).unwrap();
        let expected = sy * c(0.0, 2.0);
        assert!(schatten2(&(&comm - expected)) < 1e-15);
        assert_relative_eq!(schatten2(&comm), 2.0 * SQRT_2, epsilon = 1e-15);
        assert_eq!(schatten2(&commutator(&sx, &sx).unwrap()), 0.0);
        assert!(matches!(commutator(&sx, &identity(3)), Err(Error::DimMismatch(2, 3))));
    }

    #[test]
    fn exponential_special_cases() {
        let u = exp_minus_i_h_dt(&zeros(2), 0.7).unwrap();
        assert!(schatten2(&(u - identity(2))) < 1e-15);

        let [_, _, sz] = pauli();
        let u = exp_minus_i_h_dt(&sz, PI).unwrap();
        assert!(schatten2(&(u + identity(2))) < 1e-14);
    }

    #[test]
    fn exponential_of_axis_generator() {
        let n = [0.6, 0.0, 0.8];
        let t = 1.3;
        let u = exp_minus_i_h_dt(&pauli_dot(n), t).unwrap();
        let expected = identity(2) * c(t.cos(), 0.0) - pauli_dot(n) * c(0.0, t.sin());
        assert!(schatten2(&(u - expected)) < 1e-14);
    }

    #[test]
    fn degenerate_dense_spectrum_converges() {
        // Block with an exact degeneracy and complex couplings.
        let m = ComplexMatrix::from_row_slice(
            3,
            3,
            &[
                c(1.0, 0.0),
                c(0.0, 0.5),
                c(0.0, 0.0),
                c(0.0, -0.5),
                c(1.0, 0.0),
                c(0.3, 0.4),
                c(0.0, 0.0),
                c(0.3, -0.4),
                c(1.0, 0.0),
            ],
        );
        let eig = eigendecompose(&m).unwrap();
        assert!(schatten2(&(eig.reconstruct() - &m)) < 1e-14);
        assert!(unitarity_defect(&eig.vectors) < 1e-14);
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn reunitarize_fixes_drift() {
        let u = exp_minus_i_h_dt(&pauli_dot([0.0, 1.0, 0.0]), 0.4).unwrap();
        let drifted = &u * c(1.0 + 1e-6, 0.0);
        let fixed = reunitarize(&drifted).unwrap();
        assert!(unitarity_defect(&fixed) < 1e-14);
        assert!(schatten2(&(fixed - u)) < 1e-12);
    }
}
