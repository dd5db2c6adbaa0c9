//! Frozen single-qubit values, evaluated independently at 40 digits, against dense numerics.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use approx::assert_relative_eq;
use qslbound::bounds::phi_factor;
use qslbound::entropy::{self, AlphaParam, EntropyKind};
use qslbound::linalg::{exp_minus_i_h_dt, pauli_dot, schatten2};
use qslbound::state::{bloch_direction, DensityMatrix, DEFAULT_RANK_TOL};

fn a(x: f64) -> AlphaParam {
    AlphaParam::new(x).unwrap()
}

/// Reference state `r = 1/4`, `theta = phi = pi/4`.
fn rho0() -> DensityMatrix {
    DensityMatrix::from_bloch(0.25, FRAC_PI_4, FRAC_PI_4).unwrap()
}

/// Rotation by `angle` about an axis orthogonal to the reference Bloch direction.
fn rotated(rho: &DensityMatrix, angle: f64) -> DensityMatrix {
    let r = bloch_direction(FRAC_PI_4, FRAC_PI_4);
    let len = r[0].hypot(r[1]);
    let u = exp_minus_i_h_dt(&pauli_dot([-r[1] / len, r[0] / len, 0.0]), angle).unwrap();
    rho.evolved(&u).unwrap()
}

#[test]
fn reference_spectrum_and_log_norm() {
    let rho = rho0();
    assert_relative_eq!(rho.eigenvalues()[0], 0.375, epsilon = 1e-15);
    assert_relative_eq!(rho.eigenvalues()[1], 0.625, epsilon = 1e-15);
    assert_relative_eq!(schatten2(&rho.log().unwrap()), 1.087_625_595_077_508_2, epsilon = 1e-13);
    // Eigenvalues sqrt(0.375) and sqrt(0.625).
    assert_relative_eq!(schatten2(&rho.power(0.5).unwrap()), 1.0, epsilon = 1e-15);
}

#[test]
fn quarter_turn_divergences() {
    let (rho, rho_t) = (rho0(), rotated(&rho0(), FRAC_PI_2));
    let g = entropy::relative_purity(&rho_t, &rho, a(0.5)).unwrap();
    assert_relative_eq!(g, 0.968_245_836_551_854_2, epsilon = 1e-13);
    assert_relative_eq!(
        entropy::renyi(&rho_t, &rho, a(0.5)).unwrap(),
        0.064_538_521_137_571_17,
        epsilon = 1e-13
    );
    assert_relative_eq!(
        entropy::tsallis(&rho_t, &rho, a(0.5)).unwrap(),
        0.063_508_326_896_291_56,
        epsilon = 1e-13
    );
    let s = entropy::quantum_relative_entropy(&rho_t, &rho).unwrap().value();
    assert_relative_eq!(s, 0.127_706_405_941_497_67, epsilon = 1e-13);
}

#[test]
fn partial_turn_divergences() {
    let (rho, rho_t) = (rho0(), rotated(&rho0(), 0.7));
    assert_relative_eq!(
        entropy::relative_purity(&rho_t, &rho, a(0.3)).unwrap(),
        0.988_920_459_667_000_5,
        epsilon = 1e-13
    );
    assert_relative_eq!(
        entropy::renyi(&rho_t, &rho, a(0.3)).unwrap(),
        0.015_916_250_859_682_605,
        epsilon = 1e-13
    );
    assert_relative_eq!(
        entropy::tsallis(&rho_t, &rho, a(0.3)).unwrap(),
        0.015_827_914_761_427_91,
        epsilon = 1e-13
    );
}

#[test]
fn renyi_prefactor() {
    assert_relative_eq!(
        phi_factor(EntropyKind::Renyi, a(0.5), 0.375).unwrap(),
        1.962_379_714_989_024_6,
        epsilon = 1e-13
    );
    assert_eq!(phi_factor(EntropyKind::Tsallis, a(0.5), 0.375).unwrap(), 1.0);
}

#[test]
fn pure_state_min_relative_entropy() {
    let pure = DensityMatrix::from_bloch(1.0, FRAC_PI_4, FRAC_PI_4).unwrap();
    let moved = rotated(&pure, FRAC_PI_4);
    let r0 = entropy::min_relative_entropy(&moved, &pure, DEFAULT_RANK_TOL)
        .unwrap()
        .value();
    assert_relative_eq!(r0, std::f64::consts::LN_2, epsilon = 1e-13);
}
