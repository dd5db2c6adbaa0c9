//! Seeded random states, Hamiltonians and unitaries.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hamiltonian::HamiltonianSpec;
use crate::linalg::ComplexMatrix;
use crate::state::DensityMatrix;
use crate::Result;

/// Every `RANK_DEFICIENT_EVERY`-th instance has rank `d - 1`.
pub const RANK_DEFICIENT_EVERY: usize = 5;
/// Every `CONSTANT_DRIVE_EVERY`-th instance has a time-independent Hamiltonian.
pub const CONSTANT_DRIVE_EVERY: usize = 4;
/// Knots of the piecewise-linear random drive, including both ends.
pub const DRIVE_KNOTS: usize = 5;

/// Independent stream `stream` of the generator seeded by `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// `rows x cols` matrix of independent standard complex Gaussians.
pub fn ginibre(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// `G G^dagger / Tr(G G^dagger)` with `G` of shape `d x rank`.
pub fn random_state(rng: &mut impl Rng, d: usize, rank: usize) -> Result<DensityMatrix> {
    let g = ginibre(rng, d, rank.clamp(1, d));
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    DensityMatrix::new(w.unscale(tr))
}

/// `(G + G^dagger) / 2`.
pub fn random_hermitian(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    let g = ginibre(rng, d, d);
    (&g + g.adjoint()).scale(0.5)
}

/// Haar unitary from the phase-corrected QR factorization of a Ginibre matrix.
pub fn random_unitary(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    let qr = ginibre(rng, d, d).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let x = r[(j, j)];
        let phase = if x.norm() > 0.0 {
            x / x.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// One member of the verification ensemble.
#[derive(Debug, Clone)]
pub struct Instance {
    pub index: usize,
    pub rho0: DensityMatrix,
    pub hamiltonian: HamiltonianSpec,
    pub full_rank: bool,
}

/// Instance `index` of the ensemble `seed`; drives span `[0, horizon]`.
///
/// Dimensions cycle through `dims`. Rank-deficient states and constant drives are
/// interleaved at fixed strides so every dimension sees both.
pub fn instance(seed: u64, index: usize, dims: &[usize], horizon: f64) -> Result<Instance> {
    let mut rng = rng_for(seed, index as u64);
    let d = dims[index % dims.len()];
    let full_rank = index % RANK_DEFICIENT_EVERY != RANK_DEFICIENT_EVERY - 1;
    let rho0 = random_state(&mut rng, d, if full_rank { d } else { d - 1 })?;
    let hamiltonian = if index.is_multiple_of(CONSTANT_DRIVE_EVERY) {
        HamiltonianSpec::constant(random_hermitian(&mut rng, d))?
    } else {
        let times = (0..DRIVE_KNOTS)
            .map(|k| horizon * k as f64 / (DRIVE_KNOTS - 1) as f64)
            .collect();
        let mats = (0..DRIVE_KNOTS).map(|_| random_hermitian(&mut rng, d)).collect();
        HamiltonianSpec::tabulated(times, mats)?
    };
    Ok(Instance {
        index,
        rho0,
        hamiltonian,
        full_rank,
    })
}
