//! Relative purity and the divergences built on it.
//!
//! Everything is evaluated in the eigenbases of the two states: with
//! `rho = sum_i l_i |v_i><v_i|` and `omega = sum_j m_j |w_j><w_j|`,
//! traces of spectral functions reduce to sums weighted by `|<v_i|w_j>|^2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{DensityMatrix, DEFAULT_RANK_TOL};

/// Relative purities at or below this are treated as a support collapse.
pub const PURITY_TOL: f64 = 1e-14;
/// Overlap `Tr(Pi_rho omega)` at or below this makes the min-relative entropy infinite.
pub const OVERLAP_TOL: f64 = 1e-12;
/// Weight of `rho` outside `supp(omega)` above which `S(rho||omega)` is infinite.
pub const SUPPORT_TOL: f64 = 1e-10;

/// Order `alpha` in the open interval `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct AlphaParam(f64);

impl AlphaParam {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::OutOfRange {
                name: "alpha",
                value: alpha,
            })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 - alpha`, which is again admissible.
    pub fn complement(self) -> Self {
        Self(1.0 - self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyKind {
    Renyi,
    Tsallis,
}

impl EntropyKind {
    pub const ALL: [EntropyKind; 2] = [EntropyKind::Renyi, EntropyKind::Tsallis];

    pub fn name(self) -> &'static str {
        match self {
            EntropyKind::Renyi => "renyi",
            EntropyKind::Tsallis => "tsallis",
        }
    }
}

/// A divergence that may be infinite when supports do not nest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Divergence {
    Finite(f64),
    Infinite,
}

impl Divergence {
    pub fn value(self) -> f64 {
        match self {
            Divergence::Finite(v) => v,
            Divergence::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Divergence::Finite(_))
    }
}

/// `|<v_i|w_j>|^2` for the eigenvectors of `rho` (rows) and `omega` (columns).
fn overlaps(rho: &DensityMatrix, omega: &DensityMatrix) -> Result<Vec<Vec<f64>>> {
    if rho.dim() != omega.dim() {
        return Err(Error::DimMismatch(rho.dim(), omega.dim()));
    }
    let m = rho.eigen().vectors.adjoint() * &omega.eigen().vectors;
    let d = rho.dim();
    Ok((0..d).map(|i| (0..d).map(|j| m[(i, j)].norm_sqr()).collect()).collect())
}

/// Eigenvalues raised to `a > 0`, with those at or below the rank cutoff set to zero.
fn clipped_powers(rho: &DensityMatrix, a: f64) -> Vec<f64> {
    let cut = rho.cutoff(DEFAULT_RANK_TOL);
    rho.eigenvalues()
        .iter()
        .map(|&x| if x <= cut { 0.0 } else { x.powf(a) })
        .collect()
}

/// `g_alpha(rho, omega) = Tr(rho^alpha omega^(1 - alpha))`.
pub fn relative_purity(rho: &DensityMatrix, omega: &DensityMatrix, alpha: AlphaParam) -> Result<f64> {
    let w = overlaps(rho, omega)?;
    let p = clipped_powers(rho, alpha.value());
    let q = clipped_powers(omega, 1.0 - alpha.value());
    let mut g = 0.0;
    for (i, row) in w.iter().enumerate() {
        for (j, o) in row.iter().enumerate() {
            g += p[i] * q[j] * o;
        }
    }
    Ok(g)
}

/// `ln(g_alpha) / (alpha - 1)`.
pub fn renyi(rho: &DensityMatrix, omega: &DensityMatrix, alpha: AlphaParam) -> Result<f64> {
    let g = relative_purity(rho, omega, alpha)?;
    renyi_from_purity(g, alpha)
}

pub fn renyi_from_purity(g: f64, alpha: AlphaParam) -> Result<f64> {
    if g <= PURITY_TOL {
        return Err(Error::NonPositivePurity { value: g });
    }
    Ok(g.ln() / (alpha.value() - 1.0))
}

/// `(1 - g_alpha) / (1 - alpha)`.
pub fn tsallis(rho: &DensityMatrix, omega: &DensityMatrix, alpha: AlphaParam) -> Result<f64> {
    let g = relative_purity(rho, omega, alpha)?;
    Ok(tsallis_from_purity(g, alpha))
}

pub fn tsallis_from_purity(g: f64, alpha: AlphaParam) -> f64 {
    (1.0 - g) / (1.0 - alpha.value())
}

pub fn divergence(kind: EntropyKind, rho: &DensityMatrix, omega: &DensityMatrix, alpha: AlphaParam) -> Result<f64> {
    match kind {
        EntropyKind::Renyi => renyi(rho, omega, alpha),
        EntropyKind::Tsallis => tsallis(rho, omega, alpha),
    }
}

/// `O(rho||omega) + O(omega||rho)`.
pub fn symmetrized(kind: EntropyKind, rho: &DensityMatrix, omega: &DensityMatrix, alpha: AlphaParam) -> Result<f64> {
    Ok(divergence(kind, rho, omega, alpha)? + divergence(kind, omega, rho, alpha)?)
}

/// `S(rho||omega) = Tr(rho ln rho) - Tr(rho ln omega)`, with `0 ln 0 = 0`.
pub fn quantum_relative_entropy(rho: &DensityMatrix, omega: &DensityMatrix) -> Result<Divergence> {
    let w = overlaps(rho, omega)?;
    let rho_cut = rho.cutoff(DEFAULT_RANK_TOL);
    let omega_cut = omega.cutoff(DEFAULT_RANK_TOL);
    let l = rho.eigenvalues();
    let m = omega.eigenvalues();

    let mut leak = 0.0;
    let mut s = 0.0;
    for (i, &li) in l.iter().enumerate() {
        if li <= rho_cut {
            continue;
        }
        s += li * li.ln();
        for (j, &mj) in m.iter().enumerate() {
            if mj <= omega_cut {
                leak += w[i][j];
            } else {
                s -= li * w[i][j] * mj.ln();
            }
        }
    }
    if leak > SUPPORT_TOL {
        return Ok(Divergence::Infinite);
    }
    Ok(Divergence::Finite(s))
}

/// `R_0(rho||omega) = -ln Tr(Pi_rho omega)`. A full-rank `rho` gives exactly zero.
pub fn min_relative_entropy(rho: &DensityMatrix, omega: &DensityMatrix, rank_tol: f64) -> Result<Divergence> {
    if rho.dim() != omega.dim() {
        return Err(Error::DimMismatch(rho.dim(), omega.dim()));
    }
    if rho.is_full_rank(rank_tol) {
        return Ok(Divergence::Finite(0.0));
    }
    let w = overlaps(rho, omega)?;
    let cut = rho.cutoff(rank_tol);
    let mut overlap = 0.0;
    for (i, &li) in rho.eigenvalues().iter().enumerate() {
        if li > cut {
            for (j, &mj) in omega.eigenvalues().iter().enumerate() {
                overlap += w[i][j] * mj;
            }
        }
    }
    if overlap <= OVERLAP_TOL {
        return Ok(Divergence::Infinite);
    }
    Ok(Divergence::Finite(0.0 - overlap.ln()))
}
