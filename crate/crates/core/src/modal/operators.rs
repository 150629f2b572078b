use alloc::vec::Vec;

use super::spectrum::{AxialSpectrum, HalfProblem};
use crate::geometry::Geometry;
use crate::linalg::Dense;
use crate::math::rate_over_sinh;
use crate::spectral::ModalBasis;

/// Aperture-space operators for one `k`.
///
/// `a0` couples the inlet trace through the evanescent inlet modes, `a1_*`
/// the outlet trace through the cavity; all three are symmetric positive
/// definite on the single-mode band.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub a0: Dense<f64>,
    pub a1_dirichlet: Dense<f64>,
    pub a1_neumann: Dense<f64>,
    /// Diagonal of the channel coupling, `-β_m / sinh(β_m w)`.
    pub coupling: Vec<f64>,
    /// Aperture coefficients of `ψ₁`.
    pub p: Vec<f64>,
}

impl OperatorSet {
    pub fn a1(&self, variant: HalfProblem) -> &Dense<f64> {
        match variant {
            HalfProblem::Dirichlet => &self.a1_dirichlet,
            HalfProblem::Neumann => &self.a1_neumann,
        }
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }
}

fn add_rank_one(a: &mut Dense<f64>, weight: f64, q: &[f64]) {
    let m = q.len();
    for i in 0..m {
        let wi = weight * q[i];
        if wi == 0.0 {
            continue;
        }
        for j in 0..m {
            a[(i, j)] += wi * q[j];
        }
    }
}

pub fn assemble_operators(spectrum: &AxialSpectrum, basis: &ModalBasis, geometry: &Geometry) -> OperatorSet {
    let m = basis.hole.len();
    let ell = geometry.half_cavity();
    let mut a0 = Dense::zeros(m, m);
    let mut a1d = Dense::zeros(m, m);
    let mut a1n = Dense::zeros(m, m);
    for (i, &g) in spectrum.gamma.iter().enumerate() {
        let q = basis.overlap_row(i + 1);
        let t = libm::tanh(g * ell);
        add_rank_one(&mut a0, g, q);
        add_rank_one(&mut a1d, g / t, q);
        add_rank_one(&mut a1n, g * t, q);
    }
    for j in 0..m {
        let bh = spectrum.beta_hat[j];
        a0[(j, j)] += bh;
        a1d[(j, j)] += bh;
        a1n[(j, j)] += bh;
    }
    let w = geometry.thickness();
    let coupling = spectrum.beta.iter().map(|&b| -rate_over_sinh(b, w)).collect();
    OperatorSet {
        a0,
        a1_dirichlet: a1d,
        a1_neumann: a1n,
        coupling,
        p: basis.overlap_row(0).to_vec(),
    }
}
