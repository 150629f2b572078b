use alloc::vec::Vec;

use crate::compensated::{TwoFloat, Wavenumber, PI};
use crate::error::{Error, Result};
use crate::geometry::{CrossSection, Geometry};
use crate::math::coth;
use crate::spectral::ModalBasis;

/// Which end condition closes the half problem at the symmetry plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HalfProblem {
    /// `u = 0` at the mid-plane (odd part of the full field).
    Dirichlet,
    /// `∂u/∂z = 0` at the mid-plane (even part).
    Neumann,
}

impl HalfProblem {
    pub const BOTH: [HalfProblem; 2] = [HalfProblem::Dirichlet, HalfProblem::Neumann];
}

/// `sin` and `cos` of the cavity phase `θ = γ₁ℓ`, in double-double.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityPhase {
    pub theta: TwoFloat,
    pub sin: TwoFloat,
    pub cos: TwoFloat,
}

impl CavityPhase {
    /// `(numerator, denominator)` of the end factor `T`:
    /// `cot θ` for Dirichlet, `-tan θ` for Neumann.
    pub fn end_factor_parts(&self, variant: HalfProblem) -> (TwoFloat, TwoFloat) {
        match variant {
            HalfProblem::Dirichlet => (self.cos, self.sin),
            HalfProblem::Neumann => (-self.sin, self.cos),
        }
    }

    pub fn end_factor(&self, variant: HalfProblem) -> f64 {
        let (num, den) = self.end_factor_parts(variant);
        num.to_f64() / den.to_f64()
    }
}

/// Axial wavenumbers at one `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxialSpectrum {
    pub k: Wavenumber,
    /// `γ₁ = sqrt(k² - λ₁)`, the propagating rate.
    pub gamma1: f64,
    /// `γ_n = sqrt(λ_n - k²)` for `n >= 2`; entry `i` belongs to duct mode `i + 1`.
    pub gamma: Vec<f64>,
    /// `β_m = sqrt(μ_m - k²)`.
    pub beta: Vec<f64>,
    /// `β_m coth(β_m w)`.
    pub beta_hat: Vec<f64>,
    pub phase: CavityPhase,
}

/// Open interval of `k` where exactly one duct mode propagates and every
/// aperture mode is evanescent.
pub fn single_mode_band(basis: &ModalBasis) -> (f64, f64) {
    let lo = basis.duct.eigenvalue(0);
    let mut hi = basis.hole.eigenvalue(0);
    if basis.duct.len() > 1 {
        hi = hi.min(basis.duct.eigenvalue(1));
    }
    (libm::sqrt(lo), libm::sqrt(hi))
}

/// `λ₁` in double-double, consistent with the cavity phase.
fn lambda1_extended(geometry: &Geometry) -> TwoFloat {
    match geometry.section() {
        CrossSection::Interval { height } => {
            let s = PI.div_f64(height);
            s * s
        }
        CrossSection::Rectangle { height, width } => {
            let a = PI.div_f64(height);
            let b = PI.div_f64(width);
            a * a + b * b
        }
    }
}

/// Relative margin by which `k²` must clear the band edges.
const BAND_MARGIN: f64 = 1e-9;

pub fn axial_spectrum(k: Wavenumber, basis: &ModalBasis, geometry: &Geometry) -> Result<AxialSpectrum> {
    let kv = k.value;
    let k2 = kv * kv;
    let (kmin, kmax) = single_mode_band(basis);
    if !(kv.is_finite() && k2 > kmin * kmin * (1.0 + BAND_MARGIN) && k2 < kmax * kmax * (1.0 - BAND_MARGIN)) {
        return Err(Error::BandViolation { k: kv, kmin, kmax });
    }
    let kk = k.extended();
    let gamma1_ext = (kk * kk - lambda1_extended(geometry)).sqrt();
    let theta = gamma1_ext.mul_f64(geometry.half_cavity());
    let (sin, cos) = theta.sin_cos();
    let gamma = (1..basis.duct.len())
        .map(|n| libm::sqrt(basis.duct.eigenvalue(n) - k2))
        .collect();
    let beta: Vec<f64> = (0..basis.hole.len())
        .map(|m| libm::sqrt(basis.hole.eigenvalue(m) - k2))
        .collect();
    let w = geometry.thickness();
    let beta_hat = beta.iter().map(|&b| b * coth(b * w)).collect();
    Ok(AxialSpectrum {
        k,
        gamma1: gamma1_ext.to_f64(),
        gamma,
        beta,
        beta_hat,
        phase: CavityPhase { theta, sin, cos },
    })
}
