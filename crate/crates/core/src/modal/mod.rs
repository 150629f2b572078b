//! Mode-matching solution of the symmetric two-barrier problem.
//!
//! The full problem splits into odd (Dirichlet) and even (Neumann) half
//! problems about the cavity mid-plane.  Each half reduces to a pair of
//! aperture traces; the reflection of each half is unimodular and the full
//! reflection and transmission are their half-sum and half-difference.

mod field;
mod operators;
mod spectrum;
mod traces;

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

pub use field::{field_map, Face, FieldMap, FieldPoint, HalfFieldExpansion};
pub use operators::{assemble_operators, OperatorSet};
pub use spectrum::{axial_spectrum, single_mode_band, AxialSpectrum, CavityPhase, HalfProblem};
pub use traces::{reduced_coefficients, solve_traces, ReducedCoefficients, TraceSolution};

use crate::compensated::Wavenumber;
use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::spectral::ModalBasis;

/// Number of duct modes `N` and aperture modes `M` kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Truncation {
    pub duct_modes: usize,
    pub hole_modes: usize,
}

impl Truncation {
    pub const fn new(duct_modes: usize, hole_modes: usize) -> Self {
        Self { duct_modes, hole_modes }
    }

    pub const fn doubled(self) -> Self {
        Self::new(2 * self.duct_modes, 2 * self.hole_modes)
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Self::new(200, 30)
    }
}

/// Half-problem reflection computed three ways.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfReflection {
    /// Pole-free unimodular form; the value used everywhere else.
    pub value: Complex64,
    /// Direct quotient of the reduced system, singular where `T` has poles.
    pub raw_quotient: Complex64,
    /// `(u(0), ψ₁) - 1` from the block solve.
    pub block: Complex64,
}

pub fn reflection_half(traces: &TraceSolution) -> HalfReflection {
    let (h, x) = traces.pole_free;
    let value = Complex64::new(-h, x) / Complex64::new(h, x);
    let ReducedCoefficients { a, b, c, d } = traces.reduced;
    let t = traces.end_factor;
    let one = Complex64::new(1.0, 0.0);
    let raw_quotient = (a - one + (a * d - b * c - d) * t) / (a + one + (a * d - b * c + d) * t);
    HalfReflection {
        value,
        raw_quotient,
        block: traces.block_projections[0] - one,
    }
}

/// Effect of doubling the aperture truncation at one `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationCheck {
    pub doubled: Truncation,
    /// `| |r₁| - |r₁'| |`.
    pub delta_abs_r1: f64,
    /// `|r₁ - r₁'|`.
    pub delta_r1: f64,
    /// True when `delta_abs_r1 <= 1e-6`.
    pub converged: bool,
}

/// Full-problem scattering data at one `k`.
///
/// `rn[i]` and `tn[i]` belong to duct mode `i + 2`.  Evanescent
/// transmission amplitudes are referred to the outlet face `z = L + w`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringResult {
    pub k: f64,
    pub r1_dirichlet: Complex64,
    pub r1_neumann: Complex64,
    pub r1: Complex64,
    pub t1: Complex64,
    pub rn: Vec<Complex64>,
    pub tn: Vec<Complex64>,
    /// `|1 - |r₁|² - |t₁|²|`.
    pub energy_defect: f64,
    pub truncation: Truncation,
    pub convergence: Option<TruncationCheck>,
}

impl ScatteringResult {
    pub fn reflectance(&self) -> f64 {
        self.r1.norm_sqr()
    }

    pub fn transmittance(&self) -> f64 {
        self.t1.norm_sqr()
    }
}

/// Solver bound to one geometry and truncation.
#[derive(Debug, Clone)]
pub struct ModalSolver {
    geometry: Geometry,
    truncation: Truncation,
    basis: ModalBasis,
}

/// One solved half problem.
#[derive(Debug, Clone)]
pub struct HalfSolution {
    pub spectrum: AxialSpectrum,
    pub operators: OperatorSet,
    pub traces: TraceSolution,
    pub reflection: HalfReflection,
}

impl ModalSolver {
    pub fn new(geometry: Geometry, truncation: Truncation) -> Result<Self> {
        if truncation.duct_modes < 2 || truncation.hole_modes < 1 {
            return Err(Error::InvalidTruncation(format!(
                "need N >= 2 and M >= 1, got N = {}, M = {}",
                truncation.duct_modes, truncation.hole_modes
            )));
        }
        let basis = ModalBasis::new(&geometry, truncation.duct_modes, truncation.hole_modes)?;
        Ok(Self {
            geometry,
            truncation,
            basis,
        })
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn basis(&self) -> &ModalBasis {
        &self.basis
    }

    /// Open single-mode band `(sqrt λ₁, min(sqrt λ₂, sqrt μ₁))`.
    pub fn band(&self) -> (f64, f64) {
        single_mode_band(&self.basis)
    }

    pub fn spectrum(&self, k: impl Into<Wavenumber>) -> Result<AxialSpectrum> {
        axial_spectrum(k.into(), &self.basis, &self.geometry)
    }

    pub fn operators(&self, spectrum: &AxialSpectrum) -> OperatorSet {
        assemble_operators(spectrum, &self.basis, &self.geometry)
    }

    /// Coefficients of the reduced system only, skipping the block solve.
    pub fn reduced(
        &self,
        k: impl Into<Wavenumber>,
        variant: HalfProblem,
    ) -> Result<(AxialSpectrum, ReducedCoefficients)> {
        let spectrum = self.spectrum(k)?;
        let ops = self.operators(&spectrum);
        let red = reduced_coefficients(&ops, &spectrum, variant)?;
        Ok((spectrum, red))
    }

    pub fn solve_half(&self, k: impl Into<Wavenumber>, variant: HalfProblem) -> Result<HalfSolution> {
        let spectrum = self.spectrum(k)?;
        let operators = self.operators(&spectrum);
        let traces = solve_traces(&operators, &spectrum, variant)?;
        let reflection = reflection_half(&traces);
        Ok(HalfSolution {
            spectrum,
            operators,
            traces,
            reflection,
        })
    }

    /// Unimodular half-problem reflection `r₁ᴰ` or `r₁ᴺ` from the reduced system.
    pub fn reflection_half(&self, k: impl Into<Wavenumber>, variant: HalfProblem) -> Result<Complex64> {
        let (spectrum, red) = self.reduced(k, variant)?;
        let (num, den) = spectrum.phase.end_factor_parts(variant);
        let (h, x) = red.pole_free(num, den);
        Ok(Complex64::new(-h, x) / Complex64::new(h, x))
    }

    pub fn scattering(&self, k: impl Into<Wavenumber>) -> Result<ScatteringResult> {
        let k = k.into();
        let dir = self.solve_half(k, HalfProblem::Dirichlet)?;
        let neu = self.solve_half(k, HalfProblem::Neumann)?;
        Ok(self.combine(&dir, &neu))
    }

    /// As [`scattering`](Self::scattering), also flagging whether doubling `M`
    /// moves `|r₁|` by more than `1e-6`.
    pub fn scattering_checked(&self, k: impl Into<Wavenumber>) -> Result<ScatteringResult> {
        let k = k.into();
        let mut res = self.scattering(k)?;
        let doubled = Truncation::new(self.truncation.duct_modes, 2 * self.truncation.hole_modes);
        let other = ModalSolver::new(self.geometry, doubled)?.scattering(k)?;
        let delta_abs_r1 = (res.r1.norm() - other.r1.norm()).abs();
        res.convergence = Some(TruncationCheck {
            doubled,
            delta_abs_r1,
            delta_r1: (res.r1 - other.r1).norm(),
            converged: delta_abs_r1 <= 1e-6,
        });
        Ok(res)
    }

    pub(crate) fn combine(&self, dir: &HalfSolution, neu: &HalfSolution) -> ScatteringResult {
        let g1 = dir.spectrum.gamma1;
        let z0 = self.geometry.symmetry_plane();
        let shift = Complex64::from_polar(1.0, -2.0 * g1 * z0);
        let (rd, rn1) = (dir.reflection.value, neu.reflection.value);
        let r1 = 0.5 * (rn1 + rd);
        let t1 = 0.5 * (rn1 - rd) * shift;
        let evanescent = |u0: &[Complex64]| -> Vec<Complex64> {
            (1..self.basis.duct.len())
                .map(|n| self.basis.overlap_row(n).iter().zip(u0).map(|(p, u)| u * p).sum())
                .collect()
        };
        let ed = evanescent(&dir.traces.u0);
        let en = evanescent(&neu.traces.u0);
        let rn = ed.iter().zip(&en).map(|(d, n)| 0.5 * (n + d)).collect();
        let tn = ed.iter().zip(&en).map(|(d, n)| 0.5 * (n - d)).collect();
        ScatteringResult {
            k: dir.spectrum.k.value,
            r1_dirichlet: rd,
            r1_neumann: rn1,
            r1,
            t1,
            rn,
            tn,
            energy_defect: (1.0 - r1.norm_sqr() - t1.norm_sqr()).abs(),
            truncation: self.truncation,
            convergence: None,
        }
    }
}

/// One-shot convenience wrapper around [`ModalSolver::scattering`].
pub fn scattering(geometry: &Geometry, k: f64, truncation: Truncation) -> Result<ScatteringResult> {
    ModalSolver::new(*geometry, truncation)?.scattering(k)
}
