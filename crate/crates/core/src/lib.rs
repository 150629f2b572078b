//! Scattering of a guided wave by two identical thick barriers, each pierced
//! by an aperture, in a duct with sound-soft walls.
//!
//! The solver expands the field in duct modes away from the barriers and in
//! aperture modes inside the channels, matches traces on the barrier faces
//! and exploits the mirror symmetry of the pair.  Trapped-mode resonances of
//! the cavity between the barriers are located as zeros of a smooth
//! resonance function.
//!
//! ```
//! use twinbarrier::{Geometry, ModalSolver, Truncation};
//!
//! let solver = ModalSolver::new(Geometry::desk(), Truncation::new(60, 12))?;
//! let s = solver.scattering(4.0)?;
//! assert!((s.reflectance() + s.transmittance() - 1.0).abs() < 1e-10);
//! # Ok::<(), twinbarrier::Error>(())
//! ```
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod compensated;
mod error;
pub mod geometry;
pub mod linalg;
mod math;
pub mod modal;
pub mod quadrature;
pub mod resonance;
pub mod spectral;

pub use compensated::Wavenumber;
pub use error::{Error, Result};
pub use geometry::{Aperture, CrossSection, Geometry};
pub use modal::{HalfProblem, ModalSolver, ScatteringResult, Truncation};
pub use resonance::{FrequencyBand, ResonanceKind, ResonanceResult, SearchOptions};
