//! Dirichlet sine bases on the duct cross-section and the aperture, and the
//! overlap matrix between them.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{CrossSection, Geometry};
use crate::linalg::Dense;
use crate::math::sinc;
use crate::quadrature::CompositeRule;

/// A rectangle (or interval, when `ly` is `None`) carrying a sine basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Patch {
    pub x0: f64,
    pub lx: f64,
    pub y0: f64,
    pub ly: Option<f64>,
}

/// One basis function: eigenvalue and its (1-based) sine indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub eigenvalue: f64,
    pub index: [u32; 2],
}

/// The first `len()` Dirichlet eigenmodes of a patch, sorted by eigenvalue
/// with lexicographic index order breaking ties.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    patch: Patch,
    modes: Vec<Mode>,
}

impl ModeSet {
    pub fn new(patch: Patch, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidTruncation("mode count must be at least 1".into()));
        }
        let cast =
            |n: usize| u32::try_from(n).map_err(|_| Error::InvalidTruncation(format!("mode count {count} too large")));
        let modes = match patch.ly {
            None => (1..=count)
                .map(|n| {
                    Ok(Mode {
                        eigenvalue: sine_eigenvalue(cast(n)?, patch.lx),
                        index: [cast(n)?, 0],
                    })
                })
                .collect::<Result<Vec<_>>>()?,
            Some(ly) => {
                // Every mode among the first `count` has both indices <= count.
                let mut all = Vec::with_capacity(count * count);
                for n1 in 1..=cast(count)? {
                    for n2 in 1..=cast(count)? {
                        all.push(Mode {
                            eigenvalue: sine_eigenvalue(n1, patch.lx) + sine_eigenvalue(n2, ly),
                            index: [n1, n2],
                        });
                    }
                }
                all.sort_by(|a, b| a.eigenvalue.total_cmp(&b.eigenvalue).then(a.index.cmp(&b.index)));
                all.truncate(count);
                all
            }
        };
        Ok(Self { patch, modes })
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn patch(&self) -> Patch {
        self.patch
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn eigenvalue(&self, i: usize) -> f64 {
        self.modes[i].eigenvalue
    }

    /// Value of the `i`-th normalised mode at `(x, y)`; zero outside the patch.
    pub fn eval(&self, i: usize, x: f64, y: f64) -> f64 {
        let [n1, n2] = self.modes[i].index;
        let p = self.patch;
        let u = x - p.x0;
        if !(0.0..=p.lx).contains(&u) {
            return 0.0;
        }
        let fx = libm::sqrt(2.0 / p.lx) * libm::sin(f64::from(n1) * PI * u / p.lx);
        match p.ly {
            None => fx,
            Some(ly) => {
                let v = y - p.y0;
                if !(0.0..=ly).contains(&v) {
                    return 0.0;
                }
                fx * libm::sqrt(2.0 / ly) * libm::sin(f64::from(n2) * PI * v / ly)
            }
        }
    }
}

fn sine_eigenvalue(n: u32, len: f64) -> f64 {
    let s = f64::from(n) * PI / len;
    s * s
}

/// Duct modes `ψ_n`, eigenvalues `λ_n`.
pub fn duct_modes(geometry: &Geometry, count: usize) -> Result<ModeSet> {
    let patch = match geometry.section() {
        CrossSection::Interval { height } => Patch {
            x0: 0.0,
            lx: height,
            y0: 0.0,
            ly: None,
        },
        CrossSection::Rectangle { height, width } => Patch {
            x0: 0.0,
            lx: height,
            y0: 0.0,
            ly: Some(width),
        },
    };
    ModeSet::new(patch, count)
}

/// Aperture modes `χ_m`, eigenvalues `μ_m`.
pub fn hole_modes(geometry: &Geometry, count: usize) -> Result<ModeSet> {
    let hole = geometry.hole();
    let patch = Patch {
        x0: hole.x0,
        lx: hole.delta,
        y0: hole.y0,
        ly: if geometry.is_two_dimensional() {
            None
        } else {
            Some(hole.delta2)
        },
    };
    ModeSet::new(patch, count)
}

/// `∫ sqrt(2/la) sin(nπ(x-a)/la) · sqrt(2/lb) sin(mπ(x-b)/lb) dx` over `[b, b+lb] ⊂ [a, a+la]`.
fn sine_overlap_1d(n: u32, a: f64, la: f64, m: u32, b: f64, lb: f64) -> f64 {
    let alpha = f64::from(n) * PI / la;
    let beta = f64::from(m) * PI / lb;
    let phase = alpha * (b - a);
    let integral = |eps: f64| lb * libm::cos(phase + 0.5 * eps * lb) * sinc(0.5 * eps * lb);
    let value = 0.5 * (integral(alpha - beta) - integral(alpha + beta));
    2.0 / libm::sqrt(la * lb) * value
}

/// Closed-form overlap `P[n][m] = (ψ_n, χ_m)_Γ`, shape `N x M`.
pub fn overlap_matrix(duct: &ModeSet, hole: &ModeSet) -> Dense<f64> {
    let (d, h) = (duct.patch(), hole.patch());
    Dense::from_fn(duct.len(), hole.len(), |n, m| {
        let [n1, n2] = duct.modes()[n].index;
        let [m1, m2] = hole.modes()[m].index;
        let px = sine_overlap_1d(n1, d.x0, d.lx, m1, h.x0, h.lx);
        match (d.ly, h.ly) {
            (Some(dly), Some(hly)) => px * sine_overlap_1d(n2, d.y0, dly, m2, h.y0, hly),
            _ => px,
        }
    })
}

/// Overlap by composite Gauss-Legendre quadrature on the aperture.
///
/// Independent cross-check of [`overlap_matrix`]; `panels` panels of eight
/// points per direction.
pub fn overlap_matrix_quadrature(duct: &ModeSet, hole: &ModeSet, panels: usize) -> Dense<f64> {
    let h = hole.patch();
    let rx = CompositeRule::new(h.x0, h.x0 + h.lx, panels, 8);
    match h.ly {
        None => Dense::from_fn(duct.len(), hole.len(), |n, m| {
            rx.integrate(|x| duct.eval(n, x, 0.0) * hole.eval(m, x, 0.0))
        }),
        Some(ly) => {
            let ry = CompositeRule::new(h.y0, h.y0 + ly, panels, 8);
            Dense::from_fn(duct.len(), hole.len(), |n, m| {
                rx.integrate(|x| ry.integrate(|y| duct.eval(n, x, y) * hole.eval(m, x, y)))
            })
        }
    }
}

/// Duct modes, aperture modes and their overlap for one truncation.
#[derive(Debug, Clone)]
pub struct ModalBasis {
    pub duct: ModeSet,
    pub hole: ModeSet,
    pub overlap: Dense<f64>,
}

impl ModalBasis {
    pub fn new(geometry: &Geometry, duct_count: usize, hole_count: usize) -> Result<Self> {
        let duct = duct_modes(geometry, duct_count)?;
        let hole = hole_modes(geometry, hole_count)?;
        let overlap = overlap_matrix(&duct, &hole);
        Ok(Self { duct, hole, overlap })
    }

    /// Row `n` of the overlap matrix, i.e. the aperture coefficients of `ψ_n`.
    pub fn overlap_row(&self, n: usize) -> &[f64] {
        self.overlap.row(n)
    }
}
