//! Duct, aperture and barrier placement.

use alloc::format;

use crate::error::{Error, Result};

/// Tolerance used when checking that the aperture sits inside the duct.
const CONTAINMENT_TOL: f64 = 1e-12;

/// Duct cross-section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CrossSection {
    /// The interval `(0, height)`; the problem is two-dimensional.
    Interval { height: f64 },
    /// The rectangle `(0, height) x (0, width)`.
    Rectangle { height: f64, width: f64 },
}

/// Axis-aligned aperture. `y0` and `delta2` are ignored for an interval duct.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aperture {
    pub x0: f64,
    pub delta: f64,
    pub y0: f64,
    pub delta2: f64,
}

/// Two identical barriers of thickness `thickness` occupying `[0, w]` and
/// `[L, L + w]`, each pierced by the same aperture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    section: CrossSection,
    hole: Aperture,
    thickness: f64,
    separation: f64,
}

fn positive_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidGeometry(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

fn contained(name: &str, start: f64, len: f64, extent: f64) -> Result<()> {
    if !start.is_finite() || start < -CONTAINMENT_TOL || start + len > extent + CONTAINMENT_TOL {
        return Err(Error::InvalidGeometry(format!(
            "{name} aperture ({start}, {}) is not contained in (0, {extent})",
            start + len
        )));
    }
    Ok(())
}

impl Geometry {
    /// A two-dimensional duct of the given height.
    pub fn interval(height: f64, x0: f64, delta: f64, thickness: f64, separation: f64) -> Result<Self> {
        Self::new(
            CrossSection::Interval { height },
            Aperture {
                x0,
                delta,
                y0: 0.0,
                delta2: 0.0,
            },
            thickness,
            separation,
        )
    }

    pub fn new(section: CrossSection, hole: Aperture, thickness: f64, separation: f64) -> Result<Self> {
        match section {
            CrossSection::Interval { height } => {
                positive_finite("H", height)?;
                positive_finite("delta", hole.delta)?;
                contained("x", hole.x0, hole.delta, height)?;
            }
            CrossSection::Rectangle { height, width } => {
                positive_finite("H", height)?;
                positive_finite("H2", width)?;
                positive_finite("delta", hole.delta)?;
                positive_finite("delta2", hole.delta2)?;
                contained("x", hole.x0, hole.delta, height)?;
                contained("y", hole.y0, hole.delta2, width)?;
            }
        }
        positive_finite("w", thickness)?;
        if !(separation.is_finite() && separation > thickness) {
            return Err(Error::InvalidGeometry(format!(
                "barrier separation L = {separation} must exceed thickness w = {thickness}"
            )));
        }
        Ok(Self {
            section,
            hole,
            thickness,
            separation,
        })
    }

    /// The reference configuration used throughout the tests and examples.
    pub fn desk() -> Self {
        Self::interval(1.0, 0.45, 0.1, 0.3, 2.0).expect("desk geometry is valid")
    }

    pub fn section(&self) -> CrossSection {
        self.section
    }

    pub fn hole(&self) -> Aperture {
        self.hole
    }

    pub fn height(&self) -> f64 {
        match self.section {
            CrossSection::Interval { height } | CrossSection::Rectangle { height, .. } => height,
        }
    }

    pub fn is_two_dimensional(&self) -> bool {
        matches!(self.section, CrossSection::Interval { .. })
    }

    /// Barrier thickness `w`.
    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    /// Start of the second barrier, `L`.
    pub fn separation(&self) -> f64 {
        self.separation
    }

    /// Half the cavity length, `(L - w) / 2`.
    pub fn half_cavity(&self) -> f64 {
        0.5 * (self.separation - self.thickness)
    }

    /// Mid-plane of the cavity, `(L + w) / 2`.
    pub fn symmetry_plane(&self) -> f64 {
        0.5 * (self.separation + self.thickness)
    }

    /// Outlet face of the second barrier, `L + w`.
    pub fn outlet(&self) -> f64 {
        self.separation + self.thickness
    }

    /// True when the cross-section point lies in the open aperture.
    pub fn in_aperture(&self, x: f64, y: f64) -> bool {
        let inx = x > self.hole.x0 && x < self.hole.x0 + self.hole.delta;
        match self.section {
            CrossSection::Interval { .. } => inx,
            CrossSection::Rectangle { .. } => inx && y > self.hole.y0 && y < self.hole.y0 + self.hole.delta2,
        }
    }

    /// True when `(x, y, z)` lies in barrier material (faces included).
    pub fn in_barrier(&self, x: f64, y: f64, z: f64) -> bool {
        let in_slab = (0.0..=self.thickness).contains(&z) || (self.separation..=self.outlet()).contains(&z);
        in_slab && !self.in_aperture(x, y)
    }
}
