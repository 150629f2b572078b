use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use twinbarrier::resonance::FrequencyBand;
use twinbarrier::{Aperture, CrossSection, Geometry, ModalSolver, Truncation};
use twinbarrier_fdfd::{Barriers, GridSpec};

use crate::error::CliError;

/// On-disk run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub truncation: TruncationConfig,
    #[serde(default)]
    pub band: BandConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub field: FieldConfig,
    #[serde(default)]
    pub validate: ValidateConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    #[serde(rename = "H")]
    pub height: f64,
    /// Second side of a rectangular cross-section.
    #[serde(rename = "H2", default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    pub hole: HoleConfig,
    pub w: f64,
    #[serde(rename = "L")]
    pub separation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoleConfig {
    pub x0: f64,
    /// Zero closes both barriers.
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta2: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationConfig {
    #[serde(rename = "N")]
    pub duct_modes: usize,
    #[serde(rename = "M")]
    pub hole_modes: usize,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        let t = Truncation::default();
        Self {
            duct_modes: t.duct_modes,
            hole_modes: t.hole_modes,
        }
    }
}

/// Missing `kmin`/`kmax` default to the single-mode band shrunk by 0.1%.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kmin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kmax: Option<f64>,
    pub points: usize,
}

impl Default for BandConfig {
    fn default() -> Self {
        Self {
            kmin: None,
            kmax: None,
            points: 400,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub h: f64,
    #[serde(rename = "Z")]
    pub lead_length: f64,
    #[serde(rename = "Nb")]
    pub boundary_modes: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        let g = GridSpec::default();
        Self {
            h: g.spacing,
            lead_length: g.lead_length,
            boundary_modes: g.boundary_modes,
        }
    }
}

/// Sampling lattice for `field`: `nx` points across the duct, `nz` along it
/// from `z = -margin` to `z = L + w + margin`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub nx: usize,
    pub nz: usize,
    pub margin: f64,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self {
            nx: 41,
            nz: 181,
            margin: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateConfig {
    /// Bound on `|r1(N, M) - r1(2N, 2M)|`.
    pub convergence_tol: f64,
    /// Wavenumbers probed by the convergence check, spread over the band.
    pub convergence_points: usize,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self {
            convergence_tol: 1e-6,
            convergence_points: 5,
        }
    }
}

/// Default destinations; `--out` takes precedence, stdout is the fallback.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resonance: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validate: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare_oracle: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text).map_err(|source| CliError::Parse {
            path: path.to_owned(),
            source,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    /// Whether both barriers are solid.
    pub fn is_closed(&self) -> bool {
        self.geometry.hole.delta == 0.0
    }

    /// Validates everything and builds the solver objects.
    pub fn prepare(&self) -> Result<Prepared, CliError> {
        let g = &self.geometry;
        let closed = self.is_closed();
        // A closed configuration keeps a nominal hole so the duct and leads stay well defined.
        let delta = if closed { g.height / 2.0 } else { g.hole.delta };
        let x0 = if closed { g.height / 4.0 } else { g.hole.x0 };
        let (section, hole) = match g.width {
            None => {
                if g.hole.y0.is_some() || g.hole.delta2.is_some() {
                    return Err(CliError::Config("hole.y0 and hole.delta2 require geometry.H2".into()));
                }
                (
                    CrossSection::Interval { height: g.height },
                    Aperture {
                        x0,
                        delta,
                        y0: 0.0,
                        delta2: 0.0,
                    },
                )
            }
            Some(width) => {
                let (Some(y0), Some(delta2)) = (g.hole.y0, g.hole.delta2) else {
                    return Err(CliError::Config(
                        "a rectangular duct needs hole.y0 and hole.delta2".into(),
                    ));
                };
                let (y0, delta2) = if closed {
                    (width / 4.0, width / 2.0)
                } else {
                    (y0, delta2)
                };
                (
                    CrossSection::Rectangle {
                        height: g.height,
                        width,
                    },
                    Aperture { x0, delta, y0, delta2 },
                )
            }
        };
        let geometry = Geometry::new(section, hole, g.w, g.separation).map_err(CliError::Model)?;
        let t = self.truncation;
        let solver =
            ModalSolver::new(geometry, Truncation::new(t.duct_modes, t.hole_modes)).map_err(CliError::Model)?;
        let default_band = FrequencyBand::interior(&solver, 1e-3, self.band.points);
        let band = FrequencyBand::new(
            self.band.kmin.unwrap_or(default_band.kmin),
            self.band.kmax.unwrap_or(default_band.kmax),
            self.band.points,
        )
        .map_err(CliError::Model)?;
        band.check_within(&solver).map_err(CliError::Model)?;
        let o = self.oracle;
        if !(o.h > 0.0 && o.lead_length > 0.0) {
            return Err(CliError::Config("oracle.h and oracle.Z must be positive".into()));
        }
        if o.boundary_modes < 5 {
            return Err(CliError::Config("oracle.Nb must be at least 5".into()));
        }
        let f = self.field;
        if f.nx < 2 || f.nz < 2 || f.margin.is_nan() || f.margin < 0.0 {
            return Err(CliError::Config("field needs nx, nz >= 2 and margin >= 0".into()));
        }
        if self.validate.convergence_points == 0
            || self.validate.convergence_tol.is_nan()
            || self.validate.convergence_tol <= 0.0
        {
            return Err(CliError::Config(
                "validate needs convergence_points >= 1 and convergence_tol > 0".into(),
            ));
        }
        Ok(Prepared {
            solver,
            band,
            grid: GridSpec::new(o.h, o.lead_length, o.boundary_modes),
            barriers: if closed { Barriers::Closed } else { Barriers::Apertured },
        })
    }
}

/// Validated solver inputs.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub solver: ModalSolver,
    pub band: FrequencyBand,
    pub grid: GridSpec,
    pub barriers: Barriers,
}

impl Prepared {
    pub fn geometry(&self) -> &Geometry {
        self.solver.geometry()
    }

    pub fn is_closed(&self) -> bool {
        self.barriers == Barriers::Closed
    }
}
