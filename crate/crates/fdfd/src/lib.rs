//! Second-order finite-difference reference solver for the two-barrier
//! waveguide, independent of the modal machinery.
//!
//! The Helmholtz equation is discretised with the five-point stencil on a
//! uniform grid.  Barrier material is removed from the unknowns by identity
//! rows.  The leads are truncated after `Z` with transparent conditions
//! built from the discrete duct modes, so the first `Nb` modes leave the
//! domain without reflection.  Modal amplitudes are read off two field
//! slices in each lead.

mod extract;
mod grid;

use faer::prelude::Solve;
use faer::sparse::{SparseColMat, Triplet};
use num_complex::Complex64;
use twinbarrier::{Geometry, HalfProblem};

pub use extract::{extract_coefficients, LeadAmplitudes};
pub use grid::{GridField, GridSpec, LeadModes, LeadRate};

use grid::Layout;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FdfdError {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("sparse factorisation failed after retry with lengthened leads: {0}")]
    Singular(String),
}

pub type Result<T, E = FdfdError> = std::result::Result<T, E>;

/// Which obstacle to place in the duct.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Barriers {
    /// The apertured barriers of the geometry.
    Apertured,
    /// Empty duct.
    Absent,
    /// Both barriers solid.
    Closed,
}

/// Computational domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// Inlet lead through outlet lead.
    Full,
    /// Inlet lead to the cavity mid-plane, closed by the given end condition.
    Half(HalfProblem),
}

/// Result of one oracle solve.
///
/// Evanescent amplitudes belong to modes `2..=Nb`; inlet ones are referred
/// to `z = 0`, outlet ones to `z = L + w`.
#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub k: f64,
    pub r1: Complex64,
    /// `None` for half problems.
    pub t1: Option<Complex64>,
    pub rn: Vec<Complex64>,
    pub tn: Vec<Complex64>,
    /// Recovered amplitude of the incoming wave; `1` up to rounding.
    pub incident: Complex64,
    /// `‖A u - b‖ / ‖b‖`.
    pub residual: f64,
    pub unknowns: usize,
    /// Lead length actually used (lengthened once on a failed factorisation).
    pub lead_length: f64,
    pub field: GridField,
}

/// FDFD solver for one geometry, grid and obstacle choice.
#[derive(Debug, Clone)]
pub struct Fdfd {
    geometry: Geometry,
    grid: GridSpec,
    barriers: Barriers,
}

impl Fdfd {
    pub fn new(geometry: Geometry, grid: GridSpec) -> Result<Self> {
        if !geometry.is_two_dimensional() {
            return Err(FdfdError::Unsupported(
                "the oracle handles interval cross-sections only".into(),
            ));
        }
        Layout::new(&geometry, &grid, Domain::Full)?;
        Layout::new(&geometry, &grid, Domain::Half(HalfProblem::Dirichlet))?;
        Ok(Self {
            geometry,
            grid,
            barriers: Barriers::Apertured,
        })
    }

    pub fn with_barriers(mut self, barriers: Barriers) -> Self {
        self.barriers = barriers;
        self
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn solve(&self, k: f64, domain: Domain) -> Result<OracleSolution> {
        match self.solve_with(k, domain, self.grid) {
            Err(FdfdError::Singular(_)) => {
                let mut grid = self.grid;
                grid.lead_length += grid.spacing;
                self.solve_with(k, domain, grid)
            }
            other => other,
        }
    }

    fn solve_with(&self, k: f64, domain: Domain, grid: GridSpec) -> Result<OracleSolution> {
        let layout = Layout::new(&self.geometry, &grid, domain)?;
        let leads = LeadModes::new(&layout, k, grid.boundary_modes)?;
        leads.check_lead_length(grid.lead_length)?;
        let (triplets, rhs) = assemble(&layout, &leads, self.barriers, &self.geometry, k);
        let n = layout.unknowns();
        let a = SparseColMat::<usize, faer::c64>::try_new_from_triplets(n, n, &triplets)
            .map_err(|e| FdfdError::Singular(format!("{e:?}")))?;
        let lu = a.sp_lu().map_err(|e| FdfdError::Singular(format!("{e:?}")))?;
        let b = faer::Col::<faer::c64>::from_fn(n, |i| faer::c64::new(rhs[i].re, rhs[i].im));
        let x = lu.solve(&b);
        let u: Vec<Complex64> = (0..n).map(|i| Complex64::new(x[i].re, x[i].im)).collect();
        if u.iter().any(|v| !v.is_finite()) {
            return Err(FdfdError::Singular("non-finite solution".into()));
        }
        let residual = residual(&triplets, &u, &rhs);
        let field = GridField::new(&layout, u);
        let inlet = extract::inlet_amplitudes(&field, &leads, &layout);
        let incident = inlet.forward[0];
        let r1 = inlet.backward[0] / incident;
        let rn = inlet.backward[1..].iter().map(|b| b / incident).collect();
        let (t1, tn) = match domain {
            Domain::Full => {
                let out = extract::outlet_amplitudes(&field, &leads, &layout, self.geometry.outlet());
                (
                    Some(out.forward[0] / incident),
                    out.forward[1..].iter().map(|f| f / incident).collect(),
                )
            }
            Domain::Half(_) => (None, Vec::new()),
        };
        Ok(OracleSolution {
            k,
            r1,
            t1,
            rn,
            tn,
            incident,
            residual,
            unknowns: n,
            lead_length: grid.lead_length,
            field,
        })
    }
}

fn residual(triplets: &[Triplet<usize, usize, faer::c64>], u: &[Complex64], b: &[Complex64]) -> f64 {
    let mut r: Vec<Complex64> = b.iter().map(|v| -v).collect();
    for t in triplets {
        r[t.row] += Complex64::new(t.val.re, t.val.im) * u[t.col];
    }
    let nr: f64 = r.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    nr / nb
}

fn assemble(
    layout: &Layout,
    leads: &LeadModes,
    barriers: Barriers,
    geometry: &Geometry,
    k: f64,
) -> (Vec<Triplet<usize, usize, faer::c64>>, Vec<Complex64>) {
    let nxi = layout.nx_interior();
    let nz = layout.nz();
    let h = layout.spacing();
    let n = layout.unknowns();
    let mut trip = Vec::with_capacity(5 * n + 2 * nxi * nxi);
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    let c = |v: f64| faer::c64::new(v, 0.0);
    let diag = k * k * h * h - 4.0;
    let solid = |i: usize, j: usize| -> bool {
        let z = layout.z(j);
        match barriers {
            Barriers::Absent => false,
            Barriers::Closed => {
                (z >= -1e-12 && z <= geometry.thickness() + 1e-12)
                    || (z >= geometry.separation() - 1e-12 && z <= geometry.outlet() + 1e-12)
            }
            Barriers::Apertured => layout.in_barrier_node(i, j),
        }
    };
    let last = nz - 1;
    for j in 0..nz {
        for i in 0..nxi {
            let row = layout.index(i, j);
            if solid(i, j) {
                trip.push(Triplet::new(row, row, c(1.0)));
                continue;
            }
            if j == last {
                if let Domain::Half(HalfProblem::Dirichlet) = layout.domain() {
                    trip.push(Triplet::new(row, row, c(1.0)));
                    continue;
                }
            }
            trip.push(Triplet::new(row, row, c(diag)));
            if i > 0 {
                trip.push(Triplet::new(row, layout.index(i - 1, j), c(1.0)));
            }
            if i + 1 < nxi {
                trip.push(Triplet::new(row, layout.index(i + 1, j), c(1.0)));
            }
            if j > 0 {
                trip.push(Triplet::new(row, layout.index(i, j - 1), c(1.0)));
            }
            if j < last {
                trip.push(Triplet::new(row, layout.index(i, j + 1), c(1.0)));
            } else if let Domain::Half(HalfProblem::Neumann) = layout.domain() {
                // Mirror ghost across the mid-plane.
                trip.push(Triplet::new(row, layout.index(i, j - 1), c(1.0)));
            }
        }
    }
    // Transparent ghost rows: u_ghost = G u_edge (+ incident correction on the inlet).
    let g = leads.ghost_operator();
    let mut add_ghost = |j: usize| {
        for i in 0..nxi {
            let row = layout.index(i, j);
            if solid(i, j) {
                continue;
            }
            for l in 0..nxi {
                let v = g[i * nxi + l];
                if v != Complex64::new(0.0, 0.0) {
                    trip.push(Triplet::new(row, layout.index(l, j), faer::c64::new(v.re, v.im)));
                }
            }
        }
    };
    add_ghost(0);
    if let Domain::Full = layout.domain() {
        add_ghost(last);
    }
    let inc = leads.incident_ghost_source(layout.z(0));
    for i in 0..nxi {
        if !solid(i, 0) {
            rhs[layout.index(i, 0)] = inc * leads.mode_value(0, i);
        }
    }
    (trip, rhs)
}

/// Discrete lead modes and their axial rates at `k` on the given grid.
pub fn lead_modes(geometry: &Geometry, k: f64, grid: &GridSpec) -> Result<LeadModes> {
    let layout = Layout::new(geometry, grid, Domain::Full)?;
    LeadModes::new(&layout, k, grid.boundary_modes)
}

/// Full-domain solve with apertured barriers.
pub fn fdfd_solve(geometry: &Geometry, k: f64, grid: &GridSpec) -> Result<OracleSolution> {
    Fdfd::new(*geometry, *grid)?.solve(k, Domain::Full)
}

/// Half-domain solve closed at the mid-plane.
pub fn fdfd_half_solve(geometry: &Geometry, k: f64, grid: &GridSpec, variant: HalfProblem) -> Result<OracleSolution> {
    Fdfd::new(*geometry, *grid)?.solve(k, Domain::Half(variant))
}

/// `|q(h) - q(h/2)| / |q(h/2) - q(h/4)|`; close to 4 for a second-order method.
pub fn richardson_ratio(coarse: Complex64, medium: Complex64, fine: Complex64) -> f64 {
    (coarse - medium).norm() / (medium - fine).norm()
}

/// `log₂` of [`richardson_ratio`].
pub fn observed_order(coarse: Complex64, medium: Complex64, fine: Complex64) -> f64 {
    richardson_ratio(coarse, medium, fine).log2()
}
