use num_complex::Complex64;
use twinbarrier::Geometry;

use crate::{Domain, FdfdError, Result};

/// Grid spacing `h`, lead length `Z` and number `Nb` of modes in the
/// transparent lead conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub spacing: f64,
    pub lead_length: f64,
    pub boundary_modes: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            spacing: 0.005,
            lead_length: 1.0,
            boundary_modes: 12,
        }
    }
}

impl GridSpec {
    pub fn new(spacing: f64, lead_length: f64, boundary_modes: usize) -> Self {
        Self {
            spacing,
            lead_length,
            boundary_modes,
        }
    }
}

fn steps(name: &str, length: f64, h: f64) -> Result<usize> {
    let q = length / h;
    let n = q.round();
    if !(q.is_finite() && (q - n).abs() <= 1e-9 * n.max(1.0) && n >= 0.0) {
        return Err(FdfdError::Grid(format!(
            "{name} = {length} is not a multiple of h = {h}"
        )));
    }
    Ok(n as usize)
}

/// Node bookkeeping.  Interior cross-section nodes `x_i = (i + 1) h`,
/// axial nodes `z_j = -Z + j h`.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    h: f64,
    height: f64,
    nxi: usize,
    nz: usize,
    z_start: f64,
    domain: Domain,
    /// Open aperture nodes: `open.0 <= i < open.1`.
    open: (usize, usize),
    /// Axial index ranges (inclusive) of the two slabs.
    slabs: [(usize, usize); 2],
    /// Indices of `z = 0` and `z = L + w`.
    inlet_face: usize,
    outlet_face: usize,
}

impl Layout {
    pub(crate) fn new(g: &Geometry, spec: &GridSpec, domain: Domain) -> Result<Self> {
        let h = spec.spacing;
        if !(h.is_finite() && h > 0.0) {
            return Err(FdfdError::Grid(format!("spacing must be positive, got {h}")));
        }
        if spec.boundary_modes == 0 {
            return Err(FdfdError::Grid("need at least one boundary mode".into()));
        }
        let hole = g.hole();
        let nx = steps("H", g.height(), h)?;
        let i0 = steps("x0", hole.x0, h)?;
        let i1 = steps("x0 + delta", hole.x0 + hole.delta, h)?;
        let nw = steps("w", g.thickness(), h)?;
        let nl = steps("L", g.separation(), h)?;
        let nzl = steps("Z", spec.lead_length, h)?;
        if nx < 2 {
            return Err(FdfdError::Grid(
                "need at least one interior node across the duct".into(),
            ));
        }
        let nz = match domain {
            Domain::Full => 2 * nzl + nl + nw + 1,
            Domain::Half(_) => {
                let twice = nl + nw;
                if twice % 2 != 0 {
                    return Err(FdfdError::Grid(format!(
                        "mid-plane (L + w) / 2 is not on the grid for h = {h}"
                    )));
                }
                nzl + twice / 2 + 1
            }
        };
        // Node i (0-based interior) sits at x = (i + 1) h; open when i0 < i + 1 < i1.
        let open = (i0, i1.saturating_sub(1));
        Ok(Self {
            h,
            height: g.height(),
            nxi: nx - 1,
            nz,
            z_start: -spec.lead_length,
            domain,
            open,
            slabs: [(nzl, nzl + nw), (nzl + nl, nzl + nl + nw)],
            inlet_face: nzl,
            outlet_face: nzl + nl + nw,
        })
    }

    pub(crate) fn spacing(&self) -> f64 {
        self.h
    }

    pub(crate) fn height(&self) -> f64 {
        self.height
    }

    pub(crate) fn nx_interior(&self) -> usize {
        self.nxi
    }

    pub(crate) fn nz(&self) -> usize {
        self.nz
    }

    pub(crate) fn domain(&self) -> Domain {
        self.domain
    }

    pub(crate) fn unknowns(&self) -> usize {
        self.nxi * self.nz
    }

    pub(crate) fn index(&self, i: usize, j: usize) -> usize {
        j * self.nxi + i
    }

    pub(crate) fn x(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.h
    }

    pub(crate) fn z(&self, j: usize) -> f64 {
        self.z_start + j as f64 * self.h
    }

    pub(crate) fn inlet_face(&self) -> usize {
        self.inlet_face
    }

    pub(crate) fn outlet_face(&self) -> usize {
        self.outlet_face
    }

    pub(crate) fn in_barrier_node(&self, i: usize, j: usize) -> bool {
        let in_slab = self.slabs.iter().any(|&(a, b)| j >= a && j <= b);
        in_slab && !(i >= self.open.0 && i < self.open.1)
    }
}

/// Discrete duct modes on the interior nodes and their lead propagation data.
#[derive(Debug, Clone)]
pub struct LeadModes {
    h: f64,
    nxi: usize,
    k: f64,
    height: f64,
    /// `modes[n][i] = sqrt(2/H) sin((n+1) π x_i / H)`.
    modes: Vec<Vec<f64>>,
    rates: Vec<LeadRate>,
}

/// Discrete axial behaviour of one lead mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LeadRate {
    /// `e^{±iγz}` with the discrete `γ`.
    Propagating(f64),
    /// `e^{∓κz}` with the discrete `κ`.
    Evanescent(f64),
}

impl LeadModes {
    pub(crate) fn new(layout: &Layout, k: f64, nb: usize) -> Result<Self> {
        let h = layout.spacing();
        let height = layout.height();
        let nxi = layout.nx_interior();
        let nb = nb.min(nxi);
        let mut modes = Vec::with_capacity(nb);
        let mut rates = Vec::with_capacity(nb);
        for n in 1..=nb {
            let a = n as f64 * std::f64::consts::PI / height;
            let norm = (2.0 / height).sqrt();
            modes.push((0..nxi).map(|i| norm * (a * layout.x(i)).sin()).collect());
            let lam = 4.0 / (h * h) * (0.5 * a * h).sin().powi(2);
            let c = 1.0 + 0.5 * h * h * (lam - k * k);
            let rate = if c.abs() < 1.0 {
                LeadRate::Propagating(c.acos() / h)
            } else if c >= 1.0 {
                LeadRate::Evanescent(c.acosh() / h)
            } else {
                return Err(FdfdError::Grid(format!(
                    "k h = {} is too coarse to resolve mode {n}",
                    k * h
                )));
            };
            rates.push(rate);
        }
        if !matches!(rates[0], LeadRate::Propagating(_)) {
            return Err(FdfdError::Unsupported(format!(
                "k = {k} is below the first duct cut-off"
            )));
        }
        if rates.len() > 1 && !matches!(rates[1], LeadRate::Evanescent(_)) {
            return Err(FdfdError::Unsupported(format!(
                "k = {k} propagates more than one duct mode"
            )));
        }
        Ok(Self {
            h,
            nxi,
            k,
            height,
            modes,
            rates,
        })
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn rate(&self, n: usize) -> LeadRate {
        self.rates[n]
    }

    pub(crate) fn mode_value(&self, n: usize, i: usize) -> f64 {
        self.modes[n][i]
    }

    /// Rejects leads too short for the first mode left out of the boundary
    /// condition to decay by `e^{-3}`.
    pub(crate) fn check_lead_length(&self, z: f64) -> Result<()> {
        let n = self.len() + 1;
        if n > self.nxi {
            return Ok(());
        }
        let lam = (n as f64 * std::f64::consts::PI / self.height).powi(2);
        let gamma = (lam - self.k * self.k).sqrt();
        if z * gamma < 3.0 {
            return Err(FdfdError::Grid(format!(
                "lead length Z = {z} is below 3 / gamma_{n} = {}",
                3.0 / gamma
            )));
        }
        Ok(())
    }

    /// Per-step outgoing factor of each mode.
    fn step_factor(&self, n: usize) -> Complex64 {
        match self.rates[n] {
            LeadRate::Propagating(g) => Complex64::from_polar(1.0, g * self.h),
            LeadRate::Evanescent(q) => Complex64::new((-q * self.h).exp(), 0.0),
        }
    }

    /// Dense `nxi x nxi` map from the edge slice to the outer ghost slice,
    /// `Σ σ_n h ψ_n ψ_nᵀ`.
    pub(crate) fn ghost_operator(&self) -> Vec<Complex64> {
        let m = self.nxi;
        let mut g = vec![Complex64::new(0.0, 0.0); m * m];
        for (n, psi) in self.modes.iter().enumerate() {
            let s = self.step_factor(n) * self.h;
            for i in 0..m {
                let si = s * psi[i];
                for l in 0..m {
                    g[i * m + l] += si * psi[l];
                }
            }
        }
        g
    }

    /// Right-hand side on the inlet edge row produced by the incident wave.
    pub(crate) fn incident_ghost_source(&self, z_edge: f64) -> Complex64 {
        match self.rates[0] {
            LeadRate::Propagating(g) => {
                Complex64::new(0.0, 2.0 * (g * self.h).sin()) * Complex64::from_polar(1.0, g * z_edge)
            }
            LeadRate::Evanescent(_) => unreachable!("checked at construction"),
        }
    }

    /// Discrete modal coefficients of one slice.
    pub fn project(&self, slice: &[Complex64]) -> Vec<Complex64> {
        self.modes
            .iter()
            .map(|psi| psi.iter().zip(slice).map(|(p, u)| u * (p * self.h)).sum())
            .collect()
    }
}

/// Solved field on the grid, walls excluded.
#[derive(Debug, Clone)]
pub struct GridField {
    pub h: f64,
    pub nx_interior: usize,
    pub nz: usize,
    pub z_start: f64,
    pub inlet_face: usize,
    pub outlet_face: usize,
    values: Vec<Complex64>,
}

impl GridField {
    pub(crate) fn new(layout: &Layout, values: Vec<Complex64>) -> Self {
        Self {
            h: layout.spacing(),
            nx_interior: layout.nx_interior(),
            nz: layout.nz(),
            z_start: layout.z(0),
            inlet_face: layout.inlet_face(),
            outlet_face: layout.outlet_face(),
            values,
        }
    }

    pub fn slice(&self, j: usize) -> &[Complex64] {
        &self.values[j * self.nx_interior..(j + 1) * self.nx_interior]
    }

    pub fn z(&self, j: usize) -> f64 {
        self.z_start + j as f64 * self.h
    }

    pub fn x(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.h
    }

    pub fn value(&self, i: usize, j: usize) -> Complex64 {
        self.values[j * self.nx_interior + i]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}
