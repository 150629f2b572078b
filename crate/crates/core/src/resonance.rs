//! Trapped-mode resonances of the half problems and frequency sweeps.
//!
//! A Dirichlet (Neumann) resonance is a zero of
//! `h(k) = τ_d + d τ_n` where `(τ_n, τ_d)` are `(cos θ, sin θ)`
//! (`(-sin θ, cos θ)`), `θ = γ₁ℓ` and `d` is the real reduced coefficient.
//! Near such a zero `r₁` of that half problem passes through `+1`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::compensated::{TwoFloat, Wavenumber};
use crate::error::{Error, Result};
use crate::modal::{HalfProblem, ModalSolver, ReducedCoefficients};

/// Which half problem a resonance belongs to.
pub type ResonanceKind = HalfProblem;

/// Relative clearance a band must keep from the single-mode band edges.
pub const BAND_EDGE_MARGIN: f64 = 1e-6;

/// Closed interval `[kmin, kmax]` sampled at `points` equally spaced values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyBand {
    pub kmin: f64,
    pub kmax: f64,
    pub points: usize,
}

impl FrequencyBand {
    pub fn new(kmin: f64, kmax: f64, points: usize) -> Result<Self> {
        if !(kmin.is_finite() && kmax.is_finite() && kmin < kmax) {
            return Err(Error::InvalidBand(format!("need kmin < kmax, got [{kmin}, {kmax}]")));
        }
        Ok(Self { kmin, kmax, points })
    }

    /// The single-mode band of `solver` shrunk by a relative `margin` at each end.
    pub fn interior(solver: &ModalSolver, margin: f64, points: usize) -> Self {
        let (lo, hi) = solver.band();
        Self {
            kmin: lo * (1.0 + margin),
            kmax: hi * (1.0 - margin),
            points,
        }
    }

    /// Checks `sqrt λ₁ < kmin < kmax < min(sqrt λ₂, sqrt μ₁)` with the edge margin.
    pub fn check_within(&self, solver: &ModalSolver) -> Result<()> {
        let (lo, hi) = solver.band();
        if self.kmin <= lo * (1.0 + BAND_EDGE_MARGIN) || self.kmax >= hi * (1.0 - BAND_EDGE_MARGIN) {
            return Err(Error::InvalidBand(format!(
                "[{}, {}] must lie strictly inside the single-mode band ({lo}, {hi})",
                self.kmin, self.kmax
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => alloc::vec![self.kmin],
            n => {
                let step = (self.kmax - self.kmin) / (n - 1) as f64;
                (0..n)
                    .map(|i| {
                        if i == n - 1 {
                            self.kmax
                        } else {
                            self.kmin + step * i as f64
                        }
                    })
                    .collect()
            }
        }
    }
}

/// Search controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Coarse scan resolution over the band.
    pub scan_points: usize,
    /// Local scan resolution around each closed-cavity estimate.
    pub local_points: usize,
    /// Required bracket width relative to `k`.
    pub rel_tol: f64,
    pub max_bisections: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            scan_points: 400,
            local_points: 64,
            rel_tol: 1e-12,
            max_bisections: 200,
        }
    }
}

/// A located resonance.
///
/// `k_res + k_correction` is the root to extended precision; the correction
/// is below one ulp of `k_res` and only matters inside very narrow peaks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceResult {
    pub kind: ResonanceKind,
    pub k_res: f64,
    pub k_correction: f64,
    /// `|h|` at the refined root.
    pub residual: f64,
    /// `1 + |d|`, the natural size of `h`.
    pub residual_scale: f64,
    pub r1_at_res: Complex64,
    pub t1_at_res: Complex64,
    /// Closed-cavity estimate of the same order.
    pub closed_cavity: f64,
    pub order: u32,
    /// Bisection bracket before polishing.
    pub bracket: (f64, f64),
}

impl ResonanceResult {
    pub fn wavenumber(&self) -> Wavenumber {
        Wavenumber::new(self.k_res, self.k_correction)
    }
}

struct Evaluation {
    h: TwoFloat,
    slope: f64,
    reduced: ReducedCoefficients,
}

fn evaluate(solver: &ModalSolver, kind: ResonanceKind, k: Wavenumber) -> Result<Evaluation> {
    let (sp, reduced) = solver.reduced(k, kind)?;
    let (num, den) = sp.phase.end_factor_parts(kind);
    let d = reduced.d.re;
    let h = den + num.mul_f64(d);
    let (s, c) = (sp.phase.sin.to_f64(), sp.phase.cos.to_f64());
    let dtheta = solver.geometry().half_cavity() * k.value / sp.gamma1;
    let slope = dtheta
        * match kind {
            HalfProblem::Dirichlet => c - d * s,
            HalfProblem::Neumann => -s - d * c,
        };
    Ok(Evaluation { h, slope, reduced })
}

/// `h(k)` for the given half problem.
pub fn resonance_function(solver: &ModalSolver, kind: ResonanceKind, k: impl Into<Wavenumber>) -> Result<f64> {
    Ok(evaluate(solver, kind, k.into())?.h.to_f64())
}

/// Closed-cavity estimate of order `m`.
pub fn closed_cavity_wavenumber(solver: &ModalSolver, kind: ResonanceKind, order: u32) -> f64 {
    let lambda1 = solver.basis().duct.eigenvalue(0);
    let ell = solver.geometry().half_cavity();
    let m = f64::from(order);
    let q = match kind {
        HalfProblem::Dirichlet => m * PI / ell,
        HalfProblem::Neumann => (m - 0.5) * PI / ell,
    };
    libm::sqrt(lambda1 + q * q)
}

fn closed_cavity_in(solver: &ModalSolver, kind: ResonanceKind, lo: f64, hi: f64) -> Vec<(u32, f64)> {
    let mut out = Vec::new();
    for m in 1u32..10_000 {
        let k = closed_cavity_wavenumber(solver, kind, m);
        if k >= hi {
            break;
        }
        if k > lo {
            out.push((m, k));
        }
    }
    out
}

fn bisect(
    solver: &ModalSolver,
    kind: ResonanceKind,
    mut lo: f64,
    mut hi: f64,
    mut hlo: f64,
    opts: &SearchOptions,
) -> Result<(f64, f64)> {
    for _ in 0..opts.max_bisections {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok((lo, hi));
        }
        let hm = resonance_function(solver, kind, mid)?;
        if hm == 0.0 {
            return Ok((mid, mid));
        }
        if (hm > 0.0) == (hlo > 0.0) {
            lo = mid;
            hlo = hm;
        } else {
            hi = mid;
        }
    }
    if hi - lo <= opts.rel_tol * hi {
        Ok((lo, hi))
    } else {
        Err(Error::RootNotFound(format!("bisection stalled on [{lo}, {hi}]")))
    }
}

/// Newton steps on the extended-precision phase, coefficients held at the
/// leading double of the current iterate.
fn polish(solver: &ModalSolver, kind: ResonanceKind, k: f64) -> Result<(Wavenumber, Evaluation)> {
    let mut wk = Wavenumber::from(k);
    let mut ev = evaluate(solver, kind, wk)?;
    for _ in 0..8 {
        if ev.slope == 0.0 || !ev.slope.is_finite() {
            break;
        }
        let step = ev.h.to_f64() / ev.slope;
        let next = wk.offset(-step);
        let nev = evaluate(solver, kind, next)?;
        let improved = nev.h.to_f64().abs() < ev.h.to_f64().abs();
        if improved {
            wk = next;
            ev = nev;
        }
        if !improved || step.abs() <= 1e-32 * k {
            break;
        }
    }
    Ok((wk, ev))
}

fn full_reflection(solver: &ModalSolver, k: Wavenumber) -> Result<(Complex64, Complex64, f64)> {
    let rd = solver.reflection_half(k, HalfProblem::Dirichlet)?;
    let rn = solver.reflection_half(k, HalfProblem::Neumann)?;
    let sp = solver.spectrum(k)?;
    let shift = Complex64::from_polar(1.0, -2.0 * sp.gamma1 * solver.geometry().symmetry_plane());
    Ok((0.5 * (rn + rd), 0.5 * (rn - rd) * shift, sp.gamma1))
}

fn refine(
    solver: &ModalSolver,
    kind: ResonanceKind,
    bracket: (f64, f64),
    hlo: f64,
    opts: &SearchOptions,
) -> Result<ResonanceResult> {
    let (lo, hi) = bisect(solver, kind, bracket.0, bracket.1, hlo, opts)?;
    let hl = resonance_function(solver, kind, lo)?.abs();
    let hh = resonance_function(solver, kind, hi)?.abs();
    let start = if hl <= hh { lo } else { hi };
    let (wk, ev) = polish(solver, kind, start)?;
    let (r1, t1, gamma1) = full_reflection(solver, wk)?;
    let theta = gamma1 * solver.geometry().half_cavity() / PI;
    let order = match kind {
        HalfProblem::Dirichlet => libm::round(theta),
        HalfProblem::Neumann => libm::round(theta + 0.5),
    }
    .max(1.0) as u32;
    Ok(ResonanceResult {
        kind,
        k_res: wk.value,
        k_correction: wk.correction,
        residual: ev.h.to_f64().abs(),
        residual_scale: 1.0 + ev.reduced.d.re.abs(),
        r1_at_res: r1,
        t1_at_res: t1,
        closed_cavity: closed_cavity_wavenumber(solver, kind, order),
        order,
        bracket: (lo, hi),
    })
}

fn sign_changes(
    solver: &ModalSolver,
    kind: ResonanceKind,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<Vec<((f64, f64), f64)>> {
    let n = points.max(2);
    let step = (hi - lo) / (n - 1) as f64;
    let mut out = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..n {
        let k = if i == n - 1 { hi } else { lo + step * i as f64 };
        let h = resonance_function(solver, kind, k)?;
        if let Some((kp, hp)) = prev {
            if h == 0.0 || (hp > 0.0) != (h > 0.0) {
                out.push(((kp, k), hp));
            }
        }
        prev = Some((k, h));
    }
    Ok(out)
}

/// All zeros of `h` in the band, ascending.
///
/// A coarse scan is followed by a local scan around every closed-cavity
/// estimate that falls inside the band, so that closely spaced roots are
/// not missed.
pub fn find_resonances(
    solver: &ModalSolver,
    band: &FrequencyBand,
    kind: ResonanceKind,
    opts: &SearchOptions,
) -> Result<Vec<ResonanceResult>> {
    band.check_within(solver)?;
    let mut brackets = sign_changes(solver, kind, band.kmin, band.kmax, opts.scan_points)?;
    let spacing = (band.kmax - band.kmin) / opts.scan_points.max(2) as f64;
    for (_, kc) in closed_cavity_in(solver, kind, band.kmin, band.kmax) {
        let lo = (kc - 2.0 * spacing).max(band.kmin);
        let hi = (kc + 2.0 * spacing).min(band.kmax);
        brackets.extend(sign_changes(solver, kind, lo, hi, opts.local_points)?);
    }
    let mut found: Vec<ResonanceResult> = Vec::new();
    for (bracket, hlo) in brackets {
        let res = refine(solver, kind, bracket, hlo, opts)?;
        let dup = found.iter().any(|r| (r.k_res - res.k_res).abs() <= 1e-9 * res.k_res);
        if !dup {
            found.push(res);
        }
    }
    found.sort_by(|a, b| a.k_res.total_cmp(&b.k_res));
    Ok(found)
}

/// Full width of the transmission peak at `|t₁|² = 1/2` around a resonance.
pub fn transmission_half_width(solver: &ModalSolver, res: &ResonanceResult) -> Result<f64> {
    let k0 = res.wavenumber();
    let excess = |s: f64| -> Result<f64> { Ok(full_reflection(solver, k0.offset(s))?.1.norm_sqr() - 0.5) };
    if excess(0.0)? <= 0.0 {
        return Err(Error::RootNotFound(format!(
            "peak at k = {} does not reach |t1|^2 = 1/2",
            res.k_res
        )));
    }
    let mut width = 0.0;
    for dir in [1.0, -1.0] {
        let mut s = res.k_res * libm::exp2(-90.0);
        let mut inside = 0.0;
        let mut found = false;
        for _ in 0..200 {
            if excess(dir * s)? < 0.0 {
                found = true;
                break;
            }
            inside = s;
            s *= 2.0;
        }
        if !found {
            return Err(Error::RootNotFound("half-power point not bracketed".into()));
        }
        let (mut a, mut b) = (inside, s);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if excess(dir * mid)? >= 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        width += 0.5 * (a + b);
    }
    Ok(width)
}

/// One sweep sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSample {
    pub k: f64,
    pub r1: Complex64,
    pub t1: Complex64,
    pub reflectance: f64,
    pub transmittance: f64,
    pub energy_defect: f64,
    /// Dirichlet resonance function at `k`.
    pub resonance_function: f64,
}

fn sample(solver: &ModalSolver, k: f64) -> Result<SweepSample> {
    let dir = solver.solve_half(k, HalfProblem::Dirichlet)?;
    let neu = solver.solve_half(k, HalfProblem::Neumann)?;
    let res = solver.combine(&dir, &neu);
    Ok(SweepSample {
        k,
        r1: res.r1,
        t1: res.t1,
        reflectance: res.reflectance(),
        transmittance: res.transmittance(),
        energy_defect: res.energy_defect,
        resonance_function: dir.traces.pole_free.0,
    })
}

/// Samples every grid point of `band`; failures are reported per point.
pub fn sweep(solver: &ModalSolver, band: &FrequencyBand) -> Vec<Result<SweepSample>> {
    let grid = band.grid();
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        grid.par_iter().map(|&k| sample(solver, k)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        grid.iter().map(|&k| sample(solver, k)).collect()
    }
}
