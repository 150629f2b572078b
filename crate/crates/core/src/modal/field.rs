use alloc::vec::Vec;

use num_complex::Complex64;

use super::spectrum::{AxialSpectrum, HalfProblem};
use super::{HalfSolution, ModalSolver};
use crate::compensated::Wavenumber;
use crate::error::Result;
use crate::math::{cosh_ratio, sinh_ratio};
use crate::quadrature::CompositeRule;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A sample point; `y` is ignored for an interval duct.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Modal coefficients of one half-problem field in every region.
#[derive(Debug, Clone)]
pub struct HalfFieldExpansion {
    pub variant: HalfProblem,
    pub spectrum: AxialSpectrum,
    pub reflection: Complex64,
    /// `(u(0), ψ_n)` for every duct mode; entry 0 is `1 + r`.
    pub inlet: Vec<Complex64>,
    /// Aperture trace at `z = 0`.
    pub channel_inlet: Vec<Complex64>,
    /// Aperture trace at `z = w`.
    pub channel_outlet: Vec<Complex64>,
    /// `(u(w), ψ_n)` for every duct mode.
    pub cavity: Vec<Complex64>,
    /// Amplitude of the `ψ₁` standing wave measured from the mid-plane:
    /// `α sin(γ₁(z₀ - z))` (Dirichlet) or `α cos(γ₁(z₀ - z))` (Neumann).
    pub cavity_fundamental: Complex64,
    pub coupling: Vec<f64>,
}

/// Which barrier face an interface check refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Face {
    Inlet,
    Outlet,
}

impl HalfFieldExpansion {
    pub fn from_solution(solver: &ModalSolver, sol: &HalfSolution) -> Self {
        let basis = solver.basis();
        let project = |u: &[Complex64]| -> Vec<Complex64> {
            (0..basis.duct.len())
                .map(|n| basis.overlap_row(n).iter().zip(u).map(|(p, v)| v * p).sum())
                .collect()
        };
        let (h, x) = sol.traces.pole_free;
        HalfFieldExpansion {
            variant: sol.traces.variant,
            spectrum: sol.spectrum.clone(),
            reflection: sol.reflection.value,
            inlet: project(&sol.traces.u0),
            channel_inlet: sol.traces.u0.clone(),
            channel_outlet: sol.traces.u1.clone(),
            cavity: project(&sol.traces.u1),
            cavity_fundamental: 2.0 * sol.traces.reduced.c / Complex64::new(h, x),
            coupling: sol.operators.coupling.clone(),
        }
    }

    fn duct_sum(&self, solver: &ModalSolver, x: f64, y: f64, coef: impl Fn(usize) -> Complex64) -> Complex64 {
        let duct = &solver.basis().duct;
        (0..duct.len()).map(|n| coef(n) * duct.eval(n, x, y)).sum()
    }

    fn hole_sum(&self, solver: &ModalSolver, x: f64, y: f64, coef: impl Fn(usize) -> Complex64) -> Complex64 {
        let hole = &solver.basis().hole;
        (0..hole.len()).map(|m| coef(m) * hole.eval(m, x, y)).sum()
    }

    /// Field of this half problem on `z <= z₀`, mirrored beyond.
    pub fn eval(&self, solver: &ModalSolver, p: FieldPoint) -> Complex64 {
        let g = solver.geometry();
        let z0 = g.symmetry_plane();
        let (z, sign) = if p.z > z0 {
            let s = match self.variant {
                HalfProblem::Dirichlet => -1.0,
                HalfProblem::Neumann => 1.0,
            };
            (2.0 * z0 - p.z, s)
        } else {
            (p.z, 1.0)
        };
        if g.in_barrier(p.x, p.y, z) {
            return Complex64::new(0.0, 0.0);
        }
        let sp = &self.spectrum;
        let w = g.thickness();
        let ell = g.half_cavity();
        let value = if z < 0.0 {
            let g1 = sp.gamma1;
            self.duct_sum(solver, p.x, p.y, |n| {
                if n == 0 {
                    Complex64::from_polar(1.0, g1 * z) + self.reflection * Complex64::from_polar(1.0, -g1 * z)
                } else {
                    let e = libm::exp(sp.gamma[n - 1] * z);
                    (self.inlet[n]) * e
                }
            })
        } else if z <= w {
            self.hole_sum(solver, p.x, p.y, |m| {
                let b = sp.beta[m];
                self.channel_inlet[m] * sinh_ratio(b, w - z, w) + self.channel_outlet[m] * sinh_ratio(b, z, w)
            })
        } else {
            let zeta = z0 - z;
            let g1 = sp.gamma1;
            self.duct_sum(solver, p.x, p.y, |n| {
                if n == 0 {
                    let arg = g1 * zeta;
                    let shape = match self.variant {
                        HalfProblem::Dirichlet => libm::sin(arg),
                        HalfProblem::Neumann => libm::cos(arg),
                    };
                    self.cavity_fundamental * shape
                } else {
                    let gn = sp.gamma[n - 1];
                    let r = match self.variant {
                        HalfProblem::Dirichlet => sinh_ratio(gn, zeta, ell),
                        HalfProblem::Neumann => cosh_ratio(gn, zeta, ell),
                    };
                    self.cavity[n] * r
                }
            })
        };
        value * sign
    }

    /// Value and `∂u/∂z` on both sides of a barrier face at a point of the
    /// aperture: `[(duct side), (channel side)]`.
    pub fn face_values(&self, solver: &ModalSolver, face: Face, x: f64, y: f64) -> [(Complex64, Complex64); 2] {
        let g = solver.geometry();
        let sp = &self.spectrum;
        let g1 = sp.gamma1;
        let ell = g.half_cavity();
        match face {
            Face::Inlet => {
                let u = self.duct_sum(
                    solver,
                    x,
                    y,
                    |n| if n == 0 { 1.0 + self.reflection } else { self.inlet[n] },
                );
                let du = self.duct_sum(solver, x, y, |n| {
                    if n == 0 {
                        I * g1 * (1.0 - self.reflection)
                    } else {
                        self.inlet[n] * sp.gamma[n - 1]
                    }
                });
                let v = self.hole_sum(solver, x, y, |m| self.channel_inlet[m]);
                let dv = self.hole_sum(solver, x, y, |m| {
                    -self.channel_inlet[m] * sp.beta_hat[m] - self.channel_outlet[m] * self.coupling[m]
                });
                [(u, du), (v, dv)]
            }
            Face::Outlet => {
                let theta = g1 * ell;
                let u = self.duct_sum(solver, x, y, |n| {
                    if n == 0 {
                        self.cavity_fundamental
                            * match self.variant {
                                HalfProblem::Dirichlet => libm::sin(theta),
                                HalfProblem::Neumann => libm::cos(theta),
                            }
                    } else {
                        self.cavity[n]
                    }
                });
                let du = self.duct_sum(solver, x, y, |n| {
                    if n == 0 {
                        self.cavity_fundamental
                            * g1
                            * match self.variant {
                                HalfProblem::Dirichlet => -libm::cos(theta),
                                HalfProblem::Neumann => libm::sin(theta),
                            }
                    } else {
                        let gn = sp.gamma[n - 1];
                        let t = libm::tanh(gn * ell);
                        -self.cavity[n]
                            * match self.variant {
                                HalfProblem::Dirichlet => gn / t,
                                HalfProblem::Neumann => gn * t,
                            }
                    }
                });
                let v = self.hole_sum(solver, x, y, |m| self.channel_outlet[m]);
                let dv = self.hole_sum(solver, x, y, |m| {
                    self.channel_inlet[m] * self.coupling[m] + self.channel_outlet[m] * sp.beta_hat[m]
                });
                [(u, du), (v, dv)]
            }
        }
    }

    /// `L²(Γ)` norms of the value and normal-derivative jumps across a face.
    pub fn interface_mismatch(&self, solver: &ModalSolver, face: Face) -> (f64, f64) {
        let hole = solver.basis().hole.patch();
        let rx = CompositeRule::new(hole.x0, hole.x0 + hole.lx, 64, 8);
        let jump = |x: f64, y: f64| {
            let [(u, du), (v, dv)] = self.face_values(solver, face, x, y);
            ((u - v).norm_sqr(), (du - dv).norm_sqr())
        };
        let (su, sd) = match hole.ly {
            None => rx.nodes.iter().zip(&rx.weights).fold((0.0, 0.0), |acc, (&x, &w)| {
                let (a, b) = jump(x, 0.0);
                (acc.0 + w * a, acc.1 + w * b)
            }),
            Some(ly) => {
                let ry = CompositeRule::new(hole.y0, hole.y0 + ly, 16, 8);
                let mut acc = (0.0, 0.0);
                for (&x, &wx) in rx.nodes.iter().zip(&rx.weights) {
                    for (&y, &wy) in ry.nodes.iter().zip(&ry.weights) {
                        let (a, b) = jump(x, y);
                        acc.0 += wx * wy * a;
                        acc.1 += wx * wy * b;
                    }
                }
                acc
            }
        };
        (libm::sqrt(su), libm::sqrt(sd))
    }
}

/// Full field sampled at a list of points.
#[derive(Debug, Clone)]
pub struct FieldMap {
    pub k: f64,
    pub dirichlet: HalfFieldExpansion,
    pub neumann: HalfFieldExpansion,
    pub points: Vec<FieldPoint>,
    pub values: Vec<Complex64>,
}

impl FieldMap {
    /// Root-mean-square `|u|` over sample points with `z` in `[z_lo, z_hi]`
    /// that are not in barrier material.
    pub fn rms_between(&self, solver: &ModalSolver, z_lo: f64, z_hi: f64) -> f64 {
        let g = solver.geometry();
        let (sum, count) = self
            .points
            .iter()
            .zip(&self.values)
            .filter(|(p, _)| p.z >= z_lo && p.z <= z_hi && !g.in_barrier(p.x, p.y, p.z))
            .fold((0.0, 0usize), |(s, c), (_, v)| (s + v.norm_sqr(), c + 1));
        if count == 0 {
            0.0
        } else {
            libm::sqrt(sum / count as f64)
        }
    }

    /// RMS field in the cavity `(w, L)` over RMS field in the inlet `z < 0`.
    pub fn cavity_enhancement(&self, solver: &ModalSolver) -> f64 {
        let g = solver.geometry();
        let cavity = self.rms_between(solver, g.thickness(), g.separation());
        let inlet = self.rms_between(solver, f64::NEG_INFINITY, 0.0);
        cavity / inlet
    }
}

/// Evaluates `(u_D + u_N) / 2` at each point.
pub fn field_map(solver: &ModalSolver, k: impl Into<Wavenumber>, points: &[FieldPoint]) -> Result<FieldMap> {
    let k = k.into();
    let dsol = solver.solve_half(k, HalfProblem::Dirichlet)?;
    let nsol = solver.solve_half(k, HalfProblem::Neumann)?;
    let dirichlet = HalfFieldExpansion::from_solution(solver, &dsol);
    let neumann = HalfFieldExpansion::from_solution(solver, &nsol);
    let values = points
        .iter()
        .map(|&p| 0.5 * (dirichlet.eval(solver, p) + neumann.eval(solver, p)))
        .collect();
    Ok(FieldMap {
        k: k.value,
        dirichlet,
        neumann,
        points: points.to_vec(),
        values,
    })
}
