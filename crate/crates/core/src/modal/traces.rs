use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::operators::OperatorSet;
use super::spectrum::{AxialSpectrum, HalfProblem};
use crate::compensated::TwoFloat;
use crate::error::{Error, Result};
use crate::linalg::{Cholesky, ComplexLu, Dense};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Coefficients of the reduced two-unknown system for the `ψ₁` projections
/// of the two aperture traces.
///
/// `a` and `c` are purely imaginary, `b` and `d` real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedCoefficients {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl ReducedCoefficients {
    /// Real parameters `(A, B, C, D)` with `a = iA`, `b = B`, `c = iC`, `d = D`.
    pub fn real_parts(&self) -> [f64; 4] {
        [self.a.im, self.b.re, self.c.im, self.d.re]
    }

    /// Pole-free numerator/denominator pair: `h = τ_d + D τ_n` and
    /// `X = A h - B C τ_n`.  Reflection is `(-h + iX) / (h + iX)`.
    pub fn pole_free(&self, tau_num: TwoFloat, tau_den: TwoFloat) -> (f64, f64) {
        let [a, b, c, d] = self.real_parts();
        let h = (tau_den + tau_num.mul_f64(d)).to_f64();
        let x = a * h - b * c * tau_num.to_f64();
        (h, x)
    }
}

/// Computes `(a, b, c, d)` via Schur complements of the block operator.
pub fn reduced_coefficients(
    ops: &OperatorSet,
    spectrum: &AxialSpectrum,
    variant: HalfProblem,
) -> Result<ReducedCoefficients> {
    let m = ops.dim();
    let g1 = spectrum.gamma1;
    let a1 = ops.a1(variant);
    let chol0 = Cholesky::factor(&ops.a0, "A0")?;
    let chol1 = Cholesky::factor(a1, "A1")?;
    let bdiag = &ops.coupling;
    let w0 = chol0.solve(&ops.p);
    let w1 = chol1.solve(&ops.p);
    let inv0 = chol0.inverse();
    let inv1 = chol1.inverse();
    let s1 = Dense::from_fn(m, m, |i, j| ops.a0[(i, j)] - bdiag[i] * inv1[(i, j)] * bdiag[j]);
    let s2 = Dense::from_fn(m, m, |i, j| a1[(i, j)] - bdiag[i] * inv0[(i, j)] * bdiag[j]);
    let y1 = Cholesky::factor(&s1, "S1")?.solve(&ops.p);
    let y2 = Cholesky::factor(&s2, "S2")?.solve(&ops.p);
    let bw1: Vec<f64> = bdiag.iter().zip(&w1).map(|(b, w)| b * w).collect();
    let bw0: Vec<f64> = bdiag.iter().zip(&w0).map(|(b, w)| b * w).collect();
    Ok(ReducedCoefficients {
        a: Complex64::new(0.0, -g1 * dot(&ops.p, &y1)),
        b: Complex64::new(-g1 * dot(&y1, &bw1), 0.0),
        c: Complex64::new(0.0, g1 * dot(&y2, &bw0)),
        d: Complex64::new(g1 * dot(&ops.p, &y2), 0.0),
    })
}

/// Aperture traces of one half problem, from the full block solve and from
/// the reduced 2x2 system.
#[derive(Debug, Clone)]
pub struct TraceSolution {
    pub variant: HalfProblem,
    /// Aperture coefficients of `u` at `z = 0`.
    pub u0: Vec<Complex64>,
    /// Aperture coefficients of `u` at `z = w`.
    pub u1: Vec<Complex64>,
    pub reduced: ReducedCoefficients,
    /// `(u(0), ψ₁)` and `(u(w), ψ₁)` from the block solve.
    pub block_projections: [Complex64; 2],
    /// The same projections from the reduced system.
    pub reduced_projections: [Complex64; 2],
    pub block_condition: f64,
    pub reduced_condition: f64,
    /// Pole-free `(h, X)` of the reflection at this `k`.
    pub pole_free: (f64, f64),
    pub end_factor: f64,
}

fn reduced_condition(r: &ReducedCoefficients, t: f64) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    let m = [[one + r.a, r.b * t], [r.c, one + r.d * t]];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let fro2: f64 = m.iter().flatten().map(|v| v.norm_sqr()).sum();
    fro2 / det.norm()
}

pub fn solve_traces(ops: &OperatorSet, spectrum: &AxialSpectrum, variant: HalfProblem) -> Result<TraceSolution> {
    let reduced = reduced_coefficients(ops, spectrum, variant)?;
    let (tau_num, tau_den) = spectrum.phase.end_factor_parts(variant);
    let (h, x) = reduced.pole_free(tau_num, tau_den);
    let den = Complex64::new(h, x);
    if den.norm() == 0.0 {
        return Err(Error::NearSingular {
            system: "2x2 reduced",
            condition: f64::INFINITY,
        });
    }
    let s0 = 2.0 * I * x / den;
    let s1 = 2.0 * reduced.c * tau_den.to_f64() / den;
    let t = tau_num.to_f64() / tau_den.to_f64();

    let m = ops.dim();
    let g1 = spectrum.gamma1;
    let p = &ops.p;
    let a1 = ops.a1(variant);
    let mut k = Dense::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            k[(i, j)] = Complex64::new(ops.a0[(i, j)], -g1 * p[i] * p[j]);
            k[(m + i, m + j)] = Complex64::new(a1[(i, j)] + g1 * t * p[i] * p[j], 0.0);
        }
        k[(i, m + i)] = Complex64::new(ops.coupling[i], 0.0);
        k[(m + i, i)] = Complex64::new(ops.coupling[i], 0.0);
    }
    if !t.is_finite() {
        return Err(Error::NearSingular {
            system: "block trace",
            condition: f64::INFINITY,
        });
    }
    let lu = ComplexLu::factor(k, "block trace")?;
    let mut rhs = vec![Complex64::new(0.0, 0.0); 2 * m];
    for i in 0..m {
        rhs[i] = -2.0 * I * g1 * p[i];
    }
    let sol = lu.solve(&rhs);
    let (u0, u1) = (sol[..m].to_vec(), sol[m..].to_vec());
    let proj = |u: &[Complex64]| u.iter().zip(p).map(|(a, b)| a * b).sum::<Complex64>();
    Ok(TraceSolution {
        variant,
        block_projections: [proj(&u0), proj(&u1)],
        u0,
        u1,
        reduced,
        reduced_projections: [s0, s1],
        block_condition: lu.condition(),
        reduced_condition: reduced_condition(&reduced, t),
        pole_free: (h, x),
        end_factor: t,
    })
}
