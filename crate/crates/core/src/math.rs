//! Overflow-free hyperbolic helpers for strictly positive rates.

/// Values smaller than this are flushed to zero.
const FLUSH: f64 = 1e-300;

#[inline]
fn flush(x: f64) -> f64 {
    if x.abs() < FLUSH {
        0.0
    } else {
        x
    }
}

/// `coth(x)` for `x > 0`.
#[inline]
pub fn coth(x: f64) -> f64 {
    1.0 / libm::tanh(x)
}

/// `β / sinh(β w)` without forming `sinh`.
#[inline]
pub fn rate_over_sinh(beta: f64, w: f64) -> f64 {
    let x = beta * w;
    if x < 20.0 {
        beta / libm::sinh(x)
    } else {
        let e = libm::exp(-x);
        flush(2.0 * beta * e / (1.0 - e * e))
    }
}

/// `sinh(β a) / sinh(β b)` for `0 <= a <= b`, `b > 0`.
#[inline]
pub fn sinh_ratio(beta: f64, a: f64, b: f64) -> f64 {
    let num = -libm::expm1(-2.0 * beta * a);
    let den = -libm::expm1(-2.0 * beta * b);
    flush(libm::exp(-beta * (b - a)) * num / den)
}

/// `cosh(β a) / cosh(β b)` for `0 <= a <= b`.
#[inline]
pub fn cosh_ratio(beta: f64, a: f64, b: f64) -> f64 {
    let num = 1.0 + libm::exp(-2.0 * beta * a);
    let den = 1.0 + libm::exp(-2.0 * beta * b);
    flush(libm::exp(-beta * (b - a)) * num / den)
}

/// `sin(t) / t` with the removable singularity filled in.
#[inline]
pub fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        let t2 = t * t;
        1.0 - t2 / 6.0 + t2 * t2 / 120.0
    } else {
        libm::sin(t) / t
    }
}
