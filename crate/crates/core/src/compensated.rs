//! Double-double arithmetic for the handful of quantities that need more
//! than 53 bits: the wavenumber itself and the cavity phase `γ₁ℓ`.

use core::ops::{Add, Mul, Neg, Sub};

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2` after normalisation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TwoFloat {
    pub hi: f64,
    pub lo: f64,
}

const PI_2: TwoFloat = TwoFloat {
    hi: core::f64::consts::FRAC_PI_2,
    lo: 6.123_233_995_736_766e-17,
};

pub const PI: TwoFloat = TwoFloat {
    hi: core::f64::consts::PI,
    lo: 1.224_646_799_147_353_2e-16,
};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, libm::fma(a, b, -p))
}

impl TwoFloat {
    pub const fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    /// Builds a normalised pair from an arbitrary unevaluated sum.
    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        Self { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Self { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let r = self - TwoFloat::from_f64(b).mul_f64(q1);
        let q2 = r.hi / b;
        let r = r - TwoFloat::from_f64(b).mul_f64(q2);
        let q3 = r.hi / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + TwoFloat::from_f64(q3)
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::from_f64(0.0);
        }
        let x = libm::sqrt(self.hi);
        let corr = (self - TwoFloat::from_f64(x) * TwoFloat::from_f64(x)).hi / (2.0 * x);
        Self::new(x, corr)
    }

    /// Simultaneous sine and cosine, accurate to roughly 1e-30 relative
    /// for arguments of moderate size.
    pub fn sin_cos(self) -> (TwoFloat, TwoFloat) {
        let q = libm::round(self.hi / PI_2.hi);
        let r = self - PI_2.mul_f64(q);
        let (s, c) = sin_cos_reduced(r);
        match (q as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

/// Taylor series on `|r| <= π/4`.
fn sin_cos_reduced(r: TwoFloat) -> (TwoFloat, TwoFloat) {
    let r2 = r * r;
    let mut sin = r;
    let mut cos = TwoFloat::from_f64(1.0);
    let mut term_s = r;
    let mut term_c = TwoFloat::from_f64(1.0);
    for j in 1..40u32 {
        let j = f64::from(j);
        term_s = -(term_s * r2).div_f64((2.0 * j) * (2.0 * j + 1.0));
        term_c = -(term_c * r2).div_f64((2.0 * j - 1.0) * (2.0 * j));
        sin = sin + term_s;
        cos = cos + term_c;
        if term_s.hi.abs() < 1e-34 && term_c.hi.abs() < 1e-34 {
            break;
        }
    }
    (sin, cos)
}

impl From<f64> for TwoFloat {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl Neg for TwoFloat {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for TwoFloat {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Sub for TwoFloat {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for TwoFloat {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

/// A wavenumber carried to extended precision.
///
/// Every coefficient that varies slowly with `k` is evaluated at `value`;
/// only the cavity phase sees `value + correction`.  Ordinary callers pass
/// plain `f64` values and the correction stays zero.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Wavenumber {
    pub value: f64,
    pub correction: f64,
}

impl Wavenumber {
    /// Rounds `value + correction` to the nearest double and keeps the remainder.
    pub fn new(value: f64, correction: f64) -> Self {
        let t = TwoFloat::new(value, correction);
        Self {
            value: t.hi,
            correction: t.lo,
        }
    }

    pub fn offset(self, ds: f64) -> Self {
        let t = TwoFloat::new(self.value, self.correction) + TwoFloat::from_f64(ds);
        Self {
            value: t.hi,
            correction: t.lo,
        }
    }

    pub fn extended(self) -> TwoFloat {
        TwoFloat {
            hi: self.value,
            lo: self.correction,
        }
    }
}

impl From<f64> for Wavenumber {
    fn from(k: f64) -> Self {
        Self {
            value: k,
            correction: 0.0,
        }
    }
}
