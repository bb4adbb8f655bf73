//! Double-double arithmetic (an unevaluated sum of two f64s, ~106 bits).
//!
//! The spectral-sum reduction subtracts quantities of size `n` to expose a
//! signal near `δ³`, far below f64 resolution for the `δ` values involved.

use core::cmp::Ordering;
use core::ops::{Add, Div, Mul, Neg, Sub};

use crate::float::fma;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, fma(a, b, -p))
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    /// Euler's number to double-double precision.
    pub const E: Self = Self {
        hi: 2.718_281_828_459_045,
        lo: 1.445_646_891_729_250_2e-16,
    };

    #[inline]
    pub const fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    #[inline]
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

    pub fn recip(self) -> Self {
        Self::ONE / self
    }

    pub fn powi(self, k: u32) -> Self {
        let mut out = Self::ONE;
        for _ in 0..k {
            out = out * self;
        }
        out
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl Add for DoubleDouble {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;

    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;

    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;

    fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Mul<f64> for DoubleDouble {
    type Output = Self;

    fn mul(self, o: f64) -> Self {
        self * Self::from_f64(o)
    }
}

impl Div for DoubleDouble {
    type Output = Self;

    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self - o * q1;
        let q2 = r.hi / o.hi;
        let r = r - o * q2;
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + Self::from_f64(q3)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn captures_bits_below_f64() {
        let one = DoubleDouble::ONE;
        let tiny = DoubleDouble::from_f64(1e-20);
        let s = one + tiny;
        assert_eq!(s.hi, 1.0);
        assert_eq!((s - one).to_f64(), 1e-20);
    }

    #[test]
    fn division_round_trips() {
        let a = DoubleDouble::from_f64(1.0) / DoubleDouble::from_f64(3.0);
        let back = a * 3.0;
        assert!((back - DoubleDouble::ONE).abs().to_f64() < 1e-31);
    }

    #[test]
    fn e_is_the_exp_series() {
        let mut sum = DoubleDouble::ZERO;
        let mut term = DoubleDouble::ONE;
        for k in 1..40 {
            sum = sum + term;
            term = term / DoubleDouble::from_f64(k as f64);
        }
        assert!((sum - DoubleDouble::E).abs().to_f64() < 1e-31);
    }
}
