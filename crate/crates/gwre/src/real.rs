//! Scalar abstraction for the precision switch.
//!
//! Every recurrence/series kernel in this crate is generic over [`Real`] so
//! the same code runs in standard binary64 or in extended (double-double)
//! precision. Only the operations the kernels actually use are required.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Real:
    Copy
    + Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Label written into CSV metadata ("standard" / "extended").
    const PRECISION: &'static str;

    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    /// Exact for the usize range used here (indices, counts).
    fn from_usize(v: usize) -> Self {
        Self::from_f64(v as f64)
    }

    fn abs(self) -> Self;
    fn ln(self) -> Self;
    fn exp(self) -> Self;
    fn is_finite(self) -> bool;

    /// Integer power by binary exponentiation (n >= 0).
    fn powu(self, n: u32) -> Self {
        let mut base = self;
        let mut n = n;
        let mut acc = Self::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }

    /// Full-precision scientific representation for CSV output
    /// (17 significant digits for `f64`, 34 for `DoubleDouble`).
    fn to_sci_string(self) -> String;
}

impl Real for f64 {
    const PRECISION: &'static str = "standard";

    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }

    fn to_sci_string(self) -> String {
        format!("{:.16e}", self)
    }
}
