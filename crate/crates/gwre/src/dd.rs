//! Double-double arithmetic: an unevaluated sum of two `f64`s giving ~106
//! bits (~32 significant decimal digits) of precision.
//!
//! Error-free transformations follow Dekker/Knuth; exp/ln follow the classic
//! qd-library reductions (argument reduction by ln 2, scaled Taylor series,
//! repeated squaring; Newton iteration on exp for the logarithm). No FMA is
//! assumed, so products are split explicitly and results are portable.

use crate::real::Real;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Invariant: `hi = fl(hi + lo)` and `|lo| <= ulp(hi)/2` (normalized).
#[derive(Copy, Clone, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// Requires |a| >= |b| (or a == 0).
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

/// Dekker split; valid for |a| < 2^996.
#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ahi, alo) = split(a);
    let (bhi, blo) = split(b);
    let err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo;
    (p, err)
}

/// x * 2^n with the exponent split so intermediate factors stay finite.
#[inline]
fn ldexp(x: f64, n: i32) -> f64 {
    if (-1022..=1023).contains(&n) {
        return x * 2f64.powi(n);
    }
    if n > 1023 {
        return x * 2f64.powi(1023) * 2f64.powi(n - 1023);
    }
    // subnormal range: apply in two steps
    x * 2f64.powi(-1022) * 2f64.powi((n + 1022).max(-1100))
}

// the hi limb is the f64 nearest ln 2 on purpose; lo carries the rest
#[allow(clippy::approx_constant)]
pub(crate) const DD_LN2: DoubleDouble = DoubleDouble {
    hi: 0.693_147_180_559_945_3,
    lo: 2.319_046_813_846_299_6e-17,
};

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    /// Unit roundoff of the format, 2^-105.
    pub const EPSILON: f64 = 2.465_190_328_815_662e-32;

    #[inline]
    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Self { hi, lo }
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }
    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn add_f64(self, b: f64) -> Self {
        let (s, e) = two_sum(self.hi, b);
        Self::new(s, e + self.lo)
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        Self::new(p, e + self.lo * b)
    }

    #[inline]
    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let (p, e) = two_prod(q1, b);
        let r = self - Self::new(p, e);
        let q2 = r.hi / b;
        let (p, e) = two_prod(q2, b);
        let r = r - Self::new(p, e);
        let q3 = r.hi / b;
        let (s, e) = quick_two_sum(q1, q2);
        Self::new(s, e + q3)
    }

    /// Exact scaling by a power of two.
    #[inline]
    fn ldexp(self, n: i32) -> Self {
        Self {
            hi: ldexp(self.hi, n),
            lo: ldexp(self.lo, n),
        }
    }

    pub fn floor(self) -> Self {
        let fhi = self.hi.floor();
        if fhi == self.hi {
            Self::new(fhi, self.lo.floor())
        } else {
            Self { hi: fhi, lo: 0.0 }
        }
    }

    fn exp_impl(self) -> Self {
        // exp(x) = 2^m * exp(r)^(2^9), r = (x - m ln2) / 2^9
        if self.hi <= -746.0 {
            return Self::ZERO;
        }
        if self.hi >= 710.0 {
            return Self::new(f64::INFINITY, 0.0);
        }
        if self.hi == 0.0 && self.lo == 0.0 {
            return Self::ONE;
        }
        let m = (self.hi / DD_LN2.hi + 0.5).floor();
        let r = (self - DD_LN2.mul_f64(m)).ldexp(-9);

        // Taylor series of exp(r) - 1 for |r| < ln2/1024.
        let mut p = r * r;
        let mut s = r + p.mul_f64(0.5);
        let mut k = 3.0;
        let threshold = Self::EPSILON / 512.0;
        loop {
            p = p * r;
            let t = p.div_f64(fact(k));
            s = s + t;
            k += 1.0;
            if t.hi.abs() <= threshold || k > 18.0 {
                break;
            }
        }

        // Undo the 2^-9 scaling: (1+s) <- (1+s)^2 nine times, tracking s.
        for _ in 0..9 {
            s = s.mul_f64(2.0) + s * s;
        }
        (s + Self::ONE).ldexp(m as i32)
    }

    fn ln_impl(self) -> Self {
        if self == Self::ONE {
            return Self::ZERO;
        }
        if self.hi <= 0.0 {
            return Self::new(f64::NAN, 0.0);
        }
        // Newton iteration on exp(x) = a: x <- x + a*exp(-x) - 1.
        let mut x = Self::new(self.hi.ln(), 0.0);
        for _ in 0..2 {
            x = x + self * (-x).exp_impl() - Self::ONE;
        }
        x
    }

    /// Decimal digits of |self|, most significant first, with the base-10
    /// exponent of the leading digit. `self` must be nonzero and finite.
    fn to_decimal_digits(self, ndigits: usize) -> (Vec<u8>, i32) {
        let mut r = if self.hi < 0.0 { -self } else { self };
        let mut e = r.hi.abs().log10().floor() as i32;

        // Scale into [1, 10). Two-step scaling keeps 10^|e| representable.
        if e > 300 {
            r = r.ldexp(-53);
            r = r / Self::from_f64(10.0).powu(e as u32);
            r = r.ldexp(53);
        } else if e >= 0 {
            r = r / Self::from_f64(10.0).powu(e as u32);
        } else if e < -300 {
            r = r.ldexp(53);
            r = r * Self::from_f64(10.0).powu((-e) as u32);
            r = r.ldexp(-53);
        } else {
            r = r * Self::from_f64(10.0).powu((-e) as u32);
        }
        while r.hi >= 10.0 {
            r = r.div_f64(10.0);
            e += 1;
        }
        while r.hi < 1.0 {
            r = r.mul_f64(10.0);
            e -= 1;
        }

        // Extract one guard digit beyond the request, then fix and round.
        let mut raw = Vec::with_capacity(ndigits + 1);
        for _ in 0..=ndigits {
            let d = r.hi as i32;
            raw.push(d);
            r = (r.add_f64(-(d as f64))).mul_f64(10.0);
        }
        for i in (1..=ndigits).rev() {
            if raw[i] < 0 {
                raw[i] += 10;
                raw[i - 1] -= 1;
            } else if raw[i] > 9 {
                raw[i] -= 10;
                raw[i - 1] += 1;
            }
        }
        if raw[ndigits] >= 5 {
            let mut i = ndigits - 1;
            loop {
                raw[i] += 1;
                if raw[i] < 10 {
                    break;
                }
                raw[i] = 0;
                if i == 0 {
                    // 9.99.. rounded up to 10.0..
                    raw[0] = 1;
                    e += 1;
                    break;
                }
                i -= 1;
            }
        }
        raw.truncate(ndigits);
        (raw.iter().map(|&d| d as u8).collect(), e)
    }

    /// Scientific-notation string with `ndigits` significant digits.
    pub fn to_sci(self, ndigits: usize) -> String {
        if self.hi.is_nan() {
            return "NaN".into();
        }
        if self.hi.is_infinite() {
            return if self.hi > 0.0 { "inf".into() } else { "-inf".into() };
        }
        if self.hi == 0.0 {
            return "0.0e0".into();
        }
        let (digits, e) = self.to_decimal_digits(ndigits);
        let sign = if self.hi < 0.0 { "-" } else { "" };
        let mut mantissa = String::with_capacity(ndigits + 1);
        mantissa.push((b'0' + digits[0]) as char);
        mantissa.push('.');
        for &d in &digits[1..] {
            mantissa.push((b'0' + d) as char);
        }
        format!("{sign}{mantissa}e{e}")
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        Self::new(s1, s2 + t2)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        Self::new(p, e + (self.hi * b.lo + self.lo * b.hi))
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    #[inline]
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Self::new(s, e + q3)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        // Normalized representation: lexicographic order is value order.
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sci(34))
    }
}

impl From<f64> for DoubleDouble {
    #[inline]
    fn from(v: f64) -> Self {
        Self { hi: v, lo: 0.0 }
    }
}

/// k! exact in `f64` for k <= 18.
#[inline]
fn fact(k: f64) -> f64 {
    let mut f = 1.0;
    let mut i = 2.0;
    while i <= k {
        f *= i;
        i += 1.0;
    }
    f
}

impl Real for DoubleDouble {
    const PRECISION: &'static str = "extended";

    #[inline]
    fn from_f64(v: f64) -> Self {
        Self { hi: v, lo: 0.0 }
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
    #[inline]
    fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }
    #[inline]
    fn ln(self) -> Self {
        self.ln_impl()
    }
    #[inline]
    fn exp(self) -> Self {
        self.exp_impl()
    }
    #[inline]
    fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    fn to_sci_string(self) -> String {
        self.to_sci(34)
    }
}
