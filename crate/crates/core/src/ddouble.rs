//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64` with
//! `|lo| <= ulp(hi) / 2`, giving about 106 significant bits.
//!
//! Arithmetic, `sqrt`, rounding, `exp` and `ln` are carried out to full
//! double-double accuracy. Trigonometric and inverse hyperbolic functions are
//! evaluated in `f64` and are only double-precision accurate; nothing in
//! this crate depends on them.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::num::FpCategory;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_traits::{Float, FromPrimitive, Num, NumCast, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

const LN2: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

const LN10: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::LN_10,
    lo: -2.170_756_223_382_249_4e-16,
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
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const fn from_parts(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    fn normalized(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Self { hi, lo }
    }

    fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn from_i128(n: i128) -> Self {
        let hi = n as f64;
        if !hi.is_finite() {
            return Self::from_f64(hi);
        }
        let lo = (n - hi as i128) as f64;
        Self::normalized(hi, lo)
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p1, p2) = two_prod(self.hi, b);
        Self::normalized(p1, p2 + self.lo * b)
    }

    fn ldexp(self, k: i32) -> Self {
        let s = 2f64.powi(k);
        Self {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    fn sqr(self) -> Self {
        self * self
    }

    fn exp_dd(self) -> Self {
        if self.hi > 709.8 {
            return Self::from_f64(f64::INFINITY);
        }
        if self.hi < -745.2 {
            return Self::zero();
        }
        if self.hi == 0.0 && self.lo == 0.0 {
            return Self::one();
        }
        // x = k ln2 + r with |r| <= ln2 / 2; r is scaled by 2^-10 and
        // s = exp(r) - 1 is squared back up as s <- s (s + 2), which keeps
        // its relative accuracy.
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2.mul_f64(k)).ldexp(-10);
        let mut term = r;
        let mut s = r;
        for n in 2..=12 {
            term = term * r / Self::from_f64(n as f64);
            s = s + term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        let two = Self::from_f64(2.0);
        for _ in 0..10 {
            s = s * (s + two);
        }
        let sum = s + Self::one();
        sum.ldexp(k as i32)
    }

    fn ln_dd(self) -> Self {
        if self.hi <= 0.0 || self.is_nan() {
            return if self.hi == 0.0 {
                Self::from_f64(f64::NEG_INFINITY)
            } else {
                Self::from_f64(f64::NAN)
            };
        }
        if self.hi.is_infinite() {
            return self;
        }
        // Newton on exp(y) = x, twice from the double estimate.
        let mut y = Self::from_f64(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp_dd() - Self::one();
        }
        y
    }

    fn via_f64(self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_f64(f(self.hi + self.lo))
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DoubleDouble({:e} + {:e})", self.hi, self.lo)
    }
}

/// Formats the leading double (about 17 significant digits).
impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&(self.hi + self.lo), f)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            o => Some(o),
        }
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

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, b.hi);
        if !s1.is_finite() {
            return Self::from_f64(s1);
        }
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        Self::normalized(s1, s2 + t2)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p1, p2) = two_prod(self.hi, b.hi);
        if !p1.is_finite() {
            return Self::from_f64(p1);
        }
        Self::normalized(p1, p2 + (self.hi * b.lo + self.lo * b.hi))
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        if !q1.is_finite() || b.hi.is_infinite() {
            return Self::from_f64(q1);
        }
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Self { hi: q1, lo: q2 } + Self::from_f64(q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, b: Self) -> Self {
        self - (self / b).trunc() * b
    }
}

impl Sum for DoubleDouble {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        Self { hi: 0.0, lo: 0.0 }
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        Self { hi: 1.0, lo: 0.0 }
    }
}

/// Decimal strings are parsed through `f64`.
impl Num for DoubleDouble {
    type FromStrRadixErr = num_traits::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        f64::from_str_radix(s, radix).map(Self::from_f64)
    }
}

impl ToPrimitive for DoubleDouble {
    fn to_i64(&self) -> Option<i64> {
        let t = self.trunc();
        i64::try_from(t.hi.to_i128()? + t.lo.to_i128()?).ok()
    }
    fn to_u64(&self) -> Option<u64> {
        let t = self.trunc();
        let total = t.hi.to_i128()? + t.lo.to_i128()?;
        u64::try_from(total).ok()
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.hi + self.lo)
    }
}

impl FromPrimitive for DoubleDouble {
    fn from_i64(n: i64) -> Option<Self> {
        Some(Self::from_i128(n as i128))
    }
    fn from_u64(n: u64) -> Option<Self> {
        Some(Self::from_i128(n as i128))
    }
    fn from_i128(n: i128) -> Option<Self> {
        Some(DoubleDouble::from_i128(n))
    }
    fn from_f64(n: f64) -> Option<Self> {
        Some(DoubleDouble::from_f64(n))
    }
}

impl NumCast for DoubleDouble {
    fn from<T: ToPrimitive>(n: T) -> Option<Self> {
        if let Some(i) = n.to_i128() {
            return Some(Self::from_i128(i));
        }
        n.to_f64().map(Self::from_f64)
    }
}

impl Float for DoubleDouble {
    fn nan() -> Self {
        Self::from_f64(f64::NAN)
    }
    fn infinity() -> Self {
        Self::from_f64(f64::INFINITY)
    }
    fn neg_infinity() -> Self {
        Self::from_f64(f64::NEG_INFINITY)
    }
    fn neg_zero() -> Self {
        Self::from_f64(-0.0)
    }
    fn min_value() -> Self {
        Self::from_f64(f64::MIN)
    }
    fn min_positive_value() -> Self {
        Self::from_f64(f64::MIN_POSITIVE)
    }
    /// `2^-104`.
    fn epsilon() -> Self {
        Self::from_f64(4.930_380_657_631_324e-32)
    }
    fn max_value() -> Self {
        Self::from_f64(f64::MAX)
    }
    fn is_nan(self) -> bool {
        self.hi.is_nan() || self.lo.is_nan()
    }
    fn is_infinite(self) -> bool {
        self.hi.is_infinite()
    }
    fn is_finite(self) -> bool {
        self.hi.is_finite()
    }
    fn is_normal(self) -> bool {
        self.hi.is_normal()
    }
    fn classify(self) -> FpCategory {
        self.hi.classify()
    }
    fn floor(self) -> Self {
        let hi = self.hi.floor();
        if hi == self.hi {
            Self::normalized(hi, self.lo.floor())
        } else {
            Self::from_f64(hi)
        }
    }
    fn ceil(self) -> Self {
        let hi = self.hi.ceil();
        if hi == self.hi {
            Self::normalized(hi, self.lo.ceil())
        } else {
            Self::from_f64(hi)
        }
    }
    /// Half-way cases round away from zero.
    fn round(self) -> Self {
        let half = Self::from_f64(0.5);
        if self.hi >= 0.0 {
            (self + half).floor()
        } else {
            -((-self) + half).floor()
        }
    }
    fn trunc(self) -> Self {
        if self.hi >= 0.0 {
            self.floor()
        } else {
            self.ceil()
        }
    }
    fn fract(self) -> Self {
        self - self.trunc()
    }
    fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }
    fn signum(self) -> Self {
        if self.is_nan() {
            Self::nan()
        } else if self.hi.is_sign_negative() {
            -Self::one()
        } else {
            Self::one()
        }
    }
    fn is_sign_positive(self) -> bool {
        self.hi.is_sign_positive()
    }
    fn is_sign_negative(self) -> bool {
        self.hi.is_sign_negative()
    }
    fn mul_add(self, a: Self, b: Self) -> Self {
        self * a + b
    }
    fn recip(self) -> Self {
        Self::one() / self
    }
    fn powi(self, n: i32) -> Self {
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base.sqr();
            e >>= 1;
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }
    fn powf(self, n: Self) -> Self {
        (n * self.ln()).exp()
    }
    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 { Self::zero() } else { Self::nan() };
        }
        if self.hi.is_infinite() {
            return self;
        }
        // One Newton step on the reciprocal square root from the double estimate.
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let corr = (self - Self::from_f64(ax).sqr()).hi * (x * 0.5);
        let (hi, lo) = two_sum(ax, corr);
        Self { hi, lo }
    }
    fn exp(self) -> Self {
        self.exp_dd()
    }
    fn exp2(self) -> Self {
        (self * LN2).exp_dd()
    }
    fn ln(self) -> Self {
        self.ln_dd()
    }
    fn log(self, base: Self) -> Self {
        self.ln_dd() / base.ln_dd()
    }
    fn log2(self) -> Self {
        self.ln_dd() / LN2
    }
    fn log10(self) -> Self {
        self.ln_dd() / LN10
    }
    fn max(self, other: Self) -> Self {
        if self.is_nan() || other > self {
            other
        } else {
            self
        }
    }
    fn min(self, other: Self) -> Self {
        if self.is_nan() || other < self {
            other
        } else {
            self
        }
    }
    fn abs_sub(self, other: Self) -> Self {
        if self > other {
            self - other
        } else {
            Self::zero()
        }
    }
    fn cbrt(self) -> Self {
        if self.hi == 0.0 || !self.hi.is_finite() {
            return self;
        }
        let mut y = Self::from_f64(self.hi.cbrt());
        let three = Self::from_f64(3.0);
        for _ in 0..2 {
            y = y + (self / y.sqr() - y) / three;
        }
        y
    }
    fn hypot(self, other: Self) -> Self {
        (self.sqr() + other.sqr()).sqrt()
    }
    fn sin(self) -> Self {
        self.via_f64(f64::sin)
    }
    fn cos(self) -> Self {
        self.via_f64(f64::cos)
    }
    fn tan(self) -> Self {
        self.via_f64(f64::tan)
    }
    fn asin(self) -> Self {
        self.via_f64(f64::asin)
    }
    fn acos(self) -> Self {
        self.via_f64(f64::acos)
    }
    fn atan(self) -> Self {
        self.via_f64(f64::atan)
    }
    fn atan2(self, other: Self) -> Self {
        Self::from_f64((self.hi + self.lo).atan2(other.hi + other.lo))
    }
    fn sin_cos(self) -> (Self, Self) {
        (self.sin(), self.cos())
    }
    fn exp_m1(self) -> Self {
        if self.hi.abs() < 1e-5 {
            // Taylor series avoids the cancellation in exp(x) - 1.
            let mut term = self;
            let mut sum = self;
            for n in 2..=8 {
                term = term * self / Self::from_f64(n as f64);
                sum = sum + term;
            }
            sum
        } else {
            self.exp_dd() - Self::one()
        }
    }
    fn ln_1p(self) -> Self {
        (Self::one() + self).ln_dd()
    }
    fn sinh(self) -> Self {
        let e = self.exp_dd();
        (e - e.recip()).mul_f64(0.5)
    }
    fn cosh(self) -> Self {
        let e = self.exp_dd();
        (e + e.recip()).mul_f64(0.5)
    }
    fn tanh(self) -> Self {
        let e2 = self.mul_f64(2.0).exp_dd();
        (e2 - Self::one()) / (e2 + Self::one())
    }
    fn asinh(self) -> Self {
        self.via_f64(f64::asinh)
    }
    fn acosh(self) -> Self {
        self.via_f64(f64::acosh)
    }
    fn atanh(self) -> Self {
        self.via_f64(f64::atanh)
    }
    /// Decomposition of the leading double.
    fn integer_decode(self) -> (u64, i16, i8) {
        Float::integer_decode(self.hi)
    }
}

impl Scalar for DoubleDouble {}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn exact(x: DoubleDouble) -> BigRational {
        BigRational::from_float(x.hi).unwrap() + BigRational::from_float(x.lo).unwrap()
    }

    fn close(x: DoubleDouble, target: &BigRational, tol: f64) -> bool {
        let diff = exact(x) - target;
        let d = diff.numer().clone();
        let n = diff.denom().clone();
        let err = BigRational::new(d, n);
        let err = num_traits::Signed::abs(&err);
        err < BigRational::from_float(tol).unwrap()
    }

    fn dd(x: f64) -> DoubleDouble {
        DoubleDouble::from_f64(x)
    }

    #[test]
    fn division_is_exact_to_working_precision() {
        let third = dd(1.0) / dd(3.0);
        let exact_third = BigRational::new(BigInt::from(1), BigInt::from(3));
        assert!(close(third, &exact_third, 1e-32));
        let r = dd(22.0) / dd(7.0);
        assert!(close(r, &BigRational::new(22.into(), 7.into()), 1e-31));
    }

    #[test]
    fn sums_keep_small_parts() {
        let x = dd(1.0) + dd(1e-20);
        assert_eq!(x.hi(), 1.0);
        assert_eq!(x.lo(), 1e-20);
        assert_eq!((x - dd(1.0)).hi(), 1e-20);
    }

    #[test]
    fn sqrt_squares_back() {
        for v in [2.0, 3.0, 0.5, 1e-8, 12345.678] {
            let s = dd(v).sqrt();
            let back = s * s;
            assert!(close(back, &BigRational::from_float(v).unwrap(), v * 1e-30), "{v}");
        }
    }

    #[test]
    fn exp_and_ln_are_inverse() {
        for v in [0.1, 1.0, 2.5, -3.0, 10.0] {
            let x = dd(v);
            let back = x.exp().ln();
            assert!((back - x).abs().hi() < 1e-30, "{v}: {back:?}");
        }
        let e = dd(1.0).exp();
        // e to 32 digits.
        assert!((e - DoubleDouble::from_parts(std::f64::consts::E, 1.4456468917292502e-16)).abs().hi() < 1e-31);
    }

    #[test]
    fn rounding() {
        let x = DoubleDouble::from_parts(3.0, -1e-20);
        assert_eq!(x.floor(), dd(2.0));
        assert_eq!(x.ceil(), dd(3.0));
        assert_eq!(x.round(), dd(3.0));
        assert_eq!(dd(-2.5).round(), dd(-3.0));
        assert_eq!(dd(-2.7).trunc(), dd(-2.0));
        assert_eq!(DoubleDouble::from_i64(i64::MAX).unwrap().to_i64(), Some(i64::MAX));
        assert_eq!(DoubleDouble::from_i64(-7).unwrap().to_i64(), Some(-7));
    }

    #[test]
    fn ordering_uses_both_parts() {
        let a = DoubleDouble::from_parts(1.0, 1e-20);
        let b = DoubleDouble::from_parts(1.0, -1e-20);
        assert!(b < a);
        assert_eq!(a.max(b), a);
    }
}
