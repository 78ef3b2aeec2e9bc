//! Double-double scalar: an unevaluated sum `hi + lo` of two `f64` values
//! with |lo| ≤ ulp(hi)/2, giving about 106 bits of significand.
//!
//! Arithmetic, `sqrt`, `exp`, `ln`, `sin` and `cos` are accurate to the full
//! double-double precision. The inverse trigonometric and hyperbolic
//! functions are built from those and are slightly less accurate.

use std::cmp::Ordering;
use std::fmt;
use std::num::FpCategory;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use num_traits::{Float, FromPrimitive, Num, NumCast, One, ToPrimitive, Zero};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

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
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    pub const PI: Self = Self {
        hi: 3.141_592_653_589_793_116e0,
        lo: 1.224_646_799_147_353_207e-16,
    };
    pub const TAU: Self = Self {
        hi: 6.283_185_307_179_586_232e0,
        lo: 2.449_293_598_294_706_414e-16,
    };
    pub const FRAC_PI_2: Self = Self {
        hi: 1.570_796_326_794_896_558e0,
        lo: 6.123_233_995_736_766_036e-17,
    };
    pub const LN_2: Self = Self {
        hi: 6.931_471_805_599_452_862e-1,
        lo: 2.319_046_813_846_299_558e-17,
    };
    pub const LN_10: Self = Self {
        hi: 2.302_585_092_994_045_901e0,
        lo: -2.170_756_223_382_249_351e-16,
    };
    /// 2^-104.
    pub const EPSILON: Self = Self {
        hi: 4.930_380_657_631_324e-32,
        lo: 0.0,
    };

    /// Exact conversion from `f64`.
    pub const fn of(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    /// Builds a value from two parts, renormalizing them.
    pub fn new(hi: f64, lo: f64) -> Self {
        let (h, l) = two_sum(hi, lo);
        Self { hi: h, lo: l }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    fn from_quick(hi: f64, lo: f64) -> Self {
        let (h, l) = quick_two_sum(hi, lo);
        Self { hi: h, lo: l }
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p1, p2) = two_prod(self.hi, b);
        Self::from_quick(p1, p2 + self.lo * b)
    }

    /// Exact multiplication by a power of two.
    fn ldexp(self, e: i32) -> Self {
        if e.abs() < 1000 {
            let f = 2f64.powi(e);
            Self {
                hi: self.hi * f,
                lo: self.lo * f,
            }
        } else {
            self.ldexp(e / 2).ldexp(e - e / 2)
        }
    }

    fn sqr(self) -> Self {
        let (p1, p2) = two_prod(self.hi, self.hi);
        Self::from_quick(p1, p2 + 2.0 * self.hi * self.lo + self.lo * self.lo)
    }

    fn nint(self) -> Self {
        let hi = self.hi.round();
        if hi == self.hi {
            // hi is an integer; round the low word.
            let lo = self.lo.round();
            Self::from_quick(hi, lo)
        } else if (hi - self.hi).abs() == 0.5 && self.lo != 0.0 {
            // Tie on hi: lo decides.
            let h = if self.lo < 0.0 && hi > self.hi {
                hi - 1.0
            } else if self.lo > 0.0 && hi < self.hi {
                hi + 1.0
            } else {
                hi
            };
            Self { hi: h, lo: 0.0 }
        } else {
            Self { hi, lo: 0.0 }
        }
    }

    /// Taylor series for sin and cos on |t| ≤ π/4.
    fn sin_cos_reduced(t: Self) -> (Self, Self) {
        let t2 = t.sqr();
        let mut sin = t;
        let mut cos = Self::ONE;
        let mut term_s = t;
        let mut term_c = Self::ONE;
        let mut n = 1.0;
        loop {
            term_s = -(term_s * t2) / Self::of((n + 1.0) * (n + 2.0));
            term_c = -(term_c * t2) / Self::of(n * (n + 1.0));
            sin += term_s;
            cos += term_c;
            n += 2.0;
            if term_s.hi.abs() < 1e-34 && term_c.hi.abs() < 1e-34 || n > 60.0 {
                break;
            }
        }
        (sin, cos)
    }

    fn dd_sin_cos(self) -> (Self, Self) {
        if !self.hi.is_finite() {
            return (Self::nan(), Self::nan());
        }
        if self.hi == 0.0 {
            return (Self::ZERO, Self::ONE);
        }
        let z = (self / Self::TAU).nint();
        let r = self - Self::TAU * z;
        let j = (r / Self::FRAC_PI_2).nint();
        let t = r - Self::FRAC_PI_2 * j;
        let (s, c) = Self::sin_cos_reduced(t);
        match j.hi as i64 {
            0 => (s, c),
            1 => (c, -s),
            -1 => (-c, s),
            _ => (-s, -c),
        }
    }

    fn dd_exp(self) -> Self {
        if self.hi > 709.8 {
            return Self::infinity();
        }
        if self.hi < -745.2 {
            return Self::ZERO;
        }
        if self.hi == 0.0 && self.lo == 0.0 {
            return Self::ONE;
        }
        let m = (self.hi / Self::LN_2.hi).round();
        let r = (self - Self::LN_2.mul_f64(m)).ldexp(-9);
        // expm1(r) by Taylor series; |r| < 7e-4.
        let mut s = r;
        let mut term = r;
        for n in 2..=16 {
            term = term * r / Self::of(n as f64);
            s += term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        // expm1(2x) = expm1(x)·(expm1(x) + 2), applied nine times.
        for _ in 0..9 {
            s = s.ldexp(1) + s.sqr();
        }
        (s + Self::ONE).ldexp(m as i32)
    }

    fn dd_ln(self) -> Self {
        if self.hi.is_nan() || self.hi < 0.0 {
            return Self::nan();
        }
        if self.hi == 0.0 {
            return Self::neg_infinity();
        }
        if self.hi.is_infinite() {
            return self;
        }
        let x = Self::of(self.hi.ln());
        // One Newton step on exp(x) = a doubles the f64 accuracy.
        x + self * (-x).dd_exp() - Self::ONE
    }

    fn dd_atan2(y: Self, x: Self) -> Self {
        if x.hi == 0.0 && y.hi == 0.0 {
            return Self::of(0f64.atan2(x.hi));
        }
        let z = Self::of(y.hi.atan2(x.hi));
        let (s, c) = z.dd_sin_cos();
        // Newton step for tan(z) = y/x, written symmetrically in x and y.
        let num = y * c - x * s;
        let den = x * c + y * s;
        z + num / den
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self::of(x)
    }
}

impl From<DoubleDouble> for f64 {
    fn from(x: DoubleDouble) -> f64 {
        x.hi + x.lo
    }
}

impl fmt::Display for DoubleDouble {
    /// Prints the `f64` rounding; the low word is shown only by `Debug`.
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
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        Self::from_quick(s1, s2 + t2)
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
        Self::from_quick(p1, p2 + (self.hi * b.lo + self.lo * b.hi))
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        if !q1.is_finite() || !b.hi.is_finite() {
            return Self::of(q1);
        }
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        Self::from_quick(q1, q2) + Self::of(q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, b: Self) -> Self {
        self - (self / b).trunc() * b
    }
}

macro_rules! assign_ops {
    ($($tr:ident $m:ident $op:tt),*) => {$(
        impl $tr for DoubleDouble {
            fn $m(&mut self, b: Self) {
                *self = *self $op b;
            }
        }
    )*};
}

assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /, RemAssign rem_assign %);

impl Zero for DoubleDouble {
    fn zero() -> Self {
        Self::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        Self::ONE
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = std::num::ParseFloatError;

    /// Parses through `f64`; only radix 10 is supported.
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        if radix != 10 {
            return "".parse::<f64>().map(Self::of);
        }
        s.parse::<f64>().map(Self::of)
    }
}

impl ToPrimitive for DoubleDouble {
    fn to_i64(&self) -> Option<i64> {
        let t = self.trunc();
        let hi = t.hi.to_i64()?;
        hi.checked_add(t.lo.to_i64()?)
    }
    fn to_u64(&self) -> Option<u64> {
        let v = self.to_i64()?;
        u64::try_from(v).ok()
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.hi + self.lo)
    }
}

impl FromPrimitive for DoubleDouble {
    fn from_i64(n: i64) -> Option<Self> {
        let hi = n as f64;
        let lo = n.wrapping_sub(hi as i64) as f64;
        Some(Self::new(hi, lo))
    }
    fn from_u64(n: u64) -> Option<Self> {
        let hi = n as f64;
        let lo = (n as i128 - hi as i128) as f64;
        Some(Self::new(hi, lo))
    }
    fn from_f64(x: f64) -> Option<Self> {
        Some(Self::of(x))
    }
}

impl NumCast for DoubleDouble {
    fn from<N: ToPrimitive>(n: N) -> Option<Self> {
        match n.to_i64() {
            Some(i) if n.to_f64().is_some_and(|f| f.fract() == 0.0) => Self::from_i64(i),
            _ => n.to_f64().map(Self::of),
        }
    }
}

impl Float for DoubleDouble {
    fn nan() -> Self {
        Self::of(f64::NAN)
    }
    fn infinity() -> Self {
        Self::of(f64::INFINITY)
    }
    fn neg_infinity() -> Self {
        Self::of(f64::NEG_INFINITY)
    }
    fn neg_zero() -> Self {
        Self::of(-0.0)
    }
    fn min_value() -> Self {
        Self::of(f64::MIN)
    }
    fn min_positive_value() -> Self {
        Self::of(f64::MIN_POSITIVE)
    }
    fn epsilon() -> Self {
        Self::EPSILON
    }
    fn max_value() -> Self {
        Self::of(f64::MAX)
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
            Self::from_quick(hi, self.lo.floor())
        } else {
            Self::of(hi)
        }
    }
    fn ceil(self) -> Self {
        let hi = self.hi.ceil();
        if hi == self.hi {
            Self::from_quick(hi, self.lo.ceil())
        } else {
            Self::of(hi)
        }
    }
    fn round(self) -> Self {
        if self.hi.is_sign_negative() {
            -((-self) + Self::of(0.5)).floor()
        } else {
            (self + Self::of(0.5)).floor()
        }
    }
    fn trunc(self) -> Self {
        if self.hi.is_sign_negative() {
            self.ceil()
        } else {
            self.floor()
        }
    }
    fn fract(self) -> Self {
        self - self.trunc()
    }
    fn abs(self) -> Self {
        if self.hi.is_sign_negative() {
            -self
        } else {
            self
        }
    }
    fn signum(self) -> Self {
        Self::of(self.hi.signum())
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
        Self::ONE / self
    }
    fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { self.recip() } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base.sqr();
            e >>= 1;
        }
        acc
    }
    fn powf(self, n: Self) -> Self {
        if n.fract().is_zero() && n.abs().hi < i32::MAX as f64 {
            return self.powi(n.hi as i32 + n.lo as i32);
        }
        (n * self.ln()).exp()
    }
    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 { Self::ZERO } else { Self::nan() };
        }
        if self.hi.is_infinite() {
            return self;
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let (p1, p2) = two_prod(ax, ax);
        let corr = (self - Self::from_quick(p1, p2)).hi * (x * 0.5);
        let (s, e) = two_sum(ax, corr);
        Self::from_quick(s, e)
    }
    fn exp(self) -> Self {
        self.dd_exp()
    }
    fn exp2(self) -> Self {
        (self * Self::LN_2).dd_exp()
    }
    fn ln(self) -> Self {
        self.dd_ln()
    }
    fn log(self, base: Self) -> Self {
        self.dd_ln() / base.dd_ln()
    }
    fn log2(self) -> Self {
        self.dd_ln() / Self::LN_2
    }
    fn log10(self) -> Self {
        self.dd_ln() / Self::LN_10
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
            Self::ZERO
        }
    }
    fn cbrt(self) -> Self {
        if self.hi == 0.0 || !self.hi.is_finite() {
            return self;
        }
        let y = Self::of(self.hi.cbrt());
        // Newton step on y³ = a.
        y - (y * y * y - self) / (Self::of(3.0) * y * y)
    }
    fn hypot(self, other: Self) -> Self {
        let a = self.abs();
        let b = other.abs();
        let (big, small) = if a > b { (a, b) } else { (b, a) };
        if big.is_zero() {
            return Self::ZERO;
        }
        if big.is_infinite() {
            return big;
        }
        let r = small / big;
        big * (Self::ONE + r * r).sqrt()
    }
    fn sin(self) -> Self {
        self.dd_sin_cos().0
    }
    fn cos(self) -> Self {
        self.dd_sin_cos().1
    }
    fn tan(self) -> Self {
        let (s, c) = self.dd_sin_cos();
        s / c
    }
    fn asin(self) -> Self {
        Self::dd_atan2(self, (Self::ONE - self.sqr()).sqrt())
    }
    fn acos(self) -> Self {
        Self::dd_atan2((Self::ONE - self.sqr()).sqrt(), self)
    }
    fn atan(self) -> Self {
        Self::dd_atan2(self, Self::ONE)
    }
    fn atan2(self, other: Self) -> Self {
        Self::dd_atan2(self, other)
    }
    fn sin_cos(self) -> (Self, Self) {
        self.dd_sin_cos()
    }
    fn exp_m1(self) -> Self {
        self.dd_exp() - Self::ONE
    }
    fn ln_1p(self) -> Self {
        (Self::ONE + self).dd_ln()
    }
    fn sinh(self) -> Self {
        let e = self.dd_exp();
        (e - e.recip()).ldexp(-1)
    }
    fn cosh(self) -> Self {
        let e = self.dd_exp();
        (e + e.recip()).ldexp(-1)
    }
    fn tanh(self) -> Self {
        let e2 = self.ldexp(1).dd_exp();
        (e2 - Self::ONE) / (e2 + Self::ONE)
    }
    fn asinh(self) -> Self {
        (self + (self.sqr() + Self::ONE).sqrt()).dd_ln()
    }
    fn acosh(self) -> Self {
        (self + (self.sqr() - Self::ONE).sqrt()).dd_ln()
    }
    fn atanh(self) -> Self {
        ((Self::ONE + self) / (Self::ONE - self)).dd_ln().ldexp(-1)
    }
    /// Decodes the high word only.
    fn integer_decode(self) -> (u64, i16, i8) {
        self.hi.integer_decode()
    }
    fn to_degrees(self) -> Self {
        self * Self::of(180.0) / Self::PI
    }
    fn to_radians(self) -> Self {
        self * Self::PI / Self::of(180.0)
    }
}
