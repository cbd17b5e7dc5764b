use std::cmp::Ordering;
use std::f64::consts::LN_2;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Exponent gap beyond which the smaller addend cannot affect the sum.
const ALIGN_LIMIT: i64 = 60;

/// A real number `sign · exp(logmag)` that never overflows or underflows.
///
/// Internally the magnitude is held as `mant · 2^exp` with `mant ∈ [1, 2)`,
/// so products and sums are correctly rounded to double precision whatever
/// the magnitude. Storing `logmag` itself as a double would cost a relative
/// error of `ε·|logmag|` on every operation instead.
#[derive(Clone, Copy, PartialEq)]
pub struct SignedLog {
    sign: i8,
    mant: f64,
    exp: i64,
}

impl SignedLog {
    pub const ZERO: Self = Self {
        sign: 0,
        mant: 0.0,
        exp: 0,
    };
    pub const ONE: Self = Self {
        sign: 1,
        mant: 1.0,
        exp: 0,
    };

    /// `sign · x · 2^exp` for finite `x > 0`.
    fn normalized(sign: i8, x: f64, exp: i64) -> Self {
        debug_assert!(x.is_finite() && x > 0.0);
        let (m, k) = libm::frexp(x);
        Self {
            sign,
            mant: 2.0 * m,
            exp: exp + i64::from(k) - 1,
        }
    }

    /// From a signed double scaled by `2^exp`; zero stays zero.
    fn from_scaled(x: f64, exp: i64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self::normalized(if x > 0.0 { 1 } else { -1 }, x.abs(), exp)
        }
    }

    /// Builds `sign · exp(logmag)`. A zero sign or a `-inf` magnitude gives zero.
    pub fn from_parts(sign: i8, logmag: f64) -> Self {
        debug_assert!(!logmag.is_nan(), "NaN log-magnitude");
        debug_assert!(logmag != f64::INFINITY, "infinite log-magnitude");
        if sign == 0 || logmag == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        if logmag.abs() < 700.0 {
            return Self::normalized(sign.signum(), logmag.exp(), 0);
        }
        let exp = (logmag / LN_2).floor();
        let rest = logmag - exp * LN_2;
        Self::normalized(sign.signum(), rest.exp(), exp as i64)
    }

    pub fn from_f64(x: f64) -> Self {
        debug_assert!(!x.is_nan(), "NaN input");
        debug_assert!(x.is_finite(), "infinite input");
        Self::from_scaled(x, 0)
    }

    /// Exact for integers up to `2^53`.
    pub fn from_int(m: i64) -> Self {
        Self::from_f64(m as f64)
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    /// `ln |x|`, or `-inf` for zero.
    pub fn logmag(self) -> f64 {
        match self.sign {
            0 => f64::NEG_INFINITY,
            _ => self.mant.ln() + self.exp as f64 * LN_2,
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    /// Converts to a plain double; overflow gives `±inf`, underflow gives `±0`.
    pub fn to_f64(self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => {
                let e = self.exp.clamp(-2200, 2200) as i32;
                f64::from(s) * libm::ldexp(self.mant, e)
            }
        }
    }

    pub fn abs(self) -> Self {
        Self {
            sign: self.sign.abs(),
            ..self
        }
    }

    pub fn recip(self) -> Self {
        assert!(self.sign != 0, "reciprocal of zero");
        Self::normalized(self.sign, 1.0 / self.mant, -self.exp)
    }

    /// `self^k` for integer `k ≥ 0`.
    pub fn powi(self, mut k: u32) -> Self {
        let mut base = self;
        let mut acc = Self::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    /// Non-negative square root; callers must pass a non-negative value.
    pub fn sqrt(self) -> Self {
        debug_assert!(self.sign >= 0, "square root of a negative value");
        if self.sign == 0 {
            return Self::ZERO;
        }
        let odd = self.exp.rem_euclid(2);
        let m = if odd == 1 { 2.0 * self.mant } else { self.mant };
        Self::normalized(1, m.sqrt(), (self.exp - odd) / 2)
    }

    /// Multiplies by `exp(log_factor)`.
    pub fn scale_exp(self, log_factor: f64) -> Self {
        self * Self::from_parts(1, log_factor)
    }

    /// Orders by magnitude only.
    pub fn cmp_magnitude(&self, other: &Self) -> Ordering {
        match (self.sign == 0, other.sign == 0) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => self.exp.cmp(&other.exp).then(self.mant.total_cmp(&other.mant)),
        }
    }

    /// Sum of many values, accumulated in doubles relative to the largest.
    pub fn sum<I: IntoIterator<Item = Self>>(items: I) -> Self {
        let items: Vec<Self> = items.into_iter().filter(|x| !x.is_zero()).collect();
        let Some(anchor) = items.iter().map(|x| x.exp).max() else {
            return Self::ZERO;
        };
        let total: f64 = items.iter().map(|x| x.scaled_to(anchor)).sum();
        Self::from_scaled(total, anchor)
    }

    /// Signed value divided by `2^exp`, for `exp ≥ self.exp`.
    fn scaled_to(self, exp: i64) -> f64 {
        let shift = (self.exp - exp).max(-2200) as i32;
        f64::from(self.sign) * libm::ldexp(self.mant, shift)
    }
}

impl Default for SignedLog {
    fn default() -> Self {
        Self::ZERO
    }
}

impl fmt::Debug for SignedLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "SignedLog(0)"),
            s => write!(f, "SignedLog({}exp({}))", if s > 0 { '+' } else { '-' }, self.logmag()),
        }
    }
}

impl From<f64> for SignedLog {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl Neg for SignedLog {
    type Output = Self;

    fn neg(self) -> Self {
        Self {
            sign: -self.sign,
            ..self
        }
    }
}

impl Mul for SignedLog {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::ZERO;
        }
        Self::normalized(self.sign * rhs.sign, self.mant * rhs.mant, self.exp + rhs.exp)
    }
}

impl Div for SignedLog {
    type Output = Self;

    fn div(self, rhs: Self) -> Self {
        assert!(rhs.sign != 0, "division by zero");
        if self.sign == 0 {
            return Self::ZERO;
        }
        Self::normalized(self.sign * rhs.sign, self.mant / rhs.mant, self.exp - rhs.exp)
    }
}

impl Add for SignedLog {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        if self.sign == 0 {
            return rhs;
        }
        if rhs.sign == 0 {
            return self;
        }
        let (big, small) = if self.exp >= rhs.exp { (self, rhs) } else { (rhs, self) };
        if big.exp - small.exp > ALIGN_LIMIT {
            return big;
        }
        let total = f64::from(big.sign) * big.mant + small.scaled_to(big.exp);
        Self::from_scaled(total, big.exp)
    }
}

impl Sub for SignedLog {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}
