//! Scalar abstraction for probabilities.
//!
//! Everything that manipulates discrete probability masses is generic over
//! [`Probability`]. The exact instantiation ([`Rational`]) is the default for
//! the worked scenarios: several of them compare quantities that differ in the
//! 30th decimal place, which no float survives.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary precision rational number.
pub type Rational = BigRational;

/// Scalar type usable as a probability mass.
pub trait Probability:
    Clone
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Converts a (possibly huge) count of copies.
    fn from_count(n: &BigUint) -> Self;

    /// Converts an exact fraction `num / den`. `den` must be non-zero.
    fn from_fraction(num: &BigInt, den: &BigInt) -> Self;

    fn as_f64(&self) -> f64;

    /// Whether the value is one, up to the scalar's notion of equality.
    fn is_unit(&self) -> bool;

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }
}

impl Probability for Rational {
    fn from_count(n: &BigUint) -> Self {
        BigRational::from_integer(BigInt::from(n.clone()))
    }

    fn from_fraction(num: &BigInt, den: &BigInt) -> Self {
        BigRational::new(num.clone(), den.clone())
    }

    fn as_f64(&self) -> f64 {
        // Scale down huge numerators/denominators before dividing so that
        // values like 2^-1000 do not become NaN.
        match (self.numer().to_f64(), self.denom().to_f64()) {
            (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
            _ => {
                let nb = self.numer().bits() as i64;
                let db = self.denom().bits() as i64;
                let shift = (nb.max(db) - 1000).max(0) as usize;
                let n = (self.numer().abs() >> shift).to_f64().unwrap_or(f64::MAX);
                let d = (self.denom() >> shift).to_f64().unwrap_or(f64::MAX);
                let v = if d == 0.0 { f64::INFINITY } else { n / d };
                if Signed::is_negative(self) {
                    -v
                } else {
                    v
                }
            }
        }
    }

    fn is_unit(&self) -> bool {
        self.is_one()
    }
}

macro_rules! float_probability {
    ($t:ty, $tol:expr) => {
        impl Probability for $t {
            fn from_count(n: &BigUint) -> Self {
                n.to_f64().unwrap_or(f64::INFINITY) as $t
            }

            fn from_fraction(num: &BigInt, den: &BigInt) -> Self {
                Rational::from_fraction(num, den).as_f64() as $t
            }

            fn as_f64(&self) -> f64 {
                *self as f64
            }

            fn is_unit(&self) -> bool {
                (*self - 1.0).abs() <= $tol
            }
        }
    };
}

float_probability!(f64, 1e-9);
float_probability!(f32, 1e-5);

/// `num / den` as a rational.
pub fn ratio(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `2^-exp` as a rational.
pub fn pow2_inv(exp: u32) -> Rational {
    BigRational::new(BigInt::one(), BigInt::one() << exp as usize)
}

/// Parses `"3/4"`, `".75"`, `"0.75"` or `"1"` exactly.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        return (!d.is_zero()).then(|| BigRational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("0{int}{frac}").parse().ok()?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(digits, den);
    Some(if neg { -r } else { r })
}

/// Exact decimal when the expansion terminates (`.75`), otherwise `p/q`.
pub fn format_decimal(r: &Rational) -> String {
    let mut den = r.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let mut places = 0usize;
    let mut scale = BigInt::one();
    while (&den % &two).is_zero() || (&den % &five).is_zero() {
        if (&den % &two).is_zero() {
            den /= &two;
        } else {
            den /= &five;
        }
        places += 1;
        scale *= 10;
    }
    if !den.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    // denominators 2^a 5^b need max(a, b) places; trim any extra zeros
    let scaled = (r * BigRational::from_integer(scale)).to_integer();
    let neg = scaled < BigInt::zero();
    let digits = if neg { -scaled } else { scaled }.to_string();
    let digits = format!("{:0>width$}", digits, width = places + 1);
    let (int, frac) = digits.split_at(digits.len() - places);
    let frac = frac.trim_end_matches('0');
    let int = if int == "0" && !frac.is_empty() { "" } else { int };
    let sign = if neg { "-" } else { "" };
    if frac.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// Formats a probability compactly: integers and simple fractions exactly,
/// otherwise as a decimal approximation.
pub fn display_short<P: Probability>(p: &P) -> String {
    let s = p.to_string();
    if s.len() <= 24 {
        s
    } else {
        format!("{:.6e}", p.as_f64())
    }
}
