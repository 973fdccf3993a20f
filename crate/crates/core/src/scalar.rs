//! Exact ordered fields used by every computation in the crate.
//!
//! Two backends implement [`Scalar`]: arbitrary-precision rationals and the
//! field of rational functions in an infinitesimal `e` (see [`crate::eps`]).
//! Everything above this module is generic over the trait, so a formula that
//! runs over `Q` runs unchanged over `Q(e)`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::linalg::Matrix;

/// Arbitrary-precision rational number in canonical form.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("rational function has a pole at e = 0")]
    PoleAtZero,
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

impl ScalarError {
    pub(crate) fn parse(input: &str, reason: impl Into<String>) -> Self {
        ScalarError::Parse {
            input: input.to_string(),
            reason: reason.into(),
        }
    }
}

/// An exact ordered field.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + Ord
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(value: &Rational) -> Self;

    fn from_i64(value: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(value)))
    }

    fn is_zero(&self) -> bool;

    /// -1, 0 or +1.
    fn signum(&self) -> i32;

    /// The value as a plain rational, if it is one.
    fn to_rational(&self) -> Option<Rational>;

    /// Limit as the field's infinitesimal (if any) goes to zero.
    fn limit(&self) -> Result<Rational, ScalarError>;

    fn checked_div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        if rhs.is_zero() {
            Err(ScalarError::DivisionByZero)
        } else {
            Ok(self.clone() / rhs.clone())
        }
    }

    fn pow(&self, exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    /// Determinant of a square matrix. Backends may override the default
    /// field elimination with something faster.
    fn determinant(m: &Matrix<Self>) -> Self {
        crate::linalg::field_determinant(m)
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        <Rational as Zero>::zero()
    }

    fn one() -> Self {
        <Rational as One>::one()
    }

    fn from_rational(value: &Rational) -> Self {
        value.clone()
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn signum(&self) -> i32 {
        if Zero::is_zero(self) {
            0
        } else if Signed::is_negative(self) {
            -1
        } else {
            1
        }
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn limit(&self) -> Result<Rational, ScalarError> {
        Ok(self.clone())
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn determinant(m: &Matrix<Self>) -> Self {
        crate::linalg::bareiss_determinant(m)
    }
}

/// `n!` as an exact integer.
pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `C(n, k)` as an exact integer; zero when `k > n`.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn integer(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `[-]?\d+(/\d+)?` into a canonical rational.
pub fn parse_rational(input: &str) -> Result<Rational, ScalarError> {
    let s = input.trim();
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (num_str, den_str) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    let digits = |part: &str| !part.is_empty() && part.bytes().all(|b| b.is_ascii_digit());
    if !digits(num_str) {
        return Err(ScalarError::parse(input, "expected an integer numerator"));
    }
    let mut numer: BigInt = num_str
        .parse()
        .map_err(|_| ScalarError::parse(input, "bad numerator"))?;
    if negative {
        numer = -numer;
    }
    let denom: BigInt = match den_str {
        None => BigInt::one(),
        Some(d) => {
            if !digits(d) {
                return Err(ScalarError::parse(input, "expected an integer denominator"));
            }
            d.parse()
                .map_err(|_| ScalarError::parse(input, "bad denominator"))?
        }
    };
    if denom.is_zero() {
        return Err(ScalarError::parse(input, "zero denominator"));
    }
    Ok(Rational::new(numer, denom))
}

/// Canonical `p/q` (or `p` when `q = 1`) string.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

/// Decimal rendering with `sig` significant digits, rounding half to even.
pub fn format_decimal(value: &Rational, sig: usize) -> String {
    assert!(sig > 0);
    if Zero::is_zero(value) {
        return "0".to_string();
    }
    let negative = Signed::is_negative(value);
    let magnitude = Signed::abs(value);
    let ten = BigInt::from(10);

    // Largest e with 10^e <= |value|.
    let mut exp = {
        let approx = magnitude.numer().bits() as i64 - magnitude.denom().bits() as i64;
        (approx as f64 * std::f64::consts::LOG10_2).floor() as i64
    };
    let pow10 = |e: i64| -> Rational {
        if e >= 0 {
            Rational::from_integer(num_traits::pow(ten.clone(), e as usize))
        } else {
            Rational::new(BigInt::one(), num_traits::pow(ten.clone(), (-e) as usize))
        }
    };
    while pow10(exp) > magnitude {
        exp -= 1;
    }
    while pow10(exp + 1) <= magnitude {
        exp += 1;
    }

    let round_scaled = |exp: i64| -> BigInt {
        let scaled = &magnitude * pow10(sig as i64 - 1 - exp);
        let (q, r): (BigInt, BigInt) = scaled.numer().div_rem(scaled.denom());
        let twice: BigInt = r * BigInt::from(2);
        match twice.cmp(scaled.denom()) {
            std::cmp::Ordering::Less => q,
            std::cmp::Ordering::Greater => q + 1,
            std::cmp::Ordering::Equal => {
                if q.is_even() {
                    q
                } else {
                    q + 1
                }
            }
        }
    };
    let mut digits_int = round_scaled(exp);
    if digits_int == num_traits::pow(ten.clone(), sig) {
        exp += 1;
        digits_int = round_scaled(exp);
    }
    let digits = digits_int.to_string();
    debug_assert_eq!(digits.len(), sig);

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if (-7..21).contains(&exp) {
        if exp >= 0 {
            let int_len = exp as usize + 1;
            if int_len >= digits.len() {
                out.push_str(&digits);
                out.extend(std::iter::repeat_n('0', int_len - digits.len()));
            } else {
                let frac = digits[int_len..].trim_end_matches('0');
                out.push_str(&digits[..int_len]);
                if !frac.is_empty() {
                    out.push('.');
                    out.push_str(frac);
                }
            }
        } else {
            out.push_str("0.");
            out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
            out.push_str(digits.trim_end_matches('0'));
        }
    } else {
        let frac = digits[1..].trim_end_matches('0');
        out.push_str(&digits[..1]);
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
        out.push_str(&format!("e{exp}"));
    }
    out
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}
