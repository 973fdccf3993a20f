//! The ordered field `Q(e)` of rational functions in an infinitesimal `e > 0`.
//!
//! Values are kept canonical after every operation: numerator and denominator
//! share no common factor and the denominator is monic. A value is positive
//! when it is positive for every sufficiently small `e > 0`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::{format_rational, parse_rational, Rational, ScalarError};

/// Dense univariate polynomial over `Q`, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// The indeterminate `e`.
    pub fn epsilon() -> Self {
        Poly::from_coeffs(vec![Rational::zero(), Rational::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    /// Lowest-degree nonzero coefficient.
    pub fn trailing(&self) -> Option<&Rational> {
        self.coeffs.iter().find(|c| !c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn scale(&self, k: &Rational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// Quotient and remainder over `Q`.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("polynomial division by zero");
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let q = &rem[i + dd] / &lead;
            if !q.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] -= &q * d;
                }
            }
            quot[i] = q;
        }
        rem.truncate(dd);
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    /// Monic greatest common divisor. Runs a primitive pseudo-remainder
    /// sequence over the integers so intermediate coefficients stay small.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() && b.is_zero() {
            return Poly::zero();
        }
        if a.degree() == Some(0) || b.degree() == Some(0) {
            return Poly::one();
        }
        let mut x = IntPoly::primitive_from(a);
        let mut y = IntPoly::primitive_from(b);
        if x.degree() < y.degree() {
            std::mem::swap(&mut x, &mut y);
        }
        while !y.is_zero() {
            let r = x.pseudo_rem(&y);
            x = y;
            y = r.primitive();
        }
        let g = x.to_poly();
        let lead = g.leading().unwrap().clone();
        g.scale(&lead.recip())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            match (first, negative) {
                (true, true) => f.write_str("-")?,
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
                (true, false) => {}
            }
            first = false;
            let c = c.abs();
            let unit = c.is_one();
            let c = format_rational(&c);
            match (i, unit) {
                (0, _) => f.write_str(&c)?,
                (1, true) => f.write_str("e")?,
                (1, false) => write!(f, "{c}*e")?,
                (_, true) => write!(f, "e^{i}")?,
                (_, false) => write!(f, "{c}*e^{i}")?,
            }
        }
        Ok(())
    }
}

/// Integer polynomial used inside the gcd computation.
#[derive(Clone, Debug)]
struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    fn primitive_from(p: &Poly) -> IntPoly {
        let lcm = p
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let coeffs = p
            .coeffs
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        IntPoly { coeffs }.primitive()
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn trim(mut self) -> Self {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    fn primitive(self) -> IntPoly {
        let mut p = self.trim();
        if p.is_zero() {
            return p;
        }
        let content = p
            .coeffs
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if !content.is_one() {
            for c in p.coeffs.iter_mut() {
                *c = &*c / &content;
            }
        }
        p
    }

    /// Remainder of `lc(b)^(deg a - deg b + 1) * a` divided by `b`.
    fn pseudo_rem(&self, b: &IntPoly) -> IntPoly {
        let db = b.degree();
        let lead = b.coeffs.last().unwrap().clone();
        let mut r = self.coeffs.clone();
        while r.len() > db && !r.is_empty() {
            let top = r.len() - 1;
            let coef = r[top].clone();
            for c in r.iter_mut() {
                *c = &*c * &lead;
            }
            let shift = top - db;
            for (j, bc) in b.coeffs.iter().enumerate() {
                r[shift + j] -= &coef * bc;
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        IntPoly { coeffs: r }.trim()
    }

    fn to_poly(&self) -> Poly {
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .map(|c| Rational::from_integer(c.clone()))
                .collect(),
        )
    }
}

/// Element of `Q(e)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EpsRational {
    num: Poly,
    den: Poly,
}

impl EpsRational {
    /// Builds `num / den` in canonical form.
    pub fn new(num: Poly, den: Poly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::canonical(num, den))
    }

    pub fn from_poly(num: Poly) -> Self {
        EpsRational {
            num,
            den: Poly::one(),
        }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    /// The infinitesimal itself.
    pub fn epsilon() -> Self {
        Self::from_poly(Poly::epsilon())
    }

    /// `c0 + c1 * e`.
    pub fn linear(c0: Rational, c1: Rational) -> Self {
        Self::from_poly(Poly::from_coeffs(vec![c0, c1]))
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    fn canonical(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return EpsRational {
                num,
                den: Poly::one(),
            };
        }
        let (num, den) = if den.degree() == Some(0) {
            (num, den)
        } else {
            let g = Poly::gcd(&num, &den);
            if g.is_one() {
                (num, den)
            } else {
                (num.div_rem(&g).0, den.div_rem(&g).0)
            }
        };
        let lead = den.leading().unwrap().clone();
        if lead.is_one() {
            EpsRational { num, den }
        } else {
            let inv = lead.recip();
            EpsRational {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    /// Exact value at `e = 0`; fails if the canceled form has a pole there.
    pub fn epsilon_limit(&self) -> Result<Rational, ScalarError> {
        let d0 = self.den.coeff(0);
        if d0.is_zero() {
            return Err(ScalarError::PoleAtZero);
        }
        Ok(self.num.coeff(0) / d0)
    }

    /// Evaluates at a concrete rational `e`.
    pub fn eval(&self, at: &Rational) -> Result<Rational, ScalarError> {
        let d = self.den.eval(at);
        if d.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(self.num.eval(at) / d)
    }

    pub fn recip(&self) -> Result<Self, ScalarError> {
        if self.num.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::canonical(self.den.clone(), self.num.clone()))
    }

    fn sign(&self) -> i32 {
        let sign_of = |p: &Poly| match p.trailing() {
            None => 0,
            Some(c) if c.is_negative() => -1,
            Some(_) => 1,
        };
        sign_of(&self.num) * sign_of(&self.den)
    }
}

impl Add for EpsRational {
    type Output = EpsRational;
    fn add(self, rhs: EpsRational) -> EpsRational {
        if self.den == rhs.den {
            if self.den.is_one() {
                return EpsRational::from_poly(&self.num + &rhs.num);
            }
            return EpsRational::canonical(&self.num + &rhs.num, self.den);
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        EpsRational::canonical(num, &self.den * &rhs.den)
    }
}

impl Sub for EpsRational {
    type Output = EpsRational;
    fn sub(self, rhs: EpsRational) -> EpsRational {
        self + (-rhs)
    }
}

impl Mul for EpsRational {
    type Output = EpsRational;
    fn mul(self, rhs: EpsRational) -> EpsRational {
        if self.den.is_one() && rhs.den.is_one() {
            return EpsRational::from_poly(&self.num * &rhs.num);
        }
        EpsRational::canonical(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for EpsRational {
    type Output = EpsRational;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: EpsRational) -> EpsRational {
        let inv = rhs.recip().expect("division by the zero rational function");
        self * inv
    }
}

impl Neg for EpsRational {
    type Output = EpsRational;
    fn neg(self) -> EpsRational {
        EpsRational {
            num: -&self.num,
            den: self.den,
        }
    }
}

impl PartialOrd for EpsRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EpsRational {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        match (self.clone() - other.clone()).sign() {
            s if s < 0 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }
}

impl crate::scalar::Scalar for EpsRational {
    fn zero() -> Self {
        EpsRational::from_poly(Poly::zero())
    }

    fn one() -> Self {
        EpsRational::from_poly(Poly::one())
    }

    fn from_rational(value: &Rational) -> Self {
        EpsRational::constant(value.clone())
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn signum(&self) -> i32 {
        self.sign()
    }

    fn to_rational(&self) -> Option<Rational> {
        match (self.num.degree(), self.den.degree()) {
            (None, _) => Some(<Rational as Zero>::zero()),
            (Some(0), Some(0)) => Some(self.num.coeff(0) / self.den.coeff(0)),
            _ => None,
        }
    }

    fn limit(&self) -> Result<Rational, ScalarError> {
        self.epsilon_limit()
    }

    fn checked_div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        Ok(self.clone() * rhs.recip()?)
    }
}

impl fmt::Display for EpsRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl FromStr for EpsRational {
    type Err = ScalarError;

    /// Accepts a polynomial in `e` such as `1 - 1/2*e` or `3*e^2 + e`, or a
    /// quotient of two parenthesized polynomials `(P)/(Q)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if let Some(rest) = t.strip_prefix('(') {
            let close = rest
                .find(')')
                .ok_or_else(|| ScalarError::parse(s, "unbalanced parenthesis"))?;
            let num = parse_poly(&rest[..close], s)?;
            let tail = rest[close + 1..].trim();
            if tail.is_empty() {
                return Ok(EpsRational::from_poly(num));
            }
            let den_str = tail
                .strip_prefix('/')
                .map(str::trim)
                .and_then(|d| d.strip_prefix('('))
                .and_then(|d| d.strip_suffix(')'))
                .ok_or_else(|| ScalarError::parse(s, "expected (P)/(Q)"))?;
            let den = parse_poly(den_str, s)?;
            return EpsRational::new(num, den);
        }
        Ok(EpsRational::from_poly(parse_poly(t, s)?))
    }
}

/// Whether a scalar literal mentions the infinitesimal.
pub fn mentions_epsilon(literal: &str) -> bool {
    literal.contains('e')
}

fn parse_poly(src: &str, whole: &str) -> Result<Poly, ScalarError> {
    let compact: String = src.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(ScalarError::parse(whole, "empty expression"));
    }
    // Split into signed terms; a sign directly after '^' or '*' never occurs
    // in valid input, so every +/- outside position 0 starts a new term.
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    for (i, ch) in compact.chars().enumerate() {
        match ch {
            '+' | '-' => {
                if i == 0 || !current.is_empty() {
                    if !current.is_empty() {
                        terms.push((negative, std::mem::take(&mut current)));
                        negative = false;
                    }
                    if ch == '-' {
                        negative = !negative;
                    }
                } else if ch == '-' {
                    // "+ -3*e" style: fold the sign into the pending term.
                    negative = !negative;
                }
            }
            _ => current.push(ch),
        }
    }
    if current.is_empty() {
        return Err(ScalarError::parse(whole, "dangling sign"));
    }
    terms.push((negative, current));

    let mut coeffs: Vec<Rational> = Vec::new();
    for (negative, term) in terms {
        let (coef, power) = parse_term(&term, whole)?;
        if coeffs.len() <= power {
            coeffs.resize(power + 1, Rational::zero());
        }
        if negative {
            coeffs[power] -= coef;
        } else {
            coeffs[power] += coef;
        }
    }
    Ok(Poly::from_coeffs(coeffs))
}

fn parse_term(term: &str, whole: &str) -> Result<(Rational, usize), ScalarError> {
    let (coef_str, var) = match term.find('e') {
        None => return Ok((parse_rational(term)?, 0)),
        Some(pos) => (&term[..pos], &term[pos..]),
    };
    let coef = if coef_str.is_empty() {
        Rational::one()
    } else {
        let c = coef_str
            .strip_suffix('*')
            .ok_or_else(|| ScalarError::parse(whole, "expected '*' before e"))?;
        parse_rational(c).map_err(|_| ScalarError::parse(whole, "bad coefficient"))?
    };
    let power = match var.strip_prefix('e') {
        Some("") => 1,
        Some(rest) => {
            let digits = rest
                .strip_prefix('^')
                .ok_or_else(|| ScalarError::parse(whole, "expected e^k"))?;
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(ScalarError::parse(whole, "bad exponent"));
            }
            digits
                .parse()
                .map_err(|_| ScalarError::parse(whole, "bad exponent"))?
        }
        None => unreachable!(),
    };
    Ok((coef, power))
}
