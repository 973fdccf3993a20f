//! Combinatorial identities obtained from clipped cube volumes. Every left
//! side is a literal translation of the printed sum with subsets in
//! lexicographic order; right sides are the printed closed forms.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::cube::combinations;
use crate::random::rng;
use crate::scalar::{binomial, factorial, rational, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IdentityError {
    #[error("unknown identity id {0:?}")]
    UnknownIdentity(String),
    #[error("identity precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("missing parameter {0}")]
    MissingParameter(&'static str),
    #[error("identity {id} has no {form} form")]
    UnsupportedForm { id: IdentityId, form: Form },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityId {
    Pte,
    Simplex,
    Binomial,
    Level,
    OnePlaneSplit,
    Slab2,
    TruncatedCube,
    Hyperprism,
    Isosceles,
    Trapezoid,
}

impl IdentityId {
    pub const ALL: [IdentityId; 10] = [
        IdentityId::Pte,
        IdentityId::Simplex,
        IdentityId::Binomial,
        IdentityId::Level,
        IdentityId::OnePlaneSplit,
        IdentityId::Slab2,
        IdentityId::TruncatedCube,
        IdentityId::Hyperprism,
        IdentityId::Isosceles,
        IdentityId::Trapezoid,
    ];

    pub fn key(self) -> &'static str {
        match self {
            IdentityId::Pte => "pte",
            IdentityId::Simplex => "simplex",
            IdentityId::Binomial => "binomial",
            IdentityId::Level => "level",
            IdentityId::OnePlaneSplit => "one_plane_split",
            IdentityId::Slab2 => "slab2",
            IdentityId::TruncatedCube => "truncated_cube",
            IdentityId::Hyperprism => "hyperprism",
            IdentityId::Isosceles => "isosceles",
            IdentityId::Trapezoid => "trapezoid",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            IdentityId::Pte => "alternating subset sums of powers (Prouhet-Tarry-Escott type)",
            IdentityId::Simplex => "clipped simplex, Lagrange interpolation weights",
            IdentityId::Binomial => "alternating binomial sums of n-th powers",
            IdentityId::Level => "cube cut at level l by the plane sum x = l",
            IdentityId::OnePlaneSplit => "cube split by one generic plane",
            IdentityId::Slab2 => "cube cut at level 2",
            IdentityId::TruncatedCube => "symmetric truncated hypercube",
            IdentityId::Hyperprism => "hyperprism, n-simplex times [0,1]^m",
            IdentityId::Isosceles => "isosceles n-simplex",
            IdentityId::Trapezoid => "trapezoidal polytope",
        }
    }

    /// Whether `form` is printed for this identity.
    fn supports(self, form: Form) -> bool {
        use IdentityId::*;
        match form {
            Form::Y => true,
            Form::SetY => self == Level,
            Form::Power(_) => matches!(self, Pte | Simplex | Binomial | Level),
            Form::SetPower(_) => matches!(self, Pte | Simplex | Level),
        }
    }

    /// The forms a sweep draws from for dimension `n`.
    pub fn forms(self, n: usize) -> Vec<Form> {
        let n = n as i64;
        let mut out = vec![Form::Y];
        if self.supports(Form::SetY) {
            out.push(Form::SetY);
        }
        if self.supports(Form::Power(0)) {
            let lo = if self == IdentityId::Simplex { -1 } else { 0 };
            let hi = if self == IdentityId::Simplex { n - 1 } else { n };
            out.extend((lo..=hi).map(Form::Power));
        }
        if self.supports(Form::SetPower(0)) {
            out.extend((0..=n).map(Form::SetPower));
        }
        out
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for IdentityId {
    type Err = IdentityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        IdentityId::ALL
            .into_iter()
            .find(|id| id.key() == s)
            .ok_or_else(|| IdentityError::UnknownIdentity(s.to_string()))
    }
}

/// Which printed form of an identity to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Form {
    /// The form with a free offset `y`.
    Y,
    /// The `y` form in set notation, `sum_I (y + ||I||)^n ...`.
    SetY,
    /// The exponent-indexed form summing over nonempty index sets.
    Power(i64),
    /// The exponent-indexed form in set notation, empty set included.
    SetPower(i64),
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Form::Y => f.write_str("y"),
            Form::SetY => f.write_str("set-y"),
            Form::Power(k) => write!(f, "power k={k}"),
            Form::SetPower(k) => write!(f, "set-power k={k}"),
        }
    }
}

impl Serialize for Form {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityParams {
    pub a: Vec<Rational>,
    pub b: Vec<Rational>,
    pub y: Rational,
    pub form: Form,
    /// Level of the cut, `1 <= l <= n`.
    pub l: Option<usize>,
    /// Truncation depth of the truncated cube.
    pub d: Option<Rational>,
    /// Dimension for `binomial`, which has no `a`.
    pub n: Option<usize>,
}

impl Default for IdentityParams {
    fn default() -> Self {
        IdentityParams {
            a: vec![],
            b: vec![],
            y: Rational::zero(),
            form: Form::Y,
            l: None,
            d: None,
            n: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityOutcome {
    pub lhs: Rational,
    pub rhs: Rational,
    pub equal: bool,
}

impl IdentityOutcome {
    fn new(lhs: Rational, rhs: Rational) -> Self {
        let equal = lhs == rhs;
        IdentityOutcome { lhs, rhs, equal }
    }
}

fn violated(msg: String) -> IdentityError {
    IdentityError::PreconditionViolated(msg)
}

fn need_len(name: &str, v: &[Rational], min: usize) -> Result<(), IdentityError> {
    if v.len() < min {
        return Err(violated(format!("{name} needs at least {min} entries, got {}", v.len())));
    }
    Ok(())
}

fn nonzero(name: &str, v: &[Rational]) -> Result<(), IdentityError> {
    match v.iter().position(Scalar::is_zero) {
        Some(i) => Err(violated(format!("{name}_{} = 0 appears in a denominator", i + 1))),
        None => Ok(()),
    }
}

fn distinct(name: &str, v: &[Rational]) -> Result<(), IdentityError> {
    for j in 0..v.len() {
        for i in 0..j {
            if v[i] == v[j] {
                return Err(violated(format!(
                    "{name}_{} = {name}_{} = {} makes the denominator {name}_{} - {name}_{} vanish",
                    i + 1,
                    j + 1,
                    v[i],
                    j + 1,
                    i + 1
                )));
            }
        }
    }
    Ok(())
}

fn no_opposite(v: &[Rational]) -> Result<(), IdentityError> {
    for j in 0..v.len() {
        for i in 0..j {
            if (v[i].clone() + v[j].clone()).is_zero() {
                return Err(violated(format!(
                    "a_{} = -a_{} makes the denominator a_{} + a_{} vanish",
                    j + 1,
                    i + 1,
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(())
}

fn k_range(k: i64, lo: i64, hi: i64) -> Result<u32, IdentityError> {
    if k < lo || k > hi {
        return Err(violated(format!("exponent k = {k} outside {lo}..={hi}")));
    }
    Ok(k.max(0) as u32)
}

fn int(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

fn big(v: num_bigint::BigInt) -> Rational {
    Rational::from_integer(v)
}

fn prod(v: impl IntoIterator<Item = Rational>) -> Rational {
    v.into_iter().fold(Rational::one(), |acc, x| acc * x)
}

fn sign(e: usize) -> Rational {
    if e.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// `x^k` with `0^0 = 1`.
fn pw(x: &Rational, k: u32) -> Rational {
    Scalar::pow(x, k)
}

/// Calls `f(T)` for every `T ⊆ {0..n-1}` of size `size`, lexicographically.
fn each_subset(n: usize, size: usize, mut f: impl FnMut(&[usize])) {
    if size == 0 {
        f(&[]);
    } else if size <= n {
        combinations(n, size, &mut |c| f(c));
    }
}

fn sum_at(a: &[Rational], t: &[usize]) -> Rational {
    t.iter().fold(Rational::zero(), |acc, &i| acc + a[i].clone())
}

/// `R_A(a_i) = prod_{j != i} a_j / (a_j - a_i)`.
fn r_weight(a: &[Rational], i: usize) -> Rational {
    prod((0..a.len()).filter(|&j| j != i).map(|j| a[j].clone() / (a[j].clone() - a[i].clone())))
}

/// `prod_{j != i} (a_j - a_i)`.
fn diffs(a: &[Rational], i: usize) -> Rational {
    prod((0..a.len()).filter(|&j| j != i).map(|j| a[j].clone() - a[i].clone()))
}

/// `sum_{i<l} (-1)^{n-i} C(n,i) (l-i)^n`.
fn level_sum(n: usize, l: usize) -> Rational {
    (0..l).fold(Rational::zero(), |acc, i| {
        acc + sign(n - i) * big(binomial(n as u32, i as u32)) * Scalar::pow(&int((l - i) as i64), n as u32)
    })
}

pub fn eval_identity(id: IdentityId, p: &IdentityParams) -> Result<IdentityOutcome, IdentityError> {
    if !id.supports(p.form) {
        return Err(IdentityError::UnsupportedForm { id, form: p.form });
    }
    match id {
        IdentityId::Pte => pte(p),
        IdentityId::Simplex => simplex(p),
        IdentityId::Binomial => binomial_identity(p),
        IdentityId::Level => level(p),
        IdentityId::OnePlaneSplit => one_plane_split(p),
        IdentityId::Slab2 => slab2(p),
        IdentityId::TruncatedCube => truncated_cube(p),
        IdentityId::Hyperprism => hyperprism(p),
        IdentityId::Isosceles => isosceles(p),
        IdentityId::Trapezoid => trapezoid(p),
    }
}

/// Checks preconditions without evaluating.
pub fn validate(id: IdentityId, p: &IdentityParams) -> Result<(), IdentityError> {
    let a = &p.a;
    match id {
        IdentityId::Pte | IdentityId::OnePlaneSplit => need_len("a", a, 1),
        IdentityId::Binomial => match p.n.or((!a.is_empty()).then_some(a.len())) {
            Some(n) if n >= 1 => Ok(()),
            _ => Err(IdentityError::MissingParameter("n")),
        },
        IdentityId::Simplex => {
            need_len("a", a, 1)?;
            nonzero("a", a)?;
            distinct("a", a)
        }
        IdentityId::Level => {
            need_len("a", a, 1)?;
            nonzero("a", a)?;
            distinct("a", a)?;
            let l = p.l.ok_or(IdentityError::MissingParameter("l"))?;
            if l == 0 || l > a.len() {
                return Err(violated(format!("level l = {l} outside 1..={}", a.len())));
            }
            Ok(())
        }
        IdentityId::Slab2 => {
            need_len("a", a, 2)?;
            nonzero("a", a)?;
            distinct("a", a)
        }
        IdentityId::TruncatedCube => {
            need_len("a", a, 1)?;
            nonzero("a", a)?;
            distinct("a", a)?;
            no_opposite(a)?;
            p.d.as_ref().ok_or(IdentityError::MissingParameter("d")).map(|_| ())
        }
        IdentityId::Hyperprism => {
            need_len("a", a, 1)?;
            nonzero("a", a)?;
            distinct("a", a)?;
            nonzero("b", &p.b)
        }
        IdentityId::Isosceles => {
            need_len("a", a, 1)?;
            nonzero("a", &a[..1])?;
            distinct("a", a)?;
            for i in 1..a.len() {
                if (a[0].clone() + a[i].clone()).is_zero() {
                    return Err(violated(format!(
                        "a_{} = -a_1 makes the denominator a_1 + a_{} vanish",
                        i + 1,
                        i + 1
                    )));
                }
            }
            Ok(())
        }
        IdentityId::Trapezoid => {
            need_len("a", a, 1)?;
            need_len("b", &p.b, 1)?;
            nonzero("a", a)?;
            nonzero("b", &p.b)?;
            distinct("a", a)?;
            distinct("b", &p.b)?;
            for (j, bj) in p.b.iter().enumerate() {
                for (s, as_) in a.iter().enumerate() {
                    if bj.clone() / int(2) == *as_ {
                        return Err(violated(format!(
                            "b_{}/2 = a_{} makes the denominator b_{}/2 - a_{} vanish",
                            j + 1,
                            s + 1,
                            j + 1,
                            s + 1
                        )));
                    }
                }
            }
            Ok(())
        }
    }
}

fn pte(p: &IdentityParams) -> Result<IdentityOutcome, IdentityError> {
    validate(IdentityId::Pte, p)?;
    let a = &p.a;
    let n = a.len();
    let a_fact = prod(a.iter().cloned());
    let top = sign(n) * big(factorial(n as u32)) * a_fact;
    let alternating = |from: usize, f: &dyn Fn(&Rational) -> Rational| {
        let mut s = Rational::zero();
        for size in from..=n {
            each_subset(n, size, |t| s = s.clone() + sign(size) * f(&sum_at(a, t)));
        }
        s
    };
    Ok(match p.form {
        Form::Y => {
            let lhs = pw(&p.y, n as u32) + alternating(1, &|s| pw(&(p.y.clone() + s.clone()), n as u32));
            IdentityOutcome::new(lhs, top)
        }
        Form::Power(k) => {
            let k = k_range(k, 0, n as i64)?;
            let rhs = match k {
                0 => -Rational::one(),
                k if (k as usize) < n => Rational::zero(),
                _ => top,
            };
            IdentityOutcome::new(alternating(1, &|s| pw(s, k)), rhs)
        }
        Form::SetPower(k) => {
            let k = k_range(k, 0, n as i64)?;
            let rhs = if (k as usize) < n { Rational::zero() } else { top };
            IdentityOutcome::new(alternating(0, &|s| pw(s, k)), rhs)
        }
        Form::SetY => unreachable!(),
    })
}

fn simplex(p: &IdentityParams) -> Result<IdentityOutcome, IdentityError> {
    validate(IdentityId::Simplex, p)?;
    let a = &p.a;
    let n = a.len();
    let a_fact = prod(a.iter().cloned());
    Ok(match p.form {
        Form::Y => {
            let mut lhs = pw(&p.y, n as u32) / a_fact;
            for i in 0..n {
                lhs -= pw(&(p.y.clone() + a[i].clone()), n as u32) / (a[i].clone() * diffs(a, i));
            }
            IdentityOutcome::new(lhs, sign(n))
        }
        Form::Power(k) => {
            k_range(k, -1, n as i64 - 1)?;
            let lhs = (0..n).fold(Rational::zero(), |acc, i| {
                let ak = if k < 0 { a[i].recip() } else { pw(&a[i], k as u32) };
                acc + ak / diffs(a, i)
            });
            let rhs = match k {
                -1 => a_fact.recip(),
                k if k < n as i64 - 1 => Rational::zero(),
                _ => sign(n - 1),
            };
            IdentityOutcome::new(lhs, rhs)
        }
        Form::SetPower(k) => {
            let k = k_range(k, 0, n as i64)?;
            let lhs = (0..n).fold(Rational::zero(), |acc, i| acc + r_weight(a, i) * pw(&a[i], k));
            let rhs = match k {
                0 => Rational::one(),
                k if (k as usize) < n => Rational::zero(),
                _ => sign(n - 1) * a_fact,
            };
            IdentityOutcome::new(lhs, rhs)
        }
        Form::SetY => unreachable!(),
    })
}

fn binomial_identity(p: &IdentityParams) -> Result<IdentityOutcome, IdentityError> {
    validate(IdentityId::Binomial, p)?;
    let n = p.n.unwrap_or(p.a.len());
    let term = |i: usize, x: Rational, k: u32| sign(i) * big(binomial(n as u32, i as u32)) * pw(&x, k);
    let top = sign(n) * big(factorial(n as u32));
    Ok(match p.form {
        Form::Y => {
            let lhs = (0..=n).fold(Rational::zero(), |acc, i| {
                acc + term(i, p.y.clone() + int(i as i64), n as u32)
            });
            IdentityOutcome::new(lhs, top)
        }
        Form::Power(k) => {
            let k = k_range(k, 0, n as i64)?;
            let lhs = (0..=n).fold(Rational::zero(), |acc, i| acc + term(i, int(i as i64), k));
            let rhs = if (k as usize) < n { Rational::zero() } else { top };
            IdentityOutcome::new(lhs, rhs)
        }
        _ => unreachable!(),
    })
}

fn level(p: &IdentityParams) -> Result<IdentityOutcome, IdentityError> {
    validate(IdentityId::Level, p)?;
    let a = &p.a;
    let n = a.len();
    let l = p.l.unwrap();
    let a_fact = prod(a.iter().cloned());
    let s = level_sum(n, l);
    // Lower levels weighted by `w(|T|, value)`, level `l` by `top(value, i)`
    // for each `i` in `T`.
    let sweep = |lower_from: usize,
                 lower: &dyn Fn(usize, &Rational) -> Rational,
                 top: &dyn Fn(&Rational, usize) -> Rational| {
        let mut acc = Rational::zero();
        for size in lower_from..l {
            each_subset(n, size, |t| acc = acc.clone() + sign(size) * lower(size, &sum_at(a, t)));
        }
        each_subset(n, l, |t| {
            let v = sum_at(a, t);
            for &i in t {
                acc = acc.clone() + sign(l) * top(&v, i);
            }
        });
        acc
    };
    let yn = |v: &Rational| pw(&(p.y.clone() + v.clone()), n as u32);
    Ok(match p.form {
        Form::Y => {
            let lhs = pw(&p.y, n as u32) / a_fact.clone()
                + sweep(1, &|_, v| yn(v) / a_fact.clone(), &|v, i| {
                    yn(v) / (a[i].clone() * diffs(a, i))
                });
            IdentityOutcome::new(lhs, s)
        }
        Form::SetY => {
            let lhs = sweep(0, &|_, v| yn(v), &|v, i| yn(v) * r_weight(a, i));
            IdentityOutcome::new(lhs, a_fact * s)
        }
        Form::Power(k) => {
            let k = k_range(k, 0, n as i64)?;
            let lhs = sweep(1, &|_, v| pw(v, k), &|v, i| r_weight(a, i) * pw(v, k));
            let rhs = match k {
                0 => -Rational::one(),
                k if (k as usize) < n => Rational::zero(),
                _ => a_fact * s,
            };
            IdentityOutcome::new(lhs, rhs)
        }
        Form::SetPower(k) => {
            let k = k_range(k, 0, n as i64)?;
            let lhs = sweep(0, &|_, v| pw(v, k), &|v, i| r_weight(a, i) * pw(v, k));
            let rhs = if (k as usize) < n { Rational::zero() } else { a_fact * s };
            IdentityOutcome::new(lhs, rhs)
        }
    })
}

fn one_plane_split(p: &IdentityParams) -> Result<IdentityOutcome, IdentityError> {
    validate(IdentityId::OnePlaneSplit, p)?;
    let a = &p.a;
    let n = a.len();
    let mut lhs = Rational::zero();
    for mask in 0u64..(1 << n) {
        let ones: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let g = p.y.clone() + sum_at(a, &ones);
        lhs += sign(n - ones.len()) * pw(&g, n as u32);
    }
    let rhs = big(factorial(n as u32)) * prod(a.iter().cloned());
    Ok(IdentityOutcome::new(lhs, rhs))
}

fn slab2(p: &IdentityParams) -> Result<IdentityOutcome, IdentityError> {
    validate(IdentityId::Slab2, p)?;
    let a = &p.a;
    let n = a.len();
    let a_fact = prod(a.iter().cloned());
    let yn = |v: Rational| pw(&(p.y.clone() + v), n as u32);
    let mut lhs = yn(Rational::zero()) / a_fact.clone();
    for i in 0..n {
        lhs -= yn(a[i].clone()) / a_fact.clone();
    }
    each_subset(n, 2, |t| {
        for &i in t {
            lhs = lhs.clone() + yn(sum_at(a, t)) / (a[i].clone() * diffs(a, i));
        }
    });
    let rhs = sign(n) * int((1i64 << n) - n as i64);
    Ok(IdentityOutcome::new(lhs, rhs))
}

fn truncated_cube(p: &IdentityParams) -> Result<IdentityOutcome, IdentityError> {
    validate(IdentityId::TruncatedCube, p)?;
    let a = &p.a;
    let n = a.len();
    let d = p.d.clone().unwrap();
    let a_fact = prod(a.iter().cloned());
    let yn = |v: Rational| pw(&(p.y.clone() + v), n as u32);
    let mut lhs = Rational::zero();
    for i in 0..n {
        lhs += yn(a[i].clone()) / a_fact.clone();
    }
    for i in 0..n {
        let den = a[i].clone() * prod((0..n).filter(|&j| j != i).map(|j| a[j].clone() + a[i].clone()));
        lhs -= yn(a[i].clone() * (Rational::one() - d.clone())) / den;
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let den = a[j].clone()
                * (a[i].clone() + a[j].clone())
                * prod((0..n).filter(|&t| t != i && t != j).map(|t| a[t].clone() - a[j].clone()));
            lhs -= yn(a[i].clone() + a[j].clone() * d.clone()) / den;
        }
    }
    let rhs = sign(n + 1) * int(n as i64) * Scalar::pow(&d, n as u32);
    Ok(IdentityOutcome::new(lhs, rhs))
}

fn hyperprism(p: &IdentityParams) -> Result<IdentityOutcome, IdentityError> {
    validate(IdentityId::Hyperprism, p)?;
    let (a, b) = (&p.a, &p.b);
    let (n, m) = (a.len(), b.len());
    let big_n = (n + m) as u32;
    let mut lhs = Rational::zero();
    for size in 0..=m {
        each_subset(m, size, |t| {
            let s = sum_at(b, t);
            lhs = lhs.clone() + sign(size) * pw(&(p.y.clone() + s.clone()), big_n);
        });
    }
    for i in 0..n {
        for size in 0..=m {
            each_subset(m, size, |t| {
                let s = sum_at(b, t);
                lhs = lhs.clone()
                    + sign(size + 1) * r_weight(a, i) * pw(&(p.y.clone() + a[i].clone() + s), big_n);
            });
        }
    }
    let rhs = sign(n + m) * big(factorial(big_n)) / big(factorial(n as u32))
        * prod(a.iter().cloned())
        * prod(b.iter().cloned());
    Ok(IdentityOutcome::new(lhs, rhs))
}

fn isosceles(p: &IdentityParams) -> Result<IdentityOutcome, IdentityError> {
    validate(IdentityId::Isosceles, p)?;
    let a = &p.a;
    let n = a.len();
    let yn = |v: Rational| pw(&(p.y.clone() + v), n as u32);
    let a1 = a[0].clone();
    let mut lhs = yn(Rational::zero()) / (a1.clone() * prod((1..n).map(|i| a[i].clone() + a1.clone())))
        - yn(a1.clone()) / (a1.clone() * prod((1..n).map(|i| a[i].clone() - a1.clone())));
    let half = rational(1, 2);
    for i in 1..n {
        let v = a1.clone() * half.clone() + a[i].clone() * half.clone();
        let den = (a1.clone() + a[i].clone()) * diffs(a, i);
        lhs -= int(2) * yn(v) / den;
    }
    let rhs = sign(n) * rational(1, 1 << (n - 1));
    Ok(IdentityOutcome::new(lhs, rhs))
}

fn trapezoid(p: &IdentityParams) -> Result<IdentityOutcome, IdentityError> {
    validate(IdentityId::Trapezoid, p)?;
    let (a, b) = (&p.a, &p.b);
    let (n, m) = (a.len(), b.len());
    let big_n = n + m;
    let yn = |v: Rational| pw(&(p.y.clone() + v), big_n as u32);
    let half = rational(1, 2);
    let ab = prod(a.iter().cloned()) * prod(b.iter().cloned());
    let mut lhs = sign(big_n) * yn(Rational::zero()) / ab.clone();
    for i in 0..n {
        lhs += sign(big_n - 1) * yn(a[i].clone()) / ab.clone();
    }
    for j in 0..m {
        let den = b[j].clone()
            * prod(a.iter().map(|s| b[j].clone() * half.clone() - s.clone()))
            * prod((0..m).filter(|&t| t != j).map(|t| b[j].clone() - b[t].clone()));
        lhs += yn(b[j].clone()) / den.clone();
        for i in 0..n {
            lhs -= yn(a[i].clone() + b[j].clone() * half.clone()) / den.clone();
        }
    }
    for i in 0..n {
        let den = int(1 << m)
            * a[i].clone()
            * prod((0..n).filter(|&s| s != i).map(|s| a[i].clone() - a[s].clone()))
            * prod(b.iter().map(|t| a[i].clone() - t.clone() * half.clone()));
        for j in 0..n {
            if i != j {
                lhs -= yn(a[i].clone() + a[j].clone()) / den.clone();
            }
        }
    }
    let rhs = int(1 << n) - int(n as i64) * rational(1, 1 << m);
    Ok(IdentityOutcome::new(lhs, rhs))
}

/// Random nonzero `p/q` with `|p| <= 20`, `1 <= q <= 7`.
fn draw(rng: &mut impl Rng) -> Rational {
    loop {
        let v = rational(rng.gen_range(-20..=20), rng.gen_range(1..=7));
        if !v.is_zero() {
            return v;
        }
    }
}

/// Random parameters with `n <= max_n` satisfying the preconditions of `id`.
pub fn random_params(id: IdentityId, rng: &mut impl Rng, max_n: usize) -> IdentityParams {
    loop {
        let (n, m) = match id {
            IdentityId::Slab2 => (rng.gen_range(2..=max_n), 0),
            IdentityId::Hyperprism | IdentityId::Trapezoid => {
                let total = rng.gen_range(2..=max_n);
                let n = rng.gen_range(1..total);
                (n, total - n)
            }
            _ => (rng.gen_range(1..=max_n), 0),
        };
        let forms = id.forms(n);
        let p = IdentityParams {
            a: (0..n).map(|_| draw(rng)).collect(),
            b: (0..m).map(|_| draw(rng)).collect(),
            y: draw(rng),
            form: forms[rng.gen_range(0..forms.len())],
            l: Some(rng.gen_range(1..=n)),
            d: Some(rational(rng.gen_range(1..10), 10)),
            n: Some(n),
        };
        if validate(id, &p).is_ok() {
            return p;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepFailure {
    pub trial: usize,
    pub form: Form,
    pub n: usize,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub id: IdentityId,
    pub trials: usize,
    pub seed: u64,
    pub failures: Vec<SweepFailure>,
}

/// Evaluates `trials` random draws with `n <= max_n`.
pub fn sweep(id: IdentityId, trials: usize, seed: u64, max_n: usize) -> Result<SweepSummary, IdentityError> {
    let mut rng = rng(seed);
    let mut failures = Vec::new();
    for trial in 0..trials {
        let p = random_params(id, &mut rng, max_n);
        let out = eval_identity(id, &p)?;
        if !out.equal {
            failures.push(SweepFailure {
                trial,
                form: p.form,
                n: p.a.len(),
                lhs: out.lhs.to_string(),
                rhs: out.rhs.to_string(),
            });
        }
    }
    Ok(SweepSummary {
        id,
        trials,
        seed,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::integer;

    fn params(a: &[i64], y: i64) -> IdentityParams {
        IdentityParams {
            a: a.iter().map(|&x| integer(x)).collect(),
            y: integer(y),
            ..Default::default()
        }
    }

    #[test]
    fn worked_cases() {
        let out = eval_identity(IdentityId::Pte, &params(&[1, 2], 3)).unwrap();
        assert_eq!((out.lhs, out.rhs), (integer(4), integer(4)));

        let p = IdentityParams { form: Form::Power(1), ..params(&[1, 2], 0) };
        let out = eval_identity(IdentityId::Simplex, &p).unwrap();
        assert_eq!((out.lhs, out.rhs), (integer(-1), integer(-1)));

        let p = IdentityParams { form: Form::Power(3), n: Some(3), ..Default::default() };
        let out = eval_identity(IdentityId::Binomial, &p).unwrap();
        assert_eq!((out.lhs, out.rhs), (integer(-6), integer(-6)));

        let out = eval_identity(IdentityId::Isosceles, &params(&[1, 2], 0)).unwrap();
        assert_eq!((out.lhs, out.rhs), (rational(1, 2), rational(1, 2)));

        let p = IdentityParams { b: vec![integer(5)], ..params(&[3], 7) };
        let out = eval_identity(IdentityId::Hyperprism, &p).unwrap();
        assert_eq!(out.lhs, integer(30));
        assert!(out.equal);
    }

    #[test]
    fn level_one_is_simplex() {
        let base = params(&[2, -3, 5], 4);
        let lvl = eval_identity(IdentityId::Level, &IdentityParams { l: Some(1), ..base.clone() }).unwrap();
        let smp = eval_identity(IdentityId::Simplex, &base).unwrap();
        assert_eq!(lvl.lhs, smp.lhs);
        assert!(lvl.equal);
    }

    #[test]
    fn level_zero_exponent_forms_differ() {
        let base = IdentityParams { l: Some(2), ..params(&[2, -3, 5], 0) };
        let power = eval_identity(IdentityId::Level, &IdentityParams { form: Form::Power(0), ..base.clone() }).unwrap();
        let set = eval_identity(IdentityId::Level, &IdentityParams { form: Form::SetPower(0), ..base }).unwrap();
        assert_eq!((power.lhs, set.lhs), (integer(-1), integer(0)));
    }

    #[test]
    fn preconditions() {
        let err = eval_identity(IdentityId::Simplex, &params(&[1, 1], 0)).unwrap_err();
        assert!(err.to_string().contains("a_2 - a_1"));
        assert!(matches!(
            eval_identity(IdentityId::Isosceles, &params(&[2, -2], 0)),
            Err(IdentityError::PreconditionViolated(_))
        ));
        assert!(matches!(
            eval_identity(IdentityId::OnePlaneSplit, &IdentityParams { form: Form::Power(1), ..params(&[1], 0) }),
            Err(IdentityError::UnsupportedForm { .. })
        ));
        assert!("nope".parse::<IdentityId>().is_err());
        assert_eq!("one_plane_split".parse::<IdentityId>().unwrap(), IdentityId::OnePlaneSplit);
    }

    #[test]
    fn short_sweeps() {
        for id in IdentityId::ALL {
            let s = sweep(id, 40, 11, 6).unwrap();
            assert!(s.failures.is_empty(), "{id}: {:?}", s.failures);
        }
    }
}
