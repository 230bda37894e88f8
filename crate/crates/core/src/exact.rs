//! Exact scalars and reals used throughout the crate.
//!
//! Coefficients are complex numbers with rational parts whenever the
//! algebra allows it and fall back to `f64` only when a transcendental
//! phase enters. Reals of the form `q + p·π` with rational `q`, `p` are
//! tracked exactly so that phases `e^{iλt}` can be decided exactly.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Floating coefficients below this modulus are treated as zero.
pub const FLOAT_ZERO: f64 = 1e-15;

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Exact dyadic rational equal to a finite `f64`.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Parses `p/q`, integers and decimals such as `-1.25e-3` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = parse_decimal(n).ok_or_else(|| Error::InvalidNumber(s.to_string()))?;
        let d = parse_decimal(d).ok_or_else(|| Error::InvalidNumber(s.to_string()))?;
        if d.is_zero() {
            return Err(Error::InvalidNumber(s.to_string()));
        }
        return Ok(n / d);
    }
    parse_decimal(t).ok_or_else(|| Error::InvalidNumber(s.to_string()))
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    if exponent.abs() > 1000 {
        return None;
    }
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{whole}{frac}");
    let mut value = Rational::from_integer(all.parse::<BigInt>().ok()?);
    let shift = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    match shift.cmp(&0) {
        Ordering::Greater => value *= Rational::from_integer(num_traits::pow(ten, shift as usize)),
        Ordering::Less => value /= Rational::from_integer(num_traits::pow(ten, (-shift) as usize)),
        Ordering::Equal => {}
    }
    Some(if negative { -value } else { value })
}

/// `p` or `p/q` in lowest terms.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Shortest round-trip decimal of a float, always containing `.` or `e`.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

fn looks_like_float(s: &str) -> bool {
    !s.contains('/') && s.contains(['.', 'e', 'E', 'n', 'N', 'i'])
}

fn rational_gcd(a: &Rational, b: &Rational) -> Rational {
    Rational::new(a.numer().gcd(b.numer()), a.denom().lcm(b.denom()))
}

/// gcd of numerators over lcm of denominators: the generator of the
/// subgroup of Q spanned by `values`.
pub fn rational_gcd_all<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values
        .into_iter()
        .filter(|q| !q.is_zero())
        .fold(Rational::zero(), |acc, q| {
            if acc.is_zero() {
                q.abs()
            } else {
                rational_gcd(&acc, q)
            }
        })
}

/// Complex number with exact rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QComplex {
    pub re: Rational,
    pub im: Rational,
}

impl QComplex {
    pub fn new(re: Rational, im: Rational) -> Self {
        QComplex { re, im }
    }

    pub fn real(re: Rational) -> Self {
        QComplex { re, im: Rational::zero() }
    }

    pub fn zero() -> Self {
        Self::real(Rational::zero())
    }

    pub fn one() -> Self {
        Self::real(Rational::one())
    }

    pub fn i() -> Self {
        QComplex::new(Rational::zero(), Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        QComplex::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }

    pub fn scale(&self, q: &Rational) -> Self {
        QComplex::new(&self.re * q, &self.im * q)
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        Some(QComplex::new(&self.re / &n, -&self.im / &n))
    }
}

impl Add for &QComplex {
    type Output = QComplex;
    fn add(self, o: &QComplex) -> QComplex {
        QComplex::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Sub for &QComplex {
    type Output = QComplex;
    fn sub(self, o: &QComplex) -> QComplex {
        QComplex::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Mul for &QComplex {
    type Output = QComplex;
    fn mul(self, o: &QComplex) -> QComplex {
        QComplex::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Neg for &QComplex {
    type Output = QComplex;
    fn neg(self) -> QComplex {
        QComplex::new(-self.re.clone(), -self.im.clone())
    }
}

/// A coefficient: exact rational complex, or floating complex once a
/// transcendental phase has entered.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(QComplex),
    Float(Complex64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(QComplex::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(QComplex::one())
    }

    pub fn i() -> Self {
        Scalar::Exact(QComplex::i())
    }

    pub fn rational(q: Rational) -> Self {
        Scalar::Exact(QComplex::real(q))
    }

    pub fn int(n: i64) -> Self {
        Self::rational(int(n))
    }

    pub fn float(re: f64, im: f64) -> Self {
        Scalar::Float(Complex64::new(re, im))
    }

    /// `e^{2πi·turns}`, exact when the angle is a multiple of a quarter turn.
    pub fn unit(turns: &Turns) -> Self {
        match turns {
            Turns::Exact(q) => {
                let quarter = q * int(4);
                if quarter.is_integer() {
                    let k = quarter.to_integer().mod_floor(&BigInt::from(4));
                    let z = match k.to_u8().unwrap_or(0) {
                        0 => QComplex::one(),
                        1 => QComplex::i(),
                        2 => QComplex::real(int(-1)),
                        _ => QComplex::new(Rational::zero(), int(-1)),
                    };
                    Scalar::Exact(z)
                } else {
                    let a = 2.0 * PI * to_f64(q);
                    Scalar::float(a.cos(), a.sin())
                }
            }
            Turns::Float(x) => {
                let a = 2.0 * PI * x;
                Scalar::float(a.cos(), a.sin())
            }
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&QComplex> {
        match self {
            Scalar::Exact(z) => Some(z),
            Scalar::Float(_) => None,
        }
    }

    /// Canonical-form zero test: exact zero, or float modulus below [`FLOAT_ZERO`].
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(z) => z.is_zero(),
            Scalar::Float(z) => z.norm() < FLOAT_ZERO,
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            Scalar::Exact(z) => z.to_c64(),
            Scalar::Float(z) => *z,
        }
    }

    pub fn abs(&self) -> f64 {
        self.to_c64().norm()
    }

    pub fn conj(&self) -> Self {
        match self {
            Scalar::Exact(z) => Scalar::Exact(z.conj()),
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => (self.to_c64() - other.to_c64()).norm() <= tol,
        }
    }

    /// `|self - other|`, exactly zero when both sides are equal exact values.
    pub fn distance(&self, other: &Scalar) -> f64 {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => (a - b).to_c64().norm(),
            _ => (self.to_c64() - other.to_c64()).norm(),
        }
    }

    /// Parses a pair of `rational-or-decimal` strings. Strings with a decimal
    /// point or exponent are floats, `p/q` and integers are exact.
    pub fn parse_parts(re: &str, im: &str) -> Result<Self> {
        if looks_like_float(re) || looks_like_float(im) {
            let p = |s: &str| -> Result<f64> {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidNumber(s.to_string()))
            };
            Ok(Scalar::float(p(re)?, p(im)?))
        } else {
            Ok(Scalar::Exact(QComplex::new(
                parse_rational(re)?,
                parse_rational(im)?,
            )))
        }
    }

    pub fn format_parts(&self) -> (String, String) {
        match self {
            Scalar::Exact(z) => (format_rational(&z.re), format_rational(&z.im)),
            Scalar::Float(z) => (format_float(z.re), format_float(z.im)),
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        match self {
            Scalar::Exact(z) => Scalar::Exact(z.scale(q)),
            Scalar::Float(z) => Scalar::Float(z * to_f64(q)),
        }
    }
}

impl From<QComplex> for Scalar {
    fn from(z: QComplex) -> Self {
        Scalar::Exact(z)
    }
}

impl From<Complex64> for Scalar {
    fn from(z: Complex64) -> Self {
        Scalar::Float(z)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.format_parts();
        write!(f, "({re}, {im})")
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for &Scalar {
            type Output = Scalar;
            fn $method(self, o: &Scalar) -> Scalar {
                match (self, o) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.$method(b)),
                    _ => Scalar::Float(self.to_c64().$method(o.to_c64())),
                }
            }
        }
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, o: Scalar) -> Scalar {
                (&self).$method(&o)
            }
        }
    };
}

scalar_binop!(Add, add);
scalar_binop!(Sub, sub);

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a * b),
            // an exact zero stays exact
            (Scalar::Exact(z), _) | (_, Scalar::Exact(z)) if z.is_zero() => Scalar::zero(),
            _ => Scalar::Float(self.to_c64() * o.to_c64()),
        }
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        &self * &o
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(z) => Scalar::Exact(-z),
            Scalar::Float(z) => Scalar::Float(-z),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// The real number `rational + pi·π`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PiLinear {
    pub rational: Rational,
    pub pi: Rational,
}

impl PiLinear {
    pub fn new(rational: Rational, pi: Rational) -> Self {
        PiLinear { rational, pi }
    }

    pub fn zero() -> Self {
        PiLinear::new(Rational::zero(), Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.pi.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.rational) + PI * to_f64(&self.pi)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        PiLinear::new(&self.rational * k, &self.pi * k)
    }

    /// Exact sign (π is irrational, so `q + pπ = 0` only when `q = p = 0`).
    pub fn signum(&self) -> Ordering {
        if self.pi.is_zero() {
            return self.rational.cmp(&Rational::zero());
        }
        // q + pπ has the sign of p·(π − r) with r = −q/p
        let r = -(&self.rational / &self.pi);
        let (lo, hi) = pi_bounds();
        let vs_pi = if r < lo {
            Ordering::Greater
        } else if r > hi {
            Ordering::Less
        } else {
            PI.partial_cmp(&to_f64(&r)).unwrap_or(Ordering::Equal)
        };
        if self.pi.is_positive() {
            vs_pi
        } else {
            vs_pi.reverse()
        }
    }
}

const PI_DIGITS: &str = "3.1415926535897932384626433832795028841971693993751";

fn pi_bounds() -> (Rational, Rational) {
    let mid = parse_rational(PI_DIGITS).expect("valid constant");
    let eps = Rational::new(BigInt::one(), BigInt::from(10).pow(48));
    (&mid - &eps, &mid + &eps)
}

impl Add for &PiLinear {
    type Output = PiLinear;
    fn add(self, o: &PiLinear) -> PiLinear {
        PiLinear::new(&self.rational + &o.rational, &self.pi + &o.pi)
    }
}

impl fmt::Display for PiLinear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rational.is_zero(), self.pi.is_zero()) {
            (_, true) => write!(f, "{}", format_rational(&self.rational)),
            (true, false) => write!(f, "{}*pi", format_rational(&self.pi)),
            (false, false) if self.pi.is_negative() => write!(
                f,
                "{}-{}*pi",
                format_rational(&self.rational),
                format_rational(&-&self.pi)
            ),
            (false, false) => write!(
                f,
                "{}+{}*pi",
                format_rational(&self.rational),
                format_rational(&self.pi)
            ),
        }
    }
}

/// A real parameter (shift, position). `Exact` values of the form `q + p·π`
/// keep phase computations exact; `Float` values are handled numerically.
#[derive(Clone, Debug, PartialEq)]
pub enum Real {
    Exact(PiLinear),
    Float(f64),
}

impl Real {
    pub fn zero() -> Self {
        Real::Exact(PiLinear::zero())
    }

    pub fn rational(q: Rational) -> Self {
        Real::Exact(PiLinear::new(q, Rational::zero()))
    }

    pub fn int(n: i64) -> Self {
        Real::rational(int(n))
    }

    pub fn pi_multiple(q: Rational) -> Self {
        Real::Exact(PiLinear::new(Rational::zero(), q))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(p) => p.to_f64(),
            Real::Float(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&PiLinear> {
        match self {
            Real::Exact(p) => Some(p),
            Real::Float(_) => None,
        }
    }

    /// Exact rational value, if the number is rational (floats are dyadic).
    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            Real::Exact(p) if p.pi.is_zero() => Some(p.rational.clone()),
            Real::Exact(_) => None,
            Real::Float(x) => from_f64(*x),
        }
    }

    fn as_pi_linear(&self) -> Option<PiLinear> {
        match self {
            Real::Exact(p) => Some(p.clone()),
            Real::Float(x) => from_f64(*x).map(|q| PiLinear::new(q, Rational::zero())),
        }
    }

    /// Sum computed without rounding whenever both sides are representable
    /// (floats enter as their exact dyadic values).
    pub fn add(&self, other: &Real) -> Real {
        match (self.as_pi_linear(), other.as_pi_linear()) {
            (Some(a), Some(b)) => Real::Exact(&a + &b),
            _ => Real::Float(self.to_f64() + other.to_f64()),
        }
    }

    pub fn neg(&self) -> Real {
        match self {
            Real::Exact(p) => Real::Exact(p.scale(&int(-1))),
            Real::Float(x) => Real::Float(-x),
        }
    }

    pub fn sub(&self, other: &Real) -> Real {
        self.add(&other.neg())
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Real::Exact(p) => p.is_zero(),
            Real::Float(x) => *x == 0.0,
        }
    }

    /// Total order, exact whenever the difference is representable.
    pub fn cmp_real(&self, other: &Real) -> Ordering {
        match self.sub(other) {
            Real::Exact(d) => d.signum(),
            Real::Float(d) => d.partial_cmp(&0.0).unwrap_or(Ordering::Equal),
        }
    }

    /// Parses rationals/decimals (`1`, `-3/2`, `0.25`) exactly and multiples
    /// of π such as `pi`, `2pi`, `-pi/3`, `3/4*pi`, `2*pi/5`.
    pub fn parse(s: &str) -> Result<Real> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::InvalidNumber(s.to_string());
        if let Some(pos) = t.find("pi") {
            // optional rational part before the π term: `q+p*pi`, `q-p*pi`
            let bytes = t.as_bytes();
            let split = (1..pos).rev().find(|&i| {
                matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E' | b'*' | b'/')
            });
            if let Some(i) = split {
                let q = parse_rational(&t[..i]).map_err(|_| bad())?;
                let rest = Real::parse(&t[i..])?;
                return Ok(Real::rational(q).add(&rest));
            }
            let prefix = t[..pos].trim_end_matches('*');
            let suffix = &t[pos + 2..];
            let coeff = match prefix {
                "" | "+" => Rational::one(),
                "-" => int(-1),
                p => parse_rational(p).map_err(|_| bad())?,
            };
            let coeff = if suffix.is_empty() {
                coeff
            } else {
                let d = suffix.strip_prefix('/').ok_or_else(bad)?;
                let d = parse_rational(d).map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                coeff / d
            };
            return Ok(Real::pi_multiple(coeff));
        }
        let q = parse_rational(&t).map_err(|_| bad())?;
        Ok(Real::rational(q))
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real::Float(x)
    }
}

impl From<i64> for Real {
    fn from(n: i64) -> Self {
        Real::int(n)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(p) => write!(f, "{p}"),
            Real::Float(x) => write!(f, "{}", format_float(*x)),
        }
    }
}

/// An angle measured in full turns, normalized to `[0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Turns {
    Exact(Rational),
    Float(f64),
}

impl Turns {
    pub fn zero() -> Self {
        Turns::Exact(Rational::zero())
    }

    pub fn exact(q: Rational) -> Self {
        let f = &q - q.floor();
        Turns::Exact(f)
    }

    pub fn float(x: f64) -> Self {
        let r = x.rem_euclid(1.0);
        Turns::Float(if r >= 1.0 { 0.0 } else { r })
    }

    /// Angle in radians of a float, as turns.
    pub fn from_radians(theta: f64) -> Self {
        Turns::float(theta / (2.0 * PI))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Turns::Exact(q) => to_f64(q),
            Turns::Float(x) => *x,
        }
    }

    pub fn radians(&self) -> f64 {
        2.0 * PI * self.to_f64()
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Turns::Exact(_))
    }

    pub fn add(&self, other: &Turns) -> Turns {
        match (self, other) {
            (Turns::Exact(a), Turns::Exact(b)) => Turns::exact(a + b),
            _ => Turns::float(self.to_f64() + other.to_f64()),
        }
    }

    pub fn neg(&self) -> Turns {
        match self {
            Turns::Exact(q) => Turns::exact(-q.clone()),
            Turns::Float(x) => Turns::float(-x),
        }
    }

    pub fn scale(&self, n: i64) -> Turns {
        match self {
            Turns::Exact(q) => Turns::exact(q * int(n)),
            Turns::Float(x) => Turns::float(x * n as f64),
        }
    }

    /// Circular distance in turns, in `[0, 1/2]`.
    pub fn distance(&self, other: &Turns) -> f64 {
        let d = self.add(&other.neg()).to_f64();
        d.min(1.0 - d)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Turns::Exact(q) => q.is_zero(),
            Turns::Float(x) => *x == 0.0,
        }
    }

    pub fn parse(s: &str) -> Result<Turns> {
        if looks_like_float(s) {
            let x: f64 = s
                .trim()
                .parse()
                .map_err(|_| Error::InvalidNumber(s.to_string()))?;
            if !x.is_finite() {
                return Err(Error::InvalidNumber(s.to_string()));
            }
            Ok(Turns::float(x))
        } else {
            Ok(Turns::exact(parse_rational(s)?))
        }
    }

    pub fn format(&self) -> String {
        match self {
            Turns::Exact(q) => format_rational(q),
            Turns::Float(x) => format_float(*x),
        }
    }
}

/// Classification of `λt / 2π` for a frequency `λ` and a real `t`.
#[derive(Clone, Debug, PartialEq)]
pub enum PhaseClass {
    /// Exactly this rational.
    Rational(Rational),
    /// Provably irrational (π is transcendental); approximate value attached.
    Irrational(f64),
    /// Not decidable exactly; approximate value only.
    Approx(f64),
}

impl PhaseClass {
    /// `λ = lambda_exact` (if known) with float value `lambda`, times `t`, over `2π`.
    pub fn of(lambda_exact: Option<&PiLinear>, lambda: f64, t: &Real) -> PhaseClass {
        let approx = || lambda * t.to_f64() / (2.0 * PI);
        match (lambda_exact, t.exact()) {
            (Some(l), Some(s)) => {
                let ac = &l.rational * &s.rational;
                let bd = &l.pi * &s.pi;
                if ac.is_zero() && bd.is_zero() {
                    let q = (&l.rational * &s.pi + &l.pi * &s.rational) / int(2);
                    PhaseClass::Rational(q)
                } else {
                    PhaseClass::Irrational(approx())
                }
            }
            _ => PhaseClass::Approx(approx()),
        }
    }

    pub fn turns(&self) -> Turns {
        match self {
            PhaseClass::Rational(q) => Turns::exact(q.clone()),
            PhaseClass::Irrational(x) | PhaseClass::Approx(x) => Turns::float(*x),
        }
    }

    /// `e^{iλt}`.
    pub fn unit(&self) -> Scalar {
        Scalar::unit(&self.turns())
    }

    /// `|e^{iλt} - 1| = 2|sin(λt/2)|`, exactly zero for integer turns.
    pub fn chord(&self) -> f64 {
        match self {
            PhaseClass::Rational(q) if q.is_integer() => 0.0,
            _ => 2.0 * (PI * self.turns().to_f64()).sin().abs(),
        }
    }

    /// Whether `λt ∈ 2πℤ`; decided exactly where possible and otherwise to
    /// within `tol` turns.
    pub fn is_full_turn(&self, tol: f64) -> bool {
        match self {
            PhaseClass::Rational(q) => q.is_integer(),
            PhaseClass::Irrational(_) => false,
            PhaseClass::Approx(x) => (x - x.round()).abs() <= tol,
        }
    }

    pub fn is_exact_decision(&self) -> bool {
        !matches!(self, PhaseClass::Approx(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals_and_decimals() {
        assert_eq!(parse_rational("3/4").unwrap(), rational(3, 4));
        assert_eq!(parse_rational("-0.25").unwrap(), rational(-1, 4));
        assert_eq!(parse_rational("1.5e2").unwrap(), int(150));
        assert_eq!(parse_rational("2E-1").unwrap(), rational(1, 5));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn quarter_turn_units_are_exact() {
        assert_eq!(Scalar::unit(&Turns::exact(rational(1, 4))), Scalar::i());
        assert_eq!(Scalar::unit(&Turns::exact(rational(-1, 2))), Scalar::int(-1));
        assert!(!Scalar::unit(&Turns::exact(rational(1, 3))).is_exact());
    }

    #[test]
    fn parses_pi_multiples() {
        assert_eq!(Real::parse("2pi").unwrap(), Real::pi_multiple(int(2)));
        assert_eq!(Real::parse("-pi/3").unwrap(), Real::pi_multiple(rational(-1, 3)));
        assert_eq!(Real::parse("3/4*pi").unwrap(), Real::pi_multiple(rational(3, 4)));
        assert_eq!(Real::parse("17.3").unwrap(), Real::rational(rational(173, 10)));
        assert!(Real::parse("pi/0").is_err());
        assert!(Real::parse("2pix").is_err());
    }

    #[test]
    fn phase_classification() {
        let one = PiLinear::new(int(1), int(0));
        // λ = 1, t = 2π: one full turn exactly
        let c = PhaseClass::of(Some(&one), 1.0, &Real::pi_multiple(int(2)));
        assert_eq!(c, PhaseClass::Rational(int(1)));
        assert!(c.is_full_turn(0.0));
        // λ = 1, t = 1: 1/2π is irrational
        let c = PhaseClass::of(Some(&one), 1.0, &Real::int(1));
        assert!(matches!(c, PhaseClass::Irrational(_)));
        assert!(!c.is_full_turn(1.0));
    }

    #[test]
    fn float_sum_is_exact() {
        let a = Real::Float(0.1);
        let b = Real::Float(0.2);
        let s = a.add(&b);
        assert_eq!(
            s.as_rational().unwrap(),
            from_f64(0.1).unwrap() + from_f64(0.2).unwrap()
        );
    }

    #[test]
    fn mixed_reals_print_and_parse() {
        for (src, q, p) in [("-1-1*pi", -1, -1), ("1/2+3*pi", 0, 3), ("2-pi/2", 2, 0)] {
            let r = Real::parse(src).unwrap();
            assert_eq!(Real::parse(&r.to_string()).unwrap(), r, "{src}");
            if q != 0 && p != 0 {
                assert_eq!(r, Real::Exact(PiLinear::new(int(q), int(p))));
            }
        }
        assert_eq!(Real::parse("1e-3").unwrap(), Real::rational(rational(1, 1000)));
    }

    #[test]
    fn pi_linear_ordering() {
        let pi = Real::pi_multiple(int(1));
        assert_eq!(pi.cmp_real(&Real::rational(rational(355, 113))), Ordering::Less);
        assert_eq!(pi.cmp_real(&Real::rational(rational(22, 7))), Ordering::Less);
        assert_eq!(pi.cmp_real(&Real::rational(rational(311, 99))), Ordering::Greater);
        assert_eq!(Real::pi_multiple(int(-2)).cmp_real(&Real::int(-6)), Ordering::Less);
        assert_eq!(pi.cmp_real(&Real::Float(PI)), Ordering::Greater);
        assert_eq!(pi.cmp_real(&pi), Ordering::Equal);
    }
}
