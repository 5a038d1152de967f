//! Exact arithmetic in Q viewed inside Q_p.
//!
//! Every quantity is an exact rational. The p-adic valuation of a reduced
//! fraction n/m is the multiplicity of p in n minus its multiplicity in m,
//! so norms are always exact powers of p and are stored by exponent.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Deterministic trial division; p is small in every use of this crate.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn check_prime(p: u64) -> Result<u32> {
    if is_prime(p) && p <= u32::MAX as u64 {
        Ok(p as u32)
    } else {
        Err(Error::NotPrime(p))
    }
}

/// γ(x): the exponent of p in x, or +∞ for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    PlusInfinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::PlusInfinity => None,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::PlusInfinity) => Ordering::Less,
            (Valuation::PlusInfinity, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::PlusInfinity, Valuation::PlusInfinity) => Ordering::Equal,
        }
    }
}

/// A value of the p-adic norm: zero or p^exponent.
///
/// `Zero` sorts below every power, so the derived ordering is the ordering of
/// the real numbers the radii stand for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Radius {
    Zero,
    Power(i64),
}

impl Radius {
    pub fn exponent(self) -> Option<i64> {
        match self {
            Radius::Zero => None,
            Radius::Power(e) => Some(e),
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, Radius::Zero)
    }

    /// Product of norms: exponents add.
    pub fn times(self, other: Radius) -> Radius {
        match (self, other) {
            (Radius::Power(a), Radius::Power(b)) => Radius::Power(a + b),
            _ => Radius::Zero,
        }
    }

    /// Quotient of norms. Dividing by zero is a caller bug.
    pub fn over(self, other: Radius) -> Radius {
        match (self, other) {
            (_, Radius::Zero) => panic!("radius division by zero"),
            (Radius::Zero, _) => Radius::Zero,
            (Radius::Power(a), Radius::Power(b)) => Radius::Power(a - b),
        }
    }

    pub fn max(self, other: Radius) -> Radius {
        std::cmp::max(self, other)
    }

    /// The real value p^l as an exact rational.
    pub fn to_rational(self, p: u32) -> BigRational {
        match self {
            Radius::Zero => BigRational::zero(),
            Radius::Power(e) => pow_rational(p, e),
        }
    }

    /// `"2^-3"` style rendering, or `"0"`.
    pub fn render(self, p: u32) -> String {
        match self {
            Radius::Zero => "0".to_string(),
            Radius::Power(e) => format!("{p}^{e}"),
        }
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radius::Zero => write!(f, "zero"),
            Radius::Power(e) => write!(f, "{e}"),
        }
    }
}

/// Reports carry radii as their exponent, or the string "zero".
impl Serialize for Radius {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Radius::Zero => s.serialize_str("zero"),
            Radius::Power(e) => s.serialize_i64(*e),
        }
    }
}

/// p^e as an exact rational (e may be negative).
pub fn pow_rational(p: u32, e: i64) -> BigRational {
    let base = BigInt::from(p);
    let mag = num_traits::pow(base, e.unsigned_abs() as usize);
    if e >= 0 {
        BigRational::from_integer(mag)
    } else {
        BigRational::new(BigInt::one(), mag)
    }
}

/// Multiplicity of p in a nonzero integer.
fn multiplicity(n: &BigInt, p: &BigInt) -> i64 {
    let mut n = n.abs();
    let mut count = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return count;
        }
        n = q;
        count += 1;
    }
}

/// γ(x) for a plain rational.
pub fn valuation_of(x: &BigRational, p: u32) -> Valuation {
    if x.is_zero() {
        return Valuation::PlusInfinity;
    }
    let p = BigInt::from(p);
    // BigRational keeps the fraction reduced, so at most one side carries p.
    Valuation::Finite(multiplicity(x.numer(), &p) - multiplicity(x.denom(), &p))
}

/// |x|_p for a plain rational.
pub fn norm_of(x: &BigRational, p: u32) -> Radius {
    match valuation_of(x, p) {
        Valuation::PlusInfinity => Radius::Zero,
        Valuation::Finite(v) => Radius::Power(-v),
    }
}

/// Parses `"num/den"` or a bare integer.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidRational(s.to_string());
    let t = s.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// Canonical `"num/den"` form, reduced with positive denominator.
pub fn format_rational(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// An exact rational number regarded as an element of Q_p.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PadicNumber {
    value: BigRational,
    prime: u32,
}

impl PadicNumber {
    pub fn new(numerator: impl Into<BigInt>, denominator: impl Into<BigInt>, prime: u64) -> Result<Self> {
        let d = denominator.into();
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::from_rational(BigRational::new(numerator.into(), d), prime)
    }

    pub fn from_rational(value: BigRational, prime: u64) -> Result<Self> {
        let prime = check_prime(prime)?;
        Ok(Self { value, prime })
    }

    pub fn from_int(n: i64, prime: u64) -> Result<Self> {
        Self::new(n, 1, prime)
    }

    pub fn parse(s: &str, prime: u64) -> Result<Self> {
        Self::from_rational(parse_rational(s)?, prime)
    }

    /// Skips the primality check; `prime` must already be validated.
    pub(crate) fn from_parts(value: BigRational, prime: u32) -> Self {
        Self { value, prime }
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn numerator(&self) -> &BigInt {
        self.value.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.value.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn valuation(&self) -> Valuation {
        valuation_of(&self.value, self.prime)
    }

    pub fn norm(&self) -> Radius {
        norm_of(&self.value, self.prime)
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.prime == other.prime {
            Ok(())
        } else {
            Err(Error::PrimeMismatch { left: self.prime, right: other.prime })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(Self::from_parts(&self.value + &other.value, self.prime))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(Self::from_parts(&self.value - &other.value, self.prime))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(Self::from_parts(&self.value * &other.value, self.prime))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::from_parts(&self.value / &other.value, self.prime))
    }

    pub fn neg(&self) -> Self {
        Self::from_parts(-&self.value, self.prime)
    }

    /// |self - other|_p
    pub fn distance(&self, other: &Self) -> Result<Radius> {
        Ok(self.sub(other)?.norm())
    }

    pub fn in_ball(&self, ball: &BallSpec) -> Result<bool> {
        Ok(self.distance(&ball.center)? <= ball.radius)
    }

    pub fn in_sphere(&self, sphere: &SphereSpec) -> Result<bool> {
        Ok(self.distance(&sphere.center)? == sphere.radius())
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.value))
    }
}

/// Closed ball U_r(a) = { x : |x - a|_p <= r }.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallSpec {
    pub center: PadicNumber,
    pub radius: Radius,
}

impl BallSpec {
    pub fn new(center: PadicNumber, radius: Radius) -> Self {
        Self { center, radius }
    }

    pub fn contains(&self, x: &PadicNumber) -> Result<bool> {
        x.in_ball(self)
    }
}

/// Sphere S_r(a) = { x : |x - a|_p = r } with r = p^exponent.
///
/// Only positive radii are representable; S_0(a) would be a single point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereSpec {
    pub center: PadicNumber,
    pub exponent: i64,
}

impl SphereSpec {
    pub fn new(center: PadicNumber, exponent: i64) -> Self {
        Self { center, exponent }
    }

    pub fn radius(&self) -> Radius {
        Radius::Power(self.exponent)
    }

    pub fn contains(&self, x: &PadicNumber) -> Result<bool> {
        x.in_sphere(self)
    }
}
