//! The (2,1)-rational map f(x) = (x² + ax + b)/(x + c) on Q_p.
//!
//! With the unique fixed point x₀ = b/(c − a) the map factors as
//!
//! ```text
//! f(x) − x₀ = (x − x₀)(x + a)/(x + c)
//! ```
//!
//! so the orbit is driven by the two constants x₀ + a and x₀ + c, whose norms
//! are α and β.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::approx::PadicApprox;
use crate::error::{Error, Result};
use crate::padic::{check_prime, norm_of, pow_rational, PadicNumber, Radius};
use crate::ratfun::RationalFunction;
use crate::sphere::InvariantRadiusSet;

/// Default bound on exact orbit length.
pub const DEFAULT_ORBIT_CAP: usize = 30;

/// Exact orbits stop once numerator plus denominator exceed this many bits.
pub const EXACT_HEIGHT_LIMIT_BITS: u64 = 1 << 16;

/// Significant digits carried by certified long orbits.
pub const CERTIFIED_PRECISION: u32 = 256;

/// Certified orbits keep the exact rational alongside the digits while it
/// stays below this height, so exact hits of x₀ or −c are decided exactly.
const SHADOW_HEIGHT_BITS: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    AlphaLess,
    AlphaEqual,
    AlphaGreater,
}

impl Regime {
    pub fn of(alpha: Radius, beta: Radius) -> Self {
        match alpha.cmp(&beta) {
            std::cmp::Ordering::Less => Regime::AlphaLess,
            std::cmp::Ordering::Equal => Regime::AlphaEqual,
            std::cmp::Ordering::Greater => Regime::AlphaGreater,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::AlphaLess => "alpha_less",
            Regime::AlphaEqual => "alpha_equal",
            Regime::AlphaGreater => "alpha_greater",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointClass {
    Attractive,
    Indifferent,
    Repelling,
}

impl FixedPointClass {
    pub fn of(lambda_norm: Radius) -> Self {
        match lambda_norm {
            Radius::Zero => FixedPointClass::Attractive,
            Radius::Power(e) if e < 0 => FixedPointClass::Attractive,
            Radius::Power(0) => FixedPointClass::Indifferent,
            Radius::Power(_) => FixedPointClass::Repelling,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FixedPointClass::Attractive => "attractive",
            FixedPointClass::Indifferent => "indifferent",
            FixedPointClass::Repelling => "repelling",
        }
    }
}

/// Coefficients (a, b, c) over a fixed prime, validated at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapParams {
    prime: u32,
    a: BigRational,
    b: BigRational,
    c: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicsProfile {
    pub fixed_point: PadicNumber,
    /// |x₀ + a|_p
    pub alpha: Radius,
    /// |x₀ + c|_p, always positive.
    pub beta: Radius,
    pub regime: Regime,
    /// f′(x₀) = (x₀ + a)/(x₀ + c).
    pub lambda: PadicNumber,
    pub lambda_norm: Radius,
    pub fixed_point_class: FixedPointClass,
}

impl DynamicsProfile {
    pub fn prime(&self) -> u32 {
        self.fixed_point.prime()
    }

    pub fn beta_exp(&self) -> i64 {
        self.beta.exponent().expect("beta is positive")
    }

    /// Exponent of max{α, β}.
    pub fn max_exp(&self) -> i64 {
        self.alpha.max(self.beta).exponent().expect("beta is positive")
    }

    pub fn invariant_radii(&self) -> InvariantRadiusSet {
        InvariantRadiusSet::of(self)
    }
}

impl MapParams {
    pub fn new(a: PadicNumber, b: PadicNumber, c: PadicNumber) -> Result<Self> {
        for other in [&b, &c] {
            if other.prime() != a.prime() {
                return Err(Error::PrimeMismatch { left: a.prime(), right: other.prime() });
            }
        }
        Self::from_rationals(a.prime() as u64, a.value().clone(), b.value().clone(), c.value().clone())
    }

    pub fn from_rationals(p: u64, a: BigRational, b: BigRational, c: BigRational) -> Result<Self> {
        let prime = check_prime(p)?;
        if a == c {
            return Err(Error::EqualCoefficients);
        }
        if (&c * &c - &a * &c + &b).is_zero() {
            return Err(Error::DegenerateMap);
        }
        Ok(Self { prime, a, b, c })
    }

    pub fn from_ints(p: u64, a: i64, b: i64, c: i64) -> Result<Self> {
        let q = |n: i64| BigRational::from_integer(BigInt::from(n));
        Self::from_rationals(p, q(a), q(b), q(c))
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    fn lift(&self, x: &BigRational) -> PadicNumber {
        PadicNumber::from_parts(x.clone(), self.prime)
    }

    pub fn a(&self) -> PadicNumber {
        self.lift(&self.a)
    }

    pub fn b(&self) -> PadicNumber {
        self.lift(&self.b)
    }

    pub fn c(&self) -> PadicNumber {
        self.lift(&self.c)
    }

    /// The pole x̂ = −c.
    pub fn pole(&self) -> PadicNumber {
        self.lift(&-&self.c)
    }

    /// |a − c|_p
    pub fn gap_norm(&self) -> Radius {
        norm_of(&(&self.a - &self.c), self.prime)
    }

    pub(crate) fn fixed_point_rational(&self) -> BigRational {
        &self.b / (&self.c - &self.a)
    }

    /// (x₀ + a, x₀ + c)
    pub(crate) fn shifts(&self) -> (BigRational, BigRational) {
        let x0 = self.fixed_point_rational();
        (&x0 + &self.a, &x0 + &self.c)
    }

    pub(crate) fn eval_rational(&self, x: &BigRational) -> Option<BigRational> {
        let den = x + &self.c;
        if den.is_zero() {
            return None;
        }
        Some((x * x + &self.a * x + &self.b) / den)
    }

    fn check_prime_of(&self, x: &PadicNumber) -> Result<()> {
        if x.prime() == self.prime {
            Ok(())
        } else {
            Err(Error::PrimeMismatch { left: self.prime, right: x.prime() })
        }
    }

    pub fn evaluate(&self, x: &PadicNumber) -> Result<PadicNumber> {
        self.check_prime_of(x)?;
        self.eval_rational(x.value())
            .map(|v| self.lift(&v))
            .ok_or(Error::PoleHit { step: 0 })
    }

    pub fn fixed_point(&self) -> PadicNumber {
        let x0 = self.fixed_point_rational();
        assert!(x0 != -&self.c, "{}", Error::FixedPointIsPole);
        self.lift(&x0)
    }

    pub fn profile(&self) -> DynamicsProfile {
        let fixed_point = self.fixed_point();
        let (shift_a, shift_c) = self.shifts();
        let alpha = norm_of(&shift_a, self.prime);
        let beta = norm_of(&shift_c, self.prime);
        debug_assert!(!beta.is_zero());
        let lambda = self.lift(&(&shift_a / &shift_c));
        let lambda_norm = lambda.norm();
        DynamicsProfile {
            fixed_point,
            alpha,
            beta,
            regime: Regime::of(alpha, beta),
            lambda,
            lambda_norm,
            fixed_point_class: FixedPointClass::of(lambda_norm),
        }
    }

    /// |f(x) − x₀|_p, computed directly and checked against the factored
    /// form |x − x₀|·|(x − x₀) + (x₀ + a)| / |(x − x₀) + (x₀ + c)|.
    pub fn displacement_from_fixed_point(&self, x: &PadicNumber) -> Result<Radius> {
        let (direct, factored) = self.displacement_both_ways(x)?;
        assert_eq!(direct, factored, "displacement identity failed at x = {x}");
        Ok(direct)
    }

    /// (direct, factored) evaluations of |f(x) − x₀|_p.
    pub fn displacement_both_ways(&self, x: &PadicNumber) -> Result<(Radius, Radius)> {
        self.check_prime_of(x)?;
        let x0 = self.fixed_point_rational();
        let d = x.value() - &x0;
        if d.is_zero() {
            return Err(Error::AtFixedPoint);
        }
        let fx = self.eval_rational(x.value()).ok_or(Error::PoleHit { step: 0 })?;
        let direct = norm_of(&(fx - &x0), self.prime);
        let (shift_a, shift_c) = self.shifts();
        let p = self.prime;
        let factored = norm_of(&d, p)
            .times(norm_of(&(&d + shift_a), p))
            .over(norm_of(&(&d + shift_c), p));
        Ok((direct, factored))
    }

    /// g⁻¹ ∘ f ∘ g with g(t) = p^{-l} t + x₀, transporting S_{p^l}(x₀) to S₁(0).
    pub fn conjugate_to_unit_sphere(&self, l: i64) -> Result<ConjugatedMap> {
        let profile = self.profile();
        if !profile.invariant_radii().contains(l) {
            return Err(Error::NotInvariantRadius { exp: l });
        }
        let scale = pow_rational(self.prime, l);
        let (shift_a, shift_c) = self.shifts();
        Ok(ConjugatedMap {
            prime: self.prime,
            exponent: l,
            numerator_linear: &scale * shift_a,
            denominator_constant: scale * shift_c,
            alpha_equal: profile.regime == Regime::AlphaEqual,
            below_beta: l < profile.beta_exp(),
        })
    }

    pub fn orbit_iter(&self, start: &PadicNumber) -> Result<OrbitIter<'_>> {
        self.check_prime_of(start)?;
        Ok(OrbitIter { params: self, next: Some(start.value().clone()), step: 0 })
    }

    /// x, f(x), …, fⁿ(x) exactly, with the default cap.
    pub fn orbit(&self, start: &PadicNumber, n: usize) -> Result<Vec<PadicNumber>> {
        self.orbit_capped(start, n, DEFAULT_ORBIT_CAP)
    }

    pub fn orbit_capped(&self, start: &PadicNumber, n: usize, cap: usize) -> Result<Vec<PadicNumber>> {
        if n > cap {
            return Err(Error::OrbitTooLong { requested: n, cap });
        }
        self.orbit_iter(start)?.take(n + 1).collect()
    }

    /// Certified displacements f^k(x) − x₀ for k = 0..=n.
    pub fn certified_displacements(&self, start: &PadicNumber, n: usize) -> Result<Vec<PadicApprox>> {
        self.check_prime_of(start)?;
        let mut orbit = CertifiedOrbit::new(self, start.value(), CERTIFIED_PRECISION);
        let mut out = Vec::with_capacity(n + 1);
        out.push(orbit.displacement.clone());
        for _ in 0..n {
            out.push(orbit.advance()?);
        }
        Ok(out)
    }
}

fn height_bits(x: &BigRational) -> u64 {
    x.numer().bits() + x.denom().bits()
}

/// Exact orbit. Yields `Err(PoleHit)` when the current point is −c (the
/// point itself is not yielded), and `Err(HeightLimit)` when the exact
/// rational outgrows [`EXACT_HEIGHT_LIMIT_BITS`]; iteration ends after an error.
pub struct OrbitIter<'a> {
    params: &'a MapParams,
    next: Option<BigRational>,
    step: usize,
}

impl Iterator for OrbitIter<'_> {
    type Item = Result<PadicNumber>;

    fn next(&mut self) -> Option<Self::Item> {
        let x = self.next.take()?;
        let step = self.step;
        if x == -&self.params.c {
            return Some(Err(Error::PoleHit { step }));
        }
        if height_bits(&x) > EXACT_HEIGHT_LIMIT_BITS {
            return Some(Err(Error::HeightLimit { step }));
        }
        self.next = self.params.eval_rational(&x);
        self.step += 1;
        Some(Ok(self.params.lift(&x)))
    }
}

/// Orbit of the displacement d = x − x₀ under d ↦ d(d + x₀ + a)/(d + x₀ + c),
/// with exact shadow values for as long as they stay small.
pub(crate) struct CertifiedOrbit<'a> {
    params: &'a MapParams,
    shift_a: PadicApprox,
    shift_c: PadicApprox,
    exact: Option<BigRational>,
    pub(crate) displacement: PadicApprox,
    prec: u32,
    step: usize,
}

impl<'a> CertifiedOrbit<'a> {
    pub(crate) fn new(params: &'a MapParams, start: &BigRational, prec: u32) -> Self {
        let p = params.prime;
        let (sa, sc) = params.shifts();
        let x0 = params.fixed_point_rational();
        Self {
            params,
            shift_a: PadicApprox::from_rational(&sa, p, prec),
            shift_c: PadicApprox::from_rational(&sc, p, prec),
            exact: Some(start.clone()),
            displacement: PadicApprox::from_rational(&(start - x0), p, prec),
            prec,
            step: 0,
        }
    }

    pub(crate) fn advance(&mut self) -> Result<PadicApprox> {
        let step = self.step;
        if let Some(x) = self.exact.take() {
            let fx = self.params.eval_rational(&x).ok_or(Error::PoleHit { step })?;
            let d = &fx - self.params.fixed_point_rational();
            self.displacement = PadicApprox::from_rational(&d, self.params.prime, self.prec);
            if height_bits(&fx) <= SHADOW_HEIGHT_BITS {
                self.exact = Some(fx);
            }
        } else {
            let lost = || Error::PrecisionExhausted { step };
            let d = &self.displacement;
            let num = d.add(&self.shift_a).map_err(|_| lost())?;
            let den = d.add(&self.shift_c).map_err(|_| lost())?;
            self.displacement = d.mul(&num).div(&den).ok_or_else(lost)?;
        }
        self.step += 1;
        Ok(self.displacement.clone())
    }
}

/// The conjugated map h(t) = (t² + p^l(x₀+a)·t)/(t + p^l(x₀+c)) on S₁(0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugatedMap {
    pub prime: u32,
    pub exponent: i64,
    /// p^l(x₀ + a)
    pub numerator_linear: BigRational,
    /// p^l(x₀ + c)
    pub denominator_constant: BigRational,
    alpha_equal: bool,
    below_beta: bool,
}

impl ConjugatedMap {
    /// Coefficients in the direct form: numerator [0, p^l(x₀+a), 1],
    /// denominator [p^l(x₀+c), 1].
    pub fn direct_form(&self) -> RationalFunction {
        RationalFunction::new(
            vec![BigRational::zero(), self.numerator_linear.clone(), BigRational::one()],
            vec![self.denominator_constant.clone(), BigRational::one()],
        )
    }

    /// True when the rescaled form (numerator and denominator divided by
    /// p^l(x₀+a)) is needed for p-adic integral coefficients: α = β and l < m.
    pub fn uses_rescaled_form(&self) -> bool {
        self.alpha_equal && self.below_beta
    }

    /// Form with p-adic integer coefficients: the direct form, or
    /// (t²/A + t)/(t/A + C/A) with A = p^l(x₀+a), C = p^l(x₀+c) when
    /// [`uses_rescaled_form`](Self::uses_rescaled_form).
    pub fn integral_form(&self) -> RationalFunction {
        if !self.uses_rescaled_form() {
            return self.direct_form();
        }
        let inv = BigRational::one() / &self.numerator_linear;
        RationalFunction::new(
            vec![BigRational::zero(), BigRational::one(), inv.clone()],
            vec![&self.denominator_constant * &inv, inv],
        )
    }

    pub fn evaluate(&self, t: &PadicNumber) -> Result<PadicNumber> {
        if t.prime() != self.prime {
            return Err(Error::PrimeMismatch { left: self.prime, right: t.prime() });
        }
        self.direct_form()
            .eval(t.value())
            .map(|v| PadicNumber::from_parts(v, self.prime))
            .ok_or(Error::PoleHit { step: 0 })
    }
}
