//! Invariant spheres around the fixed point, the displacement radius ρ(r),
//! minimal invariant balls and the normalized Haar measure on a sphere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::map::{DynamicsProfile, MapParams, Regime, CERTIFIED_PRECISION};
use crate::map::CertifiedOrbit;
use crate::padic::{check_prime, pow_rational, BallSpec, PadicNumber, Radius};
use crate::sampling;

/// The set I of radii p^l whose sphere S_r(x₀) is invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InvariantRadiusSet {
    /// α ≠ β: every l > threshold, threshold = exponent of max{α, β}.
    GreaterThanMax { threshold: i64 },
    /// α = β: every l except the exponent of β.
    AllExceptBeta { beta: i64 },
}

impl InvariantRadiusSet {
    pub fn of(profile: &DynamicsProfile) -> Self {
        match profile.regime {
            Regime::AlphaEqual => InvariantRadiusSet::AllExceptBeta { beta: profile.beta_exp() },
            _ => InvariantRadiusSet::GreaterThanMax { threshold: profile.max_exp() },
        }
    }

    pub fn contains(&self, l: i64) -> bool {
        match *self {
            InvariantRadiusSet::GreaterThanMax { threshold } => l > threshold,
            InvariantRadiusSet::AllExceptBeta { beta } => l != beta,
        }
    }

    /// The exponent every other radius is measured against.
    pub fn pivot(&self) -> i64 {
        match *self {
            InvariantRadiusSet::GreaterThanMax { threshold } => threshold,
            InvariantRadiusSet::AllExceptBeta { beta } => beta,
        }
    }

    /// Default radii to analyse: the five smallest invariant radii above the
    /// pivot, plus the two largest below β when every radius but β is invariant.
    pub fn auto_radii(&self) -> Vec<i64> {
        let above = (1..=5).map(|k| self.pivot() + k);
        match self {
            InvariantRadiusSet::GreaterThanMax { .. } => above.collect(),
            InvariantRadiusSet::AllExceptBeta { beta } => (beta - 2..*beta).chain(above).collect(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            InvariantRadiusSet::GreaterThanMax { threshold } => format!("l > {threshold}"),
            InvariantRadiusSet::AllExceptBeta { beta } => format!("l != {beta}"),
        }
    }
}

fn require_invariant(profile: &DynamicsProfile, l: i64) -> Result<()> {
    if profile.invariant_radii().contains(l) {
        Ok(())
    } else {
        Err(Error::NotInvariantRadius { exp: l })
    }
}

/// ρ(r) = |f(x) − x|_p for any x on the invariant sphere S_{p^l}(x₀):
///
/// ```text
/// |a − c|·r/β    r < β = α
/// |a − c|        r > β = α
/// max{α, β}      α ≠ β (r ∈ I₁)
/// ```
pub fn rho(profile: &DynamicsProfile, params: &MapParams, l: i64) -> Result<Radius> {
    require_invariant(profile, l)?;
    let r = Radius::Power(l);
    Ok(match profile.regime {
        Regime::AlphaEqual if r < profile.beta => params.gap_norm().times(r).over(profile.beta),
        Regime::AlphaEqual => params.gap_norm(),
        _ => profile.alpha.max(profile.beta),
    })
}

/// `rho` plus a pointwise check |f(s) − s|_p = ρ on `samples` random s.
pub fn rho_checked(
    profile: &DynamicsProfile,
    params: &MapParams,
    l: i64,
    rng: &mut impl Rng,
    samples: usize,
) -> Result<std::result::Result<Radius, RhoMismatch>> {
    let expected = rho(profile, params, l)?;
    for _ in 0..samples {
        let s = sampling::point_on_sphere(rng, &profile.fixed_point, l);
        let actual = params.evaluate(&s)?.distance(&s)?;
        if actual != expected {
            return Ok(Err(RhoMismatch { point: s, expected, actual }));
        }
    }
    Ok(Ok(expected))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhoMismatch {
    pub point: PadicNumber,
    pub expected: Radius,
    pub actual: Radius,
}

/// U_{ρ(r)}(s), the smallest invariant ball around s ∈ S_r(x₀).
pub fn minimal_invariant_ball(
    profile: &DynamicsProfile,
    params: &MapParams,
    s: &PadicNumber,
    l: i64,
) -> Result<BallSpec> {
    let radius = rho(profile, params, l)?;
    if s.distance(&profile.fixed_point)? != Radius::Power(l) {
        return Err(Error::NotOnSphere { exp: l });
    }
    Ok(BallSpec::new(s.clone(), radius))
}

/// Counts sampled ball points whose image leaves the ball.
pub fn ball_escapes(params: &MapParams, ball: &BallSpec, points: &[PadicNumber]) -> Result<usize> {
    let mut escapes = 0;
    for x in points {
        if !ball.contains(&params.evaluate(x)?)? {
            escapes += 1;
        }
    }
    Ok(escapes)
}

/// Points of U_{p^e}(center) chosen without randomness: center + p^{-e}·k/(kp + 1).
pub fn deterministic_ball_points(center: &PadicNumber, e: i64, count: usize) -> Vec<PadicNumber> {
    let p = center.prime();
    let scale = pow_rational(p, -e);
    (0..count as i64)
        .map(|k| {
            let w = BigRational::new(BigInt::from(k), BigInt::from(k * p as i64 + 1));
            PadicNumber::from_parts(center.value() + &scale * w, p)
        })
        .collect()
}

/// |f^{k+1}(s) − f^k(s)|_p for k = 0..=n.
pub fn step_displacements(params: &MapParams, s: &PadicNumber, n: usize) -> Result<Vec<Radius>> {
    let mut orbit = CertifiedOrbit::new(params, s.value(), CERTIFIED_PRECISION);
    let mut prev = orbit.displacement.clone();
    let mut out = Vec::with_capacity(n + 1);
    for step in 0..=n {
        let next = orbit.advance()?;
        let diff = next.sub(&prev).map_err(|_| Error::PrecisionExhausted { step })?;
        out.push(diff.norm());
        prev = next;
    }
    Ok(out)
}

/// Every sampled x ∈ S_r(x₀) satisfies |f(x) − x₀| = r.
pub fn sphere_maps_into_itself(
    params: &MapParams,
    l: i64,
    rng: &mut impl Rng,
    samples: usize,
) -> Result<bool> {
    let x0 = params.fixed_point();
    for _ in 0..samples {
        let x = sampling::point_on_sphere(rng, &x0, l);
        match params.evaluate(&x) {
            Ok(fx) if fx.distance(&x0)? == Radius::Power(l) => {}
            Ok(_) | Err(Error::PoleHit { .. }) => return Ok(false),
            Err(e) => return Err(e),
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureBranch {
    /// ρ ≤ r/p: the ball is a proper sub-ball, μ = pρ/((p − 1)r).
    Formula,
    /// ρ ≥ r: the ball contains the whole sphere.
    Clamped,
}

/// Normalized Haar measure of U_ρ(s) inside S_r(x₀).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureValue {
    /// pρ/((p − 1)r) as written, possibly above 1.
    pub raw: BigRational,
    /// min(1, raw), a probability.
    pub value: BigRational,
    pub branch: MeasureBranch,
}

/// Unnormalized Haar measure of S_{p^l}: r(1 − 1/p).
pub fn sphere_haar_measure(p: u32, l: i64) -> BigRational {
    let p_r = BigRational::from_integer(BigInt::from(p));
    pow_rational(p, l) * (BigRational::one() - BigRational::one() / p_r)
}

pub fn normalized_measure_of_ball(p: u64, rho_exp: i64, r_exp: i64) -> Result<MeasureValue> {
    let p = check_prime(p).map_err(|_| Error::InvalidRadiusPair(format!("{p} is not prime")))?;
    let gap = r_exp
        .checked_sub(rho_exp)
        .ok_or_else(|| Error::InvalidRadiusPair(format!("p^{rho_exp} vs p^{r_exp}")))?;
    // μ̄(U_ρ) / μ̄(S_r) = ρ / (r(1 − 1/p))
    let raw = pow_rational(p, rho_exp) / sphere_haar_measure(p, r_exp);
    let (value, branch) = if gap >= 1 {
        (raw.clone(), MeasureBranch::Formula)
    } else {
        (BigRational::one(), MeasureBranch::Clamped)
    };
    Ok(MeasureValue { raw, value, branch })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::rng_from_seed;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn invariant_set_examples() {
        let m = MapParams::from_ints(2, 0, 1, 1).unwrap();
        let set = m.profile().invariant_radii();
        assert_eq!(set, InvariantRadiusSet::GreaterThanMax { threshold: 0 });
        assert!(!set.contains(0) && !set.contains(-1));
        assert!((1..10).all(|l| set.contains(l)));
        // x₀ = 0, x₀ + a = 1, x₀ + c = 5 over Q₂: α = β = 1.
        let m = MapParams::from_ints(2, 1, 0, 5).unwrap();
        let set = m.profile().invariant_radii();
        assert_eq!(set, InvariantRadiusSet::AllExceptBeta { beta: 0 });
        assert!(set.contains(-1) && set.contains(1) && !set.contains(0));
    }

    #[test]
    fn rho_examples() {
        let m = MapParams::from_ints(2, 0, 1, 1).unwrap();
        let prof = m.profile();
        assert_eq!(rho(&prof, &m, 3).unwrap(), Radius::Power(0));
        assert_eq!(rho(&prof, &m, 0), Err(Error::NotInvariantRadius { exp: 0 }));

        // |a − c|₂ = |−4|₂ = 2^-2, β = 1.
        let m = MapParams::from_ints(2, 1, 0, 5).unwrap();
        let prof = m.profile();
        assert_eq!(m.gap_norm(), Radius::Power(-2));
        assert_eq!(rho(&prof, &m, -1).unwrap(), Radius::Power(-3));
        assert_eq!(rho(&prof, &m, 2).unwrap(), Radius::Power(-2));
        // s = x₀ + 2 = 2 on S_{1/2}: f(2) = 6/7, |6/7 − 2|₂ = |−8/7|₂ = 2^-3.
        let s = PadicNumber::from_int(2, 2).unwrap();
        assert_eq!(m.evaluate(&s).unwrap().value(), &q(6, 7));
        assert_eq!(m.evaluate(&s).unwrap().distance(&s).unwrap(), Radius::Power(-3));
    }

    #[test]
    fn rho_matches_pointwise() {
        let mut rng = rng_from_seed(5);
        for (p, a, b, c) in [(2, 0, 1, 1), (2, 1, 0, 5), (3, 1, 0, 10), (5, 7, -3, 2)] {
            let m = MapParams::from_ints(p, a, b, c).unwrap();
            let prof = m.profile();
            for l in prof.invariant_radii().auto_radii() {
                assert!(rho_checked(&prof, &m, l, &mut rng, 25).unwrap().is_ok(), "{p} {a} {b} {c} l={l}");
            }
        }
    }

    #[test]
    fn minimal_ball_golden() {
        let m = MapParams::from_ints(2, 0, 1, 1).unwrap();
        let prof = m.profile();
        let s = PadicNumber::new(5, 4, 2).unwrap();
        let ball = minimal_invariant_ball(&prof, &m, &s, 2).unwrap();
        assert_eq!(ball.radius, Radius::Power(0));
        let fs = m.evaluate(&s).unwrap();
        assert_eq!(fs.value(), &q(41, 36));
        assert!(ball.contains(&fs).unwrap());
        let pts = deterministic_ball_points(&s, 0, 50);
        assert!(pts.iter().all(|x| ball.contains(x).unwrap()));
        assert_eq!(ball_escapes(&m, &ball, &pts).unwrap(), 0);

        let off = PadicNumber::from_int(5, 2).unwrap();
        assert_eq!(minimal_invariant_ball(&prof, &m, &off, 2), Err(Error::NotOnSphere { exp: 2 }));
    }

    #[test]
    fn smaller_balls_are_not_invariant() {
        let m = MapParams::from_ints(2, 0, 1, 1).unwrap();
        let s = PadicNumber::new(5, 4, 2).unwrap();
        let fs = m.evaluate(&s).unwrap();
        for theta in -4..0 {
            assert!(!BallSpec::new(s.clone(), Radius::Power(theta)).contains(&fs).unwrap());
        }
    }

    #[test]
    fn displacement_is_constant_along_orbit() {
        let m = MapParams::from_ints(3, 1, 0, 10).unwrap();
        let prof = m.profile();
        let mut rng = rng_from_seed(9);
        for l in prof.invariant_radii().auto_radii() {
            let s = sampling::point_on_sphere(&mut rng, &prof.fixed_point, l);
            let expected = rho(&prof, &m, l).unwrap();
            assert!(step_displacements(&m, &s, 20).unwrap().iter().all(|&d| d == expected));
        }
    }

    #[test]
    fn measure_examples() {
        assert_eq!(normalized_measure_of_ball(2, 0, 1).unwrap().value, q(1, 1));
        assert_eq!(normalized_measure_of_ball(2, 0, 2).unwrap().value, q(1, 2));
        assert_eq!(normalized_measure_of_ball(3, 0, 1).unwrap().value, q(1, 2));
        let clamped = normalized_measure_of_ball(3, 2, 2).unwrap();
        assert_eq!(clamped.branch, MeasureBranch::Clamped);
        assert_eq!(clamped.raw, q(3, 2));
        assert_eq!(clamped.value, q(1, 1));
        assert!(normalized_measure_of_ball(4, 0, 1).is_err());
        assert_eq!(sphere_haar_measure(3, 2), q(6, 1));
    }

    #[test]
    fn invariance_oracle() {
        let mut rng = rng_from_seed(1);
        let m = MapParams::from_ints(3, 1, 1, 0).unwrap();
        let prof = m.profile();
        assert_eq!(prof.regime, Regime::AlphaLess);
        let set = prof.invariant_radii();
        for l in set.auto_radii() {
            assert!(sphere_maps_into_itself(&m, l, &mut rng, 100).unwrap());
        }
        // Inside the basin the sphere is pulled inward.
        assert!(!sphere_maps_into_itself(&m, -1, &mut rng, 100).unwrap());
    }
}
