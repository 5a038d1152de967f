//! Ergodicity of f on invariant spheres.
//!
//! Two independent routes are kept side by side:
//!
//! * the theoretical verdict ([`classify`]): non-ergodicity for p ≥ 3 from a
//!   small invariant ball, and for p = 2 the criterion "ergodic iff α ≠ β and
//!   r = 2·max{α, β}";
//! * an empirical oracle: the conjugated map h on S₁(0) is an isometry, so its
//!   reduction modulo pⁿ is a well-defined permutation of the units, and
//!   ergodicity is equivalent to that permutation being a single cycle at
//!   every level.
//!
//! [`verdict`] runs both and flags any disagreement.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::map::{ConjugatedMap, DynamicsProfile, MapParams, Regime};
use crate::padic::{pow_rational, PadicNumber, Radius};
use crate::ratfun::RationalFunction;
use crate::sphere::{self, MeasureValue};

/// Levels whose modulus exceeds this are not enumerated.
pub const MAX_RESIDUE_MODULUS: u64 = 1 << 22;

pub const DEFAULT_MAX_LEVEL: u32 = 12;

/// Ball points checked when a witness ball is exhibited.
const WITNESS_POINTS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Theory {
    Ergodic,
    NotErgodic,
    PaperSilent,
}

/// Which case of the theory produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rule {
    /// p = 2, the iff-criterion.
    #[serde(rename = "erg2-iff")]
    Erg2Iff,
    /// p ≥ 3, α ≠ β.
    #[serde(rename = "p3-I1")]
    P3OuterSpheres,
    /// p ≥ 3, α = β and |a − c| < β.
    #[serde(rename = "p3-I2-small-gap")]
    P3SmallGap,
    /// p ≥ 3, α = β, |a − c| = β and r > β.
    #[serde(rename = "p3-I2-outer")]
    P3GapOuter,
    /// p ≥ 3, α = β, |a − c| = β and r < β: no conclusion.
    #[serde(rename = "paper-silent")]
    Silent,
}

impl Rule {
    pub fn tag(self) -> &'static str {
        match self {
            Rule::Erg2Iff => "erg2-iff",
            Rule::P3OuterSpheres => "p3-I1",
            Rule::P3SmallGap => "p3-I2-small-gap",
            Rule::P3GapOuter => "p3-I2-outer",
            Rule::Silent => "paper-silent",
        }
    }
}

/// Theoretical verdict for the sphere S_{p^l}(x₀).
pub fn classify(profile: &DynamicsProfile, params: &MapParams, l: i64) -> Result<(Theory, Rule)> {
    if !profile.invariant_radii().contains(l) {
        return Err(Error::NotInvariantRadius { exp: l });
    }
    if profile.prime() == 2 {
        let ergodic = profile.regime != Regime::AlphaEqual && l == profile.max_exp() + 1;
        let theory = if ergodic { Theory::Ergodic } else { Theory::NotErgodic };
        return Ok((theory, Rule::Erg2Iff));
    }
    if profile.regime != Regime::AlphaEqual {
        return Ok((Theory::NotErgodic, Rule::P3OuterSpheres));
    }
    let gap = params.gap_norm();
    Ok(if gap < profile.beta {
        (Theory::NotErgodic, Rule::P3SmallGap)
    } else if l > profile.beta_exp() {
        (Theory::NotErgodic, Rule::P3GapOuter)
    } else {
        (Theory::PaperSilent, Rule::Silent)
    })
}

/// Coefficient sums of a numerator/denominator pair, reduced mod 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Mod4Inputs {
    /// numerator, odd powers
    pub a1: u8,
    /// numerator, even powers
    pub a2: u8,
    /// denominator, odd powers
    pub b1: u8,
    /// denominator, even powers
    pub b2: u8,
}

const MOD4_PATTERNS: [(u8, u8, u8, u8); 4] = [(1, 2, 0, 1), (3, 2, 0, 3), (1, 0, 2, 1), (3, 0, 2, 3)];

impl Mod4Inputs {
    pub fn of(f: &RationalFunction) -> Result<Self> {
        if let Some(c) = f.non_integral_coefficient(2) {
            return Err(Error::NonIntegralCoefficient(c));
        }
        let sum = |coeffs: &[BigRational], parity: usize| -> u8 {
            let residues = coeffs.iter().skip(parity).step_by(2).map(|c| reduce(c, 4));
            (residues.sum::<u64>() % 4) as u8
        };
        Ok(Self {
            a1: sum(&f.numerator, 1),
            a2: sum(&f.numerator, 0),
            b1: sum(&f.denominator, 1),
            b2: sum(&f.denominator, 0),
        })
    }

    /// Numerator and denominator interchanged.
    pub fn swapped(self) -> Self {
        Self { a1: self.b1, a2: self.b2, b1: self.a1, b2: self.a2 }
    }

    fn matches_listed_pattern(self) -> bool {
        MOD4_PATTERNS.contains(&(self.a1, self.a2, self.b1, self.b2))
    }

    pub fn is_ergodic(self) -> bool {
        self.matches_listed_pattern() || self.swapped().matches_listed_pattern()
    }
}

/// Mod-4 criterion for R = f/g with f, g mapping 1 + 2Z₂ into itself.
pub fn mod4_criterion(f: &RationalFunction) -> Result<bool> {
    let inputs = Mod4Inputs::of(f)?;
    // f and g send odd t to odd values iff f(1) and g(1) are odd.
    if (inputs.a1 + inputs.a2) % 2 == 0 || (inputs.b1 + inputs.b2) % 2 == 0 {
        return Err(Error::DomainViolation("numerator and denominator must map 1+2Z_2 into itself".into()));
    }
    Ok(inputs.is_ergodic())
}

/// x mod m for a rational with unit denominator mod m.
fn reduce(x: &BigRational, m: u64) -> u64 {
    let mb = BigInt::from(m);
    let n = x.numer().mod_floor(&mb).to_u64().unwrap();
    let d = x.denom().mod_floor(&mb).to_u64().unwrap();
    mul_mod(n, inv_mod(d, m).expect("unit denominator"), m)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let g = (a as i128).extended_gcd(&(m as i128));
    (g.gcd == 1).then(|| g.x.rem_euclid(m as i128) as u64)
}

fn poly_mod(coeffs: &[u64], t: u64, m: u64) -> u64 {
    coeffs.iter().rev().fold(0, |acc, &c| (mul_mod(acc, t, m) + c) % m)
}

/// A bijection of the units modulo pⁿ induced by a map of S₁(0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueSphereMap {
    pub prime: u32,
    pub level: u32,
    pub modulus: u64,
    /// Units mod pⁿ in increasing order.
    pub domain: Vec<u64>,
    /// `image[i]` is the index in `domain` of the image of `domain[i]`.
    pub image: Vec<u32>,
}

/// Index of a unit u among the units below pⁿ: u − ⌈u/p⌉.
fn unit_index(u: u64, p: u64) -> usize {
    (u - u.div_ceil(p)) as usize
}

/// pⁿ, or `LevelTooLarge` past [`MAX_RESIDUE_MODULUS`].
pub fn modulus_for(p: u32, level: u32) -> Result<u64> {
    let too_large = Error::LevelTooLarge { prime: p, level };
    let m = (p as u64).checked_pow(level).ok_or(too_large.clone())?;
    if m > MAX_RESIDUE_MODULUS || level == 0 {
        return Err(too_large);
    }
    Ok(m)
}

/// Highest level enumerable for p, capped at `wanted`.
pub fn max_enumerable_level(p: u32, wanted: u32) -> u32 {
    (1..=wanted).take_while(|&n| modulus_for(p, n).is_ok()).last().unwrap_or(0)
}

impl ResidueSphereMap {
    /// Reduces a rational function with p-adic integer coefficients.
    pub fn from_rational_function(p: u32, level: u32, f: &RationalFunction) -> Result<Self> {
        if let Some(c) = f.non_integral_coefficient(p) {
            return Err(Error::NonIntegralCoefficient(c));
        }
        let m = modulus_for(p, level)?;
        let pm = p as u64;
        let num: Vec<u64> = f.numerator.iter().map(|c| reduce(c, m)).collect();
        let den: Vec<u64> = f.denominator.iter().map(|c| reduce(c, m)).collect();
        let domain: Vec<u64> = (1..m).filter(|u| u % pm != 0).collect();
        let mut image = Vec::with_capacity(domain.len());
        let mut hit = vec![false; domain.len()];
        let mut bijective = true;
        for &t in &domain {
            let d = poly_mod(&den, t, m);
            let inv = inv_mod(d, m).ok_or(Error::NonUnitDenominator { residue: t, modulus: m })?;
            let v = mul_mod(poly_mod(&num, t, m), inv, m);
            if v.is_multiple_of(pm) {
                return Err(Error::DomainViolation(format!("{t} maps to non-unit {v} mod {m}")));
            }
            let idx = unit_index(v, pm);
            bijective &= !std::mem::replace(&mut hit[idx], true);
            image.push(idx as u32);
        }
        if !bijective {
            return Err(Error::NotBijective { modulus: m });
        }
        Ok(Self { prime: p, level, modulus: m, domain, image })
    }

    /// The conjugated map at level n, in its p-adic integral form.
    pub fn from_conjugated(conj: &ConjugatedMap, level: u32) -> Result<Self> {
        Self::from_rational_function(conj.prime, level, &conj.integral_form())
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn apply(&self, t: u64) -> u64 {
        self.domain[self.image[unit_index(t, self.prime as u64)] as usize]
    }

    /// Cycle lengths, in order of each cycle's smallest element.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut lengths = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                len += 1;
                i = self.image[i] as usize;
            }
            lengths.push(len);
        }
        lengths
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LevelResult {
    pub level: u32,
    pub domain_size: usize,
    pub cycle_count: usize,
    pub transitive: bool,
}

pub fn transitivity_check(map: &ResidueSphereMap) -> LevelResult {
    let cycle_count = map.cycle_lengths().len();
    LevelResult { level: map.level, domain_size: map.len(), cycle_count, transitive: cycle_count == 1 }
}

/// Transitivity of an arbitrary rational function on 1+2Z₂ (or the units
/// of Z_p) at levels 1..=max_level. A non-bijective reduction counts as
/// intransitive.
pub fn transitive_up_to(p: u32, f: &RationalFunction, max_level: u32) -> Result<bool> {
    for level in 1..=max_level {
        match ResidueSphereMap::from_rational_function(p, level, f) {
            Ok(map) if transitivity_check(&map).transitive => {}
            Ok(_) | Err(Error::NotBijective { .. }) => return Ok(false),
            Err(e) => return Err(e),
        }
    }
    Ok(true)
}

/// An invariant ball of measure < 1, which rules out ergodicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessBall {
    pub center: PadicNumber,
    pub rho: Radius,
    pub measure: MeasureValue,
    pub points_checked: usize,
    pub escapes: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErgodicityVerdict {
    pub exponent: i64,
    pub theoretical: Theory,
    pub rule: Rule,
    pub levels: Vec<LevelResult>,
    pub witness: Option<WitnessBall>,
    /// Measure of U_{ρ(r)}(s) even when it is not a witness.
    pub minimal_ball_measure: MeasureValue,
    pub disagreement: Option<String>,
}

/// Theory plus empirical evidence for S_{p^l}(x₀).
///
/// Levels 2..=max_level are enumerated (fewer if pⁿ would exceed
/// [`MAX_RESIDUE_MODULUS`]).
pub fn verdict(params: &MapParams, l: i64, max_level: u32) -> Result<ErgodicityVerdict> {
    let profile = params.profile();
    let (theoretical, rule) = classify(&profile, params, l)?;
    let p = params.prime();
    let conj = params.conjugate_to_unit_sphere(l)?;

    let top = max_enumerable_level(p, max_level);
    let mut levels = Vec::new();
    for n in 2..=top {
        levels.push(transitivity_check(&ResidueSphereMap::from_conjugated(&conj, n)?));
    }

    // Witness ball around s = x₀ + p^{-l}, i.e. t = 1 on the unit sphere.
    let s = PadicNumber::from_parts(profile.fixed_point.value() + pow_rational(p, -l), p);
    let rho = sphere::rho(&profile, params, l)?;
    let rho_exp = rho.exponent().expect("rho is positive on invariant spheres");
    let measure = sphere::normalized_measure_of_ball(p as u64, rho_exp, l)?;
    let witness = if measure.value < BigRational::from_integer(1.into()) && !measure.value.is_zero() {
        let ball = sphere::minimal_invariant_ball(&profile, params, &s, l)?;
        let points = sphere::deterministic_ball_points(&s, rho_exp, WITNESS_POINTS);
        let escapes = sphere::ball_escapes(params, &ball, &points)?;
        Some(WitnessBall { center: s, rho, measure: measure.clone(), points_checked: points.len(), escapes })
    } else {
        None
    };

    let mut problems = Vec::new();
    if let Some(pos) = levels.windows(2).position(|w| !w[0].transitive && w[1].transitive) {
        problems.push(format!("level {} intransitive but level {} transitive", levels[pos].level, levels[pos + 1].level));
    }
    match theoretical {
        Theory::Ergodic => {
            if let Some(bad) = levels.iter().find(|r| !r.transitive) {
                problems.push(format!("ergodic by theory but level {} has {} cycles", bad.level, bad.cycle_count));
            }
            if witness.is_some() {
                problems.push("ergodic by theory but an invariant ball of measure < 1 exists".into());
            }
        }
        Theory::NotErgodic => {
            if witness.is_none() && levels.iter().all(|r| r.transitive) {
                problems.push(format!("not ergodic by theory but transitive up to level {top} with no witness ball"));
            }
        }
        Theory::PaperSilent => {}
    }
    if let Some(w) = &witness {
        if w.escapes > 0 {
            problems.push(format!("{} of {} witness-ball points escape", w.escapes, w.points_checked));
        }
    }

    Ok(ErgodicityVerdict {
        exponent: l,
        theoretical,
        rule,
        levels,
        witness,
        minimal_ball_measure: measure,
        disagreement: (!problems.is_empty()).then(|| problems.join("; ")),
    })
}
