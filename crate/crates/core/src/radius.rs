//! Dynamics of the radius r = |x − x₀|_p.
//!
//! Off the two boundary radii α and β the norm of f(x) − x₀ depends only on
//! r, which gives three piecewise maps on powers of p (one per regime). On a
//! boundary radius the image norm depends on the point, and only a one-sided
//! bound is known; those values are carried as [`RadiusResult::Indeterminate`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::map::{DynamicsProfile, MapParams, Regime, CERTIFIED_PRECISION};
use crate::map::CertifiedOrbit;
use crate::padic::{PadicNumber, Radius};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RadiusMapSpec {
    pub regime: Regime,
    pub alpha: Radius,
    pub beta: Radius,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadiusResult {
    Determined { radius: Radius },
    Indeterminate { lower: Option<Radius>, upper: Option<Radius> },
}

impl RadiusResult {
    fn determined(radius: Radius) -> Self {
        RadiusResult::Determined { radius }
    }

    pub fn radius(&self) -> Option<Radius> {
        match self {
            RadiusResult::Determined { radius } => Some(*radius),
            RadiusResult::Indeterminate { .. } => None,
        }
    }

    /// Whether a concrete norm is consistent with this result.
    pub fn admits(&self, r: Radius) -> bool {
        match *self {
            RadiusResult::Determined { radius } => radius == r,
            RadiusResult::Indeterminate { lower, upper } => {
                lower.is_none_or(|lo| r >= lo) && upper.is_none_or(|hi| r <= hi)
            }
        }
    }
}

impl RadiusMapSpec {
    pub fn new(alpha: Radius, beta: Radius) -> Self {
        Self { regime: Regime::of(alpha, beta), alpha, beta }
    }

    pub fn of(profile: &DynamicsProfile) -> Self {
        Self::new(profile.alpha, profile.beta)
    }

    /// One step of the radius map.
    pub fn step(&self, r: Radius) -> Result<RadiusResult> {
        if r.is_zero() {
            return Err(Error::ZeroRadius);
        }
        let (alpha, beta) = (self.alpha, self.beta);
        let scaled = || r.times(alpha).over(beta);
        let out = match self.regime {
            Regime::AlphaLess => {
                if r < alpha {
                    RadiusResult::determined(scaled())
                } else if r == alpha {
                    RadiusResult::Indeterminate { lower: None, upper: Some(alpha.times(alpha).over(beta)) }
                } else if r < beta {
                    RadiusResult::determined(r.times(r).over(beta))
                } else if r == beta {
                    RadiusResult::Indeterminate { lower: Some(beta), upper: None }
                } else {
                    RadiusResult::determined(r)
                }
            }
            Regime::AlphaGreater => {
                if r < beta {
                    RadiusResult::determined(scaled())
                } else if r == beta {
                    RadiusResult::Indeterminate { lower: Some(alpha), upper: None }
                } else if r < alpha {
                    RadiusResult::determined(alpha)
                } else if r == alpha {
                    RadiusResult::Indeterminate { lower: None, upper: Some(alpha) }
                } else {
                    RadiusResult::determined(r)
                }
            }
            Regime::AlphaEqual => {
                if r == alpha {
                    RadiusResult::Indeterminate { lower: None, upper: None }
                } else {
                    RadiusResult::determined(r)
                }
            }
        };
        Ok(out)
    }

    /// Up to `n` iterates, ending early (inclusive) at the first
    /// indeterminate value.
    pub fn iterate(&self, r: Radius, n: usize) -> Result<Vec<RadiusResult>> {
        let mut out = Vec::with_capacity(n);
        let mut cur = r;
        for _ in 0..n {
            let next = self.step(cur)?;
            out.push(next);
            match next.radius() {
                Some(radius) => cur = radius,
                None => break,
            }
        }
        Ok(out)
    }

    /// Human-readable branch table for reports.
    pub fn branch_table(&self) -> Vec<BranchRow> {
        let row = |domain: String, image: &str, indeterminate: bool| BranchRow {
            domain,
            image: image.to_string(),
            indeterminate,
        };
        let exp = |r: Radius| r.to_string();
        let (a, b) = (exp(self.alpha), exp(self.beta));
        match self.regime {
            Regime::AlphaLess => {
                let mut rows = Vec::new();
                if !self.alpha.is_zero() {
                    rows.push(row(format!("l < {a}"), "l + alpha - beta", false));
                    rows.push(row(format!("l = {a}"), "<= 2*alpha - beta", true));
                }
                rows.push(row(format!("{a} < l < {b}"), "2l - beta", false));
                rows.push(row(format!("l = {b}"), ">= beta", true));
                rows.push(row(format!("l > {b}"), "l", false));
                rows
            }
            Regime::AlphaGreater => vec![
                row(format!("l < {b}"), "l + alpha - beta", false),
                row(format!("l = {b}"), ">= alpha", true),
                row(format!("{b} < l < {a}"), "alpha", false),
                row(format!("l = {a}"), "<= alpha", true),
                row(format!("l > {a}"), "l", false),
            ],
            Regime::AlphaEqual => vec![
                row(format!("l != {a}"), "l", false),
                row(format!("l = {a}"), "unbounded", true),
            ],
        }
    }
}

/// One line of the radius-map table, in exponent form (r = p^l).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchRow {
    pub domain: String,
    pub image: String,
    pub indeterminate: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadiusCheckStep {
    pub step: usize,
    pub predicted: RadiusResult,
    pub actual: Radius,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadiusCheckOutcome {
    pub steps: Vec<RadiusCheckStep>,
    pub boundary_hits: usize,
    /// The orbit landed exactly on x₀ and stays there.
    pub reached_fixed_point: bool,
}

impl RadiusCheckOutcome {
    pub fn holds(&self) -> bool {
        self.steps.iter().all(|s| s.ok)
    }
}

/// Compares |f^k(x) − x₀|_p with the radius-map iterates for k = 1..=n.
///
/// A boundary radius only bounds the next norm; the check then requires the
/// exact norm to respect the bound and continues from that exact norm.
pub fn radius_orbit_check(params: &MapParams, x: &PadicNumber, n: usize) -> Result<RadiusCheckOutcome> {
    if x.prime() != params.prime() {
        return Err(Error::PrimeMismatch { left: params.prime(), right: x.prime() });
    }
    let spec = RadiusMapSpec::of(&params.profile());
    let mut orbit = CertifiedOrbit::new(params, x.value(), CERTIFIED_PRECISION);
    let mut current = orbit.displacement.norm();
    if current.is_zero() {
        return Err(Error::AtFixedPoint);
    }
    let mut outcome = RadiusCheckOutcome { steps: Vec::with_capacity(n), boundary_hits: 0, reached_fixed_point: false };
    for step in 1..=n {
        let predicted = spec.step(current)?;
        let actual = orbit.advance()?.norm();
        if matches!(predicted, RadiusResult::Indeterminate { .. }) {
            outcome.boundary_hits += 1;
        }
        outcome.steps.push(RadiusCheckStep { step, predicted, actual, ok: predicted.admits(actual) });
        if actual.is_zero() {
            outcome.reached_fixed_point = true;
            break;
        }
        current = actual;
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::pow_rational;

    fn det(e: i64) -> RadiusResult {
        RadiusResult::Determined { radius: Radius::Power(e) }
    }

    #[test]
    fn step_examples() {
        let greater = RadiusMapSpec::new(Radius::Power(0), Radius::Power(-1));
        assert_eq!(greater.regime, Regime::AlphaGreater);
        assert_eq!(greater.step(Radius::Power(1)).unwrap(), det(1));

        let less = RadiusMapSpec::new(Radius::Power(-1), Radius::Power(0));
        assert_eq!(
            less.step(Radius::Power(-1)).unwrap(),
            RadiusResult::Indeterminate { lower: None, upper: Some(Radius::Power(-2)) }
        );

        let equal = RadiusMapSpec::new(Radius::Power(2), Radius::Power(2));
        for e in [-3, 0, 1, 3, 9] {
            assert_eq!(equal.step(Radius::Power(e)).unwrap(), det(e));
        }
        assert_eq!(
            equal.step(Radius::Power(2)).unwrap(),
            RadiusResult::Indeterminate { lower: None, upper: None }
        );
        assert_eq!(equal.step(Radius::Zero), Err(Error::ZeroRadius));
    }

    #[test]
    fn every_branch() {
        // α = p^-2, β = p^1
        let less = RadiusMapSpec::new(Radius::Power(-2), Radius::Power(1));
        assert_eq!(less.step(Radius::Power(-4)).unwrap(), det(-7));
        assert_eq!(less.step(Radius::Power(0)).unwrap(), det(-1));
        assert_eq!(
            less.step(Radius::Power(1)).unwrap(),
            RadiusResult::Indeterminate { lower: Some(Radius::Power(1)), upper: None }
        );
        assert_eq!(less.step(Radius::Power(5)).unwrap(), det(5));

        // α = p^3, β = p^-1
        let greater = RadiusMapSpec::new(Radius::Power(3), Radius::Power(-1));
        assert_eq!(greater.step(Radius::Power(-3)).unwrap(), det(1));
        assert_eq!(
            greater.step(Radius::Power(-1)).unwrap(),
            RadiusResult::Indeterminate { lower: Some(Radius::Power(3)), upper: None }
        );
        assert_eq!(greater.step(Radius::Power(2)).unwrap(), det(3));
        assert_eq!(
            greater.step(Radius::Power(3)).unwrap(),
            RadiusResult::Indeterminate { lower: None, upper: Some(Radius::Power(3)) }
        );
        assert_eq!(greater.step(Radius::Power(4)).unwrap(), det(4));

        // α = 0: the r < α branch is empty
        let zero = RadiusMapSpec::new(Radius::Zero, Radius::Power(0));
        assert_eq!(zero.step(Radius::Power(-3)).unwrap(), det(-6));
    }

    #[test]
    fn iterate_examples() {
        let less = RadiusMapSpec::new(Radius::Power(-1), Radius::Power(2));
        assert_eq!(less.iterate(Radius::Power(3), 4).unwrap(), vec![det(3); 4]);
        // 1 → 0 → −2 → −3 (r < α now) → −6
        assert_eq!(
            less.iterate(Radius::Power(1), 4).unwrap(),
            vec![det(0), det(-2), det(-5), det(-8)]
        );
        let greater = RadiusMapSpec::new(Radius::Power(1), Radius::Power(-1));
        let seq = greater.iterate(Radius::Power(-7), 6).unwrap();
        assert_eq!(seq[..3], [det(-5), det(-3), det(-1)]);
        assert_eq!(seq[3], RadiusResult::Indeterminate { lower: Some(Radius::Power(1)), upper: None });
        assert_eq!(seq.len(), 4);
    }

    #[test]
    fn radius_check_on_invariant_sphere() {
        let m = MapParams::from_ints(2, 0, 1, 1).unwrap();
        let x = PadicNumber::from_rational(pow_rational(2, -3) + pow_rational(2, 0), 2).unwrap();
        let out = radius_orbit_check(&m, &x, 20).unwrap();
        assert!(out.holds());
        assert!(out.steps.iter().all(|s| s.actual == Radius::Power(3)));
    }

    #[test]
    fn radius_check_in_basin() {
        let m = MapParams::from_ints(2, 1, 1, 0).unwrap();
        let x = PadicNumber::from_int(1, 2).unwrap();
        let out = radius_orbit_check(&m, &x, 20).unwrap();
        assert!(out.holds());
        assert_eq!(out.steps.len(), 20);
        assert!(out.steps.windows(2).all(|w| w[1].actual < w[0].actual));
    }

    #[test]
    fn radius_check_boundary_beta() {
        // a=1,b=1,c=0: x₀ = −1, α = 0, β = 1. Points with |x + 1|₂ = 1 sit on
        // the β boundary; their image norms are only bounded below by β.
        let m = MapParams::from_ints(2, 1, 1, 0).unwrap();
        for (n, d) in [(2, 1), (4, 3), (-8, 5), (6, 7)] {
            let x = PadicNumber::new(n, d, 2).unwrap();
            let out = radius_orbit_check(&m, &x, 6).unwrap();
            assert!(out.boundary_hits >= 1);
            assert!(out.steps[0].actual >= Radius::Power(0));
            assert!(out.holds(), "{out:?}");
        }
    }

    #[test]
    fn radius_check_reaches_fixed_point() {
        // x = −a maps straight to x₀.
        let m = MapParams::from_ints(3, 2, 5, -4).unwrap();
        let x = m.a().neg();
        let out = radius_orbit_check(&m, &x, 5).unwrap();
        assert!(out.reached_fixed_point);
        assert!(out.holds());
    }
}
