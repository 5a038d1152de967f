//! Property suites that check every structural claim about f on one map.
//!
//! Each suite draws its own seeded random stream, so results depend only on
//! (map, radii, seed, sample counts) and not on suite order.

use rand::Rng;
use serde::Serialize;

use crate::ergodicity::{self, Mod4Inputs, Theory};
use crate::error::{Error, Result};
use crate::map::{DynamicsProfile, MapParams, Regime};
use crate::padic::{BallSpec, PadicNumber, Radius};
use crate::radius::radius_orbit_check;
use crate::sampling::{self, rng_from_seed, SampleRng};
use crate::sphere;

/// Source of ρ(r) values under test; swapped out for fault injection.
pub type RhoFn = fn(&DynamicsProfile, &MapParams, i64) -> Result<Radius>;

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random points per suite.
    pub points: usize,
    /// Orbit length for the long-orbit suites.
    pub orbit_steps: usize,
    pub max_level: u32,
    /// Invariant radius exponents to exercise.
    pub radii: Vec<i64>,
    pub rho: RhoFn,
}

impl VerifyOptions {
    pub fn new(seed: u64, radii: Vec<i64>) -> Self {
        Self {
            seed,
            points: 50,
            orbit_steps: 20,
            max_level: ergodicity::DEFAULT_MAX_LEVEL,
            radii,
            rho: sphere::rho,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub passed: usize,
    /// First few failures, for diagnostics.
    pub failures: Vec<String>,
}

impl SuiteResult {
    fn new(name: &'static str) -> Self {
        Self { name, cases: 0, passed: 0, failures: Vec::new() }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if ok {
            self.passed += 1;
        } else if self.failures.len() < 5 {
            self.failures.push(detail());
        }
    }

    pub fn ok(&self) -> bool {
        self.passed == self.cases
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifySummary {
    pub suites: Vec<SuiteResult>,
}

impl VerifySummary {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::ok)
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.name == name)
    }
}

fn suite_rng(seed: u64, index: u64) -> SampleRng {
    rng_from_seed(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Exponents near α and β, where all the case splits happen.
fn exponent_window(profile: &DynamicsProfile) -> (i64, i64) {
    let beta = profile.beta_exp();
    let low = profile.alpha.exponent().map_or(beta, |a| a.min(beta));
    (low - 3, profile.max_exp() + 3)
}

fn random_point(rng: &mut SampleRng, profile: &DynamicsProfile, skip: &[Option<i64>]) -> (i64, PadicNumber) {
    let (lo, hi) = exponent_window(profile);
    loop {
        let l = rng.gen_range(lo..=hi);
        if skip.contains(&Some(l)) {
            continue;
        }
        return (l, sampling::point_on_sphere(rng, &profile.fixed_point, l));
    }
}

pub fn run(params: &MapParams, opts: &VerifyOptions) -> Result<VerifySummary> {
    let profile = params.profile();
    let set = profile.invariant_radii();
    if let Some(&bad) = opts.radii.iter().find(|&&l| !set.contains(l)) {
        return Err(Error::NotInvariantRadius { exp: bad });
    }
    let suites = vec![
        displacement_identity(params, &profile, opts, &mut suite_rng(opts.seed, 1))?,
        radius_map(params, &profile, opts, &mut suite_rng(opts.seed, 2))?,
        invariance(params, &profile, opts, &mut suite_rng(opts.seed, 3))?,
        isometry(params, &profile, opts, &mut suite_rng(opts.seed, 4))?,
        rho_table(params, &profile, opts, &mut suite_rng(opts.seed, 5))?,
        minimal_balls(params, &profile, opts, &mut suite_rng(opts.seed, 6))?,
        ergodicity_agreement(params, &profile, opts)?,
    ];
    Ok(VerifySummary { suites })
}

fn displacement_identity(
    params: &MapParams,
    profile: &DynamicsProfile,
    opts: &VerifyOptions,
    rng: &mut SampleRng,
) -> Result<SuiteResult> {
    let mut out = SuiteResult::new("displacement-identity");
    let pole = params.pole();
    for _ in 0..opts.points {
        let (_, x) = random_point(rng, profile, &[]);
        if x == pole {
            continue;
        }
        let (direct, factored) = params.displacement_both_ways(&x)?;
        out.record(direct == factored, || format!("x={x}: direct {direct}, factored {factored}"));
    }
    Ok(out)
}

fn radius_map(
    params: &MapParams,
    profile: &DynamicsProfile,
    opts: &VerifyOptions,
    rng: &mut SampleRng,
) -> Result<SuiteResult> {
    let mut out = SuiteResult::new("radius-map");
    let boundaries = [profile.alpha.exponent(), profile.beta.exponent()];
    for _ in 0..opts.points {
        let (_, x) = random_point(rng, profile, &boundaries);
        let outcome = radius_orbit_check(params, &x, opts.orbit_steps)?;
        out.record(outcome.holds(), || {
            let bad = outcome.steps.iter().find(|s| !s.ok).unwrap();
            format!("x={x}: step {} predicted {:?}, actual {}", bad.step, bad.predicted, bad.actual)
        });
    }
    Ok(out)
}

/// Invariant radii keep sampled points on the sphere; in the attracting
/// regime the spheres inside V_β(x₀) do not.
fn invariance(
    params: &MapParams,
    profile: &DynamicsProfile,
    opts: &VerifyOptions,
    rng: &mut SampleRng,
) -> Result<SuiteResult> {
    let mut out = SuiteResult::new("sphere-invariance");
    for &l in &opts.radii {
        let ok = sphere::sphere_maps_into_itself(params, l, rng, opts.points)?;
        out.record(ok, || format!("S_(p^{l}) is not mapped into itself"));
    }
    if profile.regime == Regime::AlphaLess {
        let beta = profile.beta_exp();
        let low = profile.alpha.exponent().map_or(beta - 3, |a| a + 1);
        for l in low..beta {
            let ok = !sphere::sphere_maps_into_itself(params, l, rng, opts.points)?;
            out.record(ok, || format!("S_(p^{l}) inside V_beta looked invariant"));
        }
    }
    Ok(out)
}

fn isometry(
    params: &MapParams,
    profile: &DynamicsProfile,
    opts: &VerifyOptions,
    rng: &mut SampleRng,
) -> Result<SuiteResult> {
    let mut out = SuiteResult::new("isometry");
    for &l in &opts.radii {
        for _ in 0..opts.points.div_ceil(opts.radii.len().max(1)) {
            let s = sampling::point_on_sphere(rng, &profile.fixed_point, l);
            let e = l - rng.gen_range(1..=4);
            let x = sampling::point_in_ball(rng, &s, e);
            let lhs = params.evaluate(&x)?.distance(&params.evaluate(&s)?)?;
            let rhs = x.distance(&s)?;
            out.record(lhs == rhs, || format!("s={s}, x={x}: |f(x)-f(s)| = {lhs}, |x-s| = {rhs}"));
        }
    }
    Ok(out)
}

fn rho_table(
    params: &MapParams,
    profile: &DynamicsProfile,
    opts: &VerifyOptions,
    rng: &mut SampleRng,
) -> Result<SuiteResult> {
    let mut out = SuiteResult::new("rho-table");
    for &l in &opts.radii {
        let table = (opts.rho)(profile, params, l)?;
        for _ in 0..opts.points.div_ceil(opts.radii.len().max(1)) {
            let s = sampling::point_on_sphere(rng, &profile.fixed_point, l);
            let actual = params.evaluate(&s)?.distance(&s)?;
            out.record(actual == table, || format!("l={l}, s={s}: |f(s)-s| = {actual}, table {table}"));
        }
    }
    Ok(out)
}

/// Constant step displacement along orbits, invariance of U_ρ(s), and
/// non-invariance of every smaller ball around s.
fn minimal_balls(
    params: &MapParams,
    profile: &DynamicsProfile,
    opts: &VerifyOptions,
    rng: &mut SampleRng,
) -> Result<SuiteResult> {
    let mut out = SuiteResult::new("minimal-ball");
    for &l in &opts.radii {
        let rho = sphere::rho(profile, params, l)?;
        let rho_exp = rho.exponent().expect("positive");
        let s = sampling::point_on_sphere(rng, &profile.fixed_point, l);

        let steps = sphere::step_displacements(params, &s, opts.orbit_steps)?;
        let bad = steps.iter().position(|&d| d != rho);
        out.record(bad.is_none(), || format!("l={l}, s={s}: step {} displacement differs from rho", bad.unwrap()));

        let ball = sphere::minimal_invariant_ball(profile, params, &s, l)?;
        let points: Vec<PadicNumber> =
            (0..opts.points).map(|_| sampling::point_in_ball(rng, &s, rho_exp)).collect();
        let escapes = sphere::ball_escapes(params, &ball, &points)?;
        out.record(escapes == 0, || format!("l={l}, s={s}: {escapes} ball points escape"));

        let fs = params.evaluate(&s)?;
        let smaller = BallSpec::new(s.clone(), Radius::Power(rho_exp - 1));
        out.record(!smaller.contains(&fs)?, || format!("l={l}: ball below rho is invariant at s={s}"));
    }
    Ok(out)
}

fn ergodicity_agreement(params: &MapParams, profile: &DynamicsProfile, opts: &VerifyOptions) -> Result<SuiteResult> {
    let mut out = SuiteResult::new("ergodicity");
    for &l in &opts.radii {
        let v = ergodicity::verdict(params, l, opts.max_level)?;
        out.record(v.disagreement.is_none(), || format!("l={l}: {}", v.disagreement.clone().unwrap()));
        if profile.prime() == 2 {
            let conj = params.conjugate_to_unit_sphere(l)?;
            let criterion = Mod4Inputs::of(&conj.integral_form())?.is_ergodic();
            let theory = v.theoretical == Theory::Ergodic;
            out.record(criterion == theory, || format!("l={l}: mod-4 criterion {criterion}, theory {theory}"));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_map_passes() {
        let m = MapParams::from_ints(2, 0, 1, 1).unwrap();
        let radii = m.profile().invariant_radii().auto_radii();
        let summary = run(&m, &VerifyOptions::new(1, radii)).unwrap();
        for s in &summary.suites {
            assert!(s.ok(), "{s:?}");
            assert!(s.cases > 0, "{}", s.name);
        }
    }

    #[test]
    fn mutated_rho_is_caught() {
        fn off_by_one(p: &DynamicsProfile, m: &MapParams, l: i64) -> Result<Radius> {
            Ok(sphere::rho(p, m, l)?.times(Radius::Power(1)))
        }
        let m = MapParams::from_ints(2, 0, 1, 1).unwrap();
        let mut opts = VerifyOptions::new(1, m.profile().invariant_radii().auto_radii());
        opts.rho = off_by_one;
        let summary = run(&m, &opts).unwrap();
        assert!(!summary.all_passed());
        assert!(!summary.suite("rho-table").unwrap().ok());
        assert!(summary.suite("radius-map").unwrap().ok());
    }

    #[test]
    fn rejects_non_invariant_radius() {
        let m = MapParams::from_ints(2, 0, 1, 1).unwrap();
        assert_eq!(run(&m, &VerifyOptions::new(1, vec![0])), Err(Error::NotInvariantRadius { exp: 0 }));
    }
}
