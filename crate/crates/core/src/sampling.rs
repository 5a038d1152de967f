//! Seeded generators for parameters and points with prescribed norms.
//!
//! Points are built so that membership holds by construction: a point on
//! S_{p^l}(x₀) is x₀ + p^{-l}·u with u a p-adic unit.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::map::{MapParams, Regime};
use crate::padic::{pow_rational, PadicNumber};

/// The crate's reproducible random source.
pub type SampleRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Default bound on the numerator and denominator of sampled units.
pub const UNIT_HEIGHT: i64 = 1000;

fn coprime_to(rng: &mut impl Rng, p: u32, max: i64) -> i64 {
    loop {
        let v = rng.gen_range(1..=max);
        if v % p as i64 != 0 {
            return v;
        }
    }
}

/// A random rational unit ±n/d with p ∤ n, p ∤ d.
pub fn random_unit(rng: &mut impl Rng, p: u32, max: i64) -> BigRational {
    let n = coprime_to(rng, p, max);
    let d = coprime_to(rng, p, max);
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    BigRational::new(BigInt::from(sign * n), BigInt::from(d))
}

/// A rational of norm exactly p^e.
pub fn with_norm(rng: &mut impl Rng, p: u32, e: i64) -> BigRational {
    random_unit(rng, p, UNIT_HEIGHT) * pow_rational(p, -e)
}

/// Random point of S_{p^l}(center).
pub fn point_on_sphere(rng: &mut impl Rng, center: &PadicNumber, l: i64) -> PadicNumber {
    let p = center.prime();
    PadicNumber::from_parts(center.value() + with_norm(rng, p, l), p)
}

/// Random point of the closed ball U_{p^e}(center); the center itself and
/// interior spheres are all reachable.
pub fn point_in_ball(rng: &mut impl Rng, center: &PadicNumber, e: i64) -> PadicNumber {
    let p = center.prime();
    if rng.gen_ratio(1, 20) {
        return center.clone();
    }
    let depth = rng.gen_range(0..4);
    PadicNumber::from_parts(center.value() + with_norm(rng, p, e - depth), p)
}

/// Generation knobs for [`random_params`].
#[derive(Debug, Clone, Copy)]
pub struct ParamShape {
    /// Force a regime, or pick one uniformly.
    pub regime: Option<Regime>,
    /// α and β exponents are drawn from `-spread..=spread`.
    pub spread: i64,
}

impl Default for ParamShape {
    fn default() -> Self {
        Self { regime: None, spread: 3 }
    }
}

/// Random valid parameters, built from x₀ and the shifts x₀ + a, x₀ + c so
/// that every regime (and α = 0) is reachable:
/// a = (x₀ + a) − x₀, c = (x₀ + c) − x₀, b = x₀(c − a).
pub fn random_params(rng: &mut impl Rng, p: u32, shape: ParamShape) -> MapParams {
    let regime = shape.regime.unwrap_or_else(|| match rng.gen_range(0..3) {
        0 => Regime::AlphaLess,
        1 => Regime::AlphaEqual,
        _ => Regime::AlphaGreater,
    });
    let s = shape.spread;
    loop {
        let x0 = if rng.gen_ratio(1, 8) {
            BigRational::zero()
        } else {
            let e = rng.gen_range(-s..=s);
            with_norm(rng, p, e)
        };
        let beta_exp;
        let shift_a;
        let shift_c;
        match regime {
            Regime::AlphaLess => {
                beta_exp = rng.gen_range(-s + 1..=s);
                shift_c = with_norm(rng, p, beta_exp);
                shift_a = if rng.gen_ratio(1, 6) {
                    BigRational::zero()
                } else {
                    let alpha_exp = rng.gen_range(-s..beta_exp);
                    with_norm(rng, p, alpha_exp)
                };
            }
            Regime::AlphaGreater => {
                beta_exp = rng.gen_range(-s..s);
                shift_c = with_norm(rng, p, beta_exp);
                let alpha_exp = rng.gen_range(beta_exp + 1..=s);
                shift_a = with_norm(rng, p, alpha_exp);
            }
            Regime::AlphaEqual => {
                beta_exp = rng.gen_range(-s..=s);
                shift_a = with_norm(rng, p, beta_exp);
                // Half the time force |a − c| strictly below β.
                shift_c = if rng.gen_bool(0.5) {
                    let drop = rng.gen_range(1..=3);
                    &shift_a + with_norm(rng, p, beta_exp - drop)
                } else {
                    with_norm(rng, p, beta_exp)
                };
            }
        }
        let a = &shift_a - &x0;
        let c = &shift_c - &x0;
        let b = &x0 * (&c - &a);
        if let Ok(params) = MapParams::from_rationals(p as u64, a, b, c) {
            if params.profile().regime == regime {
                return params;
            }
        }
    }
}
