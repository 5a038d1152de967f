//! Randomized structural properties of the map, radius dynamics, invariant
//! spheres and ergodicity oracle. Parameters come from seeded generators, so
//! every failing case is reproducible from the reported seed.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::Rng;

use padic_dynamics::ergodicity::{self, Mod4Inputs, Theory};
use padic_dynamics::padic::pow_rational;
use padic_dynamics::radius::{radius_orbit_check, RadiusMapSpec, RadiusResult};
use padic_dynamics::sampling::{self, random_params, rng_from_seed, ParamShape, SampleRng};
use padic_dynamics::sphere::{self, MeasureBranch};
use padic_dynamics::{MapParams, PadicNumber, Radius, Regime};

fn prime() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 3, 5, 7])
}

fn setup(seed: u64, p: u32, regime: Option<Regime>) -> (SampleRng, MapParams) {
    let mut rng = rng_from_seed(seed);
    let m = random_params(&mut rng, p, ParamShape { regime, spread: 3 });
    (rng, m)
}

fn pick<T: Copy>(rng: &mut SampleRng, items: &[T]) -> T {
    items[rng.gen_range(0..items.len())]
}

/// x mod 4 for a rational with odd denominator.
fn mod4(x: &BigRational) -> u8 {
    let four = BigInt::from(4);
    let n = x.numer().mod_floor(&four).to_u8().unwrap();
    let d = x.denom().mod_floor(&four).to_u8().unwrap();
    // Odd residues are their own inverses mod 4.
    (n * d) % 4
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn fixed_point_is_fixed(seed in any::<u64>(), p in prime()) {
        let (_, m) = setup(seed, p, None);
        let x0 = m.fixed_point();
        prop_assert_eq!(m.evaluate(&x0).unwrap(), x0);
    }

    #[test]
    fn displacement_factorization(seed in any::<u64>(), p in prime()) {
        let (mut rng, m) = setup(seed, p, None);
        let l = rng.gen_range(-6..=6);
        let x = sampling::point_on_sphere(&mut rng, &m.fixed_point(), l);
        prop_assume!(x != m.pole());
        let (direct, factored) = m.displacement_both_ways(&x).unwrap();
        prop_assert_eq!(direct, factored);
    }

    #[test]
    fn isometric_on_invariant_spheres(seed in any::<u64>(), p in prime()) {
        let (mut rng, m) = setup(seed, p, None);
        let l = pick(&mut rng, &m.profile().invariant_radii().auto_radii());
        let s = sampling::point_on_sphere(&mut rng, &m.fixed_point(), l);
        let e = l - rng.gen_range(1..=5);
        let x = sampling::point_in_ball(&mut rng, &s, e);
        let lhs = m.evaluate(&x).unwrap().distance(&m.evaluate(&s).unwrap()).unwrap();
        prop_assert_eq!(lhs, x.distance(&s).unwrap());
    }

    #[test]
    fn conjugation_matches_composition(seed in any::<u64>(), p in prime()) {
        let (mut rng, m) = setup(seed, p, None);
        let l = pick(&mut rng, &m.profile().invariant_radii().auto_radii());
        let conj = m.conjugate_to_unit_sphere(l).unwrap();
        let t = sampling::random_unit(&mut rng, p, sampling::UNIT_HEIGHT);
        let x0 = m.fixed_point();
        let g_t = PadicNumber::from_rational(&t * pow_rational(p, -l) + x0.value(), p as u64).unwrap();
        let composed = (m.evaluate(&g_t).unwrap().value() - x0.value()) * pow_rational(p, l);
        let direct = conj.evaluate(&PadicNumber::from_rational(t, p as u64).unwrap()).unwrap();
        prop_assert_eq!(direct.value(), &composed);
        let integral = conj.integral_form();
        prop_assert!(integral.non_integral_coefficient(p).is_none());
    }

    #[test]
    fn basin_distances_strictly_decrease(seed in any::<u64>(), p in prime()) {
        let (mut rng, m) = setup(seed, p, Some(Regime::AlphaLess));
        let beta = m.profile().beta_exp();
        let l = beta - rng.gen_range(1..=4);
        let x = sampling::point_on_sphere(&mut rng, &m.fixed_point(), l);
        let norms: Vec<Radius> = m.certified_displacements(&x, 20).unwrap().iter().map(|d| d.norm()).collect();
        for w in norms.windows(2) {
            prop_assert!(w[1] < w[0] || (w[0].is_zero() && w[1].is_zero()), "{:?}", norms);
        }
    }

    #[test]
    fn radius_map_matches_orbits(seed in any::<u64>(), p in prop::sample::select(vec![2u32, 3, 5])) {
        let (mut rng, m) = setup(seed, p, None);
        let prof = m.profile();
        let boundaries = [prof.alpha.exponent(), prof.beta.exponent()];
        let l = loop {
            let l = rng.gen_range(prof.beta_exp() - 4..=prof.max_exp() + 4);
            if !boundaries.contains(&Some(l)) {
                break l;
            }
        };
        let x = sampling::point_on_sphere(&mut rng, &prof.fixed_point, l);
        let outcome = radius_orbit_check(&m, &x, 20);
        prop_assume!(outcome.is_ok());
        prop_assert!(outcome.unwrap().holds());
    }

    #[test]
    fn boundary_norms_respect_bounds(seed in any::<u64>(), p in prime()) {
        let (mut rng, m) = setup(seed, p, None);
        let prof = m.profile();
        let options: Vec<i64> = [prof.alpha.exponent(), prof.beta.exponent()].into_iter().flatten().collect();
        let l = pick(&mut rng, &options);
        let x = sampling::point_on_sphere(&mut rng, &prof.fixed_point, l);
        let outcome = radius_orbit_check(&m, &x, 1);
        prop_assume!(outcome.is_ok());
        prop_assert!(outcome.unwrap().holds());
    }

    #[test]
    fn repelling_regime_pushes_outward(alpha in -6i64..6, gap in 1i64..5, l in -12i64..6) {
        let spec = RadiusMapSpec::new(Radius::Power(alpha), Radius::Power(alpha - gap));
        prop_assume!(l < alpha && l != alpha - gap);
        let next = spec.step(Radius::Power(l)).unwrap().radius().unwrap();
        prop_assert!(next > Radius::Power(l));
    }

    #[test]
    fn invariant_radii_are_fixed_by_the_radius_map(seed in any::<u64>(), p in prime(), k in 1i64..7) {
        let (_, m) = setup(seed, p, None);
        let prof = m.profile();
        let set = prof.invariant_radii();
        let spec = RadiusMapSpec::of(&prof);
        for l in [set.pivot() + k, set.pivot() - k] {
            if set.contains(l) {
                prop_assert_eq!(spec.step(Radius::Power(l)).unwrap(), RadiusResult::Determined { radius: Radius::Power(l) });
            }
        }
    }

    #[test]
    fn invariant_spheres_map_into_themselves(seed in any::<u64>(), p in prime(), k in 1i64..=6) {
        let (mut rng, m) = setup(seed, p, None);
        let l = m.profile().invariant_radii().pivot() + k;
        prop_assert!(sphere::sphere_maps_into_itself(&m, l, &mut rng, 100).unwrap());
    }

    #[test]
    fn basin_spheres_are_not_invariant(seed in any::<u64>(), p in prime()) {
        let (mut rng, m) = setup(seed, p, Some(Regime::AlphaLess));
        let prof = m.profile();
        let beta = prof.beta_exp();
        let l = rng.gen_range(beta - 5..beta);
        prop_assume!(Some(l) != prof.alpha.exponent());
        prop_assert!(!sphere::sphere_maps_into_itself(&m, l, &mut rng, 100).unwrap());
    }

    #[test]
    fn balls_map_onto_balls_of_equal_measure(seed in any::<u64>(), p in prime()) {
        let (mut rng, m) = setup(seed, p, None);
        let l = pick(&mut rng, &m.profile().invariant_radii().auto_radii());
        let s = sampling::point_on_sphere(&mut rng, &m.fixed_point(), l);
        let e = l - rng.gen_range(1..=5);
        let fs = m.evaluate(&s).unwrap();
        prop_assert_eq!(fs.distance(&m.fixed_point()).unwrap(), Radius::Power(l));
        for _ in 0..10 {
            let x = sampling::point_in_ball(&mut rng, &s, e);
            prop_assert!(m.evaluate(&x).unwrap().distance(&fs).unwrap() <= Radius::Power(e));
        }
        let before = sphere::normalized_measure_of_ball(p as u64, e, l).unwrap();
        prop_assert_eq!(before.branch, MeasureBranch::Formula);
    }

    #[test]
    fn steps_along_orbits_have_constant_size(seed in any::<u64>(), p in prime()) {
        let (mut rng, m) = setup(seed, p, None);
        let prof = m.profile();
        let l = pick(&mut rng, &prof.invariant_radii().auto_radii());
        let rho = sphere::rho(&prof, &m, l).unwrap();
        let s = sampling::point_on_sphere(&mut rng, &prof.fixed_point, l);
        prop_assert_eq!(m.evaluate(&s).unwrap().distance(&s).unwrap(), rho);
        let steps = sphere::step_displacements(&m, &s, 20).unwrap();
        prop_assert!(steps.iter().all(|&d| d == rho), "{:?} vs {}", steps, rho);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn p2_levels_refine_and_measures_agree(seed in any::<u64>(), k in 1i64..=3) {
        let (mut rng, m) = setup(seed, 2, None);
        let prof = m.profile();
        let l = if prof.regime == Regime::AlphaEqual {
            pick(&mut rng, &[prof.beta_exp() - 1, prof.beta_exp() + k])
        } else {
            prof.max_exp() + k
        };
        let v = ergodicity::verdict(&m, l, 10).unwrap();
        prop_assert!(v.disagreement.is_none(), "{:?}", v.disagreement);
        let first_bad = v.levels.iter().position(|x| !x.transitive);
        if let Some(i) = first_bad {
            prop_assert!(v.levels[i..].iter().all(|x| !x.transitive));
        }
        let one = BigRational::from_integer(1.into());
        match v.theoretical {
            Theory::Ergodic => prop_assert_eq!(&v.minimal_ball_measure.value, &one),
            _ => {
                if let Some(w) = &v.witness {
                    prop_assert!(w.measure.value < one);
                }
            }
        }
    }

    #[test]
    fn conjugated_coefficients_match_identification(seed in any::<u64>(), k in 1i64..=4) {
        let mut rng = rng_from_seed(seed);
        let regime = pick(&mut rng, &[Regime::AlphaLess, Regime::AlphaGreater]);
        let m = random_params(&mut rng, 2, ParamShape { regime: Some(regime), spread: 3 });
        let l = m.profile().max_exp() + k;
        let conj = m.conjugate_to_unit_sphere(l).unwrap();
        let ours = Mod4Inputs::of(&conj.integral_form()).unwrap();
        // A1 = 1, A2 = 2^l(x0 + c), B1 = 2^l(x0 + a), B2 = 1, with numerator
        // and denominator in the opposite order to ours.
        let expected = Mod4Inputs {
            a1: 1,
            a2: mod4(&conj.denominator_constant),
            b1: mod4(&conj.numerator_linear),
            b2: 1,
        };
        prop_assert_eq!(ours.swapped(), expected);
    }
}
