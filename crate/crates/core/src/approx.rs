//! Fixed relative precision p-adic numbers with tracked precision.
//!
//! Exact rationals double their height under every application of a
//! quadratic map, so long orbits are carried here instead: a value is
//! p^v * (u + O(p^k)) with u a unit residue mod p^k. Every operation keeps
//! the guarantee that the true value agrees with the stored digits, and a
//! sum whose known digits cancel completely is reported instead of guessed.
//! Norms read off a live value are therefore exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::padic::{valuation_of, Radius, Valuation};

/// Sum cancelled below the tracked precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cancellation;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    /// Exactly zero (only ever produced from an exact zero input).
    Zero,
    Digits { val: i64, unit: BigInt, prec: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicApprox {
    prime: u32,
    repr: Repr,
}

fn p_pow(p: u32, k: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), k as usize)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let g = a.extended_gcd(m);
    debug_assert!(g.gcd.is_one(), "inverting a non-unit");
    g.x.mod_floor(m)
}

impl PadicApprox {
    /// Rounds an exact rational to `prec` significant p-adic digits.
    pub fn from_rational(x: &BigRational, prime: u32, prec: u32) -> Self {
        assert!(prec >= 1);
        let val = match valuation_of(x, prime) {
            Valuation::PlusInfinity => return Self { prime, repr: Repr::Zero },
            Valuation::Finite(v) => v,
        };
        let p = BigInt::from(prime);
        let mut n = x.numer().clone();
        let mut d = x.denom().clone();
        let strip = |z: &mut BigInt| {
            while z.is_multiple_of(&p) {
                *z /= &p;
            }
        };
        strip(&mut n);
        strip(&mut d);
        let m = p_pow(prime, prec);
        let unit = (n.mod_floor(&m) * mod_inverse(&d.mod_floor(&m), &m)).mod_floor(&m);
        Self { prime, repr: Repr::Digits { val, unit, prec } }
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    /// Significant digits still known; `None` for exact zero.
    pub fn precision(&self) -> Option<u32> {
        match &self.repr {
            Repr::Zero => None,
            Repr::Digits { prec, .. } => Some(*prec),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    pub fn norm(&self) -> Radius {
        match &self.repr {
            Repr::Zero => Radius::Zero,
            Repr::Digits { val, .. } => Radius::Power(-val),
        }
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            Repr::Zero => self.clone(),
            Repr::Digits { val, unit, prec } => {
                let m = p_pow(self.prime, *prec);
                Self {
                    prime: self.prime,
                    repr: Repr::Digits { val: *val, unit: (&m - unit).mod_floor(&m), prec: *prec },
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, Cancellation> {
        debug_assert_eq!(self.prime, other.prime);
        let (v1, u1, k1, v2, u2, k2) = match (&self.repr, &other.repr) {
            (Repr::Zero, _) => return Ok(other.clone()),
            (_, Repr::Zero) => return Ok(self.clone()),
            (
                Repr::Digits { val: v1, unit: u1, prec: k1 },
                Repr::Digits { val: v2, unit: u2, prec: k2 },
            ) => (*v1, u1, *k1, *v2, u2, *k2),
        };
        let low = v1.min(v2);
        // Absolute precision of the sum, counted in digits above p^low.
        let digits = ((v1 + k1 as i64).min(v2 + k2 as i64) - low) as u32;
        let m = p_pow(self.prime, digits);
        let shifted = |u: &BigInt, v: i64| -> BigInt {
            let shift = (v - low) as u32;
            if shift >= digits {
                BigInt::zero()
            } else {
                u * p_pow(self.prime, shift)
            }
        };
        let mut sum = (shifted(u1, v1) + shifted(u2, v2)).mod_floor(&m);
        if sum.is_zero() {
            return Err(Cancellation);
        }
        let p = BigInt::from(self.prime);
        let mut lost = 0u32;
        while sum.is_multiple_of(&p) {
            sum /= &p;
            lost += 1;
        }
        Ok(Self {
            prime: self.prime,
            repr: Repr::Digits { val: low + lost as i64, unit: sum, prec: digits - lost },
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, Cancellation> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.prime, other.prime);
        match (&self.repr, &other.repr) {
            (Repr::Zero, _) | (_, Repr::Zero) => Self { prime: self.prime, repr: Repr::Zero },
            (
                Repr::Digits { val: v1, unit: u1, prec: k1 },
                Repr::Digits { val: v2, unit: u2, prec: k2 },
            ) => {
                let prec = (*k1).min(*k2);
                let m = p_pow(self.prime, prec);
                Self {
                    prime: self.prime,
                    repr: Repr::Digits { val: v1 + v2, unit: (u1 * u2).mod_floor(&m), prec },
                }
            }
        }
    }

    /// `None` when dividing by exact zero.
    pub fn div(&self, other: &Self) -> Option<Self> {
        match &other.repr {
            Repr::Zero => None,
            Repr::Digits { val, unit, prec } => {
                let m = p_pow(self.prime, *prec);
                let inv = Self {
                    prime: self.prime,
                    repr: Repr::Digits { val: -val, unit: mod_inverse(unit, &m), prec: *prec },
                };
                Some(self.mul(&inv))
            }
        }
    }

    /// True when `x` is consistent with every digit this value claims.
    pub fn agrees_with(&self, x: &BigRational) -> bool {
        match &self.repr {
            Repr::Zero => x.is_zero(),
            Repr::Digits { val, prec, .. } => {
                let approx = Self::from_rational(x, self.prime, *prec);
                match approx.repr {
                    Repr::Digits { val: v2, unit: u2, .. } => {
                        let Repr::Digits { unit, .. } = &self.repr else { unreachable!() };
                        v2 == *val && &u2 == unit
                    }
                    Repr::Zero => false,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn roundtrip_small() {
        let x = PadicApprox::from_rational(&r(12, 5), 2, 20);
        assert_eq!(x.norm(), Radius::Power(-2));
        assert!(x.agrees_with(&r(12, 5)));
        assert!(!x.agrees_with(&r(12, 7)));
    }

    #[test]
    fn cancellation_is_reported() {
        let x = PadicApprox::from_rational(&r(3, 1), 3, 10);
        assert_eq!(x.sub(&x), Err(Cancellation));
        // 1 and 1 + 3^12 agree on the 10 tracked digits.
        let y = PadicApprox::from_rational(&r(1 + 3i64.pow(12), 1), 3, 10);
        let one = PadicApprox::from_rational(&r(1, 1), 3, 10);
        assert_eq!(y.sub(&one), Err(Cancellation));
    }

    #[test]
    fn precision_shrinks_on_partial_cancellation() {
        let x = PadicApprox::from_rational(&r(1 + 8, 1), 2, 10);
        let one = PadicApprox::from_rational(&r(1, 1), 2, 10);
        let d = x.sub(&one).unwrap();
        assert_eq!(d.norm(), Radius::Power(-3));
        assert_eq!(d.precision(), Some(7));
        assert!(d.agrees_with(&r(8, 1)));
    }

    proptest! {
        // The tracked digits always agree with exact arithmetic.
        #[test]
        fn ring_ops_track_exact_values(
            a in -10_000i64..10_000, b in 1i64..10_000,
            c in -10_000i64..10_000, d in 1i64..10_000,
            p in prop::sample::select(vec![2u32, 3, 5, 7]),
        ) {
            let (x, y) = (r(a, b), r(c, d));
            let (ax, ay) = (PadicApprox::from_rational(&x, p, 30), PadicApprox::from_rational(&y, p, 30));
            prop_assert!(ax.mul(&ay).agrees_with(&(&x * &y)));
            if let Ok(s) = ax.add(&ay) {
                prop_assert!(s.agrees_with(&(&x + &y)));
                prop_assert_eq!(s.norm(), crate::padic::norm_of(&(&x + &y), p));
            }
            if let Some(q) = ax.div(&ay) {
                prop_assert!(q.agrees_with(&(&x / &y)));
            }
        }
    }
}
