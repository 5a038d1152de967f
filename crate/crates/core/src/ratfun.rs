//! Rational functions with exact rational coefficients, in ascending order.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::padic::{format_rational, valuation_of, Valuation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    /// `numerator[i]` multiplies t^i.
    pub numerator: Vec<BigRational>,
    pub denominator: Vec<BigRational>,
}

pub(crate) fn horner(coeffs: &[BigRational], t: &BigRational) -> BigRational {
    coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * t + c)
}

impl RationalFunction {
    pub fn new(numerator: Vec<BigRational>, denominator: Vec<BigRational>) -> Self {
        Self { numerator, denominator }
    }

    /// Integer-coefficient pair, as used by the mod-4 test harness.
    pub fn from_integers(numerator: &[i64], denominator: &[i64]) -> Self {
        let lift = |v: &[i64]| v.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect();
        Self { numerator: lift(numerator), denominator: lift(denominator) }
    }

    /// `None` at a zero of the denominator.
    pub fn eval(&self, t: &BigRational) -> Option<BigRational> {
        let den = horner(&self.denominator, t);
        if den.is_zero() {
            return None;
        }
        Some(horner(&self.numerator, t) / den)
    }

    /// The first coefficient that is not a p-adic integer, if any.
    pub fn non_integral_coefficient(&self, p: u32) -> Option<String> {
        self.numerator
            .iter()
            .chain(&self.denominator)
            .find(|c| valuation_of(c, p) < Valuation::Finite(0))
            .map(format_rational)
    }
}
