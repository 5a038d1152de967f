//! Analysis of the p-adic dynamical system f(x) = (x² + ax + b)/(x + c).
//!
//! The crate computes the fixed-point profile of f, the dynamics of the
//! radius |x − x₀|_p, the invariant spheres around x₀ with their minimal
//! invariant balls and Haar measures, and per-sphere ergodicity verdicts.
//! Each theoretical statement has an exact, independently computed
//! counterpart (exact rational orbits, certified p-adic orbits, and
//! permutations of residues modulo pⁿ) used to cross-check it.

pub mod approx;
pub mod cli;
pub mod ergodicity;
pub mod error;
pub mod map;
pub mod padic;
pub mod radius;
pub mod ratfun;
pub mod sampling;
pub mod sphere;
pub mod verify;

pub use error::{Error, Result};
pub use map::{DynamicsProfile, FixedPointClass, MapParams, Regime};
pub use padic::{BallSpec, PadicNumber, Radius, SphereSpec, Valuation};
