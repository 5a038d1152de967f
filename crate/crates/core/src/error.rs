use thiserror::Error;

/// Errors raised anywhere in the analysis pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("p must be prime, got {0}")]
    NotPrime(u64),
    #[error("operands live in different fields: Q_{left} vs Q_{right}")]
    PrimeMismatch { left: u32, right: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse rational {0:?}: expected \"num/den\" or an integer")]
    InvalidRational(String),
    #[error("map parameters violate a != c")]
    EqualCoefficients,
    #[error("map parameters violate c^2 - ac + b != 0")]
    DegenerateMap,
    #[error("orbit hit the pole x = -c at step {step}")]
    PoleHit { step: usize },
    #[error("fixed point coincides with the pole")]
    FixedPointIsPole,
    #[error("x must differ from the fixed point")]
    AtFixedPoint,
    #[error("sphere of radius p^{exp} is not invariant")]
    NotInvariantRadius { exp: i64 },
    #[error("point does not lie on the sphere of radius p^{exp}")]
    NotOnSphere { exp: i64 },
    #[error("radius must be positive")]
    ZeroRadius,
    #[error("invalid radius pair: {0}")]
    InvalidRadiusPair(String),
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("denominator is not a unit at residue {residue} mod {modulus}")]
    NonUnitDenominator { residue: u64, modulus: u64 },
    #[error("coefficient {0} is not a p-adic integer")]
    NonIntegralCoefficient(String),
    #[error("residue map mod {modulus} is not a bijection")]
    NotBijective { modulus: u64 },
    #[error("level {level} is too large for p = {prime}")]
    LevelTooLarge { prime: u32, level: u32 },
    #[error("orbit of length {requested} exceeds the cap {cap}")]
    OrbitTooLong { requested: usize, cap: usize },
    #[error("exact orbit exceeded the height limit at step {step}")]
    HeightLimit { step: usize },
    #[error("p-adic precision exhausted at step {step} (pole or exact cancellation)")]
    PrecisionExhausted { step: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
