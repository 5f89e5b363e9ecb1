//! Exact scalars: rationals extended by pi, Euler's constant, logarithms,
//! odd zeta values, zeta derivatives and square roots of integers.

mod constant;
mod latex;
mod ratpi;
pub mod serde_util;
mod special;

pub use constant::{parse_rational, rational_to_f64, Constant, Symbol, SymbolMonomial};
pub use latex::constant_to_latex;
pub use ratpi::{ratpi_extract, ratpi_solve_embed, RatPi};
pub use special::{bernoulli, factor_u64, gamma_half, log_normalize, zeta_even, zeta_value, HalfGamma};

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScalarError {
    #[error("zeta_even needs an even argument >= 2, got {0}")]
    OddArgument(i64),
    #[error("zeta has a pole at 1")]
    ZetaPole,
    #[error("logarithm of a non-positive value")]
    NonPositiveLog,
    #[error("not a rational function of pi: {0}")]
    NotPiRational(String),
    #[error("denominator is not a power of pi: {0}")]
    NotLaurent(String),
    #[error("not invertible in the ring: {0}")]
    NotInvertible(String),
    #[error("invalid monomial: {0}")]
    InvalidMonomial(String),
    #[error("cannot factor {0}")]
    FactorizationTooHard(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Shorthand for an integer rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Shorthand for n/d.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}
