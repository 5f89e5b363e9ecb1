//! Exact Fourier-mode solutions of (Delta - lambda) f = c zeta(2a) zeta(2b) E_a E_b
//! for half-integer Eisenstein indices, with numeric cross-checks.

pub mod scalar_ring;
pub mod bessel_expr;
pub mod divisor_sums;
pub mod fixtures;
pub mod numeric_verify;
pub mod homogeneous;
pub mod particular_solver;
pub mod source_terms;
