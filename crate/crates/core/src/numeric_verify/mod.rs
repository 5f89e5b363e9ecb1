//! Numeric evaluation and verification: Bessel functions, residuals of
//! solved modes, series cross-checks and Wronskian identities.

pub mod bessel;
pub mod constants;
pub mod expr_eval;
pub mod verify;

pub use bessel::{bessel_i_half, bessel_k, bessel_k_half, bessel_k_int, k0_k1, wronskian_half, BesselOrder};
pub use expr_eval::eval_expr;
pub use verify::{
    expression_residual, hom_operator_value, residual, second_derivative_fd_check, series_crosscheck, verify_mode,
    NumericEnv, SeriesCheck, SeriesInput, VerificationReport, Verdict, VerifyError, DEFAULT_Y_SMALL,
    RESIDUAL_TOLERANCE, SERIES_TOLERANCE,
};
pub use constants::{eval_f64, eval_fixed, is_evaluable, Fixed};
