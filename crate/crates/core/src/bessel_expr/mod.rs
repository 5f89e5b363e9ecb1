//! Symbolic expressions in y, log(y) and products of K_0, K_1 evaluated at
//! 2 pi |n| y, together with the mode operators and small-y expansions.

mod expr;
mod latex;
mod series;
mod ylaurent;

pub use expr::{
    apply_euler, apply_l, apply_mode_operator, apply_p, bessel_rate, reduce_k_index, BesselExpr, DoubleBessel,
    ReducedK, SingleBessel,
};
pub use series::{k_series, small_y_series, AsymptoticSeries, HomBasis};
pub use ylaurent::{YLaurent, DEFAULT_LOG_CAP};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("log(y) power {got} exceeds the cap {cap}")]
    LogCapExceeded { cap: u32, got: u32 },
    #[error("operands have different shapes or frequencies")]
    ShapeMismatch,
    #[error("sign argument does not match sgn(n1 n2)")]
    SignMismatch,
}
