use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{constants::symbol_value, eval_expr};
use crate::bessel_expr::{apply_mode_operator, small_y_series, BesselExpr, HomBasis};
use crate::homogeneous::ModeSolution;
use crate::scalar_ring::{Constant, Symbol};
use crate::source_terms::source_term;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error("no numeric value for {0}")]
    Unassigned(String),
    #[error("source term: {0}")]
    Source(String),
    #[error("y must be positive")]
    Domain,
}

/// Numeric values for the symbols; overrides take precedence over the
/// built-in high-precision values.
#[derive(Clone, Debug, Default)]
pub struct NumericEnv {
    pub overrides: BTreeMap<Symbol, f64>,
}

impl NumericEnv {
    pub fn symbol(&self, s: Symbol) -> Result<f64, VerifyError> {
        if let Some(v) = self.overrides.get(&s) {
            return Ok(*v);
        }
        match s {
            Symbol::ZetaPrime(k) if k == 1 => Err(VerifyError::Unassigned(format!("{s:?}"))),
            Symbol::Zeta(k) if k < 2 => Err(VerifyError::Unassigned(format!("{s:?}"))),
            _ => Ok(symbol_value(s).to_f64()),
        }
    }

    pub fn eval(&self, c: &Constant) -> Result<f64, VerifyError> {
        if self.overrides.is_empty() {
            for (m, _) in c.terms() {
                for (s, _) in m.iter() {
                    self.symbol(*s)?;
                }
            }
            return Ok(super::eval_fixed(c).to_f64());
        }
        let mut total = 0.0;
        for (m, r) in c.terms() {
            let mut t = super::Fixed::from_rational(r).to_f64();
            for (s, e) in m.iter() {
                t *= self.symbol(*s)?.powi(*e);
            }
            total += t;
        }
        Ok(total)
    }
}

/// (y^2 d^2/dy^2 - lambda - 4 pi^2 n^2 y^2) applied to a homogeneous basis
/// element, evaluated in closed form.
pub fn hom_operator_value(basis: &HomBasis, lambda: i64, y: f64) -> f64 {
    let lam = lambda as f64;
    match basis {
        HomBasis::PowerNeg { r } => {
            let r = *r as f64;
            (r * (r + 1.0) - lam) * y.powf(-r)
        }
        HomBasis::PowerPos { r } => {
            let r = *r as f64;
            (r * (r + 1.0) - lam) * y.powf(r + 1.0)
        }
        HomBasis::BesselK { r, n } => {
            // sqrt(y) K_{r+1/2}(c y) = e^{-c y} sum_k a_k y^{-k} / (2 sqrt|n|); the
            // operator leaves e^{-c y} sum_k [a_k (k(k+1) - lambda) + 2 c (k+1) a_{k+1}] y^{-k}
            let c = 2.0 * PI * n.abs() as f64;
            let r = *r as i32;
            let mut a = vec![1.0];
            for k in 1..=r {
                let prev = a[k as usize - 1];
                a.push(prev * ((r + k) * (r - k + 1)) as f64 / (k as f64 * 2.0 * c));
            }
            a.push(0.0);
            let mut total = 0.0;
            for k in 0..=r {
                let kf = k as f64;
                let ku = k as usize;
                total += (a[ku] * (kf * (kf + 1.0) - lam) + 2.0 * c * (kf + 1.0) * a[ku + 1]) * y.powi(-k);
            }
            total * (-c * y).exp() / (2.0 * (n.abs() as f64).sqrt())
        }
        HomBasis::BesselI { .. } => {
            // second derivative by central differences
            let h = 1e-4 * y;
            let f = |t: f64| basis.eval(t);
            let f2 = (f(y + h) - 2.0 * f(y) + f(y - h)) / (h * h);
            let c = 2.0 * PI * basis_frequency(basis) as f64;
            y * y * f2 - lam * f(y) - c * c * y * y * f(y)
        }
    }
}

fn basis_frequency(b: &HomBasis) -> i64 {
    match b {
        HomBasis::BesselK { n, .. } | HomBasis::BesselI { n, .. } => n.abs(),
        _ => 0,
    }
}

/// |LHS - RHS| / max(|RHS(y)|, |RHS(1)|) for particular + alpha * basis.
pub fn residual(sol: &ModeSolution, y: f64) -> Result<f64, VerifyError> {
    if y <= 0.0 {
        return Err(VerifyError::Domain);
    }
    let env = NumericEnv::default();
    let p = &sol.particular;
    let lhs_expr = apply_mode_operator(p.lambda, &p.particular());
    // the source is rebuilt from the Eisenstein coefficients, not taken from the solver
    let rhs_expr = source_term(&p.params, p.mode.0, p.mode.1).map_err(|e| VerifyError::Source(e.to_string()))?.expr();
    let alpha = env.eval(sol.alpha.value())?;
    let lhs = eval_expr(&lhs_expr, y) + alpha * hom_operator_value(&sol.hom_basis, p.lambda, y);
    let rhs = eval_expr(&rhs_expr, y);
    let scale = rhs.abs().max(eval_expr(&rhs_expr, 1.0).abs());
    Ok((lhs - rhs).abs() / scale)
}

/// Residual of an arbitrary expression against a source, both given exactly.
pub fn expression_residual(lambda: i64, f: &BesselExpr, source: &BesselExpr, y: f64) -> f64 {
    let lhs = eval_expr(&apply_mode_operator(lambda, f), y);
    let rhs = eval_expr(source, y);
    let scale = rhs.abs().max(eval_expr(source, 1.0).abs());
    if scale == 0.0 {
        lhs.abs()
    } else {
        (lhs - rhs).abs() / scale
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Agree,
    Disagree,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesCheck {
    pub y: f64,
    pub order: i32,
    pub series: f64,
    pub direct: f64,
    pub relative_difference: f64,
    pub verdict: Verdict,
}

pub const SERIES_TOLERANCE: f64 = 1e-5;
pub const DEFAULT_Y_SMALL: f64 = 1e-3;

/// The quantity whose small-y series is compared with direct evaluation.
pub enum SeriesInput<'a> {
    Expr(&'a BesselExpr),
    Basis(&'a HomBasis),
}

fn max_frequency(e: &BesselExpr) -> i64 {
    match e {
        BesselExpr::Double(d) => d.n1.abs().max(d.n2.abs()),
        BesselExpr::Single(s) => s.n.abs(),
        BesselExpr::Pure { .. } => 0,
    }
}

/// Compare the truncated small-y series with direct evaluation at y_small.
pub fn series_crosscheck(input: SeriesInput<'_>, order: i32, y_small: f64) -> SeriesCheck {
    let (freq, series, direct) = match input {
        SeriesInput::Expr(e) => {
            let s = small_y_series(e, order).map(|s| s.series.eval(y_small, &super::eval_f64));
            (max_frequency(e), s.ok(), eval_expr(e, y_small))
        }
        SeriesInput::Basis(b) => {
            (basis_frequency(b), Some(b.small_y_series(order).series.eval(y_small, &super::eval_f64)), b.eval(y_small))
        }
    };
    let inside = 2.0 * PI * freq as f64 * y_small < 0.5;
    let series = series.unwrap_or(f64::NAN);
    let rel = if direct == 0.0 { (series - direct).abs() } else { ((series - direct) / direct).abs() };
    let verdict = if !inside || !rel.is_finite() {
        Verdict::Inconclusive
    } else if rel <= SERIES_TOLERANCE {
        Verdict::Agree
    } else {
        Verdict::Disagree
    };
    SeriesCheck { y: y_small, order, series, direct, relative_difference: rel, verdict }
}

/// Symbolic second derivative against central differences, relative error.
pub fn second_derivative_fd_check(e: &BesselExpr, y: f64, h: f64) -> f64 {
    let exact = eval_expr(&e.derivative().derivative(), y);
    let fd = (eval_expr(e, y + h) - 2.0 * eval_expr(e, y) + eval_expr(e, y - h)) / (h * h);
    let scale = exact.abs().max(eval_expr(e, y).abs() / (y * y));
    (exact - fd).abs() / scale
}

pub const RESIDUAL_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub mode: (i64, i64),
    pub y_points: Vec<f64>,
    pub residuals: Vec<f64>,
    pub series_checks: Vec<SeriesCheck>,
    pub pass: bool,
}

/// Numeric residuals at `ys` and a series check of the particular part.
pub fn verify_mode(sol: &ModeSolution, ys: &[f64]) -> Result<VerificationReport, VerifyError> {
    let residuals = ys.iter().map(|&y| residual(sol, y)).collect::<Result<Vec<_>, _>>()?;
    let particular = sol.particular.particular();
    let freq = max_frequency(&particular).max(1) as f64;
    // keep 2 pi |n| y inside the series radius
    let y_small = DEFAULT_Y_SMALL.min(0.05 / (2.0 * PI * freq));
    let lowest = particular.components().iter().filter_map(|t| t.min_exp()).min().unwrap_or(0);
    let check = series_crosscheck(SeriesInput::Expr(&particular), lowest + 8, y_small);
    let pass = residuals.iter().all(|r| *r <= RESIDUAL_TOLERANCE) && check.verdict != Verdict::Disagree;
    Ok(VerificationReport { mode: sol.mode(), y_points: ys.to_vec(), residuals, series_checks: vec![check], pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bessel_expr::{DoubleBessel, YLaurent};
    use crate::homogeneous::mode_solution;
    use crate::particular_solver::SolveOptions;
    use crate::source_terms::{Normalization, Params};

    fn p(a2: u32, b2: u32, r: u32) -> Params {
        Params::new(a2, b2, r, Normalization::PaperC).unwrap()
    }

    #[test]
    fn solved_modes_have_small_residual() {
        for (params, modes) in [
            (p(3, 3, 5), vec![(1, 2), (2, -3), (-1, 1), (0, 2), (3, 0), (0, 0)]),
            (p(3, 5, 4), vec![(1, 2), (0, 1), (1, 0), (2, -2)]),
        ] {
            for (n1, n2) in modes {
                let m = mode_solution(&params, n1, n2, &SolveOptions::default()).unwrap();
                let rep = verify_mode(&m, &[0.3, 1.0, 3.0]).unwrap();
                assert!(rep.pass, "{params} ({n1},{n2}) {rep:?}");
            }
        }
    }

    #[test]
    fn homogeneous_solutions_are_annihilated() {
        for r in [1, 5, 7] {
            let lambda = (r * (r + 1)) as i64;
            for basis in [HomBasis::BesselK { r, n: 3 }, HomBasis::PowerNeg { r }, HomBasis::PowerPos { r }] {
                for y in [0.3, 1.0, 2.0] {
                    let v = hom_operator_value(&basis, lambda, y);
                    assert!(v.abs() <= 1e-10 * basis.eval(y).abs().max(1e-300) * 1e3, "{basis:?} {y} {v}");
                }
            }
        }
    }

    #[test]
    fn corrupted_coefficient_is_detected() {
        let m = mode_solution(&p(3, 3, 5), 1, 2, &SolveOptions::default()).unwrap();
        let mut bad = m.clone();
        if let BesselExpr::Double(d) = &mut bad.particular.solution {
            d.q[0][0].add_term(0, 0, Constant::one());
        }
        assert!(residual(&bad, 1.0).unwrap() >= 1e-3);
    }

    #[test]
    fn series_checks() {
        let b = HomBasis::BesselK { r: 5, n: 1 };
        let c = series_crosscheck(SeriesInput::Basis(&b), 2, DEFAULT_Y_SMALL);
        assert!(c.relative_difference <= 1e-6, "{c:?}");
        let pure = BesselExpr::pure(YLaurent::power(Constant::frac(3, 7), -2));
        let c = series_crosscheck(SeriesInput::Expr(&pure), 3, DEFAULT_Y_SMALL);
        assert!(c.relative_difference < 1e-15);
        let mut d = DoubleBessel::zero(1, 2);
        d.q[0][0] = YLaurent::power(Constant::one(), 1);
        let c = series_crosscheck(SeriesInput::Expr(&BesselExpr::Double(d)), 4, DEFAULT_Y_SMALL);
        assert_eq!(c.verdict, Verdict::Agree, "{c:?}");
        let far = series_crosscheck(SeriesInput::Basis(&b), 2, 0.5);
        assert_eq!(far.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn derivative_rules_match_finite_differences() {
        let m = mode_solution(&p(3, 3, 7), 2, 3, &SolveOptions::default()).unwrap();
        let g = m.particular.solution.clone();
        for y in [0.4, 1.0, 2.0] {
            assert!(second_derivative_fd_check(&g, y, 1e-5) < 1e-6);
        }
    }

    #[test]
    fn env_overrides() {
        let mut env = NumericEnv::default();
        let z3 = Constant::symbol(Symbol::Zeta(3));
        assert!((env.eval(&z3).unwrap() - 1.202_056_903_159_594_2).abs() < 1e-15);
        env.overrides.insert(Symbol::Zeta(3), 2.0);
        assert_eq!(env.eval(&z3.scale(&crate::scalar_ring::ratio(3, 1))).unwrap(), 6.0);
        assert!(NumericEnv::default().eval(&Constant::symbol(Symbol::ZetaPrime(1))).is_err());
    }
}
