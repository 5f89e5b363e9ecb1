//! Homogeneous parts of the mode solutions: the coefficient alpha_{n1,n2}
//! fixed by small-y matching, mode assembly with decay fits, the zero-mode
//! sum of the alpha_{-n,n}, and weighted combinations of equations.

use std::cmp::Reverse;

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bessel_expr::{small_y_series, BesselExpr, ExprError, HomBasis};
use crate::divisor_sums::{
    convolution_partial_sum, in_convergence_region, ramanujan_convolution, ramanujan_log_convolution, sigma,
    DivisorError,
};
use crate::numeric_verify::{eval_f64, eval_fixed, is_evaluable};
use crate::particular_solver::{solve_mode, ParticularSolution, SolveError, SolveOptions};
use crate::scalar_ring::{log_normalize, Constant, Rational, ScalarError, Symbol, SymbolMonomial};
use crate::source_terms::{Normalization, Params};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HomError {
    #[error("homogeneous basis does not match the expression: {0}")]
    BasisMismatch(String),
    #[error("mixed normalizations in a combination")]
    MixedNormalization,
    #[error("alpha_(-n,n) sequence not of the form sigma_a sigma_b n^-s (A + B log n): {0}")]
    Unrecognized(String),
    #[error("cutoff must exceed |n|")]
    CutoffTooSmall,
    #[error("worker pool: {0}")]
    Workers(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Divisor(#[from] DivisorError),
}

/// A term of the small-y series that the homogeneous basis cannot cancel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesTerm {
    pub y_exp: i32,
    pub log_exp: u32,
    pub coeff: Constant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlphaChoice {
    /// The unique alpha making the mode o(y^{-r}).
    Value { alpha: Constant },
    /// No alpha achieves o(y^{-r}). `log_free_alpha` still cancels the
    /// y^{-r} log^0 coefficient.
    Obstructed { leading: SeriesTerm, log_free_alpha: Constant },
}

impl AlphaChoice {
    /// The alpha that cancels the y^{-r} log^0 coefficient.
    pub fn value(&self) -> &Constant {
        match self {
            AlphaChoice::Value { alpha } => alpha,
            AlphaChoice::Obstructed { log_free_alpha, .. } => log_free_alpha,
        }
    }

    pub fn is_obstructed(&self) -> bool {
        matches!(self, AlphaChoice::Obstructed { .. })
    }
}

fn check_shape(e: &BesselExpr, n1: i64, n2: i64) -> Result<(), HomError> {
    let ok = match e {
        BesselExpr::Pure { .. } => n1 == 0 && n2 == 0,
        BesselExpr::Single(s) => (n1 == 0) != (n2 == 0) && s.n == n1 + n2,
        BesselExpr::Double(d) => d.n1 == n1 && d.n2 == n2,
    };
    if ok {
        Ok(())
    } else {
        Err(HomError::BasisMismatch(format!("mode ({n1},{n2})")))
    }
}

/// Choose alpha so that particular + alpha * basis has no y^{-r} log^0 term,
/// the basis being sqrt(y) K_{r+1/2}(2 pi |n1+n2| y), or y^{-r} when n1+n2 = 0.
pub fn choose_alpha(particular: &BesselExpr, r: u32, n1: i64, n2: i64) -> Result<AlphaChoice, HomError> {
    check_shape(particular, n1, n2)?;
    let basis = HomBasis::for_mode(r, n1 + n2);
    let top = -(r as i32);
    let series = small_y_series(particular, top + 1)?.series;
    let lead = basis.leading_coefficient();
    let alpha = -(&series.coeff(top, 0) * &lead.inv()?);
    let bad = series
        .terms()
        .filter(|(e, l, c)| !c.is_zero() && (*e < top || (*e == top && *l >= 1)))
        .min_by_key(|(e, l, _)| (*e, Reverse(*l)));
    Ok(match bad {
        None => AlphaChoice::Value { alpha },
        Some((y_exp, log_exp, c)) => {
            AlphaChoice::Obstructed { leading: SeriesTerm { y_exp, log_exp, coeff: c.clone() }, log_free_alpha: alpha }
        }
    })
}

/// A full mode solution particular + alpha * basis. The growing branch
/// (`excluded_basis`) always has coefficient zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeSolution {
    pub particular: ParticularSolution,
    pub hom_basis: HomBasis,
    pub excluded_basis: HomBasis,
    pub alpha: AlphaChoice,
    pub boundary_order_achieved: bool,
}

impl ModeSolution {
    pub fn params(&self) -> &Params {
        &self.particular.params
    }

    pub fn mode(&self) -> (i64, i64) {
        self.particular.mode
    }

    /// Small-y series of particular + alpha * basis below `order`.
    pub fn combined_series(&self, order: i32) -> Result<crate::bessel_expr::YLaurent, HomError> {
        let mut s = small_y_series(&self.particular.particular(), order)?.series;
        let h = self.hom_basis.small_y_series(order).series.scale(self.alpha.value());
        s.add_assign(&h);
        Ok(s)
    }

    /// particular + alpha * basis at y.
    pub fn eval(&self, y: f64) -> f64 {
        crate::numeric_verify::eval_expr(&self.particular.particular(), y)
            + eval_f64(self.alpha.value()) * self.hom_basis.eval(y)
    }
}

/// Solve one mode including the homogeneous coefficient.
pub fn mode_solution(p: &Params, n1: i64, n2: i64, opts: &SolveOptions) -> Result<ModeSolution, HomError> {
    let particular = solve_mode(p, n1, n2, opts)?;
    let r = p.r;
    let alpha = choose_alpha(&particular.particular(), r, n1, n2)?;
    let hom_basis = HomBasis::for_mode(r, n1 + n2);
    Ok(ModeSolution {
        excluded_basis: hom_basis.growing_partner(),
        hom_basis,
        boundary_order_achieved: !alpha.is_obstructed(),
        alpha,
        particular,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convergence {
    Convergent,
    Divergent,
    Inconclusive,
}

/// Least-squares slope of log|alpha| against log|n1|.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub n1_range: (u32, u32),
    pub points: usize,
}

impl DecayFit {
    /// Fit on the points with |n1| in the range and alpha != 0.
    pub fn fit(values: &[(i64, f64)], lo: u32, hi: u32) -> DecayFit {
        let pts: Vec<(f64, f64)> = values
            .iter()
            .filter(|(n1, a)| (lo as u64..=hi as u64).contains(&n1.unsigned_abs()) && *a != 0.0 && a.is_finite())
            .map(|(n1, a)| ((n1.abs() as f64).ln(), a.abs().ln()))
            .collect();
        let k = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let (mx, my) = (sx / k, sy / k);
        let (num, den) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx).powi(2)));
        DecayFit { slope: if den > 0.0 { num / den } else { f64::NAN }, n1_range: (lo, hi), points: pts.len() }
    }

    /// Divergent when the slope is at least -0.9, convergent at most -1.1.
    pub fn convergence(&self) -> Convergence {
        if self.points < 4 || !self.slope.is_finite() {
            Convergence::Inconclusive
        } else if self.slope >= -0.9 {
            Convergence::Divergent
        } else if self.slope <= -1.1 {
            Convergence::Convergent
        } else {
            Convergence::Inconclusive
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeSummary {
    pub n1: i64,
    pub n2: i64,
    pub alpha: AlphaChoice,
    pub alpha_f64: f64,
}

#[derive(Clone, Debug, Default)]
pub struct AssemblyOptions {
    pub solve: SolveOptions,
    /// Worker threads; all cores when absent.
    pub workers: Option<usize>,
}

/// All modes n1 + n2 = n with |n1| <= cutoff.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assembly {
    pub params: Params,
    pub n: i64,
    pub cutoff: u32,
    #[serde(skip)]
    pub modes: Vec<ModeSolution>,
    pub summaries: Vec<ModeSummary>,
    /// (N, sum of alpha over |n1| <= N)
    pub hom_sum_partial: Vec<(u32, f64)>,
    pub decay: DecayFit,
    pub convergence: Convergence,
    pub obstructed: bool,
}

/// Solve every mode with n1 + n2 = n and |n1| <= cutoff in parallel, then
/// fit the decay of alpha_{n1, n-n1} over the upper half of the range.
pub fn assemble_mode(p: &Params, n: i64, cutoff: u32, opts: &AssemblyOptions) -> Result<Assembly, HomError> {
    if (cutoff as u64) < n.unsigned_abs() + 1 {
        return Err(HomError::CutoffTooSmall);
    }
    let c = cutoff as i64;
    let n1s: Vec<i64> = (-c..=c).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.unwrap_or(0))
        .build()
        .map_err(|e| HomError::Workers(e.to_string()))?;
    let modes: Vec<ModeSolution> = pool.install(|| {
        n1s.par_iter().map(|&n1| mode_solution(p, n1, n - n1, &opts.solve)).collect::<Result<Vec<_>, _>>()
    })?;
    let summaries: Vec<ModeSummary> = modes
        .iter()
        .map(|m| ModeSummary {
            n1: m.mode().0,
            n2: m.mode().1,
            alpha: m.alpha.clone(),
            alpha_f64: eval_fixed(m.alpha.value()).to_f64(),
        })
        .collect();
    let mut hom_sum_partial = Vec::new();
    for big_n in (10..=cutoff).step_by(10).chain((cutoff % 10 != 0).then_some(cutoff)) {
        let s: f64 = summaries.iter().filter(|m| m.n1.unsigned_abs() <= big_n as u64).map(|m| m.alpha_f64).sum();
        hom_sum_partial.push((big_n, s));
    }
    let lo = (cutoff / 2).max(n.unsigned_abs() as u32 + 1);
    let values: Vec<(i64, f64)> = summaries.iter().filter(|m| m.n2 != 0).map(|m| (m.n1, m.alpha_f64)).collect();
    let decay = DecayFit::fit(&values, lo, cutoff);
    Ok(Assembly {
        params: *p,
        n,
        cutoff,
        obstructed: modes.iter().any(|m| m.alpha.is_obstructed()),
        convergence: decay.convergence(),
        decay,
        summaries,
        modes,
        hom_sum_partial,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SumMethod {
    NumericPartial { n_max: usize },
    RamanujanExact,
    FormalRamanujan,
}

/// alpha_{-n,n} + alpha_{n,-n} = sigma_a(n) sigma_b(n) n^{-s} (A + B log n).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesShape {
    pub a: i64,
    pub b: i64,
    pub s: i64,
    pub constant: Constant,
    pub log_coefficient: Constant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SumStatus {
    Convergent,
    /// The identity was applied outside its convergence region.
    DivergentFormal,
    /// Exact summation requested outside the convergence region.
    Divergent,
    /// The formal value runs into a zeta pole.
    FormalPole,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroModeSum {
    pub method: SumMethod,
    pub shape: SeriesShape,
    /// sum over n2 != 0 of alpha_{-n2,n2}
    pub value: Option<Constant>,
    pub numeric: Option<f64>,
    pub status: SumStatus,
    /// -value, the choice that makes the homogeneous total vanish.
    pub alpha00: Option<Constant>,
}

const RECOGNITION_TERMS: i64 = 8;

fn drop_ln2(c: &Constant) -> Option<Constant> {
    let mut out = Constant::zero();
    for (m, r) in c.terms() {
        if m.exponent(Symbol::LnPrime(2)) != 1 {
            return None;
        }
        let rest = SymbolMonomial::from_pairs(m.iter().filter(|(s, _)| **s != Symbol::LnPrime(2)).map(|(s, e)| (*s, *e)))
            .ok()?;
        if rest.iter().any(|(s, _)| matches!(s, Symbol::LnPrime(_))) {
            return None;
        }
        out.add_term(rest, r.clone());
    }
    Some(out)
}

/// Find the shape of n -> alpha_{-n,n} + alpha_{n,-n} from its first terms.
pub fn recognize_shape(p: &Params, opts: &SolveOptions) -> Result<SeriesShape, HomError> {
    let (a, b) = (p.alpha2 as i64 - 1, p.beta2 as i64 - 1);
    let mut h = Vec::new();
    for n in 1..=RECOGNITION_TERMS {
        let left = mode_solution(p, -n, n, opts)?;
        let right = mode_solution(p, n, -n, opts)?;
        let ss = sigma(a, n as u64)? * sigma(b, n as u64)?;
        h.push((left.alpha.value() + right.alpha.value()).scale(&(Rational::one() / ss)));
    }
    let big_a = h[0].clone();
    for s in 0..=64i64 {
        let scaled = |n: i64| h[n as usize - 1].scale(&Rational::from_integer(BigInt::from(n).pow(s as u32)));
        let Some(big_b) = drop_ln2(&(&scaled(2) - &big_a)) else { continue };
        let ok = (3..=RECOGNITION_TERMS).all(|n| {
            let ln_n = log_normalize(&Rational::from_integer(n.into())).expect("positive");
            scaled(n) == &big_a + &(&big_b * &ln_n)
        });
        if ok {
            return Ok(SeriesShape { a, b, s, constant: big_a, log_coefficient: big_b });
        }
    }
    Err(HomError::Unrecognized(format!("{p}")))
}

/// Sum of alpha_{-n2,n2} over n2 != 0 and the resulting alpha_{0,0}.
pub fn zero_mode_alpha_sum(p: &Params, method: SumMethod, opts: &SolveOptions) -> Result<ZeroModeSum, HomError> {
    let shape = recognize_shape(p, opts)?;
    let SeriesShape { a, b, s, .. } = shape;
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let convergent = in_convergence_region(a, b, s);
    let exact = |formal_ok: bool| -> Result<(Option<Constant>, SumStatus), HomError> {
        if !convergent && !formal_ok {
            return Ok((None, SumStatus::Divergent));
        }
        let status = if convergent { SumStatus::Convergent } else { SumStatus::DivergentFormal };
        let mut total = Constant::zero();
        if !shape.constant.is_zero() {
            match ramanujan_convolution(a, b, s) {
                Ok(v) => total += &(&shape.constant * &v.value.expect("present")),
                Err(DivisorError::PoleEncountered(_)) if !convergent => return Ok((None, SumStatus::FormalPole)),
                Err(e) => return Err(e.into()),
            }
        }
        if !shape.log_coefficient.is_zero() {
            match ramanujan_log_convolution(a, b, s)?.value {
                Some(v) => total += &(&shape.log_coefficient * &v),
                None => return Ok((None, SumStatus::FormalPole)),
            }
        }
        Ok((Some(total.scale(&half)), status))
    };
    let (value, numeric, status) = match method {
        SumMethod::RamanujanExact => {
            let (v, st) = exact(false)?;
            (v, None, st)
        }
        SumMethod::FormalRamanujan => {
            let (v, st) = exact(true)?;
            (v, None, st)
        }
        SumMethod::NumericPartial { n_max } => {
            let coeffs = [&shape.constant, &shape.log_coefficient];
            let num = if coeffs.iter().all(|c| is_evaluable(c)) {
                let mut acc = 0.0;
                for (l, c) in coeffs.iter().enumerate() {
                    if !c.is_zero() {
                        acc += eval_f64(c) * convolution_partial_sum(a, b, s, l as u32, n_max);
                    }
                }
                Some(acc / 2.0)
            } else {
                None
            };
            let st = if convergent { SumStatus::Convergent } else { SumStatus::Divergent };
            (None, num, st)
        }
    };
    let numeric = numeric.or_else(|| value.as_ref().filter(|v| is_evaluable(v)).map(eval_f64));
    let alpha00 = value.as_ref().map(|v| -v.clone());
    Ok(ZeroModeSum { method, shape, value, numeric, status, alpha00 })
}

/// A weighted sum of mode solutions of several equations at one mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Combination {
    pub mode: (i64, i64),
    pub entries: Vec<(Constant, ModeSolution)>,
    /// sum of weight * particular
    pub particular: BesselExpr,
    /// (basis, weight * alpha), one entry per distinct basis
    pub homogeneous: Vec<(HomBasis, Constant)>,
    /// Additive constants left free.
    pub free_constants: Vec<String>,
}

impl Combination {
    /// The particular part divided by `unit`, e.g. a printed prefactor.
    pub fn table(&self, unit: &Constant) -> Result<BesselExpr, HomError> {
        Ok(self.particular.scale(&unit.inv()?))
    }
}

/// Combine the solutions of several equations at the mode (n1, n2).
pub fn combine(entries: &[(Constant, Params)], n1: i64, n2: i64, opts: &SolveOptions) -> Result<Combination, HomError> {
    let Some((_, first)) = entries.first() else {
        return Err(HomError::BasisMismatch("empty combination".into()));
    };
    if entries.iter().any(|(_, p)| p.normalization != first.normalization) {
        return Err(HomError::MixedNormalization);
    }
    let mut solved = Vec::new();
    let mut particular: Option<BesselExpr> = None;
    let mut homogeneous: Vec<(HomBasis, Constant)> = Vec::new();
    for (w, p) in entries {
        let m = mode_solution(p, n1, n2, opts)?;
        let term = m.particular.particular().scale(w);
        particular = Some(match particular {
            None => term,
            Some(acc) => acc.add(&term)?,
        });
        let c = w * m.alpha.value();
        match homogeneous.iter_mut().find(|(b, _)| *b == m.hom_basis) {
            Some((_, acc)) => *acc += &c,
            None => homogeneous.push((m.hom_basis.clone(), c)),
        }
        solved.push((w.clone(), m));
    }
    Ok(Combination {
        mode: (n1, n2),
        entries: solved,
        particular: particular.expect("non-empty"),
        homogeneous,
        free_constants: vec!["C_1".into()],
    })
}

/// 14175/(704 pi^4) E(6, 5/2, 3/2) - 1215/(88 pi^4) E(4, 5/2, 3/2).
pub fn t_minus_2() -> Vec<(Constant, Params)> {
    let p = |r| Params::new(5, 3, r, Normalization::CurlyE).expect("valid");
    vec![
        (Constant::pi_term(Rational::new(14175.into(), 704.into()), -4), p(6)),
        (Constant::pi_term(Rational::new((-1215).into(), 88.into()), -4), p(4)),
    ]
}

/// -|n1|^2 |n2| sigma_{-4}(|n1|) sigma_{-2}(|n2|), the unit of the w tables.
pub fn t_minus_2_unit(n1: i64, n2: i64) -> Result<Constant, HomError> {
    let s = sigma(-4, n1.unsigned_abs())? * sigma(-2, n2.unsigned_abs())?;
    Ok(Constant::rational(-s * Rational::from_integer(BigInt::from(n1 * n1 * n2.abs()))))
}

/// The equations entering the 1/N^3 term; their weights are not fixed here.
pub fn t_minus_3_params() -> Vec<Params> {
    let p = |a2, b2, r| Params::new(a2, b2, r, Normalization::CurlyE).expect("valid");
    let mut v = vec![p(3, 3, 3)];
    for r in [5, 7, 9] {
        v.extend([p(3, 3, r), p(5, 5, r), p(7, 3, r)]);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar_ring::ratio;
    use crate::source_terms::triangular_root;

    fn params(a2: u32, b2: u32, lambda: i64) -> Params {
        Params::new(a2, b2, triangular_root(lambda).unwrap(), Normalization::PaperC).unwrap()
    }

    #[test]
    fn anti_diagonal_alpha() {
        let m = mode_solution(&params(3, 3, 30), -1, 1, &SolveOptions::default()).unwrap();
        assert_eq!(m.alpha, AlphaChoice::Value { alpha: Constant::pi_term(ratio(8, 55), -4) });
        let m = mode_solution(&params(3, 3, 56), -2, 2, &SolveOptions::default()).unwrap();
        // 32 sigma_2(2)^2 / (175 pi^6 2^10)
        assert_eq!(m.alpha.value(), &Constant::pi_term(ratio(32 * 25, 175 * 1024), -6));
    }

    #[test]
    fn cancellation_and_uniqueness() {
        let p = params(3, 3, 30);
        for (n1, n2) in [(1, 2), (0, 3), (-2, 2), (2, -5)] {
            let m = mode_solution(&p, n1, n2, &SolveOptions::default()).unwrap();
            assert!(m.boundary_order_achieved);
            let s = m.combined_series(-4).unwrap();
            assert!(s.coeff(-5, 0).is_zero());
            assert!(s.terms().all(|(e, _, _)| e > -5));
            // any other alpha leaves a y^{-5} term
            let shifted = s.add(&m.hom_basis.small_y_series(-4).series.scale(&Constant::frac(1, 7)));
            assert!(!shifted.coeff(-5, 0).is_zero());
        }
    }

    #[test]
    fn lambda_two_obstructed() {
        let p = params(3, 3, 2);
        let m = mode_solution(&p, -1, 1, &SolveOptions::default()).unwrap();
        let AlphaChoice::Obstructed { leading, log_free_alpha } = &m.alpha else { panic!("{:?}", m.alpha) };
        assert_eq!((leading.y_exp, leading.log_exp), (-1, 1));
        // -(8/9) sigma_2(1)^2 (6 log pi + 6 gamma + 5), cancelling the 1/y term
        let expect = (Constant::symbol(Symbol::LnPi).scale(&ratio(6, 1))
            + Constant::symbol(Symbol::EulerGamma).scale(&ratio(6, 1))
            + Constant::int(5))
        .scale(&ratio(-8, 9));
        assert_eq!(log_free_alpha, &expect);
    }

    #[test]
    fn lambda_two_generic_alpha() {
        let p = params(3, 3, 2);
        for (n1, n2) in [(1i64, 2i64), (3, -1), (-2, 5)] {
            let m = mode_solution(&p, n1, n2, &SolveOptions::default()).unwrap();
            assert!(m.alpha.is_obstructed());
            let (a, b) = (n1 as f64, n2 as f64);
            let n = (a + b).abs();
            let s2 = |k: i64| eval_f64(&Constant::rational(sigma(2, k.unsigned_abs()).unwrap()));
            let logs = (a.powi(3) * a.abs().ln() + 3.0 * b * a * a * a.abs().ln()
                + 3.0 * b * b * a * b.abs().ln()
                + b.powi(3) * b.abs().ln())
                / (a + b).powi(3);
            // term missing from the printed bracket
            let missing = -2.0 * a * b / (a + b).powi(2);
            let gamma = 0.577_215_664_901_532_9;
            let pi = std::f64::consts::PI;
            let expect = -4.0 * pi * n.powf(1.5) * 16.0 * s2(n1) * s2(n2) / (3.0 * a * a * b * b)
                * (gamma + pi.ln() + logs + missing);
            let got = eval_f64(m.alpha.value());
            assert!((got / expect - 1.0).abs() < 1e-13, "({n1},{n2}) {got} {expect}");
        }
    }

    #[test]
    fn lambda_56_generic_alpha() {
        // alpha = -c / lead with c the printed y^{-7} coefficient and
        // lead = 135135 / (256 pi^7 |n|^{15/2})
        let p = params(3, 3, 56);
        for (n1, n2) in [(1i64, 2i64), (2, 3), (-3, 7)] {
            let m = mode_solution(&p, n1, n2, &SolveOptions::default()).unwrap();
            let (a, b) = (n1 as f64, n2 as f64);
            let pi = std::f64::consts::PI;
            let l = (pi * a.abs()).ln() - (pi * b.abs()).ln();
            let poly = 5.0 * a.powi(9) + 315.0 * b * a.powi(8) - 25524.0 * b.powi(2) * a.powi(7)
                + 149940.0 * b.powi(3) * a.powi(6)
                - 141120.0 * b.powi(4) * a.powi(5)
                - 141120.0 * b.powi(5) * a.powi(4)
                + 149940.0 * b.powi(6) * a.powi(3)
                - 25524.0 * b.powi(7) * a.powi(2)
                + 315.0 * b.powi(8) * a
                + 5.0 * b.powi(9)
                + l * (7560.0 * b.powi(2) * a.powi(7) - 88200.0 * b.powi(3) * a.powi(6)
                    + 264600.0 * b.powi(4) * a.powi(5)
                    - 264600.0 * b.powi(5) * a.powi(4)
                    + 88200.0 * b.powi(6) * a.powi(3)
                    - 7560.0 * b.powi(7) * a.powi(2));
            let s2 = |k: i64| eval_f64(&Constant::rational(sigma(2, k.unsigned_abs()).unwrap()));
            let n = a + b;
            let c = -4576.0 * s2(n1) * s2(n2) / (175.0 * pi.powi(6) * a * a * b * b * n.powi(15)) * poly;
            let expect = -c * 256.0 * pi.powi(7) * n.abs().powf(7.5) / 135135.0;
            let got = eval_f64(m.alpha.value());
            // the polynomial cancels heavily in double precision
            assert!((got / expect - 1.0).abs() < 1e-6, "({n1},{n2}) {got} {expect}");
        }
    }

    #[test]
    fn exchange_symmetry() {
        let p = params(3, 5, 20);
        for (n1, n2) in [(1, 2), (2, -3), (0, 2), (3, 0), (1, -1)] {
            let a = mode_solution(&p, n1, n2, &SolveOptions::default()).unwrap();
            let b = mode_solution(&p.swapped(), n2, n1, &SolveOptions::default()).unwrap();
            assert_eq!(a.alpha, b.alpha, "({n1},{n2})");
        }
    }

    #[test]
    fn zero_mode_sums() {
        let p = params(3, 3, 30);
        let z = zero_mode_alpha_sum(&p, SumMethod::RamanujanExact, &SolveOptions::default()).unwrap();
        assert_eq!(z.shape.s, 8);
        assert_eq!(z.status, SumStatus::Convergent);
        assert_eq!(z.value.unwrap(), Constant::pi_term(ratio(52, 146923875), 8));
        let num = zero_mode_alpha_sum(&p, SumMethod::NumericPartial { n_max: 10_000 }, &SolveOptions::default())
            .unwrap()
            .numeric
            .unwrap();
        assert!((num / z.numeric.unwrap() - 1.0).abs() < 1e-12);
        let p = params(3, 3, 2);
        let z = zero_mode_alpha_sum(&p, SumMethod::RamanujanExact, &SolveOptions::default()).unwrap();
        assert_eq!(z.status, SumStatus::Divergent);
        let z = zero_mode_alpha_sum(&p, SumMethod::FormalRamanujan, &SolveOptions::default()).unwrap();
        assert_eq!(z.status, SumStatus::DivergentFormal);
        assert!(z.value.is_some());
    }

    #[test]
    fn decay_fits() {
        let opts = AssemblyOptions::default();
        let a = assemble_mode(&params(3, 3, 30), 1, 60, &opts).unwrap();
        assert!(a.decay.slope < -3.9, "{:?}", a.decay);
        assert_eq!(a.convergence, Convergence::Convergent);
        let a = assemble_mode(&params(3, 3, 2), 1, 60, &opts).unwrap();
        assert_eq!(a.convergence, Convergence::Divergent, "{:?}", a.decay);
        assert!(a.obstructed);
    }

    #[test]
    fn mixed_normalizations_rejected() {
        let e = vec![(Constant::one(), params(3, 3, 30)), (Constant::one(), params(3, 3, 56).with_normalization(Normalization::Unit))];
        assert_eq!(combine(&e, 1, 2, &SolveOptions::default()), Err(HomError::MixedNormalization));
    }

    #[test]
    fn single_entry_combination_is_identity() {
        let p = params(3, 5, 20);
        let c = combine(&[(Constant::one(), p)], 1, 2, &SolveOptions::default()).unwrap();
        let m = mode_solution(&p, 1, 2, &SolveOptions::default()).unwrap();
        assert_eq!(c.particular, m.particular.particular());
        assert_eq!(c.homogeneous, vec![(m.hom_basis.clone(), m.alpha.value().clone())]);
    }
}
