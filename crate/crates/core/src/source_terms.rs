//! Right-hand sides s_{n1,n2}(y) of the per-mode equations, built from the
//! Fourier coefficients of the two Eisenstein series.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::bessel_expr::{reduce_k_index, BesselExpr, DoubleBessel, SingleBessel, YLaurent};
use crate::divisor_sums::{sigma, DivisorError};
use crate::scalar_ring::{gamma_half, parse_rational, serde_util, zeta_value, Constant, Rational};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SourceError {
    #[error("index {0} is not a half-integer greater than 1")]
    BadIndex(String),
    #[error("lambda = {0} is not of the form r(r+1) with r >= 1")]
    LambdaNotTriangular(String),
    #[error("no tabulated c_(alpha,beta) for ({0}, {1}); use another normalization")]
    NoPaperConstant(String, String),
    #[error(transparent)]
    Divisor(#[from] DivisorError),
}

/// Overall constant multiplying zeta(2a) zeta(2b) E_a E_b on the right-hand side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// -c_(a,b) with c = 4, 6, 9, 30 for (3/2,3/2), (3/2,5/2), (5/2,5/2), (3/2,7/2)
    PaperC,
    /// -4, the convention of the E(r, a, b) functions
    CurlyE,
    /// +1
    Unit,
}

impl Normalization {
    pub fn parse(s: &str) -> Option<Normalization> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "paperc" | "c" => Some(Normalization::PaperC),
            "curlye" | "e" => Some(Normalization::CurlyE),
            "unit" | "1" => Some(Normalization::Unit),
            _ => None,
        }
    }
}

/// Equation parameters. Indices are stored doubled: alpha = alpha2 / 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Params {
    pub alpha2: u32,
    pub beta2: u32,
    pub r: u32,
    pub normalization: Normalization,
}

fn half_string(t: u32) -> String {
    if t % 2 == 0 {
        (t / 2).to_string()
    } else {
        format!("{t}/2")
    }
}

/// Twice a positive half-integer given as a rational, if it is one.
pub fn twice_half_integer(q: &Rational) -> Option<u32> {
    let t = q * Rational::from_integer(2.into());
    if !t.is_integer() || !t.numer().is_positive() {
        return None;
    }
    let t = t.to_integer().to_u32()?;
    (t % 2 == 1).then_some(t)
}

/// r >= 1 with r (r + 1) = lambda.
pub fn triangular_root(lambda: i64) -> Option<u32> {
    if lambda < 2 {
        return None;
    }
    let r = ((4 * lambda + 1).sqrt() - 1) / 2;
    (r * (r + 1) == lambda).then_some(r as u32)
}

impl Params {
    pub fn new(alpha2: u32, beta2: u32, r: u32, normalization: Normalization) -> Result<Params, SourceError> {
        for t in [alpha2, beta2] {
            if t % 2 == 0 || t < 3 {
                return Err(SourceError::BadIndex(half_string(t)));
            }
        }
        if r == 0 {
            return Err(SourceError::LambdaNotTriangular("0".into()));
        }
        Ok(Params { alpha2, beta2, r, normalization })
    }

    /// Parameters from textual indices such as "3/2" and an eigenvalue.
    pub fn parse(alpha: &str, beta: &str, lambda: i64, normalization: Normalization) -> Result<Params, SourceError> {
        let a = parse_rational(alpha).map_err(|_| SourceError::BadIndex(alpha.into()))?;
        let b = parse_rational(beta).map_err(|_| SourceError::BadIndex(beta.into()))?;
        let a2 = twice_half_integer(&a).ok_or_else(|| SourceError::BadIndex(alpha.into()))?;
        let b2 = twice_half_integer(&b).ok_or_else(|| SourceError::BadIndex(beta.into()))?;
        let r = triangular_root(lambda).ok_or_else(|| SourceError::LambdaNotTriangular(lambda.to_string()))?;
        Params::new(a2, b2, r, normalization)
    }

    pub fn lambda(&self) -> i64 {
        self.r as i64 * (self.r as i64 + 1)
    }

    pub fn alpha(&self) -> Rational {
        Rational::new(self.alpha2.into(), 2.into())
    }

    pub fn beta(&self) -> Rational {
        Rational::new(self.beta2.into(), 2.into())
    }

    /// The same equation with the two Eisenstein factors exchanged.
    pub fn swapped(&self) -> Params {
        Params { alpha2: self.beta2, beta2: self.alpha2, ..*self }
    }

    pub fn with_normalization(&self, normalization: Normalization) -> Params {
        Params { normalization, ..*self }
    }

    /// c_(alpha, beta) where tabulated.
    pub fn paper_c(&self) -> Option<i64> {
        let (a, b) = (self.alpha2.min(self.beta2), self.alpha2.max(self.beta2));
        match (a, b) {
            (3, 3) => Some(4),
            (3, 5) => Some(6),
            (5, 5) => Some(9),
            (3, 7) => Some(30),
            _ => None,
        }
    }

    /// The coefficient kappa in (Delta - lambda) f = kappa zeta(2a) zeta(2b) E_a E_b.
    pub fn kappa(&self) -> Result<Rational, SourceError> {
        Ok(Rational::from_integer(BigInt::from(match self.normalization {
            Normalization::PaperC => -self
                .paper_c()
                .ok_or_else(|| SourceError::NoPaperConstant(half_string(self.alpha2), half_string(self.beta2)))?,
            Normalization::CurlyE => -4,
            Normalization::Unit => 1,
        })))
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "alpha={} beta={} lambda={} ({:?})",
            half_string(self.alpha2),
            half_string(self.beta2),
            self.lambda(),
            self.normalization
        )
    }
}

#[derive(Serialize, Deserialize)]
struct ParamsRepr {
    alpha: String,
    beta: String,
    lambda: i64,
    r: u32,
    normalization: Normalization,
}

impl Serialize for Params {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ParamsRepr {
            alpha: half_string(self.alpha2),
            beta: half_string(self.beta2),
            lambda: self.lambda(),
            r: self.r,
            normalization: self.normalization,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Params {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let p = ParamsRepr::deserialize(d)?;
        Params::parse(&p.alpha, &p.beta, p.lambda, p.normalization).map_err(serde::de::Error::custom)
    }
}

/// Outcome of checking (alpha, beta, lambda) against the existence criteria.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Classification {
    /// Half-integer indices, lambda = r(r+1), alpha + beta + r even and |alpha - beta| < r.
    Solvable { r: u32 },
    LambdaNotTriangular,
    NotHalfInteger,
    /// lambda = r(r+1) and half-integer indices, but the parity or size
    /// condition fails; a solve is still attempted.
    OutsideConjecturedSet { r: u32 },
}

pub fn classify_params(alpha: &Rational, beta: &Rational, lambda: &Rational) -> Classification {
    let (Some(a2), Some(b2)) = (twice_half_integer(alpha), twice_half_integer(beta)) else {
        return Classification::NotHalfInteger;
    };
    if a2 < 3 || b2 < 3 {
        return Classification::NotHalfInteger;
    }
    let r = match lambda.is_integer().then(|| lambda.to_integer().to_i64()).flatten().and_then(triangular_root) {
        Some(r) => r,
        None => return Classification::LambdaNotTriangular,
    };
    // alpha + beta + r even  <=>  (a2 + b2)/2 + r even
    let parity = ((a2 + b2) / 2 + r) % 2 == 0;
    let close = (a2 as i64 - b2 as i64).unsigned_abs() < 2 * r as u64;
    if parity && close {
        Classification::Solvable { r }
    } else {
        Classification::OutsideConjecturedSet { r }
    }
}

/// Gamma(s) = g sqrt(pi) for half-integer s; returns g.
fn gamma_coefficient(s2: u32) -> Rational {
    let g = gamma_half(s2);
    debug_assert!(g.has_sqrt_pi);
    g.rational
}

/// sqrt(pi) Gamma(s - 1/2) / Gamma(s), rational for half-integer s.
pub fn zeroth_ratio(s2: u32) -> Rational {
    gamma_half(s2 - 1).rational / gamma_coefficient(s2)
}

/// zeta(2s) a_{n,s}(y), the Fourier coefficient with the zeta(2s) normalization removed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EisensteinCoeff {
    pub s2: u32,
    pub n: i64,
    /// For n != 0: 2 pi^{s - 1/2} / g |n|^{s - 1/2} sigma_{1-2s}(|n|) with Gamma(s) = g sqrt(pi),
    /// multiplying sqrt(y) K_{s-1/2}(2 pi |n| y). For n = 0: 1.
    pub prefactor: Constant,
    /// sigma_{1-2s}(|n|), already inside `prefactor`; 1 for n = 0.
    #[serde(with = "serde_util::rational")]
    pub sigma: Rational,
    /// For n = 0: (coefficient, twice the y exponent) for zeta(2s) y^s and
    /// sqrt(pi) Gamma(s-1/2) zeta(2s-1) / Gamma(s) y^{1-s}.
    pub powers: Vec<(Constant, i32)>,
    /// For n != 0: the Bessel index s - 1/2.
    pub bessel_index: Option<u32>,
    /// The argument 2s of the zeta value divided out of a_{n,s}.
    pub zeta_denominator: u32,
}

pub fn eisenstein_coeff(s2: u32, n: i64) -> Result<EisensteinCoeff, SourceError> {
    if s2 % 2 == 0 || s2 < 3 {
        return Err(SourceError::BadIndex(half_string(s2)));
    }
    let zeta_2s = zeta_value(s2 as i64).expect("odd argument >= 3");
    if n == 0 {
        let second = zeta_value(s2 as i64 - 1).expect("even argument").scale(&zeroth_ratio(s2));
        return Ok(EisensteinCoeff {
            s2,
            n,
            prefactor: Constant::one(),
            sigma: Rational::one(),
            powers: vec![(zeta_2s, s2 as i32), (second, 2 - s2 as i32)],
            bessel_index: None,
            zeta_denominator: s2,
        });
    }
    let m = (s2 - 1) / 2; // s - 1/2
    let sig = sigma(1 - s2 as i64, n.unsigned_abs())?;
    let coeff = Rational::from_integer(2.into()) / gamma_coefficient(s2)
        * Rational::from_integer(BigInt::from(n.abs()).pow(m))
        * &sig;
    Ok(EisensteinCoeff {
        s2,
        n,
        prefactor: Constant::pi_term(coeff, m as i32),
        sigma: sig,
        powers: Vec::new(),
        bessel_index: Some(m),
        zeta_denominator: s2,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    BothZero,
    LeftZero,
    RightZero,
    Generic,
    AntiDiagonal,
}

pub fn case_tag(n1: i64, n2: i64) -> CaseTag {
    match (n1 == 0, n2 == 0) {
        (true, true) => CaseTag::BothZero,
        (true, false) => CaseTag::LeftZero,
        (false, true) => CaseTag::RightZero,
        _ if n1 + n2 == 0 => CaseTag::AntiDiagonal,
        _ => CaseTag::Generic,
    }
}

/// kappa Gamma/pi factor x sigma values x integer powers of |n1|, |n2|.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prefactor {
    pub constant: Constant,
    /// sigma_{1-2a}(|n1|), sigma_{1-2b}(|n2|); 1 on a zero side
    #[serde(with = "serde_util::rational_pair")]
    pub sigma: [Rational; 2],
    /// |n1|^{a-1/2} |n2|^{b-1/2} over the nonzero sides
    #[serde(with = "serde_util::bigint")]
    pub power: BigInt,
}

impl Prefactor {
    pub fn value(&self) -> Constant {
        self.constant.scale(&(&self.sigma[0] * &self.sigma[1] * Rational::from_integer(self.power.clone())))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceTerm {
    pub n1: i64,
    pub n2: i64,
    pub prefactor: Prefactor,
    /// Uses K_0 and K_1 only.
    pub core: BesselExpr,
    pub case_tag: CaseTag,
}

impl SourceTerm {
    /// prefactor x core as a single expression.
    pub fn expr(&self) -> BesselExpr {
        self.core.scale(&self.prefactor.value())
    }
}

/// y^a K_m(2 pi |n| y) in the K_0, K_1 basis.
fn reduced_bessel(m: u32, n: i64) -> [YLaurent; 2] {
    reduce_k_index(m).in_y(n)
}

/// Single-Bessel source: the zero side has index `zero2`, the other `other2` at frequency n.
/// Returns the prefactor with the sigma value in slot 0, and the core.
fn single_source(p: &Params, zero2: u32, other2: u32, n: i64) -> Result<(Prefactor, BesselExpr), SourceError> {
    let kappa = p.kappa()?;
    let zero = eisenstein_coeff(zero2, 0)?;
    let other = eisenstein_coeff(other2, n)?;
    let m = other.bessel_index.expect("nonzero mode");
    let k = reduced_bessel(m, n);
    // (sum_t c_t y^{e_t}) * sqrt(y) K_m: exponents (e_t + 1) / 2 are integers
    let mut poly = YLaurent::zero();
    for (c, e2) in &zero.powers {
        poly.add_term((e2 + 1) / 2, 0, c.clone());
    }
    let mut s = SingleBessel::zero(n);
    for j in 0..2 {
        s.p[j] = poly.mul(&k[j]).expect("no logs");
    }
    let g = gamma_coefficient(other2);
    let constant = Constant::pi_term(kappa * Rational::from_integer(2.into()) / g, m as i32);
    let power = BigInt::from(n.abs()).pow(m);
    Ok((Prefactor { constant, sigma: [other.sigma, Rational::one()], power }, BesselExpr::Single(s)))
}

/// s_{n1,n2} for the given parameters.
pub fn source_term(p: &Params, n1: i64, n2: i64) -> Result<SourceTerm, SourceError> {
    let tag = case_tag(n1, n2);
    let kappa = p.kappa()?;
    let (prefactor, core) = match tag {
        CaseTag::BothZero => {
            let a = eisenstein_coeff(p.alpha2, 0)?;
            let b = eisenstein_coeff(p.beta2, 0)?;
            let mut f = YLaurent::zero();
            for (ca, ea) in &a.powers {
                for (cb, eb) in &b.powers {
                    f.add_term((ea + eb) / 2, 0, ca * cb);
                }
            }
            let pre = Prefactor {
                constant: Constant::rational(kappa),
                sigma: [Rational::one(), Rational::one()],
                power: BigInt::one(),
            };
            (pre, BesselExpr::pure(f))
        }
        CaseTag::LeftZero => {
            let (mut pre, core) = single_source(p, p.alpha2, p.beta2, n2)?;
            pre.sigma.swap(0, 1);
            (pre, core)
        }
        CaseTag::RightZero => {
            single_source(p, p.beta2, p.alpha2, n1)?
        }
        CaseTag::Generic | CaseTag::AntiDiagonal => {
            let a = eisenstein_coeff(p.alpha2, n1)?;
            let b = eisenstein_coeff(p.beta2, n2)?;
            let (ma, mb) = (a.bessel_index.unwrap(), b.bessel_index.unwrap());
            let ka = reduced_bessel(ma, n1);
            let kb = reduced_bessel(mb, n2);
            let mut d = DoubleBessel::zero(n1, n2);
            for i in 0..2 {
                for j in 0..2 {
                    d.q[i][j] = ka[i].mul(&kb[j]).expect("no logs").mul_y_pow(1);
                }
            }
            // 4 kappa pi^{a+b} / (Gamma(a) Gamma(b)) = 4 kappa / (g_a g_b) pi^{a+b-1}
            let c = Rational::from_integer(4.into()) * kappa / (gamma_coefficient(p.alpha2) * gamma_coefficient(p.beta2));
            let pre = Prefactor {
                constant: Constant::pi_term(c, (ma + mb) as i32),
                sigma: [a.sigma, b.sigma],
                power: BigInt::from(n1.abs()).pow(ma) * BigInt::from(n2.abs()).pow(mb),
            };
            (pre, BesselExpr::Double(d.fold()))
        }
    };
    Ok(SourceTerm { n1, n2, prefactor, core, case_tag: tag })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar_ring::{ratio, zeta_even, Symbol};

    fn p(a2: u32, b2: u32, lambda: i64, norm: Normalization) -> Params {
        Params::new(a2, b2, triangular_root(lambda).unwrap(), norm).unwrap()
    }

    #[test]
    fn classification_examples() {
        let q = |a: i64, b: i64, l: i64| classify_params(&ratio(a, 2), &ratio(b, 2), &ratio(l, 1));
        assert_eq!(q(3, 5, 20), Classification::Solvable { r: 4 });
        assert_eq!(q(3, 3, 10), Classification::LambdaNotTriangular);
        assert_eq!(q(4, 3, 12), Classification::NotHalfInteger);
        assert_eq!(q(3, 3, 2), Classification::Solvable { r: 1 });
        assert_eq!(q(3, 3, 6), Classification::OutsideConjecturedSet { r: 2 });
        assert_eq!(q(3, 7, 2), Classification::OutsideConjecturedSet { r: 1 });
    }

    #[test]
    fn zeroth_coefficient_three_halves() {
        let e = eisenstein_coeff(3, 0).unwrap();
        // zeta(3) y^{3/2} + 2 zeta(2) y^{-1/2}
        assert_eq!(e.powers[0], (Constant::symbol(Symbol::Zeta(3)), 3));
        assert_eq!(e.powers[1], (zeta_even(2).unwrap().scale(&ratio(2, 1)), -1));
    }

    #[test]
    fn nonzero_coefficient_values() {
        // 2 pi^{3/2} / (sqrt(pi)/2) |n| sigma_{-2}(|n|) = 4 pi |n| sigma_{-2}(|n|)
        let e = eisenstein_coeff(3, -2).unwrap();
        assert_eq!(e.prefactor, Constant::pi_term(ratio(4 * 2 * 5, 4), 1));
        assert_eq!(e.bessel_index, Some(1));
        let e = eisenstein_coeff(5, 2).unwrap();
        assert_eq!(e.sigma, ratio(17, 16));
    }

    #[test]
    fn generic_prefactor_matches_printed_form() {
        // -64 pi^2 sigma_2(1) sigma_2(2) / |1 * 2|
        let s = source_term(&p(3, 3, 30, Normalization::PaperC), 1, 2).unwrap();
        assert_eq!(s.prefactor.value(), Constant::pi_term(ratio(-64 * 5, 2), 2));
        assert_eq!(s.case_tag, CaseTag::Generic);
        let BesselExpr::Double(d) = &s.core else { panic!() };
        assert_eq!(d.q[1][1], YLaurent::power(Constant::one(), 1));
        // -64 pi^3 |n1| |n2|^2 sigma_{-2} sigma_{-4} for (3/2, 5/2)
        let s = source_term(&p(3, 5, 20, Normalization::PaperC), 2, 1).unwrap();
        assert_eq!(s.prefactor.value(), Constant::pi_term(ratio(-64 * 2 * 5, 4), 3));
    }

    #[test]
    fn single_source_shape() {
        let s = source_term(&p(3, 3, 30, Normalization::PaperC), 0, 3).unwrap();
        assert_eq!(s.case_tag, CaseTag::LeftZero);
        // -16 pi sigma_2(3) / 3
        assert_eq!(s.prefactor.value(), Constant::pi_term(ratio(-16 * 10, 3), 1));
        let BesselExpr::Single(b) = &s.core else { panic!() };
        assert!(b.p[0].is_zero());
        assert_eq!(b.p[1].coeff(2, 0), Constant::symbol(Symbol::Zeta(3)));
        assert_eq!(b.p[1].coeff(0, 0), zeta_even(2).unwrap().scale(&ratio(2, 1)));
    }

    #[test]
    fn zero_mode_source() {
        let s = source_term(&p(3, 3, 30, Normalization::PaperC), 0, 0).unwrap();
        let BesselExpr::Pure { f } = s.expr() else { panic!() };
        let z3 = Constant::symbol(Symbol::Zeta(3));
        assert_eq!(f.coeff(3, 0), (&z3 * &z3).scale(&ratio(-4, 1)));
        assert_eq!(f.coeff(-1, 0), Constant::pi_term(ratio(-4 * 4, 36), 4));
    }

    #[test]
    fn swapped_parameters_transpose() {
        let a = source_term(&p(3, 5, 20, Normalization::CurlyE), 2, -3).unwrap();
        let b = source_term(&p(5, 3, 20, Normalization::CurlyE), -3, 2).unwrap();
        assert_eq!(a.prefactor.value(), b.prefactor.value());
        let (BesselExpr::Double(x), BesselExpr::Double(y)) = (&a.core, &b.core) else { panic!() };
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(x.q[i][j], y.q[j][i]);
            }
        }
    }

    #[test]
    fn paper_constant_needed() {
        let q = p(5, 7, 30, Normalization::PaperC);
        assert!(matches!(q.kappa(), Err(SourceError::NoPaperConstant(..))));
        assert_eq!(q.with_normalization(Normalization::CurlyE).kappa().unwrap(), ratio(-4, 1));
    }

    #[test]
    fn params_round_trip() {
        let q = p(3, 7, 30, Normalization::PaperC);
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(serde_json::from_str::<Params>(&s).unwrap(), q);
        assert!(s.contains("\"alpha\":\"3/2\""));
    }
}
