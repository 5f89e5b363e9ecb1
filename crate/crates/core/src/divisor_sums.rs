//! Divisor functions and the convolution identities
//! sum_{n>=1} sigma_a(n) sigma_b(n) n^{-s} = zeta(s) zeta(s-a) zeta(s-b) zeta(s-a-b) / zeta(2s-a-b)
//! together with their s-derivative.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::numeric_verify::eval_f64;
use crate::scalar_ring::{factor_u64, zeta_value, Constant, Rational, ScalarError, Symbol};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DivisorError {
    #[error("sigma needs n >= 1")]
    ZeroArgument,
    #[error("zeta pole at argument 1 ({0})")]
    PoleEncountered(String),
    #[error("zeta({0}) in the denominator is not invertible in the scalar ring")]
    DenominatorNotInvertible(i64),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// sigma_z(n) = sum_{d | n} d^z, exact for every integer z.
pub fn sigma(z: i64, n: u64) -> Result<Rational, DivisorError> {
    if n == 0 {
        return Err(DivisorError::ZeroArgument);
    }
    let k = z.unsigned_abs() as u32;
    let mut total = BigInt::one();
    for (p, e) in factor_u64(n)? {
        let p = BigInt::from(p);
        // 1 + p^k + ... + p^{ek}
        let pk = p.pow(k);
        let mut term = BigInt::one();
        let mut sum = BigInt::one();
        for _ in 0..e {
            term *= &pk;
            sum += &term;
        }
        total *= sum;
    }
    if z >= 0 {
        Ok(Rational::from_integer(total))
    } else {
        Ok(Rational::new(total, BigInt::from(n).pow(k)))
    }
}

/// sigma_z(1..=n) in floating point by a divisor sieve.
pub fn sigma_table_f64(z: i64, n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n + 1];
    for d in 1..=n {
        let dz = (d as f64).powi(z as i32);
        let mut m = d;
        while m <= n {
            t[m] += dz;
            m += d;
        }
    }
    t
}

/// Whether the Dirichlet series converges absolutely at s.
pub fn in_convergence_region(a: i64, b: i64, s: i64) -> bool {
    s > 1 && s - a > 1 && s - b > 1 && s - a - b > 1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionValue {
    /// Two-sided sum over n in Z \ {0}; absent when a formal evaluation hits a pole.
    pub value: Option<Constant>,
    /// The identity was applied outside its convergence region.
    pub formal: bool,
}

fn zeta_args(a: i64, b: i64, s: i64) -> ([i64; 4], i64) {
    ([s, s - a, s - b, s - a - b], 2 * s - a - b)
}

fn zeta_or_pole(k: i64) -> Result<Constant, DivisorError> {
    match zeta_value(k) {
        Err(ScalarError::ZetaPole) => Err(DivisorError::PoleEncountered(format!("zeta({k})"))),
        other => Ok(other?),
    }
}

fn inverse_zeta(d: i64) -> Result<Constant, DivisorError> {
    let z = zeta_or_pole(d)?;
    if z.is_zero() {
        return Err(DivisorError::DenominatorNotInvertible(d));
    }
    z.inv().map_err(|_| DivisorError::DenominatorNotInvertible(d))
}

/// 2 zeta(s) zeta(s-a) zeta(s-b) zeta(s-a-b) / zeta(2s-a-b).
pub fn ramanujan_convolution(a: i64, b: i64, s: i64) -> Result<ConvolutionValue, DivisorError> {
    let (args, d) = zeta_args(a, b, s);
    let mut value = Constant::int(2);
    for k in args {
        value = &value * &zeta_or_pole(k)?;
    }
    value = &value * &inverse_zeta(d)?;
    Ok(ConvolutionValue { value: Some(value), formal: !in_convergence_region(a, b, s) })
}

/// zeta'(k), in closed form at k = 0 and at negative even k.
fn zeta_prime_symbol(k: i64) -> Result<Constant, DivisorError> {
    if k == 1 {
        return Err(DivisorError::PoleEncountered(format!("zeta'({k})")));
    }
    if k == 0 {
        // -log(2 pi) / 2
        let half = Rational::new((-1).into(), 2.into());
        return Ok((Constant::symbol(Symbol::LnPrime(2)) + Constant::symbol(Symbol::LnPi)).scale(&half));
    }
    if k < 0 && k % 2 == 0 {
        // zeta'(-2j) = (-1)^j (2j)! zeta(2j+1) / (2 (2 pi)^{2j})
        let j = (-k / 2) as u32;
        let fact: BigInt = (1..=2 * j as u64).map(BigInt::from).product();
        let sign = if j % 2 == 1 { -1 } else { 1 };
        let c = Rational::new(fact * sign, BigInt::from(2) * BigInt::from(2).pow(2 * j));
        return Ok(Constant::pi_term(c, -2 * j as i32) * Constant::symbol(Symbol::Zeta(2 * j + 1)));
    }
    Ok(Constant::symbol(Symbol::ZetaPrime(k as i32)))
}

/// sum over n in Z \ {0} of sigma_a(|n|) sigma_b(|n|) log|n| / |n|^s
/// = -2 d/ds [zeta(s) zeta(s-a) zeta(s-b) zeta(s-a-b) / zeta(2s-a-b)].
pub fn ramanujan_log_convolution(a: i64, b: i64, s: i64) -> Result<ConvolutionValue, DivisorError> {
    let formal = !in_convergence_region(a, b, s);
    match log_convolution_value(a, b, s) {
        Ok(v) => Ok(ConvolutionValue { value: Some(v), formal }),
        Err(DivisorError::PoleEncountered(_)) if formal => Ok(ConvolutionValue { value: None, formal }),
        Err(e) => Err(e),
    }
}

fn log_convolution_value(a: i64, b: i64, s: i64) -> Result<Constant, DivisorError> {
    let (args, d) = zeta_args(a, b, s);
    let zetas: Vec<Constant> = args.iter().map(|&k| zeta_or_pole(k)).collect::<Result<_, _>>()?;
    let inv_d = inverse_zeta(d)?;
    let product = zetas.iter().fold(Constant::one(), |acc, z| &acc * z);
    // derivative of the numerator
    let mut dnum = Constant::zero();
    for i in 0..4 {
        let mut t = zeta_prime_symbol(args[i])?;
        for (j, z) in zetas.iter().enumerate() {
            if j != i {
                t = &t * z;
            }
        }
        dnum += &t;
    }
    // d/ds (N / Z(2s-a-b)) = N'/Z - 2 N Z'/Z^2
    let dz = zeta_prime_symbol(d)?;
    let two = Rational::from_integer(2.into());
    let deriv = &dnum * &inv_d - (&(&product * &dz) * &(&inv_d * &inv_d)).scale(&two);
    Ok(deriv.scale(&-two))
}

/// Two-sided partial sum 2 sum_{n=1}^{N} sigma_a(n) sigma_b(n) log(n)^l / n^s in floating point.
pub fn convolution_partial_sum(a: i64, b: i64, s: i64, log_power: u32, n_max: usize) -> f64 {
    let sa = sigma_table_f64(a, n_max);
    let sb = if a == b { sa.clone() } else { sigma_table_f64(b, n_max) };
    // sum small terms first
    let mut acc = 0.0;
    for n in (1..=n_max).rev() {
        let nf = n as f64;
        acc += sa[n] * sb[n] * nf.ln().powi(log_power as i32) * nf.powi(-(s as i32));
    }
    2.0 * acc
}

/// Numeric value of a convolution result, NaN when there is none.
pub fn convolution_f64(v: &ConvolutionValue) -> f64 {
    v.value.as_ref().map(eval_f64).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar_ring::{ratio, zeta_even};

    #[test]
    fn small_sigma_values() {
        assert_eq!(sigma(2, 4).unwrap(), ratio(21, 1));
        assert_eq!(sigma(2, 2).unwrap(), ratio(5, 1));
        assert_eq!(sigma(-4, 2).unwrap(), ratio(17, 16));
        assert_eq!(sigma(0, 12).unwrap(), ratio(6, 1));
        assert_eq!(sigma(3, 1).unwrap(), ratio(1, 1));
        assert!(sigma(1, 0).is_err());
    }

    #[test]
    fn convolution_printed_values() {
        let v = ramanujan_convolution(2, 2, 8).unwrap();
        assert_eq!(v.value.unwrap(), Constant::pi_term(ratio(143, 58769550), 12));
        assert!(!v.formal);
        // 2 zeta(10) zeta(8)^2 zeta(6) / zeta(16)
        let v = ramanujan_convolution(2, 2, 10).unwrap();
        assert_eq!(v.value.clone().unwrap(), Constant::pi_term(ratio(221, 9690214275), 16));
        // times 32/(175 pi^6) gives the zero-mode homogeneous total
        let total = v.value.unwrap() * Constant::pi_term(ratio(32, 175), -6);
        assert_eq!(total, Constant::pi_term(ratio(7072, 1695787498125), 10));
    }

    #[test]
    fn sigma_zero_convolution_matches_partial_sums() {
        let v = ramanujan_convolution(0, 0, 4).unwrap();
        let z4 = zeta_even(4).unwrap();
        let expect = &(&(&z4 * &z4) * &(&z4 * &z4)) * &zeta_even(8).unwrap().inv().unwrap();
        assert_eq!(v.value.clone().unwrap(), expect.scale(&ratio(2, 1)));
        let partial = convolution_partial_sum(0, 0, 4, 0, 20000);
        let exact = convolution_f64(&v);
        assert!(((partial - exact) / exact).abs() < 1e-8);
    }

    #[test]
    fn log_convolution_matches_partial_sums() {
        let v = ramanujan_log_convolution(2, 2, 8).unwrap();
        let partial = convolution_partial_sum(2, 2, 8, 1, 100_000);
        let exact = convolution_f64(&v);
        assert!(((partial - exact) / exact).abs() < 1e-6, "{partial} {exact}");
    }

    #[test]
    fn formal_region_flagged() {
        let v = ramanujan_log_convolution(2, 2, 5).unwrap();
        assert!(v.formal && v.value.is_none());
        assert!(ramanujan_convolution(2, 2, 4).unwrap().formal);
        assert!(!ramanujan_convolution(2, 2, 7).unwrap().formal);
        assert!(matches!(ramanujan_convolution(2, 2, 5), Err(DivisorError::PoleEncountered(_))));
        assert!(matches!(ramanujan_convolution(2, 2, 3), Err(DivisorError::PoleEncountered(_))));
    }

    #[test]
    fn log_convolution_symmetric() {
        assert_eq!(ramanujan_log_convolution(2, 4, 12).unwrap(), ramanujan_log_convolution(4, 2, 12).unwrap());
    }

    #[test]
    fn zeta_prime_closed_forms() {
        let z0 = eval_f64(&zeta_prime_symbol(0).unwrap());
        assert!((z0 + 0.918_938_533_204_672_7).abs() < 1e-15);
        let zm2 = eval_f64(&zeta_prime_symbol(-2).unwrap());
        assert!((zm2 + 0.030_448_457_058_393_27).abs() < 1e-15);
        let zm4 = eval_f64(&zeta_prime_symbol(-4).unwrap());
        assert!((zm4 - 0.007_983_811_450_268_625).abs() < 1e-15);
    }
}
