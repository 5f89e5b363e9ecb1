use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;

use super::{Constant, Rational, ScalarError, Symbol, SymbolMonomial};

static BERNOULLI: Lazy<Mutex<Vec<Rational>>> = Lazy::new(|| Mutex::new(vec![Rational::one()]));

fn binomial(n: usize, k: usize) -> BigInt {
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    c
}

/// Bernoulli number B_n with B_1 = -1/2.
pub fn bernoulli(n: usize) -> Rational {
    let mut table = BERNOULLI.lock().unwrap();
    while table.len() <= n {
        let m = table.len();
        // sum_{j=0}^{m} C(m+1, j) B_j = 0
        let mut acc = Rational::zero();
        for (j, b) in table.iter().enumerate() {
            acc += Rational::from_integer(binomial(m + 1, j)) * b;
        }
        let next = -acc / Rational::from_integer(BigInt::from(m + 1));
        table.push(next);
    }
    table[n].clone()
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

/// zeta(k) = (-1)^{k/2+1} B_k (2 pi)^k / (2 k!) for even k >= 2.
pub fn zeta_even(k: i64) -> Result<Constant, ScalarError> {
    if k < 2 || k % 2 != 0 {
        return Err(ScalarError::OddArgument(k));
    }
    let b = bernoulli(k as usize);
    let sign = if (k / 2) % 2 == 1 { Rational::one() } else { -Rational::one() };
    let two_k = Rational::from_integer(BigInt::one() << k as usize);
    let c = sign * b * two_k / Rational::from_integer(BigInt::from(2) * factorial(k as u64));
    Ok(Constant::pi_term(c, k as i32))
}

/// Exact zeta value at an integer: symbolic at odd k >= 3, a multiple of a
/// pi power at even k >= 2, and rational at k <= 0.
pub fn zeta_value(k: i64) -> Result<Constant, ScalarError> {
    if k == 1 {
        return Err(ScalarError::ZetaPole);
    }
    if k >= 2 && k % 2 == 0 {
        return zeta_even(k);
    }
    if k >= 3 {
        return Ok(Constant::symbol(Symbol::Zeta(k as u32)));
    }
    if k == 0 {
        return Ok(Constant::frac(-1, 2));
    }
    // zeta(-m) = -B_{m+1}/(m+1)
    let m = (-k) as usize;
    let b = bernoulli(m + 1);
    Ok(Constant::rational(-b / Rational::from_integer(BigInt::from(m + 1))))
}

/// Gamma at a positive half-integer s = h/2 (h odd): Gamma(s) = c sqrt(pi).
/// At an integer s = h/2 (h even): Gamma(s) = (s-1)!.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfGamma {
    pub rational: Rational,
    pub has_sqrt_pi: bool,
}

pub fn gamma_half(twice_s: u32) -> HalfGamma {
    assert!(twice_s > 0, "Gamma has a pole at 0");
    if twice_s % 2 == 0 {
        return HalfGamma { rational: Rational::from_integer(factorial((twice_s / 2 - 1) as u64)), has_sqrt_pi: false };
    }
    // Gamma(1/2) = sqrt(pi), Gamma(s+1) = s Gamma(s)
    let mut c = Rational::one();
    let mut t = 1u32;
    while t < twice_s {
        c *= Rational::new(BigInt::from(t), BigInt::from(2));
        t += 2;
    }
    HalfGamma { rational: c, has_sqrt_pi: true }
}

/// Trial division, with a Miller-Rabin fallback for the cofactor.
pub fn factor_u64(mut n: u64) -> Result<Vec<(u64, u32)>, ScalarError> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p < (1 << 20) && p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        if p * p > n || is_prime_u64(n) {
            out.push((n, 1));
        } else {
            return Err(ScalarError::FactorizationTooHard(n.to_string()));
        }
    }
    Ok(out)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if a % n == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// log(q) for a positive rational as a combination of prime logarithms.
pub fn log_normalize(q: &Rational) -> Result<Constant, ScalarError> {
    if !q.is_positive() {
        return Err(ScalarError::NonPositiveLog);
    }
    let mut out = Constant::zero();
    for (part, sign) in [(q.numer(), 1i64), (q.denom(), -1i64)] {
        let v = part.to_u64().ok_or_else(|| ScalarError::FactorizationTooHard(part.to_string()))?;
        for (p, e) in factor_u64(v)? {
            out.add_term(
                SymbolMonomial::single(Symbol::LnPrime(p), 1)?,
                Rational::from_integer(BigInt::from(sign * e as i64)),
            );
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar_ring::ratio;

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(1), ratio(-1, 2));
        assert_eq!(bernoulli(2), ratio(1, 6));
        assert_eq!(bernoulli(3), Rational::zero());
        assert_eq!(bernoulli(12), ratio(-691, 2730));
    }

    #[test]
    fn zeta_even_table() {
        assert_eq!(zeta_even(2).unwrap(), Constant::pi_term(ratio(1, 6), 2));
        assert_eq!(zeta_even(4).unwrap(), Constant::pi_term(ratio(1, 90), 4));
        assert_eq!(zeta_even(6).unwrap(), Constant::pi_term(ratio(1, 945), 6));
        assert_eq!(zeta_even(8).unwrap(), Constant::pi_term(ratio(1, 9450), 8));
        assert_eq!(zeta_even(12).unwrap(), Constant::pi_term(ratio(691, 638512875), 12));
        assert!(zeta_even(3).is_err());
    }

    #[test]
    fn zeta_at_nonpositive() {
        assert_eq!(zeta_value(0).unwrap(), Constant::frac(-1, 2));
        assert_eq!(zeta_value(-1).unwrap(), Constant::frac(-1, 12));
        assert_eq!(zeta_value(-2).unwrap(), Constant::zero());
        assert_eq!(zeta_value(1), Err(ScalarError::ZetaPole));
    }

    #[test]
    fn gamma_half_values() {
        assert_eq!(gamma_half(3), HalfGamma { rational: ratio(1, 2), has_sqrt_pi: true });
        assert_eq!(gamma_half(7), HalfGamma { rational: ratio(15, 8), has_sqrt_pi: true });
        assert_eq!(gamma_half(8), HalfGamma { rational: ratio(6, 1), has_sqrt_pi: false });
    }

    #[test]
    fn log_of_rational() {
        let c = log_normalize(&ratio(12, 5)).unwrap();
        let mut expect = Constant::zero();
        expect.add_term(SymbolMonomial::single(Symbol::LnPrime(2), 1).unwrap(), ratio(2, 1));
        expect.add_term(SymbolMonomial::single(Symbol::LnPrime(3), 1).unwrap(), ratio(1, 1));
        expect.add_term(SymbolMonomial::single(Symbol::LnPrime(5), 1).unwrap(), ratio(-1, 1));
        assert_eq!(c, expect);
        assert!(log_normalize(&ratio(-1, 2)).is_err());
        assert_eq!(log_normalize(&ratio(1, 1)).unwrap(), Constant::zero());
    }
}
