//! Fixed-point evaluation of the ring's transcendental atoms.
//!
//! Exact coefficients can cancel to many digits (prime logarithms with
//! large rational weights), so constants are evaluated with a 384-bit
//! fixed-point mantissa before rounding to f64.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;

use crate::scalar_ring::{bernoulli, rational_to_f64, Constant, Rational, Symbol};

pub const PREC: usize = 384;

/// Value v / 2^PREC.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixed(pub BigInt);

impl Fixed {
    pub fn zero() -> Self {
        Fixed(BigInt::zero())
    }

    pub fn one() -> Self {
        Fixed(BigInt::one() << PREC)
    }

    pub fn from_int(i: i64) -> Self {
        Fixed(BigInt::from(i) << PREC)
    }

    pub fn from_rational(r: &Rational) -> Self {
        Fixed((r.numer() << PREC) / r.denom())
    }

    pub fn add(&self, o: &Fixed) -> Fixed {
        Fixed(&self.0 + &o.0)
    }

    pub fn sub(&self, o: &Fixed) -> Fixed {
        Fixed(&self.0 - &o.0)
    }

    pub fn mul(&self, o: &Fixed) -> Fixed {
        Fixed((&self.0 * &o.0) >> PREC)
    }

    pub fn div(&self, o: &Fixed) -> Fixed {
        Fixed((&self.0 << PREC) / &o.0)
    }

    pub fn mul_int(&self, k: i64) -> Fixed {
        Fixed(&self.0 * BigInt::from(k))
    }

    pub fn div_int(&self, k: i64) -> Fixed {
        Fixed(&self.0 / BigInt::from(k))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&Rational::new(self.0.clone(), BigInt::one() << PREC))
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.0.clone(), BigInt::one() << PREC)
    }
}

/// atanh(u) for |u| < 1 by its Taylor series.
fn atanh(u: &Fixed) -> Fixed {
    let u2 = u.mul(u);
    let mut pow = u.clone();
    let mut acc = Fixed::zero();
    let mut k = 1i64;
    while !pow.is_zero() {
        acc = acc.add(&pow.div_int(k));
        pow = pow.mul(&u2);
        k += 2;
    }
    acc
}

fn atan_recip(m: i64) -> Fixed {
    // sum (-1)^j / ((2j+1) m^{2j+1})
    let mut p = Fixed::one().div_int(m);
    let m2 = m * m;
    let mut acc = Fixed::zero();
    let mut k = 1i64;
    let mut sign = 1;
    while !p.is_zero() {
        let t = p.div_int(k);
        acc = if sign > 0 { acc.add(&t) } else { acc.sub(&t) };
        p = p.div_int(m2);
        k += 2;
        sign = -sign;
    }
    acc
}

static CACHE: Lazy<Mutex<HashMap<String, Fixed>>> = Lazy::new(|| Mutex::new(HashMap::new()));

fn cached(key: &str, f: impl FnOnce() -> Fixed) -> Fixed {
    if let Some(v) = CACHE.lock().unwrap().get(key) {
        return v.clone();
    }
    let v = f();
    CACHE.lock().unwrap().insert(key.to_string(), v.clone());
    v
}

pub fn pi() -> Fixed {
    cached("pi", || atan_recip(5).mul_int(16).sub(&atan_recip(239).mul_int(4)))
}

pub fn ln2() -> Fixed {
    cached("ln2", || atanh(&Fixed::one().div_int(3)).mul_int(2))
}

/// Natural log of a positive fixed-point number.
pub fn ln_fixed(x: &Fixed) -> Fixed {
    assert!(x.0.is_positive(), "log of non-positive value");
    let bits = x.0.bits() as i64;
    let k = bits - 1 - PREC as i64;
    let m = if k >= 0 { Fixed(&x.0 >> k as usize) } else { Fixed(&x.0 << (-k) as usize) };
    let u = m.sub(&Fixed::one()).div(&m.add(&Fixed::one()));
    ln2().mul_int(k).add(&atanh(&u).mul_int(2))
}

pub fn ln_rational(r: &Rational) -> Fixed {
    assert!(r.is_positive(), "log of non-positive value");
    let k = r.numer().bits() as i64 - r.denom().bits() as i64;
    let scaled = if k >= 0 {
        r / Rational::from_integer(BigInt::one() << k as usize)
    } else {
        r * Rational::from_integer(BigInt::one() << (-k) as usize)
    };
    let one = Rational::one();
    let u = (&scaled - &one) / (&scaled + &one);
    ln2().mul_int(k).add(&atanh(&Fixed::from_rational(&u)).mul_int(2))
}

pub fn ln_int(n: u64) -> Fixed {
    cached(&format!("ln{n}"), || ln_rational(&Rational::from_integer(BigInt::from(n))))
}

pub fn ln_pi() -> Fixed {
    cached("lnpi", || ln_fixed(&pi()))
}

/// Euler's constant by the Brent-McMillan formula with n = 128.
pub fn euler_gamma() -> Fixed {
    cached("gamma", || {
        let n: i64 = 128;
        let n2 = n * n;
        let mut a = ln2().mul_int(7).mul_int(-1);
        let mut b = Fixed::one();
        let mut u = a.clone();
        let mut v = b.clone();
        let mut k: i64 = 1;
        loop {
            b = b.mul_int(n2).div_int(k * k);
            a = a.mul_int(n2).div_int(k).add(&b).div_int(k);
            u = u.add(&a);
            v = v.add(&b);
            if k > n && a.is_zero() && b.is_zero() {
                break;
            }
            k += 1;
        }
        u.div(&v)
    })
}

const EM_N: i64 = 64;
const EM_TERMS: usize = 80;

fn rising(s: i64, len: usize) -> BigInt {
    (0..len as i64).fold(BigInt::one(), |acc, j| acc * BigInt::from(s + j))
}

fn factorial(n: usize) -> BigInt {
    (1..=n as i64).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

/// zeta(s) for integer s >= 2 by Euler-Maclaurin summation.
pub fn zeta(s: i64) -> Fixed {
    assert!(s >= 2, "zeta evaluation needs s >= 2");
    cached(&format!("zeta{s}"), || {
        let n_big = BigInt::from(EM_N);
        let mut acc = Rational::zero();
        for n in 1..EM_N {
            acc += Rational::new(BigInt::one(), BigInt::from(n).pow(s as u32));
        }
        acc += Rational::new(BigInt::one(), n_big.pow((s - 1) as u32) * BigInt::from(s - 1));
        acc += Rational::new(BigInt::one(), n_big.pow(s as u32) * BigInt::from(2));
        for k in 1..=EM_TERMS {
            let b = bernoulli(2 * k);
            let coeff = b * Rational::from_integer(rising(s, 2 * k - 1))
                / Rational::from_integer(factorial(2 * k) * n_big.pow((s as usize + 2 * k - 1) as u32));
            acc += coeff;
        }
        Fixed::from_rational(&acc)
    })
}

/// zeta'(s) for integer s >= 2 by Euler-Maclaurin summation of -sum ln(n)/n^s.
pub fn zeta_prime(s: i64) -> Fixed {
    assert!(s >= 2, "zeta' evaluation needs s >= 2");
    cached(&format!("zetap{s}"), || {
        let mut acc = Fixed::zero();
        for n in 2..EM_N {
            acc = acc.add(&ln_int(n as u64).div(&Fixed(BigInt::from(n).pow(s as u32) << PREC)));
        }
        let ln_n = ln_int(EM_N as u64);
        let n_pow = |e: i64| Fixed(BigInt::from(EM_N).pow(e as u32) << PREC);
        // integral from N to infinity of ln(x) x^{-s}
        let sm1 = s - 1;
        let integral = ln_n.div_int(sm1).add(&Fixed::one().div_int(sm1 * sm1)).div(&n_pow(sm1));
        acc = acc.add(&integral);
        acc = acc.add(&ln_n.div(&n_pow(s)).div_int(2));
        // f^{(j)}(x) = x^{-s-j} (a_j ln x + b_j)
        let mut a = BigInt::one();
        let mut b = BigInt::zero();
        for j in 0..(2 * EM_TERMS) {
            let jj = j as i64;
            let na = -BigInt::from(s + jj) * &a;
            let nb = -BigInt::from(s + jj) * &b + &a;
            a = na;
            b = nb;
            let order = jj + 1;
            if order % 2 == 1 {
                let k = ((order + 1) / 2) as usize;
                let bern = bernoulli(2 * k);
                let deriv = ln_n
                    .mul(&Fixed(a.clone() << PREC))
                    .add(&Fixed(b.clone() << PREC))
                    .div(&n_pow(s + order));
                let w = Fixed::from_rational(&(bern / Rational::from_integer(factorial(2 * k))));
                acc = acc.sub(&w.mul(&deriv));
            }
        }
        Fixed(-acc.0)
    })
}

fn sqrt_fixed(m: u64) -> Fixed {
    cached(&format!("sqrt{m}"), || Fixed((BigInt::from(m) << (2 * PREC)).sqrt()))
}

pub fn symbol_value(s: Symbol) -> Fixed {
    match s {
        Symbol::Pi => pi(),
        Symbol::EulerGamma => euler_gamma(),
        Symbol::LnPi => ln_pi(),
        Symbol::LnPrime(p) => ln_int(p),
        Symbol::Zeta(k) => zeta(k as i64),
        Symbol::ZetaPrime(m) => zeta_prime(m as i64),
        Symbol::Sqrt(m) => sqrt_fixed(m),
    }
}

fn fixed_pow(base: &Fixed, e: i32) -> Fixed {
    let mut out = Fixed::one();
    for _ in 0..e.unsigned_abs() {
        out = out.mul(base);
    }
    if e < 0 {
        Fixed::one().div(&out)
    } else {
        out
    }
}

/// High-precision value of an exact constant.
pub fn eval_fixed(c: &Constant) -> Fixed {
    let mut acc = Fixed::zero();
    for (m, r) in c.terms() {
        // keep the rational exact until the end of the monomial
        let mut v = Fixed::one();
        for (s, e) in m.iter() {
            v = v.mul(&fixed_pow(&symbol_value(*s), *e));
        }
        acc = acc.add(&Fixed((v.0 * r.numer()) / r.denom()));
    }
    acc
}

/// Whether every symbol in the constant has a numeric evaluator.
pub fn is_evaluable(c: &Constant) -> bool {
    c.terms().all(|(m, _)| {
        m.iter().all(|(s, _)| match s {
            Symbol::ZetaPrime(k) => *k >= 2,
            Symbol::Zeta(k) => *k >= 2,
            _ => true,
        })
    })
}

pub fn eval_f64(c: &Constant) -> f64 {
    if let Some(r) = c.as_rational() {
        return rational_to_f64(&r);
    }
    eval_fixed(c).to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn digits(x: &Fixed, n: usize) -> String {
        let scaled = (&x.0 * BigInt::from(10).pow(n as u32)) >> PREC;
        scaled.to_string()
    }

    #[test]
    fn known_digits() {
        assert_eq!(digits(&pi(), 40), "31415926535897932384626433832795028841971");
        assert_eq!(digits(&ln2(), 40), "6931471805599453094172321214581765680755");
        assert_eq!(digits(&euler_gamma(), 40), "5772156649015328606065120900824024310421");
        assert_eq!(digits(&zeta(3), 40), "12020569031595942853997381615114499907649");
        let diff = zeta(2).sub(&pi().mul(&pi()).div_int(6));
        assert!(diff.0.abs().bits() < (PREC - 300) as u64);
        // zeta'(2) = -0.93754825431584375370257409456786497789786028861482992...
        assert_eq!(digits(&Fixed(-zeta_prime(2).0), 40), "9375482543158437537025740945678649778978");
    }

    #[test]
    fn ln_pi_value() {
        assert!((ln_pi().to_f64() - std::f64::consts::PI.ln()).abs() < 1e-15);
    }
}
