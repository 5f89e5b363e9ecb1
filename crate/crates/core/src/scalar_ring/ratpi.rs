use std::fmt;

use num_traits::{One, Zero};

use super::{Constant, Rational, ScalarError};

type Poly = Vec<Rational>;

fn trim(p: &mut Poly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn valuation(p: &Poly) -> usize {
    p.iter().position(|c| !c.is_zero()).unwrap_or(0)
}

fn padd(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![Rational::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    trim(&mut out);
    out
}

fn pneg(a: &Poly) -> Poly {
    a.iter().map(|c| -c.clone()).collect()
}

fn pmul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    trim(&mut out);
    out
}

fn pdivrem(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let mut r = a.clone();
    let db = b.len() - 1;
    let lead = b[db].clone();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![Rational::zero(); r.len() - db];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = r[r.len() - 1].clone() / &lead;
        for (i, y) in b.iter().enumerate() {
            r[shift + i] -= &c * y;
        }
        q[shift] = c;
        trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    trim(&mut q);
    (q, r)
}

fn monic(p: &Poly) -> Poly {
    let lead = p.last().unwrap().clone();
    p.iter().map(|c| c / &lead).collect()
}

fn pgcd(a: &Poly, b: &Poly) -> Poly {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_empty() {
        let (_, r) = pdivrem(&x, &y);
        x = y;
        y = r;
    }
    monic(&x)
}

/// Rational function in pi over Q, kept in lowest terms with a monic
/// denominator. Used as the coefficient field when eliminating.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatPi {
    num: Poly,
    den: Poly,
}

impl RatPi {
    pub fn zero() -> Self {
        RatPi { num: Vec::new(), den: vec![Rational::one()] }
    }

    pub fn one() -> Self {
        RatPi::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        if r.is_zero() {
            return RatPi::zero();
        }
        RatPi { num: vec![r], den: vec![Rational::one()] }
    }

    /// c * pi^k
    pub fn pi_monomial(c: Rational, k: i32) -> Self {
        if c.is_zero() {
            return RatPi::zero();
        }
        let mut p = vec![Rational::zero(); k.unsigned_abs() as usize];
        if k >= 0 {
            p.push(c);
            RatPi { num: p, den: vec![Rational::one()] }
        } else {
            let mut d = p;
            d.push(Rational::one());
            RatPi { num: vec![c], den: d }
        }
    }

    fn normalize(mut num: Poly, mut den: Poly) -> Self {
        trim(&mut num);
        trim(&mut den);
        assert!(!den.is_empty(), "RatPi division by zero");
        if num.is_empty() {
            return RatPi::zero();
        }
        let v = valuation(&num).min(valuation(&den));
        if v > 0 {
            num.drain(..v);
            den.drain(..v);
        }
        if num.len() > 1 && den.len() > 1 {
            let g = pgcd(&num, &den);
            if g.len() > 1 {
                num = pdivrem(&num, &g).0;
                den = pdivrem(&den, &g).0;
            }
        }
        let lead = den.last().unwrap().clone();
        if !lead.is_one() {
            num = num.iter().map(|c| c / &lead).collect();
            den = den.iter().map(|c| c / &lead).collect();
        }
        RatPi { num, den }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn add(&self, o: &RatPi) -> RatPi {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return RatPi::normalize(padd(&self.num, &o.num), self.den.clone());
        }
        let n = padd(&pmul(&self.num, &o.den), &pmul(&o.num, &self.den));
        RatPi::normalize(n, pmul(&self.den, &o.den))
    }

    pub fn neg(&self) -> RatPi {
        RatPi { num: pneg(&self.num), den: self.den.clone() }
    }

    pub fn sub(&self, o: &RatPi) -> RatPi {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatPi) -> RatPi {
        if self.is_zero() || o.is_zero() {
            return RatPi::zero();
        }
        RatPi::normalize(pmul(&self.num, &o.num), pmul(&self.den, &o.den))
    }

    pub fn inv(&self) -> RatPi {
        assert!(!self.is_zero(), "RatPi inverse of zero");
        RatPi::normalize(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &RatPi) -> RatPi {
        self.mul(&o.inv())
    }

    pub fn numerator(&self) -> &[Rational] {
        &self.num
    }

    pub fn denominator(&self) -> &[Rational] {
        &self.den
    }
}

impl fmt::Display for RatPi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |p: &Poly| {
            p.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| format!("{c}*pi^{i}"))
                .collect::<Vec<_>>()
                .join(" + ")
        };
        write!(f, "({}) / ({})", show(&self.num), show(&self.den))
    }
}

/// Embed a Laurent polynomial in pi into the field Q(pi).
pub fn ratpi_solve_embed(c: &Constant) -> Result<RatPi, ScalarError> {
    if !c.is_pi_laurent() {
        return Err(ScalarError::NotPiRational(c.to_string()));
    }
    let min = c.terms().map(|(m, _)| m.pi_exponent()).min().unwrap_or(0).min(0);
    let max = c.terms().map(|(m, _)| m.pi_exponent()).max().unwrap_or(0);
    let mut num = vec![Rational::zero(); (max - min + 1) as usize];
    for (m, r) in c.terms() {
        num[(m.pi_exponent() - min) as usize] += r;
    }
    let mut den = vec![Rational::zero(); (-min) as usize];
    den.push(Rational::one());
    Ok(RatPi::normalize(num, den))
}

/// Map back to a Constant; fails unless the denominator is a power of pi.
pub fn ratpi_extract(r: &RatPi) -> Result<Constant, ScalarError> {
    let d = &r.den;
    let k = d.len() - 1;
    if d[..k].iter().any(|c| !c.is_zero()) {
        return Err(ScalarError::NotLaurent(r.to_string()));
    }
    let mut out = Constant::zero();
    for (i, c) in r.num.iter().enumerate() {
        if !c.is_zero() {
            out += &Constant::pi_term(c / &d[k], i as i32 - k as i32);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar_ring::ratio;

    #[test]
    fn embed_extract_roundtrip() {
        let c = Constant::pi_term(ratio(3, 2), -2) + Constant::pi_term(ratio(5, 1), 3);
        let r = ratpi_solve_embed(&c).unwrap();
        assert_eq!(ratpi_extract(&r).unwrap(), c);
    }

    #[test]
    fn non_laurent_denominator_rejected() {
        let one = RatPi::one();
        let pi = RatPi::pi_monomial(ratio(1, 1), 1);
        let r = one.div(&pi.add(&one));
        assert!(ratpi_extract(&r).is_err());
    }

    #[test]
    fn cancellation_in_field() {
        // (pi^2 - 1)/(pi - 1) = pi + 1
        let pi = RatPi::pi_monomial(ratio(1, 1), 1);
        let one = RatPi::one();
        let r = pi.mul(&pi).sub(&one).div(&pi.sub(&one));
        assert_eq!(r, pi.add(&one));
    }

    #[test]
    fn symbolic_constant_rejected() {
        let z = Constant::symbol(crate::scalar_ring::Symbol::Zeta(3));
        assert!(ratpi_solve_embed(&z).is_err());
    }
}
