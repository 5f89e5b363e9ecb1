use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Rational, ScalarError};

/// Transcendental atoms appearing in exact coefficients.
///
/// The derived ordering is the canonical monomial order:
/// `pi < euler_gamma < ln_pi < ln_prime < zeta < zeta_prime < sqrt`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Pi,
    EulerGamma,
    LnPi,
    LnPrime(u64),
    /// zeta at an odd integer >= 3
    Zeta(u32),
    ZetaPrime(i32),
    /// square root of a squarefree integer > 1; exponent is always 1
    Sqrt(u64),
}

impl Symbol {
    pub fn name(&self) -> String {
        match self {
            Symbol::Pi => "pi".into(),
            Symbol::EulerGamma => "euler_gamma".into(),
            Symbol::LnPi => "ln_pi".into(),
            Symbol::LnPrime(p) => format!("ln_prime({p})"),
            Symbol::Zeta(k) => format!("zeta({k})"),
            Symbol::ZetaPrime(m) => format!("zeta_prime({m})"),
            Symbol::Sqrt(m) => format!("sqrt({m})"),
        }
    }

    pub fn parse(s: &str) -> Result<Symbol, ScalarError> {
        let bad = || ScalarError::Parse(format!("unknown symbol `{s}`"));
        match s {
            "pi" => return Ok(Symbol::Pi),
            "euler_gamma" => return Ok(Symbol::EulerGamma),
            "ln_pi" => return Ok(Symbol::LnPi),
            _ => {}
        }
        let open = s.find('(').ok_or_else(bad)?;
        if !s.ends_with(')') {
            return Err(bad());
        }
        let head = &s[..open];
        let arg = &s[open + 1..s.len() - 1];
        match head {
            "ln_prime" => Ok(Symbol::LnPrime(arg.parse().map_err(|_| bad())?)),
            "zeta" => Ok(Symbol::Zeta(arg.parse().map_err(|_| bad())?)),
            "zeta_prime" => Ok(Symbol::ZetaPrime(arg.parse().map_err(|_| bad())?)),
            "sqrt" => Ok(Symbol::Sqrt(arg.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

/// Product of symbol powers. Only `pi` may carry a negative exponent.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolMonomial(BTreeMap<Symbol, i32>);

impl SymbolMonomial {
    pub fn one() -> Self {
        SymbolMonomial(BTreeMap::new())
    }

    pub fn from_pairs<I: IntoIterator<Item = (Symbol, i32)>>(pairs: I) -> Result<Self, ScalarError> {
        let mut m = SymbolMonomial::one();
        let mut factor = Rational::one();
        for (s, e) in pairs {
            let (f, next) = m.mul(&SymbolMonomial::single(s, e)?);
            factor *= f;
            m = next;
        }
        if !factor.is_one() {
            return Err(ScalarError::InvalidMonomial("repeated sqrt symbols".into()));
        }
        Ok(m)
    }

    pub fn single(s: Symbol, e: i32) -> Result<Self, ScalarError> {
        if e == 0 {
            return Ok(Self::one());
        }
        if e < 0 && s != Symbol::Pi {
            return Err(ScalarError::InvalidMonomial(format!(
                "negative exponent on {}",
                s.name()
            )));
        }
        if let Symbol::Sqrt(m) = s {
            if e != 1 || m < 2 || !is_squarefree(m) {
                return Err(ScalarError::InvalidMonomial(format!("sqrt({m})^{e}")));
            }
        }
        let mut map = BTreeMap::new();
        map.insert(s, e);
        Ok(SymbolMonomial(map))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, s: Symbol) -> i32 {
        self.0.get(&s).copied().unwrap_or(0)
    }

    pub fn pi_exponent(&self) -> i32 {
        self.exponent(Symbol::Pi)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &i32)> {
        self.0.iter()
    }

    /// The monomial with the `pi` factor removed.
    pub fn without_pi(&self) -> SymbolMonomial {
        let mut m = self.0.clone();
        m.remove(&Symbol::Pi);
        SymbolMonomial(m)
    }

    pub fn is_pi_power(&self) -> bool {
        self.0.keys().all(|s| *s == Symbol::Pi)
    }

    /// Multiply two monomials. Square roots merge, so the product carries a
    /// rational factor: sqrt(a) sqrt(b) = g sqrt(ab/g^2) with g = gcd(a, b).
    pub fn mul(&self, other: &SymbolMonomial) -> (Rational, SymbolMonomial) {
        let mut out = self.0.clone();
        let mut factor = Rational::one();
        for (s, e) in &other.0 {
            if let Symbol::Sqrt(b) = s {
                let existing = out.keys().find_map(|k| match k {
                    Symbol::Sqrt(a) => Some(*a),
                    _ => None,
                });
                if let Some(a) = existing {
                    out.remove(&Symbol::Sqrt(a));
                    let g = a.gcd(b);
                    factor *= Rational::from_integer(BigInt::from(g));
                    let rad = (a / g) * (b / g);
                    if rad > 1 {
                        out.insert(Symbol::Sqrt(rad), 1);
                    }
                    continue;
                }
                out.insert(*s, *e);
                continue;
            }
            let v = out.entry(*s).or_insert(0);
            *v += e;
            if *v == 0 {
                out.remove(s);
            }
        }
        (factor, SymbolMonomial(out))
    }

    /// Inverse when it exists in the ring (pi powers and square roots only).
    pub fn inv(&self) -> Result<(Rational, SymbolMonomial), ScalarError> {
        let mut out = BTreeMap::new();
        let mut factor = Rational::one();
        for (s, e) in &self.0 {
            match s {
                Symbol::Pi => {
                    out.insert(Symbol::Pi, -e);
                }
                Symbol::Sqrt(m) => {
                    factor /= Rational::from_integer(BigInt::from(*m));
                    out.insert(*s, 1);
                }
                _ => return Err(ScalarError::NotInvertible(s.name())),
            }
        }
        Ok((factor, SymbolMonomial(out)))
    }
}

pub(crate) fn is_squarefree(mut m: u64) -> bool {
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Exact element of Q[pi, 1/pi, gamma, ln pi, ln p, zeta(odd), zeta', sqrt m].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Constant {
    terms: BTreeMap<SymbolMonomial, Rational>,
}

impl Constant {
    pub fn zero() -> Self {
        Constant::default()
    }

    pub fn one() -> Self {
        Constant::rational(Rational::one())
    }

    pub fn rational(r: Rational) -> Self {
        Constant::term(r, SymbolMonomial::one())
    }

    pub fn int(i: i64) -> Self {
        Constant::rational(Rational::from_integer(BigInt::from(i)))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Constant::rational(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn term(c: Rational, m: SymbolMonomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Constant { terms }
    }

    pub fn symbol(s: Symbol) -> Self {
        Constant::term(Rational::one(), SymbolMonomial::single(s, 1).expect("valid symbol"))
    }

    pub fn pi_pow(k: i32) -> Self {
        Constant::term(Rational::one(), SymbolMonomial::single(Symbol::Pi, k).expect("pi power"))
    }

    /// c * pi^k
    pub fn pi_term(c: Rational, k: i32) -> Self {
        Constant::term(c, SymbolMonomial::single(Symbol::Pi, k).expect("pi power"))
    }

    /// Exact square root of a non-negative integer.
    pub fn sqrt_int(n: u64) -> Self {
        if n == 0 {
            return Constant::zero();
        }
        let (s, m) = split_square(n);
        let c = Rational::from_integer(BigInt::from(s));
        if m == 1 {
            Constant::rational(c)
        } else {
            Constant::term(c, SymbolMonomial::single(Symbol::Sqrt(m), 1).expect("squarefree"))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SymbolMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn from_terms<I: IntoIterator<Item = (SymbolMonomial, Rational)>>(it: I) -> Self {
        let mut c = Constant::zero();
        for (m, r) in it {
            c.add_term(m, r);
        }
        c
    }

    pub fn add_term(&mut self, m: SymbolMonomial, r: Rational) {
        if r.is_zero() {
            return;
        }
        if let Some(v) = self.terms.get_mut(&m) {
            *v += &r;
            if v.is_zero() {
                self.terms.remove(&m);
            }
        } else {
            self.terms.insert(m, r);
        }
    }

    /// The rational value if no symbol occurs.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// `(c, k)` when the constant is a single term c * pi^k.
    pub fn as_pi_monomial(&self) -> Option<(Rational, i32)> {
        match self.terms.len() {
            0 => Some((Rational::zero(), 0)),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_pi_power().then(|| (c.clone(), m.pi_exponent()))
            }
            _ => None,
        }
    }

    /// True if every monomial is a pure power of pi.
    pub fn is_pi_laurent(&self) -> bool {
        self.terms.keys().all(|m| m.is_pi_power())
    }

    /// Group the terms by their non-pi part: self = sum_k key_k * value_k where
    /// each value is a Laurent polynomial in pi.
    pub fn split_by_non_pi(&self) -> BTreeMap<SymbolMonomial, Constant> {
        let mut out: BTreeMap<SymbolMonomial, Constant> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key = m.without_pi();
            out.entry(key)
                .or_default()
                .add_term(SymbolMonomial::single(Symbol::Pi, m.pi_exponent()).unwrap(), c.clone());
        }
        out
    }

    pub fn scale(&self, r: &Rational) -> Constant {
        if r.is_zero() {
            return Constant::zero();
        }
        Constant {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * r)).collect(),
        }
    }

    pub fn mul_pi_pow(&self, k: i32) -> Constant {
        if k == 0 {
            return self.clone();
        }
        Constant {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut map = m.0.clone();
                    let e = map.entry(Symbol::Pi).or_insert(0);
                    *e += k;
                    if *e == 0 {
                        map.remove(&Symbol::Pi);
                    }
                    (SymbolMonomial(map), c.clone())
                })
                .collect(),
        }
    }

    /// Multiplicative inverse for single-term constants built from pi and
    /// square roots.
    pub fn inv(&self) -> Result<Constant, ScalarError> {
        if self.terms.len() != 1 {
            return Err(ScalarError::NotInvertible(format!("{self}")));
        }
        let (m, c) = self.terms.iter().next().unwrap();
        let (f, mi) = m.inv()?;
        Ok(Constant::term(f / c, mi))
    }

    pub fn pow(&self, e: i32) -> Result<Constant, ScalarError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut out = Constant::one();
        for _ in 0..e.unsigned_abs() {
            out = &out * &base;
        }
        Ok(out)
    }

    /// Evaluate with a caller-provided assignment of the symbols.
    pub fn eval_with<T, F>(&self, zero: T, from_rat: impl Fn(&Rational) -> T, sym: F) -> T
    where
        T: Clone + Add<Output = T> + Mul<Output = T>,
        F: Fn(Symbol, i32) -> T,
    {
        let mut acc = zero;
        for (m, c) in &self.terms {
            let mut v = from_rat(c);
            for (s, e) in m.iter() {
                v = v * sym(*s, *e);
            }
            acc = acc + v;
        }
        acc
    }

    pub fn max_abs_pi_exponent(&self) -> i32 {
        self.terms.keys().map(|m| m.pi_exponent().abs()).max().unwrap_or(0)
    }

    pub fn to_latex(&self) -> String {
        super::latex::constant_to_latex(self)
    }
}

/// n = s^2 m with m squarefree.
pub(crate) fn split_square(mut n: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut m = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            m *= p;
        }
        p += 1;
    }
    m *= n;
    (s, m)
}

impl From<Rational> for Constant {
    fn from(r: Rational) -> Self {
        Constant::rational(r)
    }
}

impl From<i64> for Constant {
    fn from(i: i64) -> Self {
        Constant::int(i)
    }
}

impl<'a> Add<&'a Constant> for &'a Constant {
    type Output = Constant;
    fn add(self, rhs: &Constant) -> Constant {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Constant {
    type Output = Constant;
    fn add(mut self, rhs: Constant) -> Constant {
        self += &rhs;
        self
    }
}

impl AddAssign<&Constant> for Constant {
    fn add_assign(&mut self, rhs: &Constant) {
        for (m, c) in &rhs.terms {
            match self.terms.get_mut(m) {
                Some(v) => {
                    *v += c;
                    if v.is_zero() {
                        self.terms.remove(m);
                    }
                }
                None => {
                    self.terms.insert(m.clone(), c.clone());
                }
            }
        }
    }
}

impl SubAssign<&Constant> for Constant {
    fn sub_assign(&mut self, rhs: &Constant) {
        for (m, c) in &rhs.terms {
            match self.terms.get_mut(m) {
                Some(v) => {
                    *v -= c;
                    if v.is_zero() {
                        self.terms.remove(m);
                    }
                }
                None => {
                    self.terms.insert(m.clone(), -c.clone());
                }
            }
        }
    }
}

impl<'a> Sub<&'a Constant> for &'a Constant {
    type Output = Constant;
    fn sub(self, rhs: &Constant) -> Constant {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Constant {
    type Output = Constant;
    fn sub(mut self, rhs: Constant) -> Constant {
        self -= &rhs;
        self
    }
}

impl Neg for &Constant {
    type Output = Constant;
    fn neg(self) -> Constant {
        Constant {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for Constant {
    type Output = Constant;
    fn neg(self) -> Constant {
        -&self
    }
}

impl<'a> Mul<&'a Constant> for &'a Constant {
    type Output = Constant;
    fn mul(self, rhs: &Constant) -> Constant {
        let mut out = Constant::zero();
        if self.is_zero() || rhs.is_zero() {
            return out;
        }
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let (f, m) = m1.mul(m2);
                let c = if f.is_one() { c1 * c2 } else { c1 * c2 * f };
                match out.terms.get_mut(&m) {
                    Some(v) => {
                        *v += &c;
                        if v.is_zero() {
                            out.terms.remove(&m);
                        }
                    }
                    None => {
                        out.terms.insert(m, c);
                    }
                }
            }
        }
        out
    }
}

impl Mul for Constant {
    type Output = Constant;
    fn mul(self, rhs: Constant) -> Constant {
        &self * &rhs
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let a = c.abs();
            let mut parts = Vec::new();
            if !a.is_one() || m.is_one() {
                parts.push(format!("{a}"));
            }
            for (s, e) in m.iter() {
                if *e == 1 {
                    parts.push(s.name());
                } else {
                    parts.push(format!("{}^{}", s.name(), e));
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

#[derive(serde::Serialize, serde::Deserialize)]
struct TermRepr {
    monomial: BTreeMap<String, i32>,
    coeff: String,
}

impl serde::Serialize for Constant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<TermRepr> = self
            .terms
            .iter()
            .map(|(m, c)| TermRepr {
                monomial: m.iter().map(|(s, e)| (s.name(), *e)).collect(),
                coeff: format!("{}/{}", c.numer(), c.denom()),
            })
            .collect();
        v.serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for Constant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let v: Vec<TermRepr> = Vec::deserialize(d)?;
        let mut out = Constant::zero();
        for t in v {
            let coeff = parse_rational(&t.coeff).map_err(D::Error::custom)?;
            let mut pairs = Vec::new();
            for (name, e) in t.monomial {
                pairs.push((Symbol::parse(&name).map_err(D::Error::custom)?, e));
            }
            let m = SymbolMonomial::from_pairs(pairs).map_err(D::Error::custom)?;
            out.add_term(m, coeff);
        }
        Ok(out)
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, ScalarError> {
    let bad = || ScalarError::Parse(format!("bad rational `{s}`"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// Convert a small rational to f64 without overflow for huge numerators.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb - db - 60;
    let scaled = if shift > 0 {
        r / Rational::from_integer(BigInt::one() << shift as usize)
    } else {
        r * Rational::from_integer(BigInt::one() << (-shift) as usize)
    };
    let v = scaled.numer().to_f64().unwrap() / scaled.denom().to_f64().unwrap();
    v * 2f64.powi(shift as i32)
}
