use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::ExprError;
use crate::scalar_ring::{Constant, Rational};

pub const DEFAULT_LOG_CAP: u32 = 2;

/// Finite sum of c * y^k * log(y)^l with exact coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct YLaurent {
    terms: BTreeMap<(i32, u32), Constant>,
}

impl YLaurent {
    pub fn zero() -> Self {
        YLaurent::default()
    }

    pub fn monomial(c: Constant, y_exp: i32, log_exp: u32) -> Self {
        let mut t = YLaurent::zero();
        t.add_term(y_exp, log_exp, c);
        t
    }

    /// c * y^k
    pub fn power(c: Constant, k: i32) -> Self {
        YLaurent::monomial(c, k, 0)
    }

    pub fn constant(c: Constant) -> Self {
        YLaurent::monomial(c, 0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, y_exp: i32, log_exp: u32, c: Constant) {
        if c.is_zero() {
            return;
        }
        let key = (y_exp, log_exp);
        if let Some(v) = self.terms.get_mut(&key) {
            *v += &c;
            if v.is_zero() {
                self.terms.remove(&key);
            }
        } else {
            self.terms.insert(key, c);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, u32, &Constant)> {
        self.terms.iter().map(|((k, l), c)| (*k, *l, c))
    }

    pub fn coeff(&self, y_exp: i32, log_exp: u32) -> Constant {
        self.terms.get(&(y_exp, log_exp)).cloned().unwrap_or_default()
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.0).min()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.0).max()
    }

    pub fn max_log(&self) -> u32 {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &YLaurent) -> YLaurent {
        let mut out = self.clone();
        out.add_assign(o);
        out
    }

    pub fn add_assign(&mut self, o: &YLaurent) {
        for ((k, l), c) in &o.terms {
            self.add_term(*k, *l, c.clone());
        }
    }

    pub fn sub(&self, o: &YLaurent) -> YLaurent {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> YLaurent {
        YLaurent { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }

    pub fn scale(&self, c: &Constant) -> YLaurent {
        let mut out = YLaurent::zero();
        for ((k, l), v) in &self.terms {
            out.add_term(*k, *l, v * c);
        }
        out
    }

    pub fn scale_rational(&self, r: &Rational) -> YLaurent {
        if r.is_zero() {
            return YLaurent::zero();
        }
        YLaurent { terms: self.terms.iter().map(|(k, c)| (*k, c.scale(r))).collect() }
    }

    pub fn mul_y_pow(&self, s: i32) -> YLaurent {
        YLaurent { terms: self.terms.iter().map(|((k, l), c)| ((k + s, *l), c.clone())).collect() }
    }

    pub fn mul(&self, o: &YLaurent) -> Result<YLaurent, ExprError> {
        self.mul_with_cap(o, DEFAULT_LOG_CAP)
    }

    pub fn mul_with_cap(&self, o: &YLaurent, cap: u32) -> Result<YLaurent, ExprError> {
        let mut out = YLaurent::zero();
        for ((k1, l1), c1) in &self.terms {
            for ((k2, l2), c2) in &o.terms {
                let l = l1 + l2;
                if l > cap {
                    return Err(ExprError::LogCapExceeded { cap, got: l });
                }
                out.add_term(k1 + k2, l, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Product keeping only exponents below `order`.
    pub fn mul_truncated(&self, o: &YLaurent, order: i32) -> Result<YLaurent, ExprError> {
        let mut out = YLaurent::zero();
        for ((k1, l1), c1) in &self.terms {
            for ((k2, l2), c2) in &o.terms {
                if k1 + k2 >= order {
                    continue;
                }
                let l = l1 + l2;
                if l > DEFAULT_LOG_CAP {
                    return Err(ExprError::LogCapExceeded { cap: DEFAULT_LOG_CAP, got: l });
                }
                out.add_term(k1 + k2, l, c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn truncate(&self, order: i32) -> YLaurent {
        YLaurent { terms: self.terms.iter().filter(|((k, _), _)| *k < order).map(|(k, c)| (*k, c.clone())).collect() }
    }

    /// d/dy
    pub fn derivative(&self) -> YLaurent {
        let mut out = YLaurent::zero();
        for ((k, l), c) in &self.terms {
            if *k != 0 {
                out.add_term(k - 1, *l, c.scale(&Rational::from_integer((*k).into())));
            }
            if *l > 0 {
                out.add_term(k - 1, l - 1, c.scale(&Rational::from_integer((*l).into())));
            }
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&Constant) -> Constant) -> YLaurent {
        let mut out = YLaurent::zero();
        for ((k, l), c) in &self.terms {
            out.add_term(*k, *l, f(c));
        }
        out
    }

    /// Numeric value at y > 0 with coefficients evaluated by `eval`.
    pub fn eval(&self, y: f64, eval: &impl Fn(&Constant) -> f64) -> f64 {
        let ly = y.ln();
        self.terms.iter().map(|((k, l), c)| eval(c) * y.powi(*k) * ly.powi(*l as i32)).sum()
    }
}

impl fmt::Display for YLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((k, l), c)| {
                let mut s = format!("({c})");
                if *k != 0 {
                    s.push_str(&format!("*y^{k}"));
                }
                if *l != 0 {
                    s.push_str(&format!("*log(y)^{l}"));
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    y: i32,
    log: u32,
    coeff: Constant,
}

impl Serialize for YLaurent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<TermRepr> =
            self.terms.iter().map(|((k, l), c)| TermRepr { y: *k, log: *l, coeff: c.clone() }).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for YLaurent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<TermRepr> = Vec::deserialize(d)?;
        let mut out = YLaurent::zero();
        for t in v {
            out.add_term(t.y, t.log, t.coeff);
        }
        Ok(out)
    }
}
