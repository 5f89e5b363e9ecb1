//! Evaluator for the small LaTeX dialect of the printed tables. An entry is
//! read at concrete integer values of n, n_1, n_2 and becomes a YLaurent.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::bessel_expr::YLaurent;
use crate::divisor_sums::sigma;
use crate::scalar_ring::{log_normalize, zeta_value, Constant, Rational, Symbol};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LatexError {
    #[error("unexpected {found} at token {pos}")]
    Unexpected { pos: usize, found: String },
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("unknown command `\\{0}`")]
    UnknownCommand(String),
    #[error("division by a non-monomial: {0}")]
    NotMonomial(String),
    #[error("expected an integer, got {0}")]
    NotInteger(String),
    #[error("{0}")]
    Value(String),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Letter(char),
    Cmd(String),
    Sym(char),
}

fn describe(t: Option<&Tok>) -> String {
    match t {
        None => "end of input".into(),
        Some(Tok::Num(n)) => format!("number {n}"),
        Some(Tok::Letter(c)) => format!("`{c}`"),
        Some(Tok::Cmd(c)) => format!("`\\{c}`"),
        Some(Tok::Sym(c)) => format!("`{c}`"),
    }
}

/// Commands that only affect layout.
const IGNORED: &[&str] = &["Big", "big", "Bigg", "bigg", "Bigl", "Bigr", "bigl", "bigr", "nonumber", "quad", "qquad", "displaystyle"];

fn tokenize(s: &str) -> Vec<Tok> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() || c == '&' {
            i += 1;
        } else if c == '\\' {
            let start = i + 1;
            let mut j = start;
            while j < chars.len() && chars[j].is_ascii_alphabetic() {
                j += 1;
            }
            if j == start {
                // \\ , \, \; \! and "\ " are spacing or line breaks
                i = start + 1;
                continue;
            }
            let name: String = chars[start..j].iter().collect();
            i = j;
            if name == "right" || name == "left" {
                // \left. and \right. are empty delimiters
                while i < chars.len() && chars[i].is_whitespace() {
                    i += 1;
                }
                if i < chars.len() && chars[i] == '.' {
                    i += 1;
                }
            } else if name == "cdot" || name == "times" {
                out.push(Tok::Sym('*'));
            } else if !IGNORED.contains(&name.as_str()) {
                out.push(Tok::Cmd(name));
            }
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let digits: String = chars[i..j].iter().collect();
            out.push(Tok::Num(digits.parse().expect("digits")));
            i = j;
        } else if c.is_ascii_alphabetic() {
            out.push(Tok::Letter(c));
            i += 1;
        } else {
            out.push(Tok::Sym(c));
            i += 1;
        }
    }
    out
}

/// Integer values of the variables n, n_0, n_1, n_2.
#[derive(Clone, Debug, Default)]
pub struct Bindings(pub BTreeMap<String, i64>);

impl Bindings {
    pub fn double(n1: i64, n2: i64) -> Self {
        Bindings([("n_1".to_string(), n1), ("n_2".to_string(), n2)].into_iter().collect())
    }

    /// Single-Bessel tables name their one frequency n, n_0, n_1 or n_2.
    pub fn single(n: i64) -> Self {
        Bindings(["n", "n_0", "n_1", "n_2"].iter().map(|k| (k.to_string(), n)).collect())
    }
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    vars: &'a Bindings,
    /// true while inside |...|, where a bar closes instead of opening
    abs: Vec<bool>,
}

fn constant(v: &YLaurent) -> Option<Constant> {
    match v.terms().count() {
        0 => Some(Constant::zero()),
        1 => {
            let (k, l, c) = v.terms().next().unwrap();
            (k == 0 && l == 0).then(|| c.clone())
        }
        _ => None,
    }
}

fn rational(v: &YLaurent) -> Result<Rational, LatexError> {
    constant(v).and_then(|c| c.as_rational()).ok_or_else(|| LatexError::Value(format!("expected a rational, got {v}")))
}

fn integer(v: &YLaurent) -> Result<i64, LatexError> {
    let r = rational(v)?;
    if !r.is_integer() {
        return Err(LatexError::NotInteger(r.to_string()));
    }
    r.to_integer().to_i64().ok_or_else(|| LatexError::NotInteger(r.to_string()))
}

fn inverse(v: &YLaurent) -> Result<YLaurent, LatexError> {
    let mut it = v.terms();
    match (it.next(), it.next()) {
        (Some((k, 0, c)), None) => {
            let inv = c.inv().map_err(|_| LatexError::NotMonomial(v.to_string()))?;
            Ok(YLaurent::power(inv, -k))
        }
        _ => Err(LatexError::NotMonomial(v.to_string())),
    }
}

fn mul(a: &YLaurent, b: &YLaurent) -> Result<YLaurent, LatexError> {
    a.mul(b).map_err(|e| LatexError::Value(e.to_string()))
}

fn power(base: &YLaurent, e: i64) -> Result<YLaurent, LatexError> {
    let b = if e < 0 { inverse(base)? } else { base.clone() };
    let mut out = YLaurent::constant(Constant::one());
    for _ in 0..e.unsigned_abs() {
        out = mul(&out, &b)?;
    }
    Ok(out)
}

/// log of c y^k with c = q pi^j: k log y + j log pi + log q.
fn log_of(v: &YLaurent) -> Result<YLaurent, LatexError> {
    let mut it = v.terms();
    let (Some((k, 0, c)), None) = (it.next(), it.next()) else {
        return Err(LatexError::Value(format!("log of {v}")));
    };
    let (q, j) = c.as_pi_monomial().ok_or_else(|| LatexError::Value(format!("log of {c}")))?;
    let mut out = YLaurent::zero();
    out.add_term(0, 1, Constant::int(k as i64));
    let mut lc = log_normalize(&q).map_err(|e| LatexError::Value(e.to_string()))?;
    lc += &Constant::symbol(Symbol::LnPi).scale(&Rational::from_integer(BigInt::from(j)));
    out.add_term(0, 0, lc);
    // the log term sits at y^0 with log power 1
    Ok(out)
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn unexpected(&self) -> LatexError {
        LatexError::Unexpected { pos: self.pos, found: describe(self.peek()) }
    }

    fn expect(&mut self, c: char) -> Result<(), LatexError> {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn in_abs(&self) -> bool {
        self.abs.last().copied().unwrap_or(false)
    }

    fn expr(&mut self) -> Result<YLaurent, LatexError> {
        let mut acc = YLaurent::zero();
        let mut first = true;
        loop {
            let mut sign = 1;
            let mut signed = false;
            // runs such as "+ -" collapse to one sign
            while let Some(Tok::Sym(c @ ('+' | '-'))) = self.peek() {
                if *c == '-' {
                    sign = -sign;
                }
                signed = true;
                self.pos += 1;
            }
            if !first && !signed {
                return Ok(acc);
            }
            let t = self.term()?;
            acc = if sign < 0 { acc.sub(&t) } else { acc.add(&t) };
            first = false;
        }
    }

    fn starts_factor(&self) -> bool {
        match self.peek() {
            Some(Tok::Num(_) | Tok::Letter(_) | Tok::Cmd(_)) => true,
            Some(Tok::Sym('(' | '[' | '{' | '*' | '/')) => true,
            Some(Tok::Sym('|')) => !self.in_abs(),
            _ => false,
        }
    }

    fn term(&mut self) -> Result<YLaurent, LatexError> {
        let mut acc = self.factor()?;
        while self.starts_factor() {
            match self.peek() {
                Some(Tok::Sym('*')) => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = mul(&acc, &f)?;
                }
                Some(Tok::Sym('/')) => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = mul(&acc, &inverse(&f)?)?;
                }
                _ => {
                    let f = self.factor()?;
                    acc = mul(&acc, &f)?;
                }
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<YLaurent, LatexError> {
        let mut base = self.primary()?;
        while self.peek() == Some(&Tok::Sym('^')) {
            self.pos += 1;
            let e = self.script()?;
            base = power(&base, e)?;
        }
        Ok(base)
    }

    /// A super- or subscript: a braced group or a single digit.
    fn script(&mut self) -> Result<i64, LatexError> {
        match self.bump() {
            Some(Tok::Sym('{')) => {
                self.abs.push(false);
                let v = self.expr()?;
                self.abs.pop();
                self.expect('}')?;
                integer(&v)
            }
            Some(Tok::Num(n)) => {
                // x^22 means x^2 followed by 2
                let s = n.to_string();
                let (head, rest) = s.split_at(1);
                if !rest.is_empty() {
                    self.pos -= 1;
                    self.toks[self.pos] = Tok::Num(rest.parse().expect("digits"));
                    self.toks.insert(self.pos, Tok::Num(head.parse().expect("digit")));
                    self.pos += 1;
                }
                Ok(head.parse().expect("digit"))
            }
            _ => {
                self.pos -= 1;
                Err(self.unexpected())
            }
        }
    }

    fn group(&mut self, open: char, close: char) -> Result<YLaurent, LatexError> {
        self.expect(open)?;
        self.abs.push(false);
        let v = self.expr()?;
        self.abs.pop();
        self.expect(close)?;
        Ok(v)
    }

    /// A bracketed argument: (..), [..] or {..}.
    fn argument(&mut self) -> Result<YLaurent, LatexError> {
        match self.peek() {
            Some(Tok::Sym('(')) => self.group('(', ')'),
            Some(Tok::Sym('[')) => self.group('[', ']'),
            Some(Tok::Sym('{')) => self.group('{', '}'),
            _ => Err(self.unexpected()),
        }
    }

    fn variable(&mut self) -> Result<YLaurent, LatexError> {
        let mut name = "n".to_string();
        if self.peek() == Some(&Tok::Sym('_')) {
            self.pos += 1;
            name = format!("n_{}", self.script()?);
        }
        let v = self.vars.0.get(&name).ok_or(LatexError::Unbound(name))?;
        Ok(YLaurent::constant(Constant::int(*v)))
    }

    fn primary(&mut self) -> Result<YLaurent, LatexError> {
        let tok = self.peek().cloned();
        match tok {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(YLaurent::constant(Constant::rational(Rational::from_integer(n))))
            }
            Some(Tok::Letter('y')) => {
                self.pos += 1;
                Ok(YLaurent::power(Constant::one(), 1))
            }
            Some(Tok::Letter('n')) => {
                self.pos += 1;
                self.variable()
            }
            Some(Tok::Letter(c)) => Err(LatexError::Unbound(c.to_string())),
            Some(Tok::Sym('(')) => self.group('(', ')'),
            Some(Tok::Sym('[')) => self.group('[', ']'),
            Some(Tok::Sym('{')) => self.group('{', '}'),
            Some(Tok::Sym('|')) => {
                self.pos += 1;
                self.abs.push(true);
                let v = self.expr()?;
                self.abs.pop();
                self.expect('|')?;
                Ok(YLaurent::constant(Constant::rational(rational(&v)?.abs())))
            }
            Some(Tok::Cmd(name)) => {
                self.pos += 1;
                self.command(&name)
            }
            _ => Err(self.unexpected()),
        }
    }

    fn command(&mut self, name: &str) -> Result<YLaurent, LatexError> {
        let value_err = |e: &dyn std::fmt::Display| LatexError::Value(e.to_string());
        match name {
            "pi" => Ok(YLaurent::constant(Constant::pi_pow(1))),
            "gamma" => Ok(YLaurent::constant(Constant::symbol(Symbol::EulerGamma))),
            "frac" | "tfrac" | "dfrac" => {
                let num = self.group('{', '}')?;
                let den = self.group('{', '}')?;
                mul(&num, &inverse(&den)?)
            }
            "zeta" => {
                let k = integer(&self.argument()?)?;
                Ok(YLaurent::constant(zeta_value(k).map_err(|e| value_err(&e))?))
            }
            "sigma" => {
                self.expect('_')?;
                let k = self.script()?;
                let m = integer(&self.argument()?)?;
                if m <= 0 {
                    return Err(LatexError::Value(format!("sigma at {m}")));
                }
                let s = sigma(k, m as u64).map_err(|e| value_err(&e))?;
                Ok(YLaurent::constant(Constant::rational(s)))
            }
            "sgn" => {
                let r = rational(&self.argument()?)?;
                if r.is_zero() {
                    return Err(LatexError::Value("sgn(0)".into()));
                }
                Ok(YLaurent::constant(Constant::int(if r.is_positive() { 1 } else { -1 })))
            }
            "log" | "ln" => log_of(&self.argument()?),
            _ => Err(LatexError::UnknownCommand(name.to_string())),
        }
    }
}

/// Evaluate a printed table entry at the given integer bindings.
pub fn eval_latex(src: &str, vars: &Bindings) -> Result<YLaurent, LatexError> {
    let mut p = Parser { toks: tokenize(src), pos: 0, vars, abs: Vec::new() };
    let v = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(p.unexpected());
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar_ring::ratio;

    fn at(src: &str, n1: i64, n2: i64) -> YLaurent {
        eval_latex(src, &Bindings::double(n1, n2)).unwrap()
    }

    #[test]
    fn fractions_powers_and_signs() {
        let v = at(r"\sgn(n_1n_2) \frac{y^{-3}\, n_{1} n_{2}}{ \left(n_{1} + n_{2}\right)^{10}}\frac{126}{\pi^{4}}", 1, -3);
        assert_eq!(v, YLaurent::power(Constant::pi_term(ratio(126 * 3, 1024), -4), -3));
        let v = at(r"-\frac{ 8 n_{2}^{2} \pi^{2}y^{3}}{1155}", 0, 2);
        assert_eq!(v, YLaurent::power(Constant::pi_term(ratio(-32, 1155), 2), 3));
    }

    #[test]
    fn logs_zetas_and_sigmas() {
        let v = at(r"\log{\left(|n_{1}| \pi \right)} + \zeta(2) - \sigma_{-2}(|n_2|)", 12, -2);
        let mut expect = YLaurent::zero();
        let c = log_normalize(&ratio(12, 1)).unwrap() + Constant::symbol(Symbol::LnPi) + Constant::pi_term(ratio(1, 6), 2)
            - Constant::frac(5, 4);
        expect.add_term(0, 0, c);
        assert_eq!(v, expect);
        let v = at(r"48 \zeta (2)^2 \log (y)", 1, 1);
        assert_eq!(v, YLaurent::monomial(Constant::pi_term(ratio(48, 36), 4), 0, 1));
    }

    #[test]
    fn bars_and_layout() {
        let v = at(r"|n_1||n_2|^2 \cdot 2 \Big[ 1 \\ & + \ \ y \Big]", -2, 3);
        let mut expect = YLaurent::zero();
        expect.add_term(0, 0, Constant::int(36));
        expect.add_term(1, 0, Constant::int(36));
        assert_eq!(v, expect);
        assert_eq!(at("y^22", 1, 1), YLaurent::power(Constant::int(2), 2));
    }

    #[test]
    fn malformed_input_is_rejected() {
        assert!(eval_latex(r"\left( 1 + y \right.", &Bindings::double(1, 1)).is_err());
        assert!(eval_latex(r"(1 + y))", &Bindings::double(1, 1)).is_err());
        assert!(matches!(eval_latex("n^6", &Bindings::double(1, 1)), Err(LatexError::Unbound(_))));
        assert!(matches!(eval_latex(r"\frac{1}{1+y}", &Bindings::double(1, 1)), Err(LatexError::NotMonomial(_))));
    }
}
