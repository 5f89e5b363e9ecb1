use num_traits::{One, Signed};

use super::{Constant, Symbol};

fn symbol_latex(s: Symbol) -> String {
    match s {
        Symbol::Pi => "\\pi".into(),
        Symbol::EulerGamma => "\\gamma".into(),
        Symbol::LnPi => "\\log\\pi".into(),
        Symbol::LnPrime(p) => format!("\\log {p}"),
        Symbol::Zeta(k) => format!("\\zeta({k})"),
        Symbol::ZetaPrime(m) => format!("\\zeta'({m})"),
        Symbol::Sqrt(m) => format!("\\sqrt{{{m}}}"),
    }
}

fn power(base: String, e: i32) -> String {
    if e == 1 {
        base
    } else if base.starts_with("\\log") {
        format!("\\left({base}\\right)^{{{e}}}")
    } else {
        format!("{base}^{{{e}}}")
    }
}

/// LaTeX for an exact constant, e.g. `\frac{3}{2\pi^{2}} + \zeta(3)`.
pub fn constant_to_latex(c: &Constant) -> String {
    if c.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (m, r)) in c.terms().enumerate() {
        let neg = r.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let a = r.abs();
        let mut up: Vec<String> = Vec::new();
        let mut down: Vec<String> = Vec::new();
        for (s, e) in m.iter() {
            if *e < 0 {
                down.push(power(symbol_latex(*s), -e));
            } else {
                up.push(power(symbol_latex(*s), *e));
            }
        }
        let num_int = a.numer().to_string();
        let den_int = a.denom().to_string();
        let mut top = String::new();
        if !a.numer().is_one() || up.is_empty() {
            top.push_str(&num_int);
        }
        top.push_str(&up.join(" "));
        let mut bottom = String::new();
        if !a.denom().is_one() {
            bottom.push_str(&den_int);
        }
        bottom.push_str(&down.join(" "));
        if bottom.is_empty() {
            out.push_str(&top);
        } else {
            out.push_str(&format!("\\frac{{{top}}}{{{bottom}}}"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar_ring::ratio;

    #[test]
    fn latex_shapes() {
        let c = Constant::pi_term(ratio(3, 2), -2) + Constant::symbol(Symbol::Zeta(3));
        assert_eq!(constant_to_latex(&c), "\\frac{3}{2\\pi^{2}} + \\zeta(3)");
        assert_eq!(constant_to_latex(&Constant::int(-7)), "-7");
        assert_eq!(constant_to_latex(&Constant::pi_pow(1)), "\\pi");
    }
}
