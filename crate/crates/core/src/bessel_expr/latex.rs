use super::{BesselExpr, HomBasis, YLaurent};
use crate::scalar_ring::constant_to_latex;

fn bessel_arg(n: i64) -> String {
    match n.unsigned_abs() * 2 {
        2 => "2\\pi y".into(),
        k => format!("{k}\\pi y"),
    }
}

fn y_power(k: i32, l: u32) -> String {
    let mut s = match k {
        0 => String::new(),
        1 => "y".into(),
        _ => format!("y^{{{k}}}"),
    };
    if l > 0 {
        if !s.is_empty() {
            s.push(' ');
        }
        s.push_str(&if l == 1 { "\\log y".to_string() } else { format!("\\log^{{{l}}} y") });
    }
    s
}

impl YLaurent {
    /// LaTeX with descending powers of y; within a power, higher log powers first.
    pub fn to_latex(&self) -> String {
        let mut terms: Vec<(i32, u32, String)> = self.terms().map(|(k, l, c)| (k, l, constant_to_latex(c))).collect();
        if terms.is_empty() {
            return "0".into();
        }
        terms.sort_by(|a, b| (b.0, b.1).cmp(&(a.0, a.1)));
        let mut out = String::new();
        for (i, (k, l, c)) in terms.into_iter().enumerate() {
            let mono = y_power(k, l);
            let compound = c[1..].contains(" + ") || c[1..].contains(" - ");
            let (neg, body) = match c.strip_prefix('-') {
                Some(rest) if !compound => (true, rest.to_string()),
                _ => (false, c),
            };
            let coeff = if compound { format!("\\left({body}\\right)") } else { body };
            let piece = match (coeff.as_str(), mono.is_empty()) {
                (_, true) => coeff.clone(),
                ("1", false) => mono,
                _ => format!("{coeff} {mono}"),
            };
            match (i, neg) {
                (0, true) => out.push_str(&format!("-{piece}")),
                (0, false) => out.push_str(&piece),
                (_, true) => out.push_str(&format!(" - {piece}")),
                (_, false) => out.push_str(&format!(" + {piece}")),
            }
        }
        out
    }
}

impl BesselExpr {
    /// LaTeX grouped by K_i K_j (or K_j), one group per nonzero entry.
    pub fn to_latex(&self) -> String {
        let mut groups = Vec::new();
        match self {
            BesselExpr::Pure { f } => return f.to_latex(),
            BesselExpr::Single(s) => {
                for (j, p) in s.p.iter().enumerate() {
                    if !p.is_zero() {
                        groups.push(format!("\\left({}\\right) K_{j}({})", p.to_latex(), bessel_arg(s.n)));
                    }
                }
            }
            BesselExpr::Double(d) => {
                for i in 0..2 {
                    for j in 0..2 {
                        let q = &d.q[i][j];
                        if !q.is_zero() {
                            groups.push(format!(
                                "\\left({}\\right) K_{i}({}) K_{j}({})",
                                q.to_latex(),
                                bessel_arg(d.n1),
                                bessel_arg(d.n2)
                            ));
                        }
                    }
                }
            }
        }
        if groups.is_empty() {
            "0".into()
        } else {
            groups.join("\n+ ")
        }
    }
}

impl HomBasis {
    pub fn to_latex(&self) -> String {
        match self {
            HomBasis::BesselK { r, n } => format!("\\sqrt{{y}} K_{{{}/2}}({})", 2 * r + 1, bessel_arg(*n)),
            HomBasis::BesselI { r, n } => format!("\\sqrt{{y}} I_{{{}/2}}({})", 2 * r + 1, bessel_arg(*n)),
            HomBasis::PowerNeg { r } => format!("y^{{-{r}}}"),
            HomBasis::PowerPos { r } => format!("y^{{{}}}", r + 1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bessel_expr::DoubleBessel;
    use crate::scalar_ring::{ratio, Constant, Symbol};

    #[test]
    fn laurent_layout() {
        let mut p = YLaurent::zero();
        p.add_term(-2, 0, Constant::pi_term(ratio(3, 2), -2));
        p.add_term(1, 1, Constant::int(-1));
        p.add_term(0, 0, Constant::symbol(Symbol::Zeta(3)) + Constant::int(1));
        assert_eq!(p.to_latex(), "-y \\log y + \\left(1 + \\zeta(3)\\right) + \\frac{3}{2\\pi^{2}} y^{-2}");
        assert_eq!(YLaurent::zero().to_latex(), "0");
    }

    #[test]
    fn bessel_grouping() {
        let mut d = DoubleBessel::zero(1, -2);
        d.q[1][1] = YLaurent::power(Constant::int(2), 3);
        let e = BesselExpr::Double(d);
        assert_eq!(e.to_latex(), "\\left(2 y^{3}\\right) K_1(2\\pi y) K_1(4\\pi y)");
        assert_eq!(HomBasis::BesselK { r: 5, n: 3 }.to_latex(), "\\sqrt{y} K_{11/2}(6\\pi y)");
    }
}
