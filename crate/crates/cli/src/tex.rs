//! LaTeX documents. Output is math-mode source, one display per line;
//! lines starting with % are comments. All text is generated, never echoed
//! from user input, so nothing needs escaping.

use gnes_core::bessel_expr::BesselExpr;
use gnes_core::homogeneous::{AlphaChoice, Assembly, Combination, ModeSolution};
use gnes_core::scalar_ring::Constant;

use crate::commands::table_entries;

fn mode_sub(n1: i64, n2: i64) -> String {
    format!("{{{n1},{n2}}}")
}

pub fn solution(sol: &ModeSolution) -> String {
    let (n1, n2) = sol.mode();
    let m = mode_sub(n1, n2);
    let p = sol.params();
    let mut out = format!("% {p}, mode ({n1},{n2})\n");
    out.push_str(&format!("% prefactor: {}\n", sol.particular.prefactor.value().to_latex()));
    out.push_str(&format!("f^{{P}}_{m}(y) = {}\n", sol.particular.particular().to_latex()));
    match &sol.alpha {
        AlphaChoice::Value { alpha } => {
            out.push_str(&format!("\\alpha_{m} = {}\n", alpha.to_latex()));
        }
        AlphaChoice::Obstructed { leading, log_free_alpha } => {
            out.push_str(&format!(
                "% obstructed: the term {} y^{{{}}} \\log^{{{}}} y cannot be cancelled\n",
                leading.coeff.to_latex(),
                leading.y_exp,
                leading.log_exp
            ));
            out.push_str(&format!("\\alpha_{m} = {}\n", log_free_alpha.to_latex()));
        }
    }
    out.push_str(&format!("f_{m}(y) = f^{{P}}_{m}(y) + \\alpha_{m} {}\n", sol.hom_basis.to_latex()));
    out
}

pub fn assembly(a: &Assembly) -> String {
    let mut out = format!("% {}, modes n1 + n2 = {}, |n1| <= {}\n", a.params, a.n, a.cutoff);
    out.push_str(&format!("% decay fit slope {:.6} over {:?}, {:?}\n", a.decay.slope, a.decay.n1_range, a.convergence));
    for s in &a.summaries {
        let tag = if s.alpha.is_obstructed() { " % obstructed" } else { "" };
        out.push_str(&format!("\\alpha_{} = {}{tag}\n", mode_sub(s.n1, s.n2), s.alpha.value().to_latex()));
    }
    out
}

pub fn sums(a: i64, b: i64, s: i64, log: bool, value: Option<&Constant>) -> String {
    let weight = if log { " \\log|n|" } else { "" };
    let rhs = value.map_or("\\text{undefined}".to_string(), |c| c.to_latex());
    format!("\\sum_{{n \\neq 0}} \\frac{{\\sigma_{{{a}}}(|n|) \\sigma_{{{b}}}(|n|){weight}}}{{|n|^{{{s}}}}} = {rhs}\n")
}

pub fn combination(name: &str, c: &Combination, unit: &Constant, table: &BesselExpr) -> String {
    let (n1, n2) = c.mode;
    let mut out = format!("% {name} at mode ({n1},{n2}); entries are the particular part divided by the unit\n");
    out.push_str(&format!("% unit: {}\n", unit.to_latex()));
    for (key, p) in table_entries(table) {
        out.push_str(&format!("w_{{{key}}} = {}\n", p.to_latex()));
    }
    for (basis, w) in &c.homogeneous {
        out.push_str(&format!("% homogeneous: \\left({}\\right) {}\n", w.to_latex(), basis.to_latex()));
    }
    out
}
