use std::f64::consts::PI;

use super::{eval_f64, k0_k1};
use crate::bessel_expr::{BesselExpr, YLaurent};

fn laurent(t: &YLaurent, y: f64) -> f64 {
    t.eval(y, &eval_f64)
}

/// Numeric value of an expression at y > 0.
pub fn eval_expr(e: &BesselExpr, y: f64) -> f64 {
    match e {
        BesselExpr::Pure { f } => laurent(f, y),
        BesselExpr::Single(s) => {
            let k = k0_k1(2.0 * PI * s.n.abs() as f64 * y);
            laurent(&s.p[0], y) * k.0 + laurent(&s.p[1], y) * k.1
        }
        BesselExpr::Double(d) => {
            let a = k0_k1(2.0 * PI * d.n1.abs() as f64 * y);
            let b = k0_k1(2.0 * PI * d.n2.abs() as f64 * y);
            let ka = [a.0, a.1];
            let kb = [b.0, b.1];
            let mut total = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    if !d.q[i][j].is_zero() {
                        total += laurent(&d.q[i][j], y) * ka[i] * kb[j];
                    }
                }
            }
            total
        }
    }
}
