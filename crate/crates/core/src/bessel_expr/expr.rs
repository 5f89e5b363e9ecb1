use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{ExprError, YLaurent};
use crate::scalar_ring::{Constant, Rational};

/// sum_{i,j in {0,1}} q_ij(y) K_i(2 pi |n1| y) K_j(2 pi |n2| y).
///
/// When |n1| = |n2| the two arguments coincide, K_0 K_1 = K_1 K_0 and the
/// (1,0) entry is folded into (0,1).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleBessel {
    pub n1: i64,
    pub n2: i64,
    pub q: [[YLaurent; 2]; 2],
}

/// p_0(y) K_0(2 pi |n| y) + p_1(y) K_1(2 pi |n| y).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingleBessel {
    pub n: i64,
    pub p: [YLaurent; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BesselExpr {
    Double(DoubleBessel),
    Single(SingleBessel),
    Pure { f: YLaurent },
}

/// 2 pi |n| as an exact constant.
pub fn bessel_rate(n: i64) -> Constant {
    Constant::pi_term(Rational::from_integer(BigInt::from(2 * n.abs())), 1)
}

impl DoubleBessel {
    pub fn zero(n1: i64, n2: i64) -> Self {
        assert!(n1 != 0 && n2 != 0, "double Bessel term needs n1, n2 != 0");
        DoubleBessel { n1, n2, q: Default::default() }
    }

    pub fn folded(&self) -> bool {
        self.n1.abs() == self.n2.abs()
    }

    /// Canonical form: move the (1,0) entry onto (0,1) when the arguments agree.
    pub fn fold(mut self) -> Self {
        if self.folded() && !self.q[1][0].is_zero() {
            let moved = std::mem::take(&mut self.q[1][0]);
            self.q[0][1].add_assign(&moved);
        }
        self
    }

    pub fn add_at(&mut self, i: usize, j: usize, t: &YLaurent) {
        self.q[i][j].add_assign(t);
    }

    pub fn is_zero(&self) -> bool {
        self.q.iter().flatten().all(|t| t.is_zero())
    }

    pub fn map(&self, f: impl Fn(&YLaurent) -> YLaurent) -> Self {
        DoubleBessel {
            n1: self.n1,
            n2: self.n2,
            q: [[f(&self.q[0][0]), f(&self.q[0][1])], [f(&self.q[1][0]), f(&self.q[1][1])]],
        }
    }

    pub fn derivative(&self) -> Self {
        let a = bessel_rate(self.n1);
        let b = bessel_rate(self.n2);
        let mut out = DoubleBessel::zero(self.n1, self.n2);
        for i in 0..2 {
            for j in 0..2 {
                let q = &self.q[i][j];
                if q.is_zero() {
                    continue;
                }
                out.add_at(i, j, &q.derivative());
                // d/dy K_0(a y) = -a K_1 ; d/dy K_1(a y) = -a K_0 - K_1 / y
                if i == 0 {
                    out.add_at(1, j, &q.scale(&-&a));
                } else {
                    out.add_at(0, j, &q.scale(&-&a));
                    out.add_at(1, j, &q.mul_y_pow(-1).neg());
                }
                if j == 0 {
                    out.add_at(i, 1, &q.scale(&-&b));
                } else {
                    out.add_at(i, 0, &q.scale(&-&b));
                    out.add_at(i, 1, &q.mul_y_pow(-1).neg());
                }
            }
        }
        out.fold()
    }
}

impl SingleBessel {
    pub fn zero(n: i64) -> Self {
        assert!(n != 0, "single Bessel term needs n != 0");
        SingleBessel { n, p: Default::default() }
    }

    pub fn is_zero(&self) -> bool {
        self.p.iter().all(|t| t.is_zero())
    }

    pub fn map(&self, f: impl Fn(&YLaurent) -> YLaurent) -> Self {
        SingleBessel { n: self.n, p: [f(&self.p[0]), f(&self.p[1])] }
    }

    pub fn derivative(&self) -> Self {
        let a = bessel_rate(self.n);
        let mut out = SingleBessel::zero(self.n);
        out.p[0].add_assign(&self.p[0].derivative());
        out.p[1].add_assign(&self.p[1].derivative());
        out.p[1].add_assign(&self.p[0].scale(&-&a));
        out.p[0].add_assign(&self.p[1].scale(&-&a));
        out.p[1].add_assign(&self.p[1].mul_y_pow(-1).neg());
        out
    }
}

impl BesselExpr {
    pub fn pure(f: YLaurent) -> Self {
        BesselExpr::Pure { f }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            BesselExpr::Double(d) => d.is_zero(),
            BesselExpr::Single(s) => s.is_zero(),
            BesselExpr::Pure { f } => f.is_zero(),
        }
    }

    /// Frequency sum n1 + n2 (n for single terms, 0 for pure ones).
    pub fn total_frequency(&self) -> i64 {
        match self {
            BesselExpr::Double(d) => d.n1 + d.n2,
            BesselExpr::Single(s) => s.n,
            BesselExpr::Pure { .. } => 0,
        }
    }

    pub fn map(&self, f: impl Fn(&YLaurent) -> YLaurent) -> Self {
        match self {
            BesselExpr::Double(d) => BesselExpr::Double(d.map(f)),
            BesselExpr::Single(s) => BesselExpr::Single(s.map(f)),
            BesselExpr::Pure { f: g } => BesselExpr::Pure { f: f(g) },
        }
    }

    pub fn scale(&self, c: &Constant) -> Self {
        self.map(|t| t.scale(c))
    }

    pub fn components(&self) -> Vec<&YLaurent> {
        match self {
            BesselExpr::Double(d) => d.q.iter().flatten().collect(),
            BesselExpr::Single(s) => s.p.iter().collect(),
            BesselExpr::Pure { f } => vec![f],
        }
    }

    fn same_shape(&self, o: &BesselExpr) -> Result<(), ExprError> {
        let ok = match (self, o) {
            (BesselExpr::Double(a), BesselExpr::Double(b)) => a.n1 == b.n1 && a.n2 == b.n2,
            (BesselExpr::Single(a), BesselExpr::Single(b)) => a.n == b.n,
            (BesselExpr::Pure { .. }, BesselExpr::Pure { .. }) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(ExprError::ShapeMismatch)
        }
    }

    pub fn add(&self, o: &BesselExpr) -> Result<BesselExpr, ExprError> {
        self.same_shape(o)?;
        Ok(match (self, o) {
            (BesselExpr::Double(a), BesselExpr::Double(b)) => {
                let mut out = a.clone();
                for i in 0..2 {
                    for j in 0..2 {
                        out.q[i][j].add_assign(&b.q[i][j]);
                    }
                }
                BesselExpr::Double(out.fold())
            }
            (BesselExpr::Single(a), BesselExpr::Single(b)) => {
                BesselExpr::Single(SingleBessel { n: a.n, p: [a.p[0].add(&b.p[0]), a.p[1].add(&b.p[1])] })
            }
            (BesselExpr::Pure { f: a }, BesselExpr::Pure { f: b }) => BesselExpr::Pure { f: a.add(b) },
            _ => unreachable!(),
        })
    }

    pub fn sub(&self, o: &BesselExpr) -> Result<BesselExpr, ExprError> {
        self.add(&o.map(|t| t.neg()))
    }

    pub fn derivative(&self) -> BesselExpr {
        match self {
            BesselExpr::Double(d) => BesselExpr::Double(d.derivative()),
            BesselExpr::Single(s) => BesselExpr::Single(s.derivative()),
            BesselExpr::Pure { f } => BesselExpr::Pure { f: f.derivative() },
        }
    }
}

fn operator(lambda: i64, mass_sq: &Constant, e: &BesselExpr) -> BesselExpr {
    let second = e.derivative().derivative().map(|t| t.mul_y_pow(2));
    let lam = Constant::int(lambda);
    let rest = e.map(|t| {
        let mut out = t.scale(&lam).neg();
        if !mass_sq.is_zero() {
            out.add_assign(&t.mul_y_pow(2).scale(mass_sq).neg());
        }
        out
    });
    second.add(&rest).expect("same shape")
}

/// 4 pi^2 m^2
fn mass(m: i64) -> Constant {
    Constant::pi_term(Rational::from_integer(BigInt::from(4 * m * m)), 2)
}

/// P_lambda = y^2 d^2/dy^2 - lambda - 4 pi^2 (n1 + n2)^2 y^2 applied to a
/// double Bessel expression. `sign` must be sgn(n1 n2).
pub fn apply_p(lambda: i64, sign: i64, e: &BesselExpr) -> Result<BesselExpr, ExprError> {
    match e {
        BesselExpr::Double(d) => {
            if sign != (d.n1 * d.n2).signum() {
                return Err(ExprError::SignMismatch);
            }
            Ok(operator(lambda, &mass(d.n1 + d.n2), e))
        }
        _ => Err(ExprError::ShapeMismatch),
    }
}

/// L_lambda = y^2 d^2/dy^2 - lambda - 4 pi^2 n^2 y^2 on a single Bessel expression.
pub fn apply_l(lambda: i64, e: &BesselExpr) -> Result<BesselExpr, ExprError> {
    match e {
        BesselExpr::Single(s) => Ok(operator(lambda, &mass(s.n), e)),
        _ => Err(ExprError::ShapeMismatch),
    }
}

/// y^2 d^2/dy^2 - lambda on a pure Laurent expression.
pub fn apply_euler(lambda: i64, e: &BesselExpr) -> Result<BesselExpr, ExprError> {
    match e {
        BesselExpr::Pure { .. } => Ok(operator(lambda, &Constant::zero(), e)),
        _ => Err(ExprError::ShapeMismatch),
    }
}

/// Whichever of P, L or the Euler operator matches the expression's shape.
pub fn apply_mode_operator(lambda: i64, e: &BesselExpr) -> BesselExpr {
    match e {
        BesselExpr::Double(d) => operator(lambda, &mass(d.n1 + d.n2), e),
        BesselExpr::Single(s) => operator(lambda, &mass(s.n), e),
        BesselExpr::Pure { .. } => operator(lambda, &Constant::zero(), e),
    }
}

/// K_m(z) = a(z) K_0(z) + b(z) K_1(z) with a, b polynomials in 1/z; the
/// maps send a power p of 1/z to its rational coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedK {
    pub k0: BTreeMap<u32, Rational>,
    pub k1: BTreeMap<u32, Rational>,
}

fn shift_scale(m: &BTreeMap<u32, Rational>, c: &Rational) -> BTreeMap<u32, Rational> {
    m.iter().map(|(p, v)| (p + 1, v * c)).collect()
}

fn add_maps(a: &BTreeMap<u32, Rational>, b: &BTreeMap<u32, Rational>) -> BTreeMap<u32, Rational> {
    let mut out = a.clone();
    for (p, v) in b {
        let e = out.entry(*p).or_insert_with(Rational::zero);
        *e += v;
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Reduce K_m to the K_0, K_1 basis with K_{m+1} = K_{m-1} + (2m/z) K_m.
pub fn reduce_k_index(m: u32) -> ReducedK {
    let one: BTreeMap<u32, Rational> = [(0u32, Rational::one())].into_iter().collect();
    let mut prev = ReducedK { k0: one.clone(), k1: BTreeMap::new() };
    let mut cur = ReducedK { k0: BTreeMap::new(), k1: one };
    if m == 0 {
        return prev;
    }
    for j in 1..m {
        let c = Rational::from_integer(BigInt::from(2 * j));
        let next = ReducedK {
            k0: add_maps(&prev.k0, &shift_scale(&cur.k0, &c)),
            k1: add_maps(&prev.k1, &shift_scale(&cur.k1, &c)),
        };
        prev = cur;
        cur = next;
    }
    cur
}

impl ReducedK {
    /// The coefficients as Laurent polynomials in y for z = 2 pi |n| y.
    pub fn in_y(&self, n: i64) -> [YLaurent; 2] {
        let conv = |m: &BTreeMap<u32, Rational>| {
            let mut out = YLaurent::zero();
            for (p, c) in m {
                let denom = Rational::from_integer(BigInt::from(2 * n.abs()).pow(*p));
                out.add_term(-(*p as i32), 0, Constant::pi_term(c / denom, -(*p as i32)));
            }
            out
        };
        [conv(&self.k0), conv(&self.k1)]
    }
}
