use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{BesselExpr, ExprError, YLaurent};
use crate::numeric_verify::bessel::{bessel_i_half, bessel_k_half};
use crate::scalar_ring::{log_normalize, Constant, Rational, Symbol};

/// Truncated small-y expansion: every term with y-exponent below `order`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsymptoticSeries {
    pub order: i32,
    pub series: YLaurent,
}

impl AsymptoticSeries {
    /// The most singular term: lowest y-power, highest log power among those.
    pub fn leading_term(&self) -> Option<(i32, u32, Constant)> {
        let k = self.series.min_exp()?;
        let l = self.series.terms().filter(|(e, _, _)| *e == k).map(|(_, l, _)| l).max()?;
        Some((k, l, self.series.coeff(k, l)))
    }
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

fn harmonic(k: u64) -> Rational {
    (1..=k).fold(Rational::zero(), |a, j| a + Rational::new(BigInt::one(), BigInt::from(j)))
}

/// log(pi |n|) + gamma, the constant part of log(z/2) + gamma at z = 2 pi |n| y.
fn log_shift(n: i64) -> Constant {
    let ln_n = log_normalize(&Rational::from_integer(BigInt::from(n.abs()))).expect("positive");
    Constant::symbol(Symbol::LnPi) + ln_n + Constant::symbol(Symbol::EulerGamma)
}

/// Small-y expansion of K_i(2 pi |n| y), i in {0, 1}, to exponents below `order`.
pub fn k_series(i: usize, n: i64, order: i32) -> YLaurent {
    let na = BigInt::from(n.abs());
    let ell = log_shift(n);
    let mut out = YLaurent::zero();
    if i == 0 {
        let mut k: u64 = 0;
        while (2 * k as i32) < order {
            let f = factorial(k);
            let c = Constant::pi_term(Rational::new(na.pow(2 * k as u32), &f * &f), 2 * k as i32);
            out.add_term(2 * k as i32, 1, -&c);
            let rest = Constant::rational(harmonic(k)) - ell.clone();
            out.add_term(2 * k as i32, 0, &c * &rest);
            k += 1;
        }
    } else {
        if -1 < order {
            out.add_term(-1, 0, Constant::pi_term(Rational::new(BigInt::one(), 2 * &na), -1));
        }
        let mut k: u64 = 0;
        while ((2 * k + 1) as i32) < order {
            let c = Constant::pi_term(
                Rational::new(na.pow(2 * k as u32 + 1), factorial(k) * factorial(k + 1)),
                2 * k as i32 + 1,
            );
            let e = (2 * k + 1) as i32;
            out.add_term(e, 1, c.clone());
            let h = (harmonic(k) + harmonic(k + 1)) / Rational::from_integer(BigInt::from(2));
            let rest = ell.clone() - Constant::rational(h);
            out.add_term(e, 0, &c * &rest);
            k += 1;
        }
    }
    out
}

/// Small-y expansion of a Bessel expression.
pub fn small_y_series(e: &BesselExpr, order: i32) -> Result<AsymptoticSeries, ExprError> {
    let mut out = YLaurent::zero();
    match e {
        BesselExpr::Pure { f } => out = f.truncate(order),
        BesselExpr::Single(s) => {
            for i in 0..2 {
                let p = &s.p[i];
                let Some(m) = p.min_exp() else { continue };
                let ks = k_series(i, s.n, order - m + 1);
                out.add_assign(&p.mul_truncated(&ks, order)?);
            }
        }
        BesselExpr::Double(d) => {
            for i in 0..2 {
                for j in 0..2 {
                    let q = &d.q[i][j];
                    let Some(m) = q.min_exp() else { continue };
                    let reach = order - m + 2;
                    let ki = k_series(i, d.n1, reach);
                    let kj = k_series(j, d.n2, reach);
                    let prod = ki.mul_truncated(&kj, order - m)?;
                    out.add_assign(&q.mul_truncated(&prod, order)?);
                }
            }
        }
    }
    Ok(AsymptoticSeries { order, series: out })
}

/// Basis of the decaying homogeneous solution for one Fourier mode.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HomBasis {
    /// sqrt(y) K_{r+1/2}(2 pi |n| y), n = n1 + n2 != 0
    BesselK { r: u32, n: i64 },
    /// y^{-r}, used when n1 + n2 = 0
    PowerNeg { r: u32 },
    /// Gamma(r+3/2) (pi |n|)^{-r-1/2} sqrt(y) I_{r+1/2}(2 pi |n| y), normalized to
    /// start with y^{r+1}. Excluded by the growth condition at infinity.
    BesselI { r: u32, n: i64 },
    /// y^{r+1}. Excluded by the growth condition at infinity.
    PowerPos { r: u32 },
}

impl HomBasis {
    pub fn for_mode(r: u32, n: i64) -> HomBasis {
        if n == 0 {
            HomBasis::PowerNeg { r }
        } else {
            HomBasis::BesselK { r, n }
        }
    }

    /// The growing partner of a decaying basis element.
    pub fn growing_partner(&self) -> HomBasis {
        match *self {
            HomBasis::BesselK { r, n } | HomBasis::BesselI { r, n } => HomBasis::BesselI { r, n },
            HomBasis::PowerNeg { r } | HomBasis::PowerPos { r } => HomBasis::PowerPos { r },
        }
    }

    /// Whether the branch is allowed by the growth condition.
    pub fn is_admissible(&self) -> bool {
        matches!(self, HomBasis::BesselK { .. } | HomBasis::PowerNeg { .. })
    }

    pub fn r(&self) -> u32 {
        match self {
            HomBasis::BesselK { r, .. }
            | HomBasis::PowerNeg { r }
            | HomBasis::BesselI { r, .. }
            | HomBasis::PowerPos { r } => *r,
        }
    }

    /// Coefficient of the leading small-y term: y^{-r} for the decaying
    /// branches, y^{r+1} for the growing ones.
    pub fn leading_coefficient(&self) -> Constant {
        let k = if self.is_admissible() { -(self.r() as i32) } else { self.r() as i32 + 1 };
        self.small_y_series(k + 1).series.coeff(k, 0)
    }

    /// Exact small-y expansion to exponents below `order`.
    pub fn small_y_series(&self, order: i32) -> AsymptoticSeries {
        match self {
            HomBasis::PowerNeg { r } => {
                let mut s = YLaurent::zero();
                if -(*r as i32) < order {
                    s.add_term(-(*r as i32), 0, Constant::one());
                }
                AsymptoticSeries { order, series: s }
            }
            HomBasis::PowerPos { r } => {
                let mut s = YLaurent::zero();
                if (*r as i32 + 1) < order {
                    s.add_term(*r as i32 + 1, 0, Constant::one());
                }
                AsymptoticSeries { order, series: s }
            }
            HomBasis::BesselI { r, n } => {
                // sum_k (pi |n|)^{2k} y^{2k+r+1} Gamma(r+3/2) / (k! Gamma(k+r+3/2))
                let na = BigInt::from(n.unsigned_abs());
                let mut s = YLaurent::zero();
                let mut c = Rational::one();
                let mut k: u64 = 0;
                while ((2 * k) as i32 + *r as i32 + 1) < order {
                    let e = (2 * k) as i32 + *r as i32 + 1;
                    s.add_term(e, 0, Constant::pi_term(&c * Rational::from_integer(na.pow(2 * k as u32)), 2 * k as i32));
                    // Gamma(k+r+3/2) -> Gamma(k+r+5/2) multiplies by (2k+2r+3)/2
                    c = c / Rational::from_integer(BigInt::from(k + 1))
                        * Rational::new(BigInt::from(2), BigInt::from(2 * k + 2 * *r as u64 + 3));
                    k += 1;
                }
                AsymptoticSeries { order, series: s }
            }
            HomBasis::BesselK { r, n } => {
                // sqrt(y) K_{r+1/2}(c y) = e^{-c y} / (2 sqrt|n|) sum_k (r+k)!/(k!(r-k)!) (2 c y)^{-k}
                let na = n.unsigned_abs();
                let front = Constant::sqrt_int(na).scale(&Rational::new(BigInt::one(), BigInt::from(2 * na)));
                let mut s = YLaurent::zero();
                for k in 0..=*r as u64 {
                    let ck = Rational::new(
                        factorial(*r as u64 + k),
                        factorial(k) * factorial(*r as u64 - k) * BigInt::from(4 * na).pow(k as u32),
                    );
                    let mut j: u64 = 0;
                    loop {
                        let e = j as i32 - k as i32;
                        if e >= order {
                            break;
                        }
                        // (-c)^j / j! with c = 2 pi |n|
                        let mut cj = Rational::new(BigInt::from(2 * na).pow(j as u32), factorial(j));
                        if j % 2 == 1 {
                            cj = -cj;
                        }
                        let coeff = Constant::pi_term(&ck * &cj, j as i32 - k as i32);
                        s.add_term(e, 0, &front * &coeff);
                        j += 1;
                    }
                }
                AsymptoticSeries { order, series: s }
            }
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        match self {
            HomBasis::PowerNeg { r } => y.powi(-(*r as i32)),
            HomBasis::BesselK { r, n } => {
                let z = 2.0 * std::f64::consts::PI * n.abs() as f64 * y;
                y.sqrt() * bessel_k_half(*r, z)
            }
            HomBasis::PowerPos { r } => y.powi(*r as i32 + 1),
            HomBasis::BesselI { r, n } => {
                let a = std::f64::consts::PI * n.abs() as f64;
                let h = 2 * r + 1;
                // Gamma(r + 3/2) = sqrt(pi) (2r+1)!! / 2^{r+1}
                let gamma = (1..=*r).fold(std::f64::consts::PI.sqrt() / 2.0, |g, k| g * (k as f64 + 0.5));
                gamma * a.powf(-(*r as f64) - 0.5) * y.sqrt() * bessel_i_half(h, 2.0 * a * y)
            }
        }
    }
}
