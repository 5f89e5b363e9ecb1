//! Double-precision modified Bessel functions.

use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Order of a modified Bessel function: integer or half-odd-integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BesselOrder {
    Int(u32),
    /// nu = h / 2 with h odd
    Half(u32),
}

/// (K_0(x), K_1(x)) by the ascending series.
fn k01_series(x: f64) -> (f64, f64) {
    let q = x * x / 4.0;
    let l = (x / 2.0).ln() + EULER_GAMMA;
    let mut i0 = 0.0;
    let mut i1 = 0.0;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut t0 = 1.0; // q^k / (k!)^2
    let mut t1 = 1.0; // q^k / (k! (k+1)!)
    let mut h = 0.0; // H_k
    for k in 0..200 {
        let kf = k as f64;
        let h_next = h + 1.0 / (kf + 1.0);
        i0 += t0;
        i1 += t1;
        s0 += h * t0;
        s1 += (h + h_next) * t1;
        if t0 < 1e-18 * i0.abs() && k > 2 {
            break;
        }
        t0 *= q / ((kf + 1.0) * (kf + 1.0));
        t1 *= q / ((kf + 1.0) * (kf + 2.0));
        h = h_next;
    }
    let i1 = i1 * x / 2.0;
    let k0 = -l * i0 + s0;
    let k1 = 1.0 / x + l * i1 - x / 4.0 * s1;
    (k0, k1)
}

/// (K_0(x), K_1(x)) by Steed's continued fraction, valid for x > 1.
fn k01_cf(x: f64) -> (f64, f64) {
    let v: f64 = 0.0;
    let mut a = v * v - 0.25;
    let mut b = 2.0 * (x + 1.0);
    let mut d = 1.0 / b;
    let mut delta = d;
    let mut f = d;
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut q = -a;
    let mut c = -a;
    let mut s = 1.0 + q * delta;
    for k in 2..10_000 {
        let kf = k as f64;
        a -= 2.0 * (kf - 1.0);
        b += 2.0;
        d = 1.0 / (b + a * d);
        delta *= b * d - 1.0;
        f += delta;
        let t = (prev - (b - 2.0) * cur) / a;
        prev = cur;
        cur = t;
        c *= -a / kf;
        q += c * t;
        s += q * delta;
        if (q * delta).abs() < s.abs() * f64::EPSILON / 2.0 {
            break;
        }
    }
    let k0 = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (0.5 + v + x + (v * v - 0.25) * f) / x;
    (k0, k1)
}

pub fn k0_k1(x: f64) -> (f64, f64) {
    assert!(x > 0.0, "K_nu needs a positive argument");
    if x <= 2.0 {
        k01_series(x)
    } else {
        k01_cf(x)
    }
}

/// K_n(x) for integer n by upward recurrence from K_0, K_1.
pub fn bessel_k_int(n: u32, x: f64) -> f64 {
    let (mut km, mut k) = k0_k1(x);
    if n == 0 {
        return km;
    }
    for m in 1..n {
        let next = km + 2.0 * m as f64 / x * k;
        km = k;
        k = next;
    }
    k
}

/// K_{r+1/2}(x) from the terminating closed form.
pub fn bessel_k_half(r: u32, x: f64) -> f64 {
    let mut sum = 0.0;
    let mut coeff = 1.0; // (r+k)! / (k! (r-k)!)
    for k in 0..=r {
        if k > 0 {
            let kf = k as f64;
            coeff *= (r as f64 + kf) * (r as f64 - kf + 1.0) / kf;
        }
        sum += coeff / (2.0 * x).powi(k as i32);
    }
    (PI / (2.0 * x)).sqrt() * (-x).exp() * sum
}

pub fn bessel_k(order: BesselOrder, x: f64) -> f64 {
    match order {
        BesselOrder::Int(n) => bessel_k_int(n, x),
        BesselOrder::Half(h) => {
            assert!(h % 2 == 1, "half order needs an odd numerator");
            bessel_k_half((h - 1) / 2, x)
        }
    }
}

fn gamma_half_f64(h: u32) -> f64 {
    // Gamma(h/2) for h >= 1
    if h % 2 == 0 {
        (1..h / 2).map(|k| k as f64).product()
    } else {
        let mut g = PI.sqrt();
        let mut t = 1;
        while t < h {
            g *= t as f64 / 2.0;
            t += 2;
        }
        g
    }
}

/// I_{h/2}(x) by its ascending series, h >= 1.
pub fn bessel_i_half(h: u32, x: f64) -> f64 {
    let nu = h as f64 / 2.0;
    let mut term = (x / 2.0).powf(nu) / gamma_half_f64(h + 2);
    let mut sum = 0.0;
    let q = x * x / 4.0;
    for k in 0..500 {
        sum += term;
        let kf = k as f64;
        term *= q / ((kf + 1.0) * (kf + 1.0 + nu));
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}

/// x (I_nu K_nu' - I_nu' K_nu) at nu = r + 1/2; equals -1 exactly.
pub fn wronskian_half(r: u32, x: f64) -> f64 {
    let h = 2 * r + 1;
    let nu = h as f64 / 2.0;
    let i = bessel_i_half(h, x);
    let k = bessel_k_half(r, x);
    // I_nu' = I_{nu+1} + (nu/x) I_nu ;  K_nu' = -K_{nu+1} + (nu/x) K_nu
    let ip = bessel_i_half(h + 2, x) + nu / x * i;
    let kp = -bessel_k_half(r + 1, x) + nu / x * k;
    x * (i * kp - ip * k)
}
