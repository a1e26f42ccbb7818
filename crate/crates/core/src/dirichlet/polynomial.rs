//! The iterated residue
//!   Res_{z=0} Res_{s=0} Res_{w=0} (s+z)^{k−1} R^s N^w (R^z − (KQ0)^z) / (s^k w^k z (s+z+w)^{k(k−1)})
//! in closed form as a double sum over ℓ, j, with an independent triple-contour evaluation,
//! its leading coefficient in α = log R / log N, and a Chebyshev-style choice of R.

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::exact::{
    exact_int, exact_to_f64, factorial, factorial_f64, gen_binomial, ExactScalar,
};
use crate::error::{invalid, Error, Result};
use crate::numeric::contour_mean;

pub const CHEBYSHEV_GRID: usize = 512;

fn degree(k: u32) -> u32 {
    k * k - 1
}

/// Closed form of the iterated residue.
pub fn polynomial_69(k: u32, log_n: f64, log_r: f64, log_kq0: f64) -> f64 {
    assert!(k >= 2, "k must be at least 2");
    let kk = i64::from(k);
    let base = (k - 1) * (k - 1);
    let mut acc = 0.0;
    for l in 0..k {
        let bl = gen_binomial(-kk * (kk - 1), l);
        for j in 0..k {
            let bj = gen_binomial(-((kk - 1) * (kk - 1)) - i64::from(l), j);
            let coef = exact_to_f64(&(&bl * &bj));
            let m = base + l + j;
            let diff = (log_r.powi(m as i32) - log_kq0.powi(m as i32)) / factorial_f64(m);
            acc += coef * log_n.powi((k - 1 - l) as i32) / factorial_f64(k - 1 - l)
                * log_r.powi((k - 1 - j) as i32)
                / factorial_f64(k - 1 - j)
                * diff;
        }
    }
    acc
}

/// Coefficient of α^{k²−1} after dividing by (log N)^{k²−1}: the ℓ = k − 1 terms.
pub fn leading_coefficient(k: u32) -> ExactScalar {
    let kk = i64::from(k);
    let top = gen_binomial(-kk * (kk - 1), k - 1);
    let mut sum = ExactScalar::zero();
    for j in 0..k {
        let den = factorial(k - 1 - j) * factorial(k * (k - 1) + j);
        sum += gen_binomial(-kk * (kk - 1), j) / ExactScalar::from_integer(den);
    }
    top * sum
}

/// (−1)^{k−1} / ((k−1)! (k(k−1)−1)! (k²−1)).
pub fn leading_coefficient_closed_form(k: u32) -> ExactScalar {
    let den = factorial(k - 1) * factorial(k * (k - 1) - 1) * num_bigint::BigInt::from(k * k - 1);
    let sign = if k % 2 == 0 { -1 } else { 1 };
    exact_int(sign) / ExactScalar::from_integer(den)
}

/// Nested trapezoid rules on |w| = k/log N, |s| = k/log R, |z| = 3k/log R, so that each
/// inner circle excludes the poles at w = −(s+z) and s = −z (log R < log N). Each radius
/// follows the exponential it multiplies; with s, z on circles of order 1/log N and small
/// log R/log N the integrand exceeds the value by about 10^14 and double precision is lost.
pub fn triple_contour_69(k: u32, log_n: f64, log_r: f64, log_kq0: f64, nodes: usize) -> f64 {
    let kf = f64::from(k);
    let lr = log_r.min(log_n);
    let (rw, rs, rz) = (kf / log_n, kf / lr, 3.0 * kf / lr);
    let zero = Complex64::new(0.0, 0.0);
    let km1 = k as i32 - 1;
    let big = (k * (k - 1)) as i32;
    let v = contour_mean(zero, rz, nodes, |z| {
        let zfac = ((z * log_r).exp() - (z * log_kq0).exp()) / z;
        contour_mean(zero, rs, nodes, |s| {
            let sz = s + z;
            let sfac = sz.powi(km1) * (s * log_r).exp() / s.powi(km1 + 1);
            contour_mean(zero, rw, nodes, |w| {
                (w * log_n).exp() / (w.powi(km1 + 1) * (sz + w).powi(big))
            }) * sfac
        }) * zfac
    });
    v.re
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChebyshevChoice {
    #[serde(rename = "R")]
    pub r: f64,
    pub alpha: f64,
    pub value: f64,
    pub interval: (f64, f64),
    /// 2 |lead| (length/4)^{k²−1} (log N)^{k²−1}
    pub floor: f64,
    pub certified: bool,
}

impl ChebyshevChoice {
    /// R moved to the nearest half-integer, so that R is never an integer.
    pub fn r_half_integer(&self) -> f64 {
        self.r.floor() + 0.5
    }
}

/// Scans α = log R / log N over [log(max(K, 1) Q0 N^ε), log(Q N^{−ε})] / log N on a uniform grid and
/// returns the point where the closed form is largest in absolute value.
pub fn choose_r_chebyshev(
    k: u32,
    n: f64,
    q0: f64,
    q: f64,
    big_k: f64,
    eps: f64,
) -> Result<ChebyshevChoice> {
    choose_r_chebyshev_grid(k, n, q0, q, big_k, eps, CHEBYSHEV_GRID)
}

pub fn choose_r_chebyshev_grid(
    k: u32,
    n: f64,
    q0: f64,
    q: f64,
    big_k: f64,
    eps: f64,
    grid: usize,
) -> Result<ChebyshevChoice> {
    if k < 2 {
        return Err(invalid(format!("k = {k}; need k ≥ 2")));
    }
    if grid < 2 {
        return Err(invalid("grid needs at least two points"));
    }
    let l = n.ln();
    let lo = ((big_k.max(1.0) * q0).ln() + eps * l) / l;
    let hi = (q.ln() - eps * l) / l;
    if !(lo < hi) {
        return Err(Error::EmptyInterval(format!(
            "K·Q0·N^ε = {} is not below Q·N^(−ε) = {}",
            big_k.max(1.0) * q0 * n.powf(eps),
            q * n.powf(-eps)
        )));
    }
    let log_kq0 = (big_k * q0).ln();
    let (alpha, value) = (0..grid)
        .map(|i| {
            let a = lo + (hi - lo) * i as f64 / (grid - 1) as f64;
            (a, polynomial_69(k, l, a * l, log_kq0))
        })
        .fold((lo, 0.0f64), |best, cur| {
            if cur.1.abs() > best.1.abs() {
                cur
            } else {
                best
            }
        });
    let d = degree(k);
    let lead = leading_coefficient(k).to_f64().unwrap_or(0.0).abs();
    let floor = 2.0 * lead * ((hi - lo) / 4.0).powi(d as i32) * l.powi(d as i32);
    Ok(ChebyshevChoice {
        r: (alpha * l).exp(),
        alpha,
        value,
        interval: (lo, hi),
        floor,
        certified: value.abs() >= floor,
    })
}
