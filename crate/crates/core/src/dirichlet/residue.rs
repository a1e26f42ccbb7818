//! Residue predictions by the trapezoid rule on small circles, checked by node doubling.

use num_complex::Complex64;
use serde::Serialize;

use super::euler::{euler_f_q_squarefree, LocalFactorSet};
use super::zeta::zeta;
use crate::arith::exact::factorial_f64;
use crate::arith::factor::{factorize, is_squarefree};
use crate::error::{invalid, precondition, Error, Result};
use crate::windows::SmoothWindow;

pub const CONTOUR_NODES: usize = 64;
/// Node-doubling tolerance relative to the size of the integrand on the contour.
const DOUBLING_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResiduePrediction {
    pub value: f64,
    pub radius: f64,
    pub nodes: usize,
    /// |value(m nodes) − value(2m nodes)| plus any imaginary residue
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prediction {
    pub q: u64,
    pub k: u32,
    #[serde(rename = "N")]
    pub n: f64,
    pub value: f64,
    pub error: f64,
}

fn trapezoid(
    center: Complex64,
    radius: f64,
    m: usize,
    f: &impl Fn(Complex64) -> Result<Complex64>,
) -> Result<(Complex64, f64)> {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for j in 0..m {
        let theta = std::f64::consts::TAU * (j as f64 + 0.5) / m as f64;
        let u = Complex64::from_polar(radius, theta);
        let v = f(center + u)? * u;
        scale += v.norm();
        acc += v;
    }
    Ok((acc / m as f64, scale / m as f64))
}

/// (1/2πi)∮ f(s) ds over |s − center| = radius, with m and 2m nodes compared.
pub fn residue_by_contour(
    center: Complex64,
    radius: f64,
    nodes: usize,
    f: impl Fn(Complex64) -> Result<Complex64>,
) -> Result<ResiduePrediction> {
    let (a, _) = trapezoid(center, radius, nodes, &f)?;
    let (b, scale) = trapezoid(center, radius, 2 * nodes, &f)?;
    let diff = (a - b).norm();
    if diff > DOUBLING_TOLERANCE * scale {
        return Err(Error::ContourAccuracy {
            nodes,
            doubled: 2 * nodes,
            diff,
            value: b.norm(),
        });
    }
    Ok(ResiduePrediction {
        value: b.re,
        radius,
        nodes: 2 * nodes,
        error: diff + b.im.abs(),
    })
}

fn scaled(p: ResiduePrediction, factor: f64) -> ResiduePrediction {
    ResiduePrediction {
        value: p.value * factor,
        error: p.error * factor.abs(),
        ..p
    }
}

/// Res_{s=1} ζ(s)^k F_q(s) N^s / s, the prediction for Σ_{n ≤ N} d_k(n) c_q(n).
pub fn residue_dk_correlation(q: u64, k: u32, n: f64) -> Result<ResiduePrediction> {
    if q as f64 > n {
        return Err(precondition(format!("q = {q} exceeds N = {n}")));
    }
    if n < 3.0 {
        return Err(invalid("N must be at least 3"));
    }
    let set = LocalFactorSet::new(q, k)?;
    let ln = n.ln();
    let one = Complex64::new(1.0, 0.0);
    // N^{s−1} keeps the integrand O((log N)^k); the factor N is restored afterwards
    let res = residue_by_contour(one, 1.0 / ln, CONTOUR_NODES, |s| {
        Ok(zeta(s)?.powu(k) * set.f(s)? * ((s - 1.0) * ln).exp() / s)
    })?;
    Ok(scaled(res, n))
}

/// Res_{w=1} ζ(w)^k F_q(w) Φ̃(w) N^w with Φ̃(w) = ∫₀¹ Φ(y) y^{w−1} dy, the prediction
/// for the smoothed sum Σ_n d_k(n) c_q(n) Φ(n/N).
pub fn residue_dk_correlation_smooth(
    q: u64,
    k: u32,
    n: f64,
    window: &SmoothWindow,
) -> Result<ResiduePrediction> {
    if q as f64 > n {
        return Err(precondition(format!("q = {q} exceeds N = {n}")));
    }
    if n < 3.0 {
        return Err(invalid("N must be at least 3"));
    }
    let set = LocalFactorSet::new(q, k)?;
    let ln = n.ln();
    let one = Complex64::new(1.0, 0.0);
    let res = residue_by_contour(one, 1.0 / ln, CONTOUR_NODES, |w| {
        Ok(zeta(w)?.powu(k) * set.f(w)? * window.mellin(w) * ((w - 1.0) * ln).exp())
    })?;
    Ok(scaled(res, n))
}

/// Res_{s=0} ζ(s+1)^{k−1} G_q(s+1) x^s / s, the prediction for Σ_{n ≤ x, q | n} d_{k−1}(n)/n.
pub fn residue_divisor_mean(q: u64, k: u32, x: f64) -> Result<ResiduePrediction> {
    if q as f64 > x {
        return Err(precondition(format!("q = {q} exceeds x = {x}")));
    }
    if x < 3.0 {
        return Err(invalid("x must be at least 3"));
    }
    let set = LocalFactorSet::new(q, k)?;
    let lx = x.ln();
    residue_by_contour(Complex64::new(0.0, 0.0), 1.0 / lx, CONTOUR_NODES, |s| {
        let s1 = s + 1.0;
        Ok(zeta(s1)?.powu(k - 1) * set.g(s1)? * (s * lx).exp() / s)
    })
}

pub fn prediction(q: u64, k: u32, n: f64, r: &ResiduePrediction) -> Prediction {
    Prediction {
        q,
        k,
        n,
        value: r.value,
        error: r.error,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RamdkevalResidue {
    pub q: u64,
    pub k: u32,
    #[serde(rename = "N")]
    pub n: f64,
    /// Res_{s=1} ζ(s)^k (F_q(s)/F_q(1)) N^{s−1}/s
    pub value: f64,
    pub error: f64,
    /// (log N + f_q(1))^{k−1}/(k−1)!
    pub main_term: f64,
    /// (log N)^{k−1}
    pub log_power: f64,
}

impl RamdkevalResidue {
    pub fn ratio_to_main_term(&self) -> f64 {
        self.value / self.main_term
    }
}

/// Admissible moduli: squarefree, q ≤ N^{1/2 − δ/2}, every prime factor ≤ N^c.
pub fn ramdkeval_admissible(q: u64, n: f64, delta: f64, c: f64) -> bool {
    is_squarefree(q)
        && (q as f64) <= n.powf(0.5 - delta / 2.0)
        && factorize(q).iter().all(|&(p, _)| (p as f64) <= n.powf(c))
}

pub fn residue_ramdkeval(q: u64, k: u32, n: f64, delta: f64, c: f64) -> Result<RamdkevalResidue> {
    if !is_squarefree(q) {
        return Err(Error::NotSquarefree(q));
    }
    if !ramdkeval_admissible(q, n, delta, c) {
        return Err(precondition(format!(
            "q = {q} must be at most N^(1/2 − δ/2) = {} with prime factors at most N^c = {}",
            n.powf(0.5 - delta / 2.0),
            n.powf(c)
        )));
    }
    if k < 2 {
        return Err(invalid(format!("k = {k}; need k ≥ 2")));
    }
    let ln = n.ln();
    let one = Complex64::new(1.0, 0.0);
    let f1 = euler_f_q_squarefree(q, k, one)?;
    let res = residue_by_contour(one, 1.0 / ln, CONTOUR_NODES, |s| {
        Ok(zeta(s)?.powu(k) * euler_f_q_squarefree(q, k, s)? / f1 * ((s - 1.0) * ln).exp() / s)
    })?;
    let fq1 = super::fq::f_q_at_one(q, k)?;
    let main_term = (ln + fq1).powi(k as i32 - 1) / factorial_f64(k - 1);
    Ok(RamdkevalResidue {
        q,
        k,
        n,
        value: res.value,
        error: res.error,
        main_term,
        log_power: ln.powi(k as i32 - 1),
    })
}
