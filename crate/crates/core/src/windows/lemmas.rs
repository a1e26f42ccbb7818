//! Numerical checks of the weighted-sum identities and asymptotics that feed the
//! major-arc evaluation.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use super::tilde::build_tilde_sequence;
use super::weights::{build_weights, WeightKind, WeightSet};
use super::window::SmoothWindow;
use crate::arith::factor::{euler_phi, gcd, is_squarefree, mobius};
use crate::arith::{DivisorSums, Sequence, SieveTable};
use crate::error::{precondition, Result};
use crate::numeric::compensated_sum;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LemmaMajorCheck {
    pub a: u64,
    pub q: u64,
    pub beta: f64,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub error: f64,
    /// B·R·log N
    pub scale: f64,
    /// error / scale, the empirical constant
    pub error_ratio: f64,
}

/// Compares Ã(a/q + β) with N Φ̂(−Nβ) Σ_{r ≤ R, q | r} b_r / r.
pub fn check_lemma_major(
    tilde: &Sequence,
    w: &WeightSet,
    phi: &SmoothWindow,
    a: u64,
    q: u64,
    beta: f64,
) -> Result<LemmaMajorCheck> {
    let r = w.r();
    if q == 0 || q as f64 > r {
        return Err(precondition(format!(
            "need 1 ≤ q ≤ R, got q = {q}, R = {r}"
        )));
    }
    if gcd(a % q, q) != 1 {
        return Err(precondition(format!("a = {a} is not coprime to q = {q}")));
    }
    if beta.abs() > 1.0 / (2.0 * q as f64 * r) {
        return Err(precondition(format!(
            "|β| = {} exceeds 1/(2qR) = {}",
            beta.abs(),
            1.0 / (2.0 * q as f64 * r)
        )));
    }
    let n = tilde.len();
    let nf = n as f64;
    // e(n a / q) from the exact residue, e(nβ) separately
    let mut re = Vec::with_capacity(tilde.count_nonzero());
    let mut im = Vec::with_capacity(tilde.count_nonzero());
    for (m, v) in tilde.nonzero() {
        let res = (m as u128 * a as u128 % q as u128) as f64 / q as f64;
        let phase = TAU * (res + m as f64 * beta);
        let (s, c) = phase.sin_cos();
        re.push(v * c);
        im.push(v * s);
    }
    let lhs = Complex64::new(compensated_sum(re), compensated_sum(im));
    let rhs = phi.phi_hat(-nf * beta) * (nf * w.weight_sum_q(q));
    let error = (lhs - rhs).norm();
    let scale = w.big_b() * r * nf.ln();
    Ok(LemmaMajorCheck {
        a,
        q,
        beta,
        lhs,
        rhs,
        error,
        scale,
        error_ratio: error / scale,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Lemma5Check {
    pub lhs: f64,
    pub rhs: f64,
    /// |lhs − rhs| / max(|lhs|, |rhs|), or 0 when both vanish
    pub residual: f64,
}

/// Σ a_n ã_n against Σ_{q ≤ R} (Σ_{r ≤ R, q | r} b_r / r) Σ_n a_n c_q(n) Φ(n/N).
pub fn check_lemma5(seq: &Sequence, w: &WeightSet, phi: &SmoothWindow) -> Result<Lemma5Check> {
    let n = seq.len();
    if w.r_max() > n {
        return Err(precondition(format!("R = {} exceeds N = {n}", w.r())));
    }
    let tilde = build_tilde_sequence(n, w, phi)?;
    let lhs = compensated_sum(seq.values().iter().zip(tilde.values()).map(|(a, t)| a * t));
    let sums = DivisorSums::new(seq, w.r_max(), Some(phi));
    let rhs = compensated_sum((1..=w.r_max() as u64).map(|q| {
        let ws = w.weight_sum_q(q);
        if ws == 0.0 {
            0.0
        } else {
            ws * sums.correlation(q)
        }
    }));
    let denom = lhs.abs().max(rhs.abs());
    let residual = if denom == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / denom
    };
    Ok(Lemma5Check { lhs, rhs, residual })
}

/// A main term M and the normalised remainder (S − M)/N.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Calibration {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "R")]
    pub r: f64,
    pub sum: f64,
    pub main_term: f64,
    pub error_over_n: f64,
}

/// Σ_{n ≤ N} Λ(n) ã_n against N log R ∫Φ, with prime-sieve weights.
pub fn calibrate_lambda_tilde(
    table: &SieveTable,
    r: f64,
    phi: &SmoothWindow,
) -> Result<Calibration> {
    let n = table.len();
    let w = build_weights(WeightKind::PrimeSieve, r)?;
    let tilde = build_tilde_sequence(n, &w, phi)?;
    let sum = compensated_sum(
        table
            .lambda_slice()
            .iter()
            .zip(tilde.values())
            .map(|(l, t)| l * t),
    );
    let main_term = n as f64 * r.ln() * phi.integral();
    Ok(Calibration {
        n,
        r,
        sum,
        main_term,
        error_over_n: (sum - main_term) / n as f64,
    })
}

/// Σ_{n ≤ N} ã_n² against N log R ∫Φ², with prime-sieve weights.
pub fn calibrate_tilde_square(n: usize, r: f64, phi: &SmoothWindow) -> Result<Calibration> {
    let w = build_weights(WeightKind::PrimeSieve, r)?;
    let tilde = build_tilde_sequence(n, &w, phi)?;
    let sum = compensated_sum(tilde.values().iter().map(|t| t * t));
    let main_term = n as f64 * r.ln() * phi.integral_sq();
    Ok(Calibration {
        n,
        r,
        sum,
        main_term,
        error_over_n: (sum - main_term) / n as f64,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightSumDeviation {
    pub q: u64,
    #[serde(rename = "R")]
    pub r: f64,
    pub weight_sum: f64,
    pub target: f64,
    pub deviation: f64,
    /// (5/q) exp(−0.5 √log(R/q))
    pub envelope: f64,
}

impl WeightSumDeviation {
    pub fn ratio(&self) -> f64 {
        self.deviation / self.envelope
    }
}

/// |Σ_{r ≤ R, q | r} μ(r) log(R/r)/r − μ(q)/φ(q)| for squarefree q ≤ q_max, one entry per (R, q).
pub fn weight_sum_deviations(rs: &[f64], q_max: u64) -> Result<Vec<WeightSumDeviation>> {
    let mut out = Vec::new();
    for &r in rs {
        let w = build_weights(WeightKind::PrimeSieve, r)?;
        for q in (1..=q_max).filter(|&q| is_squarefree(q) && q as f64 <= r) {
            let weight_sum = w.weight_sum_q(q);
            let target = mobius(q) as f64 / euler_phi(q) as f64;
            let deviation = (weight_sum - target).abs();
            let envelope = 5.0 / q as f64 * (-0.5 * (r / q as f64).ln().max(0.0).sqrt()).exp();
            out.push(WeightSumDeviation {
                q,
                r,
                weight_sum,
                target,
                deviation,
                envelope,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct TrendCheck {
    pub q: u64,
    pub deviations: Vec<f64>,
    pub violations: usize,
    pub passed: bool,
}

/// For each q, the deviation should shrink as R grows; at most `allowed` increases.
pub fn weight_sum_trend(rs: &[f64], q_max: u64, allowed: usize) -> Result<Vec<TrendCheck>> {
    let all = weight_sum_deviations(rs, q_max)?;
    let mut out = Vec::new();
    for q in (1..=q_max).filter(|&q| is_squarefree(q)) {
        let deviations: Vec<f64> = rs
            .iter()
            .filter_map(|&r| {
                all.iter()
                    .find(|d| d.q == q && d.r == r)
                    .map(|d| d.deviation)
            })
            .collect();
        let violations = deviations.windows(2).filter(|p| p[1] > p[0]).count();
        out.push(TrendCheck {
            q,
            deviations,
            violations,
            passed: violations <= allowed,
        });
    }
    Ok(out)
}
