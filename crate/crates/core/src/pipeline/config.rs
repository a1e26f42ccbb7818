//! Experiment parameters, their asymptotic defaults, and the clipping applied when a
//! default falls outside the range where the arcs and weights make sense at desk scale.

use serde::Serialize;

use crate::error::{invalid, Result};

pub const DEFAULT_EPSILON: f64 = 0.05;
pub const DEFAULT_DELTA: f64 = 0.1;
/// Q0 is kept at most Q/(DESK_MARGIN·K²), leaving room for minor arcs and for KQ0 < R.
pub const DESK_MARGIN: f64 = 16.0;
pub const MAX_N: usize = 20_000_000;

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "K")]
    pub big_k: f64,
    #[serde(rename = "Q0")]
    pub q0: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub k: u32,
    #[serde(rename = "T")]
    pub t: usize,
    pub seed: u64,
    /// Every parameter moved away from its formula value, with the reason.
    pub clips: Vec<String>,
}

fn check_n_q(n: usize, q: f64) -> Result<()> {
    if n < 100 {
        return Err(invalid(format!("N = {n} is too small; need N ≥ 100")));
    }
    if n > MAX_N {
        return Err(invalid(format!(
            "N = {n} exceeds the configured cap {MAX_N}"
        )));
    }
    if !(q >= 2.0) || q > n as f64 {
        return Err(invalid(format!("Q = {q} must lie in [2, N = {n}]")));
    }
    Ok(())
}

/// Clips K to [5, (Q/DESK_MARGIN)^{1/2}] and Q0 to [1, Q/(DESK_MARGIN·K²)], recording
/// each move. The factor 1 − (5 + log K)/K in the minor-arc bound is only positive for
/// K above about 8.3, so K is kept as large as Q0 ≥ 1 allows.
fn clip_arcs(q: f64, big_k: f64, q0: f64, clips: &mut Vec<String>) -> (f64, f64) {
    let k_hi = (q / DESK_MARGIN).sqrt().max(5.0);
    let k = big_k.clamp(5.0, k_hi);
    if k != big_k {
        clips.push(format!(
            "K clipped from {big_k:.6} to {k:.6} (range [5, (Q/16)^(1/2)])"
        ));
    }
    let q0_hi = (q / (DESK_MARGIN * k * k)).max(1.0);
    let q0c = q0.clamp(1.0, q0_hi);
    if q0c != q0 {
        clips.push(format!(
            "Q0 clipped from {q0:.6} to {q0c:.6} (range [1, Q/(16K²)])"
        ));
    }
    (k, q0c)
}

impl ExperimentConfig {
    /// K = (log N)^{k_exp}, Q0 = N (log N)^{10}/Q, R = Q/(log N)^{20}, then clipped;
    /// R is kept in (KQ0, Q/(2K)].
    pub fn theorem1(n: usize, q: f64, k_exp: Option<f64>, epsilon: Option<f64>) -> Result<Self> {
        check_n_q(n, q)?;
        let l = (n as f64).ln();
        let mut clips = Vec::new();
        let (big_k, q0) = clip_arcs(
            q,
            l.powf(k_exp.unwrap_or(2.0)),
            n as f64 * l.powi(10) / q,
            &mut clips,
        );
        let r_formula = q / l.powi(20);
        let r_hi = q / (2.0 * big_k);
        let r_lo = big_k * q0;
        let r = if r_formula <= r_lo || r_formula > r_hi {
            clips.push(format!(
                "R moved from {r_formula:.6} to Q/(2K) = {r_hi:.6} (need KQ0 < R ≤ Q/(2K))"
            ));
            r_hi
        } else {
            r_formula
        };
        let cfg = Self {
            n,
            q,
            big_k,
            q0,
            r,
            epsilon: epsilon.unwrap_or(DEFAULT_EPSILON),
            delta: DEFAULT_DELTA,
            k: 1,
            t: crate::circle::default_grid_size(n),
            seed: 0,
            clips,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// K = (log N)^{k_exp} with k_exp = 10 by default, Q0 = N^{1+ε}/Q, then clipped; R is
    /// set by the chosen ending (see `run_theorem2`) and starts at N^{1/2 − δ/2}.
    pub fn theorem2(
        n: usize,
        q: f64,
        k: u32,
        delta: Option<f64>,
        k_exp: Option<f64>,
        epsilon: Option<f64>,
    ) -> Result<Self> {
        check_n_q(n, q)?;
        if k < 2 {
            return Err(invalid(format!("k = {k}; need k ≥ 2")));
        }
        let delta = delta.unwrap_or(DEFAULT_DELTA);
        let eps = epsilon.unwrap_or(DEFAULT_EPSILON);
        let nf = n as f64;
        if q < nf.powf(0.5 + delta) * (1.0 - 1e-12) {
            return Err(invalid(format!(
                "Q = {q} is below N^(1/2 + δ) = {}; lower δ or raise Q",
                nf.powf(0.5 + delta)
            )));
        }
        let l = nf.ln();
        let mut clips = Vec::new();
        let (big_k, q0) = clip_arcs(
            q,
            l.powf(k_exp.unwrap_or(10.0)),
            nf.powf(1.0 + eps) / q,
            &mut clips,
        );
        let cfg = Self {
            n,
            q,
            big_k,
            q0,
            r: nf.powf(0.5 - delta / 2.0),
            epsilon: eps,
            delta,
            k,
            t: crate::circle::default_grid_size(n),
            seed: 0,
            clips,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check_n_q(self.n, self.q)?;
        if !(self.big_k > 0.0 && self.q0 >= 1.0 && self.q0 < self.q) {
            return Err(invalid(format!(
                "need K > 0 and 1 ≤ Q0 < Q; got K = {}, Q0 = {}, Q = {}",
                self.big_k, self.q0, self.q
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(invalid(format!(
                "ε = {} must lie in (0, 1/2)",
                self.epsilon
            )));
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return Err(invalid(format!("δ = {} must lie in (0, 1/2)", self.delta)));
        }
        if !self.t.is_power_of_two() || self.t < 2 * self.n {
            return Err(invalid(format!(
                "T = {} must be a power of two ≥ 2N",
                self.t
            )));
        }
        Ok(())
    }

    pub fn with_grid(mut self, t: usize) -> Result<Self> {
        self.t = t;
        self.validate()?;
        Ok(self)
    }

    pub fn with_r(mut self, r: f64) -> Result<Self> {
        if !(r >= 2.0) {
            return Err(invalid(format!("R = {r} must be at least 2")));
        }
        self.r = r;
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn arcs(&self) -> Result<crate::circle::ArcSystem> {
        crate::circle::ArcSystem::new(self.big_k, self.q0, self.q, self.n as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theorem1_defaults_are_clipped_into_a_usable_range() {
        let n = 100_000usize;
        let q = (n as f64).powf(0.75);
        let c = ExperimentConfig::theorem1(n, q, None, None).unwrap();
        assert!(c.big_k >= 5.0 && c.big_k <= (q / 16.0).sqrt() + 1e-9);
        assert!(c.q0 >= 1.0 && c.q0 <= q / (16.0 * c.big_k * c.big_k) + 1e-9);
        assert!(c.big_k * c.q0 < c.r && c.r <= q / (2.0 * c.big_k) + 1e-9);
        assert!(!c.arcs().unwrap().covers_circle());
        assert_eq!(c.clips.len(), 3);
    }

    #[test]
    fn theorem2_needs_large_q() {
        let n = 100_000usize;
        let nf = n as f64;
        assert!(ExperimentConfig::theorem2(n, nf.powf(0.55), 2, Some(0.1), None, None).is_err());
        let c = ExperimentConfig::theorem2(n, nf.powf(0.8), 2, Some(0.1), None, None).unwrap();
        assert!((c.r - nf.powf(0.45)).abs() < 1e-9);
    }

    #[test]
    fn rejects_q_above_n() {
        assert!(ExperimentConfig::theorem1(10_000, 20_000.0, None, None).is_err());
        assert!(ExperimentConfig::theorem1(10_000, 5_000.0, None, Some(0.7)).is_err());
    }
}
