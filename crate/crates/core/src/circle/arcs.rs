//! Major arcs 𝔐(Q0, Q; K): α with |α − a/q| ≤ K/(qQ) for some q ≤ K·Q0, (a,q) = 1.

use serde::Serialize;

use crate::arith::factor::gcd;
use crate::error::{invalid, Error, Result};

/// Largest K·Q0 for which grid classification enumerates fractions.
pub const MAX_MAJOR_DENOMINATOR: u64 = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArcSystem {
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "Q0")]
    pub q0: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "N")]
    pub n: u64,
}

impl ArcSystem {
    pub fn new(k: f64, q0: f64, q: f64, n: u64) -> Result<Self> {
        if !(k > 0.0 && q0 > 0.0 && q > 0.0) || !k.is_finite() || !q0.is_finite() || !q.is_finite()
        {
            return Err(invalid(format!(
                "arc parameters must be positive: K={k}, Q0={q0}, Q={q}"
            )));
        }
        if n == 0 {
            return Err(invalid("N must be positive"));
        }
        Ok(Self { k, q0, q, n })
    }

    /// Departures from K ≥ 5, N log N / Q ≤ Q0 ≤ Q/K², K√(N log N) ≤ Q ≤ N.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        let n = self.n as f64;
        let nl = n * n.ln();
        if self.k < 5.0 {
            w.push(format!("K = {} is below 5", self.k));
        }
        if self.q0 < nl / self.q {
            w.push(format!(
                "Q0 = {} is below N log N / Q = {}",
                self.q0,
                nl / self.q
            ));
        }
        if self.q0 > self.q / (self.k * self.k) {
            w.push(format!(
                "Q0 = {} exceeds Q/K² = {}",
                self.q0,
                self.q / (self.k * self.k)
            ));
        }
        if self.q < self.k * nl.sqrt() {
            w.push(format!(
                "Q = {} is below K·sqrt(N log N) = {}",
                self.q,
                self.k * nl.sqrt()
            ));
        }
        if self.q > n {
            w.push(format!("Q = {} exceeds N = {}", self.q, n));
        }
        w
    }

    /// Largest denominator of a major-arc centre, floor(K·Q0).
    pub fn max_denominator(&self) -> u64 {
        (self.k * self.q0).floor() as u64
    }

    pub fn half_width(&self, q: u64) -> f64 {
        self.k / (q as f64 * self.q)
    }

    /// Dirichlet's theorem with M = ceil(Q/K) puts every α within 1/(qM) ≤ K/(qQ) of
    /// some a/q with q ≤ M, so the arcs cover the circle once K·Q0 ≥ M.
    pub fn covers_circle(&self) -> bool {
        self.max_denominator() >= (self.q / self.k).ceil() as u64
    }

    /// Reduced witness (a, q) when α is major.
    pub fn is_major(&self, alpha: f64) -> Option<(u64, u64)> {
        let alpha = alpha - alpha.floor();
        for q in 1..=self.max_denominator() {
            let a = (alpha * q as f64).round();
            let dist = (alpha - a / q as f64).abs();
            if dist <= self.half_width(q) {
                let a = a as u64 % q;
                if gcd(a, q) == 1 || (q == 1) {
                    return Some((a % q, q));
                }
            }
        }
        None
    }
}

/// Grid cells classified by whether their centre t/T lies on a major arc, plus the
/// cells that contain an arc endpoint (charged to the error budget).
#[derive(Debug, Clone)]
pub struct ArcClassification {
    pub t: usize,
    pub major: Vec<bool>,
    pub boundary: Vec<bool>,
}

pub fn classify_grid(arcs: &ArcSystem, t: usize) -> Result<ArcClassification> {
    if arcs.covers_circle() {
        return Ok(ArcClassification {
            t,
            major: vec![true; t],
            boundary: vec![false; t],
        });
    }
    let qmax = arcs.max_denominator();
    if qmax > MAX_MAJOR_DENOMINATOR {
        return Err(Error::Capacity {
            what: "major-arc denominators",
            requested: qmax,
            limit: MAX_MAJOR_DENOMINATOR,
        });
    }
    let mut major = vec![false; t];
    let mut boundary = vec![false; t];
    let tf = t as f64;
    let ti = t as i64;
    for q in 1..=qmax {
        let w = arcs.half_width(q);
        for a in 0..q {
            if gcd(a, q) != 1 && q != 1 {
                continue;
            }
            let c = a as f64 / q as f64;
            let lo = ((c - w) * tf).ceil() as i64;
            let hi = ((c + w) * tf).floor() as i64;
            if hi - lo + 1 >= ti {
                major.iter_mut().for_each(|m| *m = true);
                continue;
            }
            for j in lo..=hi {
                major[j.rem_euclid(ti) as usize] = true;
            }
            for x in [c - w, c + w] {
                let cell = (x * tf).round() as i64;
                boundary[cell.rem_euclid(ti) as usize] = true;
            }
        }
    }
    Ok(ArcClassification { t, major, boundary })
}

#[derive(Debug, Clone, Serialize)]
pub struct ArcRun {
    pub start: usize,
    pub len: usize,
    pub major: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ArcExport {
    #[serde(rename = "T")]
    pub t: usize,
    pub arcs: ArcSystem,
    pub runs: Vec<ArcRun>,
}

impl ArcClassification {
    pub fn major_count(&self) -> usize {
        self.major.iter().filter(|m| **m).count()
    }

    pub fn boundary_count(&self) -> usize {
        self.boundary.iter().filter(|m| **m).count()
    }

    pub fn runs(&self) -> Vec<ArcRun> {
        let mut runs: Vec<ArcRun> = Vec::new();
        for (i, &m) in self.major.iter().enumerate() {
            match runs.last_mut() {
                Some(r) if r.major == m => r.len += 1,
                _ => runs.push(ArcRun {
                    start: i,
                    len: 1,
                    major: m,
                }),
            }
        }
        runs
    }

    pub fn export(&self, arcs: &ArcSystem) -> ArcExport {
        ArcExport {
            t: self.t,
            arcs: *arcs,
            runs: self.runs(),
        }
    }
}
