//! Sieve weights b_r supported on r ≤ R.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::arith::sieve_all;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightKind {
    /// b_r = μ(r) log(R/r)
    PrimeSieve,
    /// b_r = d_{k−1}(r)
    DivisorK { k: u32 },
}

#[derive(Debug, Clone)]
pub struct WeightSet {
    kind: WeightKind,
    r: f64,
    /// b_1..b_floor(R)
    b: Vec<f64>,
    big_b: f64,
}

/// `r` may be fractional; the support is r ≤ floor(R).
pub fn build_weights(kind: WeightKind, r: f64) -> Result<WeightSet> {
    if !(r >= 2.0) || !r.is_finite() {
        return Err(invalid(format!("R = {r} must be at least 2")));
    }
    let rmax = r.floor() as usize;
    let b: Vec<f64> = match kind {
        WeightKind::PrimeSieve => {
            let t = sieve_all(rmax, 2)?;
            (1..=rmax)
                .map(|m| f64::from(t.mu(m)) * (r / m as f64).ln())
                .collect()
        }
        WeightKind::DivisorK { k } => {
            if k < 2 {
                return Err(invalid(format!("divisor weights need k ≥ 2, got {k}")));
            }
            if k == 2 {
                vec![1.0; rmax]
            } else {
                let t = sieve_all(rmax, k - 1)?;
                t.d_slice(k - 1).iter().map(|&d| f64::from(d)).collect()
            }
        }
    };
    let big_b = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(WeightSet { kind, r, b, big_b })
}

impl WeightSet {
    /// Arbitrary weights, for tests and custom experiments.
    pub fn from_values(r: f64, b: Vec<f64>) -> Result<Self> {
        if b.len() != r.floor() as usize {
            return Err(invalid(format!(
                "expected floor(R) = {} weights, got {}",
                r.floor(),
                b.len()
            )));
        }
        let big_b = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(Self {
            kind: WeightKind::PrimeSieve,
            r,
            b,
            big_b,
        })
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn r_max(&self) -> usize {
        self.b.len()
    }

    /// b_r, zero beyond R.
    pub fn b(&self, r: usize) -> f64 {
        assert!(r >= 1, "weights are indexed from 1");
        self.b.get(r - 1).copied().unwrap_or(0.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.b
    }

    /// B = max |b_r|.
    pub fn big_b(&self) -> f64 {
        self.big_b
    }

    /// Σ_{r ≤ R, q | r} b_r / r; zero for q > R.
    pub fn weight_sum_q(&self, q: u64) -> f64 {
        let q = q as usize;
        if q == 0 || q > self.b.len() {
            return 0.0;
        }
        let terms: Vec<f64> = (q..=self.b.len())
            .step_by(q)
            .map(|r| self.b[r - 1] / r as f64)
            .collect();
        crate::numeric::pairwise_sum(&terms)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "r,b_r")?;
        for (i, b) in self.b.iter().enumerate() {
            writeln!(f, "{},{}", i + 1, crate::arith::exact::format_real(*b))?;
        }
        f.flush()?;
        Ok(())
    }
}
