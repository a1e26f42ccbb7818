//! Euler products F_q(s) with Σ d_k(n) c_q(n) n^{−s} = ζ(s)^k F_q(s), and G_q(s) with
//! Σ_{q | n} d_{k−1}(n) n^{−s} = ζ(s)^{k−1} G_q(s).

use num_complex::Complex64;

use crate::arith::factor::{factorize, is_squarefree};
use crate::error::{invalid, Error, Result};

pub const DEFAULT_SERIES_TERMS: usize = 400;
const TAIL_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct LocalFactorSet {
    q: u64,
    k: u32,
    primes: Vec<(u64, u32)>,
    terms: usize,
}

/// Σ_{b ≥ a} d_j(p^b) p^{−bs} over at most `terms` terms, with a geometric bound on the rest.
fn prime_power_series(p: u64, j: u32, a: u32, s: Complex64, terms: usize) -> (Complex64, f64) {
    let pf = p as f64;
    let ps = (-s * pf.ln()).exp();
    let mut d = binom_f64(a + j - 1, j - 1);
    let mut pow = ps.powu(a);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut b = a;
    let mut tail = f64::INFINITY;
    for _ in 0..terms {
        let t = pow * d;
        sum += t;
        // successive ratios (b+j)/(b+1)·p^{−σ} decrease in b
        let rho = f64::from(b + j) / f64::from(b + 1) * pf.powf(-s.re);
        tail = if rho < 1.0 {
            t.norm() * rho / (1.0 - rho)
        } else {
            f64::INFINITY
        };
        if tail <= 1e-3 * TAIL_TOLERANCE * sum.norm() {
            break;
        }
        d = d * f64::from(b + j) / f64::from(b + 1);
        pow *= ps;
        b += 1;
    }
    (sum, tail)
}

fn binom_f64(n: u32, r: u32) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

impl LocalFactorSet {
    pub fn new(q: u64, k: u32) -> Result<Self> {
        Self::with_terms(q, k, DEFAULT_SERIES_TERMS)
    }

    pub fn with_terms(q: u64, k: u32, terms: usize) -> Result<Self> {
        if q == 0 {
            return Err(invalid("q must be positive"));
        }
        if k < 2 {
            return Err(invalid(format!("k = {k}; need k ≥ 2")));
        }
        if terms == 0 {
            return Err(invalid("series needs at least one term"));
        }
        Ok(Self {
            q,
            k,
            primes: factorize(q),
            terms,
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn primes(&self) -> &[(u64, u32)] {
        &self.primes
    }

    fn check_domain(s: Complex64) -> Result<()> {
        if s.re <= 0.0 {
            return Err(invalid(format!("Re(s) = {} must be positive", s.re)));
        }
        Ok(())
    }

    /// F_q(s) = Π_{p^a ∥ q} (1 − p^{−s})^k (−d_k(p^{a−1}) p^{−(a−1)(s−1)} + φ(p^a) Σ_{b≥a} d_k(p^b) p^{−bs}).
    pub fn f(&self, s: Complex64) -> Result<Complex64> {
        Self::check_domain(s)?;
        let k = self.k;
        let mut prod = Complex64::new(1.0, 0.0);
        for &(p, a) in &self.primes {
            let pf = p as f64;
            let lp = pf.ln();
            let (series, tail) = prime_power_series(p, k, a, s, self.terms);
            let phi = (pf - 1.0) * pf.powi(a as i32 - 1);
            let lead =
                -(-(s - 1.0) * (f64::from(a - 1) * lp)).exp() * binom_f64(a - 1 + k - 1, k - 1);
            let outer = (1.0 - (-s * lp).exp()).powu(k);
            let local = outer * (lead + series * phi);
            let err = outer.norm() * phi * tail;
            if !(err <= TAIL_TOLERANCE * local.norm()) {
                return Err(Error::Truncation {
                    p,
                    tail: err,
                    value: local.norm(),
                });
            }
            prod *= local;
        }
        Ok(prod)
    }

    /// G_q(s) = Π_{p^a ∥ q} (1 − p^{−s})^{k−1} Σ_{b≥a} d_{k−1}(p^b) p^{−bs}.
    pub fn g(&self, s: Complex64) -> Result<Complex64> {
        Self::check_domain(s)?;
        let j = self.k - 1;
        let mut prod = Complex64::new(1.0, 0.0);
        for &(p, a) in &self.primes {
            let lp = (p as f64).ln();
            let (series, tail) = prime_power_series(p, j, a, s, self.terms);
            let outer = (1.0 - (-s * lp).exp()).powu(j);
            let local = outer * series;
            let err = outer.norm() * tail;
            if !(err <= TAIL_TOLERANCE * local.norm()) {
                return Err(Error::Truncation {
                    p,
                    tail: err,
                    value: local.norm(),
                });
            }
            prod *= local;
        }
        Ok(prod)
    }
}

pub fn euler_f_q(q: u64, k: u32, s: Complex64) -> Result<Complex64> {
    LocalFactorSet::new(q, k)?.f(s)
}

pub fn euler_g_q(q: u64, k: u32, s: Complex64) -> Result<Complex64> {
    LocalFactorSet::new(q, k)?.g(s)
}

/// F_q(s) = Π_{p | q} (p − 1 − p(1 − p^{−s})^k) for squarefree q.
pub fn euler_f_q_squarefree(q: u64, k: u32, s: Complex64) -> Result<Complex64> {
    if !is_squarefree(q) {
        return Err(Error::NotSquarefree(q));
    }
    Ok(factorize(q)
        .into_iter()
        .map(|(p, _)| {
            let pf = p as f64;
            (pf - 1.0) - (1.0 - (-s * pf.ln()).exp()).powu(k) * pf
        })
        .product())
}
