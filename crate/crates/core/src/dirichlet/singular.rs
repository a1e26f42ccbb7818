//! The Euler product H(0;0,1) = Π_p (1 − 1/p)^{k²} Σ_a d_k(p^a)²/p^a and
//! c_k = H(0;0,1)/(k² − 1)!, the constant in Σ_{n ≤ N} d_k(n)² ~ c_k N (log N)^{k²−1}.

use serde::Serialize;

use crate::arith::exact::factorial_f64;
use crate::arith::sieve::small_primes;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SingularConstant {
    pub k: u32,
    pub prime_cap: u64,
    /// truncated product over p ≤ prime_cap
    pub product: f64,
    pub c_k: f64,
    /// relative tail estimate k⁴ Σ_{p > P} p^{−2} ≤ k⁴/P
    pub tail: f64,
}

fn local_factor(p: f64, k: u32) -> f64 {
    let x = 1.0 / p;
    // d_k(p^a) = C(a+k−1, k−1), updated by the ratio (a+k)/(a+1)
    let mut d = 1.0f64;
    let mut xa = 1.0;
    let mut sum = 0.0;
    let mut a = 0u32;
    loop {
        let t = d * d * xa;
        sum += t;
        if t < 1e-18 * sum {
            break;
        }
        d = d * f64::from(a + k) / f64::from(a + 1);
        xa *= x;
        a += 1;
    }
    // (1 − 1/p)^{k²}, via ln_1p for accuracy at large p
    (f64::from(k * k) * (-x).ln_1p()).exp() * sum
}

pub fn singular_constant(k: u32, prime_cap: u64) -> Result<SingularConstant> {
    if prime_cap < 100 {
        return Err(invalid(format!(
            "prime cap {prime_cap} must be at least 100"
        )));
    }
    if k < 1 {
        return Err(invalid("k must be positive"));
    }
    let log_product: f64 = small_primes(prime_cap as usize)
        .into_iter()
        .map(|p| local_factor(p as f64, k).ln())
        .sum();
    let product = log_product.exp();
    Ok(SingularConstant {
        k,
        prime_cap,
        product,
        c_k: product / factorial_f64(k * k - 1),
        tail: f64::from(k).powi(4) / prime_cap as f64,
    })
}
