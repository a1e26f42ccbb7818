//! ζ(s) by Euler–Maclaurin summation, accurate on the discs used for residues.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::exact::{exact_to_f64, factorial};
use crate::error::{Error, Result};

const EM_CUTOFF: u32 = 20;
const EM_TERMS: usize = 50;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Exact Bernoulli numbers B_0..B_n (B_1 = −1/2).
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    b.push(BigRational::one());
    for m in 1..=n {
        // Σ_{j=0}^{m} C(m+1, j) B_j = 0
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one();
        for (j, bj) in b.iter().enumerate() {
            acc += BigRational::from_integer(binom.clone()) * bj;
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

/// B_{2j}/(2j)! for j = 1..=EM_TERMS.
fn em_coefficients() -> &'static [f64] {
    static COEF: OnceLock<Vec<f64>> = OnceLock::new();
    COEF.get_or_init(|| {
        let b = bernoulli_numbers(2 * EM_TERMS);
        (1..=EM_TERMS)
            .map(|j| {
                let f = BigRational::from_integer(factorial(2 * j as u32));
                exact_to_f64(&(&b[2 * j] / f))
            })
            .collect()
    })
}

/// ζ(s) for s ≠ 1. The Euler–Maclaurin remainder is negligible for |s| ≲ 10.
pub fn zeta(s: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    if (s - one).norm() < 1e-300 {
        return Err(Error::Pole);
    }
    let m = f64::from(EM_CUTOFF);
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 1..EM_CUTOFF {
        acc += (-s * f64::from(n).ln()).exp();
    }
    let m_s = (-s * m.ln()).exp();
    acc += m_s * m / (s - one) + m_s * 0.5;
    // rising factorial s(s+1)…(s+2j−2) times M^{−s−2j+1}
    let mut rising = s;
    let mut pow = m_s / m;
    for (j, c) in em_coefficients().iter().enumerate() {
        let term = rising * pow * *c;
        acc += term;
        if term.norm() < 1e-18 * acc.norm() {
            break;
        }
        let k = (2 * j + 1) as f64;
        rising *= (s + k) * (s + k + 1.0);
        pow /= m * m;
    }
    Ok(acc)
}

/// ζ(s) on the residue discs |s − 1| ≤ 1/2.
pub fn zeta_near_one(s: Complex64) -> Result<Complex64> {
    zeta(s)
}
