//! The logarithmic derivative f_q = F_q'/F_q near s = 1 for squarefree q, and the
//! exact lower bound F_q(1) ≥ d_{k−1}(q)(φ(q)/q)^k.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Pow};
use serde::Serialize;

use super::residue::residue_by_contour;
use crate::arith::exact::{exact_int, factorial_f64, format_exact, ExactScalar};
use crate::arith::factor::{divisor_function, euler_phi, factorize, is_squarefree};
use crate::error::{invalid, Error, Result};

pub const DERIVATIVE_RADIUS: f64 = 0.05;
const DERIVATIVE_NODES: usize = 64;

fn squarefree_primes(q: u64) -> Result<Vec<u64>> {
    if q == 0 {
        return Err(invalid("q must be positive"));
    }
    if !is_squarefree(q) {
        return Err(Error::NotSquarefree(q));
    }
    Ok(factorize(q).into_iter().map(|(p, _)| p).collect())
}

/// f_q(1) = −Σ_{p | q} (k log p/(p − 1)) {(1 − 1/p)^{−(k−1)} − 1}^{−1}.
pub fn f_q_at_one(q: u64, k: u32) -> Result<f64> {
    let primes = squarefree_primes(q)?;
    Ok(-primes
        .iter()
        .map(|&p| {
            let pf = p as f64;
            let inner = (1.0 - 1.0 / pf).powi(-(k as i32 - 1)) - 1.0;
            f64::from(k) * pf.ln() / (pf - 1.0) / inner
        })
        .sum::<f64>())
}

/// f_q(s) = −Σ_{p | q} (k log p / p^{s−1}) {(p − 1)(1 − p^{−s})^{−(k−1)} − p(1 − p^{−s})}^{−1}.
pub fn f_q(q: u64, k: u32, s: Complex64) -> Result<Complex64> {
    let primes = squarefree_primes(q)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in primes {
        let pf = p as f64;
        let lp = pf.ln();
        let ps = (-s * lp).exp();
        let one_minus = 1.0 - ps;
        let brace = one_minus.powi(-(k as i32 - 1)) * (pf - 1.0) - one_minus * pf;
        acc -= ((1.0 - s) * lp).exp() * (f64::from(k) * lp) / brace;
    }
    Ok(acc)
}

/// Σ_{p | q} log(p − 1 − p(1 − p^{−s})^k), each local factor on its principal branch.
fn log_f_q(primes: &[u64], k: u32, s: Complex64) -> Complex64 {
    primes
        .iter()
        .map(|&p| {
            let pf = p as f64;
            ((pf - 1.0) - (1.0 - (-s * pf.ln()).exp()).powu(k) * pf).ln()
        })
        .sum()
}

/// [f_q(1), f_q'(1), …, f_q^{(m)}(1)]: the value from the closed form, derivatives from
/// Cauchy integrals of log F_q on |s − 1| = 0.05.
pub fn f_q_log_derivatives(q: u64, k: u32, m: u32) -> Result<Vec<f64>> {
    if m > k {
        return Err(invalid(format!("derivative order {m} exceeds k = {k}")));
    }
    let primes = squarefree_primes(q)?;
    let mut out = vec![f_q_at_one(q, k)?];
    let one = Complex64::new(1.0, 0.0);
    for j in 1..=m {
        // f^{(j)}(1) = (j+1)! [(s−1)^{j+1}] log F_q
        let n = j as i32 + 2;
        let c = residue_by_contour(one, DERIVATIVE_RADIUS, DERIVATIVE_NODES, |s| {
            Ok(log_f_q(&primes, k, s) / (s - 1.0).powi(n))
        })?;
        out.push(c.value * factorial_f64(j + 1));
    }
    Ok(out)
}

/// |f_q^{(m)}(1)| / Σ_{p | q} (log p)^{m+1}; bounded by a constant depending on k alone.
pub fn derivative_shape_ratio(q: u64, derivative: f64, m: u32) -> Result<f64> {
    let primes = squarefree_primes(q)?;
    let denom: f64 = primes
        .iter()
        .map(|&p| (p as f64).ln().powi(m as i32 + 1))
        .sum();
    Ok(if denom == 0.0 {
        0.0
    } else {
        derivative.abs() / denom
    })
}

/// F_q(1) = Π_{p | q} (p − 1 − p(1 − 1/p)^k) in exact rationals.
pub fn f_q1_exact(q: u64, k: u32) -> Result<ExactScalar> {
    let primes = squarefree_primes(q)?;
    let mut prod = BigRational::one();
    for p in primes {
        let pr = exact_int(p as i128);
        let frac = (exact_int(p as i128 - 1) / &pr).pow(k as i32);
        prod *= exact_int(p as i128 - 1) - pr * frac;
    }
    Ok(prod)
}

#[derive(Debug, Clone, Serialize)]
pub struct Fq1Bound {
    pub q: u64,
    pub k: u32,
    #[serde(serialize_with = "ser_exact")]
    pub value: ExactScalar,
    /// d_{k−1}(q) (φ(q)/q)^k
    #[serde(serialize_with = "ser_exact")]
    pub lower: ExactScalar,
    pub holds: bool,
}

fn ser_exact<S: serde::Serializer>(x: &ExactScalar, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_exact(x))
}

pub fn check_fq1_bound(q: u64, k: u32) -> Result<Fq1Bound> {
    if k < 2 {
        return Err(invalid(format!("k = {k}; need k ≥ 2")));
    }
    let value = f_q1_exact(q, k)?;
    let ratio = exact_int(euler_phi(q) as i128) / exact_int(q as i128);
    let lower = exact_int(divisor_function(k - 1, q) as i128) * ratio.pow(k as i32);
    let holds = value >= lower;
    Ok(Fq1Bound {
        q,
        k,
        value,
        lower,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::exact::{exact_ratio, exact_to_f64};
    use crate::dirichlet::euler::euler_f_q;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn value_at_two() {
        assert!((f_q_at_one(2, 2).unwrap() + 2.0 * 2f64.ln()).abs() < 1e-15);
        assert_eq!(f_q_at_one(1, 3).unwrap(), 0.0);
        assert_eq!(f_q_log_derivatives(1, 3, 3).unwrap(), vec![0.0; 4]);
        assert!(f_q_at_one(12, 2).is_err());
    }

    #[test]
    fn closed_forms_agree() {
        for q in [2u64, 6, 35, 30, 2310] {
            for k in 2..=4 {
                let a = f_q_at_one(q, k).unwrap();
                let b = f_q(q, k, Complex64::new(1.0, 0.0)).unwrap();
                assert!((a - b.re).abs() < 1e-12 * a.abs() && b.im.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn log_derivative_matches_difference_quotient() {
        let q = 30;
        let k = 3;
        let h = 1e-6;
        let f = |x: f64| euler_f_q(q, k, Complex64::new(x, 0.0)).unwrap().re;
        let numeric = (f(1.0 + h) - f(1.0 - h)) / (2.0 * h) / f(1.0);
        assert!((numeric - f_q_at_one(q, k).unwrap()).abs() < 1e-7);
    }

    #[test]
    fn contour_derivatives_match_closed_form_derivatives() {
        // differentiate the closed form f_q(s) directly by its own Cauchy integrals
        for q in [2u64, 30, 1001] {
            let k = 3;
            let d = f_q_log_derivatives(q, k, 3).unwrap();
            for j in 1..=3u32 {
                let c = residue_by_contour(Complex64::new(1.0, 0.0), 0.1, 64, |s| {
                    Ok(f_q(q, k, s)? / (s - 1.0).powi(j as i32 + 1))
                })
                .unwrap();
                let other = c.value * factorial_f64(j);
                assert!(
                    (d[j as usize] - other).abs() < 1e-8 * other.abs().max(1.0),
                    "q={q} j={j}"
                );
            }
        }
    }

    #[test]
    fn sign_and_lower_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut seen = 0;
        while seen < 50 {
            let q: u64 = rng.gen_range(1..100_000);
            if !is_squarefree(q) {
                continue;
            }
            seen += 1;
            for k in 2..=4 {
                let f = f_q_at_one(q, k).unwrap();
                let floor: f64 = -(f64::from(k) / f64::from(k - 1))
                    * factorize(q)
                        .iter()
                        .map(|&(p, _)| p as f64 / (p as f64 - 1.0) * (p as f64).ln())
                        .sum::<f64>();
                assert!(f <= 0.0 && f >= floor - 1e-12, "q={q} k={k}");
            }
        }
    }

    #[test]
    fn fq1_bound_examples() {
        let b = check_fq1_bound(1, 3).unwrap();
        assert!(b.holds && b.value == b.lower);
        let b = check_fq1_bound(30, 4).unwrap();
        assert!(b.holds);
        for p in [2u64, 3, 5, 7, 11, 997] {
            let b = check_fq1_bound(p, 2).unwrap();
            assert_eq!(b.value, exact_ratio(p as i128 - 1, p as i128));
            assert!(b.holds);
        }
        let v = f_q1_exact(210, 3).unwrap();
        let f = euler_f_q(210, 3, Complex64::new(1.0, 0.0)).unwrap().re;
        assert!((exact_to_f64(&v) - f).abs() < 1e-12 * f);
        assert!(matches!(
            check_fq1_bound(18, 2),
            Err(Error::NotSquarefree(18))
        ));
    }
}
