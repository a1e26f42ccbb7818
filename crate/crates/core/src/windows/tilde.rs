//! ã_n = Φ(n/N) Σ_{r | n, r ≤ R} b_r.

use rayon::prelude::*;

use super::weights::WeightSet;
use super::window::SmoothWindow;
use crate::arith::Sequence;
use crate::error::{invalid, Result};

const SEGMENT: usize = 1 << 16;

/// Divisor sums Σ_{r | n, r ≤ R} b_r for n ≤ N, without the window.
pub fn divisor_weight_sums(n: usize, w: &WeightSet) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(invalid("N must be positive"));
    }
    if w.r_max() > n {
        return Err(invalid(format!("R = {} exceeds N = {n}", w.r())));
    }
    let b = w.values();
    let support: Vec<(usize, f64)> = b
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(i, v)| (i + 1, *v))
        .collect();
    let mut out = vec![0.0; n];
    out.par_chunks_mut(SEGMENT)
        .enumerate()
        .for_each(|(s, chunk)| {
            let lo = s * SEGMENT + 1;
            let hi = lo + chunk.len(); // exclusive
            for &(r, br) in &support {
                let mut m = lo.div_ceil(r) * r;
                while m < hi {
                    chunk[m - lo] += br;
                    m += r;
                }
            }
        });
    Ok(out)
}

pub fn build_tilde_sequence(n: usize, w: &WeightSet, phi: &SmoothWindow) -> Result<Sequence> {
    let sums = divisor_weight_sums(n, w)?;
    let nf = n as f64;
    let values = sums
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            if s == 0.0 {
                0.0
            } else {
                s * phi.phi((i + 1) as f64 / nf)
            }
        })
        .collect();
    Sequence::from_reals("tilde", values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factor::{divisor_function, divisors};
    use crate::arith::sieve_all;
    use crate::windows::weights::{build_weights, WeightKind};
    use crate::windows::window::build_window;

    #[test]
    fn zero_weights() {
        let w = WeightSet::from_values(5.0, vec![0.0; 5]).unwrap();
        let s = build_tilde_sequence(100, &w, &build_window(0.1).unwrap()).unwrap();
        assert_eq!(s.count_nonzero(), 0);
    }

    #[test]
    fn primes_above_r_get_log_r() {
        let n = 2000;
        let w = build_weights(WeightKind::PrimeSieve, 40.0).unwrap();
        let phi = build_window(0.1).unwrap();
        let s = build_tilde_sequence(n, &w, &phi).unwrap();
        let t = sieve_all(n, 2).unwrap();
        for p in 41..n {
            if t.spf(p) as usize == p {
                let expect = phi.phi(p as f64 / n as f64) * 40f64.ln();
                assert!((s.get(p) - expect).abs() < 1e-12, "p = {p}");
            }
        }
    }

    #[test]
    fn divisor_weights_convolve_to_dk() {
        let n = 3000;
        let w = build_weights(WeightKind::DivisorK { k: 3 }, n as f64).unwrap();
        let sums = divisor_weight_sums(n, &w).unwrap();
        for m in 1..=n {
            assert_eq!(sums[m - 1], divisor_function(3, m as u64) as f64);
        }
        let phi = build_window(0.2).unwrap();
        let s = build_tilde_sequence(n, &w, &phi).unwrap();
        for m in [1usize, 700, 1500, 2999] {
            let expect = divisor_function(3, m as u64) as f64 * phi.phi(m as f64 / n as f64);
            assert!((s.get(m) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_naive_divisor_loop() {
        let n = 5000;
        let w = build_weights(WeightKind::PrimeSieve, 77.5).unwrap();
        let sums = divisor_weight_sums(n, &w).unwrap();
        for m in (1..=n).step_by(37) {
            let naive: f64 = divisors(m as u64)
                .into_iter()
                .filter(|&r| r <= 77)
                .map(|r| w.b(r as usize))
                .sum();
            assert!((sums[m - 1] - naive).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_r_above_n() {
        let w = build_weights(WeightKind::PrimeSieve, 50.0).unwrap();
        assert!(build_tilde_sequence(40, &w, &build_window(0.1).unwrap()).is_err());
    }
}
