//! Density of admissible Farey fractions near α:
//! f(α) = Σ_{Q0<q≤Q} (1/q) #{a mod q : q/(a,q) > Q0, |α − a/q| ≤ K/(Q0 Q)}.

use serde::Serialize;

use super::arcs::ArcSystem;
use crate::arith::factor::gcd;
use crate::error::{invalid, Error, Result};

pub const DEFAULT_FAREY_CAP: u64 = 10_000;

pub fn farey_density_f(alpha: f64, arcs: &ArcSystem) -> Result<f64> {
    farey_density_f_with_cap(alpha, arcs, DEFAULT_FAREY_CAP)
}

pub fn farey_density_f_with_cap(alpha: f64, arcs: &ArcSystem, cap: u64) -> Result<f64> {
    if arcs.q0 >= arcs.q {
        return Err(invalid(format!(
            "need Q0 < Q, got Q0 = {}, Q = {}",
            arcs.q0, arcs.q
        )));
    }
    let qmax = arcs.q.floor() as u64;
    if qmax > cap {
        return Err(Error::Capacity {
            what: "Farey enumeration denominator",
            requested: qmax,
            limit: cap,
        });
    }
    // fractions exactly on the window edge count, so widen by a rounding margin
    let w = arcs.k / (arcs.q0 * arcs.q) * (1.0 + 1e-12);
    let alpha = alpha - alpha.floor();
    let qmin = arcs.q0.floor() as u64 + 1;
    let mut f = 0.0;
    for q in qmin..=qmax {
        let admissible = |a: u64| (q / gcd(a, q)) as f64 > arcs.q0;
        let qf = q as f64;
        let lo = ((alpha - w) * qf).ceil() as i64;
        let hi = ((alpha + w) * qf).floor() as i64;
        let count = if hi - lo + 1 >= q as i64 {
            (0..q).filter(|&a| admissible(a)).count()
        } else {
            (lo..=hi)
                .filter(|&a| admissible(a.rem_euclid(q as i64) as u64))
                .count()
        };
        f += count as f64 / qf;
    }
    Ok(f)
}

/// (2K/Q0)(1 − 5/K − log K / K).
pub fn farey_lower_bound(arcs: &ArcSystem) -> f64 {
    let k = arcs.k;
    2.0 * k / arcs.q0 * (1.0 - 5.0 / k - k.ln() / k)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiophantineWitness {
    pub a0: u64,
    pub q0: u64,
    /// K·Q0 ≤ q0 ≤ Q/K, so the lower bound for f(α) applies.
    pub in_range: bool,
}

/// Smallest q0 ≤ Q/K with ‖q0 α‖ ≤ K/Q. Such q0 exists by Dirichlet's theorem and the
/// fraction a0/q0 is automatically reduced.
pub fn diophantine_witness(alpha: f64, arcs: &ArcSystem) -> DiophantineWitness {
    let alpha = alpha - alpha.floor();
    let m = (arcs.q / arcs.k).floor().max(1.0) as u64;
    let tol = arcs.k / arcs.q;
    for q in 1..=m {
        let x = alpha * q as f64;
        let a = x.round();
        if (x - a).abs() <= tol * (1.0 + 1e-12) {
            let a0 = (a as u64) % q;
            let in_range = q as f64 >= arcs.k * arcs.q0 && q as f64 <= arcs.q / arcs.k;
            return DiophantineWitness {
                a0,
                q0: q,
                in_range,
            };
        }
    }
    // unreachable for M ≥ 1 in exact arithmetic; keep the last denominator
    DiophantineWitness {
        a0: (alpha * m as f64).round() as u64 % m,
        q0: m,
        in_range: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(alpha: f64, arcs: &ArcSystem) -> f64 {
        let w = arcs.k / (arcs.q0 * arcs.q);
        let mut f = 0.0;
        for q in 1..=arcs.q as u64 {
            if q as f64 <= arcs.q0 {
                continue;
            }
            let mut c = 0;
            for a in 0..q {
                if (q / gcd(a, q)) as f64 <= arcs.q0 {
                    continue;
                }
                // distance on the circle
                let d = alpha - a as f64 / q as f64;
                let d = (d - d.round()).abs();
                if d <= w * (1.0 + 1e-12) {
                    c += 1;
                }
            }
            f += c as f64 / q as f64;
        }
        f
    }

    #[test]
    fn matches_brute_force() {
        let arcs = ArcSystem::new(5.0, 2.0, 200.0, 1000).unwrap();
        for alpha in [0.0, 0.1234, 0.5, 0.61803398875, 0.999] {
            let f = farey_density_f(alpha, &arcs).unwrap();
            assert!((f - brute(alpha, &arcs)).abs() < 1e-12, "alpha = {alpha}");
        }
    }

    #[test]
    fn golden_ratio_meets_bound() {
        let arcs = ArcSystem::new(5.0, 2.0, 200.0, 1000).unwrap();
        let alpha = (5f64.sqrt() - 1.0) / 2.0;
        assert!(arcs.is_major(alpha).is_none());
        let f = farey_density_f(alpha, &arcs).unwrap();
        assert!(f >= farey_lower_bound(&arcs));
    }

    #[test]
    fn wide_window_counts_everything() {
        let arcs = ArcSystem::new(50.0, 2.0, 30.0, 100).unwrap();
        assert!(arcs.k / (arcs.q0 * arcs.q) >= 0.5);
        let f = farey_density_f(0.37, &arcs).unwrap();
        let expect: f64 = (3..=30u64)
            .map(|q| (0..q).filter(|&a| (q / gcd(a, q)) > 2).count() as f64 / q as f64)
            .sum();
        assert!((f - expect).abs() < 1e-12);
    }

    #[test]
    fn half_excludes_itself() {
        let arcs = ArcSystem::new(5.0, 3.0, 100.0, 1000).unwrap();
        let f = farey_density_f(0.5, &arcs).unwrap();
        assert!((f - brute(0.5, &arcs)).abs() < 1e-12);
        // 1/2 has reduced denominator 2 ≤ Q0, so even q = 2m contribute nothing at a = m
        let w = arcs.k / (arcs.q0 * arcs.q);
        let only_near: f64 = (4..=100u64)
            .map(|q| {
                (0..q)
                    .filter(|&a| {
                        let r = q / gcd(a, q);
                        r > 3 && (0.5 - a as f64 / q as f64).abs() <= w * (1.0 + 1e-12)
                    })
                    .count() as f64
                    / q as f64
            })
            .sum();
        assert!((f - only_near).abs() < 1e-12);
    }

    #[test]
    fn capacity_and_preconditions() {
        let big = ArcSystem::new(5.0, 2.0, 20_000.0, 100_000).unwrap();
        assert!(matches!(
            farey_density_f(0.3, &big),
            Err(Error::Capacity { .. })
        ));
        let bad = ArcSystem::new(5.0, 10.0, 10.0, 100).unwrap();
        assert!(farey_density_f(0.3, &bad).is_err());
    }

    #[test]
    fn witnesses_classify_arcs() {
        let arcs = ArcSystem::new(5.0, 2.0, 1000.0, 10_000).unwrap();
        for i in 0..500 {
            let alpha = i as f64 / 500.0 + 1e-4;
            let w = diophantine_witness(alpha, &arcs);
            assert_eq!(gcd(w.a0, w.q0), 1);
            let d = alpha - w.a0 as f64 / w.q0 as f64;
            assert!((d - d.round()).abs() <= arcs.k / (w.q0 as f64 * arcs.q) * (1.0 + 1e-9));
            if arcs.is_major(alpha).is_none() {
                assert!(w.in_range, "minor alpha {alpha} has q0 = {}", w.q0);
            }
        }
    }
}
