//! Ramanujan sums c_q(n) and the correlations Σ a_n c_q(n).

use num_complex::Complex64;

use super::exact::{exact_int, Scalar};
use super::factor::{divisors, euler_phi, gcd, mobius};
use super::sequence::Sequence;
use crate::windows::SmoothWindow;

/// c_q(n) = μ(q/g) φ(q) / φ(q/g) with g = (q, n).
pub fn ramanujan_sum(q: u64, n: i64) -> i64 {
    assert!(q >= 1, "c_0 is undefined");
    let g = gcd(q, n.unsigned_abs());
    let g = if n == 0 { q } else { g };
    let m = q / g;
    let mu = mobius(m);
    if mu == 0 {
        return 0;
    }
    mu * (euler_phi(q) / euler_phi(m)) as i64
}

/// Reference evaluation Σ_{(a,q)=1} e(an/q) with complex exponentials.
/// Only used to cross-check [`ramanujan_sum`].
pub fn ramanujan_sum_direct(q: u64, n: i64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 1..=q {
        if gcd(a, q) == 1 {
            // reduce a·n mod q first so the angle stays small
            let r = ((a as i128 * n as i128).rem_euclid(q as i128)) as f64;
            acc += Complex64::from_polar(1.0, std::f64::consts::TAU * r / q as f64);
        }
    }
    acc
}

/// c_q(·) for a fixed q, indexed by the gcd with q.
#[derive(Debug, Clone)]
pub struct RamanujanRow {
    q: u64,
    /// (g, c_q(g)) for each divisor g of q
    by_gcd: Vec<(u64, i64)>,
}

impl RamanujanRow {
    pub fn new(q: u64) -> Self {
        let phi_q = euler_phi(q);
        let by_gcd = divisors(q)
            .into_iter()
            .map(|g| {
                let m = q / g;
                (g, mobius(m) * (phi_q / euler_phi(m)) as i64)
            })
            .collect();
        Self { q, by_gcd }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn at(&self, n: i64) -> i64 {
        let g = if n == 0 {
            self.q
        } else {
            gcd(self.q, n.unsigned_abs())
        };
        let idx = self
            .by_gcd
            .binary_search_by_key(&g, |&(d, _)| d)
            .expect("gcd divides q");
        self.by_gcd[idx].1
    }
}

/// S(e) = Σ_{e | n} w_n a_n for every e ≤ e_max, where w_n is an optional per-term multiplier.
///
/// Σ_n a_n c_d(n) = Σ_{e | d} e μ(d/e) S(e), so one pass of cost N log(e_max)
/// serves every modulus d ≤ e_max.
#[derive(Debug, Clone)]
pub struct DivisorSums {
    real: Vec<f64>,
    exact: Option<Vec<i128>>,
}

impl DivisorSums {
    pub fn new(seq: &Sequence, e_max: usize, window: Option<&SmoothWindow>) -> Self {
        let n_max = seq.len();
        let e_max = e_max.min(n_max).max(1);
        let weighted: Vec<f64> = match window {
            Some(w) => (1..=n_max)
                .map(|n| seq.get(n) * w.phi(n as f64 / n_max as f64))
                .collect(),
            None => seq.values().to_vec(),
        };
        let mut real = vec![0.0; e_max + 1];
        for (e, slot) in real.iter_mut().enumerate().skip(1) {
            let mut acc = 0.0;
            let mut n = e;
            while n <= n_max {
                acc += weighted[n - 1];
                n += e;
            }
            *slot = acc;
        }
        let exact = match (seq.ints(), window) {
            (Some(ints), None) => {
                let mut ex = vec![0i128; e_max + 1];
                for (e, slot) in ex.iter_mut().enumerate().skip(1) {
                    let mut acc = 0i128;
                    let mut n = e;
                    while n <= n_max {
                        acc += i128::from(ints[n - 1]);
                        n += e;
                    }
                    *slot = acc;
                }
                Some(ex)
            }
            _ => None,
        };
        Self { real, exact }
    }

    pub fn e_max(&self) -> usize {
        self.real.len() - 1
    }

    /// Σ_{e | n} w_n a_n.
    pub fn sum_over_multiples(&self, e: usize) -> f64 {
        self.real[e]
    }

    /// Σ a_n c_d(n) (times the window, if one was supplied). Requires d ≤ e_max
    /// or the terms with e > e_max are taken as zero, which is exact when e_max ≥ N.
    pub fn correlation(&self, d: u64) -> f64 {
        let mut acc = 0.0;
        for e in divisors(d) {
            if e as usize > self.e_max() {
                break;
            }
            let mu = mobius(d / e);
            if mu != 0 {
                acc += (mu * e as i64) as f64 * self.real[e as usize];
            }
        }
        acc
    }

    pub fn correlation_exact(&self, d: u64) -> Option<i128> {
        let ex = self.exact.as_ref()?;
        let mut acc = 0i128;
        for e in divisors(d) {
            if e as usize > self.e_max() {
                break;
            }
            let mu = mobius(d / e);
            if mu != 0 {
                acc += i128::from(mu * e as i64) * ex[e as usize];
            }
        }
        Some(acc)
    }
}

/// Σ_{n ≤ N} a_n c_d(n), optionally weighted by Φ(n/N).
///
/// Exact for integer-valued sequences without a window.
pub fn ramanujan_correlation(seq: &Sequence, d: u64, window: Option<&SmoothWindow>) -> Scalar {
    assert!(d >= 1);
    let e_max = (d as usize).min(seq.len());
    let sums = DivisorSums::new_for(seq, d, e_max, window);
    match sums.correlation_exact(d) {
        Some(v) => Scalar::Exact(exact_int(v)),
        None => Scalar::Real(sums.correlation(d)),
    }
}

impl DivisorSums {
    /// Same as [`DivisorSums::new`] but only fills the divisors of `d`.
    fn new_for(seq: &Sequence, d: u64, e_max: usize, window: Option<&SmoothWindow>) -> Self {
        let n_max = seq.len();
        let mut real = vec![0.0; e_max + 1];
        let mut exact = seq
            .ints()
            .filter(|_| window.is_none())
            .map(|_| vec![0i128; e_max + 1]);
        for e in divisors(d) {
            let e = e as usize;
            if e > e_max {
                break;
            }
            let mut n = e;
            let mut acc = 0.0;
            let mut acc_i = 0i128;
            while n <= n_max {
                let a = seq.get(n);
                acc += match window {
                    Some(w) => a * w.phi(n as f64 / n_max as f64),
                    None => a,
                };
                if let Some(ints) = seq.ints() {
                    acc_i += i128::from(ints[n - 1]);
                }
                n += e;
            }
            real[e] = acc;
            if let Some(ex) = exact.as_mut() {
                ex[e] = acc_i;
            }
        }
        Self { real, exact }
    }
}
