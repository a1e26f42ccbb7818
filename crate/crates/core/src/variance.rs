//! Variance in progressions V(q;A), the exponential-sum variance H(q;A), and
//! the identity q·V(q) = Σ_{d|q} H(d) linking them.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::exact::{exact_int, ExactScalar, Scalar};
use crate::arith::factor::{divisors, euler_phi, gcd, mobius};
use crate::arith::{Sequence, SieveTable};
use crate::error::{precondition, Result};
use crate::numeric::pairwise_sum;

/// Sequences longer than this use the floating-point path even when integer-valued.
pub const EXACT_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VarianceMethod {
    Direct,
    Bilinear,
}

#[derive(Debug, Clone, Serialize)]
pub struct VarianceReport {
    pub q: u64,
    #[serde(rename = "V")]
    pub v: Scalar,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_class_terms: Option<Vec<(u64, Scalar)>>,
    pub method: VarianceMethod,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpVarianceReport {
    pub q: u64,
    #[serde(rename = "H")]
    pub h: Scalar,
}

fn use_exact(seq: &Sequence) -> bool {
    seq.is_integer_valued() && seq.len() <= EXACT_LIMIT
}

/// T[r] = Σ_{n ≡ r (mod q)} a_n for r = 0..q-1.
pub fn class_sums(seq: &Sequence, q: u64) -> Vec<f64> {
    let q = q as usize;
    let mut t = vec![0.0; q];
    let vals = seq.values();
    if seq.count_nonzero() < vals.len() / 4 {
        for (n, a) in seq.nonzero() {
            t[n % q] += a;
        }
        return t;
    }
    // position i holds a_{i+1}; within a block of length q starting at a multiple
    // of q, offset j has residue (j+1) mod q
    let mut shifted = vec![0.0; q];
    for block in vals.chunks(q) {
        for (s, a) in shifted.iter_mut().zip(block) {
            *s += a;
        }
    }
    for (j, s) in shifted.into_iter().enumerate() {
        t[(j + 1) % q] += s;
    }
    t
}

pub fn class_sums_exact(seq: &Sequence, q: u64) -> Option<Vec<i128>> {
    let ints = seq.ints()?;
    let q = q as usize;
    let mut t = vec![0i128; q];
    for (i, &a) in ints.iter().enumerate() {
        if a != 0 {
            t[(i + 1) % q] += i128::from(a);
        }
    }
    Some(t)
}

/// V(q;A) straight from the definition: classes grouped by h = (a, q).
pub fn variance_mod_q(seq: &Sequence, q: u64) -> VarianceReport {
    assert!(q >= 1);
    if use_exact(seq) {
        variance_exact(seq, q)
    } else {
        variance_float(seq, q)
    }
}

fn gcd_classes(q: u64) -> Vec<(u64, Vec<usize>)> {
    let divs = divisors(q);
    let mut classes: Vec<(u64, Vec<usize>)> = divs.iter().map(|&h| (h, Vec::new())).collect();
    for r in 0..q {
        let h = gcd(r, q); // gcd(0, q) = q
        let idx = divs.binary_search(&h).unwrap();
        classes[idx].1.push(r as usize);
    }
    classes
}

fn variance_exact(seq: &Sequence, q: u64) -> VarianceReport {
    let t = class_sums_exact(seq, q).expect("integer-valued");
    let mut total = BigRational::zero();
    let mut per = Vec::new();
    for (h, members) in gcd_classes(q) {
        let phi = i128::from(euler_phi(q / h) as i64);
        debug_assert_eq!(members.len() as i128, phi);
        let u: i128 = members.iter().map(|&r| t[r]).sum();
        // Σ (T_r − U/φ)² = (φ Σ T_r² − U²)/φ
        let mut num = BigInt::zero();
        for &r in &members {
            let d = BigInt::from(t[r]) * BigInt::from(phi) - BigInt::from(u);
            num += &d * &d;
        }
        let term = BigRational::new(num, BigInt::from(phi) * BigInt::from(phi));
        total += &term;
        per.push((h, Scalar::Exact(term)));
    }
    VarianceReport {
        q,
        v: Scalar::Exact(total),
        per_class_terms: Some(per),
        method: VarianceMethod::Direct,
    }
}

fn variance_float(seq: &Sequence, q: u64) -> VarianceReport {
    let t = class_sums(seq, q);
    let (v, per) = variance_from_class_sums(&t, q);
    VarianceReport {
        q,
        v: Scalar::Real(v),
        per_class_terms: Some(per.into_iter().map(|(h, x)| (h, Scalar::Real(x))).collect()),
        method: VarianceMethod::Direct,
    }
}

fn variance_from_class_sums(t: &[f64], q: u64) -> (f64, Vec<(u64, f64)>) {
    let mut per = Vec::new();
    let mut total = 0.0;
    for (h, members) in gcd_classes(q) {
        let phi = euler_phi(q / h) as f64;
        let mean = members.iter().map(|&r| t[r]).sum::<f64>() / phi;
        let s: f64 = members.iter().map(|&r| (t[r] - mean).powi(2)).sum();
        total += s;
        per.push((h, s));
    }
    (total, per)
}

/// V(q) only, float path, without the per-class breakdown.
pub fn variance_value(seq: &Sequence, q: u64) -> f64 {
    let t = class_sums(seq, q);
    variance_from_class_sums(&t, q).0
}

/// V(q) through the bilinear form q Σ_{m≡n} a_m a_n − q Σ_{h|q} |Σ_{(n,q)=h} a_n|²/φ(q/h), divided by q.
pub fn variance_bilinear(seq: &Sequence, q: u64) -> VarianceReport {
    if let Some(t) = class_sums_exact(seq, q) {
        let diag: i128 = t.iter().map(|x| x * x).sum();
        let mut v = exact_int(diag);
        for (h, members) in gcd_classes(q) {
            let u: i128 = members.iter().map(|&r| t[r]).sum();
            let phi = euler_phi(q / h) as i128;
            v -= BigRational::new(BigInt::from(u) * BigInt::from(u), BigInt::from(phi));
        }
        return VarianceReport {
            q,
            v: Scalar::Exact(v),
            per_class_terms: None,
            method: VarianceMethod::Bilinear,
        };
    }
    let t = class_sums(seq, q);
    let mut v: f64 = t.iter().map(|x| x * x).sum();
    for (h, members) in gcd_classes(q) {
        let u: f64 = members.iter().map(|&r| t[r]).sum();
        v -= u * u / euler_phi(q / h) as f64;
    }
    VarianceReport {
        q,
        v: Scalar::Real(v),
        per_class_terms: None,
        method: VarianceMethod::Bilinear,
    }
}

/// Σ_{q ≤ Q} V(q;A), parallel over q with a fixed reduction order.
pub fn variance_total(seq: &Sequence, q_max: u64) -> f64 {
    variance_sum_range(seq, 1, q_max)
}

/// Σ_{lo ≤ q ≤ hi} V(q;A).
pub fn variance_sum_range(seq: &Sequence, lo: u64, hi: u64) -> f64 {
    pairwise_sum(&variance_profile(seq, lo, hi))
}

/// V(q) for each q in lo..=hi.
pub fn variance_profile(seq: &Sequence, lo: u64, hi: u64) -> Vec<f64> {
    let lo = lo.max(1);
    if hi < lo {
        return Vec::new();
    }
    (lo..=hi)
        .into_par_iter()
        .map(|q| variance_value(seq, q))
        .collect()
}

/// Per-divisor ingredients of H: P(e) = Σ_s T_e[s]² and S(e) = T_e[0].
struct DivisorFolds {
    divs: Vec<u64>,
    p_exact: Option<Vec<i128>>,
    s_exact: Option<Vec<i128>>,
    p_real: Vec<f64>,
    s_real: Vec<f64>,
}

fn fold_divisors(seq: &Sequence, q: u64) -> DivisorFolds {
    let divs = divisors(q);
    let exact_t = if use_exact(seq) {
        class_sums_exact(seq, q)
    } else {
        None
    };
    let t = class_sums(seq, q);
    let mut p_real = Vec::with_capacity(divs.len());
    let mut s_real = Vec::with_capacity(divs.len());
    let mut p_exact = exact_t.as_ref().map(|_| Vec::with_capacity(divs.len()));
    let mut s_exact = exact_t.as_ref().map(|_| Vec::with_capacity(divs.len()));
    for &e in &divs {
        let e_us = e as usize;
        let mut te = vec![0.0; e_us];
        for (r, &v) in t.iter().enumerate() {
            te[r % e_us] += v;
        }
        p_real.push(te.iter().map(|x| x * x).sum());
        s_real.push(te[0]);
        if let (Some(tx), Some(pe), Some(se)) = (&exact_t, p_exact.as_mut(), s_exact.as_mut()) {
            let mut te = vec![0i128; e_us];
            for (r, &v) in tx.iter().enumerate() {
                te[r % e_us] += v;
            }
            pe.push(te.iter().map(|x| x * x).sum());
            se.push(te[0]);
        }
    }
    DivisorFolds {
        divs,
        p_exact,
        s_exact,
        p_real,
        s_real,
    }
}

/// H(q;A) = Σ_{m,n} a_m a_n c_q(m−n) − |Σ a_n c_q(n)|²/φ(q), via
/// Σ_{m,n} a_m a_n c_q(m−n) = Σ_{e|q} e μ(q/e) Σ_{s mod e} T_e[s]² and
/// Σ a_n c_q(n) = Σ_{e|q} e μ(q/e) T_e[0].
pub fn exp_variance_h(seq: &Sequence, q: u64) -> ExpVarianceReport {
    assert!(q >= 1);
    let f = fold_divisors(seq, q);
    let phi = euler_phi(q);
    if let (Some(p), Some(s)) = (&f.p_exact, &f.s_exact) {
        let mut bil = 0i128;
        let mut corr = 0i128;
        for (i, &e) in f.divs.iter().enumerate() {
            let w = i128::from(mobius(q / e)) * e as i128;
            bil += w * p[i];
            corr += w * s[i];
        }
        let h = exact_int(bil)
            - BigRational::new(BigInt::from(corr) * BigInt::from(corr), BigInt::from(phi));
        return ExpVarianceReport {
            q,
            h: Scalar::Exact(h),
        };
    }
    let mut bil = 0.0;
    let mut corr = 0.0;
    for (i, &e) in f.divs.iter().enumerate() {
        let w = (mobius(q / e) * e as i64) as f64;
        bil += w * f.p_real[i];
        corr += w * f.s_real[i];
    }
    ExpVarianceReport {
        q,
        h: Scalar::Real(bil - corr * corr / phi as f64),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub q: u64,
    pub holds: bool,
    pub exact: bool,
    /// q·V(q)
    pub lhs: Scalar,
    /// Σ_{d|q} H(d)
    pub rhs: Scalar,
    pub residual: f64,
    /// divisors d whose H(d) disagrees with the Möbius form Σ_{e|d} e V(e) μ(d/e)
    pub disagreeing: Vec<u64>,
}

/// Checks q·V(q) = Σ_{d|q} H(d), exactly on the exact path and to 1e-6·qV otherwise.
pub fn check_identity_prop1(seq: &Sequence, q: u64) -> IdentityCheck {
    let divs = divisors(q);
    let vs: Vec<Scalar> = divs.iter().map(|&d| variance_mod_q(seq, d).v).collect();
    let hs: Vec<Scalar> = divs.iter().map(|&d| exp_variance_h(seq, d).h).collect();
    let exact = vs.iter().chain(&hs).all(Scalar::is_exact);
    let mut disagreeing = Vec::new();
    if exact {
        let v_ex: Vec<&ExactScalar> = vs.iter().map(|s| s.as_exact().unwrap()).collect();
        let h_ex: Vec<&ExactScalar> = hs.iter().map(|s| s.as_exact().unwrap()).collect();
        let lhs = (*v_ex.last().unwrap()).clone() * exact_int(q as i128);
        let rhs = h_ex.iter().fold(BigRational::zero(), |acc, h| acc + *h);
        for (i, &d) in divs.iter().enumerate() {
            let mut mob = BigRational::zero();
            for (j, &e) in divs.iter().enumerate().take(i + 1) {
                if d % e == 0 {
                    mob += v_ex[j].clone() * exact_int(e as i128 * mobius(d / e) as i128);
                }
            }
            if &mob != h_ex[i] {
                disagreeing.push(d);
            }
        }
        let diff = &lhs - &rhs;
        let residual = crate::arith::exact::exact_to_f64(&diff.abs());
        return IdentityCheck {
            q,
            holds: diff.is_zero() && disagreeing.is_empty(),
            exact: true,
            lhs: Scalar::Exact(lhs),
            rhs: Scalar::Exact(rhs),
            residual,
            disagreeing,
        };
    }
    let v: Vec<f64> = vs.iter().map(Scalar::to_f64).collect();
    let h: Vec<f64> = hs.iter().map(Scalar::to_f64).collect();
    let lhs = q as f64 * v.last().unwrap();
    let rhs: f64 = h.iter().sum();
    let tol = 1e-6 * lhs.abs().max(1e-300) + 1e-9;
    for (i, &d) in divs.iter().enumerate() {
        let mob: f64 = divs
            .iter()
            .enumerate()
            .take(i + 1)
            .filter(|(_, &e)| d % e == 0)
            .map(|(j, &e)| v[j] * (e as i64 * mobius(d / e)) as f64)
            .sum();
        if (mob - h[i]).abs() > 1e-6 * (d as f64 * v[i]).abs().max(h[i].abs()) + 1e-9 {
            disagreeing.push(d);
        }
    }
    let residual = (lhs - rhs).abs();
    IdentityCheck {
        q,
        holds: residual <= tol && disagreeing.is_empty(),
        exact: false,
        lhs: Scalar::Real(lhs),
        rhs: Scalar::Real(rhs),
        residual,
        disagreeing,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CorollaryBound {
    pub q: u64,
    pub q0: u64,
    pub value: Scalar,
    pub q_times_v: Scalar,
    pub holds: bool,
}

/// Σ_{a mod q, q/(a,q) > Q0} |A(a/q)|² − Σ_{d|q, d>Q0} |Σ a_n c_d(n)|²/φ(d), checked against q·V(q).
///
/// The first sum is grouped by d = q/(a,q): the reduced fractions b/d contribute
/// Σ_{(b,d)=1} |A(b/d)|² = Σ_{m,n} a_m a_n c_d(m−n).
pub fn cor1_lower_bound(seq: &Sequence, q: u64, q0: u64) -> Result<CorollaryBound> {
    if q0 < 1 {
        return Err(precondition("Q0 must be at least 1"));
    }
    let exact = use_exact(seq);
    let mut val_ex = BigRational::zero();
    let mut val = 0.0;
    for d in divisors(q).into_iter().filter(|&d| d > q0) {
        let f = fold_divisors(seq, d);
        let phi = euler_phi(d);
        if let (true, Some(p), Some(s)) = (exact, &f.p_exact, &f.s_exact) {
            let mut bil = 0i128;
            let mut corr = 0i128;
            for (i, &e) in f.divs.iter().enumerate() {
                let w = i128::from(mobius(d / e)) * e as i128;
                bil += w * p[i];
                corr += w * s[i];
            }
            val_ex += exact_int(bil)
                - BigRational::new(BigInt::from(corr) * BigInt::from(corr), BigInt::from(phi));
        } else {
            let mut bil = 0.0;
            let mut corr = 0.0;
            for (i, &e) in f.divs.iter().enumerate() {
                let w = (mobius(d / e) * e as i64) as f64;
                bil += w * f.p_real[i];
                corr += w * f.s_real[i];
            }
            val += bil - corr * corr / phi as f64;
        }
    }
    let qv = variance_mod_q(seq, q).v;
    let (value, q_times_v, holds) = match qv {
        Scalar::Exact(v) => {
            let qv = v * exact_int(q as i128);
            let holds = val_ex <= qv;
            (Scalar::Exact(val_ex), Scalar::Exact(qv), holds)
        }
        Scalar::Real(v) => {
            let qv = v * q as f64;
            let holds = val <= qv * (1.0 + 1e-9) + 1e-9;
            (Scalar::Real(val), Scalar::Real(qv), holds)
        }
    };
    Ok(CorollaryBound {
        q,
        q0,
        value,
        q_times_v,
        holds,
    })
}

/// Σ_{d|q} c_d(m) c_d(n)/φ(d), exactly, with the Ramanujan sum supplied by the caller.
pub fn lemma1_lhs(q: u64, m: i64, n: i64, c: impl Fn(u64, i64) -> i64) -> Ratio<i128> {
    divisors(q)
        .into_iter()
        .fold(Ratio::from_integer(0), |acc, d| {
            acc + Ratio::new(
                i128::from(c(d, m)) * i128::from(c(d, n)),
                euler_phi(d) as i128,
            )
        })
}

/// 0 if (m,q) ≠ (n,q), else q/φ(q/h) with h the common gcd.
pub fn lemma1_rhs(q: u64, m: i64, n: i64) -> Ratio<i128> {
    let gm = if m == 0 { q } else { gcd(q, m.unsigned_abs()) };
    let gn = if n == 0 { q } else { gcd(q, n.unsigned_abs()) };
    if gm != gn {
        Ratio::from_integer(0)
    } else {
        Ratio::new(q as i128, euler_phi(q / gm) as i128)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PsiCounts {
    pub q: u64,
    /// (a, ψ(N;q,a)) over reduced residues a
    pub by_class: Vec<(u64, f64)>,
    pub psi_q: f64,
    pub restricted_variance: f64,
}

/// ψ(N;q,a) for (a,q)=1, ψ_q(N), and Σ_{(a,q)=1} (ψ(N;q,a) − ψ_q(N)/φ(q))².
pub fn psi_counts(table: &SieveTable, q: u64) -> Result<PsiCounts> {
    if q as usize > table.len() {
        return Err(precondition(format!("q = {q} exceeds N = {}", table.len())));
    }
    let primes = prime_powers(table);
    let t = sparse_class_sums(&primes, q);
    let by_class: Vec<(u64, f64)> = (1..=q)
        .filter(|&a| gcd(a, q) == 1)
        .map(|a| (a % q, t[(a % q) as usize]))
        .collect();
    let psi_q: f64 = by_class.iter().map(|&(_, v)| v).sum();
    let mean = psi_q / euler_phi(q) as f64;
    let restricted_variance = by_class.iter().map(|&(_, v)| (v - mean).powi(2)).sum();
    let mut by_class = by_class;
    by_class.sort_by_key(|&(a, _)| a);
    Ok(PsiCounts {
        q,
        by_class,
        psi_q,
        restricted_variance,
    })
}

/// (n, Λ(n)) for the prime powers n ≤ N.
pub fn prime_powers(table: &SieveTable) -> Vec<(u32, f64)> {
    table
        .lambda_slice()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0.0)
        .map(|(i, &v)| ((i + 1) as u32, v))
        .collect()
}

fn sparse_class_sums(terms: &[(u32, f64)], q: u64) -> Vec<f64> {
    let q32 = q as u32;
    let mut t = vec![0.0; q as usize];
    for &(n, v) in terms {
        t[(n % q32) as usize] += v;
    }
    t
}

fn restricted_from_class_sums(t: &[f64], q: u64) -> f64 {
    let mut sum = 0.0;
    let mut count = 0u64;
    for (a, &v) in t.iter().enumerate() {
        if gcd(a as u64, q) == 1 {
            sum += v;
            count += 1;
        }
    }
    let mean = sum / count as f64;
    t.iter()
        .enumerate()
        .filter(|(a, _)| gcd(*a as u64, q) == 1)
        .map(|(_, &v)| (v - mean).powi(2))
        .sum()
}

/// Σ_{lo ≤ q ≤ hi} Σ_{(a,q)=1} (ψ(N;q,a) − ψ_q(N)/φ(q))².
pub fn restricted_prime_variance_sum(table: &SieveTable, lo: u64, hi: u64) -> f64 {
    pairwise_sum(&restricted_prime_variance_profile(table, lo, hi))
}

pub fn restricted_prime_variance_profile(table: &SieveTable, lo: u64, hi: u64) -> Vec<f64> {
    let lo = lo.max(1);
    if hi < lo {
        return Vec::new();
    }
    let terms = prime_powers(table);
    (lo..=hi)
        .into_par_iter()
        .map(|q| restricted_from_class_sums(&sparse_class_sums(&terms, q), q))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ramanujan::ramanujan_sum;
    use crate::arith::sieve_all;
    use num_complex::Complex64;

    fn d2(n: usize) -> Sequence {
        sieve_all(n, 2).unwrap().dk_sequence(2)
    }

    fn exp_sum(seq: &Sequence, a: u64, q: u64) -> Complex64 {
        seq.nonzero()
            .map(|(n, v)| {
                let r = (a as u128 * n as u128 % q as u128) as f64;
                v * Complex64::from_polar(1.0, std::f64::consts::TAU * r / q as f64)
            })
            .sum()
    }

    #[test]
    fn constant_sequence_on_full_period_has_zero_variance() {
        for q in 1..=30u64 {
            let seq = Sequence::from_ints("one", vec![1; q as usize]).unwrap();
            assert!(variance_mod_q(&seq, q).v.is_zero(), "q = {q}");
            if q > 1 {
                assert!(exp_variance_h(&seq, q).h.is_zero(), "q = {q}");
            }
        }
    }

    #[test]
    fn spike_and_trivial_modulus() {
        let seq = Sequence::from_ints("spike", vec![1, 0, 0]).unwrap();
        assert!(variance_mod_q(&seq, 2).v.is_zero());
        let r = d2(50);
        assert!(exp_variance_h(&r, 1).h.is_zero());
    }

    #[test]
    fn h_matches_complex_exponentials() {
        let seq = d2(50);
        let q = 6;
        let mut sq = 0.0;
        for a in 1..q {
            if gcd(a, q) == 1 {
                sq += exp_sum(&seq, a, q).norm_sqr();
            }
        }
        let corr: i64 = (1..=50)
            .map(|n| seq.get(n) as i64 * ramanujan_sum(q, n as i64))
            .sum();
        let expect = sq - (corr * corr) as f64 / 2.0;
        assert!((exp_variance_h(&seq, q).h.to_f64() - expect).abs() < 1e-9);
    }

    #[test]
    fn identity_for_divisor_function() {
        let seq = d2(100);
        let c = check_identity_prop1(&seq, 4);
        assert!(c.holds && c.exact && c.residual == 0.0, "{c:?}");
        let rhs: f64 = [1, 2, 4]
            .iter()
            .map(|&d| exp_variance_h(&seq, d).h.to_f64())
            .sum();
        assert_eq!(variance_mod_q(&seq, 4).v.to_f64() * 4.0, rhs);
    }

    #[test]
    fn bilinear_equals_direct() {
        let seq = d2(200);
        for q in 1..=50 {
            assert_eq!(variance_mod_q(&seq, q).v, variance_bilinear(&seq, q).v);
        }
    }

    #[test]
    fn float_path_identity() {
        let seq = Sequence::from_reals(
            "r",
            (1..=300).map(|n| ((n * 37) % 11) as f64 * 0.37).collect(),
        )
        .unwrap();
        for q in [12u64, 30, 36] {
            let c = check_identity_prop1(&seq, q);
            assert!(c.holds && !c.exact, "{c:?}");
        }
    }

    #[test]
    fn corollary_examples() {
        let seq = d2(100);
        let c = cor1_lower_bound(&seq, 12, 3).unwrap();
        assert!(c.holds);
        // Q0 ≥ q: empty first sum, bound is minus nothing
        let c = cor1_lower_bound(&seq, 12, 12).unwrap();
        assert!(c.value.is_zero());
        // Q0 = 1, q prime: equals H(q)
        let c = cor1_lower_bound(&seq, 7, 1).unwrap();
        assert_eq!(c.value, exp_variance_h(&seq, 7).h);
        assert!(cor1_lower_bound(&seq, 7, 0).is_err());
    }

    #[test]
    fn corollary_first_sum_matches_exponential_sums() {
        let seq = d2(80);
        let q = 12;
        let q0 = 2;
        let mut first = 0.0;
        for a in 0..q {
            if q / gcd(a, q) > q0 {
                first += exp_sum(&seq, a, q).norm_sqr();
            }
        }
        let mut second = 0.0;
        for d in divisors(q).into_iter().filter(|&d| d > q0) {
            let corr: i64 = (1..=80)
                .map(|n| seq.get(n) as i64 * ramanujan_sum(d, n as i64))
                .sum();
            second += (corr * corr) as f64 / euler_phi(d) as f64;
        }
        let c = cor1_lower_bound(&seq, q, q0).unwrap();
        assert!((c.value.to_f64() - (first - second)).abs() < 1e-7);
    }

    #[test]
    fn lemma1_small_grid() {
        for q in 1..=24u64 {
            for m in 0..=30i64 {
                for n in 0..=30i64 {
                    assert_eq!(lemma1_lhs(q, m, n, ramanujan_sum), lemma1_rhs(q, m, n));
                }
            }
        }
    }

    #[test]
    fn psi_counts_small() {
        let t = sieve_all(10, 2).unwrap();
        let p = psi_counts(&t, 3).unwrap();
        let ln = |x: f64| x.ln();
        assert_eq!(p.by_class.len(), 2);
        // n ≡ 1: 4, 7 (Λ(4) = log 2); n ≡ 2: 2, 5, 8
        assert!((p.by_class[0].1 - (ln(2.0) + ln(7.0))).abs() < 1e-12);
        assert!((p.by_class[1].1 - (ln(2.0) + ln(5.0) + ln(2.0))).abs() < 1e-12);
        let one = psi_counts(&t, 1).unwrap();
        assert_eq!(one.restricted_variance, 0.0);
        assert!((one.psi_q - t.psi()).abs() < 1e-12);
        assert!(psi_counts(&t, 11).is_err());
    }

    #[test]
    fn restricted_sum_matches_psi_counts() {
        let t = sieve_all(5000, 2).unwrap();
        let total = restricted_prime_variance_sum(&t, 1, 60);
        let direct: f64 = (1..=60)
            .map(|q| psi_counts(&t, q).unwrap().restricted_variance)
            .sum();
        assert!((total - direct).abs() < 1e-9 * direct);
    }

    #[test]
    fn variance_total_matches_serial() {
        let t = sieve_all(10_000, 2).unwrap();
        let seq = t.lambda_sequence();
        let total = variance_total(&seq, 100);
        let serial: f64 = (1..=100).map(|q| variance_mod_q(&seq, q).v.to_f64()).sum();
        assert!((total - serial).abs() <= 1e-6 * serial);
    }
}
