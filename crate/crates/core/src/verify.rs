//! Self-check suites over the exact identities, the Euler-product and residue
//! machinery, and the window and weight lemmas.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::exact::factorial_f64;
use crate::arith::factor::{divisor_function, is_squarefree};
use crate::arith::{ramanujan_sum, ramanujan_sum_direct, sieve_all, Sequence};
use crate::circle::build_spectrum;
use crate::dirichlet::{check_fq1_bound, euler_f_q, residue_dk_correlation, zeta};
use crate::error::{invalid, Error, Result};
use crate::numeric::pairwise_sum;
use crate::variance::{check_identity_prop1, lemma1_lhs, lemma1_rhs};
use crate::windows::lemmas::{check_lemma5, check_lemma_major, weight_sum_trend};
use crate::windows::{build_tilde_sequence, build_weights, build_window, WeightKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Identities,
    Euler,
    Windows,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identities" => Ok(Self::Identities),
            "euler" => Ok(Self::Euler),
            "windows" => Ok(Self::Windows),
            "all" => Ok(Self::All),
            _ => Err(invalid(format!(
                "unknown suite '{s}' (identities, euler, windows, all)"
            ))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Identities => "identities",
            Self::Euler => "euler",
            Self::Windows => "windows",
            Self::All => "all",
        };
        f.write_str(s)
    }
}

/// The Ramanujan sum value perturbed when a fault is injected.
pub const FAULT_Q: u64 = 12;
pub const FAULT_N: i64 = 7;

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    /// Adds one to c_12(7) everywhere the suites evaluate Ramanujan sums.
    pub inject_fault: bool,
}

impl VerifyOptions {
    fn c(&self, q: u64, n: i64) -> i64 {
        let v = ramanujan_sum(q, n);
        if self.inject_fault && q == FAULT_Q && n == FAULT_N {
            v + 1
        } else {
            v
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "ok  " } else { "FAIL" };
        write!(
            f,
            "[{status}] {}/{} ({} cases): {}",
            self.suite, self.name, self.cases, self.detail
        )
    }
}

fn result(suite: Suite, name: &str, cases: usize, failures: &[String]) -> CheckResult {
    let detail = match failures.len() {
        0 => "all cases hold".to_string(),
        n => {
            let shown: Vec<&str> = failures.iter().take(5).map(String::as_str).collect();
            format!("{n} failing; first: {}", shown.join("; "))
        }
    };
    CheckResult {
        suite,
        name: name.to_string(),
        passed: failures.is_empty(),
        cases,
        detail,
    }
}

/// The five families used by the exact identity check: d_2, d_3, random 0/1,
/// random ±1 and a single spike.
pub fn identity_sequences(n: usize, seed: u64) -> Result<Vec<Sequence>> {
    let table = sieve_all(n, 3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d2 = (1..=n).map(|m| i64::from(table.d(2, m))).collect();
    let d3 = (1..=n).map(|m| i64::from(table.d(3, m))).collect();
    let bits = (0..n).map(|_| rng.gen_range(0..=1)).collect();
    let signs = (0..n)
        .map(|_| if rng.gen_bool(0.5) { 1 } else { -1 })
        .collect();
    let spot = rng.gen_range(0..n);
    let spike = (0..n).map(|i| i64::from(i == spot)).collect();
    Ok(vec![
        Sequence::from_ints("d2", d2)?,
        Sequence::from_ints("d3", d3)?,
        Sequence::from_ints("random01", bits)?,
        Sequence::from_ints("random_pm1", signs)?,
        Sequence::from_ints("spike", spike)?,
    ])
}

/// q·V(q) = Σ_{d|q} H(d) exactly, for every family at N = 200 and N = 150, q ≤ 50.
pub fn check_prop1_identity() -> Result<CheckResult> {
    let mut failures = Vec::new();
    let mut cases = 0;
    for (n, seed) in [(200usize, 1u64), (150, 2)] {
        for seq in identity_sequences(n, seed)? {
            for q in 1..=50 {
                let c = check_identity_prop1(&seq, q);
                cases += 1;
                if !(c.holds && c.exact) {
                    failures.push(format!(
                        "{} N={n} q={q} residual {}",
                        seq.name(),
                        c.residual
                    ));
                }
            }
        }
    }
    Ok(result(
        Suite::Identities,
        "variance_identity",
        cases,
        &failures,
    ))
}

/// Σ_{d|q} c_d(m)c_d(n)/φ(d) against its closed form for q ≤ 60, 1 ≤ m, n ≤ 120.
pub fn check_lemma1(opts: &VerifyOptions) -> CheckResult {
    let mut failures = Vec::new();
    let mut cases = 0;
    for q in 1..=60u64 {
        for m in 1..=120i64 {
            for n in 1..=120i64 {
                cases += 1;
                let lhs = lemma1_lhs(q, m, n, |d, x| opts.c(d, x));
                let rhs = lemma1_rhs(q, m, n);
                if lhs != rhs {
                    failures.push(format!("q={q} m={m} n={n}: {lhs} vs {rhs}"));
                }
            }
        }
    }
    result(
        Suite::Identities,
        "ramanujan_orthogonality",
        cases,
        &failures,
    )
}

/// The multiplicative formula for c_q(n) against the exponential sum, q ≤ 60, n ≤ 120.
pub fn check_ramanujan_formula(opts: &VerifyOptions) -> CheckResult {
    let mut failures = Vec::new();
    let mut cases = 0;
    for q in 1..=60u64 {
        for n in 1..=120i64 {
            cases += 1;
            let f = opts.c(q, n) as f64;
            let d = ramanujan_sum_direct(q, n);
            if (d.re - f).abs() > 1e-9 || d.im.abs() > 1e-9 {
                failures.push(format!("c_{q}({n}) = {f} vs {}", d.re));
            }
        }
    }
    result(Suite::Identities, "ramanujan_formula", cases, &failures)
}

/// Σ|a_n|² against (1/T)Σ_t|A(t/T)|² for ten sequences at N = 10^4.
pub fn check_parseval() -> Result<CheckResult> {
    let n = 10_000;
    let table = sieve_all(n, 4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut seqs = vec![
        table.lambda_sequence(),
        table.dk_sequence(2),
        table.dk_sequence(3),
        table.dk_sequence(4),
        Sequence::from_ints(
            "mu",
            table.mu_slice().iter().map(|&m| i64::from(m)).collect(),
        )?,
    ];
    seqs.extend(identity_sequences(n, 4)?.into_iter().skip(2));
    seqs.push(Sequence::from_reals(
        "gauss",
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    )?);
    seqs.push(Sequence::from_reals(
        "log",
        (1..=n).map(|m| (m as f64).ln()).collect(),
    )?);
    let mut failures = Vec::new();
    for seq in &seqs {
        let spec = build_spectrum(seq, crate::circle::default_grid_size(n))?;
        let direct = seq.sum_squares();
        let rel = (spec.total_mass() - direct).abs() / direct.max(f64::MIN_POSITIVE);
        if rel > 1e-6 {
            failures.push(format!("{}: relative {rel:e}", seq.name()));
        }
    }
    Ok(result(Suite::Identities, "parseval", seqs.len(), &failures))
}

/// ζ(2)^k F_q(2) against the truncated series Σ_{n ≤ M} d_k(n)c_q(n)/n², with the
/// tail bound 2q(log M + k)^{k−1}/((k−1)! M).
pub fn check_euler_series(opts: &VerifyOptions) -> Result<CheckResult> {
    let m = 100_000usize;
    let table = sieve_all(m, 4)?;
    let two = Complex64::new(2.0, 0.0);
    let mut failures = Vec::new();
    let mut cases = 0;
    for k in 2..=4u32 {
        let zk = zeta(two)?.powu(k);
        for q in [1u64, 2, 3, 4, 6, 12, 30] {
            cases += 1;
            let terms: Vec<f64> = (1..=m)
                .map(|n| f64::from(table.d(k, n)) * opts.c(q, n as i64) as f64 / (n as f64).powi(2))
                .collect();
            let direct = pairwise_sum(&terms);
            let pred = (zk * euler_f_q(q, k, two)?).re;
            let tail = 2.0 * q as f64 * ((m as f64).ln() + f64::from(k)).powi(k as i32 - 1)
                / factorial_f64(k - 1)
                / m as f64;
            if (direct - pred).abs() > tail {
                failures.push(format!("q={q} k={k}: {direct} vs {pred}"));
            }
        }
    }
    Ok(result(
        Suite::Euler,
        "euler_product_series",
        cases,
        &failures,
    ))
}

/// Residue predictions for Σ_{n ≤ N} d_k(n) c_q(n) against the direct sums at N = 2·10^5.
pub fn check_residues(opts: &VerifyOptions) -> Result<CheckResult> {
    let n = 200_000usize;
    let table = sieve_all(n, 3)?;
    let mut failures = Vec::new();
    let cases = [
        (1u64, 2u32, 1e-3),
        (1, 3, 1e-2),
        (6, 2, 2e-2),
        (6, 3, 5e-2),
        (12, 2, 5e-2),
    ];
    for &(q, k, tol) in &cases {
        let terms: Vec<f64> = (1..=n)
            .map(|m| f64::from(table.d(k, m)) * opts.c(q, m as i64) as f64)
            .collect();
        let direct = pairwise_sum(&terms);
        let pred = residue_dk_correlation(q, k, n as f64)?.value;
        let rel = (direct - pred).abs() / direct.abs();
        if rel > tol {
            failures.push(format!("q={q} k={k}: relative {rel:.3e} > {tol:e}"));
        }
    }
    Ok(result(
        Suite::Euler,
        "residue_vs_direct",
        cases.len(),
        &failures,
    ))
}

/// F_q(1) ≥ d_{k−1}(q)(φ(q)/q)^k exactly for squarefree q ≤ 2000.
pub fn check_fq1_lower_bound() -> Result<CheckResult> {
    let mut failures = Vec::new();
    let mut cases = 0;
    for k in 2..=4 {
        for q in (1..=2000u64).filter(|&q| is_squarefree(q)) {
            cases += 1;
            if !check_fq1_bound(q, k)?.holds {
                failures.push(format!("q={q} k={k}"));
            }
        }
    }
    Ok(result(Suite::Euler, "fq1_lower_bound", cases, &failures))
}

/// Shape, moments and transform of the window against brute-force quadrature.
pub fn check_window() -> Result<CheckResult> {
    let mut failures = Vec::new();
    let mut cases = 0;
    for eps in [0.05, 0.1, 0.2] {
        let w = build_window(eps)?;
        let m = 100_000;
        let grid: Vec<f64> = (0..m).map(|i| w.phi((i as f64 + 0.5) / m as f64)).collect();
        let int = pairwise_sum(&grid) / m as f64;
        let sq = pairwise_sum(&grid.iter().map(|v| v * v).collect::<Vec<_>>()) / m as f64;
        cases += 1;
        if (int - w.integral()).abs() > 1e-6 || (int - (1.0 - eps)).abs() > 1e-6 {
            failures.push(format!("ε={eps}: ∫Φ = {int} vs {}", w.integral()));
        }
        cases += 1;
        if (sq - w.integral_sq()).abs() > 1e-6 {
            failures.push(format!("ε={eps}: ∫Φ² = {sq} vs {}", w.integral_sq()));
        }
        cases += 1;
        if grid.iter().any(|v| !(0.0..=1.0).contains(v)) || w.phi(0.0) != 0.0 || w.phi(1.0) != 0.0 {
            failures.push(format!(
                "ε={eps}: Φ leaves [0, 1] or is nonzero at the ends"
            ));
        }
        for xi in [0.5, 2.0, 9.25] {
            cases += 1;
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, v) in grid.iter().enumerate() {
                let t = (i as f64 + 0.5) / m as f64;
                acc += v * Complex64::from_polar(1.0, -std::f64::consts::TAU * xi * t);
            }
            acc /= m as f64;
            if (acc - w.phi_hat(xi)).norm() > 1e-7 {
                failures.push(format!(
                    "ε={eps}: Φ̂({xi}) off by {:e}",
                    (acc - w.phi_hat(xi)).norm()
                ));
            }
        }
    }
    Ok(result(
        Suite::Windows,
        "window_properties",
        cases,
        &failures,
    ))
}

/// Σ a_n ã_n against its expansion through Ramanujan sums, for Λ, d_2 and d_3.
pub fn check_lemma5_suite() -> Result<CheckResult> {
    let n = 20_000;
    let table = sieve_all(n, 3)?;
    let phi = build_window(0.05)?;
    let mut failures = Vec::new();
    let mut cases = 0;
    for (seq, kind) in [
        (table.lambda_sequence(), WeightKind::PrimeSieve),
        (table.dk_sequence(2), WeightKind::DivisorK { k: 2 }),
        (table.dk_sequence(3), WeightKind::DivisorK { k: 3 }),
    ] {
        for r in [30.0, 100.5] {
            cases += 1;
            let w = build_weights(kind, r)?;
            let c = check_lemma5(&seq, &w, &phi)?;
            if c.residual > 1e-9 {
                failures.push(format!("{} R={r}: residual {:e}", seq.name(), c.residual));
            }
        }
    }
    Ok(result(Suite::Windows, "lemma5", cases, &failures))
}

/// Ã(a/q + β) against its major-arc main term; the error must stay below B·R·log N.
pub fn check_major_lemma() -> Result<CheckResult> {
    let n = 20_000;
    let r = 50.0;
    let phi = build_window(0.05)?;
    let mut failures = Vec::new();
    let mut cases = 0;
    for kind in [WeightKind::PrimeSieve, WeightKind::DivisorK { k: 2 }] {
        let w = build_weights(kind, r)?;
        let tilde = build_tilde_sequence(n, &w, &phi)?;
        for (a, q) in [(0u64, 1u64), (1, 2), (1, 3), (2, 5), (5, 12), (7, 30)] {
            for frac in [0.0, 0.3, -0.9] {
                cases += 1;
                let beta = frac / (2.0 * q as f64 * r);
                let c = check_lemma_major(&tilde, &w, &phi, a, q, beta)?;
                if c.error_ratio > 1.0 {
                    failures.push(format!(
                        "{kind:?} a={a} q={q} β={beta:e}: ratio {}",
                        c.error_ratio
                    ));
                }
            }
        }
    }
    Ok(result(Suite::Windows, "major_arc_lemma", cases, &failures))
}

/// |Σ_{q|r} μ(r)log(R/r)/r − μ(q)/φ(q)| shrinks along R ∈ {10^3, 10^4, 10^5}, one miss allowed.
pub fn check_weight_sums() -> Result<CheckResult> {
    let trend = weight_sum_trend(&[1e3, 1e4, 1e5], 30, 1)?;
    let failures: Vec<String> = trend
        .iter()
        .filter(|t| !t.passed)
        .map(|t| format!("q={} deviations {:?}", t.q, t.deviations))
        .collect();
    Ok(result(
        Suite::Windows,
        "weight_sum_trend",
        trend.len(),
        &failures,
    ))
}

/// d_k(q) is multiplicative and matches a divisor count; a cheap guard for the tables
/// every other check leans on.
fn check_divisor_tables() -> Result<CheckResult> {
    let n = 5_000;
    let table = sieve_all(n, 4)?;
    let mut failures = Vec::new();
    for k in 1..=4u32 {
        for m in 1..=n {
            if u64::from(table.d(k, m)) != divisor_function(k, m as u64) {
                failures.push(format!("d_{k}({m})"));
            }
        }
    }
    Ok(result(
        Suite::Identities,
        "divisor_tables",
        4 * n,
        &failures,
    ))
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Identities | Suite::All) {
        out.push(check_divisor_tables()?);
        out.push(check_prop1_identity()?);
        out.push(check_lemma1(opts));
        out.push(check_ramanujan_formula(opts));
        out.push(check_parseval()?);
    }
    if matches!(suite, Suite::Euler | Suite::All) {
        out.push(check_euler_series(opts)?);
        out.push(check_residues(opts)?);
        out.push(check_fq1_lower_bound()?);
    }
    if matches!(suite, Suite::Windows | Suite::All) {
        out.push(check_window()?);
        out.push(check_lemma5_suite()?);
        out.push(check_major_lemma()?);
        out.push(check_weight_sums()?);
    }
    Ok(out)
}
