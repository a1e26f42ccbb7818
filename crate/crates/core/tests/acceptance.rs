//! Acceptance criteria. Each test prints one PASS/FAIL line to stdout (bypassing the
//! harness capture) and then asserts.

use std::io::Write;
use std::time::Instant;

use apvar_core::arith::exact::exact_ratio;
use apvar_core::arith::factor::is_squarefree;
use apvar_core::arith::{ramanujan_sum, sieve_all, SieveTable};
use apvar_core::dirichlet::check_fq1_bound;
use apvar_core::dirichlet::polynomial::{leading_coefficient, polynomial_69, triple_contour_69};
use apvar_core::dirichlet::residue::ramdkeval_admissible;
use apvar_core::dirichlet::{residue_dk_correlation, residue_ramdkeval};
use apvar_core::numeric::pairwise_sum;
use apvar_core::pipeline::{
    run_theorem1_with, run_theorem2_with, BoundReport, Ending, ExperimentConfig,
};
use apvar_core::variance::restricted_prime_variance_sum;
use apvar_core::verify::{
    check_lemma1, check_parseval, check_prop1_identity, check_ramanujan_formula, VerifyOptions,
};
use apvar_core::windows::lemmas::weight_sum_trend;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: &str, passed: bool, started: Instant, detail: &str) {
    let status = if passed { "PASS" } else { "FAIL" };
    let line = format!(
        "\nacceptance {id:<3} {status} ({:.1} s): {detail}\n",
        started.elapsed().as_secs_f64()
    );
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
}

#[test]
fn c1_exact_identity_suite() {
    let t = Instant::now();
    let r = check_prop1_identity().unwrap();
    let ok = r.passed && r.cases == 500 && t.elapsed().as_secs() < 60;
    report(
        "1",
        ok,
        t,
        &format!("{} exact (sequence, q) pairs; {}", r.cases, r.detail),
    );
    assert!(ok, "{r}");
}

#[test]
fn c2_ramanujan_orthogonality() {
    let t = Instant::now();
    let r = check_lemma1(&VerifyOptions::default());
    let ok = r.passed && t.elapsed().as_secs() < 60;
    report(
        "2",
        ok,
        t,
        &format!(
            "{} (q, m, n) triples, q ≤ 60, m, n ≤ 120; {}",
            r.cases, r.detail
        ),
    );
    assert!(ok, "{r}");
}

#[test]
fn c3_ramanujan_formula_and_parseval() {
    let t = Instant::now();
    let f = check_ramanujan_formula(&VerifyOptions::default());
    let p = check_parseval().unwrap();
    let ok = f.passed && p.passed && p.cases == 10;
    report(
        "3",
        ok,
        t,
        &format!(
            "formula {} cases at 1e-9: {}; Parseval {} sequences at 1e-6: {}",
            f.cases, f.detail, p.cases, p.detail
        ),
    );
    assert!(ok, "{f}\n{p}");
}

fn direct_correlation(table: &SieveTable, q: u64, k: u32) -> f64 {
    let terms: Vec<f64> = (1..=table.len())
        .map(|n| f64::from(table.d(k, n)) * ramanujan_sum(q, n as i64) as f64)
        .collect();
    pairwise_sum(&terms)
}

#[test]
fn c4_residue_oracle() {
    let t = Instant::now();
    let n = 1_000_000usize;
    let table = sieve_all(n, 3).unwrap();
    let mut parts = Vec::new();
    let mut ok = true;
    for (q, k, tol) in [(1u64, 2u32, 1e-3), (6, 3, 5e-2)] {
        let direct = direct_correlation(&table, q, k);
        let pred = residue_dk_correlation(q, k, n as f64).unwrap().value;
        let rel = (pred - direct).abs() / direct.abs();
        ok &= rel <= tol;
        parts.push(format!(
            "Σ d_{k}·c_{q}: direct {direct:.6e}, residue {pred:.6e}, rel {rel:.2e} (tol {tol:e})"
        ));
    }
    ok &= t.elapsed().as_secs() < 300;
    report("4", ok, t, &parts.join("; "));
    assert!(ok);
}

#[test]
fn c5_weight_sum_calibration() {
    let t = Instant::now();
    let trend = weight_sum_trend(&[1e4, 1e5, 1e6], 30, 1).unwrap();
    let failing: Vec<u64> = trend.iter().filter(|c| !c.passed).map(|c| c.q).collect();
    let ok = failing.is_empty() && !trend.is_empty();
    report(
        "5",
        ok,
        t,
        &format!(
            "{} squarefree q ≤ 30 along R = 1e4, 1e5, 1e6; failing q: {failing:?}",
            trend.len()
        ),
    );
    assert!(ok, "{trend:#?}");
}

#[test]
fn c6_polynomial_against_contour() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    let mut draws = 0;
    for k in 2..=4u32 {
        for _ in 0..20 {
            let log_n = rng.gen_range(4.0f64..16.0) * std::f64::consts::LN_10;
            let log_r = rng.gen_range(0.1..0.5) * log_n;
            let log_kq0 = rng.gen_range(0.05..0.95) * log_r;
            let closed = polynomial_69(k, log_n, log_r, log_kq0);
            let contour = triple_contour_69(k, log_n, log_r, log_kq0, 128);
            worst = worst.max((closed - contour).abs() / closed.abs());
            draws += 1;
        }
    }
    let lead = leading_coefficient(2);
    let lead_ok = lead == exact_ratio(-1, 3);
    let ok = worst <= 1e-6 && lead_ok;
    report(
        "6",
        ok,
        t,
        &format!("{draws} draws, worst relative difference {worst:.2e} (tol 1e-6); k = 2 leading coefficient {lead}"),
    );
    assert!(ok);
}

fn broken_links(r: &BoundReport) -> Vec<String> {
    r.links
        .iter()
        .filter(|l| !l.holds)
        .map(|l| {
            format!(
                "{}: {:.4e} > {:.4e} + {:.4e}",
                l.name, l.lhs, l.rhs, l.error
            )
        })
        .collect()
}

#[test]
fn c7_chain_soundness() {
    let n = 100_000usize;
    let nf = n as f64;
    let table = sieve_all(n, 2).unwrap();

    let t = Instant::now();
    let cfg = ExperimentConfig::theorem1(n, nf.powf(0.75), None, None).unwrap();
    let r1 = run_theorem1_with(&cfg, &table).unwrap().report;
    let bad1 = broken_links(&r1);
    let ok1 = r1.chain_sound && bad1.is_empty() && t.elapsed().as_secs() < 600;
    report(
        "7a",
        ok1,
        t,
        &format!(
            "Λ, N = 1e5, Q = N^0.75: {} links, broken {bad1:?}",
            r1.links.len()
        ),
    );

    let mut ok2 = true;
    for ending in [Ending::First, Ending::Second] {
        let t = Instant::now();
        let cfg = ExperimentConfig::theorem2(n, nf.powf(0.8), 2, None, None, None).unwrap();
        let r2 = run_theorem2_with(&cfg, ending, &table).unwrap().report;
        let bad2 = broken_links(&r2);
        let ok = r2.chain_sound && bad2.is_empty() && t.elapsed().as_secs() < 600;
        report(
            "7b",
            ok,
            t,
            &format!(
                "d_2 ({ending:?} ending), N = 1e5, Q = N^0.8: {} links, broken {bad2:?}",
                r2.links.len()
            ),
        );
        ok2 &= ok;
    }
    assert!(ok1 && ok2);
}

fn montgomery_ratio(n: usize) -> f64 {
    let table = sieve_all(n, 2).unwrap();
    let nf = n as f64;
    let q = nf.powf(0.75);
    restricted_prime_variance_sum(&table, 1, q.floor() as u64) / (q * nf * q.ln())
}

#[test]
fn c8a_montgomery_regime() {
    let t = Instant::now();
    let ratio = montgomery_ratio(1_000_000);
    let ok = (0.5..=2.0).contains(&ratio);
    report(
        "8a",
        ok,
        t,
        &format!(
            "N = 1e6, Q = N^0.75: Σ restricted variance/(QN log Q) = {ratio:.4} (want [0.5, 2])"
        ),
    );
    assert!(ok);
}

#[test]
fn c8a_montgomery_scale_trend() {
    let t = Instant::now();
    let ratios: Vec<(usize, f64)> = [10_000, 100_000, 1_000_000]
        .into_iter()
        .map(|n| (n, montgomery_ratio(n)))
        .collect();
    let ok = ratios.iter().all(|(_, r)| (0.5..=2.0).contains(r));
    let shown: Vec<String> = ratios
        .iter()
        .map(|(n, r)| format!("N = {n}: {r:.4}"))
        .collect();
    report(
        "8a+",
        ok,
        t,
        &format!(
            "the same ratio over three decades, all in [0.5, 2]: {}",
            shown.join(", ")
        ),
    );
    assert!(ok);
}

#[test]
fn c8b_divisor_square_mean() {
    let t = Instant::now();
    let n_max = 10_000_000usize;
    let table = sieve_all(n_max, 2).unwrap();
    let c2 = 1.0 / std::f64::consts::PI.powi(2);
    let mut acc = 0.0f64;
    let mut next = 100_000usize;
    let mut ratios = Vec::new();
    for n in 1..=n_max {
        let d = f64::from(table.d(2, n));
        acc += d * d;
        if n == next {
            let nf = n as f64;
            ratios.push((n, acc / (nf * nf.ln().powi(3)) / c2));
            next *= 10;
        }
    }
    let last = ratios.last().unwrap().1;
    let in_band = (0.8..=1.2).contains(&last);
    let monotone = ratios
        .windows(2)
        .all(|w| (w[1].1 - 1.0).abs() < (w[0].1 - 1.0).abs());
    let ok = in_band && monotone;
    let shown: Vec<String> = ratios
        .iter()
        .map(|(n, r)| format!("N = {n}: {r:.4}"))
        .collect();
    report(
        "8b",
        ok,
        t,
        &format!(
            "Σ d_2²/(N log³N) in units of 1/π²: {} (band [0.8, 1.2] {}, monotone approach {})",
            shown.join(", "),
            if in_band { "met" } else { "missed" },
            if monotone { "yes" } else { "no" }
        ),
    );
    assert!(ok);
}

#[test]
fn c9_ramdkeval_structure() {
    let t = Instant::now();
    let mut bound_failures = Vec::new();
    let mut bound_cases = 0;
    for k in 2..=4u32 {
        for q in (1..=10_000u64).filter(|&q| is_squarefree(q)) {
            bound_cases += 1;
            if !check_fq1_bound(q, k).unwrap().holds {
                bound_failures.push((q, k));
            }
        }
    }

    let n: f64 = 1e6;
    let (delta, c) = (0.1, 0.25);
    let admissible: Vec<u64> = (1..=n.sqrt() as u64)
        .filter(|&q| ramdkeval_admissible(q, n, delta, c))
        .collect();
    let step = admissible.len() as f64 / 50.0;
    let chosen: Vec<u64> = (0..50)
        .map(|i| admissible[(i as f64 * step) as usize])
        .collect();
    let mut worst = f64::INFINITY;
    let mut residue_failures = Vec::new();
    for k in 2..=4u32 {
        for &q in &chosen {
            let r = residue_ramdkeval(q, k, n, delta, c).unwrap();
            let ratio = r.value / r.main_term;
            worst = worst.min(ratio);
            if r.value < 0.2 * r.main_term {
                residue_failures.push((q, k, ratio));
            }
        }
    }
    let ok = bound_failures.is_empty() && residue_failures.is_empty() && chosen.len() == 50;
    report(
        "9",
        ok,
        t,
        &format!(
            "F_q(1) bound: {bound_cases} cases, {} failing; residue ≥ 0.2·main term: 50 admissible q of {} (k = 2..4), \
             smallest ratio {worst:.4}, {} failing",
            bound_failures.len(),
            admissible.len(),
            residue_failures.len()
        ),
    );
    assert!(ok, "{bound_failures:?} {residue_failures:?}");
}
