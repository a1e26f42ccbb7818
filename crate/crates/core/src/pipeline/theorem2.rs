//! The divisor chain: a_n = d_k(n), weights b_r = d_{k−1}(r), with two ways to bound the
//! minor-arc integral from below.

use rayon::prelude::*;
use serde::Serialize;

use super::chain::{
    cauchy_schwarz_bound, newprop_rhs, prop13_terms, Link, NewpropRhs, NEWPROP_ALLOWANCE,
};
use super::config::ExperimentConfig;
use super::report::{BoundReport, CsRoute};
use crate::arith::factor::{divisor_function, euler_phi, is_squarefree};
use crate::arith::{sieve_all, DivisorSums, SieveTable};
use crate::circle::build_spectrum;
use crate::dirichlet::polynomial::{
    choose_r_chebyshev, polynomial_69, ChebyshevChoice, CHEBYSHEV_GRID,
};
use crate::dirichlet::residue::{
    ramdkeval_admissible, residue_divisor_mean, residue_dk_correlation_smooth,
};
use crate::dirichlet::singular::singular_constant;
use crate::error::{invalid, Result};
use crate::numeric::pairwise_sum;
use crate::windows::{
    build_tilde_sequence, build_weights, build_window, SmoothWindow, WeightKind, WeightSet,
};

/// Smoothness exponent c in "every prime factor of q is at most N^c".
pub const DEFAULT_SMOOTHNESS: f64 = 0.25;
const SINGULAR_PRIME_CAP: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Ending {
    /// R chosen by the polynomial extremal rule; bound through |∫_𝔪 D conj(D̃)|
    First,
    /// R = N^{1/2 − δ/2}; bound through ∫_𝔪 |D D̃|
    Second,
}

impl std::str::FromStr for Ending {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(Ending::First),
            "second" => Ok(Ending::Second),
            _ => Err(invalid(format!(
                "ending must be 'first' or 'second', got '{s}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FirstEnding {
    pub chebyshev: ChebyshevChoice,
    /// Σ_{KQ0<q≤R} (Σ_{q|r} d_{k−1}(r)/r) Σ_n d_k(n) c_q(n) Φ(n/N), summed directly
    pub sum_direct: f64,
    /// the same with both inner sums replaced by residues
    pub sum_residue: f64,
    pub sum_residue_error: f64,
    pub relative_difference: f64,
    /// N H(0;0,1) ∫Φ · (iterated residue polynomial)
    pub polynomial_prediction: f64,
    /// Re ∫_𝔪 D conj(D̃), for comparison with the sums above
    pub minor_cross: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SecondEnding {
    pub newprop: NewpropRhs,
    /// Σ_{KQ0<q≤R} d_{k−1}(q)/q (φ(q)/q log(R/q))^{k−1} |Σ_n d_k(n) c_q(n) Φ(n/N)|
    pub altpr1_rhs: f64,
    /// the same restricted to squarefree N^c-smooth q ≤ R N^{−δ/4}
    pub smooth_rhs: f64,
    pub smooth_count: usize,
    pub smoothness: f64,
    pub abs_product: f64,
    pub abs_product_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem2Summary {
    pub ending: Ending,
    pub k: u32,
    #[serde(rename = "R")]
    pub r: f64,
    /// final_lower_bound / (QN (log N)^{k²−1})
    pub ratio: f64,
    pub singular_constant: f64,
    /// Σ_{n≤N} d_k(n)², the Parseval ceiling for ∫|D̃|²
    pub dk_square_sum: f64,
    pub first: Option<FirstEnding>,
    pub second: Option<SecondEnding>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem2Run {
    pub report: BoundReport,
    pub summary: Theorem2Summary,
    /// (α, polynomial value) for the first ending; (q, V_k(q)) otherwise
    #[serde(skip)]
    pub plot: Vec<(f64, f64)>,
}

pub fn run_theorem2(config: &ExperimentConfig, ending: Ending) -> Result<Theorem2Run> {
    config.validate()?;
    let table = sieve_all(config.n, config.k)?;
    run_theorem2_with(config, ending, &table)
}

fn smoothed_correlations(sums: &DivisorSums, lo: u64, hi: u64) -> Vec<f64> {
    (lo..=hi).map(|q| sums.correlation(q)).collect()
}

fn first_ending_sums(
    config: &ExperimentConfig,
    w: &WeightSet,
    phi: &SmoothWindow,
    sums: &DivisorSums,
    r: f64,
) -> Result<(f64, f64, f64)> {
    let lo = (config.big_k * config.q0).floor() as u64 + 1;
    let hi = r.floor() as u64;
    if lo > hi {
        return Ok((0.0, 0.0, 0.0));
    }
    let corr = smoothed_correlations(sums, lo, hi);
    let direct: Vec<f64> = (lo..=hi)
        .zip(&corr)
        .map(|(q, c)| w.weight_sum_q(q) * c)
        .collect();
    let nf = config.n as f64;
    let k = config.k;
    let predicted: Vec<(f64, f64)> = (lo..=hi)
        .into_par_iter()
        .map(|q| {
            let g = residue_divisor_mean(q, k, r)?;
            let f = residue_dk_correlation_smooth(q, k, nf, phi)?;
            Ok((
                g.value * f.value,
                g.error * f.value.abs() + f.error * g.value.abs(),
            ))
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = predicted.iter().map(|p| p.0).collect();
    let errors: Vec<f64> = predicted.iter().map(|p| p.1).collect();
    Ok((
        pairwise_sum(&direct),
        pairwise_sum(&values),
        pairwise_sum(&errors),
    ))
}

pub fn run_theorem2_with(
    config: &ExperimentConfig,
    ending: Ending,
    table: &SieveTable,
) -> Result<Theorem2Run> {
    config.validate()?;
    let k = config.k;
    if table.len() != config.n || table.k() < k {
        return Err(invalid(format!(
            "sieve table must cover N = {} with k ≥ {k}",
            config.n
        )));
    }
    let n = config.n;
    let nf = n as f64;
    let l = nf.ln();
    let kq0 = config.big_k * config.q0;
    let mut config = config.clone();
    let mut plot = Vec::new();
    let chebyshev = match ending {
        Ending::First => {
            let c = choose_r_chebyshev(k, nf, config.q0, config.q, config.big_k, config.epsilon)?;
            config.r = c.r_half_integer();
            let (lo, hi) = c.interval;
            plot = (0..CHEBYSHEV_GRID)
                .map(|i| {
                    let a = lo + (hi - lo) * i as f64 / (CHEBYSHEV_GRID - 1) as f64;
                    (a, polynomial_69(k, l, a * l, kq0.ln()))
                })
                .collect();
            Some(c)
        }
        Ending::Second => {
            config.r = nf.powf(0.5 - config.delta / 2.0);
            None
        }
    };
    let r = config.r;
    if r <= kq0 {
        return Err(invalid(format!("R = {r} must exceed KQ0 = {kq0}")));
    }
    let arcs = config.arcs()?;
    let seq = table.dk_sequence(k);
    let phi = build_window(config.epsilon)?;
    let w = build_weights(WeightKind::DivisorK { k }, r)?;
    let tilde = build_tilde_sequence(n, &w, &phi)?;
    let spec_a = build_spectrum(&seq, config.t)?;
    let spec_t = build_spectrum(&tilde, config.t)?;
    let p = prop13_terms(&seq, &spec_a, &arcs)?;
    let cs = cauchy_schwarz_bound(&seq, &tilde, &arcs, &spec_a, &spec_t)?;
    let singular = singular_constant(k, SINGULAR_PRIME_CAP)?;
    let dk_square_sum = pairwise_sum(&seq.values().iter().map(|v| v * v).collect::<Vec<_>>());
    let sums = DivisorSums::new(&seq, r.floor() as usize, Some(&phi));

    let mut extra = vec![Link::new(
        "∫_m|D̃|² ≤ Σ d_k(n)²",
        cs.denominator - cs.denominator_error,
        dk_square_sum,
        0.0,
    )];
    let (first, second, route) = match ending {
        Ending::First => {
            let (sum_direct, sum_residue, sum_residue_error) =
                first_ending_sums(&config, &w, &phi, &sums, r)?;
            let polynomial_prediction =
                nf * singular.product * phi.integral() * polynomial_69(k, l, r.ln(), kq0.ln());
            let minor_cross = crate::circle::minor_arc_cross(&spec_a, &spec_t, &arcs)?
                .value
                .re;
            let first = FirstEnding {
                chebyshev: chebyshev.expect("set for the first ending"),
                sum_direct,
                sum_residue,
                sum_residue_error,
                relative_difference: (sum_direct - sum_residue).abs()
                    / sum_direct.abs().max(f64::MIN_POSITIVE),
                polynomial_prediction,
                minor_cross,
            };
            (Some(first), None, CsRoute::Cross)
        }
        Ending::Second => {
            let newprop = newprop_rhs(&seq, &w, &phi, &arcs, r)?;
            let lo = kq0.floor() as u64 + 1;
            let hi = r.floor() as u64;
            let corr = smoothed_correlations(&sums, lo, hi);
            let cutoff = r * nf.powf(-config.delta / 4.0);
            let mut alt = Vec::new();
            let mut smooth = Vec::new();
            for (q, c) in (lo..=hi).zip(&corr) {
                let qf = q as f64;
                let t = divisor_function(k - 1, q) as f64 / qf
                    * (euler_phi(q) as f64 / qf * (r / qf).ln()).powi(k as i32 - 1)
                    * c.abs();
                alt.push(t);
                if qf <= cutoff
                    && is_squarefree(q)
                    && ramdkeval_admissible(q, nf, config.delta, DEFAULT_SMOOTHNESS)
                {
                    smooth.push(t);
                }
            }
            extra.push(Link::new(
                "newprop rhs ≤ ∫_m|DD̃| + C·B·R·N^(1/2+ε)",
                newprop.value,
                cs.abs_product,
                cs.abs_product_error + NEWPROP_ALLOWANCE * newprop.slack_term,
            ));
            let second = SecondEnding {
                altpr1_rhs: pairwise_sum(&alt),
                smooth_rhs: pairwise_sum(&smooth),
                smooth_count: smooth.len(),
                smoothness: DEFAULT_SMOOTHNESS,
                abs_product: cs.abs_product,
                abs_product_error: cs.abs_product_error,
                newprop,
            };
            plot = crate::variance::variance_profile(
                &seq,
                config.q0.floor() as u64 + 1,
                config.q.floor() as u64,
            )
            .into_iter()
            .enumerate()
            .map(|(i, v)| ((config.q0.floor() as u64 + 1 + i as u64) as f64, v))
            .collect();
            (None, Some(second), CsRoute::AbsProduct)
        }
    };
    let scale = config.q * nf * l.powi((k * k - 1) as i32);
    let mut warnings = arcs.warnings();
    warnings.extend(config.clips.iter().cloned());
    let name = match ending {
        Ending::First => "theorem2-first",
        Ending::Second => "theorem2-second",
    };
    let report = BoundReport::assemble(
        name,
        &format!("d{k}"),
        &config,
        &p,
        &cs,
        route,
        scale,
        extra,
        warnings,
    );
    let summary = Theorem2Summary {
        ending,
        k,
        r,
        ratio: report.final_lower_bound / scale,
        singular_constant: singular.c_k,
        dk_square_sum,
        first,
        second,
    };
    Ok(Theorem2Run {
        report,
        summary,
        plot,
    })
}
