use serde::Serialize;

use super::chain::{CauchySchwarz, Link, Prop13Terms};
use super::config::ExperimentConfig;
use crate::arith::exact::format_real;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CsRoute {
    /// |∫_𝔪 A conj(Ã)|²/∫_𝔪|Ã|²
    Cross,
    /// (∫_𝔪|AÃ|)²/∫_𝔪|Ã|²
    AbsProduct,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub schema_version: u32,
    pub experiment: String,
    pub sequence: String,
    pub config: ExperimentConfig,
    pub lhs_variance_sum: f64,
    pub minor_integral: f64,
    pub minor_error: f64,
    pub major_integral: f64,
    pub ramanujan_tail: f64,
    pub slack: f64,
    pub large_sieve_term: f64,
    pub o_constant_fit: f64,
    pub o_constant_allowed: f64,
    pub cs_route: CsRoute,
    pub cs_numerator: f64,
    pub cs_denominator: f64,
    pub bound_17: f64,
    pub bound_113: f64,
    /// Q(1 − slack)·(certified Cauchy–Schwarz bound) − tail
    pub final_lower_bound: f64,
    pub comparison_target: f64,
    pub ratio_to_target: f64,
    pub links: Vec<Link>,
    pub chain_sound: bool,
    pub warnings: Vec<String>,
}

impl BoundReport {
    #[allow(clippy::too_many_arguments)]
    pub fn assemble(
        experiment: &str,
        sequence: &str,
        config: &ExperimentConfig,
        p: &Prop13Terms,
        cs: &CauchySchwarz,
        route: CsRoute,
        target: f64,
        extra_links: Vec<Link>,
        warnings: Vec<String>,
    ) -> Self {
        let (num, certified) = match route {
            CsRoute::Cross => (cs.cross_abs * cs.cross_abs, cs.bound_17_certified),
            CsRoute::AbsProduct => (cs.abs_product * cs.abs_product, cs.bound_113_certified),
        };
        let final_lower_bound = config.q * (1.0 - p.slack) * certified - p.ramanujan_tail;
        let mut links = vec![Link::new(
            "Q(1−slack)·∫_m|A|² − tail ≤ ΣV + C·NK/Q0·Σ|a|²",
            p.minor_bound,
            p.lhs_variance_sum,
            p.o_constant_allowed * p.large_sieve_term,
        )];
        links.extend(cs.links.iter().cloned());
        links.push(Link::new(
            "final bound ≤ ΣV + C·NK/Q0·Σ|a|²",
            final_lower_bound,
            p.lhs_variance_sum,
            p.o_constant_allowed * p.large_sieve_term,
        ));
        links.extend(extra_links);
        let chain_sound = links.iter().all(|l| l.holds);
        Self {
            schema_version: SCHEMA_VERSION,
            experiment: experiment.to_string(),
            sequence: sequence.to_string(),
            config: config.clone(),
            lhs_variance_sum: p.lhs_variance_sum,
            minor_integral: p.minor.value,
            minor_error: p.minor.error_bound,
            major_integral: p.minor.major_value,
            ramanujan_tail: p.ramanujan_tail,
            slack: p.slack,
            large_sieve_term: p.large_sieve_term,
            o_constant_fit: p.o_constant_fit,
            o_constant_allowed: p.o_constant_allowed,
            cs_route: route,
            cs_numerator: num,
            cs_denominator: cs.denominator,
            bound_17: cs.bound_17,
            bound_113: cs.bound_113,
            final_lower_bound,
            comparison_target: target,
            ratio_to_target: if target != 0.0 {
                final_lower_bound / target
            } else {
                0.0
            },
            links,
            chain_sound,
            warnings,
        }
    }

    pub fn csv_header() -> &'static str {
        "experiment,sequence,N,Q,K,Q0,R,epsilon,k,lhs_variance_sum,minor_integral,minor_error,ramanujan_tail,\
         bound_17,bound_113,final_lower_bound,comparison_target,ratio_to_target,o_constant_fit,chain_sound"
    }

    pub fn csv_row(&self) -> String {
        let c = &self.config;
        let reals = [
            c.q,
            c.big_k,
            c.q0,
            c.r,
            c.epsilon,
            self.lhs_variance_sum,
            self.minor_integral,
            self.minor_error,
            self.ramanujan_tail,
            self.bound_17,
            self.bound_113,
            self.final_lower_bound,
            self.comparison_target,
            self.ratio_to_target,
            self.o_constant_fit,
        ]
        .map(format_real);
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.experiment,
            self.sequence,
            c.n,
            reals[0],
            reals[1],
            reals[2],
            reals[3],
            reals[4],
            c.k,
            reals[5],
            reals[6],
            reals[7],
            reals[8],
            reals[9],
            reals[10],
            reals[11],
            reals[12],
            reals[13],
            reals[14],
            self.chain_sound
        )
    }
}
