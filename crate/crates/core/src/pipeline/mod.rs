//! End-to-end lower-bound chains: the variance sum against the minor-arc integral,
//! Cauchy–Schwarz through an auxiliary sequence, and the two divisor-function endings.

pub mod chain;
pub mod config;
pub mod report;
pub mod theorem1;
pub mod theorem2;

pub use chain::{
    cauchy_schwarz_bound, newprop_rhs, prop13_terms, ramanujan_tail, ramanujan_tail_exact,
    CauchySchwarz, Link, NewpropRhs, Prop13Terms,
};
pub use config::ExperimentConfig;
pub use report::{BoundReport, CsRoute, SCHEMA_VERSION};
pub use theorem1::{run_theorem1, run_theorem1_with, Theorem1Run, Theorem1Summary};
pub use theorem2::{run_theorem2, run_theorem2_with, Ending, Theorem2Run, Theorem2Summary};
