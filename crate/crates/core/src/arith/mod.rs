pub mod cache;
pub mod exact;
pub mod factor;
pub mod ramanujan;
pub mod sequence;
pub mod sieve;

pub use exact::{gen_binomial, ExactScalar, Scalar};
pub use ramanujan::{
    ramanujan_correlation, ramanujan_sum, ramanujan_sum_direct, DivisorSums, RamanujanRow,
};
pub use sequence::Sequence;
pub use sieve::{sieve_all, SieveConfig, SieveTable};
