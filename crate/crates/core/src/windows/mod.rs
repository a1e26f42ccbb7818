//! The smooth window Φ, sieve weights b_r and the auxiliary sequence ã_n.

pub mod lemmas;
pub mod tilde;
pub mod weights;
pub mod window;

pub use tilde::build_tilde_sequence;
pub use weights::{build_weights, WeightKind, WeightSet};
pub use window::{build_window, SmoothWindow};
