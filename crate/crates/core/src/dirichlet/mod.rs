//! Dirichlet-series predictions: ζ near s = 1, the Euler products F_q and G_q, contour
//! residues, the singular constant for Σ d_k(n)², and the closed-form residue polynomial.

pub mod euler;
pub mod fq;
pub mod polynomial;
pub mod residue;
pub mod singular;
pub mod zeta;

pub use euler::{euler_f_q, euler_g_q, LocalFactorSet};
pub use fq::{check_fq1_bound, f_q_log_derivatives};
pub use polynomial::{choose_r_chebyshev, polynomial_69};
pub use residue::{
    residue_divisor_mean, residue_dk_correlation, residue_dk_correlation_smooth, residue_ramdkeval,
    ResiduePrediction,
};
pub use singular::singular_constant;
pub use zeta::{zeta, zeta_near_one};
