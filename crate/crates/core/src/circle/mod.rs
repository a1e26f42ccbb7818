//! Exponential sums on the circle, the major/minor arc decomposition and certified
//! arc integrals.

pub mod arcs;
pub mod expsum;
pub mod farey;
pub mod integrals;
pub mod spectrum;

pub use arcs::{classify_grid, ArcClassification, ArcSystem};
pub use expsum::{eval_exp_sum, eval_exp_sum_grid};
pub use farey::{diophantine_witness, farey_density_f, farey_lower_bound};
pub use integrals::{
    minor_arc_abs_product, minor_arc_abs_product_on, minor_arc_cross, minor_arc_cross_on,
    minor_arc_integral, minor_arc_integral_on, ArcIntegral, CrossIntegral,
};
pub use spectrum::{build_spectrum, default_grid_size, Spectrum};
