//! Certified integrals over the major and minor arcs, computed cell by cell on the
//! spectrum grid. A cell is the interval of width 1/T centred at t/T and belongs to
//! the arc set that contains its centre. Interior cells carry the midpoint-rule error
//! of the integrand; cells that contain an arc endpoint are charged their full mass.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::arcs::{classify_grid, ArcClassification, ArcSystem};
use super::spectrum::{LocalBounds, Spectrum};
use crate::error::{invalid, Result};

const CHUNK: usize = 1 << 15;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ArcIntegral {
    pub value: f64,
    pub error_bound: f64,
    pub major_value: f64,
    pub major_error_bound: f64,
    /// Full-circle trapezoid sum; equals Σ|a_n|² up to rounding.
    pub total: f64,
    /// total − major_value
    pub complement_value: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CrossIntegral {
    pub value: Complex64,
    pub error_bound: f64,
    pub major_value: Complex64,
    pub major_error_bound: f64,
    /// Full-circle trapezoid sum; equals Σ a_n conj(b_n) up to rounding.
    pub total: Complex64,
    pub complement_value: Complex64,
}

struct Cell {
    value: Complex64,
    interior: f64,
    boundary: f64,
}

#[derive(Default, Clone, Copy)]
struct Acc {
    minor: Complex64,
    major: Complex64,
    minor_err: f64,
    major_err: f64,
}

impl Acc {
    fn merge(self, o: Acc) -> Acc {
        Acc {
            minor: self.minor + o.minor,
            major: self.major + o.major,
            minor_err: self.minor_err + o.minor_err,
            major_err: self.major_err + o.major_err,
        }
    }
}

/// Chunks are reduced in index order so results do not depend on the thread count.
fn partition<F>(class: &ArcClassification, cell: F) -> Acc
where
    F: Fn(usize) -> Cell + Sync,
{
    let t = class.t;
    let h = 1.0 / t as f64;
    let chunks: Vec<Acc> = (0..t.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = Acc::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(t) {
                let Cell {
                    value,
                    interior,
                    boundary,
                } = cell(i);
                let err = if class.boundary[i] {
                    boundary
                } else {
                    interior
                };
                if class.major[i] {
                    acc.major += value * h;
                    acc.major_err += err;
                } else {
                    acc.minor += value * h;
                    acc.minor_err += err;
                }
            }
            acc
        })
        .collect();
    pairwise(&chunks)
}

fn pairwise(xs: &[Acc]) -> Acc {
    match xs.len() {
        0 => Acc::default(),
        1 => xs[0],
        n => pairwise(&xs[..n / 2]).merge(pairwise(&xs[n / 2..])),
    }
}

fn check_grid(spec: &Spectrum, class: &ArcClassification) -> Result<()> {
    if class.t != spec.grid_size() {
        return Err(invalid(format!(
            "classification has T = {} but the spectrum has T = {}",
            class.t,
            spec.grid_size()
        )));
    }
    Ok(())
}

/// Midpoint error of a cell of width h for an integrand with |f''| ≤ m2.
fn midpoint_error(h: f64, m2: f64) -> f64 {
    h * h * h / 24.0 * m2
}

/// ∫_𝔪 |A(α)|² dα with a certified error bound.
pub fn minor_arc_integral(spec: &Spectrum, arcs: &ArcSystem) -> Result<ArcIntegral> {
    let class = classify_grid(arcs, spec.grid_size())?;
    minor_arc_integral_on(spec, &class)
}

pub fn minor_arc_integral_on(spec: &Spectrum, class: &ArcClassification) -> Result<ArcIntegral> {
    check_grid(spec, class)?;
    let h = 1.0 / spec.grid_size() as f64;
    let acc = partition(class, |i| {
        let LocalBounds { s0, s1, s2 } = spec.local_bounds(i);
        Cell {
            value: Complex64::new(spec.power()[i], 0.0),
            interior: midpoint_error(h, 2.0 * s2 * s0 + 2.0 * s1 * s1),
            boundary: h * s0 * s0,
        }
    });
    let total = acc.minor.re + acc.major.re;
    Ok(ArcIntegral {
        value: acc.minor.re,
        error_bound: acc.minor_err,
        major_value: acc.major.re,
        major_error_bound: acc.major_err,
        total,
        complement_value: total - acc.major.re,
    })
}

/// ∫_𝔪 A(α) conj(B(α)) dα for two spectra on the same grid.
pub fn minor_arc_cross(a: &Spectrum, b: &Spectrum, arcs: &ArcSystem) -> Result<CrossIntegral> {
    let class = classify_grid(arcs, a.grid_size())?;
    minor_arc_cross_on(a, b, &class)
}

pub fn minor_arc_cross_on(
    a: &Spectrum,
    b: &Spectrum,
    class: &ArcClassification,
) -> Result<CrossIntegral> {
    check_grid(a, class)?;
    check_grid(b, class)?;
    let h = 1.0 / a.grid_size() as f64;
    let acc = partition(class, |i| {
        let la = a.local_bounds(i);
        let lb = b.local_bounds(i);
        let m2 = la.s2 * lb.s0 + 2.0 * la.s1 * lb.s1 + la.s0 * lb.s2;
        Cell {
            value: a.value(i) * b.value(i).conj(),
            interior: midpoint_error(h, m2),
            // both the discrete and the true contribution are bounded by h·sup|AB|
            boundary: 2.0 * h * la.s0 * lb.s0,
        }
    });
    let total = acc.minor + acc.major;
    Ok(CrossIntegral {
        value: acc.minor,
        error_bound: acc.minor_err,
        major_value: acc.major,
        major_error_bound: acc.major_err,
        total,
        complement_value: total - acc.major,
    })
}

/// ∫_𝔪 |A(α) B(α)| dα. The integrand is only Lipschitz, so interior cells carry L·h²/4.
pub fn minor_arc_abs_product(a: &Spectrum, b: &Spectrum, arcs: &ArcSystem) -> Result<ArcIntegral> {
    let class = classify_grid(arcs, a.grid_size())?;
    minor_arc_abs_product_on(a, b, &class)
}

pub fn minor_arc_abs_product_on(
    a: &Spectrum,
    b: &Spectrum,
    class: &ArcClassification,
) -> Result<ArcIntegral> {
    check_grid(a, class)?;
    check_grid(b, class)?;
    let h = 1.0 / a.grid_size() as f64;
    let acc = partition(class, |i| {
        let la = a.local_bounds(i);
        let lb = b.local_bounds(i);
        let lip = la.s1 * lb.s0 + la.s0 * lb.s1;
        Cell {
            value: Complex64::new(a.value(i).norm() * b.value(i).norm(), 0.0),
            interior: lip * h * h / 4.0,
            boundary: h * la.s0 * lb.s0,
        }
    });
    let total = acc.minor.re + acc.major.re;
    Ok(ArcIntegral {
        value: acc.minor.re,
        error_bound: acc.minor_err,
        major_value: acc.major.re,
        major_error_bound: acc.major_err,
        total,
        complement_value: total - acc.major.re,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{sieve_all, Sequence};
    use crate::circle::spectrum::build_spectrum;

    #[test]
    fn theorem_scale_arcs_at_desk_size_are_all_major() {
        // K = (log N)², Q = N^{3/4}, Q0 clipped to [1, Q/K²] at N = 10^4
        let n = 10_000usize;
        let nf = n as f64;
        let q = nf.powf(0.75);
        let k = nf.ln().powi(2);
        let q0 = (nf * nf.ln().powi(10) / q).min(q / (k * k)).max(1.0);
        let arcs = ArcSystem::new(k, q0, q, n as u64).unwrap();
        assert!(arcs.covers_circle());
        let s = sieve_all(n, 2).unwrap().lambda_sequence();
        let r = minor_arc_integral(&build_spectrum(&s, 1 << 15).unwrap(), &arcs).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn everything_major_gives_zero() {
        let s = Sequence::from_ints("one", vec![1; 100]).unwrap();
        let sp = build_spectrum(&s, 256).unwrap();
        let arcs = ArcSystem::new(5.0, 128.0, 100.0, 100).unwrap();
        let r = minor_arc_integral(&sp, &arcs).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.error_bound, 0.0);
        assert!((r.major_value - 100.0).abs() < 1e-9);
    }

    #[test]
    fn parseval_partition() {
        let table = sieve_all(2000, 3).unwrap();
        for s in [
            table.lambda_sequence(),
            table.dk_sequence(2),
            table.dk_sequence(3),
        ] {
            let sp = build_spectrum(&s, 1 << 15).unwrap();
            let arcs = ArcSystem::new(5.0, 3.0, 500.0, 2000).unwrap();
            let r = minor_arc_integral(&sp, &arcs).unwrap();
            let exact = s.sum_squares();
            assert!((r.value + r.major_value - exact).abs() <= 1e-9 * exact);
            assert!((r.complement_value - r.value).abs() <= 1e-9 * exact);
            assert!(r.value > 0.0 && r.error_bound < r.value);
        }
    }

    #[test]
    fn refinement_within_error_bounds() {
        let s = sieve_all(10_000, 2).unwrap().lambda_sequence();
        let arcs = ArcSystem::new(5.0, 4.0, 1000.0, 10_000).unwrap();
        assert!(!arcs.covers_circle());
        let t = 1 << 18;
        let coarse = minor_arc_integral(&build_spectrum(&s, t).unwrap(), &arcs).unwrap();
        let fine = minor_arc_integral(&build_spectrum(&s, 4 * t).unwrap(), &arcs).unwrap();
        let diff = (coarse.value - fine.value).abs();
        assert!(
            diff <= coarse.error_bound + fine.error_bound,
            "diff {diff}, bounds {} + {}",
            coarse.error_bound,
            fine.error_bound
        );
        assert!(fine.error_bound <= coarse.error_bound);
    }

    #[test]
    fn cross_with_itself_is_the_square_integral() {
        let table = sieve_all(3000, 2).unwrap();
        let s = table.dk_sequence(2);
        let sp = build_spectrum(&s, 1 << 16).unwrap();
        let arcs = ArcSystem::new(5.0, 2.0, 1000.0, 3000).unwrap();
        let sq = minor_arc_integral(&sp, &arcs).unwrap();
        let cr = minor_arc_cross(&sp, &sp, &arcs).unwrap();
        let ab = minor_arc_abs_product(&sp, &sp, &arcs).unwrap();
        assert!((cr.value.re - sq.value).abs() < 1e-9 * sq.value);
        assert!(cr.value.im.abs() < 1e-9 * sq.value);
        assert!((ab.value - sq.value).abs() < 1e-9 * sq.value);
    }

    #[test]
    fn cross_total_is_inner_product() {
        let table = sieve_all(3000, 2).unwrap();
        let a = table.lambda_sequence();
        let b = table.dk_sequence(2);
        let sa = build_spectrum(&a, 1 << 14).unwrap();
        let sb = build_spectrum(&b, 1 << 14).unwrap();
        let arcs = ArcSystem::new(5.0, 2.0, 1000.0, 3000).unwrap();
        let cr = minor_arc_cross(&sa, &sb, &arcs).unwrap();
        let inner = a.dot(&b);
        assert!((cr.total.re - inner).abs() < 1e-8 * inner);
        assert!(cr.total.im.abs() < 1e-8 * inner);
        let ab = minor_arc_abs_product(&sa, &sb, &arcs).unwrap();
        assert!(ab.value + ab.error_bound >= cr.value.norm() - cr.error_bound);
    }
}
