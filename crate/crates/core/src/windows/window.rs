//! The smooth window Φ and its Fourier transform.
//!
//! Φ(t) = ρ(t/ε)·ρ((1−t)/ε) with ρ the C^∞ step built from exp(−1/x). It vanishes
//! to infinite order at 0 and 1, equals 1 on [ε, 1−ε], and ∫Φ = 1 − ε exactly.
//! Since Φ is symmetric about 1/2, Φ̂(ξ) = e(−ξ/2)·C(ξ) with C real and even.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::numeric::CompositeRule;

const RAMP_PANELS: usize = 24;
const ORDER: usize = 16;
/// Table step for C(ξ); cubic interpolation on this grid is accurate to ~1e-11.
pub const TABLE_STEP: f64 = 1.0 / 512.0;
pub const DEFAULT_XI_MAX: f64 = 64.0;

/// The C^∞ step: 0 for x ≤ 0, 1 for x ≥ 1.
pub fn rho(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let u = 1.0 / x - 1.0 / (1.0 - x);
        1.0 / (1.0 + u.exp())
    }
}

pub fn rho_prime(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        let r = rho(x);
        r * (1.0 - r) * (1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x)))
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecayConstant {
    pub a: u32,
    pub c: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowMoments {
    pub epsilon: f64,
    pub integral: f64,
    pub integral_sq: f64,
    pub xi_max: f64,
    pub decay: Vec<DecayConstant>,
}

#[derive(Debug, Clone)]
pub struct SmoothWindow {
    eps: f64,
    ramp: CompositeRule,
    ramp_rho: Vec<f64>,
    ramp_rho_prime: Vec<f64>,
    table: Vec<f64>,
    xi_max: f64,
    integral: f64,
    integral_sq: f64,
    decay: Vec<DecayConstant>,
}

pub fn build_window(eps: f64) -> Result<SmoothWindow> {
    SmoothWindow::new(eps, DEFAULT_XI_MAX)
}

impl SmoothWindow {
    pub fn new(eps: f64, xi_max: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 0.25) {
            return Err(invalid(format!(
                "window parameter ε = {eps} must lie in (0, 1/4)"
            )));
        }
        if !(xi_max >= 1.0 && xi_max <= 4096.0) {
            return Err(invalid(format!(
                "tabulation range {xi_max} outside [1, 4096]"
            )));
        }
        let ramp = CompositeRule::new(0.0, 1.0, RAMP_PANELS, ORDER);
        let ramp_rho = ramp.nodes.iter().map(|&x| rho(x)).collect();
        let ramp_rho_prime = ramp.nodes.iter().map(|&x| rho_prime(x)).collect();
        let mut w = Self {
            eps,
            ramp,
            ramp_rho,
            ramp_rho_prime,
            table: Vec::new(),
            xi_max,
            integral: 0.0,
            integral_sq: 0.0,
            decay: Vec::new(),
        };
        let ramp_int: f64 = w
            .ramp
            .weights
            .iter()
            .zip(&w.ramp_rho)
            .map(|(a, r)| a * r)
            .sum();
        let ramp_sq: f64 = w
            .ramp
            .weights
            .iter()
            .zip(&w.ramp_rho)
            .map(|(a, r)| a * r * r)
            .sum();
        w.integral = 1.0 - 2.0 * eps + 2.0 * eps * ramp_int;
        w.integral_sq = 1.0 - 2.0 * eps + 2.0 * eps * ramp_sq;

        let n = (xi_max / TABLE_STEP).round() as usize;
        w.table = (0..=n + 2)
            .map(|i| w.c_direct(i as f64 * TABLE_STEP))
            .collect();

        // decay constants: max of |Φ̂(ξ)|(1+ξ)^A over the table and a sparser grid out to 16·ξ_max
        let mut maxes = [0.0f64; 3];
        let powers = [1, 2, 4];
        let mut record = |xi: f64, c: f64| {
            for (m, &a) in maxes.iter_mut().zip(&powers) {
                *m = m.max(c.abs() * (1.0 + xi).powi(a));
            }
        };
        for (i, &c) in w.table.iter().enumerate() {
            record(i as f64 * TABLE_STEP, c);
        }
        let mut xi = xi_max;
        while xi <= 16.0 * xi_max {
            record(xi, w.c_direct(xi));
            xi += 0.125;
        }
        w.decay = powers
            .iter()
            .zip(maxes)
            .map(|(&a, c)| DecayConstant { a: a as u32, c })
            .collect();
        Ok(w)
    }

    pub fn epsilon(&self) -> f64 {
        self.eps
    }

    pub fn phi(&self, t: f64) -> f64 {
        if t <= 0.0 || t >= 1.0 {
            0.0
        } else {
            rho(t / self.eps) * rho((1.0 - t) / self.eps)
        }
    }

    /// ∫₀¹ Φ.
    pub fn integral(&self) -> f64 {
        self.integral
    }

    /// ∫₀¹ Φ².
    pub fn integral_sq(&self) -> f64 {
        self.integral_sq
    }

    pub fn xi_max(&self) -> f64 {
        self.xi_max
    }

    pub fn decay_constants(&self) -> &[DecayConstant] {
        &self.decay
    }

    pub fn decay_constant(&self, a: u32) -> Option<f64> {
        self.decay.iter().find(|d| d.a == a).map(|d| d.c)
    }

    pub fn moments(&self) -> WindowMoments {
        WindowMoments {
            epsilon: self.eps,
            integral: self.integral,
            integral_sq: self.integral_sq,
            xi_max: self.xi_max,
            decay: self.decay.clone(),
        }
    }

    /// Φ̂(ξ) = ∫ Φ(t) e(−ξt) dt.
    pub fn phi_hat(&self, xi: f64) -> Complex64 {
        Complex64::from_polar(1.0, -PI * xi) * self.c(xi)
    }

    /// The real amplitude C(ξ) = e(ξ/2)·Φ̂(ξ); |Φ̂| = |C|.
    pub fn c(&self, xi: f64) -> f64 {
        let x = xi.abs();
        let pos = x / TABLE_STEP;
        let i = pos.floor() as usize;
        if i + 2 >= self.table.len() {
            return self.c_direct(x);
        }
        // 4-point Lagrange on i-1..i+2, mirrored through 0 since C is even
        let at = |j: isize| self.table[j.unsigned_abs()];
        let t = pos - i as f64;
        let i = i as isize;
        let (f0, f1, f2, f3) = (at(i - 1), at(i), at(i + 1), at(i + 2));
        let l0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
        let l1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        let l2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
        let l3 = (t + 1.0) * t * (t - 1.0) / 6.0;
        l0 * f0 + l1 * f1 + l2 * f2 + l3 * f3
    }

    /// C(ξ) by quadrature over the two ramps.
    pub fn c_direct(&self, xi: f64) -> f64 {
        let xi = xi.abs();
        let eps = self.eps;
        let cycles = xi * eps;
        let finer;
        let (rule, rho_v, rho_p): (&CompositeRule, Option<&[f64]>, Option<&[f64]>) =
            if cycles <= RAMP_PANELS as f64 {
                (&self.ramp, Some(&self.ramp_rho), Some(&self.ramp_rho_prime))
            } else {
                finer = CompositeRule::new(0.0, 1.0, cycles.ceil() as usize + 8, ORDER);
                (&finer, None, None)
            };
        if xi < 1.0 {
            // plateau in closed form plus both ramps
            let plateau = if xi == 0.0 {
                1.0 - 2.0 * eps
            } else {
                (2.0 * PI * xi * (0.5 - eps)).sin() / (PI * xi)
            };
            let mut ramp = 0.0;
            for (j, (&x, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
                let r = rho_v.map_or_else(|| rho(x), |v| v[j]);
                ramp += w * r * (2.0 * PI * xi * (0.5 - eps * x)).cos();
            }
            plateau + 2.0 * eps * ramp
        } else {
            // integrated by parts: only ρ' on the ramps contributes, no cancellation of O(1) terms
            let mut acc = 0.0;
            for (j, (&x, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
                let rp = rho_p.map_or_else(|| rho_prime(x), |v| v[j]);
                acc += w * rp * (2.0 * PI * xi * (0.5 - eps * x)).sin();
            }
            acc / (PI * xi)
        }
    }

    /// ∫₀¹ Φ(y) y^{w−1} dy for complex w with Re(w) > 0.
    pub fn mellin(&self, w: Complex64) -> Complex64 {
        let eps = self.eps;
        let one = Complex64::new(1.0, 0.0);
        let plateau = ((1.0 - eps) * one).powc(w) / w - (eps * one).powc(w) / w;
        let mut left = Complex64::new(0.0, 0.0);
        let mut right = Complex64::new(0.0, 0.0);
        for (j, (&x, &wt)) in self.ramp.nodes.iter().zip(&self.ramp.weights).enumerate() {
            let r = self.ramp_rho[j];
            left += wt * r * (x * one).powc(w - 1.0);
            right += wt * r * ((1.0 - eps * x) * one).powc(w - 1.0);
        }
        plateau + (eps * one).powc(w) * left + eps * right
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn window() -> SmoothWindow {
        build_window(0.05).unwrap()
    }

    #[test]
    fn shape() {
        let w = window();
        assert_eq!(w.phi(0.0), 0.0);
        assert_eq!(w.phi(1.0), 0.0);
        assert_eq!(w.phi(-0.3), 0.0);
        assert_eq!(w.phi(0.5), 1.0);
        assert_eq!(w.phi(0.05), 1.0);
        for i in 0..=1000 {
            let v = w.phi(i as f64 / 1000.0);
            assert!((0.0..=1.0).contains(&v));
        }
        assert!((w.phi(0.3) - w.phi(0.7)).abs() < 1e-15);
    }

    #[test]
    fn moments() {
        let w = window();
        assert!((w.integral() - 0.95).abs() < 1e-13, "{}", w.integral());
        assert!(w.integral_sq() <= w.integral());
        // Φ̂(0) = ∫Φ
        assert!((w.phi_hat(0.0).re - w.integral()).abs() < 1e-13);
        // brute force ∫Φ² by a fine midpoint rule
        let m = 200_000;
        let brute: f64 = (0..m)
            .map(|i| w.phi((i as f64 + 0.5) / m as f64).powi(2))
            .sum::<f64>()
            / m as f64;
        assert!((brute - w.integral_sq()).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_epsilon() {
        assert!(build_window(0.0).is_err());
        assert!(build_window(0.25).is_err());
        assert!(build_window(-1.0).is_err());
    }

    #[test]
    fn transform_matches_brute_force() {
        let w = window();
        for &xi in &[0.3, 1.0, 2.5, 7.0, 19.75] {
            let m = 400_000;
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..m {
                let t = (i as f64 + 0.5) / m as f64;
                acc += w.phi(t) * Complex64::from_polar(1.0, -2.0 * PI * xi * t);
            }
            acc /= m as f64;
            assert!((acc - w.phi_hat(xi)).norm() < 1e-9, "xi = {xi}");
        }
    }

    #[test]
    fn interpolation_matches_direct_quadrature() {
        let w = window();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let xi: f64 = rng.gen_range(0.0..w.xi_max());
            assert!((w.c(xi) - w.c_direct(xi)).abs() < 1e-10, "xi = {xi}");
        }
        // the two quadrature branches agree where they meet
        let below = w.c_direct(1.0 - 1e-12);
        assert!((below - w.c_direct(1.0)).abs() < 1e-12);
    }

    #[test]
    fn decay_constants_hold() {
        let w = window();
        let c4 = w.decay_constant(4).unwrap();
        assert!(w.c(100.0).abs() * 101f64.powi(4) <= c4);
        let c1 = w.decay_constant(1).unwrap();
        for i in 0..2000 {
            let xi = i as f64 * 0.37;
            assert!(w.c(xi).abs() * (1.0 + xi) <= c1 * (1.0 + 1e-9) + 1e-12);
        }
    }

    #[test]
    fn mellin_at_one_is_integral() {
        let w = window();
        let v = w.mellin(Complex64::new(1.0, 0.0));
        assert!((v.re - w.integral()).abs() < 1e-13 && v.im.abs() < 1e-15);
        // w = 2: ∫ y Φ(y) dy = (1/2)∫Φ by symmetry
        let v2 = w.mellin(Complex64::new(2.0, 0.0));
        assert!((v2.re - 0.5 * w.integral()).abs() < 1e-13);
    }
}
