//! A(t/T) on a uniform grid by zero-padded FFT, together with A' and A'' and
//! global derivative bounds used to certify quadrature over grid cells.

use std::f64::consts::{PI, TAU};
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::arith::Sequence;
use crate::error::{invalid, Error, Result};

/// Bytes per grid point: three complex arrays plus the power spectrum.
const BYTES_PER_POINT: u64 = 3 * 16 + 8;
pub const DEFAULT_SPECTRUM_BUDGET: u64 = 2 << 30;

#[derive(Debug, Clone)]
pub struct Spectrum {
    n: usize,
    t: usize,
    values: Vec<Complex64>,
    first: Vec<Complex64>,
    second: Vec<Complex64>,
    power: Vec<f64>,
    sum_sq: f64,
    /// sup |A'| ≤ 2π N Σ|a_n|
    pub derivative_bound: f64,
    /// sup |A'''| ≤ (2π)³ Σ n³ |a_n|
    pub third_derivative_bound: f64,
}

/// Smallest power of two ≥ 16N.
pub fn default_grid_size(n: usize) -> usize {
    (16 * n).next_power_of_two()
}

pub fn build_spectrum(seq: &Sequence, t: usize) -> Result<Spectrum> {
    build_spectrum_with_budget(seq, t, DEFAULT_SPECTRUM_BUDGET)
}

pub fn build_spectrum_with_budget(seq: &Sequence, t: usize, budget: u64) -> Result<Spectrum> {
    let n = seq.len();
    if !t.is_power_of_two() {
        return Err(invalid(format!("grid size T = {t} is not a power of two")));
    }
    if t < 2 * n {
        return Err(invalid(format!(
            "grid size T = {t} must be at least 2N = {}",
            2 * n
        )));
    }
    let need = t as u64 * BYTES_PER_POINT;
    if need > budget {
        return Err(Error::Capacity {
            what: "spectrum memory (bytes)",
            requested: need,
            limit: budget,
        });
    }
    let mut planner = FftPlanner::<f64>::new();
    // e(+nt/T) is the inverse direction in rustfft's convention
    let fft = planner.plan_fft_inverse(t);
    let transform = |weight: &dyn Fn(usize) -> Complex64| {
        let mut buf = vec![Complex64::new(0.0, 0.0); t];
        for (i, &a) in seq.values().iter().enumerate() {
            if a != 0.0 {
                buf[i + 1] = a * weight(i + 1);
            }
        }
        fft.process(&mut buf);
        buf
    };
    let values = transform(&|_| Complex64::new(1.0, 0.0));
    let first = transform(&|n| Complex64::new(0.0, TAU * n as f64));
    let second = transform(&|n| Complex64::new(-(TAU * n as f64).powi(2), 0.0));
    let power: Vec<f64> = values.iter().map(|z| z.norm_sqr()).collect();
    let sum_sq = seq.sum_squares();
    let sum_abs = seq.sum_abs();
    let cube: f64 = seq
        .nonzero()
        .map(|(k, a)| (k as f64).powi(3) * a.abs())
        .sum();
    Ok(Spectrum {
        n,
        t,
        values,
        first,
        second,
        power,
        sum_sq,
        derivative_bound: TAU * n as f64 * sum_abs,
        third_derivative_bound: (2.0 * PI).powi(3) * cube,
    })
}

impl Spectrum {
    pub fn grid_size(&self) -> usize {
        self.t
    }

    pub fn sequence_len(&self) -> usize {
        self.n
    }

    pub fn value(&self, t: usize) -> Complex64 {
        self.values[t]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn power(&self) -> &[f64] {
        &self.power
    }

    /// Σ |a_n|², the exact total mass.
    pub fn sum_sq(&self) -> f64 {
        self.sum_sq
    }

    /// Trapezoid rule (1/T) Σ_t |A(t/T)|² over the full circle.
    pub fn total_mass(&self) -> f64 {
        crate::numeric::pairwise_sum(&self.power) / self.t as f64
    }

    /// Upper bounds for |A|, |A'|, |A''| on the cell of width 1/T centred at t/T.
    pub fn local_bounds(&self, t: usize) -> LocalBounds {
        let h = 0.5 / self.t as f64;
        let s2 = self.second[t].norm() + h * self.third_derivative_bound;
        let s1 = self.first[t].norm() + h * s2;
        let s0 = self.values[t].norm() + h * s1;
        LocalBounds { s0, s1, s2 }
    }

    /// Raw export: T as u64 little-endian, then T little-endian f64 values of |A(t/T)|².
    pub fn write_power(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(&(self.t as u64).to_le_bytes())?;
        for p in &self.power {
            f.write_all(&p.to_le_bytes())?;
        }
        f.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LocalBounds {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
}

pub fn read_power(path: &Path) -> Result<(u64, Vec<f64>)> {
    let bytes = std::fs::read(path)?;
    if bytes.len() < 8 {
        return Err(invalid("spectrum file too short"));
    }
    let t = u64::from_le_bytes(bytes[..8].try_into().unwrap());
    let body = &bytes[8..];
    if body.len() as u64 != 8 * t {
        return Err(invalid("spectrum file length does not match its header"));
    }
    let vals = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((t, vals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sieve_all;
    use crate::circle::expsum::eval_exp_sum_grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_sequence() {
        let s = Sequence::from_ints("one", vec![1; 4]).unwrap();
        let sp = build_spectrum(&s, 8).unwrap();
        assert!((sp.power()[0] - 16.0).abs() < 1e-12);
        assert!((sp.total_mass() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_sizes() {
        let s = Sequence::from_ints("one", vec![1; 10]).unwrap();
        assert!(build_spectrum(&s, 16).is_err());
        assert!(build_spectrum(&s, 24).is_err());
        assert!(matches!(
            build_spectrum_with_budget(&s, 1 << 10, 100),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn parseval_and_spot_checks() {
        let table = sieve_all(10_000, 2).unwrap();
        let s = table.dk_sequence(2);
        let sp = build_spectrum(&s, 1 << 18).unwrap();
        let direct: f64 = s.values().iter().map(|v| v * v).sum();
        assert!((sp.total_mass() - direct).abs() <= 1e-6 * direct);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let t = rng.gen_range(0..sp.grid_size());
            let z = eval_exp_sum_grid(&s, t as u64, sp.grid_size() as u64);
            assert!((z - sp.value(t)).norm() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn derivative_grids_match_finite_differences() {
        let s = Sequence::from_reals("x", (1..=50).map(|n| (n as f64).sqrt()).collect()).unwrap();
        let sp = build_spectrum(&s, 1 << 12).unwrap();
        let t = 777usize;
        let alpha = t as f64 / sp.grid_size() as f64;
        let h = 1e-6;
        let f = |x: f64| crate::circle::expsum::eval_exp_sum(&s, x);
        let d1 = (f(alpha + h) - f(alpha - h)) / (2.0 * h);
        assert!((d1 - sp.first[t]).norm() < 1e-4 * sp.first[t].norm().max(1.0));
        let b = sp.local_bounds(t);
        assert!(b.s0 >= sp.value(t).norm() && b.s1 >= sp.first[t].norm());
    }

    #[test]
    fn export_roundtrip() {
        let s = Sequence::from_ints("one", vec![1, 2, 3]).unwrap();
        let sp = build_spectrum(&s, 8).unwrap();
        let path = std::env::temp_dir().join(format!("apvar-spec-{}.bin", std::process::id()));
        sp.write_power(&path).unwrap();
        let (t, v) = read_power(&path).unwrap();
        assert_eq!(t, 8);
        assert_eq!(v, sp.power());
        std::fs::remove_file(&path).ok();
    }
}
