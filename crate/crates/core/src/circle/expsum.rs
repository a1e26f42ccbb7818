use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::arith::Sequence;

/// Fractional part of n·α, with the rounding error of the product recovered by an FMA.
pub fn frac_mul(n: f64, alpha: f64) -> f64 {
    let x = n * alpha;
    let err = n.mul_add(alpha, -x);
    let f = (x - x.floor()) + err;
    f - f.floor()
}

/// A(α) = Σ_{n ≤ N} a_n e(nα), with compensated accumulation of both parts.
pub fn eval_exp_sum(seq: &Sequence, alpha: f64) -> Complex64 {
    let mut re = Neumaier::default();
    let mut im = Neumaier::default();
    for (n, a) in seq.nonzero() {
        let (s, c) = (TAU * frac_mul(n as f64, alpha)).sin_cos();
        re.add(a * c);
        im.add(a * s);
    }
    Complex64::new(re.total(), im.total())
}

/// A(t/T) with the phase n·t reduced modulo T in integer arithmetic.
pub fn eval_exp_sum_grid(seq: &Sequence, t: u64, big_t: u64) -> Complex64 {
    let mut re = Neumaier::default();
    let mut im = Neumaier::default();
    for (n, a) in seq.nonzero() {
        let r = (n as u128 * t as u128 % big_t as u128) as f64;
        let (s, c) = (TAU * r / big_t as f64).sin_cos();
        re.add(a * c);
        im.add(a * s);
    }
    Complex64::new(re.total(), im.total())
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    c: f64,
}

impl Neumaier {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.c += (self.sum - t) + v;
        } else {
            self.c += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.c
    }
}
