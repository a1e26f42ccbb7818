//! Segmented sieve for Λ, μ, φ, d_j (2 ≤ j ≤ k) and the smallest prime factor.

use rayon::prelude::*;

use super::factor::dk_prime_power;
use super::sequence::Sequence;
use crate::error::{invalid, Error, Result};

pub const MAX_SEGMENT: usize = 1 << 22;

#[derive(Debug, Clone, Copy)]
pub struct SieveConfig {
    /// Upper bound on the bytes held by the finished tables.
    pub memory_budget: u64,
    pub segment_len: usize,
}

impl Default for SieveConfig {
    fn default() -> Self {
        Self {
            memory_budget: 3 << 30,
            segment_len: MAX_SEGMENT,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SieveTable {
    n_max: usize,
    k: u32,
    spf: Vec<u32>,
    lambda: Vec<f64>,
    mu: Vec<i8>,
    phi: Vec<u32>,
    /// `d[j - 2][n - 1]` = d_j(n)
    d: Vec<Vec<u32>>,
}

pub fn bytes_per_entry(k: u32) -> u64 {
    4 + 8 + 1 + 4 + 4 * u64::from(k - 1)
}

pub fn sieve_all(n: usize, k: u32) -> Result<SieveTable> {
    sieve_all_with(n, k, &SieveConfig::default())
}

pub fn sieve_all_with(n: usize, k: u32, cfg: &SieveConfig) -> Result<SieveTable> {
    if n == 0 {
        return Err(invalid("sieve length must be at least 1"));
    }
    if k < 2 {
        return Err(invalid(format!("k = {k}; divisor tables need k ≥ 2")));
    }
    if n > u32::MAX as usize {
        return Err(Error::Capacity {
            what: "sieve length",
            requested: n as u64,
            limit: u64::from(u32::MAX),
        });
    }
    let need = n as u64 * bytes_per_entry(k);
    if need > cfg.memory_budget {
        return Err(Error::Capacity {
            what: "sieve memory (bytes)",
            requested: need,
            limit: cfg.memory_budget,
        });
    }
    let seg = cfg.segment_len.clamp(1, MAX_SEGMENT).min(n);
    let primes = small_primes(isqrt(n as u64) as usize);

    let mut spf = vec![0u32; n];
    let mut lambda = vec![0f64; n];
    let mut mu = vec![0i8; n];
    let mut phi = vec![0u32; n];
    let mut d = vec![vec![0u32; n]; (k - 1) as usize];

    let mut d_chunks: Vec<std::slice::ChunksMut<'_, u32>> =
        d.iter_mut().map(|v| v.chunks_mut(seg)).collect();
    let mut segments = Vec::new();
    for (idx, (((spf, lambda), mu), phi)) in spf
        .chunks_mut(seg)
        .zip(lambda.chunks_mut(seg))
        .zip(mu.chunks_mut(seg))
        .zip(phi.chunks_mut(seg))
        .enumerate()
    {
        let d: Vec<&mut [u32]> = d_chunks.iter_mut().map(|c| c.next().unwrap()).collect();
        segments.push(Segment {
            lo: (idx * seg + 1) as u64,
            spf,
            lambda,
            mu,
            phi,
            d,
        });
    }
    segments.par_iter_mut().for_each(|s| s.fill(&primes, k));
    drop(segments);

    Ok(SieveTable {
        n_max: n,
        k,
        spf,
        lambda,
        mu,
        phi,
        d,
    })
}

struct Segment<'a> {
    lo: u64,
    spf: &'a mut [u32],
    lambda: &'a mut [f64],
    mu: &'a mut [i8],
    phi: &'a mut [u32],
    d: Vec<&'a mut [u32]>,
}

impl Segment<'_> {
    fn fill(&mut self, primes: &[u64], k: u32) {
        let len = self.spf.len();
        let lo = self.lo;
        let hi = lo + len as u64; // exclusive
        let mut rem: Vec<u64> = (lo..hi).collect();
        // number of distinct prime factors found so far, used for Λ
        let mut omega = vec![0u8; len];
        let mut last_p = vec![0u64; len];
        self.mu.fill(1);
        self.phi.fill(1);
        for dj in self.d.iter_mut() {
            dj.fill(1);
        }

        for &p in primes {
            if p * p >= hi {
                break;
            }
            let first = lo.div_ceil(p) * p;
            let mut m = first;
            while m < hi {
                let i = (m - lo) as usize;
                let mut e = 0u32;
                let mut pe = 1u64;
                while rem[i] % p == 0 {
                    rem[i] /= p;
                    e += 1;
                    pe *= p;
                }
                self.absorb(i, p, e, pe / p, k);
                omega[i] += 1;
                last_p[i] = p;
                m += p;
            }
        }
        for i in 0..len {
            if rem[i] > 1 {
                let p = rem[i];
                self.absorb(i, p, 1, 1, k);
                omega[i] += 1;
                last_p[i] = p;
            }
            if omega[i] == 1 {
                self.lambda[i] = (last_p[i] as f64).ln();
            } else {
                self.lambda[i] = 0.0;
            }
            if lo + i as u64 == 1 {
                self.spf[i] = 1;
            }
        }
    }

    /// Fold p^e ∥ n into the multiplicative tables; `pe1` = p^{e-1}.
    fn absorb(&mut self, i: usize, p: u64, e: u32, pe1: u64, k: u32) {
        if self.spf[i] == 0 {
            self.spf[i] = p as u32;
        }
        self.mu[i] = if e > 1 { 0 } else { -self.mu[i] };
        self.phi[i] *= ((p - 1) * pe1) as u32;
        for (j, dj) in (2..=k).zip(self.d.iter_mut()) {
            dj[i] *= dk_prime_power(j, e) as u32;
        }
    }
}

pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Primes up to `limit` by the plain sieve of Eratosthenes.
pub fn small_primes(limit: usize) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

impl SieveTable {
    pub fn len(&self) -> usize {
        self.n_max
    }

    pub fn is_empty(&self) -> bool {
        self.n_max == 0
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn spf(&self, n: usize) -> u32 {
        self.spf[n - 1]
    }

    pub fn lambda(&self, n: usize) -> f64 {
        self.lambda[n - 1]
    }

    pub fn mu(&self, n: usize) -> i8 {
        self.mu[n - 1]
    }

    pub fn phi(&self, n: usize) -> u32 {
        self.phi[n - 1]
    }

    /// d_j(n) for 2 ≤ j ≤ k; d_1 ≡ 1 is answered without a table.
    pub fn d(&self, j: u32, n: usize) -> u32 {
        assert!(
            j >= 1 && j <= self.k,
            "d_{j} not tabulated (k = {})",
            self.k
        );
        if j == 1 {
            1
        } else {
            self.d[(j - 2) as usize][n - 1]
        }
    }

    pub fn lambda_slice(&self) -> &[f64] {
        &self.lambda
    }

    pub fn mu_slice(&self) -> &[i8] {
        &self.mu
    }

    pub fn phi_slice(&self) -> &[u32] {
        &self.phi
    }

    pub fn spf_slice(&self) -> &[u32] {
        &self.spf
    }

    pub fn d_slice(&self, j: u32) -> &[u32] {
        assert!(j >= 2 && j <= self.k);
        &self.d[(j - 2) as usize]
    }

    /// Factorization read off the smallest-prime-factor table.
    pub fn factorize(&self, mut n: usize) -> Vec<(u64, u32)> {
        let mut out: Vec<(u64, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf(n) as usize;
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        out
    }

    pub fn lambda_sequence(&self) -> Sequence {
        Sequence::from_reals("lambda", self.lambda.clone()).expect("non-empty table")
    }

    pub fn dk_sequence(&self, j: u32) -> Sequence {
        let ints = self.d_slice(j).iter().map(|&v| i64::from(v)).collect();
        Sequence::from_ints(format!("d{j}"), ints).expect("non-empty table")
    }

    pub fn psi(&self) -> f64 {
        self.lambda.iter().sum()
    }

    pub(crate) fn from_parts(
        n_max: usize,
        k: u32,
        spf: Vec<u32>,
        lambda: Vec<f64>,
        mu: Vec<i8>,
        phi: Vec<u32>,
        d: Vec<Vec<u32>>,
    ) -> Self {
        Self {
            n_max,
            k,
            spf,
            lambda,
            mu,
            phi,
            d,
        }
    }

    pub(crate) fn parts(&self) -> (&[u32], &[f64], &[i8], &[u32], &[Vec<u32>]) {
        (&self.spf, &self.lambda, &self.mu, &self.phi, &self.d)
    }
}
