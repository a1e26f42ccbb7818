//! Small-integer factorization helpers built on trial division.
//!
//! These are used where a sieve table would be overkill: moduli q, local
//! factors of Euler products, and weight ranges. Everything here is exact.

use num_integer::Integer;

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Prime factorization as `(p, e)` pairs with `p` increasing. `factorize(1)` is empty.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "factorize(0)");
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// All positive divisors of `n`, sorted increasingly.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factorize(n) {
        let len = divs.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

pub fn mobius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(1, |acc, (p, e)| acc * (p - 1) * p.pow(e - 1))
}

pub fn is_squarefree(n: u64) -> bool {
    n > 0 && factorize(n).iter().all(|&(_, e)| e == 1)
}

/// d_k(p^e) = C(e + k - 1, k - 1); independent of p.
pub fn dk_prime_power(k: u32, e: u32) -> u64 {
    binomial(u64::from(e) + u64::from(k) - 1, u64::from(k) - 1)
}

/// d_k(n) from the factorization of n. `k = 1` gives 1.
pub fn divisor_function(k: u32, n: u64) -> u64 {
    assert!(k >= 1);
    factorize(n)
        .into_iter()
        .map(|(_, e)| dk_prime_power(k, e))
        .product()
}

pub fn binomial(n: u64, r: u64) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization_roundtrip() {
        for n in 1..2000u64 {
            let back: u64 = factorize(n).iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(back, n);
        }
    }

    #[test]
    fn divisors_of_small_numbers() {
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(49), vec![1, 7, 49]);
    }

    #[test]
    fn multiplicative_functions_against_brute_force() {
        for n in 1..500u64 {
            let phi = (1..=n).filter(|&a| gcd(a, n) == 1).count() as u64;
            assert_eq!(euler_phi(n), phi, "phi({n})");
            let d2 = (1..=n).filter(|&a| n % a == 0).count() as u64;
            assert_eq!(divisor_function(2, n), d2, "d({n})");
            let mu_sum: i64 = divisors(n).iter().map(|&d| mobius(d)).sum();
            assert_eq!(mu_sum, i64::from(n == 1));
        }
    }

    #[test]
    fn d3_is_convolution_of_d2() {
        for n in 1..300u64 {
            let conv: u64 = divisors(n).iter().map(|&d| divisor_function(2, d)).sum();
            assert_eq!(divisor_function(3, n), conv);
        }
    }
}
