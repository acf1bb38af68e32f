//! Factorization: trial division for small inputs, Brent-cycle Pollard rho
//! with deterministic primality certification beyond that.

use std::sync::OnceLock;

use crate::arith::primality::{is_prime, mul_mod};
use crate::error::{Error, Result};

/// An integer together with its complete prime factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInteger {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    pub fn value(&self) -> u64 {
        self.value
    }

    /// (prime, exponent) pairs with primes strictly ascending.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Number of distinct prime divisors.
    pub fn omega(&self) -> u32 {
        self.factors.len() as u32
    }

    /// Number of prime divisors counted with multiplicity.
    pub fn big_omega(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    /// Count of d with d^2 dividing the value: multiplicative, with
    /// floor(e/2) + 1 at each prime power.
    pub fn tau_prime(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| (e / 2 + 1) as u64).product()
    }

    pub fn euler_phi(&self) -> u64 {
        let mut phi = self.value;
        for &(p, _) in &self.factors {
            phi = phi / p * (p - 1);
        }
        phi
    }

    /// All positive divisors, ascending.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let prev = divs.clone();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                divs.extend(prev.iter().map(|d| d * pk));
            }
        }
        divs.sort_unstable();
        divs
    }

    /// Largest exponent e with p^e dividing the value (0 if p is absent).
    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }
}

fn small_primes() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| crate::arith::sieve::simple_sieve(1024))
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Pollard rho with Brent cycle detection and batched gcds. Caller must
/// ensure n is odd and composite.
fn pollard_rho(n: u64) -> u64 {
    debug_assert!(n > 1 && n % 2 == 1 && !is_prime(n));
    let mut c = 1u64;
    loop {
        let f = |x: u64| {
            let s = mul_mod(x, x, n) + c;
            if s >= n {
                s - n
            } else {
                s
            }
        };
        let mut y = 2u64;
        let mut x = y;
        let mut ys = y;
        let mut q = 1u64;
        let mut r = 1u64;
        let mut g = 1u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0u64;
            while k < r && g == 1 {
                ys = y;
                let batch = 128.min(r - k);
                for _ in 0..batch {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += batch;
            }
            r *= 2;
        }
        if g == n {
            // The batch overshot a factor; replay it one step at a time.
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn factor_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

/// Complete prime factorization of n, 1 <= n < 2^63.
pub fn factorize(n: u64) -> Result<FactoredInteger> {
    if n == 0 {
        return Err(Error::domain("factorize", "0 has no factorization"));
    }
    if n >= 1 << 63 {
        return Err(Error::domain("factorize", format!("{n} >= 2^63 is out of range")));
    }
    let value = n;
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut m = n;
    for &p in small_primes() {
        if p * p > m {
            break;
        }
        if m % p == 0 {
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    if m > 1 {
        if is_prime(m) {
            factors.push((m, 1));
        } else {
            let mut rest = Vec::new();
            factor_into(m, &mut rest);
            rest.sort_unstable();
            let mut i = 0;
            while i < rest.len() {
                let p = rest[i];
                let mut e = 0u32;
                while i < rest.len() && rest[i] == p {
                    e += 1;
                    i += 1;
                }
                factors.push((p, e));
            }
        }
    }
    factors.sort_unstable();
    debug_assert!({
        let mut prod = 1u64;
        for &(p, e) in &factors {
            for _ in 0..e {
                prod *= p;
            }
        }
        prod == value
    });
    Ok(FactoredInteger { value, factors })
}

pub fn omega(n: u64) -> Result<u32> {
    Ok(factorize(n)?.omega())
}

pub fn big_omega(n: u64) -> Result<u32> {
    Ok(factorize(n)?.big_omega())
}

pub fn tau_prime(n: u64) -> Result<u64> {
    Ok(factorize(n)?.tau_prime())
}

pub fn euler_phi(n: u64) -> Result<u64> {
    Ok(factorize(n)?.euler_phi())
}

/// True iff n is squarefree.
pub fn is_squarefree(n: u64) -> Result<bool> {
    Ok(factorize(n)?.factors().iter().all(|&(_, e)| e == 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_has_empty_factorization() {
        let f = factorize(1).unwrap();
        assert_eq!(f.value(), 1);
        assert!(f.factors().is_empty());
        assert_eq!(f.omega(), 0);
        assert_eq!(f.big_omega(), 0);
        assert_eq!(f.tau_prime(), 1);
        assert_eq!(f.euler_phi(), 1);
    }

    #[test]
    fn hand_checked_values() {
        assert_eq!(factorize(913).unwrap().factors(), &[(11, 1), (83, 1)]);
        assert_eq!(factorize(1 << 60).unwrap().factors(), &[(2, 60)]);
        assert_eq!(factorize(12).unwrap().factors(), &[(2, 2), (3, 1)]);
    }

    #[test]
    fn domain_errors() {
        assert!(factorize(0).is_err());
        assert!(factorize(1 << 63).is_err());
    }

    #[test]
    fn reconstructs_and_matches_brute_force_up_to_1e5() {
        for n in 1..=100_000u64 {
            let f = factorize(n).unwrap();
            let mut prod = 1u64;
            let mut last = 0u64;
            for &(p, e) in f.factors() {
                assert!(p > last, "primes ascending for n={n}");
                assert!(e >= 1);
                assert!(is_prime(p));
                last = p;
                prod *= p.pow(e);
            }
            assert_eq!(prod, n);
        }
    }

    #[test]
    fn brute_force_anatomy_counts_up_to_2e4() {
        for n in 1..=20_000u64 {
            let f = factorize(n).unwrap();
            let mut m = n;
            let mut w = 0u32;
            let mut big = 0u32;
            let mut d = 2u64;
            while d * d <= m {
                if m % d == 0 {
                    w += 1;
                    while m % d == 0 {
                        big += 1;
                        m /= d;
                    }
                }
                d += 1;
            }
            if m > 1 {
                w += 1;
                big += 1;
            }
            assert_eq!(f.omega(), w, "omega({n})");
            assert_eq!(f.big_omega(), big, "Omega({n})");
            assert!(f.big_omega() >= f.omega());
            let tau = (1..=n).filter(|d| d * d <= n && n % (d * d) == 0).count() as u64;
            assert_eq!(f.tau_prime(), tau, "tau'({n})");
            let phi = (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64;
            assert_eq!(f.euler_phi(), phi, "phi({n})");
        }
    }

    #[test]
    fn semiprime_with_large_factors() {
        let p = 1_000_000_007u64;
        let q = 998_244_353u64;
        let f = factorize(p * q).unwrap();
        assert_eq!(f.factors(), &[(q, 1), (p, 1)]);
    }

    #[test]
    fn square_of_large_prime() {
        let p = 1_000_003u64;
        let f = factorize(p * p).unwrap();
        assert_eq!(f.factors(), &[(p, 2)]);
    }

    #[test]
    fn divisors_of_36() {
        assert_eq!(factorize(36).unwrap().divisors(), vec![1, 2, 3, 4, 6, 9, 12, 18, 36]);
    }

    #[test]
    fn prime_anatomy() {
        for p in [2u64, 3, 101, 104_729] {
            let f = factorize(p).unwrap();
            assert_eq!(f.omega(), 1);
            assert_eq!(f.big_omega(), 1);
            assert_eq!(f.tau_prime(), 1);
            assert_eq!(f.euler_phi(), p - 1);
        }
    }
}
