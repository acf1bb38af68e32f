//! Counting statistics over initial segments of the integers: the mean of
//! tau', distribution of omega and Omega, and the density of integers with a
//! shifted-prime divisor.

use crate::arith::sieve::simple_sieve;
use crate::error::{Error, Result};
use crate::ratio::Ratio;

/// Exact average (1/y) * sum_{n <= y} tau'(n), as an unreduced fraction.
///
/// Uses the exchange sum_{n<=y} tau'(n) = sum_{d^2<=y} floor(y/d^2), so the
/// whole accumulation is integer arithmetic and a single division at the end.
/// The average tends to pi^2/6 as y grows.
pub fn mean_tau_prime(y: u64) -> Result<Ratio> {
    if y == 0 {
        return Err(Error::domain("mean_tau_prime", "y must be positive"));
    }
    let mut total: u128 = 0;
    let mut d = 1u64;
    while let Some(sq) = d.checked_mul(d) {
        if sq > y {
            break;
        }
        total += (y / sq) as u128;
        d += 1;
    }
    Ok(Ratio::new(total, y as u128))
}

/// omega(n) for every n in [0, x], by sieving over primes.
pub fn omega_sieve(x: u64) -> Vec<u8> {
    let n = x as usize;
    let mut omega = vec![0u8; n + 1];
    for p in simple_sieve(x) {
        let mut m = p as usize;
        while m <= n {
            omega[m] += 1;
            m += p as usize;
        }
    }
    omega
}

/// Omega(n) (with multiplicity) for every n in [0, x].
pub fn big_omega_sieve(x: u64) -> Vec<u8> {
    let n = x as usize;
    let mut big = vec![0u8; n + 1];
    for p in simple_sieve(x) {
        let mut pk = p;
        loop {
            let mut m = pk as usize;
            while m <= n {
                big[m] += 1;
                m += pk as usize;
            }
            match pk.checked_mul(p) {
                Some(next) if next <= x => pk = next,
                _ => break,
            }
        }
    }
    big
}

/// Number of d <= x with omega(d) = k.
pub fn count_omega_eq(x: u64, k: u32) -> Result<u64> {
    if x == 0 {
        return Err(Error::domain("count_omega_eq", "x must be positive"));
    }
    let omega = omega_sieve(x);
    Ok(omega[1..].iter().filter(|&&w| w as u32 == k).count() as u64)
}

/// Number of d <= x with Omega(d) >= kk.
pub fn count_big_omega_ge(x: u64, kk: u32) -> Result<u64> {
    if x == 0 {
        return Err(Error::domain("count_big_omega_ge", "x must be positive"));
    }
    let big = big_omega_sieve(x);
    Ok(big[1..].iter().filter(|&&w| w as u32 >= kk).count() as u64)
}

/// Fraction of n <= x divisible by l - 1 for some prime l > b.
///
/// Only primes with l - 1 <= x can contribute, so the divisor set is
/// {l - 1 : l prime, b < l <= x + 1} and the count is a sieve of multiples.
pub fn shifted_prime_divisor_density(x: u64, b: u64) -> Result<Ratio> {
    if x == 0 {
        return Err(Error::domain("shifted_prime_divisor_density", "x must be positive"));
    }
    if b < 2 {
        return Err(Error::domain("shifted_prime_divisor_density", "threshold must be >= 2"));
    }
    let n = x as usize;
    let mut marked = vec![false; n + 1];
    for l in simple_sieve(x + 1) {
        if l <= b {
            continue;
        }
        let d = (l - 1) as usize;
        let mut m = d;
        while m <= n {
            marked[m] = true;
            m += d;
        }
    }
    let count = marked[1..].iter().filter(|&&m| m).count() as u128;
    Ok(Ratio::new(count, x as u128))
}
