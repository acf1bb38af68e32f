//! Prime enumeration: a simple bounded sieve plus a segmented sieve whose
//! memory footprint is one cache-friendly segment regardless of the range.

use crate::error::{Error, Result};

/// Default segment size in bits (odd numbers per segment). Tunable; segments
/// this size stay resident in L2 which dominates sieve throughput.
pub const DEFAULT_SEGMENT_BITS: usize = 1 << 22;

/// All primes <= limit by a plain sieve of Eratosthenes. Intended for base
/// primes and tests, so `limit` should stay modest (a few 10^8 at most).
pub fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r > 0 && r.checked_mul(r).map_or(true, |s| s > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).map_or(false, |s| s <= n) {
        r += 1;
    }
    r
}

/// Streaming segmented sieve over the closed interval [lo, hi].
///
/// Calls `f` once per prime, in ascending order. Bounded memory: one segment
/// bitmap of `segment_bits` odd candidates plus the base primes up to
/// sqrt(hi).
pub fn for_each_prime_in(lo: u64, hi: u64, segment_bits: usize, mut f: impl FnMut(u64)) -> Result<()> {
    if lo > hi {
        return Err(Error::domain("primes_in", format!("reversed interval [{lo}, {hi}]")));
    }
    if hi < 2 {
        return Ok(());
    }
    let lo = lo.max(2);
    if lo <= 2 && hi >= 2 {
        f(2);
    }
    // Remaining candidates are odd numbers in [max(3, lo), hi].
    let mut start = lo.max(3);
    if start % 2 == 0 {
        start += 1;
    }
    if start > hi {
        return Ok(());
    }
    let base = simple_sieve(isqrt(hi));
    let seg_bits = segment_bits.max(1 << 10) as u64;

    let mut seg_lo = start;
    let mut bitmap = vec![0u64; (segment_bits.max(1 << 10) + 63) / 64];
    while seg_lo <= hi {
        // Segment covers odd values seg_lo, seg_lo+2, ..., up to seg_hi.
        let span = 2 * seg_bits - 2;
        let seg_hi = seg_lo.saturating_add(span).min(hi);
        let nbits = ((seg_hi - seg_lo) / 2 + 1) as usize;
        for w in bitmap.iter_mut() {
            *w = 0;
        }
        for &p in base.iter().skip(1) {
            // first odd multiple of p that is >= max(p*p, seg_lo)
            let mut m = p * p;
            if m < seg_lo {
                let q = (seg_lo + p - 1) / p;
                m = q * p;
                if m % 2 == 0 {
                    m += p;
                }
            }
            if m > seg_hi {
                continue;
            }
            let mut idx = ((m - seg_lo) / 2) as usize;
            while idx < nbits {
                bitmap[idx >> 6] |= 1u64 << (idx & 63);
                idx += p as usize;
            }
        }
        for idx in 0..nbits {
            if bitmap[idx >> 6] & (1u64 << (idx & 63)) == 0 {
                f(seg_lo + 2 * idx as u64);
            }
        }
        match seg_hi.checked_add(2) {
            Some(next) => seg_lo = next,
            None => break,
        }
    }
    Ok(())
}

/// Ascending list of all primes in [lo, hi].
pub fn primes_in(lo: u64, hi: u64) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for_each_prime_in(lo, hi, DEFAULT_SEGMENT_BITS, |p| out.push(p))?;
    Ok(out)
}

/// Number of primes in [lo, hi], streaming (no list retained).
pub fn count_primes_in(lo: u64, hi: u64) -> Result<u64> {
    let mut count = 0u64;
    for_each_prime_in(lo, hi, DEFAULT_SEGMENT_BITS, |_| count += 1)?;
    Ok(count)
}
