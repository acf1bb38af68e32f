//! Prime-power Olson verdicts and the exhaustive scan.
//!
//! p^n with p <= 5 is never Olson. For p >= 7, p^n fails to be Olson exactly
//! when some generator (l-1)/2 * h(-l) divides it, which forces
//! (l-1)/2 = p^r and h(-l) = p^s with r >= 1, s >= 0 and r + s <= n. The
//! scan enumerates the (p, r) candidates, discards s-values that would break
//! the class number bound h <= sqrt(l) log l, refutes the rest by cheap
//! unconditional class-group arguments, and computes h exactly for whatever
//! survives.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::primality::is_prime;
use crate::arith::sieve::for_each_prime_in;
use crate::classnum::charsum::class_number_char_sum;
use crate::classnum::group::{prime_form, small_non_inert_prime};
use crate::classnum::{hbound_holds, ClassNumbers};
use crate::error::{Error, Result};
use crate::olson::{is_olson, GeneratorEntry, OlsonVerdict};

/// A non-Olson prime power with its full witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrimePowerHit {
    pub p: u64,
    pub n: u32,
    pub r: u32,
    pub ell: u64,
    pub h: u64,
}

/// Largest s <= budget with p^s within the class number bound for l.
fn s_cap(p: u64, ell: u64, budget: u32) -> u32 {
    let mut s = 0u32;
    let mut pk = 1u64;
    while s < budget {
        match pk.checked_mul(p) {
            Some(next) if hbound_holds(ell, next) => {
                pk = next;
                s += 1;
            }
            _ => break,
        }
    }
    s
}

/// Decide whether h(-l) = p^s for some 0 <= s <= cap, returning the matching
/// (s, h) if so. Every step is unconditional:
///
/// 1. a non-inert prime q < (1+l)/4 certifies h > 1 (an ideal of norm q
///    cannot be principal), killing the s = 0 candidate;
/// 2. if cap >= 1, a class-group element g with g^(p^cap) != identity rules
///    out every prime-power order, since h = p^s would force ord(g) | p^cap;
/// 3. any survivor gets the exact character-sum class number.
fn resolve_candidate(p: u64, ell: u64, cap: u32) -> Result<Option<(u32, u64)>> {
    if let Some(q) = small_non_inert_prime(-(ell as i64), 300) {
        if cap == 0 {
            return Ok(None);
        }
        if let Some(g) = prime_form(-(ell as i64), q) {
            let mut pe = 1u64;
            for _ in 0..cap {
                pe = pe.checked_mul(p).ok_or(Error::Overflow("prime power candidate"))?;
            }
            if !g.pow(pe).is_identity() {
                return Ok(None);
            }
        }
    }
    let h = class_number_char_sum(ell)?;
    let mut pk = 1u64;
    for s in 0..=cap {
        if pk == h {
            return Ok(Some((s, h)));
        }
        pk = match pk.checked_mul(p) {
            Some(v) => v,
            None => break,
        };
    }
    Ok(None)
}

/// Candidate generator exponents r for a given p, honoring the parity
/// shortcut: for p not divisible by 3 and r even, p^r = 1 mod 3, so
/// l = 2 p^r + 1 = 0 mod 3; with l > 3 that makes l composite and the
/// candidate vacuous.
fn candidate_hit(p: u64, r: u32, n_max: u32) -> Result<Option<(u32, u64, u64)>> {
    let mut pr = 1u64;
    for _ in 0..r {
        pr = pr.checked_mul(p).ok_or(Error::Overflow("prime power candidate"))?;
    }
    let ell = 2u64
        .checked_mul(pr)
        .and_then(|v| v.checked_add(1))
        .ok_or(Error::Overflow("prime power candidate"))?;
    if !is_prime(ell) {
        return Ok(None);
    }
    debug_assert_eq!(ell % 4, 3);
    let cap = s_cap(p, ell, n_max - r);
    Ok(resolve_candidate(p, ell, cap)?.map(|(s, h)| (r + s, ell, h)))
}

/// Verdict for p^n. For p <= 5 the degree is never Olson; the witness comes
/// from the general divisor test. For p >= 7 the candidates are exactly the
/// r described above.
pub fn is_prime_power_olson(p: u64, n: u32, source: &ClassNumbers) -> Result<OlsonVerdict> {
    if !is_prime(p) {
        return Err(Error::domain("is_prime_power_olson", format!("{p} is not prime")));
    }
    if n == 0 {
        return Err(Error::domain("is_prime_power_olson", "exponent must be at least 1"));
    }
    let mut degree = 1u64;
    for _ in 0..n {
        degree = degree
            .checked_mul(p)
            .filter(|&v| v < 1 << 63)
            .ok_or_else(|| Error::domain("is_prime_power_olson", "p^n exceeds 2^63"))?;
    }
    if p <= 5 {
        let verdict = is_olson(degree, source)?;
        debug_assert!(!verdict.olson);
        return Ok(verdict);
    }
    let mut best: Option<GeneratorEntry> = None;
    for r in 1..=n {
        if r % 2 == 0 && p % 3 != 0 {
            // l = 2 p^r + 1 is divisible by 3 and exceeds 3: composite.
            debug_assert_eq!((2 * p.pow(r) + 1) % 3, 0);
            continue;
        }
        if let Some((rs, ell, h)) = candidate_hit(p, r, n)? {
            let cand = GeneratorEntry {
                g: p.pow(rs),
                witness_prime: ell,
                witness_h: h,
            };
            let better = match &best {
                None => true,
                Some(b) => (cand.g, cand.witness_prime) < (b.g, b.witness_prime),
            };
            if better {
                best = Some(cand);
            }
        }
    }
    Ok(OlsonVerdict {
        degree,
        olson: best.is_none(),
        witness: best,
    })
}

/// Exhaustive scan: all non-Olson p^n <= bound with p > 5. A hit at (p, r)
/// with h = p^s makes every p^n with n >= r+s non-Olson, so hits are
/// expanded up to the bound. Expected output: empty.
pub fn prime_power_scan(bound: u64) -> Result<Vec<PrimePowerHit>> {
    prime_power_scan_with(bound, true)
}

/// Scan with the even-r parity shortcut made optional so its neutrality can
/// be verified directly.
pub fn prime_power_scan_with(bound: u64, skip_even_r: bool) -> Result<Vec<PrimePowerHit>> {
    if bound < 49 {
        return Err(Error::domain("prime_power_scan", "bound must be at least 49"));
    }
    if bound >= 1 << 62 {
        return Err(Error::domain("prime_power_scan", "bound must be below 2^62"));
    }
    const SEGMENT: u64 = 1 << 24;
    let ranges: Vec<(u64, u64)> = (7..=bound)
        .step_by(SEGMENT as usize)
        .map(|lo| (lo, (lo + SEGMENT - 1).min(bound)))
        .collect();
    let per_range: Vec<Vec<PrimePowerHit>> = ranges
        .par_iter()
        .map(|&(lo, hi)| scan_segment(lo, hi, bound, skip_even_r))
        .collect::<Result<_>>()?;
    Ok(per_range.into_iter().flatten().collect())
}

fn scan_segment(lo: u64, hi: u64, bound: u64, skip_even_r: bool) -> Result<Vec<PrimePowerHit>> {
    let mut hits = Vec::new();
    let mut failure: Option<Error> = None;
    for_each_prime_in(lo, hi, crate::arith::sieve::DEFAULT_SEGMENT_BITS, |p| {
        if failure.is_some() || p <= 5 {
            return;
        }
        let mut n_max = 0u32;
        let mut pk = 1u64;
        while pk <= bound / p {
            pk *= p;
            n_max += 1;
        }
        for r in 1..=n_max {
            if skip_even_r && r % 2 == 0 && p % 3 != 0 {
                debug_assert_eq!((2 * p.pow(r) + 1) % 3, 0);
                continue;
            }
            match candidate_hit(p, r, n_max) {
                Ok(Some((rs, ell, h))) => {
                    for n in rs..=n_max {
                        hits.push(PrimePowerHit { p, n, r, ell, h });
                    }
                }
                Ok(None) => {}
                Err(e) => failure = Some(e),
            }
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(hits),
    }
}
