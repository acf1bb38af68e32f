//! Olson degrees: a degree d is Olson when every torsion subgroup of a CM
//! elliptic curve over a degree-d field already occurs over the rationals.
//! The non-Olson degrees are exactly the multiples of the generator set
//! {2} u {(l-1)/2 * h(-l) : l prime, l = 3 mod 4, l > 3}, which reduces
//! everything here to divisor arithmetic against class numbers.

pub mod primepower;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::factor::factorize;
use crate::arith::primality::is_prime;
use crate::classnum::{ClassNumberTable, ClassNumbers};
use crate::error::{Error, Result};
use crate::ratio::Ratio;

/// One generator of the non-Olson set of multiples: either the special
/// generator 2 (witness_prime = 0) or (l-1)/2 * h(-l) for its witness prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GeneratorEntry {
    pub g: u64,
    pub witness_prime: u64,
    pub witness_h: u64,
}

impl GeneratorEntry {
    pub fn special_two() -> Self {
        GeneratorEntry {
            g: 2,
            witness_prime: 0,
            witness_h: 1,
        }
    }
}

/// All generators up to a bound, optionally pruned to the divisibility-
/// minimal ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorSet {
    pub bound: u64,
    pub primitive: bool,
    pub entries: Vec<GeneratorEntry>,
}

/// Verdict for one degree. `witness` is absent exactly when the degree is
/// Olson; otherwise it is the smallest generator dividing the degree (ties
/// broken by the smaller witness prime).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OlsonVerdict {
    pub degree: u64,
    pub olson: bool,
    pub witness: Option<GeneratorEntry>,
}

/// Generator set for bound X. Completeness needs h(-l) for every prime
/// l = 3 mod 4 up to 2X+1, since h >= 1 forces (l-1)/2 <= g.
pub fn generators(bound: u64, primitive: bool, table: &ClassNumberTable) -> Result<GeneratorSet> {
    if bound < 2 {
        return Err(Error::domain("generators", "bound must be at least 2"));
    }
    let needed = 2 * bound + 1;
    if !table.is_complete() || table.upper_bound() < needed {
        return Err(Error::Dependency(format!(
            "generator bound {bound} needs a complete class-number table to {needed}, have {} (complete: {})",
            table.upper_bound(),
            table.is_complete()
        )));
    }
    let mut entries = vec![GeneratorEntry::special_two()];
    for &(l, h) in table.entries() {
        if l > needed {
            break;
        }
        let g = (l - 1) / 2 * h;
        if g <= bound {
            entries.push(GeneratorEntry {
                g,
                witness_prime: l,
                witness_h: h,
            });
        }
    }
    entries.sort_unstable_by_key(|e| (e.g, e.witness_prime));
    if primitive {
        entries = prune_to_primitive(bound, entries);
    }
    Ok(GeneratorSet {
        bound,
        primitive,
        entries,
    })
}

/// Drop every entry divisible by a smaller kept entry. Marking multiples in
/// a bitmap keeps this near-linear in the bound.
fn prune_to_primitive(bound: u64, entries: Vec<GeneratorEntry>) -> Vec<GeneratorEntry> {
    let mut divisible = OddBitmap::new(bound);
    let mut kept = Vec::with_capacity(entries.len());
    for e in entries {
        if e.g == 2 {
            kept.push(e); // even entries are never divisible by odd ones
            continue;
        }
        if divisible.get(e.g) {
            continue;
        }
        let mut m = e.g;
        while m <= bound {
            divisible.set(m);
            m += 2 * e.g;
        }
        kept.push(e);
    }
    kept
}

/// Bitmap over the odd integers in [1, bound].
#[derive(Debug, Clone, PartialEq, Eq)]
struct OddBitmap {
    bound: u64,
    words: Vec<u64>,
}

impl OddBitmap {
    fn new(bound: u64) -> Self {
        let nbits = ((bound + 1) / 2) as usize;
        OddBitmap {
            bound,
            words: vec![0u64; (nbits + 63) / 64],
        }
    }

    #[inline]
    fn set(&mut self, d: u64) {
        debug_assert!(d % 2 == 1 && d <= self.bound);
        let i = ((d - 1) / 2) as usize;
        self.words[i >> 6] |= 1u64 << (i & 63);
    }

    #[inline]
    fn get(&self, d: u64) -> bool {
        debug_assert!(d % 2 == 1 && d <= self.bound);
        let i = ((d - 1) / 2) as usize;
        self.words[i >> 6] & (1u64 << (i & 63)) != 0
    }

    fn count_set(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    fn nbits(&self) -> u64 {
        (self.bound + 1) / 2
    }
}

/// The sieve of multiples over [1, N]. Even degrees are non-Olson through
/// the generator 2 and are represented implicitly; the bitmap stores odd
/// indices only.
#[derive(Debug, Clone)]
pub struct SievedRange {
    bound: u64,
    generator_bound: u64,
    odd_marks: OddBitmap,
}

impl SievedRange {
    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn generator_bound(&self) -> u64 {
        self.generator_bound
    }

    /// True iff some generator divides d (d non-Olson).
    pub fn is_non_olson(&self, d: u64) -> bool {
        assert!(d >= 1 && d <= self.bound, "degree out of sieved range");
        if d % 2 == 0 {
            return true;
        }
        self.odd_marks.get(d)
    }

    pub fn olson_count(&self) -> u64 {
        self.odd_marks.nbits() - self.odd_marks.count_set()
    }

    /// Ascending Olson degrees in the range.
    pub fn olson_degrees(&self) -> Vec<u64> {
        (1..=self.bound)
            .step_by(2)
            .filter(|&d| !self.odd_marks.get(d))
            .collect()
    }
}

/// Materialized sieve for bound N.
pub fn sieve_olson(bound: u64, gens: &GeneratorSet) -> Result<SievedRange> {
    if bound < 1 {
        return Err(Error::domain("sieve_olson", "bound must be positive"));
    }
    if gens.bound < bound {
        return Err(Error::Dependency(format!(
            "sieve to {bound} needs generators to {bound}, have {}",
            gens.bound
        )));
    }
    let mut odd_marks = OddBitmap::new(bound);
    for e in &gens.entries {
        if e.g == 2 || e.g > bound {
            continue;
        }
        let mut m = e.g;
        while m <= bound {
            odd_marks.set(m);
            m += 2 * e.g;
        }
    }
    Ok(SievedRange {
        bound,
        generator_bound: gens.bound,
        odd_marks,
    })
}

/// Number of Olson degrees <= N, streamed over segments so the full bitmap
/// is never retained. Segments are disjoint, so any worker count produces
/// the same sum.
pub fn count_olson(bound: u64, gens: &GeneratorSet) -> Result<u64> {
    if bound < 1 {
        return Err(Error::domain("count_olson", "bound must be positive"));
    }
    if bound >= 1 << 62 {
        return Err(Error::domain("count_olson", "bound must be below 2^62"));
    }
    if gens.bound < bound {
        return Err(Error::Dependency(format!(
            "count to {bound} needs generators to {bound}, have {}",
            gens.bound
        )));
    }
    const SEGMENT_ODDS: u64 = 1 << 22;
    let total_odds = (bound + 1) / 2;
    let segments: Vec<(u64, u64)> = (0..total_odds)
        .step_by(SEGMENT_ODDS as usize)
        .map(|lo| (lo, (lo + SEGMENT_ODDS).min(total_odds)))
        .collect();
    let odd_gens: Vec<u64> = gens
        .entries
        .iter()
        .filter(|e| e.g % 2 == 1)
        .map(|e| e.g)
        .collect();
    let count = segments
        .par_iter()
        .map(|&(lo, hi)| {
            // indices [lo, hi) encode odd degrees 2i+1
            let nbits = (hi - lo) as usize;
            let mut words = vec![0u64; (nbits + 63) / 64];
            let d_lo = 2 * lo + 1;
            let d_hi = 2 * hi - 1;
            for &g in &odd_gens {
                if g > d_hi {
                    break;
                }
                // first odd multiple of g that is >= d_lo
                let mut k = (d_lo + g - 1) / g;
                if k % 2 == 0 {
                    k += 1;
                }
                let mut m = k * g;
                while m <= d_hi {
                    let i = ((m - 1) / 2 - lo) as usize;
                    words[i >> 6] |= 1u64 << (i & 63);
                    m += 2 * g;
                }
            }
            let mut marked = 0u64;
            for (wi, w) in words.iter().enumerate() {
                let mut w = *w;
                // mask out bits beyond the segment
                let base = wi * 64;
                if base + 64 > nbits {
                    w &= (1u64 << (nbits - base)) - 1;
                }
                marked += w.count_ones() as u64;
            }
            (hi - lo) - marked
        })
        .sum();
    Ok(count)
}

/// Exact Olson density count/N.
pub fn olson_density(bound: u64, gens: &GeneratorSet) -> Result<Ratio> {
    Ok(Ratio::new(count_olson(bound, gens)? as u128, bound as u128))
}

/// Single-degree verdict by divisor enumeration: d is non-Olson iff d is
/// even or some divisor e of d has l = 2e+1 prime, l = 3 mod 4, l > 3, with
/// h(-l) dividing d/e. Needs no sweep, so it scales to large isolated d.
pub fn is_olson(d: u64, source: &ClassNumbers) -> Result<OlsonVerdict> {
    if d == 0 {
        return Err(Error::domain("is_olson", "degree must be positive"));
    }
    if d % 2 == 0 {
        return Ok(OlsonVerdict {
            degree: d,
            olson: false,
            witness: Some(GeneratorEntry::special_two()),
        });
    }
    let fac = factorize(d)?; // enforces d < 2^63
    let mut best: Option<GeneratorEntry> = None;
    for e in fac.divisors() {
        if e == 1 {
            continue; // l = 3 is excluded from the generator set
        }
        let ell = 2 * e + 1;
        debug_assert_eq!(ell % 4, 3); // e odd since d is odd
        if !is_prime(ell) {
            continue;
        }
        if source.divides(ell, d / e)? {
            let h = source.class_number_neg(ell)?;
            let cand = GeneratorEntry {
                g: e * h,
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
        degree: d,
        olson: best.is_none(),
        witness: best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classnum::class_number_sweep_default;

    fn gens_for(bound: u64, primitive: bool) -> GeneratorSet {
        let table = class_number_sweep_default((2 * bound + 1).max(7)).unwrap();
        generators(bound, primitive, &table).unwrap()
    }

    #[test]
    fn generator_set_bound_ten() {
        let full = gens_for(10, false);
        let gs: Vec<(u64, u64, u64)> = full
            .entries
            .iter()
            .map(|e| (e.g, e.witness_prime, e.witness_h))
            .collect();
        assert_eq!(gs, vec![(2, 0, 1), (3, 7, 1), (5, 11, 1), (9, 19, 1)]);
        let primitive = gens_for(10, true);
        let gs: Vec<u64> = primitive.entries.iter().map(|e| e.g).collect();
        assert_eq!(gs, vec![2, 3, 5]); // 9 pruned since 3 | 9
    }

    #[test]
    fn generator_set_bound_two() {
        let set = gens_for(2, true);
        assert_eq!(set.entries.len(), 1);
        assert_eq!(set.entries[0].g, 2);
    }

    #[test]
    fn generator_set_bound_thousand_starts_with_913() {
        let set = gens_for(1000, true);
        let gs: Vec<u64> = set.entries.iter().map(|e| e.g).collect();
        assert_eq!(&gs[..4], &[2, 3, 5, 913]);
        let e913 = set.entries.iter().find(|e| e.g == 913).unwrap();
        assert_eq!(e913.witness_prime, 167);
        assert_eq!(e913.witness_h, 11);
    }

    #[test]
    fn primitive_entries_never_divide_each_other() {
        let set = gens_for(10_000, true);
        for (i, a) in set.entries.iter().enumerate() {
            if a.witness_prime != 0 {
                assert_eq!(a.g % 2, 1, "generator {} from l = {}", a.g, a.witness_prime);
            }
            for b in set.entries.iter().skip(i + 1) {
                assert!(b.g % a.g != 0, "{} divides {}", a.g, b.g);
            }
        }
    }

    #[test]
    fn incomplete_table_is_a_dependency_error() {
        let table = class_number_sweep_default(15).unwrap();
        let err = generators(10, true, &table).unwrap_err();
        assert!(matches!(err, Error::Dependency(_)), "{err}");
    }

    #[test]
    fn sieve_bound_ten() {
        let sieved = sieve_olson(10, &gens_for(10, true)).unwrap();
        let olson: Vec<u64> = (1..=10).filter(|&d| !sieved.is_non_olson(d)).collect();
        assert_eq!(olson, vec![1, 7]);
    }

    #[test]
    fn sieve_bound_thirty() {
        let sieved = sieve_olson(30, &gens_for(30, true)).unwrap();
        assert_eq!(sieved.olson_degrees(), vec![1, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(sieved.olson_count(), 8);
        assert_eq!(count_olson(30, &gens_for(30, true)).unwrap(), 8);
    }

    #[test]
    fn count_matches_reference_values_to_1e4() {
        let gens = gens_for(10_000, true);
        assert_eq!(count_olson(1_000, &gens).unwrap(), 265);
        assert_eq!(count_olson(10_000, &gens).unwrap(), 2649);
    }

    #[test]
    fn degree_one_is_olson() {
        let gens = gens_for(2, true);
        assert_eq!(count_olson(1, &gens).unwrap(), 1);
        let density = olson_density(1, &gens).unwrap();
        assert!(density.eq_exact(crate::ratio::Ratio::new(1, 1)));
    }

    #[test]
    fn primitive_pruning_is_lossless() {
        let n = 20_000;
        let full = sieve_olson(n, &gens_for(n, false)).unwrap();
        let pruned = sieve_olson(n, &gens_for(n, true)).unwrap();
        for d in 1..=n {
            assert_eq!(full.is_non_olson(d), pruned.is_non_olson(d), "d = {d}");
        }
    }

    #[test]
    fn count_agrees_with_materialized_sieve() {
        let gens = gens_for(12_345, true);
        let sieved = sieve_olson(12_345, &gens).unwrap();
        assert_eq!(count_olson(12_345, &gens).unwrap(), sieved.olson_count());
    }

    #[test]
    fn verdict_spot_values() {
        let source = ClassNumbers::new();
        let v1 = is_olson(1, &source).unwrap();
        assert!(v1.olson && v1.witness.is_none());

        // 23: only candidate e = 23 gives l = 47, but h(-47) = 5 does not divide 1
        let v23 = is_olson(23, &source).unwrap();
        assert!(v23.olson);

        // 9: generator 3 (l = 7) divides it; smallest-g tie-break wins over
        // the e = 9, l = 19 witness
        let v9 = is_olson(9, &source).unwrap();
        assert!(!v9.olson);
        let w = v9.witness.unwrap();
        assert_eq!((w.g, w.witness_prime, w.witness_h), (3, 7, 1));

        let v14 = is_olson(14, &source).unwrap();
        assert_eq!(v14.witness.unwrap().g, 2);
    }

    #[test]
    fn verdict_agrees_with_sieve_to_2e4() {
        let n = 20_000;
        let gens = gens_for(n, true);
        let sieved = sieve_olson(n, &gens).unwrap();
        let table = class_number_sweep_default(2 * n + 1).unwrap();
        let source = ClassNumbers::from_table(&table);
        for d in 1..=n {
            let v = is_olson(d, &source).unwrap();
            assert_eq!(v.olson, !sieved.is_non_olson(d), "d = {d}");
            if let Some(w) = &v.witness {
                assert_eq!(d % w.g, 0, "witness must divide d = {d}");
            }
        }
    }

    #[test]
    fn large_single_degree_without_sweep() {
        let source = ClassNumbers::new();
        let d = 10_000_000_019u64;
        let v = is_olson(d, &source).unwrap();
        if let Some(w) = &v.witness {
            assert_eq!(d % w.g, 0);
        }
    }
}
