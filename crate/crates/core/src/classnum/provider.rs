//! A memoizing source of h(-l) shared by the sieve, verdict, scan and bound
//! machinery. Serves table lookups when a sweep has been absorbed, falls
//! back to per-prime computation otherwise, and answers divisibility
//! questions h | m without an O(l) computation where a class-group order
//! argument refutes them.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use crate::arith::primality::is_prime;
use crate::classnum::charsum::class_number_char_sum;
use crate::classnum::group::{prime_form, small_non_inert_prime};
use crate::classnum::{ClassNumberAlgorithm, ClassNumberTable};
use crate::error::{Error, Result};

/// Only reach for the order-based refutation above this size; below it the
/// character sum is instant anyway.
const REFUTE_MIN: u64 = 1 << 22;

#[derive(Default)]
pub struct ClassNumbers {
    memo: Mutex<HashMap<u64, u64>>,
    /// Every prime l = 3 mod 4 up to this bound is in the memo.
    complete_bound: AtomicU64,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl ClassNumbers {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_table(table: &ClassNumberTable) -> Self {
        let source = Self::new();
        source.absorb_table(table);
        source
    }

    pub fn absorb_table(&self, table: &ClassNumberTable) {
        let mut memo = self.memo.lock().unwrap();
        for &(l, h) in table.entries() {
            memo.insert(l, h);
        }
        if table.is_complete() {
            self.complete_bound
                .fetch_max(table.upper_bound(), Ordering::SeqCst);
        }
    }

    /// Extend coverage so every l <= bound is memoized.
    pub fn ensure_bound(&self, bound: u64, algo: &dyn ClassNumberAlgorithm) -> Result<()> {
        let covered = self.complete_bound.load(Ordering::SeqCst);
        if covered >= bound {
            return Ok(());
        }
        let entries = algo.sweep_range(covered.max(3), bound)?;
        let mut memo = self.memo.lock().unwrap();
        for (l, h) in entries {
            memo.insert(l, h);
            self.misses.fetch_add(1, Ordering::Relaxed);
        }
        drop(memo);
        self.complete_bound.fetch_max(bound, Ordering::SeqCst);
        Ok(())
    }

    pub fn covered_bound(&self) -> u64 {
        self.complete_bound.load(Ordering::SeqCst)
    }

    fn check_ell(ell: u64) -> Result<()> {
        if ell <= 3 || ell % 4 != 3 || !is_prime(ell) {
            return Err(Error::domain(
                "class_numbers",
                format!("{ell} is not a prime congruent to 3 mod 4 exceeding 3"),
            ));
        }
        Ok(())
    }

    /// h(-l), memoized.
    pub fn class_number_neg(&self, ell: u64) -> Result<u64> {
        Self::check_ell(ell)?;
        if let Some(&h) = self.memo.lock().unwrap().get(&ell) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(h);
        }
        let h = class_number_char_sum(ell)?;
        self.misses.fetch_add(1, Ordering::Relaxed);
        self.memo.lock().unwrap().insert(ell, h);
        Ok(h)
    }

    /// Does h(-l) divide m? Large unknown l first gets an order-based
    /// refutation: any class-group element g with g^m != identity rules the
    /// divisibility out without computing h.
    pub fn divides(&self, ell: u64, m: u64) -> Result<bool> {
        Self::check_ell(ell)?;
        debug_assert!(m >= 1);
        if let Some(&h) = self.memo.lock().unwrap().get(&ell) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(m % h == 0);
        }
        if ell >= REFUTE_MIN {
            let d = -(ell as i64);
            let mut checked = 0u32;
            let mut q = 2u64;
            while checked < 3 && q <= 300 {
                if is_prime(q) && q < (1 + ell) / 4 {
                    if let Some(g) = prime_form(d, q) {
                        if !g.pow(m).is_identity() {
                            // exponent of the class group does not divide m
                            return Ok(false);
                        }
                        checked += 1;
                    }
                }
                q += 1;
            }
        }
        let h = self.class_number_neg(ell)?;
        Ok(m % h == 0)
    }

    /// True when h(-l) = 1 is impossible because some small non-inert prime
    /// exists. Sound and cheap; a `false` answer decides nothing.
    pub fn class_number_exceeds_one(&self, ell: u64) -> bool {
        small_non_inert_prime(-(ell as i64), 300).is_some()
    }

    /// (hits, misses) observed so far.
    pub fn stats(&self) -> (u64, u64) {
        (
            self.hits.load(Ordering::Relaxed),
            self.misses.load(Ordering::Relaxed),
        )
    }

    /// Export the complete table up to `bound`, which must be covered.
    pub fn export_table(&self, bound: u64) -> Result<ClassNumberTable> {
        if self.covered_bound() < bound {
            return Err(Error::Dependency(format!(
                "class numbers are only covered to {}, need {bound}",
                self.covered_bound()
            )));
        }
        let memo = self.memo.lock().unwrap();
        let mut entries: Vec<(u64, u64)> = memo
            .iter()
            .filter(|&(&l, _)| l <= bound)
            .map(|(&l, &h)| (l, h))
            .collect();
        entries.sort_unstable();
        Ok(ClassNumberTable::new(bound, true, entries))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classnum::{algorithm, class_number_sweep_default};

    #[test]
    fn memoization_and_counters() {
        let src = ClassNumbers::new();
        assert_eq!(src.class_number_neg(23).unwrap(), 3);
        assert_eq!(src.class_number_neg(23).unwrap(), 3);
        let (hits, misses) = src.stats();
        assert_eq!((hits, misses), (1, 1));
    }

    #[test]
    fn table_absorption_serves_hits() {
        let table = class_number_sweep_default(100).unwrap();
        let src = ClassNumbers::from_table(&table);
        assert_eq!(src.class_number_neg(47).unwrap(), 5);
        assert_eq!(src.stats().1, 0);
    }

    #[test]
    fn ensure_bound_extends_coverage() {
        let src = ClassNumbers::new();
        src.ensure_bound(50, algorithm("charsum").unwrap()).unwrap();
        assert_eq!(src.covered_bound(), 50);
        let t = src.export_table(50).unwrap();
        assert_eq!(t.entries(), class_number_sweep_default(50).unwrap().entries());
        assert!(src.export_table(60).is_err());
    }

    #[test]
    fn divisibility_matches_exact_values() {
        let src = ClassNumbers::new();
        assert!(src.divides(7, 5).unwrap()); // h = 1
        assert!(src.divides(23, 6).unwrap()); // h = 3
        assert!(!src.divides(23, 4).unwrap());
        assert!(!src.divides(47, 7).unwrap()); // h = 5
    }

    #[test]
    fn rejects_bad_ell() {
        let src = ClassNumbers::new();
        assert!(src.class_number_neg(5).is_err());
        assert!(src.class_number_neg(9).is_err());
        assert!(src.class_number_neg(3).is_err());
    }
}
