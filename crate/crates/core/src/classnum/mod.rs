//! Exact, unconditional class numbers h(D) for fundamental negative
//! discriminants, plus bulk sweeps over the primes l = 3 mod 4 that drive
//! everything else in this crate.
//!
//! Three interchangeable algorithms sit behind [`ClassNumberAlgorithm`] and
//! are selected by name at runtime:
//!
//! * `forms`   - reduced-form enumeration, the reference oracle;
//! * `charsum` - the character-sum fast path for prime discriminants;
//! * `bsgs`    - baby-step/giant-step order search (estimate-seeded, not
//!   unconditional, so it is never chosen by default and sweeps verify a
//!   sample of its output against `charsum`).

pub mod bsgs;
pub mod cache;
pub mod charsum;
pub mod forms;
pub mod group;
pub mod provider;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::primality::is_prime;
use crate::arith::sieve::primes_in;
use crate::error::{Error, Result};

pub use charsum::class_number_char_sum;
pub use forms::reduced_forms_class_number;
pub use provider::ClassNumbers;

/// Hard cap on |D| for single-discriminant class number computations.
pub const MAX_ABS_DISC: i64 = 1 << 40;

/// Check that d is a fundamental negative discriminant in range.
pub fn validate_fundamental(d: i64) -> Result<()> {
    if d >= 0 {
        return Err(Error::domain("class_number", format!("{d} is not negative")));
    }
    if -d >= MAX_ABS_DISC {
        return Err(Error::domain("class_number", format!("|{d}| >= 2^40 is out of range")));
    }
    match d.rem_euclid(4) {
        1 => {
            if !crate::arith::factor::is_squarefree((-d) as u64)? {
                return Err(Error::domain(
                    "class_number",
                    format!("{d} = 1 mod 4 but is not squarefree"),
                ));
            }
        }
        0 => {
            let m = d / 4;
            let m4 = m.rem_euclid(4);
            if m4 != 2 && m4 != 3 {
                return Err(Error::domain(
                    "class_number",
                    format!("{d} = 4m with m = {m4} mod 4; need m = 2 or 3 mod 4"),
                ));
            }
            if !crate::arith::factor::is_squarefree((-m) as u64)? {
                return Err(Error::domain(
                    "class_number",
                    format!("{d} = 4m but m is not squarefree"),
                ));
            }
        }
        _ => {
            return Err(Error::domain(
                "class_number",
                format!("{d} = {} mod 4 is not a discriminant", d.rem_euclid(4)),
            ));
        }
    }
    Ok(())
}

pub fn is_fundamental(d: i64) -> bool {
    validate_fundamental(d).is_ok()
}

/// An imaginary quadratic field: fundamental discriminant, class number, and
/// the number of roots of unity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ImQuadField {
    pub disc: i64,
    pub class_number: u64,
    pub unit_count: u8,
}

impl ImQuadField {
    pub fn new(disc: i64) -> Result<Self> {
        let h = class_number(disc)?;
        Ok(ImQuadField {
            disc,
            class_number: h,
            unit_count: unit_count(disc),
        })
    }
}

/// w_K: 6 for disc -3, 4 for disc -4, 2 otherwise.
pub fn unit_count(disc: i64) -> u8 {
    match disc {
        -3 => 6,
        -4 => 4,
        _ => 2,
    }
}

/// Does h <= sqrt(l) * ln(l) hold? Compared with outward rounding so a true
/// inequality is never rejected over floating-point noise.
pub fn hbound_holds(ell: u64, h: u64) -> bool {
    if h <= 1 {
        return true;
    }
    let lhs = (h as u128 * h as u128) as f64 * (1.0 - 1e-12);
    let ln = (ell as f64).ln();
    let rhs = (ell as f64) * ln * ln * (1.0 + 1e-12);
    lhs <= rhs
}

/// A u64 that certainly dominates sqrt(l) * ln(l).
pub fn hbound_limit(ell: u64) -> u64 {
    let ln = (ell as f64).ln();
    ((ell as f64).sqrt() * ln * (1.0 + 1e-9) + 2.0).ceil() as u64
}

/// Complete or partial table of (l, h(-l)) for primes l = 3 mod 4 in (3, L].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassNumberTable {
    upper_bound: u64,
    complete: bool,
    entries: Vec<(u64, u64)>,
}

impl ClassNumberTable {
    pub fn new(upper_bound: u64, complete: bool, entries: Vec<(u64, u64)>) -> Self {
        ClassNumberTable {
            upper_bound,
            complete,
            entries,
        }
    }

    pub fn upper_bound(&self) -> u64 {
        self.upper_bound
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn entries(&self) -> &[(u64, u64)] {
        &self.entries
    }

    pub fn get(&self, ell: u64) -> Option<u64> {
        self.entries
            .binary_search_by_key(&ell, |&(l, _)| l)
            .ok()
            .map(|i| self.entries[i].1)
    }

    /// Structural checks: strictly ascending prime l = 3 mod 4 in (3, bound],
    /// every h odd and within the square-root-log bound, and set equality
    /// with the full prime list when the table claims completeness.
    pub fn validate(&self) -> Result<()> {
        let mut last = 0u64;
        for &(l, h) in &self.entries {
            if l <= last {
                return Err(Error::Integrity(format!("entries not ascending at l = {l}")));
            }
            last = l;
            if l <= 3 || l % 4 != 3 || !is_prime(l) {
                return Err(Error::Integrity(format!(
                    "{l} is not a prime congruent to 3 mod 4 exceeding 3"
                )));
            }
            if l > self.upper_bound {
                return Err(Error::Integrity(format!(
                    "entry {l} exceeds the stated bound {}",
                    self.upper_bound
                )));
            }
            if h == 0 || h % 2 == 0 {
                return Err(Error::Integrity(format!(
                    "h = {h} at l = {l} contradicts genus parity"
                )));
            }
            if !hbound_holds(l, h) {
                return Err(Error::Integrity(format!(
                    "h = {h} at l = {l} exceeds sqrt(l) log l"
                )));
            }
        }
        if self.complete {
            let expected: Vec<u64> = primes_in(4, self.upper_bound)?
                .into_iter()
                .filter(|&l| l % 4 == 3)
                .collect();
            if expected.len() != self.entries.len()
                || expected
                    .iter()
                    .zip(self.entries.iter())
                    .any(|(&l, &(l2, _))| l != l2)
            {
                return Err(Error::Integrity(format!(
                    "table claims completeness to {} but the prime list disagrees",
                    self.upper_bound
                )));
            }
        }
        Ok(())
    }

    /// Union of two tables. Overlapping entries must agree; completeness is
    /// re-derived from the merged contents rather than trusted.
    pub fn merge(&self, other: &ClassNumberTable) -> Result<ClassNumberTable> {
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        entries.sort_unstable();
        entries.dedup();
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Integrity(format!(
                    "conflicting class numbers {} and {} for l = {}",
                    w[0].1, w[1].1, w[0].0
                )));
            }
        }
        let upper_bound = self.upper_bound.max(other.upper_bound);
        let mut merged = ClassNumberTable::new(upper_bound, false, entries);
        let expected: Vec<u64> = primes_in(4, upper_bound)?
            .into_iter()
            .filter(|&l| l % 4 == 3)
            .collect();
        merged.complete = expected.len() == merged.entries.len()
            && expected
                .iter()
                .zip(merged.entries.iter())
                .all(|(&l, &(l2, _))| l == l2);
        merged.validate()?;
        Ok(merged)
    }
}

/// One interchangeable class number backend.
pub trait ClassNumberAlgorithm: Send + Sync {
    fn name(&self) -> &'static str;

    /// Whether results carry no unproven assumptions.
    fn unconditional(&self) -> bool;

    /// Whether this backend accepts the (already validated) discriminant.
    fn supports(&self, d: i64) -> bool;

    fn class_number(&self, d: i64) -> Result<u64>;

    /// All (l, h(-l)) for primes l = 3 mod 4 with lo < l <= hi, ascending.
    fn sweep_range(&self, lo: u64, hi: u64) -> Result<Vec<(u64, u64)>> {
        let primes: Vec<u64> = primes_in(lo.max(3) + 1, hi)?
            .into_iter()
            .filter(|&l| l % 4 == 3)
            .collect();
        primes
            .par_iter()
            .map(|&l| Ok((l, self.class_number(-(l as i64))?)))
            .collect()
    }
}

struct FormsAlgorithm;

impl ClassNumberAlgorithm for FormsAlgorithm {
    fn name(&self) -> &'static str {
        "forms"
    }

    fn unconditional(&self) -> bool {
        true
    }

    fn supports(&self, _d: i64) -> bool {
        true
    }

    fn class_number(&self, d: i64) -> Result<u64> {
        reduced_forms_class_number(d)
    }

    fn sweep_range(&self, lo: u64, hi: u64) -> Result<Vec<(u64, u64)>> {
        // One chunked pass over the (a, b, c) grid. At prime discriminants
        // every form is primitive, so raw counts are the class numbers.
        const CHUNK: u64 = 1 << 24;
        let primes: Vec<u64> = primes_in(lo.max(3) + 1, hi)?
            .into_iter()
            .filter(|&l| l % 4 == 3)
            .collect();
        let mut out = Vec::with_capacity(primes.len());
        let mut next_prime = 0usize;
        let mut chunk_lo = 0u64; // counts cover magnitudes (chunk_lo, chunk_hi]
        while chunk_lo < hi {
            let chunk_hi = (chunk_lo + CHUNK).min(hi);
            let counts = forms::bulk_chunk_counts(chunk_lo, chunk_hi);
            while next_prime < primes.len() && primes[next_prime] <= chunk_hi {
                let l = primes[next_prime];
                out.push((l, counts[(l - chunk_lo) as usize] as u64));
                next_prime += 1;
            }
            chunk_lo = chunk_hi;
        }
        Ok(out)
    }
}

struct CharSumAlgorithm;

impl CharSumAlgorithm {
    fn prime_disc(d: i64) -> Option<u64> {
        if d >= -3 {
            return None;
        }
        let l = (-d) as u64;
        if l % 4 == 3 && is_prime(l) {
            Some(l)
        } else {
            None
        }
    }
}

impl ClassNumberAlgorithm for CharSumAlgorithm {
    fn name(&self) -> &'static str {
        "charsum"
    }

    fn unconditional(&self) -> bool {
        true
    }

    fn supports(&self, d: i64) -> bool {
        Self::prime_disc(d).is_some()
    }

    fn class_number(&self, d: i64) -> Result<u64> {
        let l = Self::prime_disc(d).ok_or_else(|| {
            Error::domain(
                "class_number",
                format!("charsum needs a prime discriminant -l with l = 3 mod 4, got {d}"),
            )
        })?;
        class_number_char_sum(l)
    }
}

struct BsgsAlgorithm;

impl ClassNumberAlgorithm for BsgsAlgorithm {
    fn name(&self) -> &'static str {
        "bsgs"
    }

    fn unconditional(&self) -> bool {
        false
    }

    fn supports(&self, d: i64) -> bool {
        CharSumAlgorithm::prime_disc(d).is_some()
    }

    fn class_number(&self, d: i64) -> Result<u64> {
        let l = CharSumAlgorithm::prime_disc(d).ok_or_else(|| {
            Error::domain(
                "class_number",
                format!("bsgs needs a prime discriminant -l with l = 3 mod 4, got {d}"),
            )
        })?;
        bsgs::class_number_bsgs(l)
    }

    fn sweep_range(&self, lo: u64, hi: u64) -> Result<Vec<(u64, u64)>> {
        let primes: Vec<u64> = primes_in(lo.max(3) + 1, hi)?
            .into_iter()
            .filter(|&l| l % 4 == 3)
            .collect();
        let entries: Vec<(u64, u64)> = primes
            .par_iter()
            .map(|&l| Ok((l, bsgs::class_number_bsgs(l)?)))
            .collect::<Result<_>>()?;
        // Verify a deterministic 1% sample against the unconditional path.
        let mut rng = ChaCha8Rng::seed_from_u64(hi);
        let sample_size = (entries.len() / 100).max(1).min(entries.len());
        let mut idx: Vec<usize> = (0..entries.len()).collect();
        idx.shuffle(&mut rng);
        for &i in idx.iter().take(sample_size) {
            let (l, h) = entries[i];
            let exact = class_number_char_sum(l)?;
            if exact != h {
                return Err(Error::Integrity(format!(
                    "bsgs produced h = {h} at l = {l}, character sum says {exact}"
                )));
            }
        }
        Ok(entries)
    }
}

static FORMS: FormsAlgorithm = FormsAlgorithm;
static CHARSUM: CharSumAlgorithm = CharSumAlgorithm;
static BSGS: BsgsAlgorithm = BsgsAlgorithm;

/// All registered backends, unconditional ones first.
pub fn algorithms() -> &'static [&'static dyn ClassNumberAlgorithm] {
    static REGISTRY: [&dyn ClassNumberAlgorithm; 3] = [&CHARSUM, &FORMS, &BSGS];
    &REGISTRY
}

/// Look a backend up by its registered name.
pub fn algorithm(name: &str) -> Option<&'static dyn ClassNumberAlgorithm> {
    algorithms().iter().copied().find(|a| a.name() == name)
}

/// The default single-discriminant dispatch: the character-sum fast path
/// where it applies, the forms oracle everywhere else.
pub fn class_number(d: i64) -> Result<u64> {
    validate_fundamental(d)?;
    if CHARSUM.supports(d) {
        CHARSUM.class_number(d)
    } else {
        FORMS.class_number(d)
    }
}

/// Name of the backend `class_number` would use for d.
pub fn default_algorithm_for(d: i64) -> &'static str {
    if CHARSUM.supports(d) {
        CHARSUM.name()
    } else {
        FORMS.name()
    }
}

/// Complete table of h(-l) for all primes l = 3 mod 4 in (3, L].
pub fn class_number_sweep(bound: u64, algo: &dyn ClassNumberAlgorithm) -> Result<ClassNumberTable> {
    if bound < 7 {
        return Err(Error::domain("class_number_sweep", "bound must be at least 7"));
    }
    let entries = algo.sweep_range(3, bound)?;
    Ok(ClassNumberTable::new(bound, true, entries))
}

/// `class_number_sweep` with the default backend.
pub fn class_number_sweep_default(bound: u64) -> Result<ClassNumberTable> {
    class_number_sweep(bound, &CHARSUM)
}
