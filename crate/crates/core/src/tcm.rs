//! Certified lower bounds and known exact values for T(d), the largest
//! torsion subgroup size of a CM elliptic curve over a degree-d field.
//!
//! Exact values are a small registry; everything else is a lower bound
//! assembled from independently justified witnesses: the universal floor 6,
//! the even-degree floor 12, registry values lifted through divisors, points
//! of order l in degree (l-1)/2 * h(-l) for ramified l = 3 mod 4, and points
//! of order l in degree (l-1)/3 on j = 0 curves for l = 1 mod 3.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::factor::factorize;
use crate::arith::primality::is_prime;
use crate::classnum::ClassNumbers;
use crate::error::{Error, Result};

/// How a certificate witness justifies its contribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessSource {
    /// The six torsion groups over Q occur in every degree.
    OlsonFloor,
    /// T(2) = 12 lifted to every even degree.
    EvenFloor,
    /// Registry value at the degree itself.
    KnownValue,
    /// Registry value at a proper divisor, lifted by base extension.
    DivisorMonotonicity,
    /// Point of order l in degree (l-1)/2 * h(-l), l = 3 mod 4 ramified.
    RamifiedEll,
    /// Point of order l on a j = 0 curve in degree (l-1)/3, l = 1 mod 3.
    SplitJZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TcmWitness {
    pub source: WitnessSource,
    /// The lower bound this witness yields on its own.
    pub bound: u64,
    /// The point order l for the curve-based sources.
    pub ell: Option<u64>,
    /// The divisor of d the witness fires through.
    pub base_degree: Option<u64>,
}

/// A proven lower bound for T(d) with every witness that justifies it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TcmCertificate {
    pub degree: u64,
    pub lower_bound: u64,
    pub witnesses: Vec<TcmWitness>,
}

/// Known exact values: T(1) = 6, T(2) = 12, T(8) = T(10) = 50, T(12) = 84,
/// and T(p) = 6 for every prime p >= 7 (prime degrees admit only the six
/// rational torsion groups).
pub fn known_tcm(d: u64) -> Option<u64> {
    match d {
        1 => Some(6),
        2 => Some(12),
        8 => Some(50),
        10 => Some(50),
        12 => Some(84),
        _ => {
            if d >= 7 && is_prime(d) {
                Some(6)
            } else {
                None
            }
        }
    }
}

const REGISTRY_SMALL: [(u64, u64); 5] = [(1, 6), (2, 12), (8, 50), (10, 50), (12, 84)];

/// Lower bound for T(d) with its certificate.
pub fn tcm_lower_bound(d: u64, source: &ClassNumbers) -> Result<TcmCertificate> {
    if d == 0 {
        return Err(Error::domain("tcm_lower_bound", "degree must be positive"));
    }
    let fac = factorize(d)?;
    let mut witnesses = vec![TcmWitness {
        source: WitnessSource::OlsonFloor,
        bound: 6,
        ell: None,
        base_degree: None,
    }];
    if d % 2 == 0 {
        witnesses.push(TcmWitness {
            source: WitnessSource::EvenFloor,
            bound: 12,
            ell: None,
            base_degree: Some(2),
        });
    }
    if let Some(v) = known_tcm(d) {
        if v > 6 {
            witnesses.push(TcmWitness {
                source: WitnessSource::KnownValue,
                bound: v,
                ell: None,
                base_degree: Some(d),
            });
        }
    }
    for &(base, value) in &REGISTRY_SMALL {
        if base > 2 && base < d && d % base == 0 {
            witnesses.push(TcmWitness {
                source: WitnessSource::DivisorMonotonicity,
                bound: value,
                ell: None,
                base_degree: Some(base),
            });
        }
    }
    for e in fac.divisors() {
        // order-l point on a j = 0 curve in degree (l-1)/3
        if let Some(ell) = e.checked_mul(3).and_then(|v| v.checked_add(1)) {
            if is_prime(ell) && ell >= 7 {
                witnesses.push(TcmWitness {
                    source: WitnessSource::SplitJZero,
                    bound: ell,
                    ell: Some(ell),
                    base_degree: Some(e),
                });
            }
        }
        // order-l point in degree (l-1)/2 * h(-l) for l = 3 mod 4, l > 3
        if e > 1 && e % 2 == 1 {
            let ell = 2 * e + 1;
            if is_prime(ell) && source.divides(ell, d / e)? {
                witnesses.push(TcmWitness {
                    source: WitnessSource::RamifiedEll,
                    bound: ell,
                    ell: Some(ell),
                    base_degree: Some(e),
                });
            }
        }
    }
    witnesses.sort_unstable_by_key(|w| (w.bound, w.ell, w.base_degree));
    let lower_bound = witnesses.iter().map(|w| w.bound).max().unwrap_or(6);
    Ok(TcmCertificate {
        degree: d,
        lower_bound,
        witnesses,
    })
}

/// Summary of a scaling experiment over the lower bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AvgSummary {
    pub x: u64,
    pub odd_only: bool,
    pub sum: u128,
    pub mean: f64,
    /// (checkpoint, running mean) at x/8, x/4, x/2, x.
    pub checkpoints: Vec<(u64, f64)>,
    /// Least-squares slope of log(mean) against log(x) over the checkpoints.
    pub slope: f64,
}

/// Sum the certified lower bounds over d <= x (odd d only when asked) and
/// fit the dyadic growth. The reduction is a fixed partition into index
/// ranges combined in order, so any worker count gives identical output.
pub fn avg_experiment(x: u64, odd_only: bool, source: &ClassNumbers) -> Result<AvgSummary> {
    if x < 16 {
        return Err(Error::domain("avg_experiment", "x must be at least 16"));
    }
    let marks = [x / 8, x / 4, x / 2, x];
    let mut boundaries = vec![1u64];
    boundaries.extend_from_slice(&marks);
    let mut sums = Vec::with_capacity(4);
    let mut running: u128 = 0;
    for w in boundaries.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        const CHUNK: u64 = 4096;
        let chunks: Vec<(u64, u64)> = (lo + 1..=hi)
            .step_by(CHUNK as usize)
            .map(|a| (a, (a + CHUNK - 1).min(hi)))
            .collect();
        let partial: Result<Vec<u128>> = chunks
            .par_iter()
            .map(|&(a, b)| {
                let mut s: u128 = 0;
                for d in a..=b {
                    if odd_only && d % 2 == 0 {
                        continue;
                    }
                    s += tcm_lower_bound(d, source)?.lower_bound as u128;
                }
                Ok(s)
            })
            .collect();
        running += partial?.into_iter().sum::<u128>();
        sums.push(running);
    }
    let checkpoints: Vec<(u64, f64)> = marks
        .iter()
        .zip(&sums)
        .map(|(&m, &s)| (m, s as f64 / m as f64))
        .collect();
    let slope = {
        let pts: Vec<(f64, f64)> = checkpoints
            .iter()
            .map(|&(m, v)| ((m as f64).ln(), v.ln()))
            .collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let den: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        num / den
    };
    Ok(AvgSummary {
        x,
        odd_only,
        sum: running,
        mean: running as f64 / x as f64,
        checkpoints,
        slope,
    })
}
