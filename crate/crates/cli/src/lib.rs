//! Command dispatch, report assembly and output rendering for the `cmtors`
//! binary. The heavy lifting lives in the `cmtors` library crate; this crate
//! owns the worker pool, the class-number cache files, and the stable output
//! schemas.
//!
//! Exit codes: 0 success, 2 usage error, 3 dependency/cache error, 4 domain
//! error.

mod output;
mod report;

pub use report::{Provenance, RunReport};

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use cmtors::arith;
use cmtors::classnum::{self, cache, ClassNumberAlgorithm, ClassNumberTable, ClassNumbers};
use cmtors::divisibility;
use cmtors::error::Error;
use cmtors::olson::{self, primepower};
use cmtors::tcm;

pub const CACHE_ENV_VAR: &str = "CMTORS_CACHE_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "cmtors",
    about = "Olson degrees, imaginary-quadratic class numbers, and CM torsion bounds",
    version
)]
pub struct Cli {
    /// Output format for the results payload
    #[arg(long, global = true, value_parser = ["table", "json", "csv"], default_value = "table")]
    pub format: String,

    /// Worker threads (default: all available)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Directory for persistent class-number caches (overrides CMTORS_CACHE_DIR)
    #[arg(long, global = true)]
    pub cache_path: Option<PathBuf>,

    /// Refuse any algorithm whose correctness rests on unproven assumptions
    #[arg(long, global = true)]
    pub unconditional_only: bool,

    /// Class-number backend: charsum, forms, or bsgs
    #[arg(long, global = true)]
    pub algorithm: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Class number of a fundamental discriminant, or `sweep L` for a table
    Classnum {
        /// A negative fundamental discriminant, or the word `sweep`
        #[arg(allow_hyphen_values = true)]
        target: String,
        /// Sweep bound (with `sweep`)
        bound: Option<u64>,
    },
    /// Olson degree queries
    Olson {
        #[command(subcommand)]
        action: OlsonAction,
    },
    /// Prime-power Olson queries
    Primepower {
        #[command(subcommand)]
        action: PrimepowerAction,
    },
    /// The divisibility set Lambda(n)
    Lambda { n: u64 },
    /// Torsion orders n <= max-order admissible in degree d
    Feasible {
        d: u64,
        #[arg(long)]
        max_order: u64,
    },
    /// Torsion-size bounds
    Tcm {
        #[command(subcommand)]
        action: TcmAction,
    },
    /// Integer-anatomy statistics
    Stats {
        #[command(subcommand)]
        action: StatsAction,
    },
    /// Scaling experiments
    Experiment {
        #[command(subcommand)]
        action: ExperimentAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum OlsonAction {
    /// Number of Olson degrees up to N
    Count { n: u64 },
    /// Verdict for a single degree
    Check { d: u64 },
    /// The generator set up to X
    Generators {
        x: u64,
        #[arg(long)]
        primitive: bool,
    },
    /// Exact Olson density up to N
    Density { n: u64 },
}

#[derive(Debug, Subcommand)]
pub enum PrimepowerAction {
    /// Verdict for p^n
    Check { p: u64, n: u32 },
    /// Exhaustive scan for non-Olson prime powers up to B
    Scan { b: u64 },
}

#[derive(Debug, Subcommand)]
pub enum TcmAction {
    /// Certified lower bound for the maximal torsion size in degree d
    Lb { d: u64 },
}

#[derive(Debug, Subcommand)]
pub enum StatsAction {
    /// Average of tau' over [1, y]
    Tauprime { y: u64 },
    /// Density of n <= x divisible by l-1 for some prime l > B
    DensityShifted { x: u64, b: u64 },
}

#[derive(Debug, Subcommand)]
pub enum ExperimentAction {
    /// Sum of certified lower bounds over degrees up to x
    Avg {
        x: u64,
        #[arg(long)]
        odd: bool,
    },
}

/// A failure carrying its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Domain { .. } | Error::Contract { .. } | Error::Overflow(_) => 4,
            Error::Dependency(_) | Error::Integrity(_) | Error::Parse { .. } | Error::Io(_) => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

/// JSON value for a u128, falling back to a decimal string past u64 range.
fn big(v: u128) -> Value {
    match u64::try_from(v) {
        Ok(small) => json!(small),
        Err(_) => json!(v.to_string()),
    }
}

fn resolve_algorithm(cli: &Cli) -> Result<&'static dyn ClassNumberAlgorithm, Failure> {
    let name = cli.algorithm.as_deref().unwrap_or("charsum");
    let algo = classnum::algorithm(name)
        .ok_or_else(|| Failure::usage(format!("unknown algorithm '{name}'")))?;
    if cli.unconditional_only && !algo.unconditional() {
        return Err(Failure::usage(format!(
            "--unconditional-only forbids the '{name}' path"
        )));
    }
    Ok(algo)
}

fn cache_dir(cli: &Cli) -> Option<PathBuf> {
    cli.cache_path
        .clone()
        .or_else(|| std::env::var_os(CACHE_ENV_VAR).map(PathBuf::from))
}

struct SweepOutcome {
    table: ClassNumberTable,
    hits: u64,
    misses: u64,
}

/// Produce a complete sweep to `bound`, consulting and updating the cache
/// directory when one is configured. A stored partial file is extended; a
/// stored complete file is served as-is.
fn sweep_with_cache(
    bound: u64,
    algo: &dyn ClassNumberAlgorithm,
    dir: Option<&PathBuf>,
) -> Result<SweepOutcome, Failure> {
    // progress goes to the diagnostic stream; stdout stays machine-readable
    if bound >= 1_000_000 {
        eprintln!("sweeping class numbers for primes l = 3 mod 4 up to {bound} ({})", algo.name());
    }
    let path = dir.map(|d| d.join(format!("classnum-sweep-{bound}.txt")));
    if let Some(path) = &path {
        if path.exists() {
            let loaded = cache::cache_load(path)?;
            if loaded.is_complete() && loaded.upper_bound() >= bound {
                let hits = loaded.entries().len() as u64;
                return Ok(SweepOutcome {
                    table: loaded,
                    hits,
                    misses: 0,
                });
            }
            // partial cache: extend past its last entry, merge, re-store
            let hits = loaded.entries().len() as u64;
            let from = loaded.upper_bound().max(3);
            let fresh = ClassNumberTable::new(bound, false, algo.sweep_range(from, bound)?);
            let misses = fresh.entries().len() as u64;
            let merged = loaded.merge(&fresh)?;
            if !merged.is_complete() || merged.upper_bound() < bound {
                return Err(Failure::from(Error::Dependency(format!(
                    "cache at {} does not extend to a complete table",
                    path.display()
                ))));
            }
            cache::cache_store(path, &merged)?;
            return Ok(SweepOutcome {
                table: merged,
                hits,
                misses,
            });
        }
    }
    let table = classnum::class_number_sweep(bound, algo)?;
    let misses = table.entries().len() as u64;
    if let Some(path) = &path {
        cache::cache_store(path, &table)?;
    }
    Ok(SweepOutcome {
        table,
        hits: 0,
        misses,
    })
}

fn generator_table_bound(n: u64) -> u64 {
    (2 * n + 1).max(7)
}

/// Execute a parsed command inside the caller's rayon pool.
pub fn execute(cli: &Cli) -> Result<RunReport, Failure> {
    let started = Instant::now();
    let algo = resolve_algorithm(cli)?;
    let dir = cache_dir(cli);
    let workers = rayon::current_num_threads();

    let (command, params, result, provenance): (String, Value, Value, Provenance) = match &cli
        .command
    {
        Command::Classnum { target, bound } => {
            if target == "sweep" {
                let l = bound.ok_or_else(|| Failure::usage("classnum sweep needs a bound"))?;
                let outcome = sweep_with_cache(l, algo, dir.as_ref())?;
                let entries: Vec<Value> = outcome
                    .table
                    .entries()
                    .iter()
                    .map(|&(ell, h)| json!({"ell": ell, "h": h}))
                    .collect();
                (
                    "classnum sweep".into(),
                    json!({"bound": l}),
                    json!({
                        "bound": l,
                        "count": outcome.table.entries().len(),
                        "entries": entries,
                    }),
                    Provenance::new(algo.name(), algo.unconditional(), outcome.hits, outcome.misses),
                )
            } else {
                if bound.is_some() {
                    return Err(Failure::usage("classnum takes one discriminant"));
                }
                let d: i64 = target
                    .parse()
                    .map_err(|_| Failure::usage(format!("'{target}' is not an integer")))?;
                // honor an explicit --algorithm, otherwise dispatch adaptively
                let (h, used) = if cli.algorithm.is_some() {
                    classnum::validate_fundamental(d)?;
                    if !algo.supports(d) {
                        return Err(Failure::usage(format!(
                            "algorithm '{}' does not support discriminant {d}",
                            algo.name()
                        )));
                    }
                    (algo.class_number(d)?, algo.name())
                } else {
                    (classnum::class_number(d)?, classnum::default_algorithm_for(d))
                };
                (
                    "classnum".into(),
                    json!({"disc": d}),
                    json!({"disc": d, "h": h, "unit_count": classnum::unit_count(d)}),
                    Provenance::new(used, true, 0, 0),
                )
            }
        }
        Command::Olson { action } => match action {
            OlsonAction::Count { n } => {
                let outcome = sweep_with_cache(generator_table_bound(*n), algo, dir.as_ref())?;
                let gens = olson::generators(*n, true, &outcome.table)?;
                let count = olson::count_olson(*n, &gens)?;
                (
                    "olson count".into(),
                    json!({"n": n}),
                    json!({
                        "n": n,
                        "olson_count": count,
                        "non_olson_count": n - count,
                        "density": count as f64 / *n as f64,
                        "generator_count": gens.entries.len(),
                    }),
                    Provenance::new(algo.name(), algo.unconditional(), outcome.hits, outcome.misses),
                )
            }
            OlsonAction::Check { d } => {
                let source = ClassNumbers::new();
                let verdict = olson::is_olson(*d, &source)?;
                let (hits, misses) = source.stats();
                (
                    "olson check".into(),
                    json!({"d": d}),
                    verdict_value(&verdict),
                    Provenance::new("charsum", true, hits, misses),
                )
            }
            OlsonAction::Generators { x, primitive } => {
                let outcome = sweep_with_cache(generator_table_bound(*x), algo, dir.as_ref())?;
                let gens = olson::generators(*x, *primitive, &outcome.table)?;
                let entries: Vec<Value> = gens
                    .entries
                    .iter()
                    .map(|e| json!({"g": e.g, "ell": e.witness_prime, "h": e.witness_h}))
                    .collect();
                (
                    "olson generators".into(),
                    json!({"x": x, "primitive": primitive}),
                    json!({
                        "bound": x,
                        "primitive": primitive,
                        "count": entries.len(),
                        "entries": entries,
                    }),
                    Provenance::new(algo.name(), algo.unconditional(), outcome.hits, outcome.misses),
                )
            }
            OlsonAction::Density { n } => {
                let outcome = sweep_with_cache(generator_table_bound(*n), algo, dir.as_ref())?;
                let gens = olson::generators(*n, true, &outcome.table)?;
                let density = olson::olson_density(*n, &gens)?;
                (
                    "olson density".into(),
                    json!({"n": n}),
                    json!({
                        "n": n,
                        "olson_count": big(density.num),
                        "numerator": big(density.num),
                        "denominator": big(density.den),
                        "density": density.to_f64(),
                    }),
                    Provenance::new(algo.name(), algo.unconditional(), outcome.hits, outcome.misses),
                )
            }
        },
        Command::Primepower { action } => match action {
            PrimepowerAction::Check { p, n } => {
                let source = ClassNumbers::new();
                let verdict = primepower::is_prime_power_olson(*p, *n, &source)?;
                let (hits, misses) = source.stats();
                (
                    "primepower check".into(),
                    json!({"p": p, "n": n}),
                    verdict_value(&verdict),
                    Provenance::new("charsum", true, hits, misses),
                )
            }
            PrimepowerAction::Scan { b } => {
                if *b >= 100_000_000 {
                    eprintln!("scanning prime powers up to {b}");
                }
                let hits = primepower::prime_power_scan(*b)?;
                let list: Vec<Value> = hits
                    .iter()
                    .map(|h| json!({"p": h.p, "n": h.n, "r": h.r, "ell": h.ell, "h": h.h}))
                    .collect();
                (
                    "primepower scan".into(),
                    json!({"b": b}),
                    json!({"b": b, "non_olson_count": list.len(), "non_olson": list}),
                    Provenance::new("charsum", true, 0, 0),
                )
            }
        },
        Command::Lambda { n } => {
            let set = divisibility::lambda_set(*n)?;
            let elements: Vec<Value> = set.elements.iter().map(|&l| big(l)).collect();
            (
                "lambda".into(),
                json!({"n": n}),
                json!({"n": n, "count": elements.len(), "elements": elements}),
                Provenance::new("none", true, 0, 0),
            )
        }
        Command::Feasible { d, max_order } => {
            let orders = divisibility::feasible_orders(*d, *max_order)?;
            (
                "feasible".into(),
                json!({"d": d, "max_order": max_order}),
                json!({"d": d, "max_order": max_order, "count": orders.len(), "orders": orders}),
                Provenance::new("none", true, 0, 0),
            )
        }
        Command::Tcm { action } => match action {
            TcmAction::Lb { d } => {
                let source = ClassNumbers::new();
                let cert = tcm::tcm_lower_bound(*d, &source)?;
                let witnesses: Vec<Value> = cert
                    .witnesses
                    .iter()
                    .map(|w| {
                        json!({
                            "source": serde_json::to_value(w.source).unwrap(),
                            "bound": w.bound,
                            "ell": w.ell,
                            "base_degree": w.base_degree,
                        })
                    })
                    .collect();
                let (hits, misses) = source.stats();
                (
                    "tcm lb".into(),
                    json!({"d": d}),
                    json!({
                        "d": d,
                        "lower_bound": cert.lower_bound,
                        "known_exact": tcm::known_tcm(*d),
                        "witnesses": witnesses,
                    }),
                    Provenance::new("charsum", true, hits, misses),
                )
            }
        },
        Command::Stats { action } => match action {
            StatsAction::Tauprime { y } => {
                let mean = arith::mean_tau_prime(*y)?;
                let zeta2 = std::f64::consts::PI * std::f64::consts::PI / 6.0;
                (
                    "stats tauprime".into(),
                    json!({"y": y}),
                    json!({
                        "y": y,
                        "numerator": big(mean.num),
                        "denominator": big(mean.den),
                        "mean": mean.to_f64(),
                        "zeta2_delta": mean.to_f64() - zeta2,
                    }),
                    Provenance::new("none", true, 0, 0),
                )
            }
            StatsAction::DensityShifted { x, b } => {
                let frac = arith::shifted_prime_divisor_density(*x, *b)?;
                (
                    "stats density-shifted".into(),
                    json!({"x": x, "b": b}),
                    json!({
                        "x": x,
                        "b": b,
                        "numerator": big(frac.num),
                        "denominator": big(frac.den),
                        "density": frac.to_f64(),
                    }),
                    Provenance::new("none", true, 0, 0),
                )
            }
        },
        Command::Experiment { action } => match action {
            ExperimentAction::Avg { x, odd } => {
                let source = ClassNumbers::new();
                source.ensure_bound(generator_table_bound(*x), algo)?;
                let summary = tcm::avg_experiment(*x, *odd, &source)?;
                let checkpoints: Vec<Value> = summary
                    .checkpoints
                    .iter()
                    .map(|&(m, v)| json!({"x": m, "mean": v}))
                    .collect();
                let (hits, misses) = source.stats();
                (
                    "experiment avg".into(),
                    json!({"x": x, "odd": odd}),
                    json!({
                        "x": x,
                        "odd_only": odd,
                        "sum": big(summary.sum),
                        "mean": summary.mean,
                        "checkpoints": checkpoints,
                        "slope": summary.slope,
                    }),
                    Provenance::new(algo.name(), algo.unconditional(), hits, misses),
                )
            }
        },
    };

    Ok(RunReport {
        command,
        params,
        result,
        provenance,
        timing_ms: started.elapsed().as_secs_f64() * 1e3,
        workers,
    })
}

fn verdict_value(v: &olson::OlsonVerdict) -> Value {
    json!({
        "degree": v.degree,
        "olson": v.olson,
        "witness": v.witness.as_ref().map(|w| json!({
            "g": w.g,
            "ell": w.witness_prime,
            "h": w.witness_h,
        })),
    })
}

/// Parse arguments, build the worker pool, execute, and render. Returns the
/// process exit code.
pub fn try_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own message; usage problems exit 2
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let threads = cli
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if threads == 0 {
        eprintln!("error: --threads must be at least 1");
        return 2;
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot build worker pool: {e}");
            return 3;
        }
    };
    match pool.install(|| execute(&cli)) {
        Ok(report) => {
            output::render(&cli.format, &report);
            0
        }
        Err(failure) => {
            eprintln!("error: {failure}");
            failure.code
        }
    }
}

/// Test helper: run a full argv in a fresh pool and return the report.
pub fn run_for_report(args: &[&str], threads: usize) -> Result<RunReport, Failure> {
    let cli = Cli::try_parse_from(args).map_err(|e| Failure::usage(e.to_string()))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("pool");
    pool.install(|| execute(&cli))
}
