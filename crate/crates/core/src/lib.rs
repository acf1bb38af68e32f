//! Olson degrees, imaginary-quadratic class numbers, and the divisibility
//! constraints governing torsion of CM elliptic curves over number fields.
//!
//! The crate is organized around five subsystems:
//!
//! * [`arith`] - primality, sieving, Kronecker symbols, factorization and
//!   integer-anatomy statistics;
//! * [`classnum`] - exact class numbers h(-l) with interchangeable backends
//!   and a persistent table format;
//! * [`olson`] - the generator set, the set-of-multiples sieve, per-degree
//!   verdicts and the prime-power scan;
//! * [`divisibility`] - the per-prime torsion divisibility constants and the
//!   Lambda-set feasibility filters;
//! * [`tcm`] - certified lower bounds and known exact values for the maximal
//!   torsion size in a given degree.

pub mod arith;
pub mod classnum;
pub mod divisibility;
pub mod error;
pub mod olson;
pub mod ratio;
pub mod tcm;

pub use error::{Error, Result};
pub use ratio::Ratio;
