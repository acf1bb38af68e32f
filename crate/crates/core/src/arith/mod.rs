//! Integer arithmetic substrate: primality, sieving, symbols, factorization
//! and the counting functions built on them.

pub mod factor;
pub mod kronecker;
pub mod primality;
pub mod sieve;
pub mod stats;

pub use factor::{big_omega, euler_phi, factorize, is_squarefree, omega, tau_prime, FactoredInteger};
pub use kronecker::kronecker;
pub use primality::is_prime;
pub use sieve::{count_primes_in, for_each_prime_in, primes_in, simple_sieve};
pub use stats::{
    count_big_omega_ge, count_omega_eq, mean_tau_prime, shifted_prime_divisor_density,
};
