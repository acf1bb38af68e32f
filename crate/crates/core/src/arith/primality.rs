//! Deterministic primality for the full u64 range.

/// (a * b) mod m without overflow.
#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// a^e mod m.
#[inline]
pub fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc: u64 = 1;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

#[inline]
fn strong_probable_prime(n: u64, base: u64) -> bool {
    let a = base % n;
    if a == 0 {
        return true;
    }
    let r = (n - 1).trailing_zeros();
    let d = (n - 1) >> r;
    let mut x = pow_mod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..r {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic Miller-Rabin. The base sets below decide primality exactly
/// (no probabilistic error): {2, 7, 61} for n < 4_759_123_141 and the
/// seven-base Sinclair set for all n < 2^64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    if n < 4_759_123_141 {
        [2u64, 7, 61].iter().all(|&b| strong_probable_prime(n, b))
    } else {
        [
            2u64,
            325,
            9375,
            28178,
            450775,
            9780504,
            1795265022,
        ]
        .iter()
        .all(|&b| strong_probable_prime(n, b))
    }
}
