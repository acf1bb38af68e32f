use crate::error::{Error, Result};

/// Kronecker symbol (d|n), defined for all integer pairs except (0, 0).
///
/// Fully multiplicative in n, agrees with the Legendre symbol when n is an
/// odd prime, and extends to n = 2, n = -1 and n = 0 by the usual rules.
pub fn kronecker(d: i64, n: i64) -> Result<i32> {
    if d == 0 && n == 0 {
        return Err(Error::domain("kronecker", "(0, 0) is outside the domain"));
    }
    if n == 0 {
        return Ok(if d == 1 || d == -1 { 1 } else { 0 });
    }

    let mut acc: i32 = 1;
    let mut n = n;
    if n < 0 {
        n = -n;
        if d < 0 {
            acc = -acc;
        }
    }

    // Pull out the even part of n; (d|2) depends on d mod 8.
    if n % 2 == 0 {
        if d % 2 == 0 {
            return Ok(0);
        }
        let d8 = d.rem_euclid(8);
        let flip = d8 == 3 || d8 == 5;
        while n % 2 == 0 {
            n /= 2;
            if flip {
                acc = -acc;
            }
        }
    }
    if n == 1 {
        return Ok(acc);
    }

    // Jacobi loop on odd n > 1 via quadratic reciprocity.
    let mut a = d.rem_euclid(n) as u64;
    let mut n = n as u64;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let n8 = n % 8;
            if n8 == 3 || n8 == 5 {
                acc = -acc;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            acc = -acc;
        }
        a %= n;
    }
    Ok(if n == 1 { acc } else { 0 })
}
