//! Arithmetic in the form class group: reduction, composition, powering, and
//! element orders. Used by the baby-step/giant-step path and by the fast
//! "does h divide m" refutations.

use std::collections::HashMap;

use crate::arith::kronecker::kronecker;
use crate::arith::primality::is_prime;

/// A primitive positive-definite binary quadratic form a x^2 + b xy + c y^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Form {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    // returns (g, x, y) with a*x + b*y = g >= 0
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i128, 0i128);
    let (mut y0, mut y1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

impl Form {
    pub fn discriminant(&self) -> i64 {
        let b = self.b as i128;
        let ac = self.a as i128 * self.c as i128;
        (b * b - 4 * ac) as i64
    }

    /// The principal form of discriminant d.
    pub fn identity(d: i64) -> Form {
        let b = (-d).rem_euclid(2) as i128;
        let c = ((b * b - d as i128) / 4) as i64;
        Form { a: 1, b: b as i64, c }
    }

    pub fn is_identity(&self) -> bool {
        self.a == 1
    }

    pub fn inverse(&self) -> Form {
        Form {
            a: self.a,
            b: -self.b,
            c: self.c,
        }
        .reduced()
    }

    fn is_normal(&self) -> bool {
        -self.a < self.b && self.b <= self.a
    }

    fn normalize(&mut self) {
        if self.is_normal() {
            return;
        }
        let a = self.a as i128;
        let b = self.b as i128;
        // r = round b into (-a, a]
        let r = (a - b).div_euclid(2 * a);
        let b_new = b + 2 * r * a;
        let c_new = self.c as i128 + r * (b + r * a);
        self.b = b_new as i64;
        self.c = c_new as i64;
    }

    pub fn reduced(mut self) -> Form {
        self.normalize();
        while self.a > self.c || (self.a == self.c && self.b < 0) {
            // flip (a,b,c) -> (c,-b,a) then renormalize
            self = Form {
                a: self.c,
                b: -self.b,
                c: self.a,
            };
            self.normalize();
        }
        self
    }

    /// Gauss composition, reduced.
    pub fn compose(&self, other: &Form) -> Form {
        let (f1, f2) = if self.a <= other.a {
            (self, other)
        } else {
            (other, self)
        };
        let a1 = f1.a as i128;
        let b1 = f1.b as i128;
        let a2 = f2.a as i128;
        let b2 = f2.b as i128;
        let c2 = f2.c as i128;

        let s = (b1 + b2) / 2;
        let n = b2 - s;

        let (d, y1) = if a2 % a1 == 0 {
            (a1, 0i128)
        } else {
            let (d, u, _) = xgcd(a2, a1);
            (d, u)
        };
        let (d1, x2, y2) = if s % d == 0 {
            (d, 0i128, -1i128)
        } else {
            let (d1, u, v) = xgcd(s, d);
            (d1, u, -v)
        };
        let v1 = a1 / d1;
        let v2 = a2 / d1;
        let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
        let a3 = v1 * v2;
        let b3 = b2 + 2 * v2 * r;
        let c3 = (c2 * d1 + r * (b2 + v2 * r)) / v1;
        Form {
            a: a3 as i64,
            b: b3 as i64,
            c: c3 as i64,
        }
        .reduced()
    }

    pub fn square(&self) -> Form {
        self.compose(self)
    }

    pub fn pow(&self, mut e: u64) -> Form {
        let mut base = *self;
        let mut acc = Form::identity(self.discriminant());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }
}

/// A reduced form of discriminant d with leading coefficient q, for prime q
/// with (d|q) != -1 and q odd (or q = 2). None if q is inert or no square
/// root exists.
pub fn prime_form(d: i64, q: u64) -> Option<Form> {
    debug_assert!(is_prime(q));
    if kronecker(d, q as i64).ok()? < 0 {
        return None;
    }
    if q == 2 {
        // (d|2) >= 0 means d = 0 mod 4 or d = 1 mod 8
        let b = if d.rem_euclid(4) == 1 {
            1i64
        } else if d.rem_euclid(8) == 0 {
            0
        } else {
            2
        };
        let num = b as i128 * b as i128 - d as i128;
        if num % 8 != 0 {
            return None;
        }
        return Some(
            Form {
                a: 2,
                b,
                c: (num / 8) as i64,
            }
            .reduced(),
        );
    }
    // brute-force square root of d mod q; q is small in every caller
    let dq = d.rem_euclid(q as i64) as u64;
    let mut root = None;
    for b in 0..q {
        if (b * b) % q == dq {
            root = Some(b);
            break;
        }
    }
    let mut b = root? as i64;
    if (b - d).rem_euclid(2) != 0 {
        b = q as i64 - b;
    }
    let num = b as i128 * b as i128 - d as i128;
    debug_assert!(num % (4 * q as i128) == 0);
    Some(
        Form {
            a: q as i64,
            b,
            c: (num / (4 * q as i128)) as i64,
        }
        .reduced(),
    )
}

/// Smallest odd prime q <= limit, q < (1 + |d|)/4, that is NOT inert in the
/// field of discriminant d. For h(d) = 1 every such prime must be inert, so
/// finding one certifies h(d) > 1.
pub fn small_non_inert_prime(d: i64, limit: u64) -> Option<u64> {
    let cap = ((1 + (-d) as u128) / 4) as u64;
    let mut q = 2u64;
    while q <= limit && q < cap {
        if is_prime(q) && kronecker(d, q as i64).unwrap_or(-1) >= 0 {
            return Some(q);
        }
        q += 1;
    }
    None
}

/// Order of g in the class group, found by baby-step/giant-step under the
/// promise that the order is at most `bound`.
pub fn element_order(g: &Form, bound: u64) -> u64 {
    if g.is_identity() {
        return 1;
    }
    let m = (bound as f64).sqrt().ceil() as u64 + 1;
    let mut baby: HashMap<Form, u64> = HashMap::with_capacity(m as usize);
    let mut x = Form::identity(g.discriminant());
    for i in 0..m {
        baby.entry(x).or_insert(i); // keep the smallest exponent
        x = x.compose(g);
    }
    // x is now g^m
    let giant = x;
    let mut y = giant;
    let mut j = 1u64;
    let multiple = loop {
        if let Some(&i) = baby.get(&y) {
            break j * m - i;
        }
        y = y.compose(&giant);
        j += 1;
        assert!(j <= m + 2, "element order exceeds the stated bound");
    };
    // strip superfluous prime factors to get the exact order
    let mut order = multiple;
    let fac = crate::arith::factor::factorize(multiple).expect("order fits in u64");
    for &(p, _) in fac.factors() {
        while order % p == 0 && g.pow(order / p).is_identity() {
            order /= p;
        }
    }
    order
}
