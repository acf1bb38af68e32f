//! Per-prime divisibility constants for CM torsion, their aggregation into
//! degree constraints, and the Lambda-set feasibility filters.
//!
//! For a curve with CM by the order of discriminant Delta over a degree-d
//! field containing the CM field, an l-primary torsion subgroup
//! Z/l^a x Z/l^b pins an exact constant lambda depending on the splitting of
//! l, and h_K times the product of the lambdas divides 6d. The Lambda(n)
//! sets enumerate the possible products over all splitting behaviors, giving
//! a necessary condition that needs nothing but n and d.

use serde::Serialize;

use crate::arith::factor::factorize;
use crate::arith::kronecker::kronecker;
use crate::arith::primality::is_prime;
use crate::classnum::ImQuadField;
use crate::error::{Error, Result};

/// An imaginary quadratic order: discriminant Delta = f^2 * Delta_K.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CMContext {
    pub order_disc: i64,
    pub fundamental_disc: i64,
    pub conductor: u64,
    pub field: ImQuadField,
}

impl CMContext {
    /// Split an order discriminant into conductor and fundamental part.
    pub fn new(order_disc: i64) -> Result<Self> {
        if order_disc >= 0 {
            return Err(Error::domain("cm_context", "order discriminant must be negative"));
        }
        let m4 = order_disc.rem_euclid(4);
        if m4 != 0 && m4 != 1 {
            return Err(Error::domain(
                "cm_context",
                format!("{order_disc} = {m4} mod 4 is not a discriminant"),
            ));
        }
        let fac = factorize((-order_disc) as u64)?;
        let mut square_part = 1u64;
        let mut kernel = 1u64; // squarefree part of |Delta|
        for &(p, e) in fac.factors() {
            for _ in 0..e / 2 {
                square_part = square_part
                    .checked_mul(p)
                    .ok_or(Error::Overflow("conductor"))?;
            }
            if e % 2 == 1 {
                kernel *= p;
            }
        }
        let (fundamental_disc, conductor) = if kernel % 4 == 3 {
            (-(kernel as i64), square_part)
        } else {
            // kernel = 1 or 2 mod 4, so the fundamental part is -4*kernel
            // and the square part must carry the factor 2
            if square_part % 2 != 0 {
                return Err(Error::domain(
                    "cm_context",
                    format!("{order_disc} cannot be written as f^2 times a fundamental discriminant"),
                ));
            }
            (-4 * kernel as i64, square_part / 2)
        };
        let field = ImQuadField::new(fundamental_disc)?;
        Ok(CMContext {
            order_disc,
            fundamental_disc,
            conductor,
            field,
        })
    }
}

/// The l-primary shape Z/l^a x Z/l^b of a torsion subgroup, per prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TorsionComponent {
    pub ell: u64,
    pub a: u32,
    pub b: u32,
}

/// A full torsion order n with its per-prime (a, b) decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TorsionProfile {
    n: u128,
    components: Vec<TorsionComponent>,
}

impl TorsionProfile {
    pub fn new(components: Vec<TorsionComponent>) -> Result<Self> {
        let mut n: u128 = 1;
        let mut last = 0u64;
        for c in &components {
            if c.ell <= last || !is_prime(c.ell) {
                return Err(Error::domain(
                    "torsion_profile",
                    format!("{} must be a prime exceeding the previous component", c.ell),
                ));
            }
            last = c.ell;
            if c.b == 0 || c.a > c.b {
                return Err(Error::domain(
                    "torsion_profile",
                    format!("component at {} needs 0 <= a <= b with b >= 1", c.ell),
                ));
            }
            for _ in 0..c.a + c.b {
                n = n
                    .checked_mul(c.ell as u128)
                    .ok_or(Error::Overflow("torsion order"))?;
            }
        }
        Ok(TorsionProfile { n, components })
    }

    pub fn order(&self) -> u128 {
        self.n
    }

    pub fn components(&self) -> &[TorsionComponent] {
        &self.components
    }
}

/// A finite abelian group of torsion rank <= 2, written Z/n1 x Z/n2 with
/// n1 | n2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TorsionGroup {
    pub n1: u64,
    pub n2: u64,
}

impl TorsionGroup {
    pub fn new(n1: u64, n2: u64) -> Result<Self> {
        if n1 == 0 || n2 % n1 != 0 {
            return Err(Error::domain(
                "torsion_group",
                format!("need n1 | n2 with n1 >= 1, got ({n1}, {n2})"),
            ));
        }
        Ok(TorsionGroup { n1, n2 })
    }

    pub fn order(&self) -> u128 {
        self.n1 as u128 * self.n2 as u128
    }
}

fn pow_u128(base: u64, exp: u32, what: &'static str) -> Result<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base as u128).ok_or(Error::Overflow(what))?;
    }
    Ok(acc)
}

/// The three-element set Lambda(l^alpha).
pub fn lambda_set_prime_power(ell: u64, alpha: u32) -> Result<Vec<u128>> {
    if !is_prime(ell) {
        return Err(Error::domain(
            "lambda_set_prime_power",
            format!("{ell} is not prime"),
        ));
    }
    if alpha == 0 {
        return Err(Error::domain("lambda_set_prime_power", "exponent must be >= 1"));
    }
    let l = ell as u128;
    let mut vals = if alpha == 1 {
        vec![l * l - 1, (l - 1) * (l - 1), l - 1]
    } else {
        let la2 = pow_u128(ell, alpha - 2, "lambda")?;
        vec![
            la2.checked_mul((l - 1) * (l + 1)).ok_or(Error::Overflow("lambda"))?,
            la2.checked_mul((l - 1) * (l - 1)).ok_or(Error::Overflow("lambda"))?,
            la2.checked_mul(l).and_then(|v| v.checked_mul(l - 1)).ok_or(Error::Overflow("lambda"))?,
        ]
    };
    vals.sort_unstable();
    vals.dedup();
    Ok(vals)
}

/// All products of per-prime-power choices, deduplicated and sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LambdaSet {
    pub n: u64,
    pub elements: Vec<u128>,
}

pub fn lambda_set(n: u64) -> Result<LambdaSet> {
    if n < 2 {
        return Err(Error::domain("lambda_set", "n must be at least 2"));
    }
    let fac = factorize(n)?;
    let mut elements: Vec<u128> = vec![1];
    for &(p, e) in fac.factors() {
        let choices = lambda_set_prime_power(p, e)?;
        let mut next = Vec::with_capacity(elements.len() * choices.len());
        for &acc in &elements {
            for &c in &choices {
                next.push(acc.checked_mul(c).ok_or(Error::Overflow("lambda product"))?);
            }
        }
        elements = next;
    }
    elements.sort_unstable();
    elements.dedup();
    Ok(LambdaSet { n, elements })
}

/// The exact per-prime constant for a curve with CM by the order of
/// discriminant ctx.order_disc and l-primary torsion Z/l^a x Z/l^b:
///
/// * (Delta|l) = -1 forces a = b, and lambda = l^(2b-2) (l^2 - 1);
/// * (Delta|l) = 1, a = 0: lambda = l^(b-1) (l - 1);
/// * (Delta|l) = 1, a >= 1: lambda = l^(a+b-2) (l - 1)^2;
/// * (Delta|l) = 0, l ramified in K: lambda = l^(a+b-1) (l - 1);
/// * (Delta|l) = 0, l unramified: lambda = l^max(a+b-2, 0) (l - 1) (l - (Delta_K|l)).
pub fn lambda_exact(ctx: &CMContext, ell: u64, a: u32, b: u32) -> Result<u128> {
    if !is_prime(ell) {
        return Err(Error::domain("lambda_exact", format!("{ell} is not prime")));
    }
    if b == 0 || a > b {
        return Err(Error::domain("lambda_exact", "need 0 <= a <= b with b >= 1"));
    }
    let l = ell as u128;
    let chi = kronecker(ctx.order_disc, ell as i64)?;
    match chi {
        -1 => {
            if a != b {
                return Err(Error::Contract {
                    op: "lambda_exact",
                    msg: format!(
                        "inert case at l = {ell} forces a = b ('then a=b'), got a = {a}, b = {b}"
                    ),
                });
            }
            let lp = pow_u128(ell, 2 * b - 2, "lambda")?;
            lp.checked_mul(l * l - 1).ok_or(Error::Overflow("lambda"))
        }
        1 => {
            if a == 0 {
                let lp = pow_u128(ell, b - 1, "lambda")?;
                lp.checked_mul(l - 1).ok_or(Error::Overflow("lambda"))
            } else {
                let lp = pow_u128(ell, a + b - 2, "lambda")?;
                lp.checked_mul((l - 1) * (l - 1)).ok_or(Error::Overflow("lambda"))
            }
        }
        _ => {
            let ramified = ctx.fundamental_disc.rem_euclid(ell as i64) == 0;
            if ramified {
                let lp = pow_u128(ell, a + b - 1, "lambda")?;
                lp.checked_mul(l - 1).ok_or(Error::Overflow("lambda"))
            } else {
                let lp = pow_u128(ell, (a + b).saturating_sub(2), "lambda")?;
                let chi_k = kronecker(ctx.fundamental_disc, ell as i64)?;
                let last = (ell as i128 - chi_k as i128) as u128;
                lp.checked_mul(l - 1)
                    .and_then(|v| v.checked_mul(last))
                    .ok_or(Error::Overflow("lambda"))
            }
        }
    }
}

/// #(O_K / l^b O_K)^x = l^(2b-2) (l - 1) (l - (Delta_K|l)).
pub fn ideal_totient(ell: u64, b: u32, fundamental_disc: i64) -> Result<u128> {
    if !is_prime(ell) {
        return Err(Error::domain("ideal_totient", format!("{ell} is not prime")));
    }
    if b == 0 {
        return Err(Error::domain("ideal_totient", "exponent must be >= 1"));
    }
    let l = ell as u128;
    let chi = kronecker(fundamental_disc, ell as i64)?;
    let lp = pow_u128(ell, 2 * b - 2, "ideal totient")?;
    lp.checked_mul(l - 1)
        .and_then(|v| v.checked_mul((ell as i128 - chi as i128) as u128))
        .ok_or(Error::Overflow("ideal totient"))
}

/// The aggregate necessary condition: h_K * prod lambda | 6d.
pub fn degree_admissible(profile: &TorsionProfile, ctx: &CMContext, d: u64) -> Result<bool> {
    if d == 0 {
        return Err(Error::domain("degree_admissible", "degree must be positive"));
    }
    let mut prod: u128 = ctx.field.class_number as u128;
    for c in profile.components() {
        let lam = lambda_exact(ctx, c.ell, c.a, c.b)?;
        prod = prod.checked_mul(lam).ok_or(Error::Overflow("degree constraint"))?;
    }
    Ok((6 * d as u128) % prod == 0)
}

/// The divisibility form of the Silverberg / Prasad-Yogananda bound for CM
/// by the maximal order: h_K * phi(N) | (w_K / 2) * d.
pub fn spy_divides(field: &ImQuadField, n_order: u64, d: u64) -> Result<bool> {
    if n_order == 0 || d == 0 {
        return Err(Error::domain("spy_divides", "order and degree must be positive"));
    }
    let phi = crate::arith::factor::euler_phi(n_order)? as u128;
    let lhs = (field.class_number as u128)
        .checked_mul(phi)
        .ok_or(Error::Overflow("spy"))?;
    let rhs = (field.unit_count as u128 / 2) * d as u128;
    Ok(rhs % lhs == 0)
}

/// Torsion orders n <= n_max passing the degree filter: some member of
/// Lambda(n) divides 12d. Necessary, never sufficient.
pub fn feasible_orders(d: u64, n_max: u64) -> Result<Vec<u64>> {
    if d == 0 {
        return Err(Error::domain("feasible_orders", "degree must be positive"));
    }
    if n_max < 2 {
        return Err(Error::domain("feasible_orders", "n_max must be at least 2"));
    }
    let target = 12 * d as u128;
    let mut out = Vec::new();
    for n in 2..=n_max {
        let lambda = lambda_set(n)?;
        if lambda.elements.iter().any(|&l| target % l == 0) {
            out.push(n);
        }
    }
    Ok(out)
}

/// Membership in the classification of odd-degree torsion subgroups: the
/// trivial group, Z/2, Z/4, Z/2 x Z/2, Z/l^k for a prime l = 3 mod 8, or
/// Z/2l^k for a prime l = 3 mod 4.
pub fn allowed_odd_degree_group(g: &TorsionGroup) -> bool {
    match (g.n1, g.n2) {
        (1, 1) | (1, 2) | (1, 4) | (2, 2) => true,
        (1, m) => {
            if let Some((p, _)) = prime_power_shape(m) {
                if p % 8 == 3 {
                    return true;
                }
            }
            if m % 2 == 0 {
                if let Some((p, _)) = prime_power_shape(m / 2) {
                    return p % 4 == 3;
                }
            }
            false
        }
        _ => false,
    }
}

/// m = p^k with k >= 1, if it is one.
fn prime_power_shape(m: u64) -> Option<(u64, u32)> {
    if m < 2 {
        return None;
    }
    let fac = factorize(m).ok()?;
    if fac.omega() == 1 {
        let (p, e) = fac.factors()[0];
        Some((p, e))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_prime_power_examples() {
        assert_eq!(lambda_set_prime_power(3, 1).unwrap(), vec![2, 4, 8]);
        assert_eq!(lambda_set_prime_power(2, 2).unwrap(), vec![1, 2, 3]);
        for l in [3u64, 5, 7, 11, 13] {
            assert!(lambda_set_prime_power(l, 1).unwrap().contains(&((l - 1) as u128)));
        }
        assert!(lambda_set_prime_power(4, 1).is_err());
        assert!(lambda_set_prime_power(3, 0).is_err());
    }

    #[test]
    fn lambda_set_examples() {
        assert_eq!(lambda_set(5).unwrap().elements, vec![4, 16, 24]);
        assert_eq!(lambda_set(12).unwrap().elements, vec![2, 4, 6, 8, 12, 16, 24]);
        for l in [3u64, 7, 11] {
            assert_eq!(
                lambda_set(l).unwrap().elements,
                lambda_set_prime_power(l, 1).unwrap()
            );
        }
        assert!(lambda_set(1).is_err());
    }

    #[test]
    fn cm_context_decomposition() {
        let c = CMContext::new(-36).unwrap();
        assert_eq!(c.fundamental_disc, -4);
        assert_eq!(c.conductor, 3);
        let c = CMContext::new(-7).unwrap();
        assert_eq!((c.fundamental_disc, c.conductor), (-7, 1));
        let c = CMContext::new(-28).unwrap();
        assert_eq!((c.fundamental_disc, c.conductor), (-7, 2));
        let c = CMContext::new(-12).unwrap();
        assert_eq!((c.fundamental_disc, c.conductor), (-3, 2));
        assert!(CMContext::new(-5).is_err());
        assert!(CMContext::new(4).is_err());
    }

    #[test]
    fn lambda_exact_cases() {
        // inert: Delta = -4, l = 3, a = b = 1
        let qi = CMContext::new(-4).unwrap();
        assert_eq!(lambda_exact(&qi, 3, 1, 1).unwrap(), 8);
        // ramified: Delta = -3, l = 3, (a, b) = (0, 1)
        let w = CMContext::new(-3).unwrap();
        assert_eq!(lambda_exact(&w, 3, 0, 1).unwrap(), 2);
        // unramified, l | conductor: Delta = -36 = 9 * (-4), l = 3
        let c = CMContext::new(-36).unwrap();
        assert_eq!(lambda_exact(&c, 3, 0, 1).unwrap(), 8);
        // split with a = 0: Delta = -7, l = 2 splits ((-7|2) = 1)
        let k7 = CMContext::new(-7).unwrap();
        assert_eq!(lambda_exact(&k7, 2, 0, 3).unwrap(), 4);
        // split with a >= 1
        assert_eq!(lambda_exact(&k7, 2, 1, 2).unwrap(), 2);
    }

    #[test]
    fn lambda_exact_rejects_unequal_inert_shape() {
        let qi = CMContext::new(-4).unwrap();
        let err = lambda_exact(&qi, 3, 0, 1).unwrap_err();
        match err {
            Error::Contract { msg, .. } => assert!(msg.contains("then a=b")),
            other => panic!("expected contract error, got {other}"),
        }
    }

    #[test]
    fn ideal_totient_values() {
        assert_eq!(ideal_totient(3, 1, -4).unwrap(), 8);
        assert_eq!(ideal_totient(2, 2, -7).unwrap(), 4);
        // split prime: (l-1)^2
        assert_eq!(ideal_totient(7, 1, -3).unwrap(), 36);
        assert_eq!(kronecker(-3, 7).unwrap(), 1);
    }

    #[test]
    fn degree_admissibility() {
        // point of order 7 with CM by Q(sqrt(-7)): lambda = 6, h = 1
        let k7 = CMContext::new(-7).unwrap();
        let p7 = TorsionProfile::new(vec![TorsionComponent { ell: 7, a: 0, b: 1 }]).unwrap();
        assert!(degree_admissible(&p7, &k7, 3).unwrap());
        assert!(degree_admissible(&p7, &k7, 1).unwrap());
        // full 3-torsion over Q(i): lambda = 8 does not divide 6
        let qi = CMContext::new(-4).unwrap();
        let p33 = TorsionProfile::new(vec![TorsionComponent { ell: 3, a: 1, b: 1 }]).unwrap();
        assert!(!degree_admissible(&p33, &qi, 1).unwrap());
    }

    #[test]
    fn degree_admissibility_monotone_under_divisibility() {
        let k7 = CMContext::new(-7).unwrap();
        let profile = TorsionProfile::new(vec![
            TorsionComponent { ell: 2, a: 1, b: 2 },
            TorsionComponent { ell: 7, a: 0, b: 1 },
        ])
        .unwrap();
        for d in 1..200u64 {
            if degree_admissible(&profile, &k7, d).unwrap() {
                for k in 1..5 {
                    assert!(degree_admissible(&profile, &k7, d * k).unwrap());
                }
            }
        }
    }

    #[test]
    fn spy_divisibility_examples() {
        let qi = ImQuadField::new(-4).unwrap();
        assert!(spy_divides(&qi, 4, 1).unwrap());
        let k23 = ImQuadField::new(-23).unwrap();
        assert!(!spy_divides(&k23, 2, 1).unwrap());
        let k7 = ImQuadField::new(-7).unwrap();
        assert!(!spy_divides(&k7, 7, 3).unwrap()); // needs the degree over Q(sqrt(-7))
        assert!(spy_divides(&k7, 7, 6).unwrap());
    }

    #[test]
    fn feasible_order_examples() {
        let f = feasible_orders(1, 10).unwrap();
        assert!(f.contains(&7)); // lambda = 6 divides 12
        assert!(!f.contains(&11)); // Lambda(11) = {10, 100, 120}
        for n in 2..=6 {
            assert!(f.contains(&n), "n = {n}");
        }
        // n = 2 is feasible for any degree
        for d in [1u64, 17, 360] {
            assert!(feasible_orders(d, 3).unwrap().contains(&2));
        }
    }

    #[test]
    fn odd_degree_group_classification() {
        let g = |n1, n2| TorsionGroup::new(n1, n2).unwrap();
        assert!(allowed_odd_degree_group(&g(1, 1)));
        assert!(allowed_odd_degree_group(&g(1, 2)));
        assert!(allowed_odd_degree_group(&g(1, 4)));
        assert!(allowed_odd_degree_group(&g(2, 2)));
        assert!(allowed_odd_degree_group(&g(1, 14))); // 2 * 7, 7 = 3 mod 4
        assert!(allowed_odd_degree_group(&g(1, 11))); // 11 = 3 mod 8
        assert!(allowed_odd_degree_group(&g(1, 3)));
        assert!(allowed_odd_degree_group(&g(1, 9)));
        assert!(allowed_odd_degree_group(&g(1, 6)));
        assert!(!allowed_odd_degree_group(&g(1, 5)));
        assert!(!allowed_odd_degree_group(&g(1, 7))); // 7 = 7 mod 8
        assert!(!allowed_odd_degree_group(&g(2, 4)));
        assert!(!allowed_odd_degree_group(&g(3, 3)));
        assert!(!allowed_odd_degree_group(&g(1, 8)));
    }

    #[test]
    fn no_allowed_group_contains_z3xz3_or_order_five_point() {
        for n1 in 1..=14u64 {
            for n2 in n1..=200 {
                if n2 % n1 != 0 || n1 * n2 > 200 {
                    continue;
                }
                let g = TorsionGroup::new(n1, n2).unwrap();
                if allowed_odd_degree_group(&g) {
                    assert!(!(n1 % 3 == 0), "Z/3 x Z/3 inside ({n1}, {n2})");
                    assert!(n2 % 5 != 0, "point of order 5 inside ({n1}, {n2})");
                }
            }
        }
    }

    #[test]
    fn torsion_group_validation() {
        assert!(TorsionGroup::new(0, 4).is_err());
        assert!(TorsionGroup::new(3, 4).is_err());
        assert_eq!(TorsionGroup::new(2, 6).unwrap().order(), 12);
    }

    #[test]
    fn lambda_set_invariants_to_1e3() {
        for n in 2..=1000u64 {
            let fac = factorize(n).unwrap();
            let ls = lambda_set(n).unwrap();
            assert!(ls.elements.len() <= 3usize.pow(fac.omega()), "n = {n}");
            let phi = fac.euler_phi() as u128;
            for &l in &ls.elements {
                assert!(l * n as u128 >= phi * phi, "n = {n}, lambda = {l}");
                let big = factorize(l as u64).unwrap().big_omega();
                assert!(big + 2 >= fac.big_omega(), "n = {n}, lambda = {l}");
            }
        }
    }

    #[test]
    fn lambda_exact_divides_master_quantity() {
        // lambda always divides l^(2b-2) (l-1) (l - (Delta_K|l))
        for delta in [-3i64, -4, -7, -8, -11, -12, -16, -27, -28, -36, -99, -100] {
            let Ok(ctx) = CMContext::new(delta) else { continue };
            for ell in [2u64, 3, 5, 7, 11, 13] {
                for b in 1..=3u32 {
                    for a in 0..=b {
                        let lam = match lambda_exact(&ctx, ell, a, b) {
                            Ok(v) => v,
                            Err(Error::Contract { .. }) => continue,
                            Err(e) => panic!("{e}"),
                        };
                        let master = ideal_totient(ell, b, ctx.fundamental_disc).unwrap();
                        assert_eq!(master % lam, 0, "delta={delta} l={ell} a={a} b={b}");
                    }
                }
            }
        }
    }
}
