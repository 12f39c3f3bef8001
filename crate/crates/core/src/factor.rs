//! Trial division followed by Pollard rho with Brent's cycle detection.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::primes::{is_prime, is_prime_u64, mul_mod, sieve};

/// Prime factorization as ascending `(prime, exponent)` pairs.
pub type Factorization = Vec<(BigUint, u32)>;

const TRIAL_LIMIT: u64 = 1_000_000;
const RHO_ATTEMPTS: u64 = 64;
const RHO_BUDGET: u64 = 1 << 24;

pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    let mut out = BTreeMap::new();
    if n > 1 {
        split_u64(n, &mut out);
    }
    out.into_iter().collect()
}

fn split_u64(mut n: u64, out: &mut BTreeMap<u64, u32>) {
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        while n.is_multiple_of(q) {
            *out.entry(q).or_default() += 1;
            n /= q;
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            *out.entry(m).or_default() += 1;
            continue;
        }
        let d = rho_u64(m);
        stack.push(d);
        stack.push(m / d);
    }
}

fn rho_u64(n: u64) -> u64 {
    (1u64..)
        .find_map(|c| brent_u64(n, c))
        .expect("composite input has a nontrivial factor")
}

fn brent_u64(n: u64, c: u64) -> Option<u64> {
    let f = |x: u64| ((x as u128 * x as u128 + c as u128) % n as u128) as u64;
    let m = 128u64;
    let (mut y, mut r, mut q, mut g) = (2u64, 1u64, 1u64, 1u64);
    let (mut x, mut ys) = (y, y);
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += m;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

pub fn factor(n: &BigUint) -> Result<Factorization> {
    if let Some(small) = n.to_u64() {
        return Ok(factor_u64(small)
            .into_iter()
            .map(|(q, e)| (BigUint::from(q), e))
            .collect());
    }
    let mut out: BTreeMap<BigUint, u32> = BTreeMap::new();
    let mut rest = n.clone();
    for q in sieve(TRIAL_LIMIT) {
        if rest.bits() <= 64 {
            break;
        }
        let qb = BigUint::from(q);
        while (&rest % &qb).is_zero() {
            *out.entry(qb.clone()).or_default() += 1;
            rest /= &qb;
        }
        if rest.is_one() {
            break;
        }
    }
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if let Some(small) = m.to_u64() {
            for (q, e) in factor_u64(small) {
                *out.entry(BigUint::from(q)).or_default() += e;
            }
            continue;
        }
        if is_prime(&m) {
            *out.entry(m).or_default() += 1;
            continue;
        }
        let d = (1..=RHO_ATTEMPTS)
            .find_map(|c| brent_big(&m, c))
            .ok_or_else(|| Error::FactorizationFailure(m.clone()))?;
        let co = &m / &d;
        stack.push(d);
        stack.push(co);
    }
    Ok(out.into_iter().collect())
}

fn brent_big(n: &BigUint, c: u64) -> Option<BigUint> {
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let dist = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    let m = 128u64;
    let one = BigUint::one();
    let (mut y, mut r, mut q, mut g) = (BigUint::from(2u32), 1u64, one.clone(), one.clone());
    let (mut x, mut ys) = (y.clone(), y.clone());
    let mut spent = 0u64;
    while g.is_one() {
        if spent > RHO_BUDGET {
            return None;
        }
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                q = (q * dist(&x, &y)) % n;
            }
            spent += m.min(r - k);
            g = q.gcd(n);
            k += m;
        }
        r *= 2;
    }
    if g == *n {
        loop {
            ys = f(&ys);
            g = dist(&x, &ys).gcd(n);
            if g > one {
                break;
            }
        }
    }
    (g != *n).then_some(g)
}

/// All positive divisors, ascending.
pub fn divisors(factors: &Factorization) -> Vec<BigUint> {
    let mut out = vec![BigUint::one()];
    for (q, e) in factors {
        let len = out.len();
        let mut power = BigUint::one();
        for _ in 0..*e {
            power *= q;
            for i in 0..len {
                out.push(&out[i] * &power);
            }
        }
    }
    out.sort();
    out
}

pub fn divisors_u64(factors: &[(u64, u32)]) -> Vec<u64> {
    let mut out = vec![1u64];
    for &(q, e) in factors {
        let len = out.len();
        let mut power = 1u64;
        for _ in 0..e {
            power *= q;
            for i in 0..len {
                out.push(out[i] * power);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Merges two factorizations (of coprime or overlapping numbers) into the
/// factorization of their product.
pub fn merge_u64(a: &[(u64, u32)], b: &[(u64, u32)]) -> Vec<(u64, u32)> {
    let mut map: BTreeMap<u64, u32> = BTreeMap::new();
    for &(q, e) in a.iter().chain(b) {
        *map.entry(q).or_default() += e;
    }
    map.into_iter().collect()
}

/// Factorization of `p^2 - 1 = (p - 1)(p + 1)`, each side fitting a word.
pub fn factor_p_squared_minus_one(p: u64) -> Vec<(u64, u32)> {
    merge_u64(&factor_u64(p - 1), &factor_u64(p + 1))
}
