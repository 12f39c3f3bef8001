//! Primality testing, sieving, and word-size modular helpers.
//!
//! Inputs below 2^64 use deterministic Miller-Rabin; larger inputs use
//! Baillie-PSW (strong base-2 Miller-Rabin plus a strong Lucas test with
//! Selfridge parameters).

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic for every `n < 2^64` (the first twelve prime bases suffice
/// up to 3.3e24).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &SMALL_PRIMES {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &SMALL_PRIMES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    if n.is_even() {
        return false;
    }
    for q in sieve(1000).into_iter().skip(1) {
        if (n % q).is_zero() {
            return false;
        }
    }
    strong_probable_prime(n, &BigUint::from(2u32)) && strong_lucas_probable_prime(n)
}

fn strong_probable_prime(n: &BigUint, base: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = base.modpow(&d, n);
    if x == one || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Jacobi symbol (a / n) for odd positive n.
pub fn jacobi(a: &BigInt, n: &BigUint) -> i32 {
    debug_assert!(n.is_odd());
    let n_int = BigInt::from(n.clone());
    let mut a = a.mod_floor(&n_int).to_biguint().expect("non-negative");
    let mut n = n.clone();
    let mut result = 1;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        a >>= tz;
        let n_mod_8 = (&n % 8u32).to_u32().unwrap();
        if tz % 2 == 1 && (n_mod_8 == 3 || n_mod_8 == 5) {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32) == BigUint::from(3u32) && (&n % 4u32) == BigUint::from(3u32) {
            result = -result;
        }
        a %= &n;
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

fn strong_lucas_probable_prime(n: &BigUint) -> bool {
    let root = n.sqrt();
    if &root * &root == *n {
        return false;
    }
    // Selfridge: first D in 5, -7, 9, -11, ... with (D/n) = -1.
    let mut d_abs: i64 = 5;
    let mut sign: i64 = 1;
    let d = loop {
        let cand = BigInt::from(sign * d_abs);
        match jacobi(&cand, n) {
            -1 => break cand,
            0
                if BigInt::from(d_abs) != BigInt::from(n.clone()) => {
                    return false;
                }
            _ => {}
        }
        d_abs += 2;
        sign = -sign;
    };
    let n_int = BigInt::from(n.clone());
    let reduce = |x: BigInt| x.mod_floor(&n_int).to_biguint().unwrap();
    let q = reduce((BigInt::one() - &d) / 4);
    let d_mod = reduce(d);
    let half = |x: BigUint| -> BigUint {
        if x.is_odd() {
            (x + n) >> 1
        } else {
            x >> 1
        }
    };

    let n_plus_1 = n + 1u32;
    let s = n_plus_1.trailing_zeros().unwrap_or(0);
    let k = &n_plus_1 >> s;

    // P = 1 throughout.
    let mut u = BigUint::one();
    let mut v = BigUint::one();
    let mut qk = q.clone();
    let two = BigUint::from(2u32);
    for i in (0..k.bits() - 1).rev() {
        let u2 = (&u * &v) % n;
        let v2 = (&v * &v + n * &two - (&qk * &two) % n) % n;
        qk = (&qk * &qk) % n;
        if k.bit(i) {
            u = half((&u2 + &v2) % n);
            v = half((&d_mod * &u2 + &v2) % n);
            qk = (&qk * &q) % n;
        } else {
            u = u2;
            v = v2;
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = (&v * &v + n * &two - (&qk * &two) % n) % n;
        if v.is_zero() {
            return true;
        }
        qk = (&qk * &qk) % n;
    }
    false
}

/// All primes `<= limit`.
pub fn sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Segmented sieve of Eratosthenes over `[lo, hi)` windows, sharing one set
/// of base primes up to `sqrt(max_hi)`.
#[derive(Debug, Clone)]
pub struct SegmentedSieve {
    base: Vec<u64>,
    max_hi: u64,
}

impl SegmentedSieve {
    pub fn new(max_hi: u64) -> Self {
        let root = (max_hi as f64).sqrt() as u64 + 2;
        SegmentedSieve {
            base: sieve(root),
            max_hi,
        }
    }

    /// Primes in `[lo, hi)`, ascending.
    pub fn primes_in(&self, lo: u64, hi: u64) -> Vec<u64> {
        assert!(hi <= self.max_hi.saturating_add(1), "window beyond sieve range");
        if hi <= lo || hi <= 2 {
            return Vec::new();
        }
        let lo = lo.max(2);
        let width = (hi - lo) as usize;
        let mut composite = vec![false; width];
        for &q in &self.base {
            if q * q >= hi {
                break;
            }
            let mut start = (lo.div_ceil(q) * q).max(q * q);
            while start < hi {
                composite[(start - lo) as usize] = true;
                start += q;
            }
        }
        composite
            .iter()
            .enumerate()
            .filter(|(_, &c)| !c)
            .map(|(i, _)| lo + i as u64)
            .collect()
    }
}

/// Odd primes in `[from, to]`.
pub fn odd_primes_between(from: u64, to: u64) -> Vec<u64> {
    if to < 3 || from > to {
        return Vec::new();
    }
    SegmentedSieve::new(to)
        .primes_in(from.max(3), to + 1)
}
