//! The core function A_k(n) = n^(p^(k-1)) mod p^k, Fermat-quotient carries
//! n' = (n^(p-1) mod p^2 - 1) / p, core increments d_k(n) = A_k(n+1) - A_k(n),
//! integer increments e_i(n) and the critical precision K_p.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modring::{PrimePowerModulus, Residue};
use crate::primes::{is_prime_u64, pow_mod};

/// Largest prime accepted by [`critical_precision`] unless a guard is given.
pub const KP_GUARD: u64 = 2000;

/// h = (p - 1) / 2.
pub fn half(p: u64) -> u64 {
    (p - 1) / 2
}

fn check_digit(m: &PrimePowerModulus, n: &BigUint) -> Result<()> {
    if n.is_zero() || n >= m.p() {
        return Err(Error::out_of_range("n", n.clone()));
    }
    Ok(())
}

/// The carry n' with n^(p-1) = n' p + 1 mod p^2. Only `p` of the modulus is
/// used.
pub fn fst_carry(m: &PrimePowerModulus, n: &BigUint) -> Result<BigUint> {
    check_digit(m, n)?;
    let p = m.p();
    let v = n.modpow(&(p - 1u32), &(p * p));
    let (q, r) = (v - 1u32).div_rem(p);
    if !r.is_zero() {
        return Err(Error::Inconsistent(format!("{n}^(p-1) != 1 mod p for p = {p}")));
    }
    Ok(q)
}

/// Word-size carry for `p < 2^32` (so that p^2 fits a word). `n` is taken
/// mod p and must be nonzero there.
pub fn fst_carry_u64(p: u64, n: u64) -> u64 {
    assert!(p < 1 << 32, "p^2 must fit a word");
    let v = pow_mod(n, p - 1, p * p);
    (v - 1) / p
}

/// A_k(n) by the carry recurrence: f_0 = n and
/// f_i = f_(i-1) * M_i with M_1 = n^(p-1), M_(i+1) = M_i^p.
///
/// Each M_i = n' p^i + 1 mod p^(i+1), which is checked at every step, so
/// f_i = f_(i-1) (n' p^i + 1) mod p^(i+1). The running product is kept at
/// full precision p^k: reducing f_(i-1) to p^i first loses the digit the
/// next step needs (p = 11, k = 3, n = 2 would give `aa2` instead of `4a2`).
pub fn core_by_recurrence(m: &PrimePowerModulus, n: &BigUint) -> Result<Residue> {
    let carry = fst_carry(m, n)?;
    let p = m.p();
    let full = m.modulus();
    let mut f = n.clone();
    let mut mult = n.modpow(&(p - 1u32), full);
    let mut p_i = p.clone();
    for i in 1..m.k() {
        let p_next = &p_i * p;
        if &mult % &p_next != &carry * &p_i + 1u32 {
            return Err(Error::Inconsistent(format!(
                "carry of {n} changed at step {i} mod {p}^{}",
                m.k()
            )));
        }
        f = f * &mult % full;
        mult = mult.modpow(p, full);
        p_i = p_next;
    }
    Ok(m.residue(f))
}

/// A_k(n) = n^(p^(k-1)) mod p^k directly.
pub fn core_direct(m: &PrimePowerModulus, n: &BigUint) -> Residue {
    m.residue(n.clone()).pow(m.ext_order())
}

#[derive(Debug, Clone)]
pub struct CoreTable {
    pub modulus: PrimePowerModulus,
    /// A_k(n) for n = 1..p-1.
    pub core: Vec<Residue>,
    /// n' for n = 1..p-1.
    pub carries: Vec<u64>,
    /// d_k(n) for n = 0..p-1, with A_k(0) = A_k(p) = 0.
    pub increments: Vec<Residue>,
}

impl CoreTable {
    pub fn p(&self) -> u64 {
        self.core.len() as u64 + 1
    }

    pub fn k(&self) -> u32 {
        self.modulus.k()
    }

    /// A_k(n mod p); zero for multiples of p.
    pub fn core_at(&self, n: u64) -> Residue {
        match n % self.p() {
            0 => self.modulus.zero(),
            r => self.core[r as usize - 1].clone(),
        }
    }

    pub fn increment(&self, n: u64) -> &Residue {
        &self.increments[(n % self.p()) as usize]
    }

    /// The n with n' = 0, i.e. n^(p-1) = 1 mod p^2.
    pub fn zero_carries(&self) -> Vec<u64> {
        (1..self.p())
            .filter(|&n| self.carries[n as usize - 1] == 0)
            .collect()
    }

    /// Number of distinct d_k(n) over n = 1..h.
    pub fn distinct_first_half(&self) -> usize {
        let h = half(self.p()) as usize;
        self.increments[1..=h]
            .iter()
            .map(Residue::value)
            .collect::<HashSet<_>>()
            .len()
    }
}

/// Builds the core table, cross-checking the recurrence against direct
/// powering for every entry.
pub fn build_core_table(m: &PrimePowerModulus) -> Result<CoreTable> {
    let p = m.p_for_tables()?;
    let core = (1..p)
        .into_par_iter()
        .map(|n| {
            let n = BigUint::from(n);
            let rec = core_by_recurrence(m, &n)?;
            if rec != core_direct(m, &n) {
                return Err(Error::Inconsistent(format!(
                    "recurrence and direct core disagree at n = {n} mod {m}"
                )));
            }
            Ok(rec)
        })
        .collect::<Result<Vec<_>>>()?;
    let carries = if p < 1 << 32 {
        (1..p).into_par_iter().map(|n| fst_carry_u64(p, n)).collect()
    } else {
        (1..p)
            .map(|n| {
                fst_carry(m, &n.into()).map(|c| c.to_u64().expect("carry < p"))
            })
            .collect::<Result<Vec<_>>>()?
    };
    let zero = m.zero();
    let at = |n: usize| if n == 0 || n == p as usize { &zero } else { &core[n - 1] };
    let increments = (0..p as usize).map(|n| at(n + 1) - at(n)).collect();
    Ok(CoreTable {
        modulus: m.clone(),
        core,
        carries,
        increments,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriticalPrecision {
    pub p: u64,
    pub kp: u32,
    /// k -> number of distinct e_1(n) mod p^k over n = 1..h, for k = 2..=kp.
    pub distinct_counts: BTreeMap<u32, usize>,
    /// k -> first colliding pair (n, m), n < m <= h, for each k < kp.
    pub witnesses: BTreeMap<u32, (u64, u64)>,
    pub below_p: bool,
}

pub fn critical_precision(p: u64) -> Result<CriticalPrecision> {
    critical_precision_with_guard(p, KP_GUARD)
}

/// Minimal k >= 2 at which e_1(n) = (n+1)^p - n^p, n = 1..h, are pairwise
/// distinct mod p^k. The e_1 values are exact integers below p^p, so the
/// search always ends by k = p.
pub fn critical_precision_with_guard(p: u64, guard: u64) -> Result<CriticalPrecision> {
    if p == 2 {
        return Err(Error::EvenPrime);
    }
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p.into()));
    }
    if p > guard {
        return Err(Error::Oversize {
            size: p.into(),
            bound: guard,
        });
    }
    let h = half(p);
    let e1: Vec<BigUint> = (1..=h)
        .into_par_iter()
        .map(|n| BigUint::from(n + 1).pow(p as u32) - BigUint::from(n).pow(p as u32))
        .collect();
    let pb = BigUint::from(p);
    let mut pk = &pb * &pb;
    let mut distinct_counts = BTreeMap::new();
    let mut witnesses = BTreeMap::new();
    for k in 2..=p as u32 {
        let mut seen: HashMap<BigUint, u64> = HashMap::with_capacity(h as usize);
        let mut witness = None;
        for (n, e) in (1..=h).zip(&e1) {
            if let Some(&first) = seen.get(&(e % &pk)) {
                witness.get_or_insert((first, n));
            } else {
                seen.insert(e % &pk, n);
            }
        }
        distinct_counts.insert(k, seen.len());
        match witness {
            Some(w) => {
                witnesses.insert(k, w);
            }
            None => {
                return Ok(CriticalPrecision {
                    p,
                    kp: k,
                    distinct_counts,
                    witnesses,
                    below_p: (k as u64) < p,
                })
            }
        }
        pk *= &pb;
    }
    Err(Error::Inconsistent(format!(
        "e_1 values for p = {p} never separated"
    )))
}

/// e_i(n) = (n+1)^(p^i) - n^(p^i) mod p^k for n = 1..p-1. Requires
/// `1 <= i` and `k <= p`.
pub fn integer_increments(m: &PrimePowerModulus, i: u32) -> Result<Vec<Residue>> {
    let p = m.p_for_tables()?;
    if i < 1 {
        return Err(Error::out_of_range("increment level i", i));
    }
    if m.k() as u64 > p {
        return Err(Error::BadExponent(m.k() as u64));
    }
    let exp = num_traits::pow(m.p().clone(), i as usize);
    Ok((1..p)
        .into_par_iter()
        .map(|n| m.residue(n + 1).pow(&exp) - m.residue(n).pow(&exp))
        .collect())
}

/// Largest j <= cap with a = b mod p^j.
pub fn agreement_depth(a: &BigUint, b: &BigUint, p: &BigUint, cap: u32) -> u32 {
    let mut diff = if a > b { a - b } else { b - a };
    if diff.is_zero() {
        return cap;
    }
    let mut j = 0;
    while j < cap {
        let (q, r) = diff.div_rem(p);
        if !r.is_zero() {
            break;
        }
        diff = q;
        j += 1;
    }
    j
}

/// Sorted agreement depths of all pairs e_i(n), e_i(m), n < m <= h, at
/// precision p^p.
pub fn increment_depth_profile(p: u64, i: u32) -> Result<Vec<u32>> {
    let m = PrimePowerModulus::new(p, p as u32)?;
    let e = integer_increments(&m, i)?;
    let h = half(p) as usize;
    let mut depths: Vec<u32> = (0..h)
        .flat_map(|a| (a + 1..h).map(move |b| (a, b)))
        .map(|(a, b)| agreement_depth(e[a].value(), e[b].value(), m.p(), p as u32))
        .collect();
    depths.sort_unstable();
    Ok(depths)
}

impl CriticalPrecision {
    /// Whether the minimal-k claim is internally consistent: full count at
    /// kp and a smaller one just below it.
    pub fn is_minimal(&self) -> bool {
        let h = half(self.p) as usize;
        self.distinct_counts.get(&self.kp) == Some(&h)
            && (self.kp == 2 || self.distinct_counts[&(self.kp - 1)] < h)
    }
}

/// K_p through the definition: smallest k >= 2 whose core table has h
/// distinct increments d_k(1..h). Slow; kept as a cross-check.
pub fn critical_precision_by_tables(p: u64, max_k: u32) -> Result<Option<u32>> {
    let base = PrimePowerModulus::new(p, 2)?;
    for k in 2..=max_k {
        let t = build_core_table(&base.with_precision(k)?)?;
        if t.distinct_first_half() == half(p) as usize {
            return Ok(Some(k));
        }
    }
    Ok(None)
}
