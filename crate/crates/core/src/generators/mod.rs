//! Divisors of p^2 - 1 (and of p^2 + 1, p^(2m) - 1) as residues mod p^2 and
//! p^3: core membership, orders, the exceptional cases mod p^2. Also
//! Wieferich-type scans and primitive-root checks on divisors of p +- 1.

mod scan;

pub use scan::{run_scan, Checkpoint, ScanSummary, BLOCK};

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::corefst::core_direct;
use crate::error::{Error, Result};
use crate::factor::{divisors, divisors_u64, factor, factor_p_squared_minus_one, factor_u64};
use crate::modring::{
    is_core, multiplicative_order_with, units_order_factors, PrimePowerModulus, Residue,
};
use crate::primes::pow_mod;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisorAudit {
    pub p: u64,
    #[serde(serialize_with = "crate::serde_dec::serialize")]
    pub r: BigUint,
    /// The audited value divided by r.
    #[serde(serialize_with = "crate::serde_dec::serialize")]
    pub cofactor: BigUint,
    #[serde(serialize_with = "crate::serde_dec::serialize")]
    pub rp_minus_r_mod_p2: BigUint,
    #[serde(serialize_with = "crate::serde_dec::serialize")]
    pub rp_minus_r_mod_p3: BigUint,
    #[serde(serialize_with = "crate::serde_dec::serialize")]
    pub order_in_g3: BigUint,
    pub core_mod_p2: bool,
    pub core_mod_p3: bool,
    /// r = +-1 mod p^3, core for the trivial reason that +-1 are.
    pub trivial: bool,
    /// k -> whether r^p = r mod p^k, for k = 2..=k_max.
    pub core_by_k: BTreeMap<u32, bool>,
}

/// Audits every divisor r > 1 of `value` that is prime to p.
pub fn audit_value(p: u64, value: &BigUint, k_max: u32) -> Result<Vec<DivisorAudit>> {
    if k_max < 3 {
        return Err(Error::BadExponent(k_max as u64));
    }
    let m3 = PrimePowerModulus::new(p, 3)?;
    let g3 = units_order_factors(&m3)?;
    let pb = BigUint::from(p);
    let p2 = &pb * &pb;
    let rs: Vec<BigUint> = divisors(&factor(value)?)
        .into_iter()
        .filter(|r| !r.is_one() && (r % &pb) != BigUint::ZERO)
        .collect();
    rs.into_par_iter()
        .map(|r| {
            let x = m3.residue(r.clone());
            let diff3 = (&x.pow(&pb) - &x).value().clone();
            let diff2 = &diff3 % &p2;
            let trivial = x == m3.one() || x == m3.minus_one();
            let mut core_by_k = BTreeMap::new();
            let mut pk = p2.clone();
            for k in 2..=k_max {
                core_by_k.insert(k, r.modpow(&pb, &pk) == &r % &pk);
                pk *= &pb;
            }
            Ok(DivisorAudit {
                p,
                cofactor: value / &r,
                order_in_g3: multiplicative_order_with(&x, &g3)?,
                core_mod_p2: diff2 == BigUint::ZERO,
                core_mod_p3: diff3 == BigUint::ZERO,
                rp_minus_r_mod_p2: diff2,
                rp_minus_r_mod_p3: diff3,
                trivial,
                core_by_k,
                r,
            })
        })
        .collect()
}

/// All divisors r > 1 of p^2 - 1.
pub fn audit_divisors(p: u64, k_max: u32) -> Result<Vec<DivisorAudit>> {
    let pb = BigUint::from(p);
    audit_value(p, &(&pb * &pb - 1u32), k_max)
}

/// No audited divisor is in the core mod p^3, apart from trivial ones.
/// For divisors of p^2 - 1 there are none of those.
pub fn noncore_mod_p3(audits: &[DivisorAudit]) -> bool {
    audits.iter().all(|a| a.trivial || !a.core_mod_p3)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Note5Family {
    /// p^2 + 1
    SquarePlusOne,
    /// p^(2m) - 1
    EvenPowerMinusOne(u32),
}

impl Note5Family {
    pub fn value(self, p: u64) -> Result<BigUint> {
        let pb = BigUint::from(p);
        match self {
            Note5Family::SquarePlusOne => Ok(&pb * &pb + 1u32),
            Note5Family::EvenPowerMinusOne(0) => Err(Error::out_of_range("m", 0u32)),
            Note5Family::EvenPowerMinusOne(m) => Ok(pb.pow(2 * m) - 1u32),
        }
    }
}

pub fn note5_extension(p: u64, family: Note5Family, k_max: u32) -> Result<Vec<DivisorAudit>> {
    audit_value(p, &family.value(p)?, k_max)
}

/// Divisors 1 < r < p^2 - 1 of p^2 - 1 with r^p = r mod p^2, ascending.
/// r = p^2 - 1 = -1 always qualifies and is left out. Needs p < 2^32.
pub fn exceptional_divisors(p: u64) -> Vec<u64> {
    let n = p * p;
    divisors_u64(&factor_p_squared_minus_one(p))
        .into_iter()
        .filter(|&r| r > 1 && r < n - 1 && pow_mod(r, p, n) == r)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExceptionRow {
    pub p: u64,
    /// Smallest exceptional divisor.
    pub r: u64,
    /// r^p - r mod p^2; zero by construction.
    pub residue: u64,
    pub all: Vec<u64>,
}

pub fn exception_block(primes: &[u64]) -> Vec<ExceptionRow> {
    primes
        .par_iter()
        .filter_map(|&p| {
            let all = exceptional_divisors(p);
            all.first().map(|&r| ExceptionRow {
                p,
                r,
                residue: (pow_mod(r, p, p * p) + p * p - r) % (p * p),
                all: all.clone(),
            })
        })
        .collect()
}

pub fn exception_scan(p_min: u64, p_max: u64) -> Result<Vec<ExceptionRow>> {
    let mut rows = Vec::new();
    run_scan(p_min, p_max, None, |ps| Ok(exception_block(ps)), |r| {
        rows.push(r);
        Ok(())
    })?;
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WieferichRow {
    pub p: u64,
    pub base: u64,
    /// base^p - base mod p^2.
    pub residue: u64,
}

/// Every this many primes, the word-size result is recomputed with big
/// integers.
pub const CROSS_CHECK_EVERY: u64 = 1 << 16;

/// Tests base^p = base mod p^2 block by block, keeping a running prime
/// count for the periodic cross-check.
#[derive(Debug, Clone)]
pub struct WieferichScanner {
    pub base: u64,
    seen: u64,
    pub cross_checks: u64,
}

fn wieferich_big(p: u64, base: u64) -> BigUint {
    let n = BigUint::from(p) * p;
    let b = BigUint::from(base) % &n;
    (b.modpow(&p.into(), &n) + &n - &b) % &n
}

fn wieferich_word(p: u64, base: u64) -> u64 {
    let n = p * p;
    let b = base % n;
    (pow_mod(b, p, n) + n - b) % n
}

impl WieferichScanner {
    pub fn new(base: u64) -> Result<Self> {
        if base < 2 {
            return Err(Error::out_of_range("base", base));
        }
        Ok(WieferichScanner {
            base,
            seen: 0,
            cross_checks: 0,
        })
    }

    pub fn block(&mut self, primes: &[u64]) -> Result<Vec<WieferichRow>> {
        let base = self.base;
        let offset = self.seen;
        let hits = primes
            .par_iter()
            .enumerate()
            .map(|(i, &p)| {
                let residue = if p < 1 << 32 {
                    let fast = wieferich_word(p, base);
                    if (offset + i as u64).is_multiple_of(CROSS_CHECK_EVERY)
                        && BigUint::from(fast) != wieferich_big(p, base)
                    {
                        return Err(Error::Inconsistent(format!(
                            "word and big-integer paths disagree at p = {p}"
                        )));
                    }
                    fast
                } else {
                    wieferich_big(p, base).to_u64().unwrap_or(u64::MAX)
                };
                Ok((residue == 0).then_some(WieferichRow { p, base, residue }))
            })
            .collect::<Result<Vec<_>>>()?;
        self.cross_checks += (offset..offset + primes.len() as u64)
            .filter(|j| j % CROSS_CHECK_EVERY == 0)
            .count() as u64;
        self.seen += primes.len() as u64;
        Ok(hits.into_iter().flatten().collect())
    }
}

/// Primes p <= p_max with base^p = base mod p^2.
pub fn wieferich_scan(p_max: u64, base: u64) -> Result<Vec<u64>> {
    let mut scanner = WieferichScanner::new(base)?;
    let mut out = Vec::new();
    run_scan(3, p_max, None, |ps| scanner.block(ps), |row| {
        out.push(row.p);
        Ok(())
    })?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorollaryRow {
    pub n: u64,
    pub k: u32,
    /// n, -n, 1/n, -1/n each outside the core.
    pub outside: [bool; 4],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorollaryReport {
    pub p: u64,
    pub k_max: u32,
    pub rows: Vec<CorollaryRow>,
    /// q·a is outside the core for every q in Q(n) and every sampled core a.
    pub products_outside: bool,
    /// n in {2, 3} that are not units mod p.
    pub skipped: Vec<u64>,
}

impl CorollaryReport {
    pub fn holds(&self) -> bool {
        self.products_outside && self.rows.iter().all(|r| r.outside.iter().all(|&o| o))
    }
}

/// Core samples: all of them when p - 1 <= 256, else 256 random ones.
fn core_samples(m: &PrimePowerModulus, seed: u64) -> Vec<Residue> {
    let p = m.p_u64().expect("caller uses word primes");
    if p - 1 <= 256 {
        (1..p).map(|n| core_direct(m, &n.into())).collect()
    } else {
        let mut rng = StdRng::seed_from_u64(seed);
        (0..256)
            .map(|_| core_direct(m, &rng.gen_range(1..p).into()))
            .collect()
    }
}

/// The quadruples ±{n, 1/n} for n = 2, 3 stay outside the core for
/// 3 <= k <= k_max.
pub fn corollary_check(p: u64, k_max: u32) -> Result<CorollaryReport> {
    if k_max < 3 {
        return Err(Error::BadExponent(k_max as u64));
    }
    let base = PrimePowerModulus::new(p, 3)?;
    let mut rows = Vec::new();
    let mut products_outside = true;
    let mut skipped = Vec::new();
    for n in [2u64, 3] {
        if n % p == 0 {
            skipped.push(n);
            continue;
        }
        for k in 3..=k_max {
            let m = base.with_precision(k)?;
            let x = m.residue(n);
            let inv = x.inverse()?;
            let quad = [x.clone(), -&x, inv.clone(), -&inv];
            rows.push(CorollaryRow {
                n,
                k,
                outside: quad.clone().map(|q| !is_core(&q)),
            });
            for a in core_samples(&m, p ^ (n << 40) ^ ((k as u64) << 48)) {
                products_outside &= quad.iter().all(|q| !is_core(&(q * &a)));
            }
        }
    }
    Ok(CorollaryReport {
        p,
        k_max,
        rows,
        products_outside,
        skipped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorClass {
    PrimitiveRoot,
    HalfGroupNoMinusOne,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorVerdict {
    pub p: u64,
    pub k: u32,
    pub g: u64,
    #[serde(serialize_with = "crate::serde_dec::serialize")]
    pub order: BigUint,
    /// |G_k| / order.
    #[serde(serialize_with = "crate::serde_dec::serialize")]
    pub index: BigUint,
    /// A cyclic group has one element of order 2, so this is "order is even".
    pub contains_minus_one: bool,
    pub class: GeneratorClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Note4Report {
    pub p: u64,
    pub k: u32,
    pub verdicts: Vec<GeneratorVerdict>,
    /// Some divisor is a primitive root or generates half of G_k without -1.
    pub satisfied: bool,
}

pub fn classify_generator(m: &PrimePowerModulus, g: u64) -> Result<GeneratorVerdict> {
    let factors = units_order_factors(m)?;
    let order = multiplicative_order_with(&m.residue(g), &factors)?;
    let index = m.units_order() / &order;
    let contains_minus_one = m.residue(g).pow(&(&order / 2u32)) == m.minus_one();
    let class = if index.is_one() {
        GeneratorClass::PrimitiveRoot
    } else if index == BigUint::from(2u32) && !contains_minus_one {
        GeneratorClass::HalfGroupNoMinusOne
    } else {
        GeneratorClass::Other
    };
    Ok(GeneratorVerdict {
        p: m.p_u64().expect("word prime"),
        k: m.k(),
        g,
        order,
        index,
        contains_minus_one,
        class,
    })
}

/// Classifies each divisor g > 1 of p - 1 and of p + 1 by its order mod p^k.
pub fn conjecture_note4(p: u64, k: u32) -> Result<Note4Report> {
    if k < 2 {
        return Err(Error::BadExponent(k as u64));
    }
    let m = PrimePowerModulus::new(p, k)?;
    let mut gs: Vec<u64> = divisors_u64(&factor_u64(p - 1))
        .into_iter()
        .chain(divisors_u64(&factor_u64(p + 1)))
        .filter(|&g| g > 1)
        .collect();
    gs.sort_unstable();
    gs.dedup();
    let verdicts = gs
        .into_iter()
        .map(|g| classify_generator(&m, g))
        .collect::<Result<Vec<_>>>()?;
    let satisfied = verdicts.iter().any(|v| v.class != GeneratorClass::Other);
    Ok(Note4Report {
        p,
        k,
        verdicts,
        satisfied,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiftReport {
    pub p: u64,
    pub g: u64,
    /// k -> whether g generates G_k, for k = 2..=k_max.
    pub generates: BTreeMap<u32, bool>,
}

impl LiftReport {
    pub fn holds(&self) -> bool {
        self.generates.values().all(|&b| b)
    }
}

/// A generator g < p of G_2 generates every G_k.
pub fn note1_generator_lift(p: u64, g: u64, k_max: u32) -> Result<LiftReport> {
    if g == 0 || g >= p {
        return Err(Error::out_of_range("g", g));
    }
    let m2 = PrimePowerModulus::new(p, 2)?;
    let is_generator = |m: &PrimePowerModulus| -> Result<bool> {
        let f = units_order_factors(m)?;
        Ok(&multiplicative_order_with(&m.residue(g), &f)? == m.units_order())
    };
    if !is_generator(&m2)? {
        return Err(Error::NotAGenerator { p, g });
    }
    let mut generates = BTreeMap::new();
    for k in 2..=k_max.max(2) {
        generates.insert(k, is_generator(&m2.with_precision(k)?)?);
    }
    Ok(LiftReport { p, g, generates })
}
