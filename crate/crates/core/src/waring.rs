//! Sums of p-th powers. F is the set of p-th powers of units and F₊t the
//! t-fold sumset; every residue mod p^k lies in F₊3 or F₊4.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::bitset::ResidueSet;
use crate::error::{Error, Result};
use crate::factor::factor_u64;
use crate::modring::{pth_power_values, PrimePowerModulus};
use crate::primes::{mul_mod, pow_mod};

pub const DEFAULT_MAX_T: usize = 4;

/// F₊1..F₊max_t as bitsets over [0, p^k).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sumsets {
    pub p: u64,
    pub k: u32,
    /// Sorted members of F.
    pub fermat: Vec<u64>,
    /// `levels[t - 1]` is F₊t.
    pub levels: Vec<ResidueSet>,
}

impl Sumsets {
    pub fn modulus(&self) -> u64 {
        self.levels[0].len() as u64
    }

    pub fn level(&self, t: usize) -> &ResidueSet {
        &self.levels[t - 1]
    }

    pub fn max_t(&self) -> usize {
        self.levels.len()
    }

    /// Smallest t with x in F₊t.
    pub fn min_level(&self, x: u64) -> Option<usize> {
        (1..=self.max_t()).find(|&t| self.level(t).contains(x))
    }

    /// Summands f_1 <= ... <= f_t from F adding to x, found greedily: the
    /// first f (ascending) leaving a remainder in F₊(t-1).
    pub fn witness(&self, x: u64, t: usize) -> Option<Vec<u64>> {
        let n = self.modulus();
        if t == 0 || t > self.max_t() || !self.level(t).contains(x) {
            return None;
        }
        let mut out = Vec::with_capacity(t);
        let mut rest = x;
        for level in (1..t).rev() {
            let f = *self
                .fermat
                .iter()
                .find(|&&f| self.level(level).contains((rest + n - f) % n))?;
            out.push(f);
            rest = (rest + n - f) % n;
        }
        debug_assert!(self.fermat.binary_search(&rest).is_ok());
        out.push(rest);
        Some(out)
    }
}

fn check_sumset_input(m: &PrimePowerModulus, max_t: usize) -> Result<u64> {
    let n = m.table_size()?;
    if m.k() < 2 {
        return Err(Error::BadExponent(m.k() as u64));
    }
    if max_t < 1 {
        return Err(Error::out_of_range("max_t", max_t as u64));
    }
    Ok(n)
}

/// Level by level convolution: F₊(t+1) is the union of F₊t rotated by
/// every f in F. Cross-checked against [`sumset_levels_by_orbits`].
pub fn sumset_levels(m: &PrimePowerModulus, max_t: usize) -> Result<Sumsets> {
    let n = check_sumset_input(m, max_t)?;
    let fermat = pth_power_values(m)?;
    let first = ResidueSet::from_values(n as usize, fermat.iter().copied());
    let mut levels = vec![first];
    while levels.len() < max_t {
        let prev = levels.last().expect("nonempty");
        let next = fermat
            .par_iter()
            .fold(
                || ResidueSet::new(n as usize),
                |mut acc, &f| {
                    acc.or_rotated(prev, f);
                    acc
                },
            )
            .reduce(|| ResidueSet::new(n as usize), |a, b| a.union(&b));
        levels.push(next);
    }
    let sums = Sumsets {
        p: m.p_u64().expect("fits"),
        k: m.k(),
        fermat,
        levels,
    };
    if sums != sumset_levels_by_orbits(m, max_t)? {
        return Err(Error::Inconsistent(format!(
            "sumset routes disagree mod {m}"
        )));
    }
    Ok(sums)
}

/// Smallest primitive root mod p.
pub fn primitive_root(p: u64) -> u64 {
    let qs: Vec<u64> = factor_u64(p - 1).into_iter().map(|(q, _)| q).collect();
    (2..p)
        .find(|&g| qs.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .unwrap_or(1)
}

/// A generator of the cyclic group F: the core of a primitive root times
/// p^2 + 1, which generates the part of F that is 1 mod p.
pub fn fermat_generator(m: &PrimePowerModulus) -> Result<u64> {
    let n = m.table_size()?;
    let p = m.p_u64().expect("fits");
    let g = primitive_root(p);
    let core = pow_mod(g, p.pow(m.k() - 1), n);
    Ok(mul_mod(core, (p * p + 1) % n, n))
}

/// Same levels through F₊(t+1) = F·(F₊t + 1): each level is a union of
/// F-orbits, and x + f = f (x/f + 1). Linear in p^k per level.
pub fn sumset_levels_by_orbits(m: &PrimePowerModulus, max_t: usize) -> Result<Sumsets> {
    let n = check_sumset_input(m, max_t)?;
    let gamma = fermat_generator(m)?;
    let orbit_of = |set: &mut ResidueSet, y: u64| {
        let mut z = y;
        loop {
            set.insert(z);
            z = mul_mod(z, gamma, n);
            if z == y {
                break;
            }
        }
    };
    let mut first = ResidueSet::new(n as usize);
    orbit_of(&mut first, 1);
    let mut levels = vec![first];
    while levels.len() < max_t {
        let prev = levels.last().expect("nonempty");
        let mut next = ResidueSet::new(n as usize);
        for x in prev.iter() {
            let y = (x + 1) % n;
            if !next.contains(y) {
                orbit_of(&mut next, y);
            }
        }
        levels.push(next);
    }
    Ok(Sumsets {
        p: m.p_u64().expect("fits"),
        k: m.k(),
        fermat: first_members(&levels[0]),
        levels,
    })
}

fn first_members(set: &ResidueSet) -> Vec<u64> {
    set.iter().collect()
}

/// Summands and their p-th roots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub target: u64,
    pub summands: Vec<u64>,
    /// Smallest positive b with b^p = summand, one per summand.
    pub bases: Vec<u64>,
}

/// Smallest b > 0 with b^p = f mod p^k. Such b is = f mod p.
pub fn pth_root(m: &PrimePowerModulus, f: u64) -> Result<Option<u64>> {
    let n = m.table_size()?;
    let p = m.p_u64().expect("fits");
    let start = f % p;
    if start == 0 {
        return Ok(None);
    }
    Ok((start..n).step_by(p as usize).find(|&b| pow_mod(b, p, n) == f))
}

pub fn witness_with_bases(
    m: &PrimePowerModulus,
    sums: &Sumsets,
    x: u64,
    t: usize,
) -> Result<Option<Witness>> {
    let Some(summands) = sums.witness(x, t) else {
        return Ok(None);
    };
    let bases = summands
        .iter()
        .map(|&f| pth_root(m, f)?.ok_or_else(|| Error::Inconsistent(format!("{f} has no p-th root"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(Witness {
        target: x,
        summands,
        bases,
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    pub p: u64,
    pub k: u32,
    /// |F₊t| for t = 1..max_t.
    pub counts: Vec<u64>,
    /// F₊3 ∪ F₊4 is everything.
    pub theorem_holds: bool,
    /// Every nonzero multiple of p is in F₊3.
    pub n0_covered_by_3: bool,
    /// Every mp with p ∤ m is in F₊3.
    pub lemma_scope_covered: bool,
    pub conjecture_f3_in_f4: bool,
    pub disjoint_3_4: bool,
    pub zero_in_2: bool,
    /// F₊t ⊆ F₊(t+2) for t = 1, 2.
    pub monotone: bool,
    /// Nonzero multiples of p outside F₊3.
    pub missing_multiples: Vec<u64>,
    /// Witnesses for a few spot residues, keyed by residue.
    pub witnesses: BTreeMap<u64, Witness>,
}

pub fn coverage(m: &PrimePowerModulus, sums: &Sumsets) -> Result<CoverageReport> {
    if sums.max_t() < DEFAULT_MAX_T {
        return Err(Error::out_of_range("max_t", sums.max_t() as u64));
    }
    let n = sums.modulus();
    let p = sums.p;
    let (f3, f4) = (sums.level(3), sums.level(4));
    let missing_multiples: Vec<u64> = (1..n / p).map(|j| j * p).filter(|&x| !f3.contains(x)).collect();
    let mut witnesses = BTreeMap::new();
    for x in [1, 2, p, p - 1, n - 1, n / 2] {
        if let Some(t) = sums.min_level(x) {
            if let Some(w) = witness_with_bases(m, sums, x, t)? {
                witnesses.insert(x, w);
            }
        }
    }
    Ok(CoverageReport {
        p,
        k: sums.k,
        counts: sums.levels.iter().map(|l| l.count() as u64).collect(),
        theorem_holds: f3.union(f4).is_full(),
        n0_covered_by_3: missing_multiples.is_empty(),
        lemma_scope_covered: missing_multiples.iter().all(|x| (x / p).is_multiple_of(p)),
        conjecture_f3_in_f4: f3.is_subset(f4),
        disjoint_3_4: f3.is_disjoint(f4),
        zero_in_2: sums.level(2).contains(0),
        monotone: sums.level(1).is_subset(f3) && sums.level(2).is_subset(f4),
        missing_multiples,
        witnesses,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiplesReport {
    pub p: u64,
    pub k: u32,
    /// All nonzero multiples of p are in F₊3.
    pub all_covered: bool,
    /// Those mp with p ∤ m are.
    pub lemma_scope_covered: bool,
    pub missing: Vec<u64>,
    /// One three-summand witness per covered multiple, ascending.
    pub witnesses: Vec<Witness>,
}

pub fn verify_multiples_of_p(m: &PrimePowerModulus) -> Result<MultiplesReport> {
    let sums = sumset_levels(m, 3)?;
    let n = sums.modulus();
    let p = sums.p;
    let mut missing = Vec::new();
    let mut witnesses = Vec::new();
    for x in (1..n / p).map(|j| j * p) {
        match witness_with_bases(m, &sums, x, 3)? {
            Some(w) => witnesses.push(w),
            None => missing.push(x),
        }
    }
    Ok(MultiplesReport {
        p,
        k: m.k(),
        all_covered: missing.is_empty(),
        lemma_scope_covered: missing.iter().all(|x| (x / p) % p == 0),
        missing,
        witnesses,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TripleRule {
    /// (h, h, 1)
    Half,
    /// ((p-1)/3, 2(p-1)/3, 1)
    Thirds,
    /// First (r, s, t) found by search.
    Search,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TripleWitness {
    pub p: u64,
    pub triple: (u64, u64, u64),
    /// A(r) + A(s) + A(t) mod p^2, a multiple of p.
    pub coresum: u64,
    /// coresum / p.
    pub m: u64,
    pub rule: TripleRule,
    /// 2 A(h) + 1 mod p^2, the first candidate.
    pub half_coresum: u64,
}

/// A positive triple r + s + t = p whose core sum A_2(r) + A_2(s) + A_2(t)
/// is nonzero mod p^2. Tries (h, h, 1), then the thirds triple when 3 | p - 1,
/// then every (r, s, t) with r <= s by increasing r.
pub fn h_triple_coresum(p: u64) -> Result<TripleWitness> {
    if p < 5 {
        return Err(Error::out_of_range("p", p));
    }
    if p >= 1 << 32 {
        return Err(Error::Oversize {
            size: p.into(),
            bound: 1 << 32,
        });
    }
    PrimePowerModulus::new(p, 2)?;
    let p2 = p * p;
    let a = |x: u64| pow_mod(x, p, p2);
    let sum = |(r, s, t): (u64, u64, u64)| (a(r) + a(s) + a(t)) % p2;
    let h = (p - 1) / 2;
    let half_coresum = sum((h, h, 1));
    let thirds = (p - 1).is_multiple_of(3).then(|| ((p - 1) / 3, 2 * (p - 1) / 3, 1));
    let candidates = std::iter::once(((h, h, 1), TripleRule::Half))
        .chain(thirds.map(|t| (t, TripleRule::Thirds)))
        .chain((1..p).flat_map(move |r| {
            (r..p - r).map(move |s| ((r, s, p - r - s), TripleRule::Search))
        }));
    for (triple, rule) in candidates {
        if triple.2 == 0 {
            continue;
        }
        let c = sum(triple);
        if c != 0 {
            return Ok(TripleWitness {
                p,
                triple,
                coresum: c,
                m: c / p,
                rule,
                half_coresum,
            });
        }
    }
    Err(Error::NoTripleFound(p))
}

/// N_i = {x : x = i mod p}, ascending.
pub fn translation_classes(m: &PrimePowerModulus, i: u64) -> Result<Vec<u64>> {
    let n = m.table_size()?;
    let p = m.p_u64().expect("fits");
    if i >= p {
        return Err(Error::out_of_range("class index i", i));
    }
    Ok((i..n).step_by(p as usize).collect())
}

pub fn class_of(p: u64, x: u64) -> u64 {
    x % p
}
