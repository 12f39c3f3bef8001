//! Pairsum cosets. The nonzero unit sums of a core extension X with itself
//! split into cosets X·d, one per distinct core increment d in D_k.

use std::collections::HashSet;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::bitset::ResidueSet;
use crate::corefst::{build_core_table, critical_precision, half, CoreTable, KP_GUARD};
use crate::error::{Error, Result};
use crate::modring::{core_extension_values, core_values, PrimePowerModulus, Residue};
use crate::primes::mul_mod;

/// Above this many pairs, F + F is checked on random samples.
pub const EXHAUSTIVE_PAIRS: u64 = 100_000_000;
const SAMPLES: usize = 1 << 20;

#[derive(Debug, Clone)]
pub struct CosetReport {
    pub modulus: PrimePowerModulus,
    /// D_k: distinct d_k(n), n = 1..p-2, in order of first appearance.
    pub generators: Vec<Residue>,
    /// How many n in 1..p-2 give each generator.
    pub multiplicities: Vec<usize>,
    /// Distinct d_k(n) over n = 1..h.
    pub distinct_count: usize,
    /// |F_k| |D_2|, for k >= 2.
    pub pairsum_count_predicted: Option<u64>,
    pub pairsum_count_observed: Option<u64>,
}

/// D_2 from a table at any k >= 2: the core at k reduces to the core at 2.
fn d2_count(table: &CoreTable) -> usize {
    let p = table.p();
    let p2 = num_bigint::BigUint::from(p * p);
    (1..=half(p))
        .map(|n| table.increment(n).value() % &p2)
        .collect::<HashSet<_>>()
        .len()
}

fn fermat_order(m: &PrimePowerModulus) -> Option<u64> {
    let p = m.p_u64()?;
    (m.k() >= 2).then(|| (p - 1) * p.pow(m.k() - 2))
}

pub fn coset_generators(table: &CoreTable) -> CosetReport {
    let p = table.p();
    let mut generators: Vec<Residue> = Vec::new();
    let mut multiplicities = Vec::new();
    for n in 1..p.saturating_sub(1) {
        let d = table.increment(n);
        match generators.iter().position(|g| g == d) {
            Some(i) => multiplicities[i] += 1,
            None => {
                generators.push(d.clone());
                multiplicities.push(1);
            }
        }
    }
    let m = &table.modulus;
    CosetReport {
        modulus: m.clone(),
        generators,
        multiplicities,
        distinct_count: table.distinct_first_half(),
        pairsum_count_predicted: fermat_order(m).map(|f| f * d2_count(table) as u64),
        pairsum_count_observed: None,
    }
}

fn word(r: &Residue) -> u64 {
    r.to_u64().expect("table moduli fit a word")
}

/// All a + b mod n, by a direct double loop split over the outer index.
fn pair_sums(xs: &[u64], ys: &[u64], n: u64) -> ResidueSet {
    xs.par_iter()
        .fold(
            || ResidueSet::new(n as usize),
            |mut acc, &a| {
                for &b in ys {
                    let s = a + b;
                    acc.insert(if s >= n { s - n } else { s });
                }
                acc
            },
        )
        .reduce(|| ResidueSet::new(n as usize), |a, b| a.union(&b))
}

/// Union of the cosets X·d.
fn coset_union(xs: &[u64], gens: &[u64], n: u64) -> ResidueSet {
    ResidueSet::from_values(
        n as usize,
        gens.iter()
            .flat_map(|&d| xs.iter().map(move |&x| mul_mod(x, d, n))),
    )
}

fn split_units(set: &ResidueSet, p: u64) -> (u64, u64) {
    let units = set.iter().filter(|v| v % p != 0).count() as u64;
    (units, set.count() as u64 - units)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorePairsums {
    pub p: u64,
    pub k: u32,
    /// |(A + A) \ 0|.
    pub observed: u64,
    /// |A| |D_k|.
    pub predicted: u64,
    /// (p - 1)^2 / 2.
    pub full_count: u64,
    pub kp: Option<u32>,
    /// Whether every nonzero sum lies in a full coset A·s inside the sumset.
    pub coset_closed: bool,
}

impl CorePairsums {
    pub fn at_or_above_kp(&self) -> Option<bool> {
        self.kp.map(|kp| self.k >= kp)
    }
}

pub fn core_pairsum_count(m: &PrimePowerModulus) -> Result<CorePairsums> {
    let n = m.table_size()?;
    if m.k() < 2 {
        return Err(Error::BadExponent(m.k() as u64));
    }
    let p = m.p_u64().expect("fits");
    let core = core_values(m)?;
    let mut sums = pair_sums(&core, &core, n);
    sums.remove(0);
    let table = build_core_table(m)?;
    let coset_closed = sums
        .iter()
        .all(|s| core.iter().all(|&a| sums.contains(mul_mod(a, s, n))));
    Ok(CorePairsums {
        p,
        k: m.k(),
        observed: sums.count() as u64,
        predicted: (p - 1) * table.distinct_first_half() as u64,
        full_count: (p - 1) * (p - 1) / 2,
        kp: (p <= KP_GUARD).then(|| critical_precision(p).map(|r| r.kp)).transpose()?,
        coset_closed,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FermatPairsums {
    pub p: u64,
    pub k: u32,
    /// |(F + F) \ 0|; absent when sampled.
    pub observed_total: Option<u64>,
    /// Unit sums only.
    pub observed_units: Option<u64>,
    /// Nonzero multiples of p among the sums.
    pub observed_nonunits: Option<u64>,
    /// |F| |D_2|.
    pub predicted: u64,
    /// |F·D_2|, the coset expansion.
    pub coset_union: u64,
    /// Unit sums coincide with F·D_2 (on the samples, if sampled).
    pub units_match: bool,
    pub sampled: bool,
}

impl FermatPairsums {
    /// The count identity read literally: every nonzero sum counted.
    pub fn literal_holds(&self) -> Option<bool> {
        self.observed_total.map(|t| t == self.predicted)
    }

    /// The count identity over unit sums.
    pub fn units_hold(&self) -> bool {
        self.units_match
            && self.coset_union == self.predicted
            && self.observed_units.is_none_or(|u| u == self.predicted)
    }
}

pub fn fermat_pairsum_count(m: &PrimePowerModulus) -> Result<FermatPairsums> {
    let n = m.table_size()?;
    if m.k() < 2 {
        return Err(Error::BadExponent(m.k() as u64));
    }
    let p = m.p_u64().expect("fits");
    let f = core_extension_values(m, m.k() - 2)?;
    let table = build_core_table(&m.with_precision(2)?)?;
    let d2: Vec<u64> = coset_generators(&table).generators.iter().map(word).collect();
    let union = coset_union(&f, &d2, n);
    let predicted = f.len() as u64 * d2.len() as u64;
    let pairs = f.len() as u64 * f.len() as u64;
    let mut report = FermatPairsums {
        p,
        k: m.k(),
        observed_total: None,
        observed_units: None,
        observed_nonunits: None,
        predicted,
        coset_union: union.count() as u64,
        units_match: false,
        sampled: pairs > EXHAUSTIVE_PAIRS,
    };
    if report.sampled {
        let mut rng = StdRng::seed_from_u64(p ^ (m.k() as u64) << 32);
        report.units_match = (0..SAMPLES).all(|_| {
            let (a, b) = (f[rng.gen_range(0..f.len())], f[rng.gen_range(0..f.len())]);
            let s = (a + b) % n;
            s % p == 0 || union.contains(s)
        });
    } else {
        let mut sums = pair_sums(&f, &f, n);
        sums.remove(0);
        let (units, nonunits) = split_units(&sums, p);
        let unit_sums = ResidueSet::from_values(n as usize, sums.iter().filter(|v| v % p != 0));
        report.observed_total = Some(sums.count() as u64);
        report.observed_units = Some(units);
        report.observed_nonunits = Some(nonunits);
        report.units_match = unit_sums == union;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtensionPairsums {
    pub p: u64,
    pub k: u32,
    pub e: u32,
    pub extension_order: u64,
    /// |D_k|.
    pub generators: usize,
    pub unit_sums: u64,
    pub coset_union: u64,
    /// Nonzero multiples of p in X + X, outside the coset statement.
    pub nonunit_sums: u64,
    /// Unit part of (X + X) \ 0 equals the union of X·d, d in D_k.
    pub holds: bool,
}

pub fn extension_pairsum_check(m: &PrimePowerModulus, e: u32) -> Result<ExtensionPairsums> {
    let n = m.table_size()?;
    if m.k() < 2 || e > m.k() - 2 {
        return Err(Error::out_of_range("extension level e", e));
    }
    let p = m.p_u64().expect("fits");
    let x = core_extension_values(m, e)?;
    let gens: Vec<u64> = coset_generators(&build_core_table(m)?)
        .generators
        .iter()
        .map(word)
        .collect();
    let union = coset_union(&x, &gens, n);
    let mut sums = pair_sums(&x, &x, n);
    sums.remove(0);
    let unit_sums = ResidueSet::from_values(n as usize, sums.iter().filter(|v| v % p != 0));
    let (units, nonunits) = split_units(&sums, p);
    Ok(ExtensionPairsums {
        p,
        k: m.k(),
        e,
        extension_order: x.len() as u64,
        generators: gens.len(),
        unit_sums: units,
        coset_union: union.count() as u64,
        nonunit_sums: nonunits,
        holds: unit_sums == union,
    })
}

/// F + F and F - F as sets.
pub fn fermat_sum_and_difference(m: &PrimePowerModulus) -> Result<(ResidueSet, ResidueSet)> {
    let n = m.table_size()?;
    let f = core_extension_values(m, m.k().saturating_sub(2))?;
    let neg: Vec<u64> = f.iter().map(|&v| n - v).collect();
    Ok((pair_sums(&f, &f, n), pair_sums(&f, &neg, n)))
}
