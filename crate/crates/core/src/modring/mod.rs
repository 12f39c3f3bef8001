//! Exact residue arithmetic mod p^k and the multiplicative structure of the
//! units group G_k = A_k · B_k.
//!
//! * A_k, the core: the unique subgroup of order p - 1. Its elements satisfy
//!   `x^p = x`.
//! * B_k, the extension group: the units `= 1 mod p`, order p^(k-1),
//!   generated by p + 1.
//! * X^(e) = A_k · Y^(e), the core extensions, where Y^(e) is the subgroup
//!   of B_k of order p^e generated by p^(k-e) + 1. X^(0) = A_k,
//!   X^(k-2) = F_k (the p-th powers), X^(k-1) = G_k.

mod codec;
mod modulus;
mod residue;

pub use codec::{decode_base_p, digits, encode_base_p, encode_value};
pub use modulus::{PrimePowerModulus, DEFAULT_TABLE_BOUND};
pub use residue::Residue;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{factor, Factorization};
use crate::primes::{mul_mod, pow_mod};

pub fn mod_pow(base: &Residue, exponent: &BigUint) -> Residue {
    base.pow(exponent)
}

/// Factorization of |G_k| = (p - 1) p^(k-1).
pub fn units_order_factors(m: &PrimePowerModulus) -> Result<Factorization> {
    let mut f = factor(&(m.p() - 1u32))?;
    if m.k() > 1 {
        f.push((m.p().clone(), m.k() - 1));
    }
    Ok(f)
}

/// Least `t >= 1` with `n^t = 1`.
pub fn multiplicative_order(n: &Residue) -> Result<BigUint> {
    let factors = units_order_factors(n.modulus())?;
    multiplicative_order_with(n, &factors)
}

/// As [`multiplicative_order`], reusing a precomputed factorization of
/// the group order.
pub fn multiplicative_order_with(n: &Residue, units_factors: &Factorization) -> Result<BigUint> {
    if !n.is_unit() {
        return Err(Error::NotAUnit(n.value().clone()));
    }
    let one = n.modulus().one();
    let mut order = n.modulus().units_order().clone();
    for (q, e) in units_factors {
        for _ in 0..*e {
            let (cand, rem) = order.div_rem(q);
            debug_assert!(rem.is_zero());
            if n.pow(&cand) == one {
                order = cand;
            } else {
                break;
            }
        }
    }
    Ok(order)
}

/// Core membership: `x` is a unit with `x^p = x`.
pub fn is_core(x: &Residue) -> bool {
    x.is_unit() && x.pow(x.modulus().p()) == *x
}

/// Splits a unit into its core and extension components,
/// `n = core * ext` with `core` in A_k and `ext = 1 mod p`.
///
/// The core component is `n^(q u)` with `q = p^(k-1)` and
/// `u = q^-1 mod (p - 1)`, which kills the B_k part and fixes the A_k part.
pub fn decompose_unit(n: &Residue) -> Result<(Residue, Residue)> {
    if !n.is_unit() {
        return Err(Error::NotAUnit(n.value().clone()));
    }
    let m = n.modulus();
    let q = m.ext_order();
    let p_minus_1 = BigInt::from(m.p() - 1u32);
    let u = BigInt::from(q.clone())
        .extended_gcd(&p_minus_1)
        .x
        .mod_floor(&p_minus_1)
        .to_biguint()
        .expect("non-negative");
    let core = n.pow(&(q * u));
    let ext = n * &core.inverse()?;
    Ok((core, ext))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubgroupKind {
    /// A_k
    Core,
    /// B_k
    Extension,
    /// F_k, requires k >= 2
    PthPowers,
    /// X^(e)
    CoreExtension,
    /// Y^(e)
    ExtSubgroup,
    /// G_k
    FullUnits,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupDescriptor {
    pub kind: SubgroupKind,
    /// Extension level; for the named subgroups this is the level they sit at
    /// in the X^(e) / Y^(e) chains.
    pub e: u32,
    pub order: BigUint,
}

impl SubgroupDescriptor {
    pub fn new(m: &PrimePowerModulus, kind: SubgroupKind, e: u32) -> Result<Self> {
        let k = m.k();
        let e = match kind {
            SubgroupKind::Core => 0,
            SubgroupKind::Extension | SubgroupKind::FullUnits => k - 1,
            SubgroupKind::PthPowers => {
                if k < 2 {
                    return Err(Error::BadExponent(k as u64));
                }
                k - 2
            }
            SubgroupKind::CoreExtension | SubgroupKind::ExtSubgroup => {
                if e > k - 1 {
                    return Err(Error::out_of_range("extension level e", e));
                }
                e
            }
        };
        let pe = num_traits::pow(m.p().clone(), e as usize);
        let order = match kind {
            SubgroupKind::Extension | SubgroupKind::ExtSubgroup => pe,
            _ => pe * (m.p() - 1u32),
        };
        Ok(SubgroupDescriptor { kind, e, order })
    }

    pub fn core(m: &PrimePowerModulus) -> Self {
        Self::new(m, SubgroupKind::Core, 0).expect("always valid")
    }

    pub fn pth_powers(m: &PrimePowerModulus) -> Result<Self> {
        Self::new(m, SubgroupKind::PthPowers, 0)
    }

    pub fn core_extension(m: &PrimePowerModulus, e: u32) -> Result<Self> {
        Self::new(m, SubgroupKind::CoreExtension, e)
    }

    /// The underlying cyclic subgroup is determined by its order alone.
    pub fn contains(&self, x: &Residue) -> bool {
        x.is_unit() && x.pow(&self.order).is_one_residue()
    }

    /// Sorted member values. Needs p^k within the table bound.
    pub fn members(&self, m: &PrimePowerModulus) -> Result<Vec<u64>> {
        let n = m.table_size()?;
        let p = m.p_u64().expect("fits: p <= p^k");
        let step = p.pow(m.k() - self.e);
        let ys: Vec<u64> = (0..p.pow(self.e)).map(|j| j * step % n + 1).collect();
        let mut out: Vec<u64> = match self.kind {
            SubgroupKind::Extension | SubgroupKind::ExtSubgroup => ys,
            _ => {
                let core = core_values(m)?;
                core.iter()
                    .flat_map(|&a| ys.iter().map(move |&y| mul_mod(a, y, n)))
                    .collect()
            }
        };
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

impl Residue {
    fn is_one_residue(&self) -> bool {
        self.value().is_one()
    }
}

/// Core values A_k(n) = n^(p^(k-1)) mod p^k for n = 1..p-1, in order of n.
pub fn core_values(m: &PrimePowerModulus) -> Result<Vec<u64>> {
    let n = m.table_size()?;
    let p = m.p_u64().expect("fits");
    let q = p.pow(m.k() - 1);
    Ok((1..p).map(|x| pow_mod(x, q, n)).collect())
}

/// X^(e) = A_k · Y^(e) as explicit residues, sorted by value.
pub fn core_extension_members(m: &PrimePowerModulus, e: u32) -> Result<Vec<Residue>> {
    Ok(core_extension_values(m, e)?
        .into_iter()
        .map(|v| m.residue(v))
        .collect())
}

pub fn core_extension_values(m: &PrimePowerModulus, e: u32) -> Result<Vec<u64>> {
    SubgroupDescriptor::core_extension(m, e)?.members(m)
}

/// F_k = {x^p : x a unit}, computed directly from the definition.
pub fn pth_power_values(m: &PrimePowerModulus) -> Result<Vec<u64>> {
    let n = m.table_size()?;
    let p = m.p_u64().expect("fits");
    let mut out: Vec<u64> = (1..n)
        .filter(|x| x % p != 0)
        .map(|x| pow_mod(x, p, n))
        .collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Order of `p - 1`; expected to be 2 p^(k-1) (it generates all residues
/// congruent to +-1 mod p). Exposed for testing that claim.
pub fn order_of_p_minus_one(m: &PrimePowerModulus) -> Result<BigUint> {
    multiplicative_order(&m.residue(m.p() - 1u32))
}
