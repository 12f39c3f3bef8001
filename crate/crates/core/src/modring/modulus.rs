use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::modring::Residue;
use crate::primes::is_prime;

/// Default cap on the number of residues a set-returning operation will
/// materialize: 2^26.
pub const DEFAULT_TABLE_BOUND: u64 = 1 << 26;

/// The ring Z mod p^k for an odd prime p.
///
/// Cheap to clone: the descriptor is shared behind an `Arc`, and residues
/// carry a clone of it.
#[derive(Clone)]
pub struct PrimePowerModulus(Arc<Inner>);

struct Inner {
    p: BigUint,
    k: u32,
    modulus: BigUint,
    units_order: BigUint,
    ext_order: BigUint,
    p_small: Option<u64>,
    modulus_small: Option<u64>,
    table_bound: u64,
}

impl PartialEq for PrimePowerModulus {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.k == other.0.k)
    }
}

impl Eq for PrimePowerModulus {}

impl fmt::Debug for PrimePowerModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}^{}", self.0.p, self.0.k)
    }
}

impl fmt::Display for PrimePowerModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.0.p, self.0.k)
    }
}

impl PrimePowerModulus {
    /// Validates `p` and `k`. Oversized moduli are accepted for pure
    /// arithmetic; table operations on them fail with `Oversize`.
    pub fn new(p: impl Into<BigUint>, k: u32) -> Result<Self> {
        Self::with_table_bound(p, k, DEFAULT_TABLE_BOUND)
    }

    pub fn with_table_bound(p: impl Into<BigUint>, k: u32, table_bound: u64) -> Result<Self> {
        let p = p.into();
        if p == BigUint::from(2u32) {
            return Err(Error::EvenPrime);
        }
        if !is_prime(&p) {
            return Err(Error::NotPrime(p));
        }
        if k < 1 {
            return Err(Error::BadExponent(k as u64));
        }
        Ok(Self::build(p, k, table_bound))
    }

    /// Like [`new`](Self::new) but refuses moduli too large for tables.
    pub fn for_tables(p: impl Into<BigUint>, k: u32, table_bound: u64) -> Result<Self> {
        let m = Self::with_table_bound(p, k, table_bound)?;
        m.table_size()?;
        Ok(m)
    }

    fn build(p: BigUint, k: u32, table_bound: u64) -> Self {
        let ext_order = num_traits::pow(p.clone(), (k - 1) as usize);
        let modulus = &ext_order * &p;
        let units_order = &ext_order * (&p - 1u32);
        PrimePowerModulus(Arc::new(Inner {
            p_small: p.to_u64(),
            modulus_small: modulus.to_u64(),
            p,
            k,
            modulus,
            units_order,
            ext_order,
            table_bound,
        }))
    }

    /// Same prime at another precision. Skips the primality test.
    pub fn with_precision(&self, k: u32) -> Result<Self> {
        if k < 1 {
            return Err(Error::BadExponent(k as u64));
        }
        Ok(Self::build(self.0.p.clone(), k, self.0.table_bound))
    }

    pub fn p(&self) -> &BigUint {
        &self.0.p
    }

    pub fn k(&self) -> u32 {
        self.0.k
    }

    pub fn modulus(&self) -> &BigUint {
        &self.0.modulus
    }

    /// |G_k| = (p - 1) p^(k-1).
    pub fn units_order(&self) -> &BigUint {
        &self.0.units_order
    }

    /// |B_k| = p^(k-1).
    pub fn ext_order(&self) -> &BigUint {
        &self.0.ext_order
    }

    pub fn p_u64(&self) -> Option<u64> {
        self.0.p_small
    }

    pub fn modulus_u64(&self) -> Option<u64> {
        self.0.modulus_small
    }

    pub fn table_bound(&self) -> u64 {
        self.0.table_bound
    }

    pub fn tables_allowed(&self) -> bool {
        self.table_size().is_ok()
    }

    /// p^k as a machine word, or `Oversize` when it exceeds the table bound.
    pub fn table_size(&self) -> Result<u64> {
        match self.0.modulus_small {
            Some(n) if n <= self.0.table_bound => Ok(n),
            _ => Err(Error::Oversize {
                size: self.0.modulus.clone(),
                bound: self.0.table_bound,
            }),
        }
    }

    /// The prime as a word, or `Oversize` if it does not fit one. Used by
    /// operations that keep one entry per residue class mod p.
    pub fn p_for_tables(&self) -> Result<u64> {
        match self.0.p_small {
            Some(p) if p <= self.0.table_bound => Ok(p),
            _ => Err(Error::Oversize {
                size: self.0.p.clone(),
                bound: self.0.table_bound,
            }),
        }
    }

    pub fn residue(&self, value: impl Into<BigUint>) -> Residue {
        Residue::new(self, value.into())
    }

    pub fn zero(&self) -> Residue {
        self.residue(BigUint::zero())
    }

    pub fn one(&self) -> Residue {
        self.residue(BigUint::one())
    }

    /// p^k - 1, i.e. -1.
    pub fn minus_one(&self) -> Residue {
        self.residue(&self.0.modulus - 1u32)
    }
}
