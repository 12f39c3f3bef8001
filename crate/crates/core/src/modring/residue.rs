use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::modring::PrimePowerModulus;

/// A canonical residue in `[0, p^k)`.
#[derive(Clone, PartialEq, Eq)]
pub struct Residue {
    value: BigUint,
    modulus: PrimePowerModulus,
}

impl fmt::Debug for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

impl Residue {
    pub(crate) fn new(modulus: &PrimePowerModulus, value: BigUint) -> Self {
        let value = if &value >= modulus.modulus() {
            value % modulus.modulus()
        } else {
            value
        };
        Residue {
            value,
            modulus: modulus.clone(),
        }
    }

    pub fn from_signed(modulus: &PrimePowerModulus, value: &BigInt) -> Self {
        let m = BigInt::from(modulus.modulus().clone());
        let v = value.mod_floor(&m).to_biguint().expect("non-negative after mod_floor");
        Residue::new(modulus, v)
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.value.to_u64()
    }

    pub fn modulus(&self) -> &PrimePowerModulus {
        &self.modulus
    }

    /// Representative of least absolute value: `value - p^k` when that is
    /// closer to zero.
    pub fn signed_value(&self) -> BigInt {
        let m = self.modulus.modulus();
        let upper = m - &self.value;
        if upper < self.value {
            -BigInt::from(upper)
        } else {
            BigInt::from(self.value.clone())
        }
    }

    /// `value mod p`, the translation class N_i this residue lies in.
    pub fn class_mod_p(&self) -> BigUint {
        &self.value % self.modulus.p()
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        !self.class_mod_p().is_zero()
    }

    pub fn pow(&self, exponent: &BigUint) -> Residue {
        Residue {
            value: self.value.modpow(exponent, self.modulus.modulus()),
            modulus: self.modulus.clone(),
        }
    }

    pub fn pow_u64(&self, exponent: u64) -> Residue {
        self.pow(&BigUint::from(exponent))
    }

    pub fn inverse(&self) -> Result<Residue> {
        if !self.is_unit() {
            return Err(Error::NotAUnit(self.value.clone()));
        }
        let m = BigInt::from(self.modulus.modulus().clone());
        let g = BigInt::from(self.value.clone()).extended_gcd(&m);
        debug_assert!(g.gcd.is_one());
        Ok(Residue::from_signed(&self.modulus, &g.x))
    }

    pub fn checked_add(&self, rhs: &Residue) -> Result<Residue> {
        self.same_ring(rhs)?;
        Ok(self + rhs)
    }

    pub fn checked_mul(&self, rhs: &Residue) -> Result<Residue> {
        self.same_ring(rhs)?;
        Ok(self * rhs)
    }

    fn same_ring(&self, rhs: &Residue) -> Result<()> {
        if self.modulus == rhs.modulus {
            Ok(())
        } else {
            Err(Error::ModulusMismatch)
        }
    }
}

impl Add for &Residue {
    type Output = Residue;
    fn add(self, rhs: &Residue) -> Residue {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Residue::new(&self.modulus, &self.value + &rhs.value)
    }
}

impl Sub for &Residue {
    type Output = Residue;
    fn sub(self, rhs: &Residue) -> Residue {
        debug_assert_eq!(self.modulus, rhs.modulus);
        let m = self.modulus.modulus();
        Residue::new(&self.modulus, &self.value + m - &rhs.value)
    }
}

impl Mul for &Residue {
    type Output = Residue;
    fn mul(self, rhs: &Residue) -> Residue {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Residue::new(&self.modulus, &self.value * &rhs.value)
    }
}

impl Neg for &Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        if self.value.is_zero() {
            return self.clone();
        }
        Residue::new(&self.modulus, self.modulus.modulus() - &self.value)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Residue {
            type Output = Residue;
            fn $f(self, rhs: Residue) -> Residue {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        -&self
    }
}
