use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(BigUint),

    #[error("p = 2 is not supported; the units group mod 2^k is not cyclic")]
    EvenPrime,

    #[error("precision exponent k = {0} is out of range")]
    BadExponent(u64),

    #[error("table of {size} residues exceeds the configured bound {bound}")]
    Oversize { size: BigUint, bound: u64 },

    #[error("{0} is not a unit (divisible by p)")]
    NotAUnit(BigUint),

    #[error("{what} = {value} is out of range")]
    OutOfRange { what: &'static str, value: BigUint },

    #[error("invalid base-{base} digit {digit:?}")]
    BadDigit { base: BigUint, digit: String },

    #[error("{digits} significant digits do not fit precision k = {k}")]
    WrongLength { digits: usize, k: u32 },

    #[error("no triple r+s+t = {0} with a nonzero core sum mod p^2")]
    NoTripleFound(u64),

    #[error("could not factor {0}")]
    FactorizationFailure(BigUint),

    #[error("{g} does not generate the units group mod {p}^2")]
    NotAGenerator { p: u64, g: u64 },

    #[error("residues belong to different moduli")]
    ModulusMismatch,

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

impl Error {
    pub(crate) fn out_of_range(what: &'static str, value: impl Into<BigUint>) -> Self {
        Error::OutOfRange {
            what,
            value: value.into(),
        }
    }
}
