//! Structure of the residue ring Z mod p^k for odd primes p: the core
//! subgroup, Fermat-quotient carries, critical precision, pairsum cosets,
//! sums of p-th powers, and scans over primes.

pub mod bitset;
pub mod corefst;
pub mod error;
pub mod factor;
pub mod generators;
pub mod modring;
pub mod pairsums;
pub mod primes;
pub mod waring;

mod serde_dec;

pub use bitset::ResidueSet;
pub use corefst::{CoreTable, CriticalPrecision};
pub use error::{Error, Result};
pub use modring::{PrimePowerModulus, Residue, SubgroupDescriptor, SubgroupKind};
pub use pairsums::CosetReport;
pub use waring::{CoverageReport, TripleWitness};
