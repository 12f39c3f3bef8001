//! Big integers serialize as decimal strings.

use num_bigint::BigUint;
use serde::Serializer;

pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}
