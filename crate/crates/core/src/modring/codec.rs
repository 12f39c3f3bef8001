//! Base-p text form of residues: exactly k digits, most significant first.
//!
//! For p < 37 digits are `0-9` then lowercase `a-z` (so p = 11 prints
//! `4a2`). Larger primes have no single-character digits left and use
//! dot-separated decimal digit groups, e.g. `12.0.40` for p = 41.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::modring::{PrimePowerModulus, Residue};

const SYMBOLS: &[u8; 36] = b"0123456789abcdefghijklmnopqrstuvwxyz";

fn uses_letters(p: &BigUint) -> bool {
    p.to_u64().is_some_and(|p| p <= 36)
}

/// Base-p digits of `value`, least significant first, exactly `k` of them.
/// Digits above position `k` are dropped.
pub fn digits(value: &BigUint, p: &BigUint, k: u32) -> Vec<BigUint> {
    let mut rest = value.clone();
    (0..k)
        .map(|_| {
            let d = &rest % p;
            rest /= p;
            d
        })
        .collect()
}

pub fn encode_value(value: &BigUint, p: &BigUint, k: u32) -> String {
    let ds = digits(value, p, k);
    if uses_letters(p) {
        ds.iter()
            .rev()
            .map(|d| SYMBOLS[d.to_usize().unwrap()] as char)
            .collect()
    } else {
        ds.iter()
            .rev()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(".")
    }
}

pub fn encode_base_p(r: &Residue) -> String {
    let m = r.modulus();
    encode_value(r.value(), m.p(), m.k())
}

/// Inverse of [`encode_base_p`]. Shorter strings are read as if zero-padded;
/// longer ones are accepted only when the extra leading digits are zero.
pub fn decode_base_p(s: &str, modulus: &PrimePowerModulus) -> Result<Residue> {
    let p = modulus.p();
    let bad = |digit: &str| Error::BadDigit {
        base: p.clone(),
        digit: digit.to_string(),
    };
    if s.is_empty() {
        return Err(bad(s));
    }
    let digits: Vec<BigUint> = if uses_letters(p) {
        s.chars()
            .map(|c| {
                let v = match c {
                    '0'..='9' => c as u64 - '0' as u64,
                    'a'..='z' => c as u64 - 'a' as u64 + 10,
                    _ => return Err(bad(&c.to_string())),
                };
                let v = BigUint::from(v);
                if &v >= p {
                    Err(bad(&c.to_string()))
                } else {
                    Ok(v)
                }
            })
            .collect::<Result<_>>()?
    } else {
        s.split('.')
            .map(|g| {
                if g.is_empty() || !g.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad(g));
                }
                let v: BigUint = g.parse().map_err(|_| bad(g))?;
                if &v >= p {
                    Err(bad(g))
                } else {
                    Ok(v)
                }
            })
            .collect::<Result<_>>()?
    };
    let significant = digits.iter().skip_while(|d| d.is_zero()).count();
    if significant > modulus.k() as usize {
        return Err(Error::WrongLength {
            digits: significant,
            k: modulus.k(),
        });
    }
    let value = digits
        .iter()
        .fold(BigUint::zero(), |acc, d| acc * p + d);
    Ok(modulus.residue(value))
}
