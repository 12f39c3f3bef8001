//! Fixed-length bitset over the residues `0..len`, with the cyclic shift-or
//! needed for sumset convolution mod `len`.

use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueSet {
    len: usize,
    words: Vec<u64>,
}

impl std::fmt::Debug for ResidueSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl ResidueSet {
    pub fn new(len: usize) -> Self {
        ResidueSet {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_values<I: IntoIterator<Item = u64>>(len: usize, values: I) -> Self {
        let mut set = ResidueSet::new(len);
        for v in values {
            set.insert(v);
        }
        set
    }

    pub fn full(len: usize) -> Self {
        let mut set = ResidueSet {
            len,
            words: vec![u64::MAX; len.div_ceil(64)],
        };
        set.clear_tail();
        set
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn insert(&mut self, v: u64) -> bool {
        let v = v as usize;
        debug_assert!(v < self.len);
        let (w, b) = (v / 64, v % 64);
        let was = self.words[w] >> b & 1 == 1;
        self.words[w] |= 1 << b;
        !was
    }

    pub fn remove(&mut self, v: u64) -> bool {
        let v = v as usize;
        debug_assert!(v < self.len);
        let (w, b) = (v / 64, v % 64);
        let was = self.words[w] >> b & 1 == 1;
        self.words[w] &= !(1 << b);
        was
    }

    #[inline]
    pub fn contains(&self, v: u64) -> bool {
        let v = v as usize;
        v < self.len && self.words[v / 64] >> (v % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let tz = bits.trailing_zeros() as u64;
                bits &= bits - 1;
                Some(i as u64 * 64 + tz)
            })
        })
    }

    pub fn union_with(&mut self, other: &ResidueSet) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn union(&self, other: &ResidueSet) -> ResidueSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn intersection(&self, other: &ResidueSet) -> ResidueSet {
        assert_eq!(self.len, other.len);
        ResidueSet {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn is_subset(&self, other: &ResidueSet) -> bool {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &ResidueSet) -> bool {
        assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len
    }

    /// `self |= src` rotated by `shift`: bit `i` of `src` sets bit
    /// `(i + shift) mod len`.
    pub fn or_rotated(&mut self, src: &ResidueSet, shift: u64) {
        assert_eq!(self.len, src.len);
        if self.len == 0 {
            return;
        }
        let shift = (shift % self.len as u64) as usize;
        if shift == 0 {
            self.union_with(src);
            return;
        }
        or_shift_up(&mut self.words, &src.words, shift);
        or_shift_down(&mut self.words, &src.words, self.len - shift);
        self.clear_tail();
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

// Bits pushed past the last word are dropped; the caller clears the tail.
fn or_shift_up(dst: &mut [u64], src: &[u64], shift: usize) {
    let (ws, bs) = (shift / 64, shift % 64);
    let n = dst.len();
    for j in 0..n.saturating_sub(ws) {
        let w = src[j];
        if w == 0 {
            continue;
        }
        dst[j + ws] |= w << bs;
        if bs > 0 && j + ws + 1 < n {
            dst[j + ws + 1] |= w >> (64 - bs);
        }
    }
}

fn or_shift_down(dst: &mut [u64], src: &[u64], shift: usize) {
    let (ws, bs) = (shift / 64, shift % 64);
    for j in ws..src.len() {
        let w = src[j];
        if w == 0 {
            continue;
        }
        dst[j - ws] |= w >> bs;
        if bs > 0 && j - ws >= 1 {
            dst[j - ws - 1] |= w << (64 - bs);
        }
    }
}
