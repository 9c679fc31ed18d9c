//! Fixed-length bit vectors over vertex indices, stored as 64-bit words.

use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitRow {
    len: usize,
    words: Vec<u64>,
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        BitRow {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut row = BitRow {
            len,
            words: vec![u64::MAX; len.div_ceil(64)],
        };
        row.clear_tail();
        row
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] |= 1u64 << (i & 63);
    }

    #[inline]
    pub fn clear(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] &= !(1u64 << (i & 63));
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Popcount of `self & other` without allocating.
    #[inline]
    pub fn and_count(&self, other: &BitRow) -> u64 {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as u64)
            .sum()
    }

    /// Writes `a & b` into `self`.
    #[inline]
    pub fn assign_and(&mut self, a: &BitRow, b: &BitRow) {
        for ((out, x), y) in self.words.iter_mut().zip(&a.words).zip(&b.words) {
            *out = x & y;
        }
    }

    pub fn and_with(&mut self, other: &BitRow) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn and_not_with(&mut self, other: &BitRow) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    /// Clears every bit with index `<= i`.
    pub fn clear_through(&mut self, i: usize) {
        let w = i >> 6;
        for word in &mut self.words[..w] {
            *word = 0;
        }
        let bit = i & 63;
        self.words[w] &= if bit == 63 { 0 } else { !((2u64 << bit) - 1) };
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut word = w;
            std::iter::from_fn(move || {
                if word == 0 {
                    None
                } else {
                    let t = word.trailing_zeros() as usize;
                    word &= word - 1;
                    Some(wi * 64 + t)
                }
            })
        })
    }

    /// Lowercase hex, one byte per 8 vertices; vertex `8b + j` is bit `j` of byte `b`.
    pub fn to_hex(&self) -> String {
        let nbytes = self.len.div_ceil(8);
        let mut s = String::with_capacity(nbytes * 2);
        for b in 0..nbytes {
            let byte = (self.words[b / 8] >> ((b % 8) * 8)) as u8;
            write!(s, "{byte:02x}").unwrap();
        }
        s
    }

    pub fn from_hex(hex: &str, len: usize) -> Option<BitRow> {
        if hex.len() != len.div_ceil(8) * 2 {
            return None;
        }
        let mut row = BitRow::zeros(len);
        for b in 0..len.div_ceil(8) {
            let byte = u8::from_str_radix(hex.get(2 * b..2 * b + 2)?, 16).ok()?;
            row.words[b / 8] |= (byte as u64) << ((b % 8) * 8);
        }
        let before = row.clone();
        row.clear_tail();
        (row == before).then_some(row)
    }
}

impl FromIterator<usize> for BitRow {
    /// Collects indices into a row just long enough to hold the largest one.
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let idx: Vec<usize> = iter.into_iter().collect();
        let len = idx.iter().max().map_or(0, |&m| m + 1);
        let mut row = BitRow::zeros(len);
        for i in idx {
            row.set(i);
        }
        row
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn clear_through_boundaries() {
        let mut r = BitRow::ones(130);
        r.clear_through(63);
        assert_eq!(r.count_ones(), 66);
        r.clear_through(64);
        assert_eq!(r.count_ones(), 65);
        r.clear_through(129);
        assert_eq!(r.count_ones(), 0);
    }

    #[test]
    fn hex_layout() {
        let mut r = BitRow::zeros(10);
        r.set(0);
        r.set(9);
        assert_eq!(r.to_hex(), "0102");
        assert_eq!(BitRow::from_hex("0102", 10), Some(r));
        // bit 10 lies past the end
        assert_eq!(BitRow::from_hex("0106", 10), None);
    }

    proptest! {
        #[test]
        fn hex_round_trip(len in 1usize..300, seed in any::<u64>()) {
            let mut r = BitRow::zeros(len);
            let mut s = seed;
            for i in 0..len {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                if s >> 63 == 1 { r.set(i); }
            }
            prop_assert_eq!(BitRow::from_hex(&r.to_hex(), len), Some(r.clone()));
            prop_assert_eq!(r.iter_ones().count() as u64, r.count_ones());
        }
    }
}
