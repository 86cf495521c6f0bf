//! Plain bitmaps with a rank directory.
//!
//! Positions in [`BitVector::rank`] and [`BitVector::select`] are 1-based:
//! `rank(b, p)` counts occurrences of `b` in `B[1..=p]` and `select(b, n)`
//! returns the 1-based position of the `n`-th `b`. Plain element access via
//! [`BitVector::get`] is 0-based like a slice.
//!
//! The directory keeps one absolute 64-bit count per 1024-bit block, which
//! adds 6.25% on top of the bitmap.

use crate::bytes::{ByteReader, ByteWriter};
use crate::error::{Error, Result};

const WORDS_PER_BLOCK: usize = 16;
const BITS_PER_BLOCK: usize = WORDS_PER_BLOCK * 64;

#[derive(Debug, Default, Clone)]
pub struct BitVectorBuilder {
    words: Vec<u64>,
    len: usize,
}

impl BitVectorBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_len(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn push(&mut self, bit: bool) {
        if self.len % 64 == 0 {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / 64] |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "set out of bounds");
        let mask = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn build(self) -> BitVector {
        BitVector::from_words(self.words, self.len)
    }
}

/// Immutable bitmap supporting constant-time rank and logarithmic select.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
    blocks: Vec<u64>,
    ones: usize,
}

impl Default for BitVector {
    fn default() -> Self {
        BitVector::from_words(Vec::new(), 0)
    }
}

impl FromIterator<bool> for BitVector {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut b = BitVectorBuilder::new();
        for bit in iter {
            b.push(bit);
        }
        b.build()
    }
}

impl BitVector {
    /// Parses a string of `0`/`1` characters; anything else is ignored.
    pub fn from_bit_str(s: &str) -> Self {
        s.chars()
            .filter(|c| *c == '0' || *c == '1')
            .map(|c| c == '1')
            .collect()
    }

    fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        words.truncate(len.div_ceil(64));
        if len % 64 != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << (len % 64)) - 1;
            }
        }
        let mut blocks = Vec::with_capacity(words.len() / WORDS_PER_BLOCK + 1);
        let mut acc = 0u64;
        for (i, w) in words.iter().enumerate() {
            if i % WORDS_PER_BLOCK == 0 {
                blocks.push(acc);
            }
            acc += w.count_ones() as u64;
        }
        blocks.push(acc);
        Self {
            words,
            len,
            blocks,
            ones: acc as usize,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn count_ones(&self) -> usize {
        self.ones
    }

    pub fn count_zeros(&self) -> usize {
        self.len - self.ones
    }

    /// 0-based access. Panics when `i >= len`.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of bounds ({})", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Number of 1s in the first `p` bits. Panics when `p > len`.
    #[inline]
    pub fn rank1(&self, p: usize) -> usize {
        assert!(p <= self.len, "rank position {p} out of bounds ({})", self.len);
        let w = p / 64;
        let block = w / WORDS_PER_BLOCK;
        let mut r = self.blocks[block] as usize;
        for word in &self.words[block * WORDS_PER_BLOCK..w] {
            r += word.count_ones() as usize;
        }
        if p % 64 != 0 {
            r += (self.words[w] & ((1u64 << (p % 64)) - 1)).count_ones() as usize;
        }
        r
    }

    #[inline]
    pub fn rank0(&self, p: usize) -> usize {
        p - self.rank1(p)
    }

    /// Checked rank: occurrences of `bit` in positions `1..=p`.
    pub fn rank(&self, bit: bool, p: usize) -> Result<usize> {
        if p > self.len {
            return Err(Error::OutOfBounds { pos: p, len: self.len });
        }
        Ok(if bit { self.rank1(p) } else { self.rank0(p) })
    }

    /// 1-based position of the `n`-th 1, or `None`.
    pub fn select1(&self, n: usize) -> Option<usize> {
        if n == 0 || n > self.ones {
            return None;
        }
        self.select_impl(true, n)
    }

    /// 1-based position of the `n`-th 0, or `None`.
    pub fn select0(&self, n: usize) -> Option<usize> {
        if n == 0 || n > self.len - self.ones {
            return None;
        }
        self.select_impl(false, n)
    }

    /// Checked select for either bit value.
    pub fn select(&self, bit: bool, n: usize) -> Result<usize> {
        let r = if bit { self.select1(n) } else { self.select0(n) };
        r.ok_or(Error::NotFound { nth: n })
    }

    fn select_impl(&self, bit: bool, n: usize) -> Option<usize> {
        let count_before = |b: usize| -> usize {
            let ones = self.blocks[b] as usize;
            if bit {
                ones
            } else {
                (b * BITS_PER_BLOCK).min(self.len) - ones
            }
        };
        // binary search for the last block whose prefix count is < n
        let (mut lo, mut hi) = (0usize, self.blocks.len() - 1);
        while lo + 1 < hi {
            let mid = (lo + hi) / 2;
            if count_before(mid) < n {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut remaining = n - count_before(lo);
        let last = self.words.len().saturating_sub(1);
        for (wi, &raw) in self.words.iter().enumerate().skip(lo * WORDS_PER_BLOCK) {
            let mut w = if bit { raw } else { !raw };
            if wi == last && self.len % 64 != 0 {
                w &= (1u64 << (self.len % 64)) - 1;
            }
            let c = w.count_ones() as usize;
            if c >= remaining {
                for _ in 1..remaining {
                    w &= w - 1;
                }
                return Some(wi * 64 + w.trailing_zeros() as usize + 1);
            }
            remaining -= c;
        }
        None
    }

    /// Serialized size in bytes.
    pub fn size_in_bytes(&self) -> usize {
        16 + 8 * self.words.len()
    }

    /// Bytes used by the rank directory alone (not serialized; rebuilt on load).
    pub fn directory_bytes(&self) -> usize {
        8 * self.blocks.len()
    }

    pub fn write_to(&self, w: &mut ByteWriter) {
        w.put_u64(self.len as u64);
        w.put_words(&self.words);
    }

    pub fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        let len = r.u64("bitvector length")? as usize;
        let words = r.words("bitvector words")?;
        if words.len() != len.div_ceil(64) {
            return Err(Error::Corrupt("bitvector word count".into()));
        }
        Ok(Self::from_words(words, len))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_rank(bits: &[bool], b: bool, p: usize) -> usize {
        bits[..p].iter().filter(|&&x| x == b).count()
    }

    fn naive_select(bits: &[bool], b: bool, n: usize) -> Option<usize> {
        bits.iter()
            .enumerate()
            .filter(|(_, &x)| x == b)
            .nth(n.checked_sub(1)?)
            .map(|(i, _)| i + 1)
    }

    #[test]
    fn small_examples() {
        let bv = BitVector::from_bit_str("10110");
        assert_eq!(bv.rank(true, 5).unwrap(), 3);
        assert_eq!(bv.rank(true, 0).unwrap(), 0);
        // linear-scan oracle for the derived values
        let bits = [true, false, true, true, false];
        assert_eq!(naive_rank(&bits, false, 4), 1);
        assert_eq!(bv.rank(false, 4).unwrap(), 1);
        assert_eq!(naive_select(&bits, true, 2), Some(3));
        assert_eq!(bv.select(true, 2).unwrap(), 3);
        assert_eq!(naive_select(&bits, false, 1), Some(2));
        assert_eq!(bv.select(false, 1).unwrap(), 2);
        assert_eq!(BitVector::from_bit_str("1").select(true, 1).unwrap(), 1);
    }

    #[test]
    fn errors() {
        let bv = BitVector::from_bit_str("10110");
        assert_eq!(bv.rank(true, 6), Err(Error::OutOfBounds { pos: 6, len: 5 }));
        assert_eq!(bv.select(true, 4), Err(Error::NotFound { nth: 4 }));
        assert_eq!(bv.select(false, 3), Err(Error::NotFound { nth: 3 }));
        assert!(bv.select(true, 0).is_err());
    }

    #[test]
    fn crosses_block_boundaries() {
        let bits: Vec<bool> = (0..5000).map(|i| (i * 7919) % 13 < 4 || i % 1024 == 1023).collect();
        let bv: BitVector = bits.iter().copied().collect();
        for p in (0..=bits.len()).step_by(37) {
            assert_eq!(bv.rank1(p), naive_rank(&bits, true, p));
        }
        for n in 1..=bv.count_ones() {
            assert_eq!(bv.select1(n), naive_select(&bits, true, n), "select1({n})");
        }
        for n in (1..=bv.count_zeros()).step_by(3) {
            assert_eq!(bv.select0(n), naive_select(&bits, false, n), "select0({n})");
        }
    }

    #[test]
    fn directory_overhead_within_target() {
        let bv: BitVector = (0..1 << 20).map(|i| i % 3 == 0).collect();
        let overhead = bv.directory_bytes() as f64 / (bv.len() as f64 / 8.0);
        assert!(overhead <= 0.07, "overhead {overhead}");
    }

    #[test]
    fn empty() {
        let bv = BitVector::default();
        assert_eq!(bv.rank1(0), 0);
        assert_eq!(bv.select1(1), None);
        assert_eq!(bv.select0(1), None);
    }
}
