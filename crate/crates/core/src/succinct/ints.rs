//! Fixed-width packed integer arrays.

use crate::bytes::{ByteReader, ByteWriter};
use crate::error::{Error, Result};

/// Number of bits needed to write `v` (0 needs 0 bits).
#[inline]
pub fn bit_width(v: u64) -> u32 {
    64 - v.leading_zeros()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PackedInts {
    words: Vec<u64>,
    width: u32,
    len: usize,
}

impl PackedInts {
    pub fn with_width(width: u32, len: usize) -> Self {
        assert!(width <= 64);
        let bits = width as usize * len;
        Self {
            words: vec![0; bits.div_ceil(64)],
            width,
            len,
        }
    }

    /// Packs `vals` using the smallest width that fits the maximum.
    pub fn from_slice(vals: &[u64]) -> Self {
        let width = vals.iter().copied().map(bit_width).max().unwrap_or(0);
        let mut p = Self::with_width(width, vals.len());
        for (i, &v) in vals.iter().enumerate() {
            p.set(i, v);
        }
        p
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        assert!(i < self.len, "packed index {i} out of bounds ({})", self.len);
        if self.width == 0 {
            return 0;
        }
        let w = self.width as usize;
        let bit = i * w;
        let (wi, off) = (bit / 64, bit % 64);
        let mask = if w == 64 { u64::MAX } else { (1u64 << w) - 1 };
        let lo = self.words[wi] >> off;
        if off + w <= 64 {
            lo & mask
        } else {
            (lo | (self.words[wi + 1] << (64 - off))) & mask
        }
    }

    pub fn set(&mut self, i: usize, v: u64) {
        assert!(i < self.len);
        if self.width == 0 {
            assert_eq!(v, 0);
            return;
        }
        let w = self.width as usize;
        let mask = if w == 64 { u64::MAX } else { (1u64 << w) - 1 };
        assert!(v & !mask == 0, "value {v} wider than {w} bits");
        let bit = i * w;
        let (wi, off) = (bit / 64, bit % 64);
        self.words[wi] = (self.words[wi] & !(mask << off)) | (v << off);
        if off + w > 64 {
            let hi_bits = off + w - 64;
            let hi_mask = (1u64 << hi_bits) - 1;
            self.words[wi + 1] = (self.words[wi + 1] & !hi_mask) | (v >> (64 - off));
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn size_in_bytes(&self) -> usize {
        8 + 1 + 8 + 8 * self.words.len()
    }

    pub fn write_to(&self, w: &mut ByteWriter) {
        w.put_u64(self.len as u64);
        w.put_u8(self.width as u8);
        w.put_words(&self.words);
    }

    pub fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        let len = r.u64("packed length")? as usize;
        let width = r.u8("packed width")? as u32;
        if width > 64 {
            return Err(Error::Corrupt(format!("packed width {width}")));
        }
        let words = r.words("packed words")?;
        let need = (width as u128 * len as u128).div_ceil(64);
        if words.len() as u128 != need {
            return Err(Error::Corrupt("packed word count".into()));
        }
        Ok(Self { words, width, len })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straddling_words() {
        let vals: Vec<u64> = (0..200).map(|i| (i * 0x9E37_79B9u64) % (1 << 37)).collect();
        let p = PackedInts::from_slice(&vals);
        assert!(p.width() <= 37);
        assert_eq!(p.iter().collect::<Vec<_>>(), vals);
    }

    #[test]
    fn full_width_and_zero_width() {
        let p = PackedInts::from_slice(&[u64::MAX, 0, 1]);
        assert_eq!(p.width(), 64);
        assert_eq!(p.get(0), u64::MAX);
        assert_eq!(p.get(2), 1);
        let z = PackedInts::from_slice(&[0, 0, 0]);
        assert_eq!(z.width(), 0);
        assert_eq!(z.get(1), 0);
    }
}
