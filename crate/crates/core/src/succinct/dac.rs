//! Directly Addressable Codes.
//!
//! Each value is split into chunks, least significant first. Level `l`
//! stores the `l`-th chunk of every value that still has bits left, plus a
//! continuation bitmap telling whether that value goes on to level `l+1`.
//! Access to the `i`-th value costs one rank per extra level.

use super::bitvec::{BitVector, BitVectorBuilder};
use super::ints::{bit_width, PackedInts};
use crate::bytes::{ByteReader, ByteWriter};
use crate::error::{Error, Result};

/// How chunk widths are chosen at build time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DacConfig {
    /// Widths minimizing total payload + continuation bits, found by a
    /// dynamic program over the bit-length histogram. Ties go to fewer levels.
    Optimal,
    /// `width`-bit chunks; the last of at most `max_levels` levels absorbs
    /// whatever high bits remain.
    Fixed { width: u32, max_levels: usize },
}

impl DacConfig {
    /// One-byte chunks, two levels at most.
    pub const BYTE_TWO_LEVELS: DacConfig = DacConfig::Fixed {
        width: 8,
        max_levels: 2,
    };
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Level {
    chunks: PackedInts,
    /// Empty on the last level.
    cont: BitVector,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DacSequence {
    len: usize,
    levels: Vec<Level>,
}

fn value_bits(v: u64) -> u32 {
    bit_width(v).max(1)
}

/// Chunk widths for `values` under `config`. Empty when `values` is empty.
pub fn plan_widths(values: &[u64], config: DacConfig) -> Vec<u32> {
    if values.is_empty() {
        return Vec::new();
    }
    let max_bits = values.iter().copied().map(value_bits).max().unwrap() as usize;
    match config {
        DacConfig::Fixed { width, max_levels } => {
            assert!(width > 0 && max_levels > 0);
            let mut widths = Vec::new();
            let mut covered = 0usize;
            while covered < max_bits {
                if widths.len() + 1 == max_levels {
                    widths.push((max_bits - covered) as u32);
                    break;
                }
                widths.push(width);
                covered += width as usize;
            }
            widths
        }
        DacConfig::Optimal => {
            // longer[c] = number of values needing more than c bits
            let mut hist = vec![0u64; max_bits + 1];
            for &v in values {
                hist[value_bits(v) as usize] += 1;
            }
            let mut longer = vec![0u64; max_bits + 1];
            let mut acc = 0u64;
            for c in (0..=max_bits).rev() {
                longer[c] = acc;
                acc += hist[c];
            }
            // best[c] = (cost, levels, next cut) to encode bits above c
            let mut best: Vec<(u64, usize, usize)> = vec![(0, 0, max_bits); max_bits + 1];
            for c in (0..max_bits).rev() {
                let n = longer[c];
                let mut choice: Option<(u64, usize, usize)> = None;
                for cut in (c + 1..=max_bits).rev() {
                    let (cost, levels) = if cut == max_bits {
                        (n * (cut - c) as u64, 1)
                    } else {
                        (n * (cut - c) as u64 + n + best[cut].0, 1 + best[cut].1)
                    };
                    let better = match choice {
                        None => true,
                        Some((bc, bl, _)) => (cost, levels) < (bc, bl),
                    };
                    if better {
                        choice = Some((cost, levels, cut));
                    }
                }
                best[c] = choice.unwrap();
            }
            let mut widths = Vec::new();
            let mut c = 0;
            while c < max_bits {
                let cut = best[c].2;
                widths.push((cut - c) as u32);
                c = cut;
            }
            widths
        }
    }
}

impl DacSequence {
    pub fn build(values: &[u64], config: DacConfig) -> Self {
        let widths = plan_widths(values, config);
        Self::build_with_widths(values, &widths)
    }

    pub fn build_with_widths(values: &[u64], widths: &[u32]) -> Self {
        if values.is_empty() {
            return Self::default();
        }
        let total: u32 = widths.iter().sum();
        assert!(
            values.iter().all(|&v| value_bits(v) <= total),
            "chunk widths do not cover the values"
        );
        let mut levels = Vec::with_capacity(widths.len());
        // (value, bits already consumed)
        let mut current: Vec<u64> = values.to_vec();
        let mut shift = 0u32;
        for (l, &w) in widths.iter().enumerate() {
            let last = l + 1 == widths.len();
            let mask = if w >= 64 { u64::MAX } else { (1u64 << w) - 1 };
            let mut chunks = PackedInts::with_width(w, current.len());
            let mut cont = BitVectorBuilder::new();
            let mut next = Vec::new();
            for (i, &v) in current.iter().enumerate() {
                let rest = if shift >= 64 { 0 } else { v >> shift };
                chunks.set(i, rest & mask);
                if !last {
                    let more = w < 64 && (rest >> w) != 0;
                    cont.push(more);
                    if more {
                        next.push(v);
                    }
                }
            }
            levels.push(Level {
                chunks,
                cont: cont.build(),
            });
            shift += w;
            current = next;
            if current.is_empty() && !last {
                // remaining levels would be empty; drop trailing continuation info
                break;
            }
        }
        Self {
            len: values.len(),
            levels,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn widths(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.chunks.width()).collect()
    }

    /// Payload bits, excluding headers and rank directories.
    pub fn payload_bits(&self) -> usize {
        self.levels
            .iter()
            .map(|l| l.chunks.len() * l.chunks.width() as usize + l.cont.len())
            .sum()
    }

    /// The `i`-th value. Panics when out of range.
    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        assert!(i < self.len, "dac index {i} out of bounds ({})", self.len);
        let mut idx = i;
        let mut value = 0u64;
        let mut shift = 0u32;
        for level in &self.levels {
            let chunk = level.chunks.get(idx);
            if shift < 64 {
                value |= chunk << shift;
            }
            shift += level.chunks.width();
            if level.cont.is_empty() || !level.cont.get(idx) {
                break;
            }
            idx = level.cont.rank1(idx);
        }
        value
    }

    pub fn access(&self, i: usize) -> Result<u64> {
        if i >= self.len {
            return Err(Error::OutOfBounds { pos: i, len: self.len });
        }
        Ok(self.get(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn size_in_bytes(&self) -> usize {
        8 + 8
            + self
                .levels
                .iter()
                .map(|l| l.chunks.size_in_bytes() + l.cont.size_in_bytes())
                .sum::<usize>()
    }

    pub fn write_to(&self, w: &mut ByteWriter) {
        w.put_u64(self.len as u64);
        w.put_u64(self.levels.len() as u64);
        for l in &self.levels {
            l.chunks.write_to(w);
            l.cont.write_to(w);
        }
    }

    pub fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        let len = r.u64("dac length")? as usize;
        let n = r.len_prefix(16, "dac levels")?;
        let mut levels = Vec::with_capacity(n);
        let mut expected = len;
        for l in 0..n {
            let chunks = PackedInts::read_from(r)?;
            let cont = BitVector::read_from(r)?;
            if chunks.len() != expected {
                return Err(Error::Corrupt("dac level length".into()));
            }
            if l + 1 < n {
                if cont.len() != chunks.len() {
                    return Err(Error::Corrupt("dac continuation length".into()));
                }
                expected = cont.count_ones();
            } else if !cont.is_empty() && cont.count_ones() != 0 {
                return Err(Error::Corrupt("dac dangling continuation".into()));
            }
            levels.push(Level { chunks, cont });
        }
        if n == 0 && len != 0 {
            return Err(Error::Corrupt("dac without levels".into()));
        }
        Ok(Self { len, levels })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent reconstruction: rebuild each value by concatenating its
    /// chunks level by level, following continuation flags in order.
    fn reconstruct_by_levels(d: &DacSequence) -> Vec<u64> {
        let mut out = vec![0u64; d.len];
        let mut owners: Vec<usize> = (0..d.len).collect();
        let mut shift = 0;
        for level in &d.levels {
            let mut next = Vec::new();
            for (j, &owner) in owners.iter().enumerate() {
                out[owner] |= level.chunks.get(j) << shift;
                if !level.cont.is_empty() && level.cont.get(j) {
                    next.push(owner);
                }
            }
            shift += level.chunks.width();
            owners = next;
        }
        out
    }

    /// Exhaustive search over all cut sets for the minimal payload.
    fn brute_force_min_bits(values: &[u64]) -> u64 {
        let max_bits = values.iter().copied().map(value_bits).max().unwrap() as usize;
        let mut best = u64::MAX;
        for mask in 0u64..(1 << (max_bits - 1)) {
            let mut cuts: Vec<usize> = (1..max_bits).filter(|c| mask >> (c - 1) & 1 == 1).collect();
            cuts.push(max_bits);
            let mut prev = 0;
            let mut cost = 0u64;
            for (i, &c) in cuts.iter().enumerate() {
                let n = values.iter().filter(|&&v| value_bits(v) as usize > prev).count() as u64;
                cost += n * (c - prev) as u64;
                if i + 1 < cuts.len() {
                    cost += n;
                }
                prev = c;
            }
            best = best.min(cost);
        }
        best
    }

    #[test]
    fn single_level_when_everything_fits() {
        let d = DacSequence::build(&[0, 1, 2], DacConfig::Fixed { width: 8, max_levels: 2 });
        assert_eq!(d.num_levels(), 1);
        assert_eq!(d.get(2), 2);
    }

    #[test]
    fn two_levels_reconstruct() {
        let vals = [1, 300, 5];
        let d = DacSequence::build(&vals, DacConfig::Fixed { width: 8, max_levels: 2 });
        assert_eq!(d.num_levels(), 2);
        assert_eq!(reconstruct_by_levels(&d), vals);
        assert_eq!(d.get(1), 300);
    }

    #[test]
    fn optimal_for_constant_sevens() {
        let vals = vec![7u64; 100];
        let d = DacSequence::build(&vals, DacConfig::Optimal);
        assert_eq!(d.widths(), vec![3]);
        assert_eq!(d.payload_bits() as u64, brute_force_min_bits(&vals));
        let fixed = DacSequence::build(&vals, DacConfig::Fixed { width: 8, max_levels: 2 });
        assert!(d.payload_bits() < fixed.payload_bits());
    }

    #[test]
    fn optimal_matches_exhaustive_search() {
        let mut state = 12345u64;
        for round in 0..30 {
            let n = 5 + round * 7;
            let vals: Vec<u64> = (0..n)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    let bits = (state >> 59) as u32 % 14;
                    (state >> 20) & ((1u64 << bits) - 1)
                })
                .collect();
            let d = DacSequence::build(&vals, DacConfig::Optimal);
            assert_eq!(d.payload_bits() as u64, brute_force_min_bits(&vals), "round {round}");
            assert_eq!(d.iter().collect::<Vec<_>>(), vals);
        }
    }

    #[test]
    fn small_access() {
        let d = DacSequence::build(&[4, 2, 9], DacConfig::Optimal);
        assert_eq!(d.access(0), Ok(4));
        assert_eq!(d.access(2), Ok(9));
        assert_eq!(d.access(3), Err(Error::OutOfBounds { pos: 3, len: 3 }));
    }

    #[test]
    fn empty_and_huge() {
        let d = DacSequence::build(&[], DacConfig::Optimal);
        assert!(d.is_empty());
        assert!(d.access(0).is_err());
        let vals = [u64::MAX, 0, 1 << 63, 255];
        for cfg in [DacConfig::Optimal, DacConfig::BYTE_TWO_LEVELS, DacConfig::Fixed { width: 3, max_levels: 40 }] {
            let d = DacSequence::build(&vals, cfg);
            assert_eq!(d.iter().collect::<Vec<_>>(), vals, "{cfg:?}");
        }
    }

    #[test]
    fn serialization_round_trip() {
        let vals: Vec<u64> = (0..1000).map(|i| (i * i * 31) % 70000).collect();
        let d = DacSequence::build(&vals, DacConfig::Optimal);
        let mut w = ByteWriter::new();
        d.write_to(&mut w);
        assert_eq!(w.len(), d.size_in_bytes());
        let back = DacSequence::read_from(&mut ByteReader::new(w.as_slice())).unwrap();
        assert_eq!(back, d);
    }
}
