//! Permutations over `[1..n]` with a sampled inverse.
//!
//! Forward values are stored in a packed array. Along every cycle longer
//! than the sample rate `t`, every `t`-th element carries a back pointer to
//! the element `t` steps earlier, so `preimage` walks at most about `2t`
//! steps while storing roughly `n/t` extra cells.

use super::bitvec::{BitVector, BitVectorBuilder};
use super::ints::{bit_width, PackedInts};
use crate::bytes::{ByteReader, ByteWriter};
use crate::error::{Error, Result};

pub const DEFAULT_SAMPLE_RATE: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    /// `forward[i-1] = image(i)`
    forward: PackedInts,
    marked: BitVector,
    back: PackedInts,
    sample_rate: usize,
}

impl Default for Permutation {
    fn default() -> Self {
        Self::new(&[], DEFAULT_SAMPLE_RATE).unwrap()
    }
}

impl Permutation {
    /// Builds from 1-based values: `values[i-1] = image(i)`.
    pub fn new(values: &[u64], sample_rate: usize) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidParam("sample rate must be at least 1".into()));
        }
        let n = values.len();
        let mut seen = vec![false; n];
        for &v in values {
            if v == 0 || v as usize > n || std::mem::replace(&mut seen[v as usize - 1], true) {
                return Err(Error::InvalidParam(format!("not a permutation of 1..={n}")));
            }
        }
        let forward = PackedInts::from_slice(values);

        let mut marked = BitVectorBuilder::with_len(n);
        let mut back_of = vec![0u64; n];
        let mut visited = vec![false; n];
        let mut cycle = Vec::new();
        for start in 0..n {
            if visited[start] {
                continue;
            }
            cycle.clear();
            let mut x = start;
            while !visited[x] {
                visited[x] = true;
                cycle.push(x);
                x = values[x] as usize - 1;
            }
            let len = cycle.len();
            if len <= sample_rate {
                continue;
            }
            for j in (0..len).step_by(sample_rate) {
                let here = cycle[j];
                let earlier = cycle[(j + len - sample_rate) % len];
                marked.set(here, true);
                back_of[here] = earlier as u64 + 1;
            }
        }
        let marked = marked.build();
        let samples: Vec<u64> = (0..n).filter(|&i| marked.get(i)).map(|i| back_of[i]).collect();
        let mut back = PackedInts::with_width(bit_width(n as u64), samples.len());
        for (i, &s) in samples.iter().enumerate() {
            back.set(i, s);
        }
        Ok(Self {
            forward,
            marked,
            back,
            sample_rate,
        })
    }

    pub fn identity(n: usize) -> Self {
        let v: Vec<u64> = (1..=n as u64).collect();
        Self::new(&v, DEFAULT_SAMPLE_RATE).unwrap()
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn sample_rate(&self) -> usize {
        self.sample_rate
    }

    /// `image(i)` for `1 <= i <= n`.
    pub fn image(&self, i: usize) -> Result<usize> {
        if i == 0 || i > self.len() {
            return Err(Error::OutOfBounds { pos: i, len: self.len() });
        }
        Ok(self.forward.get(i - 1) as usize)
    }

    /// The unique `i` with `image(i) = j`.
    pub fn preimage(&self, j: usize) -> Result<usize> {
        if j == 0 || j > self.len() {
            return Err(Error::OutOfBounds { pos: j, len: self.len() });
        }
        let mut x = j;
        let mut jumped = false;
        loop {
            let next = self.forward.get(x - 1) as usize;
            if next == j {
                return Ok(x);
            }
            if !jumped && self.marked.get(x - 1) {
                jumped = true;
                x = self.back.get(self.marked.rank1(x - 1)) as usize;
            } else {
                x = next;
            }
        }
    }

    pub fn size_in_bytes(&self) -> usize {
        8 + self.forward.size_in_bytes() + self.marked.size_in_bytes() + self.back.size_in_bytes()
    }

    pub fn write_to(&self, w: &mut ByteWriter) {
        w.put_u64(self.sample_rate as u64);
        self.forward.write_to(w);
        self.marked.write_to(w);
        self.back.write_to(w);
    }

    pub fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        let sample_rate = r.u64("permutation sample rate")? as usize;
        let forward = PackedInts::read_from(r)?;
        let marked = BitVector::read_from(r)?;
        let back = PackedInts::read_from(r)?;
        if sample_rate == 0 || marked.len() != forward.len() || back.len() != marked.count_ones() {
            return Err(Error::Corrupt("permutation layout".into()));
        }
        let n = forward.len() as u64;
        if forward.iter().any(|v| v == 0 || v > n) || back.iter().any(|v| v == 0 || v > n) {
            return Err(Error::Corrupt("permutation values".into()));
        }
        Ok(Self {
            forward,
            marked,
            back,
            sample_rate,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_small() {
        let id = Permutation::identity(5);
        assert_eq!(id.image(3), Ok(3));
        assert_eq!(id.preimage(4), Ok(4));
        let p = Permutation::new(&[3, 1, 2], 5).unwrap();
        assert_eq!(p.image(1), Ok(3));
        // linear scan oracle
        let inv = [3u64, 1, 2].iter().position(|&v| v == 1).unwrap() + 1;
        assert_eq!(p.preimage(1), Ok(inv));
        assert_eq!(inv, 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Permutation::new(&[1, 1], 5).is_err());
        assert!(Permutation::new(&[0, 1], 5).is_err());
        assert!(Permutation::new(&[1, 3], 5).is_err());
        assert!(Permutation::new(&[1], 0).is_err());
        let p = Permutation::identity(3);
        assert!(p.image(0).is_err());
        assert!(p.image(4).is_err());
        assert!(p.preimage(4).is_err());
    }

    #[test]
    fn one_long_cycle_every_rate() {
        // i -> i+1 mod n: a single cycle exercising the wrap-around segment
        for n in [1usize, 2, 7, 31, 64, 100] {
            let vals: Vec<u64> = (0..n).map(|i| ((i + 1) % n) as u64 + 1).collect();
            for t in [1usize, 2, 3, 5, 32] {
                let p = Permutation::new(&vals, t).unwrap();
                for i in 1..=n {
                    assert_eq!(p.preimage(p.image(i).unwrap()), Ok(i), "n={n} t={t} i={i}");
                }
            }
        }
    }
}
