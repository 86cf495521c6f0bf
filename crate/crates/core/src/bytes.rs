//! Little-endian byte sinks and sources used by every serializable structure.

use crate::error::{Error, Result};

#[derive(Debug, Default, Clone)]
pub struct ByteWriter {
    buf: Vec<u8>,
}

impl ByteWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.buf
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.buf
    }

    pub fn put_u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn put_u16(&mut self, v: u16) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn put_u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn put_u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn put_bytes(&mut self, b: &[u8]) {
        self.buf.extend_from_slice(b);
    }

    pub fn put_words(&mut self, words: &[u64]) {
        self.put_u64(words.len() as u64);
        for &w in words {
            self.put_u64(w);
        }
    }

    pub fn put_u32s(&mut self, vals: &[u32]) {
        self.put_u64(vals.len() as u64);
        for &v in vals {
            self.put_u32(v);
        }
    }
}

/// Cursor over a borrowed byte slice. Every read fails with
/// [`Error::Truncated`] instead of panicking on short input.
#[derive(Debug, Clone)]
pub struct ByteReader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8]> {
        if self.remaining() < n {
            return Err(Error::Truncated(what));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub fn u8(&mut self, what: &'static str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    pub fn u16(&mut self, what: &'static str) -> Result<u16> {
        let b = self.take(2, what)?;
        Ok(u16::from_le_bytes([b[0], b[1]]))
    }

    pub fn u32(&mut self, what: &'static str) -> Result<u32> {
        let b = self.take(4, what)?;
        Ok(u32::from_le_bytes(b.try_into().unwrap()))
    }

    pub fn u64(&mut self, what: &'static str) -> Result<u64> {
        let b = self.take(8, what)?;
        Ok(u64::from_le_bytes(b.try_into().unwrap()))
    }

    /// Reads a length prefix and checks it against the bytes left, assuming
    /// each element needs at least `min_elem_bytes`.
    pub fn len_prefix(&mut self, min_elem_bytes: usize, what: &'static str) -> Result<usize> {
        let n = self.u64(what)?;
        let need = (n as u128) * (min_elem_bytes as u128);
        if need > self.remaining() as u128 {
            return Err(Error::Truncated(what));
        }
        Ok(n as usize)
    }

    pub fn words(&mut self, what: &'static str) -> Result<Vec<u64>> {
        let n = self.len_prefix(8, what)?;
        (0..n).map(|_| self.u64(what)).collect()
    }

    pub fn u32s(&mut self, what: &'static str) -> Result<Vec<u32>> {
        let n = self.len_prefix(4, what)?;
        (0..n).map(|_| self.u32(what)).collect()
    }
}
