//! On-disk layout.
//!
//! ```text
//! magic "GCTI" | version u16 | section*
//! section = length u64 | payload | crc32(payload) u32
//! ```
//!
//! Sections in order: parameters with the id table, snapshots, dictionary,
//! logs. All integers are little-endian.

use std::io::{Read, Write};

use super::{IndexParams, TrajectoryIndex};
use crate::bytes::{ByteReader, ByteWriter};
use crate::error::{Error, Result};
use crate::grammar::RuleDictionary;
use crate::log::LogStore;
use crate::snapshot::Snapshot;

pub const MAGIC: [u8; 4] = *b"GCTI";
pub const FORMAT_VERSION: u16 = 1;

const HEADER_BYTES: usize = 4 + 2;
const FRAME_BYTES: usize = 8 + 4;

fn put_section(out: &mut ByteWriter, body: impl FnOnce(&mut ByteWriter)) {
    let mut w = ByteWriter::new();
    body(&mut w);
    let payload = w.into_inner();
    out.put_u64(payload.len() as u64);
    out.put_bytes(&payload);
    out.put_u32(crc32fast::hash(&payload));
}

fn take_section<'a>(r: &mut ByteReader<'a>, name: &'static str) -> Result<ByteReader<'a>> {
    let len = r.u64(name)?;
    if len > r.remaining() as u64 {
        return Err(Error::Truncated(name));
    }
    let payload = r.take(len as usize, name)?;
    let crc = r.u32(name)?;
    if crc32fast::hash(payload) != crc {
        return Err(Error::Checksum(name));
    }
    Ok(ByteReader::new(payload))
}

fn finish(r: &ByteReader<'_>, name: &str) -> Result<()> {
    if r.remaining() != 0 {
        return Err(Error::Corrupt(format!("{} trailing bytes in {name}", r.remaining())));
    }
    Ok(())
}

impl IndexParams {
    fn write_to(&self, w: &mut ByteWriter) {
        w.put_u64(self.period);
        w.put_u32(self.k);
        w.put_u64(self.side);
        w.put_u64(self.max_speed);
        w.put_u64(self.instants);
        w.put_u64(self.objects as u64);
        w.put_u64(self.radius_bound);
    }

    fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        let p = IndexParams {
            period: r.u64("period")?,
            k: r.u32("arity")?,
            side: r.u64("grid side")?,
            max_speed: r.u64("max speed")?,
            instants: r.u64("instants")?,
            objects: r.u64("object count")? as usize,
            radius_bound: r.u64("radius bound")?,
        };
        if p.period == 0 || p.k < 2 || p.side == 0 || p.max_speed == 0 {
            return Err(Error::Corrupt("parameters".into()));
        }
        Ok(p)
    }
}

impl TrajectoryIndex {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = ByteWriter::new();
        w.put_bytes(&MAGIC);
        w.put_u16(FORMAT_VERSION);
        put_section(&mut w, |w| {
            self.params.write_to(w);
            w.put_u32s(&self.ids);
        });
        put_section(&mut w, |w| {
            w.put_u64(self.snapshots.len() as u64);
            for s in &self.snapshots {
                s.write_to(w);
            }
        });
        put_section(&mut w, |w| self.dict.write_to(w));
        put_section(&mut w, |w| self.logs.write_to(w));
        w.into_inner()
    }

    /// Exact length of [`TrajectoryIndex::to_bytes`] without building it.
    pub(crate) fn serialized_len(&self) -> usize {
        let params = 8 + 4 + 8 * 5 + 8 + 4 * self.ids.len();
        let snaps = 8 + self.snapshots.iter().map(Snapshot::size_in_bytes).sum::<usize>();
        HEADER_BYTES + 4 * FRAME_BYTES + params + snaps + self.dict.size_in_bytes() + self.logs.size_in_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = ByteReader::new(bytes);
        if r.take(4, "magic")? != MAGIC {
            return Err(Error::BadMagic);
        }
        let version = r.u16("version")?;
        if version != FORMAT_VERSION {
            return Err(Error::Version(version));
        }
        let mut s = take_section(&mut r, "parameters")?;
        let params = IndexParams::read_from(&mut s)?;
        let ids = s.u32s("object ids")?;
        finish(&s, "parameters")?;
        if ids.len() != params.objects || ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Corrupt("object id table".into()));
        }

        let mut s = take_section(&mut r, "snapshots")?;
        let count = s.len_prefix(8, "snapshot count")?;
        if count != params.snapshot_count() {
            return Err(Error::Corrupt(format!("{count} snapshots, expected {}", params.snapshot_count())));
        }
        let mut snapshots = Vec::with_capacity(count);
        for h in 0..count {
            let snap = Snapshot::read_from(&mut s)?;
            if snap.time() != h as u64 * params.period || snap.tree().k() != params.k || snap.object_slots() != params.objects {
                return Err(Error::Corrupt(format!("snapshot {h} header")));
            }
            snapshots.push(snap);
        }
        finish(&s, "snapshots")?;

        let mut s = take_section(&mut r, "dictionary")?;
        let dict = RuleDictionary::read_from(&mut s)?;
        finish(&s, "dictionary")?;

        let mut s = take_section(&mut r, "logs")?;
        let logs = LogStore::read_from(&mut s)?;
        finish(&s, "logs")?;
        if logs.objects() != params.objects || logs.portions() != params.portions() {
            return Err(Error::Corrupt("log dimensions".into()));
        }
        logs.validate(&dict)?;
        finish(&r, "file")?;
        Ok(Self {
            params,
            ids,
            snapshots,
            logs,
            dict,
        })
    }

    pub fn save(&self, mut sink: impl Write) -> Result<()> {
        sink.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn load(mut source: impl Read) -> Result<Self> {
        let mut buf = Vec::new();
        source.read_to_end(&mut buf)?;
        Self::from_bytes(&buf)
    }
}
