//! Raw GPS records to regular per-instant cell trajectories.
//!
//! Records are parsed from CSV (`id,time,x,y`) or from a packed binary form:
//! four bytes giving the width of each column, then fixed-width unsigned
//! little-endian rows. [`normalize`] sorts each object's records, drops those
//! implying an impossible speed, snaps times to the instant grid,
//! interpolates short gaps and splits at long ones, and floors coordinates to
//! cells.

use std::collections::BTreeMap;
use std::io::Read;

use crate::dataset::{Dataset, Segment, Trajectory};
use crate::error::{Error, Result};
use crate::geom::Point;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawRecord {
    pub id: u32,
    /// Seconds.
    pub time: f64,
    pub x: f64,
    pub y: f64,
}

impl RawRecord {
    pub fn new(id: u32, time: f64, x: f64, y: f64) -> Self {
        Self { id, time, x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv { header: bool },
    Binary,
}

pub fn parse(source: impl Read, format: Format) -> Result<Vec<RawRecord>> {
    match format {
        Format::Csv { header } => parse_csv(source, header),
        Format::Binary => {
            let mut bytes = Vec::new();
            let mut source = source;
            source.read_to_end(&mut bytes)?;
            parse_binary(&bytes)
        }
    }
}

pub fn parse_csv(source: impl Read, header: bool) -> Result<Vec<RawRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(source);
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| Error::Parse {
            location: e.position().map_or("input".into(), |p| format!("line {}", p.line())),
            message: e.to_string(),
        })?;
        let line = row.position().map_or(0, |p| p.line());
        let bad = |message: String| Error::Parse {
            location: format!("line {line}"),
            message,
        };
        if row.len() != 4 {
            return Err(bad(format!("expected 4 fields, found {}", row.len())));
        }
        let num = |i: usize, name: &str| -> Result<f64> {
            let v: f64 = row[i].parse().map_err(|_| bad(format!("{name} {:?} is not a number", &row[i])))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad(format!("{name} is not finite")))
            }
        };
        let id = row[0].parse::<u32>().map_err(|_| bad(format!("object id {:?} is not an unsigned integer", &row[0])))?;
        out.push(RawRecord::new(id, num(1, "time")?, num(2, "x")?, num(3, "y")?));
    }
    Ok(out)
}

/// Decodes the packed binary form. Every field is an unsigned integer.
pub fn parse_binary(bytes: &[u8]) -> Result<Vec<RawRecord>> {
    let Some((widths, body)) = bytes.split_first_chunk::<4>() else {
        return Err(Error::Parse {
            location: "offset 0".into(),
            message: "missing the four column widths".into(),
        });
    };
    if let Some(w) = widths.iter().find(|&&w| w == 0 || w > 8) {
        return Err(Error::Parse {
            location: "offset 0".into(),
            message: format!("column width {w} outside 1..=8"),
        });
    }
    if widths[0] > 4 {
        return Err(Error::Parse {
            location: "offset 0".into(),
            message: "object ids wider than 4 bytes".into(),
        });
    }
    let row: usize = widths.iter().map(|&w| w as usize).sum();
    if body.len() % row != 0 {
        let offset = 4 + body.len() / row * row;
        return Err(Error::Parse {
            location: format!("offset {offset}"),
            message: format!("truncated row: {} of {row} bytes", body.len() % row),
        });
    }
    let out = body
        .chunks_exact(row)
        .map(|chunk| {
            let mut fields = [0u64; 4];
            let mut at = 0;
            for (f, &w) in fields.iter_mut().zip(widths) {
                let mut buf = [0u8; 8];
                buf[..w as usize].copy_from_slice(&chunk[at..at + w as usize]);
                *f = u64::from_le_bytes(buf);
                at += w as usize;
            }
            RawRecord::new(fields[0] as u32, fields[1] as f64, fields[2] as f64, fields[3] as f64)
        })
        .collect();
    Ok(out)
}

/// Encodes records in the packed binary form using the narrowest widths that
/// fit. Fields must be non-negative integers.
pub fn to_binary(records: &[RawRecord]) -> Result<Vec<u8>> {
    let fields = |r: &RawRecord| [r.id as f64, r.time, r.x, r.y];
    let mut max = [0u64; 4];
    for r in records {
        for (m, v) in max.iter_mut().zip(fields(r)) {
            if v < 0.0 || v.fract() != 0.0 || v >= u64::MAX as f64 {
                return Err(Error::InvalidData(format!("{v} is not an unsigned integer")));
            }
            *m = (*m).max(v as u64);
        }
    }
    let widths = max.map(|m| ((64 - m.leading_zeros()).div_ceil(8)).max(1) as u8);
    let mut out = widths.to_vec();
    for r in records {
        for (v, &w) in fields(r).iter().zip(&widths) {
            out.extend_from_slice(&(*v as u64).to_le_bytes()[..w as usize]);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizeOptions {
    /// Coordinate units per cell side.
    pub cell_size: f64,
    /// Seconds per instant.
    pub time_step: f64,
    /// Coordinate units per second; records implying more are dropped.
    pub speed_cap: Option<f64>,
    /// Samples this many instants apart or more are not interpolated.
    pub gap_threshold: u64,
    /// Time of instant 0; defaults to the earliest record.
    pub time_origin: Option<f64>,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        Self {
            cell_size: 1.0,
            time_step: 1.0,
            speed_cap: None,
            gap_threshold: 15,
            time_origin: None,
        }
    }
}

impl NormalizeOptions {
    fn check(&self) -> Result<()> {
        if !(self.cell_size > 0.0 && self.cell_size.is_finite()) {
            return Err(Error::InvalidParam("cell size must be positive".into()));
        }
        if !(self.time_step > 0.0 && self.time_step.is_finite()) {
            return Err(Error::InvalidParam("time step must be positive".into()));
        }
        if self.speed_cap.is_some_and(|s| !(s > 0.0)) {
            return Err(Error::InvalidParam("speed cap must be positive".into()));
        }
        if self.gap_threshold < 2 {
            return Err(Error::InvalidParam("gap threshold must be at least 2".into()));
        }
        Ok(())
    }
}

/// One trajectory per object id, in id order. Objects whose records all
/// fall away yield no trajectory.
pub fn normalize(records: &[RawRecord], opts: &NormalizeOptions) -> Result<Vec<Trajectory>> {
    opts.check()?;
    let origin = match opts.time_origin {
        Some(t) => t,
        None => records.iter().map(|r| r.time).fold(f64::INFINITY, f64::min),
    };
    let mut by_object: BTreeMap<u32, Vec<RawRecord>> = BTreeMap::new();
    for r in records {
        if r.time < origin {
            return Err(Error::InvalidData(format!("object {}: time {} before the origin {origin}", r.id, r.time)));
        }
        by_object.entry(r.id).or_default().push(*r);
    }
    let mut out = Vec::with_capacity(by_object.len());
    for (id, mut recs) in by_object {
        recs.sort_by(|a, b| a.time.total_cmp(&b.time));
        let kept = filter_speed(&recs, opts.speed_cap);
        let samples: Vec<(f64, f64, f64)> =
            kept.iter().map(|r| ((r.time - origin) / opts.time_step, r.x / opts.cell_size, r.y / opts.cell_size)).collect();
        let segments = regularize(&samples, opts.gap_threshold as f64)?;
        if !segments.is_empty() {
            out.push(Trajectory::new(id, segments));
        }
    }
    Ok(out)
}

/// Keeps the first record, then every record reachable from the last kept
/// one within the cap. Records repeating the last kept time are dropped.
fn filter_speed(recs: &[RawRecord], cap: Option<f64>) -> Vec<RawRecord> {
    let mut kept: Vec<RawRecord> = Vec::with_capacity(recs.len());
    for r in recs {
        if let Some(last) = kept.last() {
            let dt = r.time - last.time;
            if dt <= 0.0 {
                continue;
            }
            if let Some(cap) = cap {
                let dist = (r.x - last.x).hypot(r.y - last.y);
                if dist > cap * dt {
                    continue;
                }
            }
        }
        kept.push(*r);
    }
    kept
}

/// Samples in fractional instants and cell units, sorted by time, to segments.
fn regularize(samples: &[(f64, f64, f64)], gap: f64) -> Result<Vec<Segment>> {
    let mut segments: Vec<Segment> = Vec::new();
    let mut group_start = 0;
    for i in 0..samples.len() {
        let ends_group = i + 1 == samples.len() || samples[i + 1].0 - samples[i].0 >= gap;
        if !ends_group {
            continue;
        }
        let group = &samples[group_start..=i];
        group_start = i + 1;
        let first = group[0].0.round() as u64;
        let last = group[group.len() - 1].0.round() as u64;
        // a rounded start may touch the previous segment's end
        let first = match segments.last() {
            Some(s) => first.max(s.end() + 1),
            None => first,
        };
        if first > last {
            continue;
        }
        let mut cells = Vec::with_capacity((last - first + 1) as usize);
        let mut j = 0;
        for t in first..=last {
            let tf = t as f64;
            while j + 1 < group.len() && group[j + 1].0 <= tf {
                j += 1;
            }
            let (x, y) = if j + 1 < group.len() && group[j].0 < tf {
                let (a, b) = (group[j], group[j + 1]);
                let f = (tf - a.0) / (b.0 - a.0);
                (a.1 + (b.1 - a.1) * f, a.2 + (b.2 - a.2) * f)
            } else if tf < group[0].0 {
                (group[0].1, group[0].2)
            } else {
                (group[j].1, group[j].2)
            };
            cells.push(Point::new(floor_cell(x)?, floor_cell(y)?));
        }
        segments.push(Segment { start: first, cells });
    }
    Ok(segments)
}

fn floor_cell(v: f64) -> Result<i64> {
    let c = v.floor();
    if c < 0.0 || c > (1u64 << 40) as f64 {
        return Err(Error::InvalidData(format!("coordinate maps to cell {c}, outside 0..2^40")));
    }
    Ok(c as i64)
}

/// Wraps normalized trajectories in a dataset whose grid side is the
/// smallest power of two covering every cell.
pub fn into_dataset(trajectories: Vec<Trajectory>) -> Result<Dataset> {
    let max = trajectories
        .iter()
        .flat_map(|t| t.samples())
        .map(|(_, p)| p.x.max(p.y))
        .max()
        .unwrap_or(0);
    let side = (max as u64 + 1).next_power_of_two();
    Dataset::new(side, trajectories)
}

/// Parses, normalizes and wraps in one step.
pub fn load_dataset(source: impl Read, format: Format, opts: &NormalizeOptions) -> Result<Dataset> {
    into_dataset(normalize(&parse(source, format)?, opts)?)
}
