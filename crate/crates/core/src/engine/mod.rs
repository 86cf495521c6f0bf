//! The assembled index: snapshots every `period` instants, one compressed
//! log per object and portion, and the shared rule dictionary.

mod container;
mod query;

pub use container::{FORMAT_VERSION, MAGIC};
pub use query::{Neighbor, QueryOptions, QueryStats, SnapshotChoice};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::geom::{Point, Region};
use crate::grammar::RuleDictionary;
use crate::log::{encode_portion, LogStore, RawLog, Token};
use crate::snapshot::Snapshot;
use crate::spiral::DEFAULT_RADIUS_BOUND;

/// Build-time choices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    /// Instants between snapshots.
    pub period: u64,
    /// k²-tree arity.
    pub k: u32,
    /// Largest `max(|dx|, |dy|)` a single movement or reappearance may span.
    pub radius_bound: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            period: 120,
            k: 2,
            radius_bound: DEFAULT_RADIUS_BOUND,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexParams {
    pub period: u64,
    pub k: u32,
    /// Grid extent; cells are `0..side` on both axes.
    pub side: u64,
    /// Cells per instant, Euclidean, covering every observed step and gap.
    pub max_speed: u64,
    /// Instants `0..instants` are indexed.
    pub instants: u64,
    pub objects: usize,
    pub radius_bound: u64,
}

impl IndexParams {
    /// Number of log portions; snapshots number one more.
    pub fn portions(&self) -> usize {
        if self.instants <= 1 {
            0
        } else {
            (self.instants - 1).div_ceil(self.period) as usize
        }
    }

    pub fn snapshot_count(&self) -> usize {
        if self.instants == 0 {
            0
        } else {
            self.portions() + 1
        }
    }

    /// Grows `r` by the distance coverable in `elapsed` instants, clipped to the grid.
    pub fn expanded_region(&self, r: &Region, elapsed: u64) -> Option<Region> {
        let delta = self.max_speed.saturating_mul(elapsed).min(i64::MAX as u64 / 4) as i64;
        r.grow(delta).clip(self.side)
    }
}

/// Element of a compressed trajectory slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompressedElement {
    /// Absolute position taken from a snapshot.
    Snapshot { t: u64, pos: Point },
    Token(Token),
}

/// Per-component byte counts, matching the serialized layout.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IndexStats {
    pub snapshots: usize,
    pub rules: usize,
    pub grammar_depth: usize,
    /// Movement instants in the input, one raw byte each in the baseline.
    pub movements: u64,
    /// Symbols left in the compressed logs, events included.
    pub log_symbols: usize,
    pub snapshot_bytes: usize,
    /// Of which k²-tree bitmaps.
    pub tree_bytes: usize,
    pub log_stream_bytes: usize,
    pub log_offset_bytes: usize,
    pub side_array_bytes: usize,
    pub dictionary_bytes: usize,
    /// Everything else in the file: header, parameters, framing.
    pub overhead_bytes: usize,
    pub total_bytes: usize,
}

impl IndexStats {
    /// Log streams plus dictionary.
    pub fn grammar_bytes(&self) -> usize {
        self.log_stream_bytes + self.dictionary_bytes
    }

    /// Total size over the one-byte-per-movement baseline.
    pub fn ratio(&self) -> f64 {
        if self.movements == 0 {
            0.0
        } else {
            self.total_bytes as f64 / self.movements as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrajectoryIndex {
    params: IndexParams,
    /// External object ids, sorted; internal indices point into it.
    ids: Vec<u32>,
    snapshots: Vec<Snapshot>,
    logs: LogStore,
    dict: RuleDictionary,
}

impl TrajectoryIndex {
    pub fn build(data: &Dataset, opts: BuildOptions) -> Result<Self> {
        if opts.period == 0 {
            return Err(Error::InvalidParam("snapshot period must be at least 1".into()));
        }
        let ids: Vec<u32> = data.trajectories.iter().map(|t| t.id).collect();
        if ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidData("trajectories must be sorted by unique id".into()));
        }
        let n = ids.len();
        let params = IndexParams {
            period: opts.period,
            k: opts.k,
            side: data.side,
            max_speed: data.max_speed(),
            instants: data.instants,
            objects: n,
            radius_bound: opts.radius_bound,
        };
        let (portions, snaps) = (params.portions(), params.snapshot_count());
        let d = opts.period;

        let mut raw = Vec::with_capacity(portions * n);
        for h in 0..portions as u64 {
            for tr in &data.trajectories {
                raw.push(encode_portion(tr, h * d, (h + 1) * d, opts.radius_bound)?);
            }
        }
        let list = |h: usize, pick: fn(&RawLog) -> bool| -> Vec<u32> {
            (0..n as u32).filter(|&o| pick(&raw[h * n + o as usize])).collect()
        };
        let mut snapshots = Vec::with_capacity(snaps);
        for h in 0..snaps {
            let t = h as u64 * d;
            let positions: Vec<(u32, Point)> = data
                .trajectories
                .iter()
                .enumerate()
                .filter_map(|(o, tr)| tr.position(t).map(|p| (o as u32, p)))
                .collect();
            let app = if h < portions { list(h, RawLog::starts_with_appearance) } else { Vec::new() };
            let dis = if h > 0 { list(h - 1, RawLog::ends_with_vanish) } else { Vec::new() };
            snapshots.push(Snapshot::build(t, &positions, n, data.side, opts.k, app, dis)?);
        }
        let (logs, dict) = LogStore::build(&raw, n, portions)?;
        Ok(Self {
            params,
            ids,
            snapshots,
            logs,
            dict,
        })
    }

    pub fn params(&self) -> &IndexParams {
        &self.params
    }

    /// External ids of all indexed objects, ascending.
    pub fn object_ids(&self) -> &[u32] {
        &self.ids
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn snapshot(&self, h: usize) -> Option<&Snapshot> {
        self.snapshots.get(h)
    }

    pub fn logs(&self) -> &LogStore {
        &self.logs
    }

    pub fn dictionary(&self) -> &RuleDictionary {
        &self.dict
    }

    pub(crate) fn index_of(&self, id: u32) -> Result<usize> {
        self.ids.binary_search(&id).map_err(|_| Error::UnknownObject(id))
    }

    pub(crate) fn id_of(&self, o: u32) -> u32 {
        self.ids[o as usize]
    }

    /// Grows `r` by `max_speed · (t_e - t_b)` on every side, clipped to the grid.
    pub fn expanded_region(&self, r: &Region, t_b: u64, t_e: u64) -> Option<Region> {
        self.params.expanded_region(r, t_e.saturating_sub(t_b))
    }

    /// Compressed trajectory of `id` over `[t_b, t_e]`: the relevant log
    /// slices, led by the snapshot position when the object is present at
    /// the first portion's start. Symbols crossing the window ends are kept
    /// whole. Empty when the object has no position in the window.
    pub fn compressed_trajectory(&self, id: u32, t_b: u64, t_e: u64) -> Result<Vec<CompressedElement>> {
        let o = self.index_of(id)?;
        let mut out = Vec::new();
        if self.search_trajectory(id, t_b, t_e)?.is_empty() {
            return Ok(out);
        }
        let portions = self.params.portions();
        if t_b > t_e || t_b >= self.params.instants || portions == 0 {
            if let (Some(s), true) = (self.snapshots.first(), t_b == 0) {
                if let Some(pos) = s.find_object(o as u32) {
                    out.push(CompressedElement::Snapshot { t: 0, pos });
                }
            }
            return Ok(out);
        }
        let d = self.params.period;
        let first = ((t_b / d) as usize).min(portions - 1);
        if let Some(pos) = self.snapshots[first].find_object(o as u32) {
            out.push(CompressedElement::Snapshot { t: first as u64 * d, pos });
        }
        let mut h = first;
        while h < portions && (h as u64 * d) < t_e.max(t_b + 1) {
            out.extend(self.logs.tokens(h, o).map(CompressedElement::Token));
            h += 1;
        }
        Ok(out)
    }

    /// Movement instants across all logs.
    fn movement_count(&self) -> u64 {
        let mut total = 0;
        for h in 0..self.logs.portions() {
            for o in 0..self.logs.objects() {
                for s in self.logs.symbols(h, o) {
                    if !crate::grammar::is_event(s) {
                        total += self.dict.span(s);
                    }
                }
            }
        }
        total
    }

    pub fn stats(&self) -> IndexStats {
        let snapshot_bytes: usize = self.snapshots.iter().map(Snapshot::size_in_bytes).sum();
        let tree_bytes = self.snapshots.iter().map(Snapshot::tree_bytes).sum();
        let total_bytes = self.serialized_len();
        let dictionary_bytes = self.dict.size_in_bytes();
        IndexStats {
            snapshots: self.snapshots.len(),
            rules: self.dict.rule_count(),
            grammar_depth: self.dict.depth(),
            movements: self.movement_count(),
            log_symbols: self.logs.total_symbols(),
            snapshot_bytes,
            tree_bytes,
            log_stream_bytes: self.logs.stream_bytes(),
            log_offset_bytes: self.logs.offset_bytes(),
            side_array_bytes: self.logs.side_array_bytes(),
            dictionary_bytes,
            overhead_bytes: total_bytes
                - snapshot_bytes
                - self.logs.stream_bytes()
                - self.logs.offset_bytes()
                - self.logs.side_array_bytes()
                - dictionary_bytes,
            total_bytes,
        }
    }

    /// Shifts every external id up by one so answers stop matching the
    /// input. Exists to exercise verification failure paths.
    #[doc(hidden)]
    pub fn corrupt_ids_for_testing(&mut self) {
        for id in &mut self.ids {
            *id = id.wrapping_add(1);
        }
    }
}
