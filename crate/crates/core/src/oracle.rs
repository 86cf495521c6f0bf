//! Brute-force reference answers by linear scan over dense timelines.
//!
//! Defines query semantics; the index must agree with it exactly.

use crate::dataset::Dataset;
use crate::engine::Neighbor;
use crate::geom::{dist2, Point, Region};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OracleStore {
    instants: u64,
    /// `(id, first instant, positions from there on)`, sorted by id.
    timelines: Vec<(u32, u64, Vec<Option<Point>>)>,
}

impl OracleStore {
    pub fn build(data: &Dataset) -> Self {
        let mut timelines: Vec<_> = data
            .trajectories
            .iter()
            .map(|tr| {
                let first = tr.segments.first().map_or(0, |s| s.start);
                let mut line = vec![None; (tr.end() - first) as usize];
                for (t, p) in tr.samples() {
                    line[(t - first) as usize] = Some(p);
                }
                (tr.id, first, line)
            })
            .collect();
        timelines.sort_unstable_by_key(|e| e.0);
        Self {
            instants: data.instants,
            timelines,
        }
    }

    pub fn instants(&self) -> u64 {
        self.instants
    }

    pub fn object_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.timelines.iter().map(|e| e.0)
    }

    pub fn contains_object(&self, id: u32) -> bool {
        self.timelines.binary_search_by_key(&id, |e| e.0).is_ok()
    }

    fn at(line: &(u32, u64, Vec<Option<Point>>), t: u64) -> Option<Point> {
        let i = t.checked_sub(line.1)?;
        line.2.get(i as usize).copied().flatten()
    }

    /// Cell of `id` at `t`; `None` for unknown ids too.
    pub fn position(&self, id: u32, t: u64) -> Option<Point> {
        let i = self.timelines.binary_search_by_key(&id, |e| e.0).ok()?;
        Self::at(&self.timelines[i], t)
    }

    pub fn trajectory(&self, id: u32, t_b: u64, t_e: u64) -> Vec<(u64, Point)> {
        (t_b..=t_e.min(self.instants.saturating_sub(1)))
            .filter_map(|t| self.position(id, t).map(|p| (t, p)))
            .collect()
    }

    pub fn time_slice(&self, r: &Region, t: u64) -> Vec<(u32, Point)> {
        self.timelines
            .iter()
            .filter_map(|line| Self::at(line, t).filter(|p| r.contains(*p)).map(|p| (line.0, p)))
            .collect()
    }

    pub fn time_interval(&self, r: &Region, t_b: u64, t_e: u64) -> Vec<u32> {
        self.timelines
            .iter()
            .filter(|line| (t_b..=t_e.min(self.instants.saturating_sub(1))).any(|t| Self::at(line, t).is_some_and(|p| r.contains(p))))
            .map(|line| line.0)
            .collect()
    }

    pub fn knn(&self, k: usize, q: Point, t: u64) -> Vec<Neighbor> {
        let mut all: Vec<Neighbor> = self
            .timelines
            .iter()
            .filter_map(|line| Self::at(line, t).map(|p| Neighbor { id: line.0, dist2: dist2(q, p) }))
            .collect();
        all.sort_unstable_by_key(|n| (n.dist2, n.id));
        all.truncate(k);
        all
    }
}
