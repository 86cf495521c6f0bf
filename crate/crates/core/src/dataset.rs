//! Regularized trajectories: one cell per instant while an object emits.

use crate::error::{Error, Result};
use crate::geom::{dist2, Point};

/// A run of consecutive instants starting at `start`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub start: u64,
    pub cells: Vec<Point>,
}

impl Segment {
    /// One past the last instant.
    pub fn end(&self) -> u64 {
        self.start + self.cells.len() as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub id: u32,
    /// Sorted, non-empty, separated by at least one missing instant.
    pub segments: Vec<Segment>,
}

impl Trajectory {
    pub fn new(id: u32, segments: Vec<Segment>) -> Self {
        Self { id, segments }
    }

    /// Builds from a dense timeline starting at instant 0.
    pub fn from_timeline(id: u32, timeline: &[Option<Point>]) -> Self {
        let mut segments: Vec<Segment> = Vec::new();
        for (t, p) in timeline.iter().enumerate() {
            let Some(p) = *p else { continue };
            match segments.last_mut() {
                Some(s) if s.end() == t as u64 => s.cells.push(p),
                _ => segments.push(Segment {
                    start: t as u64,
                    cells: vec![p],
                }),
            }
        }
        Self { id, segments }
    }

    pub fn position(&self, t: u64) -> Option<Point> {
        let i = self.segments.partition_point(|s| s.end() <= t);
        let s = self.segments.get(i)?;
        (s.start <= t).then(|| s.cells[(t - s.start) as usize])
    }

    /// All `(instant, cell)` pairs in time order.
    pub fn samples(&self) -> impl Iterator<Item = (u64, Point)> + '_ {
        self.segments
            .iter()
            .flat_map(|s| s.cells.iter().enumerate().map(move |(i, &p)| (s.start + i as u64, p)))
    }

    pub fn sample_count(&self) -> usize {
        self.segments.iter().map(|s| s.cells.len()).sum()
    }

    /// One past the last instant with a position, or 0.
    pub fn end(&self) -> u64 {
        self.segments.last().map_or(0, Segment::end)
    }
}

/// Trajectories on a `side × side` grid over instants `0..instants`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub side: u64,
    pub instants: u64,
    /// Sorted by id.
    pub trajectories: Vec<Trajectory>,
}

impl Dataset {
    /// Sorts by id, validates, and sets the extent to cover every sample.
    pub fn new(side: u64, trajectories: Vec<Trajectory>) -> Result<Self> {
        let instants = trajectories.iter().map(Trajectory::end).max().unwrap_or(0);
        Self::with_extent(side, instants, trajectories)
    }

    pub fn with_extent(side: u64, instants: u64, mut trajectories: Vec<Trajectory>) -> Result<Self> {
        if side == 0 {
            return Err(Error::InvalidParam("grid side must be positive".into()));
        }
        trajectories.sort_by_key(|t| t.id);
        if let Some(w) = trajectories.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::DuplicateObject(w[0].id));
        }
        for tr in &trajectories {
            let mut prev_end: Option<u64> = None;
            for s in &tr.segments {
                if s.cells.is_empty() {
                    return Err(Error::InvalidData(format!("object {}: empty segment", tr.id)));
                }
                if prev_end.is_some_and(|e| s.start <= e) {
                    return Err(Error::InvalidData(format!(
                        "object {}: segments at instant {} overlap or touch",
                        tr.id, s.start
                    )));
                }
                if s.end() > instants {
                    return Err(Error::InvalidData(format!(
                        "object {}: samples past the extent of {instants} instants",
                        tr.id
                    )));
                }
                for p in &s.cells {
                    if p.x < 0 || p.y < 0 || p.x as u64 >= side || p.y as u64 >= side {
                        return Err(Error::OffGrid { x: p.x, y: p.y, side });
                    }
                }
                prev_end = Some(s.end());
            }
        }
        Ok(Self {
            side,
            instants,
            trajectories,
        })
    }

    pub fn object(&self, id: u32) -> Option<&Trajectory> {
        self.trajectories
            .binary_search_by_key(&id, |t| t.id)
            .ok()
            .map(|i| &self.trajectories[i])
    }

    pub fn sample_count(&self) -> usize {
        self.trajectories.iter().map(Trajectory::sample_count).sum()
    }

    /// Smallest integer speed, at least 1, that covers every pair of
    /// consecutive samples of an object, gaps included, in cells per instant
    /// of Euclidean distance.
    pub fn max_speed(&self) -> u64 {
        let mut speed = 1u64;
        for tr in &self.trajectories {
            let mut prev: Option<(u64, Point)> = None;
            for (t, p) in tr.samples() {
                if let Some((pt, pp)) = prev {
                    speed = speed.max(ceil_speed(dist2(pp, p), t - pt));
                }
                prev = Some((t, p));
            }
        }
        speed
    }
}

/// Smallest `m` with `m · dt >= sqrt(d2)`.
fn ceil_speed(d2: u64, dt: u64) -> u64 {
    let root = d2.isqrt();
    let mut m = root.div_ceil(dt);
    while (m as u128 * dt as u128).pow(2) < d2 as u128 {
        m += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timeline_round_trip() {
        let p = |x, y| Some(Point::new(x, y));
        let tl = [None, p(1, 1), p(1, 2), None, None, p(3, 3)];
        let tr = Trajectory::from_timeline(7, &tl);
        assert_eq!(tr.segments.len(), 2);
        for (t, want) in tl.iter().enumerate() {
            assert_eq!(tr.position(t as u64), *want);
        }
        assert_eq!(tr.position(99), None);
        assert_eq!(tr.end(), 6);
    }

    #[test]
    fn validation() {
        let seg = |start, cells: Vec<Point>| Segment { start, cells };
        let a = Trajectory::new(1, vec![seg(0, vec![Point::new(0, 0)]), seg(1, vec![Point::new(0, 0)])]);
        assert!(Dataset::new(4, vec![a]).is_err());
        let b = Trajectory::new(1, vec![seg(0, vec![Point::new(4, 0)])]);
        assert!(Dataset::new(4, vec![b]).is_err());
        let c = Trajectory::new(2, vec![seg(0, vec![Point::new(1, 0)])]);
        assert!(Dataset::new(4, vec![c.clone(), c]).is_err());
    }

    #[test]
    fn speed_covers_gaps() {
        assert_eq!(ceil_speed(0, 3), 0);
        assert_eq!(ceil_speed(2, 1), 2);
        assert_eq!(ceil_speed(9, 4), 1);
        assert_eq!(ceil_speed(130, 8), 2);
        let tr = Trajectory::new(
            1,
            vec![
                Segment { start: 0, cells: vec![Point::new(0, 0)] },
                Segment { start: 3, cells: vec![Point::new(9, 0)] },
            ],
        );
        assert_eq!(Dataset::new(16, vec![tr]).unwrap().max_speed(), 3);
    }
}
