//! Query descriptors shared by the index, the oracle, the command line and
//! workload files, plus a seeded random query generator.
//!
//! A descriptor prints in the command-line flag syntax, for example
//! `--type knn --px 3 --py 4 --t 9 --k-nn 2`, and the same text parses back.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::engine::{Neighbor, QueryOptions, QueryStats, TrajectoryIndex};
use crate::error::{Error, Result};
use crate::geom::{Point, Region};
use crate::oracle::OracleStore;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QueryKind {
    Object,
    Trajectory,
    TimeSlice,
    TimeInterval,
    Knn,
}

impl QueryKind {
    pub const ALL: [QueryKind; 5] = [
        QueryKind::Object,
        QueryKind::Trajectory,
        QueryKind::TimeSlice,
        QueryKind::TimeInterval,
        QueryKind::Knn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QueryKind::Object => "object",
            QueryKind::Trajectory => "trajectory",
            QueryKind::TimeSlice => "time-slice",
            QueryKind::TimeInterval => "time-interval",
            QueryKind::Knn => "knn",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Query {
    Object { id: u32, t: u64 },
    Trajectory { id: u32, t_begin: u64, t_end: u64 },
    TimeSlice { region: Region, t: u64 },
    TimeInterval { region: Region, t_begin: u64, t_end: u64 },
    Knn { k: usize, point: Point, t: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Answer {
    Position(Option<Point>),
    Path(Vec<(u64, Point)>),
    Located(Vec<(u32, Point)>),
    Ids(Vec<u32>),
    Neighbors(Vec<Neighbor>),
}

impl Answer {
    /// Rows the answer would print.
    pub fn len(&self) -> usize {
        match self {
            Answer::Position(p) => p.is_some() as usize,
            Answer::Path(v) => v.len(),
            Answer::Located(v) => v.len(),
            Answer::Ids(v) => v.len(),
            Answer::Neighbors(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Query {
    pub fn kind(&self) -> QueryKind {
        match self {
            Query::Object { .. } => QueryKind::Object,
            Query::Trajectory { .. } => QueryKind::Trajectory,
            Query::TimeSlice { .. } => QueryKind::TimeSlice,
            Query::TimeInterval { .. } => QueryKind::TimeInterval,
            Query::Knn { .. } => QueryKind::Knn,
        }
    }

    /// Whether every instant the query names lies in `0..instants`.
    pub fn in_extent(&self, instants: u64) -> bool {
        match *self {
            Query::Object { t, .. } | Query::TimeSlice { t, .. } | Query::Knn { t, .. } => t < instants,
            Query::Trajectory { t_begin, t_end, .. } | Query::TimeInterval { t_begin, t_end, .. } => {
                t_begin <= t_end && t_end < instants
            }
        }
    }

    /// Parses the flag syntax. Flags may come in any order.
    pub fn parse(line: &str) -> Result<Self> {
        let words: Vec<&str> = line.split_whitespace().collect();
        let bad = |message: String| Error::Parse {
            location: "query".into(),
            message,
        };
        if words.len() % 2 != 0 {
            return Err(bad("expected flag/value pairs".into()));
        }
        let mut kind = None;
        let mut vals: Vec<(&str, i64)> = Vec::new();
        for pair in words.chunks(2) {
            let flag = pair[0].strip_prefix("--").ok_or_else(|| bad(format!("expected a flag, found {:?}", pair[0])))?;
            if flag == "type" {
                kind = Some(QueryKind::from_name(pair[1]).ok_or_else(|| bad(format!("unknown query type {:?}", pair[1])))?);
                continue;
            }
            if !FLAGS.contains(&flag) {
                return Err(bad(format!("unknown flag --{flag}")));
            }
            let v: i64 = pair[1].parse().map_err(|_| bad(format!("--{flag} needs an integer, found {:?}", pair[1])))?;
            vals.push((flag, v));
        }
        let kind = kind.ok_or_else(|| bad("missing --type".into()))?;
        let get = |name: &str| -> Result<i64> {
            vals.iter().rev().find(|(f, _)| *f == name).map(|&(_, v)| v).ok_or_else(|| bad(format!("{kind} needs --{name}")))
        };
        let unsigned = |name: &str| -> Result<u64> {
            u64::try_from(get(name)?).map_err(|_| bad(format!("--{name} must not be negative")))
        };
        let id = || -> Result<u32> { u32::try_from(get("id")?).map_err(|_| bad("--id out of range".into())) };
        let region = || -> Result<Region> { Ok(Region::new(get("x1")?, get("y1")?, get("x2")?, get("y2")?)) };
        Ok(match kind {
            QueryKind::Object => Query::Object { id: id()?, t: unsigned("t")? },
            QueryKind::Trajectory => Query::Trajectory {
                id: id()?,
                t_begin: unsigned("t-begin")?,
                t_end: unsigned("t-end")?,
            },
            QueryKind::TimeSlice => Query::TimeSlice { region: region()?, t: unsigned("t")? },
            QueryKind::TimeInterval => Query::TimeInterval {
                region: region()?,
                t_begin: unsigned("t-begin")?,
                t_end: unsigned("t-end")?,
            },
            QueryKind::Knn => Query::Knn {
                k: unsigned("k-nn")? as usize,
                point: Point::new(get("px")?, get("py")?),
                t: unsigned("t")?,
            },
        })
    }

    /// A random query of `kind` over `data`'s extent.
    pub fn random(kind: QueryKind, data: &Dataset, rng: &mut impl Rng) -> Self {
        let side = data.side.max(1) as i64;
        let t_max = data.instants.max(1);
        let id = if data.trajectories.is_empty() {
            0
        } else {
            data.trajectories[rng.gen_range(0..data.trajectories.len())].id
        };
        let t = rng.gen_range(0..t_max);
        let t_begin = t;
        let mut region = || {
            let w = rng.gen_range(1..=side / 4 + 1);
            let h = rng.gen_range(1..=side / 4 + 1);
            let x = rng.gen_range(0..side);
            let y = rng.gen_range(0..side);
            Region::new(x, y, (x + w - 1).min(side - 1), (y + h - 1).min(side - 1))
        };
        match kind {
            QueryKind::Object => Query::Object { id, t },
            QueryKind::Trajectory => {
                let t_end = (t_begin + rng.gen_range(0..=t_max / 4)).min(t_max - 1);
                Query::Trajectory { id, t_begin, t_end }
            }
            QueryKind::TimeSlice => Query::TimeSlice { region: region(), t },
            QueryKind::TimeInterval => {
                let region = region();
                let t_end = (t_begin + rng.gen_range(0..=t_max / 4)).min(t_max - 1);
                Query::TimeInterval { region, t_begin, t_end }
            }
            QueryKind::Knn => Query::Knn {
                k: rng.gen_range(1..=50),
                point: Point::new(rng.gen_range(0..side), rng.gen_range(0..side)),
                t,
            },
        }
    }
}

const FLAGS: [&str; 12] = ["id", "t", "t-begin", "t-end", "x1", "y1", "x2", "y2", "px", "py", "k-nn", "type"];

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "--type {}", self.kind())?;
        let r = |f: &mut fmt::Formatter<'_>, r: &Region| write!(f, " --x1 {} --y1 {} --x2 {} --y2 {}", r.x1, r.y1, r.x2, r.y2);
        match self {
            Query::Object { id, t } => write!(f, " --id {id} --t {t}"),
            Query::Trajectory { id, t_begin, t_end } => write!(f, " --id {id} --t-begin {t_begin} --t-end {t_end}"),
            Query::TimeSlice { region, t } => {
                r(f, region)?;
                write!(f, " --t {t}")
            }
            Query::TimeInterval { region, t_begin, t_end } => {
                r(f, region)?;
                write!(f, " --t-begin {t_begin} --t-end {t_end}")
            }
            Query::Knn { k, point, t } => write!(f, " --px {} --py {} --t {t} --k-nn {k}", point.x, point.y),
        }
    }
}

impl TrajectoryIndex {
    pub fn answer(&self, q: &Query, opts: &QueryOptions, stats: &mut QueryStats) -> Result<Answer> {
        Ok(match *q {
            Query::Object { id, t } => Answer::Position(self.search_object_with(id, t, opts, stats)?),
            Query::Trajectory { id, t_begin, t_end } => Answer::Path(self.search_trajectory_with(id, t_begin, t_end, stats)?),
            Query::TimeSlice { region, t } => Answer::Located(self.time_slice_with(&region, t, opts, stats)),
            Query::TimeInterval { region, t_begin, t_end } => Answer::Ids(self.time_interval_with(&region, t_begin, t_end, opts, stats)),
            Query::Knn { k, point, t } => Answer::Neighbors(self.knn_with(k, point, t, opts, stats)),
        })
    }
}

impl OracleStore {
    pub fn answer(&self, q: &Query) -> Result<Answer> {
        Ok(match *q {
            Query::Object { id, t } => {
                if !self.contains_object(id) {
                    return Err(Error::UnknownObject(id));
                }
                Answer::Position(self.position(id, t))
            }
            Query::Trajectory { id, t_begin, t_end } => {
                if !self.contains_object(id) {
                    return Err(Error::UnknownObject(id));
                }
                Answer::Path(self.trajectory(id, t_begin, t_end))
            }
            Query::TimeSlice { region, t } => Answer::Located(self.time_slice(&region, t)),
            Query::TimeInterval { region, t_begin, t_end } => Answer::Ids(self.time_interval(&region, t_begin, t_end)),
            Query::Knn { k, point, t } => Answer::Neighbors(self.knn(k, point, t)),
        })
    }
}

/// First query whose index answer differs from the oracle's.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub query: Query,
    pub index: Result<Answer>,
    pub oracle: Result<Answer>,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: index {:?}, oracle {:?}", self.query, self.index, self.oracle)
    }
}

/// Runs `per_kind` seeded random queries of every kind against both the
/// index and the oracle; returns the number compared or the first mismatch.
pub fn verify(
    index: &TrajectoryIndex,
    oracle: &OracleStore,
    data: &Dataset,
    per_kind: usize,
    seed: u64,
    opts: &QueryOptions,
) -> std::result::Result<usize, Box<Mismatch>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = QueryStats::default();
    let mut done = 0;
    for kind in QueryKind::ALL {
        for _ in 0..per_kind {
            let query = Query::random(kind, data, &mut rng);
            let (a, b) = (index.answer(&query, opts, &mut stats), oracle.answer(&query));
            if a != b {
                return Err(Box::new(Mismatch { query, index: a, oracle: b }));
            }
            done += 1;
        }
    }
    Ok(done)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn descriptors_round_trip() {
        let data = synth::walks_with_events(2, 10, 200, 64);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for kind in QueryKind::ALL {
            for _ in 0..20 {
                let q = Query::random(kind, &data, &mut rng);
                assert_eq!(q.kind(), kind);
                assert!(q.in_extent(data.instants));
                assert_eq!(Query::parse(&q.to_string()).unwrap(), q);
            }
        }
    }

    #[test]
    fn flags_in_any_order() {
        let q = Query::parse("--k-nn 1 --t 9 --type knn --py 0 --px 10").unwrap();
        assert_eq!(q, Query::Knn { k: 1, point: Point::new(10, 0), t: 9 });
        for bad in ["", "--type knn", "--type teleport --t 1", "--type object --id 1 --t x", "--type object --id 1", "--type object --id -1 --t 2", "--type object --id 1 --t 2 --zoom 3", "type object"] {
            assert!(Query::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn verify_walkthrough_and_detect_corruption() {
        let data = synth::walkthrough();
        let opts = crate::engine::BuildOptions { period: 8, ..Default::default() };
        let mut idx = TrajectoryIndex::build(&data, opts).unwrap();
        let oracle = OracleStore::build(&data);
        assert_eq!(verify(&idx, &oracle, &data, 50, 3, &QueryOptions::default()), Ok(250));
        idx.corrupt_ids_for_testing();
        assert!(verify(&idx, &oracle, &data, 50, 3, &QueryOptions::default()).is_err());
    }
}
