//! Browser bindings: build an index over a synthetic dataset, then run
//! time-slice, nearest-neighbor and trajectory queries against it.
//!
//! Results cross the boundary as flat numeric arrays so the page needs no
//! glue beyond what `wasm-bindgen` generates.

use trajgram::{synth, BuildOptions, Dataset, Point, Region, TrajectoryIndex};
use wasm_bindgen::prelude::*;

#[wasm_bindgen]
pub struct Demo {
    index: TrajectoryIndex,
}

#[wasm_bindgen]
impl Demo {
    /// `kind` is `walks`, `routes`, `events` or `walkthrough`; the last
    /// ignores the size arguments.
    #[wasm_bindgen(constructor)]
    pub fn new(kind: &str, seed: u32, objects: u32, instants: u32, side: u32, period: u32) -> Result<Demo, JsError> {
        let data = dataset(kind, seed, objects, instants, side)?;
        let period = if kind == "walkthrough" { synth::WALKTHROUGH_PERIOD } else { period as u64 };
        let index = TrajectoryIndex::build(&data, BuildOptions { period, ..BuildOptions::default() })?;
        Ok(Demo { index })
    }

    pub fn side(&self) -> u32 {
        self.index.params().side as u32
    }

    pub fn instants(&self) -> u32 {
        self.index.params().instants as u32
    }

    /// One `name: value` line per size statistic.
    pub fn summary(&self) -> String {
        let p = self.index.params();
        let s = self.index.stats();
        format!(
            "objects: {}\ninstants: {}\nperiod: {}\nsnapshots: {}\nrules: {}\nsnapshot bytes: {}\nlog bytes: {}\ndictionary bytes: {}\ntotal bytes: {}\nbytes per movement: {:.3}",
            p.objects,
            p.instants,
            p.period,
            s.snapshots,
            s.rules,
            s.snapshot_bytes,
            s.log_stream_bytes + s.log_offset_bytes + s.side_array_bytes,
            s.dictionary_bytes,
            s.total_bytes,
            s.ratio(),
        )
    }

    /// `[id, x, y, ...]` for the objects inside the rectangle at `t`.
    pub fn time_slice(&self, x1: i32, y1: i32, x2: i32, y2: i32, t: u32) -> Vec<i32> {
        let r = Region::new(x1.into(), y1.into(), x2.into(), y2.into());
        self.index
            .time_slice(&r, t as u64)
            .into_iter()
            .flat_map(|(id, p)| [id as i32, p.x as i32, p.y as i32])
            .collect()
    }

    /// `[id, distance, ...]` for the `k` objects nearest `(x, y)` at `t`.
    pub fn knn(&self, x: i32, y: i32, t: u32, k: u32) -> Vec<f64> {
        self.index
            .knn(k as usize, Point::new(x.into(), y.into()), t as u64)
            .into_iter()
            .flat_map(|n| [n.id as f64, n.distance()])
            .collect()
    }

    /// `[t, x, y, ...]` for object `id` over `[t_begin, t_end]`.
    pub fn trajectory(&self, id: u32, t_begin: u32, t_end: u32) -> Result<Vec<i32>, JsError> {
        Ok(self
            .index
            .search_trajectory(id, t_begin as u64, t_end as u64)?
            .into_iter()
            .flat_map(|(t, p)| [t as i32, p.x as i32, p.y as i32])
            .collect())
    }
}

fn dataset(kind: &str, seed: u32, objects: u32, instants: u32, side: u32) -> Result<Dataset, JsError> {
    let (seed, instants, side) = (seed as u64, instants as u64, (side as u64).max(2));
    Ok(match kind {
        "walks" => synth::random_walks(seed, objects, instants, side),
        "routes" => synth::shared_routes(seed, objects, 5, instants, side),
        "events" => synth::walks_with_events(seed, objects, instants, side),
        "walkthrough" => synth::walkthrough(),
        other => return Err(JsError::new(&format!("unknown dataset {other:?}"))),
    })
}
