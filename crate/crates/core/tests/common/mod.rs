#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trajgram::oracle::OracleStore;
use trajgram::{Dataset, Point, QueryOptions, QueryStats, Region, SnapshotChoice, TrajectoryIndex};

/// First disagreement between index and oracle, described.
pub fn compare(idx: &TrajectoryIndex, oracle: &OracleStore, data: &Dataset, queries: usize, seed: u64, opts: &QueryOptions, stats: &mut QueryStats) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = data.side as i64;
    let t_max = data.instants.max(1);
    let ids: Vec<u32> = data.trajectories.iter().map(|t| t.id).collect();
    if ids.is_empty() {
        return Ok(());
    }
    let region = |rng: &mut ChaCha8Rng| {
        let w = rng.gen_range(1..=side / 4 + 1);
        let h = rng.gen_range(1..=side / 4 + 1);
        let x = rng.gen_range(-2..side);
        let y = rng.gen_range(-2..side);
        Region::new(x, y, x + w - 1, y + h - 1)
    };
    for q in 0..queries {
        let id = ids[rng.gen_range(0..ids.len())];
        let t = rng.gen_range(0..t_max);
        let got = idx.search_object_with(id, t, opts, stats).unwrap();
        if got != oracle.position(id, t) {
            return Err(format!("query {q}: object {id} at {t}: {got:?} vs {:?}", oracle.position(id, t)));
        }

        let t_b = rng.gen_range(0..t_max);
        let t_e = (t_b + rng.gen_range(0..t_max / 4 + 2)).min(t_max + 3);
        let got = idx.search_trajectory_with(id, t_b, t_e, stats).unwrap();
        if got != oracle.trajectory(id, t_b, t_e) {
            return Err(format!("query {q}: trajectory {id} [{t_b},{t_e}]: {:?} vs {:?}", got, oracle.trajectory(id, t_b, t_e)));
        }

        let r = region(&mut rng);
        let got = idx.time_slice_with(&r, t, opts, stats);
        if got != oracle.time_slice(&r, t) {
            return Err(format!("query {q}: slice {r:?} at {t}: {got:?} vs {:?}", oracle.time_slice(&r, t)));
        }

        let r = region(&mut rng);
        let got = idx.time_interval_with(&r, t_b, t_e, opts, stats);
        if got != oracle.time_interval(&r, t_b, t_e) {
            return Err(format!("query {q}: interval {r:?} [{t_b},{t_e}]: {got:?} vs {:?}", oracle.time_interval(&r, t_b, t_e)));
        }

        let k = rng.gen_range(1..=50);
        let pq = Point::new(rng.gen_range(0..side), rng.gen_range(0..side));
        let got = idx.knn_with(k, pq, t, opts, stats);
        let want = oracle.knn(k, pq, t);
        if got != want {
            return Err(format!("query {q}: knn k={k} {pq} at {t}: {got:?} vs {want:?}"));
        }
    }
    Ok(())
}

/// Every combination of pruning switches and snapshot choice.
pub fn all_options() -> Vec<QueryOptions> {
    let mut out = Vec::new();
    for mbr_pruning in [true, false] {
        for er_pruning in [true, false] {
            for snapshot in [SnapshotChoice::Nearest, SnapshotChoice::Preceding] {
                out.push(QueryOptions { mbr_pruning, er_pruning, snapshot });
            }
        }
    }
    out
}
