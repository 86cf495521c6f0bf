mod common;

use trajgram::oracle::OracleStore;
use trajgram::synth;
use trajgram::{BuildOptions, Dataset, TrajectoryIndex};

fn check(data: &Dataset, periods: &[u64], queries: usize) {
    let oracle = OracleStore::build(data);
    for &period in periods {
        let idx = TrajectoryIndex::build(data, BuildOptions { period, ..BuildOptions::default() }).unwrap();
        for opts in common::all_options() {
            if let Err(e) = common::compare(&idx, &oracle, data, queries, period, &opts, &mut Default::default()) {
                panic!("period {period}, {opts:?}: {e}");
            }
        }
    }
}

#[test]
fn small_random_walks() {
    check(&synth::random_walks(1, 30, 200, 64), &[1, 2, 7, 30], 300);
}

#[test]
fn small_shared_routes() {
    check(&synth::shared_routes(2, 30, 3, 300, 128), &[1, 5, 30, 120], 300);
}

#[test]
fn small_walks_with_events() {
    check(&synth::walks_with_events(3, 40, 400, 64), &[1, 3, 16, 30, 120], 300);
}

#[test]
fn walkthrough_everywhere() {
    check(&synth::walkthrough(), &[1, 2, 3, 8, 20], 500);
}
