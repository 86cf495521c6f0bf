mod common;

use proptest::prelude::*;
use trajgram::engine::CompressedElement;
use trajgram::geom::{dist, dist2, dist_region};
use trajgram::oracle::OracleStore;
use trajgram::synth;
use trajgram::{BuildOptions, Dataset, Error, Neighbor, Point, Region, Segment, Trajectory, TrajectoryIndex};

fn build(data: &Dataset, period: u64) -> TrajectoryIndex {
    TrajectoryIndex::build(data, BuildOptions { period, ..BuildOptions::default() }).unwrap()
}

fn p(x: i64, y: i64) -> Point {
    Point::new(x, y)
}

#[test]
fn static_object_over_two_portions() {
    let tr = Trajectory::new(1, vec![Segment { start: 0, cells: vec![p(3, 3); 41] }]);
    let idx = build(&Dataset::with_extent(8, 41, vec![tr]).unwrap(), 20);
    assert_eq!(idx.params().portions(), 2);
    assert_eq!(idx.snapshots().len(), 3);
    for h in 0..2 {
        let syms = idx.logs().symbols(h, 0);
        let covered: u64 = syms.iter().map(|&s| idx.dictionary().span(s)).sum();
        assert_eq!(covered, 20);
        assert!(syms.len() <= 2, "{syms:?}");
    }
    assert_eq!(idx.search_trajectory(1, 0, 40).unwrap().len(), 41);
}

#[test]
fn expanded_region_edges() {
    let idx = build(&synth::walkthrough(), 8);
    let r = Region::new(7, 3, 10, 4);
    assert_eq!(idx.expanded_region(&r, 5, 5), Some(r));
    assert_eq!(idx.expanded_region(&r, 0, 16), Some(Region::new(0, 0, 15, 15)));
    assert_eq!(idx.expanded_region(&Region::new(0, 0, 1, 1), 3, 5), Some(Region::new(0, 0, 3, 3)));
}

#[test]
fn point_to_region_distance() {
    let block = Region::new(8, 4, 9, 5);
    assert_eq!(dist_region(p(10, 0), &block), 17f64.sqrt());
    assert_eq!(dist_region(p(8, 5), &block), 0.0);
    for (i, q) in [p(0, 0), p(20, 3), p(9, 20), p(-4, -4), p(8, 4)].into_iter().enumerate() {
        for r in [block, Region::new(2, 7, 6, 7), Region::new(11, 0, 11, 13)] {
            let brute = (r.x1..=r.x2)
                .flat_map(|x| (r.y1..=r.y2).map(move |y| dist(q, p(x, y))))
                .fold(f64::INFINITY, f64::min);
            assert_eq!(dist_region(q, &r), brute, "case {i}");
        }
    }
}

#[test]
fn degenerate_windows_agree_with_point_queries() {
    let data = synth::walks_with_events(9, 30, 300, 64);
    let idx = build(&data, 30);
    let r = Region::new(10, 10, 40, 40);
    for t in (0..300).step_by(7) {
        for id in [0, 5, 17] {
            let one = idx.search_trajectory(id, t, t).unwrap();
            let at = idx.search_object(id, t).unwrap();
            assert_eq!(one, at.map(|q| (t, q)).into_iter().collect::<Vec<_>>());
        }
        let slice: Vec<u32> = idx.time_slice(&r, t).into_iter().map(|(id, _)| id).collect();
        assert_eq!(idx.time_interval(&r, t, t), slice);
    }
}

#[test]
fn snapshot_instants_use_the_tree() {
    let data = synth::random_walks(4, 40, 200, 128);
    let idx = build(&data, 50);
    let r = Region::new(20, 20, 90, 70);
    for h in 0..idx.snapshots().len() {
        let t = h as u64 * 50;
        let snap: Vec<(u32, Point)> = idx.snapshot(h).unwrap().objects_in_region(&r).into_iter().map(|(o, q)| (idx.object_ids()[o as usize], q)).collect();
        let mut snap = snap;
        snap.sort_unstable();
        assert_eq!(idx.time_slice(&r, t), snap);
        assert_eq!(OracleStore::build(&data).time_slice(&r, t), snap);
    }
}

#[test]
fn absent_objects_and_out_of_extent_queries() {
    let idx = build(&synth::walkthrough(), 8);
    assert!(idx.search_trajectory(7, 0, 13).unwrap().is_empty());
    assert!(idx.compressed_trajectory(7, 0, 13).unwrap().is_empty());
    assert!(matches!(idx.compressed_trajectory(7, 14, 16).unwrap()[0], CompressedElement::Token(_)));
    assert_eq!(idx.search_object(2, 17).unwrap(), None);
    assert!(idx.time_slice(&Region::new(0, 0, 15, 15), 99).is_empty());
    assert!(idx.time_slice(&Region::new(20, 20, 30, 30), 3).is_empty());
    assert!(idx.knn(3, p(0, 0), 40).is_empty());
    assert!(idx.knn(0, p(0, 0), 4).is_empty());
    assert!(idx.time_interval(&Region::new(0, 0, 15, 15), 9, 3).is_empty());
    assert_eq!(idx.search_trajectory(42, 0, 3), Err(Error::UnknownObject(42)));
}

#[test]
fn stationary_object_reported_once() {
    let idx = build(&synth::walkthrough(), 8);
    assert_eq!(idx.time_interval(&Region::new(4, 3, 4, 3), 0, 16), vec![4]);
}

#[test]
fn knn_with_large_k_returns_everything_sorted() {
    let data = synth::random_walks(8, 25, 100, 64);
    let idx = build(&data, 30);
    let q = p(30, 30);
    let all = idx.knn(100, q, 47);
    assert_eq!(all.len(), 25);
    let mut want: Vec<Neighbor> = data.trajectories.iter().map(|t| Neighbor { id: t.id, dist2: dist2(q, t.position(47).unwrap()) }).collect();
    want.sort_unstable_by_key(|n| (n.dist2, n.id));
    assert_eq!(all, want);
}

#[test]
fn container_round_trip_and_rejections() {
    let data = synth::walks_with_events(5, 20, 200, 64);
    let idx = build(&data, 30);
    let mut file = Vec::new();
    idx.save(&mut file).unwrap();
    assert_eq!(file, build(&data, 30).to_bytes());
    let back = TrajectoryIndex::load(file.as_slice()).unwrap();
    assert_eq!(back, idx);
    assert_eq!(idx.stats().total_bytes, file.len());

    assert!(matches!(TrajectoryIndex::from_bytes(&file[..file.len() - 1]), Err(Error::Truncated(_))));
    assert!(TrajectoryIndex::from_bytes(&[]).is_err());
    let mut bad = file.clone();
    bad[0] = b'X';
    assert_eq!(TrajectoryIndex::from_bytes(&bad), Err(Error::BadMagic));
    let mut bad = file.clone();
    bad[4] = 9;
    assert_eq!(TrajectoryIndex::from_bytes(&bad), Err(Error::Version(9)));
    let mut bad = file.clone();
    let last = bad.len() - 10;
    bad[last] ^= 0x40;
    assert!(matches!(TrajectoryIndex::from_bytes(&bad), Err(Error::Checksum(_))));
    let mut longer = file;
    longer.push(0);
    assert!(TrajectoryIndex::from_bytes(&longer).is_err());
}

#[test]
fn stats_of_empty_dataset() {
    let idx = build(&Dataset::with_extent(16, 0, vec![]).unwrap(), 30);
    let s = idx.stats();
    assert_eq!((s.snapshots, s.rules, s.movements, s.log_symbols, s.snapshot_bytes, s.tree_bytes), (0, 0, 0, 0, 0, 0));
    assert_eq!(s.ratio(), 0.0);
    let back = TrajectoryIndex::from_bytes(&idx.to_bytes()).unwrap();
    assert_eq!(back, idx);
}

#[test]
fn stats_track_the_period() {
    let data = synth::shared_routes(3, 40, 3, 800, 512);
    let sizes: Vec<_> = [30, 120, 720].iter().map(|&d| build(&data, d).stats()).collect();
    assert!(sizes.windows(2).all(|w| w[0].snapshot_bytes > w[1].snapshot_bytes));
    for s in &sizes {
        let parts = s.snapshot_bytes + s.log_stream_bytes + s.log_offset_bytes + s.side_array_bytes + s.dictionary_bytes + s.overhead_bytes;
        assert_eq!(parts, s.total_bytes);
        assert!(s.grammar_depth >= 1 && s.rules > 0);
        assert_eq!(s.movements, data.trajectories.iter().map(|t| t.sample_count() as u64 - 1).sum::<u64>());
    }
}

#[test]
fn full_compressed_trajectory_expands_to_input() {
    let data = synth::walks_with_events(6, 25, 400, 64);
    let idx = build(&data, 40);
    let dict = idx.dictionary();
    for tr in &data.trajectories {
        let mut got = Vec::new();
        let mut cur: Option<(u64, Point)> = None;
        for el in idx.compressed_trajectory(tr.id, 0, 399).unwrap() {
            match el {
                CompressedElement::Snapshot { t, pos } => {
                    if got.last().map_or(true, |&(lt, _)| lt < t) {
                        got.push((t, pos));
                    }
                    cur = Some((t, pos));
                }
                CompressedElement::Token(tok) => match tok {
                    trajgram::log::Token::Sym(s) => {
                        let (t, q) = cur.unwrap();
                        let steps = trajgram::log::trace(dict, q, t, u64::MAX, s);
                        cur = steps.last().copied();
                        got.extend(steps);
                    }
                    trajgram::log::Token::Appear { t, pos } => {
                        got.push((t, pos));
                        cur = Some((t, pos));
                    }
                    trajgram::log::Token::Gap { missing, shift } => {
                        let (t, q) = cur.unwrap();
                        cur = Some((t + missing + 1, q + shift));
                        got.push(cur.unwrap());
                    }
                    trajgram::log::Token::Vanish { .. } => cur = None,
                },
            }
        }
        assert_eq!(got, tr.samples().collect::<Vec<_>>(), "object {}", tr.id);
    }
}

/// Small datasets: a few objects on a 32×32 grid, each a run of
/// per-instant moves interrupted by gaps.
fn small_dataset() -> impl Strategy<Value = Dataset> {
    let object = (0u64..40, prop::collection::vec((0i64..32, 0i64..32, 0u64..6, prop::bool::weighted(0.15)), 1..60));
    (prop::collection::vec(object, 0..8), 1u64..100).prop_map(|(objects, extra)| {
        let mut trajectories = Vec::new();
        for (id, (start, steps)) in objects.into_iter().enumerate() {
            let mut timeline = Vec::new();
            timeline.resize(start as usize, None);
            let mut here = (steps[0].0, steps[0].1);
            for (x, y, gap, jump) in steps {
                if jump {
                    timeline.extend(std::iter::repeat(None).take(gap as usize));
                    here = (x, y);
                } else {
                    here = ((here.0 + x % 3 - 1).clamp(0, 31), (here.1 + y % 3 - 1).clamp(0, 31));
                }
                timeline.push(Some(p(here.0, here.1)));
            }
            trajectories.push(Trajectory::from_timeline(id as u32 * 3 + 1, &timeline));
        }
        let instants = trajectories.iter().map(|t| t.end()).max().unwrap_or(0) + extra % 5;
        Dataset::with_extent(32, instants, trajectories).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn small_datasets_match_the_oracle(data in small_dataset(), period in 1u64..25, seed in any::<u64>()) {
        let idx = build(&data, period);
        let oracle = OracleStore::build(&data);
        for opts in common::all_options() {
            let outcome = common::compare(&idx, &oracle, &data, 40, seed, &opts, &mut Default::default());
            prop_assert!(outcome.is_ok(), "{:?}: {}", opts, outcome.unwrap_err());
        }
        let bytes = idx.to_bytes();
        prop_assert_eq!(TrajectoryIndex::from_bytes(&bytes).unwrap(), idx);
    }
}
