//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero when any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trajgram::grammar::{is_event, move_symbol, repair_compress, RuleDictionary};
use trajgram::k2tree::K2Tree;
use trajgram::log::{advance, trace, retreat};
use trajgram::oracle::OracleStore;
use trajgram::spiral::{self, Displacement};
use trajgram::succinct::{BitVectorBuilder, DacConfig, DacSequence, Permutation};
use trajgram::synth;
use trajgram::{BuildOptions, Dataset, Neighbor, Point, QueryOptions, QueryStats, Region, TrajectoryIndex};

type Outcome = Result<String, String>;

const PERIODS: [u64; 3] = [30, 120, 720];
const QUERIES: usize = 500;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn datasets() -> &'static [(&'static str, Dataset)] {
    static DATA: OnceLock<Vec<(&'static str, Dataset)>> = OnceLock::new();
    DATA.get_or_init(|| {
        vec![
            ("random walks", synth::random_walks(101, 200, 2000, 1024)),
            ("shared routes", synth::shared_routes(202, 100, 5, 1500, 4096)),
            ("walks with events", synth::walks_with_events(303, 200, 2000, 1024)),
        ]
    })
}

fn build(data: &Dataset, period: u64) -> TrajectoryIndex {
    TrajectoryIndex::build(data, BuildOptions { period, ..BuildOptions::default() }).expect("build")
}

/// Indexes for every dataset and period, built once.
fn indexes() -> &'static [(usize, u64, TrajectoryIndex)] {
    static IDX: OnceLock<Vec<(usize, u64, TrajectoryIndex)>> = OnceLock::new();
    IDX.get_or_init(|| {
        let mut out = Vec::new();
        for (i, (_, data)) in datasets().iter().enumerate() {
            for period in PERIODS {
                out.push((i, period, build(data, period)));
            }
        }
        out
    })
}

fn oracles() -> &'static [OracleStore] {
    static ORACLES: OnceLock<Vec<OracleStore>> = OnceLock::new();
    ORACLES.get_or_init(|| datasets().iter().map(|(_, d)| OracleStore::build(d)).collect())
}

fn anchors() -> Outcome {
    let code = |dx, dy| spiral::encode(Displacement::new(dx, dy)).unwrap();
    ensure(code(1, 1) == 8 && code(0, 3) == 45, || "spiral anchors".into())?;

    let dict = RuleDictionary::enrich(move_symbol(9) + 1, &[(move_symbol(2), move_symbol(9)), (move_symbol(4), move_symbol(5))]).unwrap();
    let (w, z) = (dict.boundary(), dict.boundary() + 1);
    let w_rule = (dict.span(w), dict.disp(w), dict.mbr(w));
    ensure(w_rule == (2, Displacement::new(3, 0), Region::new(0, -1, 3, 0)), || format!("W enriched as {w_rule:?}"))?;
    let z_rule = (dict.span(z), dict.disp(z), dict.mbr(z));
    ensure(z_rule == (2, Displacement::new(-2, -1), Region::new(-2, -1, 0, 0)), || format!("Z enriched as {z_rule:?}"))?;

    let start = Point::new(9, 5);
    ensure(advance(&dict, start, 1, 3, z) == (3, Point::new(7, 4)), || "full move".into())?;
    ensure(advance(&dict, start, 1, 2, z) == (2, Point::new(8, 4)), || "partial move".into())?;
    ensure(trace(&dict, start, 1, 3, z) == vec![(2, Point::new(8, 4)), (3, Point::new(7, 4))], || "move list".into())?;
    ensure(retreat(&dict, Point::new(7, 4), 1, 3, z) == (1, start), || "reverse move".into())?;

    let idx = TrajectoryIndex::build(&synth::walkthrough(), BuildOptions { period: synth::WALKTHROUGH_PERIOD, ..BuildOptions::default() }).unwrap();
    let r = Region::new(7, 3, 10, 4);
    let er = idx.expanded_region(&r, 8, 10);
    ensure(er == Some(Region::new(5, 1, 12, 6)), || format!("expanded region {er:?}"))?;
    let slice = idx.time_slice(&r, 10);
    ensure(slice == vec![(2, Point::new(9, 4)), (5, Point::new(7, 3))], || format!("time slice {slice:?}"))?;
    let nn = idx.knn(1, Point::new(10, 0), 9);
    ensure(nn == vec![Neighbor { id: 2, dist2: 10 }], || format!("knn {nn:?}"))?;
    Ok(format!("time slice {{O2@(9,4), O5@(7,3)}}, knn O2 at {:.4}", nn[0].distance()))
}

fn oracle_equivalence() -> Outcome {
    let opts = QueryOptions::default();
    for (i, period, idx) in indexes() {
        let (name, data) = &datasets()[*i];
        common::compare(idx, &oracles()[*i], data, QUERIES, 7 + period, &opts, &mut QueryStats::default())
            .map_err(|e| format!("{name}, period {period}: {e}"))?;
    }
    Ok(format!("{} datasets x {} periods x 5 types x {QUERIES} queries", datasets().len(), PERIODS.len()))
}

fn lossless() -> Outcome {
    let mut objects = 0;
    for (i, period, idx) in indexes() {
        let (name, data) = &datasets()[*i];
        for tr in &data.trajectories {
            let got = idx.search_trajectory(tr.id, 0, data.instants - 1).map_err(|e| e.to_string())?;
            let want: Vec<_> = tr.samples().collect();
            ensure(got == want, || format!("{name}, period {period}: object {} differs", tr.id))?;
            objects += 1;
        }
    }
    Ok(format!("{objects} full trajectories reconstructed"))
}

fn compression() -> Outcome {
    let mut snapshot_bytes = Vec::new();
    let mut detail = String::new();
    for (i, period, idx) in indexes() {
        if *i != 1 {
            continue;
        }
        let s = idx.stats();
        let log_bytes = s.log_stream_bytes + s.log_offset_bytes + s.side_array_bytes + s.dictionary_bytes;
        ensure(s.movements >= 100_000, || format!("only {} movements", s.movements))?;
        let share = log_bytes as f64 / s.movements as f64;
        ensure(share <= 0.5, || format!("period {period}: logs and dictionary are {:.1}% of raw", share * 100.0))?;
        snapshot_bytes.push(s.snapshot_bytes);
        detail += &format!("d={period}: logs {:.1}% snapshots {}B; ", share * 100.0, s.snapshot_bytes);
    }
    ensure(snapshot_bytes.windows(2).all(|w| w[0] > w[1]), || format!("snapshot bytes not decreasing: {snapshot_bytes:?}"))?;
    Ok(detail.trim_end_matches("; ").to_string())
}

fn pruning() -> Outcome {
    let on = QueryOptions::default();
    let switched = [
        QueryOptions { mbr_pruning: false, ..on },
        QueryOptions { er_pruning: false, ..on },
        QueryOptions { mbr_pruning: false, er_pruning: false, ..on },
    ];
    for (i, period, idx) in indexes() {
        let (name, data) = &datasets()[*i];
        for opts in switched {
            common::compare(idx, &oracles()[*i], data, QUERIES, 7 + period, &opts, &mut QueryStats::default())
                .map_err(|e| format!("{name}, period {period}, {opts:?}: {e}"))?;
        }
    }

    // symbols examined by interval queries on the shared routes
    let (_, data) = &datasets()[1];
    let idx = &indexes().iter().find(|(i, p, _)| *i == 1 && *p == 120).unwrap().2;
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let side = data.side as i64;
    let (mut with, mut without) = (QueryStats::default(), QueryStats::default());
    let off = QueryOptions { mbr_pruning: false, ..on };
    for _ in 0..QUERIES {
        let (w, h) = (rng.gen_range(16..=side / 8), rng.gen_range(16..=side / 8));
        let (x, y) = (rng.gen_range(0..side - w), rng.gen_range(0..side - h));
        let r = Region::new(x, y, x + w - 1, y + h - 1);
        let t_b = rng.gen_range(0..data.instants);
        let t_e = (t_b + rng.gen_range(0..=400)).min(data.instants - 1);
        let a = idx.time_interval_with(&r, t_b, t_e, &on, &mut with);
        let b = idx.time_interval_with(&r, t_b, t_e, &off, &mut without);
        ensure(a == b, || format!("answers differ for {r:?} [{t_b},{t_e}]"))?;
    }
    ensure(with.symbols < without.symbols, || format!("{} symbols with box pruning, {} without", with.symbols, without.symbols))?;
    Ok(format!(
        "answers unchanged under all switches; interval symbols {} vs {} without box pruning ({:.2}x)",
        with.symbols,
        without.symbols,
        without.symbols as f64 / with.symbols as f64
    ))
}

fn structures() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(66);

    for round in 0..50 {
        let len = rng.gen_range(0..5000);
        let density = rng.gen_range(0.0..1.0);
        let bits: Vec<bool> = (0..len).map(|_| rng.gen_bool(density)).collect();
        let mut b = BitVectorBuilder::new();
        bits.iter().for_each(|&x| b.push(x));
        let bv = b.build();
        let mut ones = 0;
        for (i, &x) in bits.iter().enumerate() {
            ensure(bv.rank1(i) == ones && bv.get(i) == x, || format!("bitvector {round} rank at {i}"))?;
            if x {
                ones += 1;
                ensure(bv.select1(ones) == Some(i + 1), || format!("bitvector {round} select1({ones})"))?;
            } else {
                ensure(bv.select0(i + 1 - ones) == Some(i + 1), || format!("bitvector {round} select0"))?;
            }
        }
        ensure(bv.rank1(len) == ones && bv.select1(ones + 1).is_none(), || format!("bitvector {round} end"))?;

        let values: Vec<u64> = (0..rng.gen_range(0..2000)).map(|_| rng.gen::<u64>() >> rng.gen_range(0..64)).collect();
        for config in [DacConfig::Optimal, DacConfig::BYTE_TWO_LEVELS, DacConfig::Fixed { width: 3, max_levels: 30 }] {
            let dac = DacSequence::build(&values, config);
            ensure(dac.iter().eq(values.iter().copied()), || format!("dac {round} {config:?}"))?;
        }

        let n = rng.gen_range(0..3000);
        let mut perm: Vec<u64> = (1..=n as u64).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        for rate in [1, 2, 5, 32] {
            let p = Permutation::new(&perm, rate).map_err(|e| e.to_string())?;
            for (i, &v) in (1..).zip(&perm) {
                ensure(p.image(i) == Ok(v as usize) && p.preimage(v as usize) == Ok(i), || format!("permutation rate {rate} at {i}"))?;
            }
        }
    }

    for round in 0..200 {
        let side = 256i64;
        let k = [2, 4, 16][round % 3];
        let count = rng.gen_range(0..600);
        let mut matrix = vec![false; (side * side) as usize];
        let points: Vec<Point> = (0..count).map(|_| Point::new(rng.gen_range(0..side), rng.gen_range(0..side))).collect();
        points.iter().for_each(|p| matrix[(p.y * side + p.x) as usize] = true);
        let tree = K2Tree::build(&points, side as u64, k).map_err(|e| e.to_string())?;
        let x = rng.gen_range(0..side);
        let y = rng.gen_range(0..side);
        let r = Region::new(x, y, (x + rng.gen_range(0..128)).min(side - 1), (y + rng.gen_range(0..128)).min(side - 1));
        let mut got: Vec<Point> = tree.range(&r).into_iter().map(|(p, _)| p).collect();
        got.sort_unstable();
        let mut want: Vec<Point> = (r.y1..=r.y2).flat_map(|y| (r.x1..=r.x2).map(move |x| Point::new(x, y))).filter(|p| matrix[(p.y * side + p.x) as usize]).collect();
        want.sort_unstable();
        ensure(got == want, || format!("k2-tree {round} range"))?;
        for (p, leaf) in tree.range(&Region::new(0, 0, side - 1, side - 1)) {
            ensure(tree.locate(leaf) == Ok(p), || format!("k2-tree {round} locate({leaf})"))?;
            ensure(tree.cell(p.x, p.y) == Ok(Some(leaf)), || format!("k2-tree {round} cell {p}"))?;
        }
    }

    let limit = 2001u64 * 2001;
    let mut seen = vec![false; limit as usize];
    for dy in -1000..=1000 {
        for dx in -1000..=1000 {
            let c = spiral::encode(Displacement::new(dx, dy)).map_err(|e| e.to_string())?;
            ensure(c < limit && !seen[c as usize], || format!("spiral code {c} for ({dx},{dy})"))?;
            seen[c as usize] = true;
            ensure(spiral::decode(c) == Displacement::new(dx, dy), || format!("spiral decode {c}"))?;
        }
    }

    for round in 0..1000 {
        let alphabet = rng.gen_range(1..12u64);
        let streams: Vec<Vec<u64>> = (0..rng.gen_range(1..6))
            .map(|_| (0..rng.gen_range(0..80)).map(|_| if rng.gen_bool(0.05) { rng.gen_range(0..4) } else { move_symbol(rng.gen_range(0..alphabet)) }).collect())
            .collect();
        let boundary = move_symbol(alphabet);
        let (compressed, pairs) = repair_compress(&streams, boundary);
        let dict = RuleDictionary::enrich(boundary, &pairs).map_err(|e| e.to_string())?;
        for (orig, comp) in streams.iter().zip(&compressed) {
            let mut expanded = Vec::new();
            for &s in comp {
                if is_event(s) {
                    expanded.push(u64::MAX - s);
                } else {
                    dict.expand_into(s, &mut expanded).map_err(|e| e.to_string())?;
                }
            }
            // expansions are spiral codes; events stay apart from them
            let want: Vec<u64> = orig.iter().map(|&s| if is_event(s) { u64::MAX - s } else { s - move_symbol(0) }).collect();
            ensure(expanded == want, || format!("grammar {round} round trip"))?;
        }
        for s in boundary..boundary + dict.rule_count() as u64 {
            let leaves = dict.expand(s).map_err(|e| e.to_string())?;
            let (mut p, mut bbox) = (Point::new(0, 0), Region::new(0, 0, 0, 0));
            for leaf in &leaves {
                p = p + spiral::decode(*leaf);
                bbox = bbox.union(&Region::point(p));
            }
            let got = (dict.span(s), dict.disp(s), dict.mbr(s));
            let want = (leaves.len() as u64, Displacement::new(p.x, p.y), bbox);
            ensure(got == want, || format!("grammar {round} rule {s}: {got:?} vs {want:?}"))?;
        }
    }
    Ok("bitvectors, DACs, permutations, 200 k2-trees, spiral radius 1000, 1000 grammars".into())
}

fn determinism() -> Outcome {
    let mut files = 0;
    for (_, data) in datasets() {
        for period in PERIODS {
            let a = build(data, period).to_bytes();
            let b = build(data, period).to_bytes();
            ensure(a == b, || format!("period {period}: two builds differ"))?;
            let loaded = TrajectoryIndex::from_bytes(&a).map_err(|e| e.to_string())?;
            ensure(loaded.to_bytes() == a, || "save after load differs".into())?;
            ensure(loaded.stats().total_bytes == a.len(), || "reported size differs from file size".into())?;
            files += 1;
        }
    }
    let bytes = build(&datasets()[2].1, 120).to_bytes();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..300 {
        let cut = rng.gen_range(0..bytes.len());
        ensure(TrajectoryIndex::from_bytes(&bytes[..cut]).is_err(), || format!("truncation at {cut} accepted"))?;
        let mut flipped = bytes.clone();
        let at = rng.gen_range(6..bytes.len());
        flipped[at] ^= 1 << rng.gen_range(0..8);
        ensure(TrajectoryIndex::from_bytes(&flipped).is_err(), || format!("bit flip at byte {at} accepted"))?;
    }
    Ok(format!("{files} indexes rebuilt byte-identical and reloaded; 300 truncations and bit flips rejected"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("anchor examples", anchors),
        ("oracle equivalence", oracle_equivalence),
        ("lossless round trip", lossless),
        ("compression", compression),
        ("pruning soundness", pruning),
        ("structure properties", structures),
        ("determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail} [{secs:.1}s]", n + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {detail} [{secs:.1}s]", n + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
