//! Seeded synthetic datasets and small hand-built fixtures.
//!
//! Generators are deterministic for a given seed on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{Dataset, Segment, Trajectory};
use crate::geom::Point;

fn clamp(p: Point, side: u64) -> Point {
    let max = side as i64 - 1;
    Point::new(p.x.clamp(0, max), p.y.clamp(0, max))
}

fn random_cell(rng: &mut ChaCha8Rng, side: u64) -> Point {
    Point::new(rng.gen_range(0..side as i64), rng.gen_range(0..side as i64))
}

fn step(rng: &mut ChaCha8Rng, p: Point, reach: i64, side: u64) -> Point {
    let q = Point::new(p.x + rng.gen_range(-reach..=reach), p.y + rng.gen_range(-reach..=reach));
    clamp(q, side)
}

/// Every object present throughout, moving up to two cells per axis each instant.
pub fn random_walks(seed: u64, objects: u32, instants: u64, side: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trajectories = (0..objects)
        .map(|id| {
            let mut p = random_cell(&mut rng, side);
            let cells = (0..instants)
                .map(|_| {
                    let here = p;
                    p = step(&mut rng, p, 2, side);
                    here
                })
                .collect();
            Trajectory::new(id, vec![Segment { start: 0, cells }])
        })
        .filter(|t| !t.segments[0].cells.is_empty())
        .collect();
    Dataset::with_extent(side, instants, trajectories).expect("generated cells stay on the grid")
}

/// A closed path visiting random waypoints at a fixed pace, as cells.
fn route(rng: &mut ChaCha8Rng, side: u64, waypoints: usize) -> Vec<Point> {
    let pace = rng.gen_range(1..=2i64);
    let start = random_cell(rng, side);
    let mut stops: Vec<Point> = (0..waypoints).map(|_| random_cell(rng, side)).collect();
    stops.push(start);
    let mut cells = vec![start];
    let mut p = start;
    for target in stops {
        while p != target {
            let dx = (target.x - p.x).clamp(-pace, pace);
            let dy = (target.y - p.y).clamp(-pace, pace);
            p = Point::new(p.x + dx, p.y + dy);
            cells.push(p);
        }
    }
    cells.pop();
    cells
}

/// Objects looping over a few shared routes at different phases, the
/// repetitive pattern of vehicles on fixed lines. Each object occasionally
/// dwells in place for a few instants.
pub fn shared_routes(seed: u64, objects: u32, routes: usize, instants: u64, side: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let paths: Vec<Vec<Point>> = (0..routes.max(1)).map(|_| route(&mut rng, side, 6)).collect();
    let trajectories = (0..objects)
        .map(|id| {
            let path = &paths[id as usize % paths.len()];
            let phase = rng.gen_range(0..path.len());
            let start = rng.gen_range(0..=instants / 10);
            let (mut at, mut dwell) = (phase, 0);
            let cells = (start..instants)
                .map(|_| {
                    let here = path[at % path.len()];
                    if dwell > 0 {
                        dwell -= 1;
                    } else if rng.gen_bool(0.01) {
                        dwell = rng.gen_range(1..=5);
                    } else {
                        at += 1;
                    }
                    here
                })
                .collect();
            Trajectory::new(id, vec![Segment { start, cells }])
        })
        .filter(|t| !t.segments[0].cells.is_empty())
        .collect();
    Dataset::with_extent(side, instants, trajectories).expect("routes stay on the grid")
}

/// Random walks with late starts, early ends and gaps, short ones inside a
/// portion and long ones spanning snapshots. Objects come back either where
/// they left or somewhere within reach.
pub fn walks_with_events(seed: u64, objects: u32, instants: u64, side: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trajectories = (0..objects)
        .filter_map(|id| {
            let first = rng.gen_range(0..=instants / 4);
            let last = rng.gen_range(instants * 3 / 4..=instants);
            let mut timeline = vec![None; instants as usize];
            let mut p = random_cell(&mut rng, side);
            let mut t = first;
            while t < last {
                timeline[t as usize] = Some(p);
                t += 1;
                if rng.gen_bool(0.02) {
                    let gap = if rng.gen_bool(0.7) { rng.gen_range(1..=6) } else { rng.gen_range(7..=150) };
                    t += gap;
                    if rng.gen_bool(0.5) {
                        let reach = gap as i64 + 1;
                        p = step(&mut rng, p, reach, side);
                    }
                } else {
                    p = step(&mut rng, p, 1, side);
                }
            }
            let tr = Trajectory::from_timeline(id, &timeline);
            (!tr.segments.is_empty()).then_some(tr)
        })
        .collect();
    Dataset::with_extent(side, instants, trajectories).expect("generated cells stay on the grid")
}

fn timeline(len: usize, spans: &[(usize, &[(i64, i64)])]) -> Vec<Option<Point>> {
    let mut line = vec![None; len];
    for &(start, cells) in spans {
        for (i, &(x, y)) in cells.iter().enumerate() {
            line[start + i] = Some(Point::new(x, y));
        }
    }
    line
}

/// Period of the [`walkthrough`] fixture.
pub const WALKTHROUGH_PERIOD: u64 = 8;

/// Seven objects on a 16×16 grid over instants 0..=16, snapshots every 8.
///
/// Object 1 vanishes after t1, is seen at (9,4) at t5 and at (9,5) at t8,
/// then heads north. Object 2 waits at (10,3), then goes to (9,3), (9,4) and
/// (10,4). Object 5 leaves after t3 and appears at (7,2) at t9. Objects 3
/// and 6 leave during the first portion and appear at t12; object 7 first
/// appears at t14. Object 4 never moves.
pub fn walkthrough() -> Dataset {
    const N: usize = 17;
    let north: Vec<(i64, i64)> = (5..=13).map(|y| (9, y)).collect();
    let o1 = timeline(N, &[(0, &[(9, 1), (9, 1)]), (5, &[(9, 4)]), (8, &north)]);
    let mut o2 = timeline(N, &[(9, &[(9, 3), (9, 4)])]);
    for (t, cell) in o2.iter_mut().enumerate() {
        if t <= 8 {
            *cell = Some(Point::new(10, 3));
        } else if t >= 11 {
            *cell = Some(Point::new(10, 4));
        }
    }
    let o3 = timeline(
        N,
        &[
            (0, &[(2, 9), (3, 9), (4, 9), (5, 9), (6, 9), (7, 9)]),
            (12, &[(4, 8), (4, 9), (4, 10), (4, 11), (4, 12)]),
        ],
    );
    let o4 = timeline(N, &[(0, &[(4, 3); N])]);
    let o5 = timeline(
        N,
        &[
            (0, &[(6, 1); 4]),
            (9, &[(7, 2), (7, 3), (8, 3), (8, 3), (8, 3), (8, 3), (8, 3), (8, 3)]),
        ],
    );
    let o6 = timeline(
        N,
        &[(0, &[(10, 13), (11, 13), (11, 14), (10, 14), (10, 15)]), (12, &[(12, 10); 5])],
    );
    let o7 = timeline(N, &[(14, &[(2, 2); 3])]);
    let trajectories = [o1, o2, o3, o4, o5, o6, o7]
        .iter()
        .enumerate()
        .map(|(i, line)| Trajectory::from_timeline(i as u32 + 1, line))
        .collect();
    Dataset::with_extent(16, N as u64, trajectories).expect("fixture is well formed")
}

/// Object 5 appears at (7,2) at t11, moves north then north-east, and is
/// last seen at (8,4) at t13. Object 8 repeats the same two moves so they
/// become one rule. Same grid and period as [`walkthrough`].
pub fn compressed_example() -> Dataset {
    const N: usize = 17;
    let o5 = timeline(N, &[(11, &[(7, 2), (7, 3), (8, 4)])]);
    let o8 = timeline(N, &[(1, &[(1, 1), (1, 2), (2, 3), (2, 4), (3, 5)])]);
    let trajectories = vec![Trajectory::from_timeline(5, &o5), Trajectory::from_timeline(8, &o8)];
    Dataset::with_extent(16, N as u64, trajectories).expect("fixture is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(random_walks(3, 5, 50, 64), random_walks(3, 5, 50, 64));
        assert_eq!(shared_routes(3, 10, 2, 80, 128), shared_routes(3, 10, 2, 80, 128));
        assert_eq!(walks_with_events(3, 10, 300, 64), walks_with_events(3, 10, 300, 64));
        assert_ne!(random_walks(3, 5, 50, 64), random_walks(4, 5, 50, 64));
    }

    #[test]
    fn events_dataset_has_gaps_of_both_lengths() {
        let data = walks_with_events(11, 60, 800, 128);
        let gaps: Vec<u64> = data
            .trajectories
            .iter()
            .flat_map(|t| t.segments.windows(2).map(|w| w[1].start - w[0].end()))
            .collect();
        assert!(gaps.iter().any(|&g| g <= 6));
        assert!(gaps.iter().any(|&g| g > 20));
    }

    #[test]
    fn walkthrough_speed_is_one_cell() {
        let data = walkthrough();
        assert_eq!(data.max_speed(), 1);
        assert_eq!(data.instants, 17);
        assert_eq!(data.object(2).unwrap().position(10), Some(Point::new(9, 4)));
        assert_eq!(data.object(5).unwrap().position(8), None);
    }
}
