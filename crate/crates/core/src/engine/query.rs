//! Object, trajectory, time-slice, time-interval and nearest-neighbor
//! queries over the compressed index.
//!
//! Every traversal starts from a snapshot and walks one portion log. Two
//! bounds keep the walks short. A rule's box tells where the object can be
//! while the rule plays out, and `max_speed` tells how far it can get in the
//! time left, which turns a query region into an expanded region that the
//! object must stay inside to remain relevant.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap};

use super::TrajectoryIndex;
use crate::error::Result;
use crate::geom::{dist2, Point, Region};
use crate::log::{advance, advance_resumable, trace, retreat, Token, Tokens};

/// Slack for comparing floating-point distance bounds.
const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SnapshotChoice {
    /// Nearest snapshot in time; an exact tie goes to the earlier one.
    #[default]
    Nearest,
    /// Always the snapshot at or before the query instant.
    Preceding,
}

/// Switches for the pruning rules. Answers never depend on them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryOptions {
    pub mbr_pruning: bool,
    pub er_pruning: bool,
    pub snapshot: SnapshotChoice,
}

impl Default for QueryOptions {
    fn default() -> Self {
        Self {
            mbr_pruning: true,
            er_pruning: true,
            snapshot: SnapshotChoice::Nearest,
        }
    }
}

/// Work counters filled in by the `*_with` query variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct QueryStats {
    /// Log symbols and rule nodes inspected.
    pub symbols: u64,
    /// Objects whose logs were traversed.
    pub candidates: u64,
    /// Objects dropped by a box or expanded-region test.
    pub pruned: u64,
}

impl std::ops::AddAssign for QueryStats {
    fn add_assign(&mut self, o: Self) {
        self.symbols += o.symbols;
        self.candidates += o.candidates;
        self.pruned += o.pruned;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighbor {
    pub id: u32,
    /// Squared Euclidean distance in cells.
    pub dist2: u64,
}

impl Neighbor {
    pub fn distance(&self) -> f64 {
        (self.dist2 as f64).sqrt()
    }
}

/// Where a walk stands: an instant and, when the object is seen, its cell.
type State = (u64, Point);

impl TrajectoryIndex {
    fn period(&self) -> u64 {
        self.params.period
    }

    fn last_snapshot(&self) -> usize {
        self.snapshots.len().saturating_sub(1)
    }

    fn pick_snapshot(&self, t: u64, choice: SnapshotChoice) -> usize {
        let d = self.period();
        let h = match choice {
            SnapshotChoice::Preceding => t / d,
            SnapshotChoice::Nearest => (t + (d - 1) / 2) / d,
        };
        (h as usize).min(self.last_snapshot())
    }

    fn in_extent(&self, t: u64) -> bool {
        t < self.params.instants
    }

    /// Region grown by the distance coverable in `elapsed` instants.
    fn reach(&self, r: &Region, elapsed: u64) -> Region {
        r.grow(self.params.max_speed.saturating_mul(elapsed).min(1 << 40) as i64)
    }

    /// Cell of `id` at `t`, or `None` when it emits no position then.
    pub fn search_object(&self, id: u32, t: u64) -> Result<Option<Point>> {
        self.search_object_with(id, t, &QueryOptions::default(), &mut QueryStats::default())
    }

    pub fn search_object_with(
        &self,
        id: u32,
        t: u64,
        opts: &QueryOptions,
        stats: &mut QueryStats,
    ) -> Result<Option<Point>> {
        let o = self.index_of(id)? as u32;
        if !self.in_extent(t) {
            return Ok(None);
        }
        let h = self.pick_snapshot(t, opts.snapshot);
        let ht = h as u64 * self.period();
        Ok(match ht.cmp(&t) {
            Ordering::Equal => self.snapshots[h].find_object(o),
            Ordering::Less => self.forward_position(h, o, t, stats),
            Ordering::Greater => self.backward_position(h, o, t, stats),
        })
    }

    /// Position at `t` in `(h·d, (h+1)·d]`, walking forward from snapshot `h`.
    fn forward_position(&self, h: usize, o: u32, t_q: u64, stats: &mut QueryStats) -> Option<Point> {
        let mut cur = self.snapshots[h].find_object(o).map(|p| (h as u64 * self.period(), p));
        for tok in self.logs.tokens(h, o as usize) {
            stats.symbols += 1;
            let (t, p) = match tok {
                Token::Sym(s) => {
                    let (t, p) = cur.expect("movement follows a known position");
                    let (nt, np) = advance(&self.dict, p, t, t_q, s);
                    (nt, np)
                }
                Token::Appear { t, pos } => (t, pos),
                Token::Gap { missing, shift } => {
                    let (t, p) = cur.expect("gap follows a known position");
                    (t + missing + 1, p + shift)
                }
                Token::Vanish { .. } => return None,
            };
            if t > t_q {
                return None;
            }
            if t == t_q {
                return Some(p);
            }
            cur = Some((t, p));
        }
        None
    }

    /// Position at `t` in `((h-1)·d, h·d)`, walking backward from snapshot `h`.
    fn backward_position(&self, h: usize, o: u32, t_q: u64, stats: &mut QueryStats) -> Option<Point> {
        let mut rest = self.logs.tokens(h - 1, o as usize);
        let (mut t, mut p) = match self.snapshots[h].find_object(o) {
            Some(p) => (h as u64 * self.period(), p),
            None => match rest.next_back() {
                Some(Token::Vanish { t, pos }) => {
                    stats.symbols += 1;
                    (t, pos)
                }
                _ => return None,
            },
        };
        if t < t_q {
            return None;
        }
        for tok in rest.rev() {
            if t == t_q {
                return Some(p);
            }
            stats.symbols += 1;
            match tok {
                Token::Sym(s) => (t, p) = retreat(&self.dict, p, t_q, t, s),
                Token::Gap { missing, shift } => {
                    let before = t - missing - 1;
                    if before < t_q {
                        return None;
                    }
                    (t, p) = (before, p - shift);
                }
                Token::Appear { .. } => return None,
                Token::Vanish { .. } => unreachable!("a disappearance only ends a log"),
            }
        }
        (t == t_q).then_some(p)
    }

    /// Every `(instant, cell)` of `id` in `[t_b, t_e]`, in time order.
    pub fn search_trajectory(&self, id: u32, t_b: u64, t_e: u64) -> Result<Vec<(u64, Point)>> {
        self.search_trajectory_with(id, t_b, t_e, &mut QueryStats::default())
    }

    pub fn search_trajectory_with(
        &self,
        id: u32,
        t_b: u64,
        t_e: u64,
        stats: &mut QueryStats,
    ) -> Result<Vec<(u64, Point)>> {
        let o = self.index_of(id)? as u32;
        let mut out = Vec::new();
        if self.snapshots.is_empty() || t_b > t_e || !self.in_extent(t_b) {
            return Ok(out);
        }
        let t_e = t_e.min(self.params.instants - 1);
        let d = self.period();
        let first = ((t_b / d) as usize).min(self.last_snapshot());
        if first as u64 * d == t_b {
            if let Some(p) = self.snapshots[first].find_object(o) {
                out.push((t_b, p));
            }
        }
        let mut h = first;
        while h < self.logs.portions() && (h as u64) * d < t_e {
            self.collect_portion(h, o, t_b, t_e, &mut out, stats);
            h += 1;
        }
        Ok(out)
    }

    /// Appends the positions of portion `h` that fall in `[t_b, t_e]`.
    fn collect_portion(&self, h: usize, o: u32, t_b: u64, t_e: u64, out: &mut Vec<(u64, Point)>, stats: &mut QueryStats) {
        let mut cur = self.snapshots[h].find_object(o).map(|p| (h as u64 * self.period(), p));
        let emit = |(t, p): State, out: &mut Vec<(u64, Point)>| {
            if t_b <= t && t <= t_e {
                out.push((t, p));
            }
        };
        let mut pending = Vec::new();
        for tok in self.logs.tokens(h, o as usize) {
            stats.symbols += 1;
            match tok {
                Token::Sym(s) => {
                    let (t, p) = cur.expect("movement follows a known position");
                    let span = self.dict.span(s);
                    if t + span < t_b {
                        cur = Some((t + span, p + self.dict.disp(s)));
                        continue;
                    }
                    // skip to t_b inside the symbol, then expand what is left
                    let (mut t, mut p) = (t, p);
                    if t < t_b {
                        (t, p) = advance_resumable(&self.dict, p, t, t_b, s, &mut pending);
                        emit((t, p), out);
                    } else {
                        pending.push(s);
                    }
                    while let Some(x) = pending.pop() {
                        if t >= t_e {
                            return;
                        }
                        let steps = trace(&self.dict, p, t, t_e, x);
                        if let Some(&last) = steps.last() {
                            (t, p) = last;
                        }
                        out.extend(steps);
                    }
                    cur = Some((t, p));
                }
                Token::Appear { t, pos } => {
                    cur = Some((t, pos));
                    emit((t, pos), out);
                }
                Token::Gap { missing, shift } => {
                    let (t, p) = cur.expect("gap follows a known position");
                    let next = (t + missing + 1, p + shift);
                    cur = Some(next);
                    emit(next, out);
                }
                Token::Vanish { .. } => return,
            }
            if cur.is_some_and(|(t, _)| t >= t_e) {
                return;
            }
        }
    }

    /// Objects inside `r` at instant `t`, with their cells, by ascending id.
    pub fn time_slice(&self, r: &Region, t: u64) -> Vec<(u32, Point)> {
        self.time_slice_with(r, t, &QueryOptions::default(), &mut QueryStats::default())
    }

    pub fn time_slice_with(&self, r: &Region, t_q: u64, opts: &QueryOptions, stats: &mut QueryStats) -> Vec<(u32, Point)> {
        let Some(r) = r.clip(self.params.side) else {
            return Vec::new();
        };
        if self.snapshots.is_empty() || !self.in_extent(t_q) {
            return Vec::new();
        }
        let h = self.pick_snapshot(t_q, opts.snapshot);
        let ht = h as u64 * self.period();
        let snap = &self.snapshots[h];
        let mut out: Vec<(u32, Point)> = if ht == t_q {
            snap.objects_in_region(&r)
        } else {
            let elapsed = ht.abs_diff(t_q);
            let search = if opts.er_pruning {
                self.reach(&r, elapsed).clip(self.params.side)
            } else {
                Some(Region::new(0, 0, self.params.side as i64 - 1, self.params.side as i64 - 1))
            };
            let mut found = Vec::new();
            let from_snapshot = search.map(|s| snap.objects_in_region(&s)).unwrap_or_default();
            if ht < t_q {
                for (o, p) in from_snapshot {
                    stats.candidates += 1;
                    let tokens = self.logs.tokens(h, o as usize);
                    if let Some(q) = self.slice_forward((ht, p), tokens, &r, t_q, opts, stats) {
                        found.push((o, q));
                    }
                }
                for &o in snap.app() {
                    let Some((ta, pa)) = self.logs.appearance(h, o as usize) else { continue };
                    if ta > t_q || (opts.er_pruning && !self.reach(&r, t_q - ta).contains(pa)) {
                        continue;
                    }
                    stats.candidates += 1;
                    let tokens = self.logs.tokens(h, o as usize).skip(1);
                    let hit = if ta == t_q {
                        r.contains(pa).then_some(pa)
                    } else {
                        self.slice_forward((ta, pa), tokens, &r, t_q, opts, stats)
                    };
                    if let Some(q) = hit {
                        found.push((o, q));
                    }
                }
            } else {
                for (o, p) in from_snapshot {
                    stats.candidates += 1;
                    let tokens = self.logs.tokens(h - 1, o as usize);
                    if let Some(q) = self.slice_backward((ht, p), tokens, &r, t_q, opts, stats) {
                        found.push((o, q));
                    }
                }
                for &o in snap.dis() {
                    let Some((tv, pv)) = self.logs.vanishing(h - 1, o as usize) else { continue };
                    if tv < t_q || (opts.er_pruning && !self.reach(&r, tv - t_q).contains(pv)) {
                        continue;
                    }
                    stats.candidates += 1;
                    let mut tokens = self.logs.tokens(h - 1, o as usize);
                    tokens.next_back();
                    let hit = if tv == t_q {
                        r.contains(pv).then_some(pv)
                    } else {
                        self.slice_backward((tv, pv), tokens, &r, t_q, opts, stats)
                    };
                    if let Some(q) = hit {
                        found.push((o, q));
                    }
                }
            }
            found
        };
        for e in &mut out {
            e.0 = self.id_of(e.0);
        }
        out.sort_unstable();
        out
    }

    /// Walks forward from `start` to `t_q`; the cell there if inside `r`.
    fn slice_forward(
        &self,
        start: State,
        tokens: impl Iterator<Item = Token>,
        r: &Region,
        t_q: u64,
        opts: &QueryOptions,
        stats: &mut QueryStats,
    ) -> Option<Point> {
        let (mut t, mut p) = start;
        for tok in tokens {
            stats.symbols += 1;
            match tok {
                Token::Sym(s) => {
                    let span = self.dict.span(s);
                    if t + span >= t_q {
                        if opts.mbr_pruning && self.dict.is_rule(s) && !self.dict.mbr(s).translate(disp_of(p)).intersects(r) {
                            stats.pruned += 1;
                            return None;
                        }
                        let (_, q) = advance(&self.dict, p, t, t_q, s);
                        return r.contains(q).then_some(q);
                    }
                    (t, p) = (t + span, p + self.dict.disp(s));
                }
                Token::Appear { t: ta, pos } => (t, p) = (ta, pos),
                Token::Gap { missing, shift } => (t, p) = (t + missing + 1, p + shift),
                Token::Vanish { .. } => return None,
            }
            if t > t_q {
                return None;
            }
            if t == t_q {
                return r.contains(p).then_some(p);
            }
            if opts.er_pruning && !self.reach(r, t_q - t).contains(p) {
                stats.pruned += 1;
                return None;
            }
        }
        None
    }

    /// Walks backward from `start` to `t_q`; the cell there if inside `r`.
    fn slice_backward(
        &self,
        start: State,
        tokens: impl DoubleEndedIterator<Item = Token>,
        r: &Region,
        t_q: u64,
        opts: &QueryOptions,
        stats: &mut QueryStats,
    ) -> Option<Point> {
        let (mut t, mut p) = start;
        for tok in tokens.rev() {
            stats.symbols += 1;
            match tok {
                Token::Sym(s) => {
                    let span = self.dict.span(s);
                    if t - span <= t_q {
                        if opts.mbr_pruning && self.dict.is_rule(s) {
                            let origin = p - self.dict.disp(s);
                            if !self.dict.mbr(s).translate(disp_of(origin)).intersects(r) {
                                stats.pruned += 1;
                                return None;
                            }
                        }
                        let (_, q) = retreat(&self.dict, p, t_q, t, s);
                        return r.contains(q).then_some(q);
                    }
                    (t, p) = (t - span, p - self.dict.disp(s));
                }
                Token::Gap { missing, shift } => {
                    let before = t - missing - 1;
                    if before < t_q {
                        return None;
                    }
                    (t, p) = (before, p - shift);
                }
                Token::Appear { .. } => return None,
                Token::Vanish { .. } => unreachable!("a disappearance only ends a log"),
            }
            if t == t_q {
                return r.contains(p).then_some(p);
            }
            if opts.er_pruning && !self.reach(r, t - t_q).contains(p) {
                stats.pruned += 1;
                return None;
            }
        }
        None
    }

    /// Ids of the objects inside `r` at some instant of `[t_b, t_e]`, ascending.
    pub fn time_interval(&self, r: &Region, t_b: u64, t_e: u64) -> Vec<u32> {
        self.time_interval_with(r, t_b, t_e, &QueryOptions::default(), &mut QueryStats::default())
    }

    pub fn time_interval_with(
        &self,
        r: &Region,
        t_b: u64,
        t_e: u64,
        opts: &QueryOptions,
        stats: &mut QueryStats,
    ) -> Vec<u32> {
        let Some(r) = r.clip(self.params.side) else {
            return Vec::new();
        };
        if self.snapshots.is_empty() || t_b > t_e || !self.in_extent(t_b) {
            return Vec::new();
        }
        let t_e = t_e.min(self.params.instants - 1);
        let d = self.period();
        let portions = self.logs.portions();
        let mut reported = BTreeSet::new();
        if portions == 0 {
            reported.extend(self.snapshots[0].objects_in_region(&r).into_iter().map(|(o, _)| o));
        }
        let whole = Region::new(0, 0, self.params.side as i64 - 1, self.params.side as i64 - 1);
        let mut h = ((t_b / d) as usize).min(portions.saturating_sub(1));
        while h < portions && h as u64 * d <= t_e {
            let ht = h as u64 * d;
            let t_last = t_e.min(ht + d);
            let snap = &self.snapshots[h];
            let search = if opts.er_pruning {
                self.reach(&r, t_last - ht).clip(self.params.side)
            } else {
                Some(whole)
            };
            let from_snapshot = search.map(|s| snap.objects_in_region(&s)).unwrap_or_default();
            for (o, p) in from_snapshot {
                if reported.contains(&o) {
                    continue;
                }
                stats.candidates += 1;
                if t_b <= ht && r.contains(p) {
                    reported.insert(o);
                    continue;
                }
                let tokens = self.logs.tokens(h, o as usize);
                if self.interval_walk((ht, p), tokens, &r, t_b, t_e, t_last, opts, stats) {
                    reported.insert(o);
                }
            }
            for &o in snap.app() {
                if reported.contains(&o) {
                    continue;
                }
                let Some((ta, pa)) = self.logs.appearance(h, o as usize) else { continue };
                if ta > t_last || (opts.er_pruning && !self.reach(&r, t_last - ta).contains(pa)) {
                    continue;
                }
                stats.candidates += 1;
                if t_b <= ta && r.contains(pa) {
                    reported.insert(o);
                    continue;
                }
                let tokens = self.logs.tokens(h, o as usize).skip(1);
                if self.interval_walk((ta, pa), tokens, &r, t_b, t_e, t_last, opts, stats) {
                    reported.insert(o);
                }
            }
            h += 1;
        }
        let mut out: Vec<u32> = reported.into_iter().map(|o| self.id_of(o)).collect();
        out.sort_unstable();
        out
    }

    /// Whether the walk from `start` enters `r` during `[t_b, t_e]`. Positions
    /// past `t_last` belong to the next portion and are not examined.
    #[allow(clippy::too_many_arguments)]
    fn interval_walk(
        &self,
        start: State,
        tokens: impl Iterator<Item = Token>,
        r: &Region,
        t_b: u64,
        t_e: u64,
        t_last: u64,
        opts: &QueryOptions,
        stats: &mut QueryStats,
    ) -> bool {
        let (mut t, mut p) = start;
        let hit = |t: u64, p: Point| t_b <= t && t <= t_e && r.contains(p);
        let escaped = |t: u64, p: Point| opts.er_pruning && t <= t_last && !self.reach(r, t_last - t).contains(p);
        let mut work = Vec::new();
        for tok in tokens {
            match tok {
                Token::Sym(s) => work.push(s),
                Token::Appear { .. } => unreachable!("an appearance only starts a log"),
                Token::Gap { missing, shift } => {
                    stats.symbols += 1;
                    (t, p) = (t + missing + 1, p + shift);
                    if t > t_e {
                        return false;
                    }
                    if hit(t, p) {
                        return true;
                    }
                    if escaped(t, p) {
                        stats.pruned += 1;
                        return false;
                    }
                    continue;
                }
                Token::Vanish { .. } => return false,
            }
            while let Some(x) = work.pop() {
                stats.symbols += 1;
                if t >= t_e {
                    return false;
                }
                let span = self.dict.span(x);
                if t + span < t_b {
                    (t, p) = (t + span, p + self.dict.disp(x));
                    continue;
                }
                if let Some((a, b)) = self.dict.children(x) {
                    if opts.mbr_pruning {
                        let bbox = self.dict.mbr(x).translate(disp_of(p));
                        if r.contains_region(&bbox) {
                            // every covered instant is inside r and one is in the window
                            return true;
                        }
                        if !bbox.intersects(r) {
                            (t, p) = (t + span, p + self.dict.disp(x));
                            if escaped(t, p) {
                                stats.pruned += 1;
                                return false;
                            }
                            continue;
                        }
                    }
                    work.push(b);
                    work.push(a);
                    continue;
                }
                (t, p) = (t + 1, p + self.dict.disp(x));
                if hit(t, p) {
                    return true;
                }
                if escaped(t, p) {
                    stats.pruned += 1;
                    return false;
                }
            }
        }
        false
    }

    /// The `k` objects nearest to `q` at instant `t`, by distance then id.
    pub fn knn(&self, k: usize, q: Point, t: u64) -> Vec<Neighbor> {
        self.knn_with(k, q, t, &QueryOptions::default(), &mut QueryStats::default())
    }

    pub fn knn_with(&self, k: usize, q: Point, t_q: u64, opts: &QueryOptions, stats: &mut QueryStats) -> Vec<Neighbor> {
        if k == 0 || self.snapshots.is_empty() || !self.in_extent(t_q) {
            return Vec::new();
        }
        let h = self.pick_snapshot(t_q, SnapshotChoice::Preceding);
        let ht = h as u64 * self.period();
        let snap = &self.snapshots[h];
        let mut out = Vec::new();
        if ht == t_q {
            let mut kth = None;
            for (o, _, d2) in snap.candidates_by_distance(q) {
                stats.candidates += 1;
                if kth.is_some_and(|k2| d2 > k2) {
                    break;
                }
                out.push(Neighbor { id: self.id_of(o), dist2: d2 });
                if out.len() == k {
                    kth = Some(d2);
                }
            }
        } else {
            out = self.knn_walk(k, q, t_q, h, opts, stats);
        }
        out.sort_unstable_by_key(|n| (n.dist2, n.id));
        out.truncate(k);
        out
    }

    fn knn_walk(&self, k: usize, q: Point, t_q: u64, h: usize, opts: &QueryOptions, stats: &mut QueryStats) -> Vec<Neighbor> {
        let ht = h as u64 * self.period();
        let speed = self.params.max_speed as f64;
        let snap = &self.snapshots[h];
        let lower = |p: Point, t: u64| (dist2(q, p) as f64).sqrt() - speed * (t_q - t) as f64;
        let upper = |p: Point, t: u64| (dist2(q, p) as f64).sqrt() + speed * (t_q - t) as f64;

        // k smallest upper bounds among objects sure to be seen at t_q
        let mut bounds: BinaryHeap<OrdF64> = BinaryHeap::new();
        let offer = |b: f64, bounds: &mut BinaryHeap<OrdF64>| {
            bounds.push(OrdF64(b));
            if bounds.len() > k {
                bounds.pop();
            }
        };
        let d_max = |bounds: &BinaryHeap<OrdF64>| {
            if opts.er_pruning && bounds.len() == k {
                bounds.peek().unwrap().0
            } else {
                f64::INFINITY
            }
        };

        let mut queue: BinaryHeap<Reverse<Candidate>> = BinaryHeap::new();
        for (o, p, d2) in snap.candidates_by_distance(q) {
            let lb = (d2 as f64).sqrt() - speed * (t_q - ht) as f64;
            if lb > d_max(&bounds) + EPS {
                break;
            }
            if self.logs.event_count(h, o as usize) == 0 {
                offer(upper(p, ht), &mut bounds);
            }
            queue.push(Reverse(Candidate::new(lb, o, (ht, p), self.logs.tokens(h, o as usize))));
        }
        for &o in snap.app() {
            let Some((ta, pa)) = self.logs.appearance(h, o as usize) else { continue };
            if ta > t_q {
                continue;
            }
            let lb = lower(pa, ta);
            if lb > d_max(&bounds) + EPS {
                continue;
            }
            if self.logs.event_count(h, o as usize) == 1 {
                offer(upper(pa, ta), &mut bounds);
            }
            let mut rest = self.logs.tokens(h, o as usize);
            rest.next();
            let mut c = Candidate::new(lb, o, (ta, pa), rest);
            if ta == t_q {
                c.exact = Some(dist2(q, pa));
            }
            queue.push(Reverse(c));
        }
        stats.candidates += queue.len() as u64;

        let mut found: Vec<Neighbor> = Vec::new();
        while let Some(Reverse(mut c)) = queue.pop() {
            if found.len() >= k {
                let kth = (found[k - 1].dist2 as f64).sqrt();
                if c.lb > kth + EPS {
                    break;
                }
            }
            if let Some(d2) = c.exact {
                found.push(Neighbor { id: self.id_of(c.object), dist2: d2 });
                continue;
            }
            let Some(tok) = c.rest.next() else { continue };
            stats.symbols += 1;
            let (t, p) = c.state;
            let (nt, np) = match tok {
                Token::Sym(s) => advance(&self.dict, p, t, t_q, s),
                Token::Gap { missing, shift } => (t + missing + 1, p + shift),
                Token::Appear { .. } => unreachable!("an appearance only starts a log"),
                Token::Vanish { .. } => continue,
            };
            if nt > t_q {
                continue;
            }
            c.state = (nt, np);
            if nt == t_q {
                let d2 = dist2(q, np);
                c.exact = Some(d2);
                c.lb = (d2 as f64).sqrt();
            } else {
                c.lb = lower(np, nt).max(c.lb);
            }
            queue.push(Reverse(c));
        }
        found
    }
}

fn disp_of(p: Point) -> crate::spiral::Displacement {
    crate::spiral::Displacement::new(p.x, p.y)
}

/// Total order on distance bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}
impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for OrdF64 {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.total_cmp(&o.0)
    }
}

#[derive(Debug, Clone)]
struct Candidate<'a> {
    lb: f64,
    object: u32,
    state: State,
    /// Tokens not yet applied.
    rest: Tokens<'a>,
    exact: Option<u64>,
}

impl<'a> Candidate<'a> {
    fn new(lb: f64, object: u32, state: State, rest: Tokens<'a>) -> Self {
        Self {
            lb,
            object,
            state,
            rest,
            exact: None,
        }
    }

    /// Lower bound first; among equals, settled distances and then smaller
    /// objects come out first.
    fn key(&self) -> (OrdF64, bool, u32) {
        (OrdF64(self.lb), self.exact.is_none(), self.object)
    }
}

impl PartialEq for Candidate<'_> {
    fn eq(&self, o: &Self) -> bool {
        self.key() == o.key()
    }
}
impl Eq for Candidate<'_> {}
impl PartialOrd for Candidate<'_> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Candidate<'_> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.key().cmp(&o.key())
    }
}
