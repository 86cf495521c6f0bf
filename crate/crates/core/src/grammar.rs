//! Re-Pair over the log alphabet and the enriched rule dictionary.
//!
//! Symbols are plain integers. Values `0..4` are the event codewords, a
//! movement with spiral code `m` is `m + 4`, and every value at or above the
//! dictionary's terminal boundary names rule `value - boundary`.
//!
//! Each rule `s -> a b` also records how many instants it covers, its net
//! displacement, and the box enclosing the origin and every intermediate
//! position of its expansion, relative to where it is applied.

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap};

use crate::bytes::{ByteReader, ByteWriter};
use crate::error::{Error, Result};
use crate::geom::{Point, Region};
use crate::spiral::{self, Displacement};
use crate::succinct::{DacConfig, DacSequence, PackedInts};

pub const EVENT_D: u64 = 0;
pub const EVENT_AA: u64 = 1;
pub const EVENT_RNM: u64 = 2;
pub const EVENT_RM: u64 = 3;
pub const MOVE_BASE: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Event {
    /// Disappears until at least the next snapshot.
    Vanish,
    /// First appearance, at an absolute position.
    Appear,
    /// Reappears after a gap, position not stored.
    ReappearSame,
    /// Reappears after a gap, shifted by a spiral code.
    ReappearMoved,
}

impl Event {
    pub fn from_symbol(s: u64) -> Option<Event> {
        match s {
            EVENT_D => Some(Event::Vanish),
            EVENT_AA => Some(Event::Appear),
            EVENT_RNM => Some(Event::ReappearSame),
            EVENT_RM => Some(Event::ReappearMoved),
            _ => None,
        }
    }

    pub fn symbol(self) -> u64 {
        match self {
            Event::Vanish => EVENT_D,
            Event::Appear => EVENT_AA,
            Event::ReappearSame => EVENT_RNM,
            Event::ReappearMoved => EVENT_RM,
        }
    }

    /// Entries this event owns in the position side array.
    pub fn position_entries(self) -> usize {
        match self {
            Event::Vanish | Event::Appear => 2,
            Event::ReappearMoved => 1,
            Event::ReappearSame => 0,
        }
    }
}

pub fn move_symbol(code: u64) -> u64 {
    code + MOVE_BASE
}

pub fn is_event(s: u64) -> bool {
    s < MOVE_BASE
}

/// Re-Pair over several streams. Pairs never straddle two streams and never
/// contain an event symbol. Every symbol must be below `boundary`; rule `i`
/// becomes symbol `boundary + i`.
///
/// Returns the rewritten streams and the rule pairs in creation order.
pub fn repair_compress(streams: &[Vec<u64>], boundary: u64) -> (Vec<Vec<u64>>, Vec<(u64, u64)>) {
    RePair::new(streams, boundary).run()
}

const NONE: u32 = u32::MAX;
const DELETED: u64 = u64::MAX;

#[derive(Default)]
struct PairInfo {
    /// Live adjacencies. Overlapping runs of `a a a` count each adjacency.
    count: usize,
    /// Key currently stored in the queue, if any.
    queued: Option<usize>,
    /// The queued key is the exact non-overlapping count.
    exact: bool,
    occ: Vec<u32>,
}

struct RePair {
    sym: Vec<u64>,
    next: Vec<u32>,
    prev: Vec<u32>,
    heads: Vec<Option<u32>>,
    pairs: HashMap<(u64, u64), PairInfo>,
    queue: BTreeSet<(Reverse<usize>, u64, u64)>,
    boundary: u64,
    rules: Vec<(u64, u64)>,
}

fn pairable(s: u64) -> bool {
    !is_event(s)
}

impl RePair {
    fn new(streams: &[Vec<u64>], boundary: u64) -> Self {
        let total: usize = streams.iter().map(Vec::len).sum();
        assert!(total < NONE as usize, "input too long");
        let mut rp = RePair {
            sym: Vec::with_capacity(total),
            next: Vec::with_capacity(total),
            prev: Vec::with_capacity(total),
            heads: Vec::with_capacity(streams.len()),
            pairs: HashMap::new(),
            queue: BTreeSet::new(),
            boundary,
            rules: Vec::new(),
        };
        for s in streams {
            let start = rp.sym.len() as u32;
            rp.heads.push((!s.is_empty()).then_some(start));
            for (j, &v) in s.iter().enumerate() {
                assert!(v < boundary, "symbol {v} at or above boundary {boundary}");
                let i = start + j as u32;
                rp.sym.push(v);
                rp.prev.push(if j == 0 { NONE } else { i - 1 });
                rp.next.push(if j + 1 == s.len() { NONE } else { i + 1 });
            }
        }
        for i in 0..rp.sym.len() {
            let n = rp.next[i];
            if n != NONE && pairable(rp.sym[i]) && pairable(rp.sym[n as usize]) {
                let e = rp.pairs.entry((rp.sym[i], rp.sym[n as usize])).or_default();
                e.count += 1;
                e.occ.push(i as u32);
            }
        }
        let keys: Vec<(u64, u64)> = rp.pairs.keys().copied().collect();
        for k in keys {
            rp.requeue(k);
        }
        rp
    }

    /// Re-synchronizes the queue entry of `k` with its adjacency count.
    fn requeue(&mut self, k: (u64, u64)) {
        let Some(info) = self.pairs.get_mut(&k) else {
            return;
        };
        if let Some(old) = info.queued.take() {
            self.queue.remove(&(Reverse(old), k.0, k.1));
        }
        info.exact = k.0 != k.1;
        if info.count >= 2 {
            info.queued = Some(info.count);
            self.queue.insert((Reverse(info.count), k.0, k.1));
        }
    }

    fn bump(&mut self, k: (u64, u64), at: u32) {
        let e = self.pairs.entry(k).or_default();
        e.count += 1;
        e.occ.push(at);
        self.requeue(k);
    }

    fn drop_one(&mut self, k: (u64, u64)) {
        if let Some(e) = self.pairs.get_mut(&k) {
            e.count -= 1;
            self.requeue(k);
        }
    }

    fn is_occurrence(&self, i: u32, k: (u64, u64)) -> bool {
        let i = i as usize;
        if self.sym[i] != k.0 {
            return false;
        }
        let n = self.next[i];
        n != NONE && self.sym[n as usize] == k.1
    }

    /// Live occurrences of `k` picked greedily left to right.
    fn non_overlapping(&mut self, k: (u64, u64)) -> Vec<u32> {
        let mut occ = std::mem::take(&mut self.pairs.get_mut(&k).unwrap().occ);
        occ.sort_unstable();
        occ.dedup();
        occ.retain(|&i| self.is_occurrence(i, k));
        let mut picked = Vec::with_capacity(occ.len());
        let mut blocked = NONE;
        for &i in &occ {
            if i == blocked {
                continue;
            }
            picked.push(i);
            blocked = self.next[i as usize];
        }
        self.pairs.get_mut(&k).unwrap().occ = occ;
        picked
    }

    fn run(mut self) -> (Vec<Vec<u64>>, Vec<(u64, u64)>) {
        while let Some(&top) = self.queue.first() {
            let (Reverse(key), a, b) = top;
            let k = (a, b);
            let exact = self.pairs[&k].exact;
            if !exact {
                let n = self.non_overlapping(k).len();
                let info = self.pairs.get_mut(&k).unwrap();
                self.queue.remove(&top);
                info.queued = None;
                if n >= 2 {
                    info.queued = Some(n);
                    info.exact = true;
                    self.queue.insert((Reverse(n), a, b));
                }
                continue;
            }
            debug_assert!(key >= 2);
            self.replace(k);
        }
        let mut out = Vec::with_capacity(self.heads.len());
        for h in &self.heads {
            let mut s = Vec::new();
            let mut i = h.unwrap_or(NONE);
            while i != NONE {
                s.push(self.sym[i as usize]);
                i = self.next[i as usize];
            }
            out.push(s);
        }
        (out, self.rules)
    }

    fn replace(&mut self, k: (u64, u64)) {
        let s = self.boundary + self.rules.len() as u64;
        self.rules.push(k);
        for i in self.non_overlapping(k) {
            // an earlier replacement in this pass may have consumed it
            if !self.is_occurrence(i, k) {
                continue;
            }
            let j = self.next[i as usize];
            let p = self.prev[i as usize];
            let n = self.next[j as usize];
            if p != NONE && pairable(self.sym[p as usize]) {
                self.drop_one((self.sym[p as usize], k.0));
            }
            if n != NONE && pairable(self.sym[n as usize]) {
                self.drop_one((k.1, self.sym[n as usize]));
            }
            self.sym[i as usize] = s;
            self.sym[j as usize] = DELETED;
            self.next[i as usize] = n;
            if n != NONE {
                self.prev[n as usize] = i;
            }
            if p != NONE && pairable(self.sym[p as usize]) {
                self.bump((self.sym[p as usize], s), p);
            }
            if n != NONE && pairable(self.sym[n as usize]) {
                self.bump((s, self.sym[n as usize]), i);
            }
        }
        if let Some(info) = self.pairs.remove(&k) {
            if let Some(q) = info.queued {
                self.queue.remove(&(Reverse(q), k.0, k.1));
            }
        }
    }
}

/// A rule with its enrichment, decoded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rule {
    pub left: u64,
    pub right: u64,
    pub span: u64,
    pub disp: Displacement,
    /// Relative box; always contains the origin and `disp`.
    pub mbr: Region,
}

fn zigzag(v: i64) -> u64 {
    ((v << 1) ^ (v >> 63)) as u64
}

fn unzigzag(v: u64) -> i64 {
    ((v >> 1) as i64) ^ -((v & 1) as i64)
}

/// Enriched rules stored with DACs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleDictionary {
    boundary: u64,
    /// `left_0, right_0, left_1, right_1, ...`
    pairs: PackedInts,
    spans: DacSequence,
    /// Per rule: `dx, dy, x1, y1, x2, y2`, zigzag-mapped.
    coords: DacSequence,
}

impl Default for RuleDictionary {
    fn default() -> Self {
        Self::enrich(MOVE_BASE, &[]).expect("empty dictionary")
    }
}

const COORDS_PER_RULE: usize = 6;

impl RuleDictionary {
    /// Computes spans, displacements and boxes bottom-up. Rules may only
    /// refer to terminals and to earlier rules.
    pub fn enrich(boundary: u64, pairs: &[(u64, u64)]) -> Result<Self> {
        if boundary < MOVE_BASE {
            return Err(Error::InvalidParam(format!("terminal boundary {boundary}")));
        }
        let mut rules: Vec<Rule> = Vec::with_capacity(pairs.len());
        let info = |s: u64, rules: &[Rule]| -> Result<(u64, Displacement, Region)> {
            if is_event(s) {
                return Err(Error::InvalidData(format!("event symbol {s} inside a rule")));
            }
            if s < boundary {
                let d = spiral::decode(s - MOVE_BASE);
                return Ok((1, d, Region::spanning(Point::default(), Point::default() + d)));
            }
            let r = rules
                .get((s - boundary) as usize)
                .ok_or_else(|| Error::InvalidData(format!("rule {s} used before definition")))?;
            Ok((r.span, r.disp, r.mbr))
        };
        for &(a, b) in pairs {
            let (sa, da, ma) = info(a, &rules)?;
            let (sb, db, mb) = info(b, &rules)?;
            rules.push(Rule {
                left: a,
                right: b,
                span: sa + sb,
                disp: da + db,
                mbr: ma.union(&mb.translate(da)),
            });
        }
        Ok(Self::from_rules(boundary, &rules))
    }

    fn from_rules(boundary: u64, rules: &[Rule]) -> Self {
        let flat: Vec<u64> = rules.iter().flat_map(|r| [r.left, r.right]).collect();
        let spans: Vec<u64> = rules.iter().map(|r| r.span).collect();
        let coords: Vec<u64> = rules
            .iter()
            .flat_map(|r| [r.disp.dx, r.disp.dy, r.mbr.x1, r.mbr.y1, r.mbr.x2, r.mbr.y2])
            .map(zigzag)
            .collect();
        Self {
            boundary,
            pairs: PackedInts::from_slice(&flat),
            spans: DacSequence::build(&spans, DacConfig::Optimal),
            coords: DacSequence::build(&coords, DacConfig::Optimal),
        }
    }

    pub fn boundary(&self) -> u64 {
        self.boundary
    }

    pub fn rule_count(&self) -> usize {
        self.spans.len()
    }

    pub fn is_rule(&self, s: u64) -> bool {
        s >= self.boundary
    }

    fn index(&self, s: u64) -> Result<usize> {
        let i = s.checked_sub(self.boundary).map(|i| i as usize);
        match i {
            Some(i) if i < self.rule_count() => Ok(i),
            _ => Err(Error::InvalidData(format!("symbol {s} is not a rule"))),
        }
    }

    /// Children of a rule symbol.
    pub fn children(&self, s: u64) -> Option<(u64, u64)> {
        let i = self.index(s).ok()?;
        Some((self.pairs.get(2 * i), self.pairs.get(2 * i + 1)))
    }

    /// Instants covered by a movement or rule symbol.
    pub fn span(&self, s: u64) -> u64 {
        if s < self.boundary {
            debug_assert!(!is_event(s));
            1
        } else {
            self.spans.get((s - self.boundary) as usize)
        }
    }

    fn coord(&self, i: usize, j: usize) -> i64 {
        unzigzag(self.coords.get(i * COORDS_PER_RULE + j))
    }

    pub fn disp(&self, s: u64) -> Displacement {
        if s < self.boundary {
            spiral::decode(s - MOVE_BASE)
        } else {
            let i = (s - self.boundary) as usize;
            Displacement::new(self.coord(i, 0), self.coord(i, 1))
        }
    }

    /// Box relative to the position where `s` starts.
    pub fn mbr(&self, s: u64) -> Region {
        if s < self.boundary {
            Region::spanning(Point::default(), Point::default() + self.disp(s))
        } else {
            let i = (s - self.boundary) as usize;
            Region::new(self.coord(i, 2), self.coord(i, 3), self.coord(i, 4), self.coord(i, 5))
        }
    }

    pub fn rule(&self, s: u64) -> Result<Rule> {
        let i = self.index(s)?;
        Ok(Rule {
            left: self.pairs.get(2 * i),
            right: self.pairs.get(2 * i + 1),
            span: self.spans.get(i),
            disp: self.disp(s),
            mbr: self.mbr(s),
        })
    }

    /// Spiral codes of the full expansion of a movement or rule symbol.
    pub fn expand(&self, s: u64) -> Result<Vec<u64>> {
        let mut out = Vec::new();
        self.expand_into(s, &mut out)?;
        Ok(out)
    }

    pub fn expand_into(&self, s: u64, out: &mut Vec<u64>) -> Result<()> {
        if is_event(s) {
            return Err(Error::InvalidData(format!("event symbol {s} has no expansion")));
        }
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            if x < self.boundary {
                out.push(x - MOVE_BASE);
            } else {
                let i = self.index(x)?;
                stack.push(self.pairs.get(2 * i + 1));
                stack.push(self.pairs.get(2 * i));
            }
        }
        Ok(())
    }

    /// Longest root-to-terminal path over all rules; 0 without rules.
    pub fn depth(&self) -> usize {
        let mut depth = vec![0usize; self.rule_count()];
        let d = |s: u64, depth: &[usize]| if s < self.boundary { 0 } else { depth[(s - self.boundary) as usize] };
        for i in 0..self.rule_count() {
            let (a, b) = (self.pairs.get(2 * i), self.pairs.get(2 * i + 1));
            depth[i] = 1 + d(a, &depth).max(d(b, &depth));
        }
        depth.into_iter().max().unwrap_or(0)
    }

    /// Bytes of the rule pairs alone.
    pub fn pair_bytes(&self) -> usize {
        self.pairs.size_in_bytes()
    }

    pub fn size_in_bytes(&self) -> usize {
        8 + self.pairs.size_in_bytes() + self.spans.size_in_bytes() + self.coords.size_in_bytes()
    }

    pub fn write_to(&self, w: &mut ByteWriter) {
        w.put_u64(self.boundary);
        self.pairs.write_to(w);
        self.spans.write_to(w);
        self.coords.write_to(w);
    }

    pub fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        let boundary = r.u64("terminal boundary")?;
        let pairs = PackedInts::read_from(r)?;
        let spans = DacSequence::read_from(r)?;
        let coords = DacSequence::read_from(r)?;
        let n = spans.len();
        if boundary < MOVE_BASE || pairs.len() != 2 * n || coords.len() != COORDS_PER_RULE * n {
            return Err(Error::Corrupt("rule dictionary layout".into()));
        }
        for i in 0..n {
            let limit = boundary + i as u64;
            for j in 0..2 {
                let c = pairs.get(2 * i + j);
                if is_event(c) || c >= limit {
                    return Err(Error::Corrupt(format!("rule {i} refers to symbol {c}")));
                }
            }
        }
        Ok(Self {
            boundary,
            pairs,
            spans,
            coords,
        })
    }
}
