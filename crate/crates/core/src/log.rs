//! Per-object movement logs between consecutive snapshots.
//!
//! Portion `h` covers instants `(h·d, (h+1)·d]` and starts from the object's
//! state in snapshot `h`. Each instant the object is seen after being seen
//! the instant before costs one movement symbol. Other transitions become
//! event codewords whose payload lives in two side arrays:
//!
//! | event | meaning                                   | times entry       | positions entries |
//! |-------|-------------------------------------------|-------------------|-------------------|
//! | AA    | first appearance in the portion           | instant           | `x`, `y`          |
//! | RM    | reappears after a gap, moved              | missing instants  | spiral shift      |
//! | RNM   | reappears after a gap, same cell          | missing instants  | none              |
//! | D     | not seen again before the next snapshot   | last seen instant | `x`, `y`          |
//!
//! A reappearance accounts for the missing instants and the instant of
//! reappearance. A disappearance accounts for no time.

use crate::bytes::{ByteReader, ByteWriter};
use crate::dataset::Trajectory;
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::grammar::{self, repair_compress, Event, RuleDictionary, MOVE_BASE};
use crate::spiral::{self, Displacement};
use crate::succinct::{DacConfig, DacSequence, PackedInts};

/// One portion log before grammar compression.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawLog {
    pub symbols: Vec<u64>,
    pub times: Vec<u64>,
    pub positions: Vec<u64>,
}

impl RawLog {
    pub fn starts_with_appearance(&self) -> bool {
        self.symbols.first() == Some(&grammar::EVENT_AA)
    }

    pub fn ends_with_vanish(&self) -> bool {
        self.symbols.last() == Some(&grammar::EVENT_D)
    }
}

/// Encodes instants `(start, end]` of `tr`, given its state at `start`.
pub fn encode_portion(tr: &Trajectory, start: u64, end: u64, radius_bound: u64) -> Result<RawLog> {
    let mut log = RawLog::default();
    let mut last = tr.position(start).map(|p| (start, p));
    let coord = |v: i64| v as u64;
    for t in start + 1..=end {
        let Some(p) = tr.position(t) else { continue };
        match last {
            Some((lt, lp)) if lt + 1 == t => {
                let code = spiral::encode_bounded(lp.offset_to(p), radius_bound)?;
                log.symbols.push(grammar::move_symbol(code));
            }
            None => {
                log.symbols.push(grammar::EVENT_AA);
                log.times.push(t);
                log.positions.extend([coord(p.x), coord(p.y)]);
            }
            Some((lt, lp)) => {
                log.times.push(t - lt - 1);
                if lp == p {
                    log.symbols.push(grammar::EVENT_RNM);
                } else {
                    log.symbols.push(grammar::EVENT_RM);
                    log.positions.push(spiral::encode_bounded(lp.offset_to(p), radius_bound)?);
                }
            }
        }
        last = Some((t, p));
    }
    if let Some((lt, lp)) = last {
        if lt < end {
            log.symbols.push(grammar::EVENT_D);
            log.times.push(lt);
            log.positions.extend([coord(lp.x), coord(lp.y)]);
        }
    }
    Ok(log)
}

/// A decoded log element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Token {
    /// Movement or rule symbol.
    Sym(u64),
    /// First seen at `t` in `pos`.
    Appear { t: u64, pos: Point },
    /// Unseen for `missing` instants, then seen shifted by `shift`.
    Gap { missing: u64, shift: Displacement },
    /// Last seen at `t` in `pos`; unseen through the end of the portion.
    Vanish { t: u64, pos: Point },
}

/// All portion logs, grammar-compressed, with their side arrays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogStore {
    objects: usize,
    portions: usize,
    stream: DacSequence,
    /// Offsets per `h · objects + o`, one trailing sentinel.
    stream_start: PackedInts,
    event_start: PackedInts,
    pos_start: PackedInts,
    times: DacSequence,
    positions: DacSequence,
}

impl LogStore {
    /// Compresses `raw` (indexed `h · objects + o`) with one shared grammar.
    pub fn build(raw: &[RawLog], objects: usize, portions: usize) -> Result<(LogStore, RuleDictionary)> {
        if raw.len() != objects * portions {
            return Err(Error::InvalidParam("one raw log per object and portion".into()));
        }
        let boundary = raw
            .iter()
            .flat_map(|l| l.symbols.iter())
            .max()
            .map_or(MOVE_BASE, |&m| (m + 1).max(MOVE_BASE));
        let streams: Vec<Vec<u64>> = raw.iter().map(|l| l.symbols.clone()).collect();
        let (compressed, rules) = repair_compress(&streams, boundary);
        let dict = RuleDictionary::enrich(boundary, &rules)?;

        let mut stream = Vec::new();
        let (mut ss, mut es, mut ps) = (vec![0u64], vec![0u64], vec![0u64]);
        let (mut times, mut positions) = (Vec::new(), Vec::new());
        for (c, l) in compressed.iter().zip(raw) {
            stream.extend_from_slice(c);
            times.extend_from_slice(&l.times);
            positions.extend_from_slice(&l.positions);
            ss.push(stream.len() as u64);
            es.push(times.len() as u64);
            ps.push(positions.len() as u64);
        }
        Ok((
            LogStore {
                objects,
                portions,
                stream: DacSequence::build(&stream, DacConfig::Optimal),
                stream_start: PackedInts::from_slice(&ss),
                event_start: PackedInts::from_slice(&es),
                pos_start: PackedInts::from_slice(&ps),
                times: DacSequence::build(&times, DacConfig::BYTE_TWO_LEVELS),
                positions: DacSequence::build(&positions, DacConfig::BYTE_TWO_LEVELS),
            },
            dict,
        ))
    }

    pub fn objects(&self) -> usize {
        self.objects
    }

    pub fn portions(&self) -> usize {
        self.portions
    }

    fn slot(&self, h: usize, o: usize) -> usize {
        assert!(h < self.portions && o < self.objects, "log ({h}, {o}) out of range");
        h * self.objects + o
    }

    /// Compressed symbols of log `(h, o)`, events included.
    pub fn symbols(&self, h: usize, o: usize) -> Vec<u64> {
        let i = self.slot(h, o);
        let (a, b) = (self.stream_start.get(i) as usize, self.stream_start.get(i + 1) as usize);
        (a..b).map(|j| self.stream.get(j)).collect()
    }

    pub fn symbol_count(&self, h: usize, o: usize) -> usize {
        let i = self.slot(h, o);
        (self.stream_start.get(i + 1) - self.stream_start.get(i)) as usize
    }

    pub fn is_empty(&self, h: usize, o: usize) -> bool {
        self.symbol_count(h, o) == 0
    }

    pub fn event_count(&self, h: usize, o: usize) -> usize {
        let i = self.slot(h, o);
        (self.event_start.get(i + 1) - self.event_start.get(i)) as usize
    }

    fn point_at(&self, p: usize) -> Point {
        Point::new(self.positions.get(p) as i64, self.positions.get(p + 1) as i64)
    }

    /// Decoding cursor over log `(h, o)`, usable from either end.
    pub fn tokens(&self, h: usize, o: usize) -> Tokens<'_> {
        let i = self.slot(h, o);
        Tokens {
            store: self,
            front: self.stream_start.get(i) as usize,
            back: self.stream_start.get(i + 1) as usize,
            event_front: self.event_start.get(i) as usize,
            event_back: self.event_start.get(i + 1) as usize,
            pos_front: self.pos_start.get(i) as usize,
            pos_back: self.pos_start.get(i + 1) as usize,
        }
    }

    /// Instant and cell of the leading appearance, if the log starts with one.
    pub fn appearance(&self, h: usize, o: usize) -> Option<(u64, Point)> {
        let i = self.slot(h, o);
        let a = self.stream_start.get(i) as usize;
        if a == self.stream_start.get(i + 1) as usize || self.stream.get(a) != grammar::EVENT_AA {
            return None;
        }
        let e = self.event_start.get(i) as usize;
        let p = self.pos_start.get(i) as usize;
        Some((self.times.get(e), self.point_at(p)))
    }

    /// Last seen instant and cell, if the log ends with a disappearance.
    pub fn vanishing(&self, h: usize, o: usize) -> Option<(u64, Point)> {
        let i = self.slot(h, o);
        let b = self.stream_start.get(i + 1) as usize;
        if b == self.stream_start.get(i) as usize || self.stream.get(b - 1) != grammar::EVENT_D {
            return None;
        }
        let e = self.event_start.get(i + 1) as usize;
        let p = self.pos_start.get(i + 1) as usize;
        Some((self.times.get(e - 1), self.point_at(p - 2)))
    }

    /// Checks that every symbol is known to `dict` and that each log owns
    /// exactly the side-array entries its events need.
    pub fn validate(&self, dict: &RuleDictionary) -> Result<()> {
        let limit = dict.boundary() + dict.rule_count() as u64;
        for i in 0..self.objects * self.portions {
            let (a, b) = (self.stream_start.get(i) as usize, self.stream_start.get(i + 1) as usize);
            let (mut events, mut entries) = (0u64, 0u64);
            for j in a..b {
                let s = self.stream.get(j);
                if s >= limit {
                    return Err(Error::Corrupt(format!("log symbol {s} unknown")));
                }
                if let Some(ev) = Event::from_symbol(s) {
                    events += 1;
                    entries += ev.position_entries() as u64;
                }
            }
            if self.event_start.get(i + 1) - self.event_start.get(i) != events
                || self.pos_start.get(i + 1) - self.pos_start.get(i) != entries
            {
                return Err(Error::Corrupt(format!("log {i} side arrays misaligned")));
            }
        }
        Ok(())
    }

    /// Total compressed symbols over all logs.
    pub fn total_symbols(&self) -> usize {
        self.stream.len()
    }

    pub fn stream_bytes(&self) -> usize {
        self.stream.size_in_bytes()
    }

    pub fn offset_bytes(&self) -> usize {
        self.stream_start.size_in_bytes() + self.event_start.size_in_bytes() + self.pos_start.size_in_bytes()
    }

    pub fn side_array_bytes(&self) -> usize {
        self.times.size_in_bytes() + self.positions.size_in_bytes()
    }

    pub fn size_in_bytes(&self) -> usize {
        16 + self.stream_bytes() + self.offset_bytes() + self.side_array_bytes()
    }

    pub fn write_to(&self, w: &mut ByteWriter) {
        w.put_u64(self.objects as u64);
        w.put_u64(self.portions as u64);
        self.stream.write_to(w);
        self.stream_start.write_to(w);
        self.event_start.write_to(w);
        self.pos_start.write_to(w);
        self.times.write_to(w);
        self.positions.write_to(w);
    }

    pub fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        let objects = r.u64("log object count")? as usize;
        let portions = r.u64("log portion count")? as usize;
        let store = LogStore {
            objects,
            portions,
            stream: DacSequence::read_from(r)?,
            stream_start: PackedInts::read_from(r)?,
            event_start: PackedInts::read_from(r)?,
            pos_start: PackedInts::read_from(r)?,
            times: DacSequence::read_from(r)?,
            positions: DacSequence::read_from(r)?,
        };
        let slots = objects
            .checked_mul(portions)
            .and_then(|s| s.checked_add(1))
            .ok_or_else(|| Error::Corrupt("log dimensions".into()))?;
        let offsets_ok = |a: &PackedInts, total: usize| {
            a.len() == slots && a.get(0) == 0 && a.get(slots - 1) as usize == total && a.iter().is_sorted()
        };
        if !offsets_ok(&store.stream_start, store.stream.len())
            || !offsets_ok(&store.event_start, store.times.len())
            || !offsets_ok(&store.pos_start, store.positions.len())
        {
            return Err(Error::Corrupt("log offsets".into()));
        }
        Ok(store)
    }
}

/// Lazily decoded tokens of one log.
#[derive(Debug, Clone)]
pub struct Tokens<'a> {
    store: &'a LogStore,
    front: usize,
    back: usize,
    event_front: usize,
    event_back: usize,
    pos_front: usize,
    pos_back: usize,
}

impl Tokens<'_> {
    fn decode(&self, s: u64, event: usize, pos: usize) -> Token {
        let store = self.store;
        match Event::from_symbol(s) {
            None => Token::Sym(s),
            Some(ev) => {
                let d = store.times.get(event);
                match ev {
                    Event::Appear => Token::Appear { t: d, pos: store.point_at(pos) },
                    Event::Vanish => Token::Vanish { t: d, pos: store.point_at(pos) },
                    Event::ReappearSame => Token::Gap {
                        missing: d,
                        shift: Displacement::ZERO,
                    },
                    Event::ReappearMoved => Token::Gap {
                        missing: d,
                        shift: spiral::decode(store.positions.get(pos)),
                    },
                }
            }
        }
    }
}

impl Iterator for Tokens<'_> {
    type Item = Token;

    fn next(&mut self) -> Option<Token> {
        if self.front == self.back {
            return None;
        }
        let s = self.store.stream.get(self.front);
        self.front += 1;
        let tok = self.decode(s, self.event_front, self.pos_front);
        if let Some(ev) = Event::from_symbol(s) {
            self.event_front += 1;
            self.pos_front += ev.position_entries();
        }
        Some(tok)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.back - self.front, Some(self.back - self.front))
    }
}

impl DoubleEndedIterator for Tokens<'_> {
    fn next_back(&mut self) -> Option<Token> {
        if self.front == self.back {
            return None;
        }
        self.back -= 1;
        let s = self.store.stream.get(self.back);
        if let Some(ev) = Event::from_symbol(s) {
            self.event_back -= 1;
            self.pos_back -= ev.position_entries();
        }
        Some(self.decode(s, self.event_back, self.pos_back))
    }
}

impl ExactSizeIterator for Tokens<'_> {}

/// Applies `s` from `(t_c, p_c)` but stops at `t_e`: the whole symbol when it
/// fits, otherwise a descent that applies as much as fits. Unapplied parts
/// are pushed onto `rest` so that popping yields them in order.
pub fn advance_resumable(
    dict: &RuleDictionary,
    p_c: Point,
    t_c: u64,
    t_e: u64,
    s: u64,
    rest: &mut Vec<u64>,
) -> (u64, Point) {
    debug_assert!(t_c <= t_e && !grammar::is_event(s));
    let (mut t, mut p) = (t_c, p_c);
    let mut stack = vec![s];
    while let Some(x) = stack.pop() {
        if t == t_e {
            stack.push(x);
            break;
        }
        let span = dict.span(x);
        if t + span <= t_e {
            t += span;
            p = p + dict.disp(x);
        } else {
            let (a, b) = dict.children(x).expect("a terminal always fits");
            stack.push(b);
            stack.push(a);
        }
    }
    // the work stack holds the unapplied suffix with its next symbol on top
    rest.extend_from_slice(&stack);
    (t, p)
}

/// Position after `s`, or at `t_e` when `s` runs past it.
pub fn advance(dict: &RuleDictionary, p_c: Point, t_c: u64, t_e: u64, s: u64) -> (u64, Point) {
    let span = dict.span(s);
    if t_c + span <= t_e {
        return (t_c + span, p_c + dict.disp(s));
    }
    advance_resumable(dict, p_c, t_c, t_e, s, &mut Vec::new())
}

/// Undoes `s`, which ends at `(t_c, p_c)`, but not past `t_floor`.
pub fn retreat(dict: &RuleDictionary, p_c: Point, t_floor: u64, t_c: u64, s: u64) -> (u64, Point) {
    debug_assert!(t_floor <= t_c && !grammar::is_event(s));
    let span = dict.span(s);
    if t_c >= t_floor + span {
        return (t_c - span, p_c - dict.disp(s));
    }
    let (mut t, mut p) = (t_c, p_c);
    let mut stack = vec![s];
    while let Some(x) = stack.pop() {
        if t == t_floor {
            break;
        }
        let span = dict.span(x);
        if t >= t_floor + span {
            t -= span;
            p = p - dict.disp(x);
        } else {
            let (a, b) = dict.children(x).expect("a terminal always fits");
            stack.push(a);
            stack.push(b);
        }
    }
    (t, p)
}

/// Every `(instant, cell)` produced by `s` up to `t_e`.
pub fn trace(dict: &RuleDictionary, p_c: Point, t_c: u64, t_e: u64, s: u64) -> Vec<(u64, Point)> {
    let mut out = Vec::new();
    let (mut t, mut p) = (t_c, p_c);
    let mut stack = vec![s];
    while let Some(x) = stack.pop() {
        if t >= t_e {
            break;
        }
        if x < dict.boundary() {
            t += 1;
            p = p + spiral::decode(x - MOVE_BASE);
            out.push((t, p));
        } else {
            let (a, b) = dict.children(x).expect("rule symbol");
            stack.push(b);
            stack.push(a);
        }
    }
    out
}
