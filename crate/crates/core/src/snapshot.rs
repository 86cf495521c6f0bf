//! Absolute positions of every present object at one instant.
//!
//! Occupied cells go in a k²-tree. Objects are listed grouped by cell in
//! leaf order; `perm` maps a list position to the object's rank among the
//! present objects, and `Q` marks list positions whose successor sits in the
//! same cell with a 1 and the last object of each cell with a 0. So the
//! `ℓ`-th occupied cell owns the list positions after the `(ℓ-1)`-th 0 of
//! `Q` up to and including the `ℓ`-th.

use crate::bytes::{ByteReader, ByteWriter};
use crate::error::{Error, Result};
use crate::geom::{Point, Region};
use crate::k2tree::{K2Tree, NodesByDistance};
use crate::succinct::{BitVector, BitVectorBuilder, Permutation, DEFAULT_SAMPLE_RATE};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    time: u64,
    tree: K2Tree,
    /// Bit `o` set when object `o` is present.
    present: BitVector,
    perm: Permutation,
    q: BitVector,
    app: Vec<u32>,
    dis: Vec<u32>,
}

impl Snapshot {
    /// `positions` holds `(object, cell)` for the present objects, indexed
    /// densely in `0..objects`. `app` and `dis` are object indices.
    pub fn build(
        time: u64,
        positions: &[(u32, Point)],
        objects: usize,
        side: u64,
        k: u32,
        mut app: Vec<u32>,
        mut dis: Vec<u32>,
    ) -> Result<Self> {
        let mut present = BitVectorBuilder::with_len(objects);
        let mut seen = vec![false; objects];
        for &(o, _) in positions {
            let slot = seen
                .get_mut(o as usize)
                .ok_or_else(|| Error::InvalidParam(format!("object index {o} out of range")))?;
            if std::mem::replace(slot, true) {
                return Err(Error::DuplicateObject(o));
            }
            present.set(o as usize, true);
        }
        let present = present.build();
        let cells: Vec<Point> = positions.iter().map(|&(_, p)| p).collect();
        let tree = K2Tree::build(&cells, side, k)?;

        let mut order: Vec<(usize, u32)> = positions
            .iter()
            .map(|&(o, p)| Ok((tree.cell(p.x, p.y)?.expect("cell was inserted"), o)))
            .collect::<Result<_>>()?;
        order.sort_unstable();
        let perm_vals: Vec<u64> = order.iter().map(|&(_, o)| present.rank1(o as usize + 1) as u64).collect();
        let q: BitVector = (0..order.len())
            .map(|i| i + 1 < order.len() && order[i + 1].0 == order[i].0)
            .collect();
        let perm = Permutation::new(&perm_vals, DEFAULT_SAMPLE_RATE)?;
        app.sort_unstable();
        app.dedup();
        dis.sort_unstable();
        dis.dedup();
        if let Some(&o) = app.iter().find(|&&o| (o as usize) < objects && present.get(o as usize)) {
            return Err(Error::InvalidData(format!("object {o} both present and appearing")));
        }
        Ok(Self {
            time,
            tree,
            present,
            perm,
            q,
            app,
            dis,
        })
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn tree(&self) -> &K2Tree {
        &self.tree
    }

    /// Size of the object index space.
    pub fn object_slots(&self) -> usize {
        self.present.len()
    }

    pub fn present_count(&self) -> usize {
        self.present.count_ones()
    }

    pub fn is_present(&self, o: u32) -> bool {
        (o as usize) < self.present.len() && self.present.get(o as usize)
    }

    /// Objects absent here that appear before the next snapshot.
    pub fn app(&self) -> &[u32] {
        &self.app
    }

    /// Objects absent here whose previous log ends with a disappearance.
    pub fn dis(&self) -> &[u32] {
        &self.dis
    }

    pub fn in_app(&self, o: u32) -> bool {
        self.app.binary_search(&o).is_ok()
    }

    pub fn in_dis(&self, o: u32) -> bool {
        self.dis.binary_search(&o).is_ok()
    }

    /// Cell of object `o`, or `None` when absent.
    pub fn find_object(&self, o: u32) -> Option<Point> {
        if !self.is_present(o) {
            return None;
        }
        let local = self.present.rank1(o as usize + 1);
        let k = self.perm.preimage(local).expect("present object is listed");
        let leaf = self.q.rank0(k - 1) + 1;
        Some(self.tree.locate(leaf).expect("group has a cell"))
    }

    /// Objects listed for the `leaf`-th occupied cell, in group order.
    fn group(&self, leaf: usize, out: &mut Vec<u32>) {
        let mut p = if leaf == 1 {
            1
        } else {
            self.q.select0(leaf - 1).expect("cell has a group") + 1
        };
        loop {
            let local = self.perm.image(p).expect("position in range");
            out.push((self.present.select1(local).expect("local rank in range") - 1) as u32);
            if !self.q.get(p - 1) {
                break;
            }
            p += 1;
        }
    }

    pub fn objects_in_cell(&self, x: i64, y: i64) -> Vec<u32> {
        let mut out = Vec::new();
        if x < 0 || y < 0 || x as u64 >= self.tree.side() || y as u64 >= self.tree.side() {
            return out;
        }
        if let Ok(Some(leaf)) = self.tree.cell(x, y) {
            self.group(leaf, &mut out);
        }
        out
    }

    /// `(object, cell)` for every object inside `region`, in leaf then group order.
    pub fn objects_in_region(&self, region: &Region) -> Vec<(u32, Point)> {
        let mut out = Vec::new();
        let mut buf = Vec::new();
        for (cell, leaf) in self.tree.range(region) {
            buf.clear();
            self.group(leaf, &mut buf);
            out.extend(buf.iter().map(|&o| (o, cell)));
        }
        out
    }

    /// Present objects by non-decreasing distance from `q`.
    pub fn candidates_by_distance(&self, q: Point) -> CandidatesByDistance<'_> {
        CandidatesByDistance {
            snap: self,
            nodes: self.tree.nodes_by_distance(q),
            pending: Vec::new(),
            cell: Point::default(),
            dist2: 0,
        }
    }

    pub fn tree_bytes(&self) -> usize {
        self.tree.size_in_bytes()
    }

    pub fn size_in_bytes(&self) -> usize {
        8 + self.tree.size_in_bytes()
            + self.present.size_in_bytes()
            + self.perm.size_in_bytes()
            + self.q.size_in_bytes()
            + 8
            + 4 * self.app.len()
            + 8
            + 4 * self.dis.len()
    }

    pub fn write_to(&self, w: &mut ByteWriter) {
        w.put_u64(self.time);
        self.tree.write_to(w);
        self.present.write_to(w);
        self.perm.write_to(w);
        self.q.write_to(w);
        w.put_u32s(&self.app);
        w.put_u32s(&self.dis);
    }

    pub fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        let s = Snapshot {
            time: r.u64("snapshot time")?,
            tree: K2Tree::read_from(r)?,
            present: BitVector::read_from(r)?,
            perm: Permutation::read_from(r)?,
            q: BitVector::read_from(r)?,
            app: r.u32s("appearing objects")?,
            dis: r.u32s("vanished objects")?,
        };
        let n = s.present.count_ones();
        let sorted = |v: &[u32]| v.windows(2).all(|w| w[0] < w[1]) && v.iter().all(|&o| (o as usize) < s.present.len());
        if s.perm.len() != n || s.q.len() != n || s.q.count_zeros() != s.tree.count() || !sorted(&s.app) || !sorted(&s.dis) {
            return Err(Error::Corrupt("snapshot layout".into()));
        }
        Ok(s)
    }
}

/// Stream over the present objects of a snapshot, nearest first. Objects in
/// one cell come out in group order; equally distant cells in leaf order.
pub struct CandidatesByDistance<'a> {
    snap: &'a Snapshot,
    nodes: NodesByDistance<'a>,
    /// Remaining objects of the current cell, next one last.
    pending: Vec<u32>,
    cell: Point,
    dist2: u64,
}

impl Iterator for CandidatesByDistance<'_> {
    /// `(object, cell, squared distance)`
    type Item = (u32, Point, u64);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(o) = self.pending.pop() {
                return Some((o, self.cell, self.dist2));
            }
            let item = self.nodes.next()?;
            if let Some(leaf) = item.leaf {
                self.snap.group(leaf, &mut self.pending);
                self.pending.reverse();
                self.cell = Point::new(item.region.x1, item.region.y1);
                self.dist2 = item.dist2;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::dist2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    #[test]
    fn single_and_shared_cells() {
        let s = Snapshot::build(0, &[(0, Point::new(0, 0))], 1, 4, 2, vec![], vec![]).unwrap();
        assert_eq!(s.q, BitVector::from_bit_str("0"));
        assert_eq!(s.find_object(0), Some(Point::new(0, 0)));

        let s = Snapshot::build(8, &[(1, Point::new(9, 5)), (0, Point::new(9, 5))], 2, 16, 2, vec![], vec![]).unwrap();
        assert_eq!(s.q, BitVector::from_bit_str("10"));
        assert_eq!(s.objects_in_cell(9, 5), vec![0, 1]);
        assert!(s.objects_in_cell(3, 3).is_empty());
        assert!(s.objects_in_cell(-1, 3).is_empty());
    }

    #[test]
    fn rejects_duplicates_and_conflicts() {
        let p = Point::new(1, 1);
        assert!(Snapshot::build(0, &[(0, p), (0, p)], 2, 4, 2, vec![], vec![]).is_err());
        assert!(Snapshot::build(0, &[(0, p)], 2, 4, 2, vec![0], vec![]).is_err());
        assert!(Snapshot::build(0, &[(5, p)], 2, 4, 2, vec![], vec![]).is_err());
    }

    #[test]
    fn matches_position_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (n, side) in [(300usize, 64u64), (2000, 1024), (50, 8)] {
            let mut map = BTreeMap::new();
            let mut pos = Vec::new();
            for o in 0..n as u32 {
                if rng.gen_bool(0.8) {
                    let p = Point::new(rng.gen_range(0..side as i64), rng.gen_range(0..side as i64));
                    map.insert(o, p);
                    pos.push((o, p));
                }
            }
            let s = Snapshot::build(0, &pos, n, side, 2, vec![], vec![]).unwrap();
            for o in 0..n as u32 {
                assert_eq!(s.find_object(o), map.get(&o).copied());
            }
            for _ in 0..40 {
                let r = Region::new(
                    rng.gen_range(0..side as i64),
                    rng.gen_range(0..side as i64),
                    rng.gen_range(0..side as i64),
                    rng.gen_range(0..side as i64),
                );
                let mut got = s.objects_in_region(&r);
                got.sort();
                let want: Vec<(u32, Point)> = map.iter().filter(|(_, p)| r.contains(**p)).map(|(&o, &p)| (o, p)).collect();
                assert_eq!(got, want);
                let c = Point::new(r.x1, r.y1);
                let mut got = s.objects_in_cell(c.x, c.y);
                got.sort();
                let want: Vec<u32> = map.iter().filter(|(_, p)| **p == c).map(|(&o, _)| o).collect();
                assert_eq!(got, want);
            }
            let q = Point::new(rng.gen_range(0..side as i64), rng.gen_range(0..side as i64));
            let stream: Vec<(u32, Point, u64)> = s.candidates_by_distance(q).collect();
            assert_eq!(stream.len(), map.len());
            assert!(stream.windows(2).all(|w| w[0].2 <= w[1].2));
            for (o, p, d) in stream {
                assert_eq!(map[&o], p);
                assert_eq!(dist2(q, p), d);
            }
        }
    }

    #[test]
    fn serialization_round_trip() {
        let pos = [(0, Point::new(3, 4)), (2, Point::new(3, 4)), (3, Point::new(0, 7))];
        let s = Snapshot::build(16, &pos, 5, 8, 2, vec![1], vec![4]).unwrap();
        let mut w = ByteWriter::new();
        s.write_to(&mut w);
        assert_eq!(w.len(), s.size_in_bytes());
        let bytes = w.into_inner();
        let back = Snapshot::read_from(&mut ByteReader::new(&bytes)).unwrap();
        assert_eq!(back, s);
        assert!(back.in_app(1) && back.in_dis(4) && !back.in_app(4));
    }
}
