//! Static k²-tree over a binary cell matrix.
//!
//! The matrix is split into `k × k` blocks recursively. Every node is one
//! bit, set when its submatrix holds at least one occupied cell; bits of the
//! internal levels go to `T` and the cell level to `L`, both in level order.
//! Within a block children are numbered row-major from the north-west
//! corner, so child `r·k + c` covers column band `c` (west to east) and row
//! band `r` counted from the top, where the top is the largest `y`.
//!
//! Children of the set bit at global position `p` start at
//! `rank1(T, p + 1) · k²`; the root's children start at 0. Leaf ranks are
//! 1-based ordinals among the set bits of `L`, which is also Z-order.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::bytes::{ByteReader, ByteWriter};
use crate::error::{Error, Result};
use crate::geom::{dist2_region, Point, Region};
use crate::succinct::{BitVector, BitVectorBuilder};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct K2Tree {
    k: u32,
    side: u64,
    height: u32,
    t: BitVector,
    l: BitVector,
}

/// Smallest power of `k` that is at least `max(extent, k)`, with its exponent.
fn padded_side(extent: u64, k: u32) -> Result<(u64, u32)> {
    let mut side = k as u64;
    let mut height = 1;
    while side < extent {
        side = side
            .checked_mul(k as u64)
            .ok_or_else(|| Error::InvalidParam(format!("grid extent {extent} too large")))?;
        height += 1;
    }
    Ok((side, height))
}

#[derive(Debug, Clone, Copy)]
struct Node {
    /// Global position in `T:L`; `None` for the root.
    pos: Option<usize>,
    x0: i64,
    y0: i64,
    size: u64,
    depth: u32,
}

impl Node {
    fn region(&self) -> Region {
        let s = self.size as i64;
        Region::new(self.x0, self.y0, self.x0 + s - 1, self.y0 + s - 1)
    }
}

impl K2Tree {
    /// Builds over the occupied `points` of an `extent × extent` grid.
    /// Duplicate points are merged.
    pub fn build(points: &[Point], extent: u64, k: u32) -> Result<Self> {
        if !(2..=1 << 15).contains(&k) {
            return Err(Error::InvalidParam(format!("arity {k} must be in 2..=32768")));
        }
        let (side, height) = padded_side(extent.max(1), k)?;
        for p in points {
            if p.x < 0 || p.y < 0 || p.x as u64 >= extent || p.y as u64 >= extent {
                return Err(Error::OffGrid { x: p.x, y: p.y, side: extent });
            }
        }
        let mut t = BitVectorBuilder::new();
        let mut l = BitVectorBuilder::new();
        if !points.is_empty() {
            let k = k as i64;
            let mut level: Vec<(i64, i64, Vec<Point>)> = vec![(0, 0, points.to_vec())];
            let mut size = side as i64;
            for depth in 0..height {
                let sub = size / k;
                let last = depth + 1 == height;
                let mut next = Vec::new();
                for (x0, y0, pts) in level {
                    let mut buckets: Vec<Vec<Point>> = vec![Vec::new(); (k * k) as usize];
                    for p in pts {
                        let c = (p.x - x0) / sub;
                        let r = k - 1 - (p.y - y0) / sub;
                        buckets[(r * k + c) as usize].push(p);
                    }
                    for (idx, bucket) in buckets.into_iter().enumerate() {
                        let bit = !bucket.is_empty();
                        if last {
                            l.push(bit);
                        } else {
                            t.push(bit);
                            if bit {
                                let (r, c) = (idx as i64 / k, idx as i64 % k);
                                next.push((x0 + c * sub, y0 + (k - 1 - r) * sub, bucket));
                            }
                        }
                    }
                }
                level = next;
                size = sub;
            }
        }
        Ok(Self {
            k,
            side,
            height,
            t: t.build(),
            l: l.build(),
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Padded side, a power of `k`.
    pub fn side(&self) -> u64 {
        self.side
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn internal_bits(&self) -> &BitVector {
        &self.t
    }

    pub fn leaf_bits(&self) -> &BitVector {
        &self.l
    }

    /// Number of occupied cells.
    pub fn count(&self) -> usize {
        self.l.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.l.count_ones() == 0
    }

    fn k2(&self) -> usize {
        (self.k * self.k) as usize
    }

    fn bit(&self, g: usize) -> bool {
        let tl = self.t.len();
        if g < tl {
            self.t.get(g)
        } else {
            self.l.get(g - tl)
        }
    }

    fn root(&self) -> Node {
        Node {
            pos: None,
            x0: 0,
            y0: 0,
            size: self.side,
            depth: 0,
        }
    }

    fn first_child(&self, node: &Node) -> usize {
        match node.pos {
            None => 0,
            Some(p) => self.t.rank1(p + 1) * self.k2(),
        }
    }

    /// Calls `f(child_index, child)` for every nonempty child, in order.
    fn for_children(&self, node: &Node, mut f: impl FnMut(usize, Node)) {
        if self.is_empty() || node.depth == self.height {
            return;
        }
        let base = self.first_child(node);
        let k = self.k as usize;
        let sub = node.size / self.k as u64;
        for idx in 0..self.k2() {
            if self.bit(base + idx) {
                let (r, c) = ((idx / k) as i64, (idx % k) as i64);
                f(
                    idx,
                    Node {
                        pos: Some(base + idx),
                        x0: node.x0 + c * sub as i64,
                        y0: node.y0 + (k as i64 - 1 - r) * sub as i64,
                        size: sub,
                        depth: node.depth + 1,
                    },
                );
            }
        }
    }

    fn leaf_rank(&self, node: &Node) -> usize {
        let g = node.pos.expect("leaf has a position");
        self.l.rank1(g - self.t.len() + 1)
    }

    fn check_cell(&self, x: i64, y: i64) -> Result<()> {
        if x < 0 || y < 0 || x as u64 >= self.side || y as u64 >= self.side {
            return Err(Error::OffGrid { x, y, side: self.side });
        }
        Ok(())
    }

    /// Leaf rank of cell `(x, y)` when occupied.
    pub fn cell(&self, x: i64, y: i64) -> Result<Option<usize>> {
        self.check_cell(x, y)?;
        if self.is_empty() {
            return Ok(None);
        }
        let k = self.k as i64;
        let (mut base, mut size) = (0usize, self.side as i64);
        let (mut x0, mut y0) = (0i64, 0i64);
        for depth in 0..self.height {
            let sub = size / k;
            let c = (x - x0) / sub;
            let r = k - 1 - (y - y0) / sub;
            let g = base + (r * k + c) as usize;
            if !self.bit(g) {
                return Ok(None);
            }
            if depth + 1 == self.height {
                return Ok(Some(self.l.rank1(g - self.t.len() + 1)));
            }
            base = self.t.rank1(g + 1) * self.k2();
            x0 += c * sub;
            y0 += (k - 1 - r) * sub;
            size = sub;
        }
        unreachable!("descent ends at the leaf level")
    }

    /// Occupied cells inside `region` with their leaf ranks, in leaf order.
    pub fn range(&self, region: &Region) -> Vec<(Point, usize)> {
        let mut out = Vec::new();
        let Some(region) = region.clip(self.side) else {
            return out;
        };
        if self.is_empty() {
            return out;
        }
        let mut stack = vec![self.root()];
        let mut kids = Vec::with_capacity(self.k2());
        while let Some(node) = stack.pop() {
            if node.depth == self.height {
                out.push((Point::new(node.x0, node.y0), self.leaf_rank(&node)));
                continue;
            }
            kids.clear();
            self.for_children(&node, |_, c| {
                if c.region().intersects(&region) {
                    kids.push(c);
                }
            });
            stack.extend(kids.iter().rev());
        }
        out
    }

    /// Cell of the `rank`-th occupied leaf, by walking up to the root.
    pub fn locate(&self, rank: usize) -> Result<Point> {
        let q = self.l.select1(rank).ok_or(Error::NotFound { nth: rank })? - 1;
        let k2 = self.k2();
        let k = self.k as i64;
        let mut path = Vec::with_capacity(self.height as usize);
        let mut g = self.t.len() + q;
        loop {
            path.push(g % k2);
            let block = g / k2;
            if block == 0 {
                break;
            }
            g = self.t.select1(block).expect("block has a parent") - 1;
        }
        let (mut x, mut y, mut size) = (0i64, 0i64, self.side as i64);
        for &idx in path.iter().rev() {
            size /= k;
            let (r, c) = (idx as i64 / k, idx as i64 % k);
            x += c * size;
            y += (k - 1 - r) * size;
        }
        Ok(Point::new(x, y))
    }

    /// Nonempty nodes in non-decreasing distance from `q`, root first.
    pub fn nodes_by_distance(&self, q: Point) -> NodesByDistance<'_> {
        let mut heap = BinaryHeap::new();
        if !self.is_empty() {
            let root = self.root();
            heap.push(Reverse(HeapEntry {
                dist2: dist2_region(q, &root.region()),
                key: 0,
                depth: 0,
                node: NodeKey(root),
            }));
        }
        NodesByDistance { tree: self, q, heap }
    }

    pub fn size_in_bytes(&self) -> usize {
        4 + 8 + self.t.size_in_bytes() + self.l.size_in_bytes()
    }

    pub fn write_to(&self, w: &mut ByteWriter) {
        w.put_u32(self.k);
        w.put_u64(self.side);
        self.t.write_to(w);
        self.l.write_to(w);
    }

    pub fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        let k = r.u32("k2tree arity")?;
        let side = r.u64("k2tree side")?;
        let t = BitVector::read_from(r)?;
        let l = BitVector::read_from(r)?;
        if !(2..=1 << 15).contains(&k) {
            return Err(Error::Corrupt(format!("k2tree arity {k}")));
        }
        let (padded, height) = padded_side(side, k).map_err(|_| Error::Corrupt("k2tree side".into()))?;
        let k2 = (k * k) as usize;
        if padded != side
            || t.len() % k2 != 0
            || l.len() % k2 != 0
            || (l.is_empty() && !t.is_empty())
            || (!l.is_empty() && t.len() / k2 + l.len() / k2 != 1 + t.count_ones())
        {
            return Err(Error::Corrupt("k2tree layout".into()));
        }
        Ok(Self { k, side, height, t, l })
    }
}

/// One emission of [`K2Tree::nodes_by_distance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistanceItem {
    pub region: Region,
    /// Squared distance from the query point to `region`.
    pub dist2: u64,
    /// Leaf rank when the item is a single occupied cell.
    pub leaf: Option<usize>,
}

#[derive(Debug, Clone, Copy)]
struct NodeKey(Node);

impl PartialEq for NodeKey {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}
impl Eq for NodeKey {}
impl PartialOrd for NodeKey {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for NodeKey {
    fn cmp(&self, _: &Self) -> std::cmp::Ordering {
        std::cmp::Ordering::Equal
    }
}

/// Heap order: distance, then Z-order key, then shallower first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct HeapEntry {
    dist2: u64,
    key: u128,
    depth: u32,
    node: NodeKey,
}

pub struct NodesByDistance<'a> {
    tree: &'a K2Tree,
    q: Point,
    heap: BinaryHeap<Reverse<HeapEntry>>,
}

impl Iterator for NodesByDistance<'_> {
    type Item = DistanceItem;

    fn next(&mut self) -> Option<DistanceItem> {
        let Reverse(e) = self.heap.pop()?;
        let node = e.node.0;
        let tree = self.tree;
        if node.depth == tree.height {
            return Some(DistanceItem {
                region: node.region(),
                dist2: e.dist2,
                leaf: Some(tree.leaf_rank(&node)),
            });
        }
        let k2 = tree.k2() as u128;
        let weight = k2.pow(tree.height - node.depth - 1);
        let q = self.q;
        let heap = &mut self.heap;
        tree.for_children(&node, |idx, c| {
            heap.push(Reverse(HeapEntry {
                dist2: dist2_region(q, &c.region()),
                key: e.key + idx as u128 * weight,
                depth: c.depth,
                node: NodeKey(c),
            }));
        });
        Some(DistanceItem {
            region: node.region(),
            dist2: e.dist2,
            leaf: None,
        })
    }
}
