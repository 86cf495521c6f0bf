//! Cells, rectangles and Euclidean distances on the grid.
//!
//! Distances are kept squared as integers wherever two of them are compared,
//! so ordering is exact; [`dist`] converts for reporting.

use crate::spiral::Displacement;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    pub fn offset_to(self, other: Point) -> Displacement {
        Displacement::new(other.x - self.x, other.y - self.y)
    }
}

impl std::ops::Add<Displacement> for Point {
    type Output = Point;
    fn add(self, d: Displacement) -> Point {
        Point::new(self.x + d.dx, self.y + d.dy)
    }
}

impl std::ops::Sub<Displacement> for Point {
    type Output = Point;
    fn sub(self, d: Displacement) -> Point {
        Point::new(self.x - d.dx, self.y - d.dy)
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Inclusive cell rectangle `[x1, x2] × [y1, y2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Region {
    pub x1: i64,
    pub y1: i64,
    pub x2: i64,
    pub y2: i64,
}

impl Region {
    /// Normalizes the corner order.
    pub fn new(x1: i64, y1: i64, x2: i64, y2: i64) -> Self {
        Self {
            x1: x1.min(x2),
            y1: y1.min(y2),
            x2: x1.max(x2),
            y2: y1.max(y2),
        }
    }

    pub fn point(p: Point) -> Self {
        Self::new(p.x, p.y, p.x, p.y)
    }

    /// Bounding box of two points.
    pub fn spanning(a: Point, b: Point) -> Self {
        Self::new(a.x, a.y, b.x, b.y)
    }

    pub fn contains(&self, p: Point) -> bool {
        self.x1 <= p.x && p.x <= self.x2 && self.y1 <= p.y && p.y <= self.y2
    }

    pub fn contains_region(&self, o: &Region) -> bool {
        self.x1 <= o.x1 && o.x2 <= self.x2 && self.y1 <= o.y1 && o.y2 <= self.y2
    }

    pub fn intersects(&self, o: &Region) -> bool {
        self.x1 <= o.x2 && o.x1 <= self.x2 && self.y1 <= o.y2 && o.y1 <= self.y2
    }

    pub fn intersection(&self, o: &Region) -> Option<Region> {
        self.intersects(o).then(|| Region {
            x1: self.x1.max(o.x1),
            y1: self.y1.max(o.y1),
            x2: self.x2.min(o.x2),
            y2: self.y2.min(o.y2),
        })
    }

    pub fn union(&self, o: &Region) -> Region {
        Region {
            x1: self.x1.min(o.x1),
            y1: self.y1.min(o.y1),
            x2: self.x2.max(o.x2),
            y2: self.y2.max(o.y2),
        }
    }

    pub fn translate(&self, d: Displacement) -> Region {
        Region {
            x1: self.x1 + d.dx,
            y1: self.y1 + d.dy,
            x2: self.x2 + d.dx,
            y2: self.y2 + d.dy,
        }
    }

    /// Grown by `delta` on every side.
    pub fn grow(&self, delta: i64) -> Region {
        Region {
            x1: self.x1 - delta,
            y1: self.y1 - delta,
            x2: self.x2 + delta,
            y2: self.y2 + delta,
        }
    }

    /// Clipped to the `side × side` grid.
    pub fn clip(&self, side: u64) -> Option<Region> {
        self.intersection(&Region::new(0, 0, side as i64 - 1, side as i64 - 1))
    }

    pub fn width(&self) -> u64 {
        (self.x2 - self.x1 + 1) as u64
    }

    pub fn height(&self) -> u64 {
        (self.y2 - self.y1 + 1) as u64
    }
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{},{}]x[{},{}]", self.x1, self.x2, self.y1, self.y2)
    }
}

pub fn dist2(p: Point, q: Point) -> u64 {
    let dx = p.x.abs_diff(q.x);
    let dy = p.y.abs_diff(q.y);
    dx * dx + dy * dy
}

/// Squared distance from `p` to the nearest cell of `r`; 0 inside.
pub fn dist2_region(p: Point, r: &Region) -> u64 {
    let dx = if p.x < r.x1 {
        r.x1 - p.x
    } else if p.x > r.x2 {
        p.x - r.x2
    } else {
        0
    } as u64;
    let dy = if p.y < r.y1 {
        r.y1 - p.y
    } else if p.y > r.y2 {
        p.y - r.y2
    } else {
        0
    } as u64;
    dx * dx + dy * dy
}

pub fn dist(p: Point, q: Point) -> f64 {
    (dist2(p, q) as f64).sqrt()
}

pub fn dist_region(p: Point, r: &Region) -> f64 {
    (dist2_region(p, r) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn region_distance_against_cells() {
        let p = Point::new(10, 0);
        let r = Region::new(8, 4, 9, 5);
        assert_eq!(dist2_region(p, &r), 17);
        assert_eq!(dist2_region(Point::new(8, 5), &r), 0);
        for (px, py) in [(0, 0), (3, 9), (8, 1), (12, 5), (9, 7)] {
            let p = Point::new(px, py);
            let brute = (r.x1..=r.x2)
                .flat_map(|x| (r.y1..=r.y2).map(move |y| Point::new(x, y)))
                .map(|c| dist2(p, c))
                .min()
                .unwrap();
            assert_eq!(dist2_region(p, &r), brute);
        }
    }

    #[test]
    fn clip_and_grow() {
        let r = Region::new(7, 3, 10, 4).grow(2);
        assert_eq!(r, Region::new(5, 1, 12, 6));
        assert_eq!(Region::new(-3, 2, 20, 40).clip(16), Some(Region::new(0, 2, 15, 15)));
        assert_eq!(Region::new(20, 20, 30, 30).clip(16), None);
    }
}
