//! Clockwise square-spiral enumeration of relative displacements.
//!
//! Code 0 is the origin. Ring `r >= 1` holds the `8r` cells with
//! `max(|dx|, |dy|) = r` and codes `(2r-1)^2 .. (2r+1)^2`. Each ring is
//! entered at `(r, r-1)`, one step east of the previous ring's north-east
//! corner, then walked south, west, north and east, ending at `(r, r)`:
//!
//! ```text
//!   6  7  8
//!   5  0  1   9
//!   4  3  2  10
//! ```
//!
//! `x` grows east and `y` grows north.

use crate::error::{Error, Result};

/// Default bound on `max(|dx|, |dy|)`.
pub const DEFAULT_RADIUS_BOUND: u64 = 1 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Displacement {
    pub dx: i64,
    pub dy: i64,
}

impl Displacement {
    pub const ZERO: Displacement = Displacement { dx: 0, dy: 0 };

    pub const fn new(dx: i64, dy: i64) -> Self {
        Self { dx, dy }
    }
}

impl std::ops::Add for Displacement {
    type Output = Displacement;
    fn add(self, o: Displacement) -> Displacement {
        Displacement::new(self.dx + o.dx, self.dy + o.dy)
    }
}

impl std::ops::Neg for Displacement {
    type Output = Displacement;
    fn neg(self) -> Displacement {
        Displacement::new(-self.dx, -self.dy)
    }
}

/// Spiral code of `d`, checked against `radius_bound`.
pub fn encode_bounded(d: Displacement, radius_bound: u64) -> Result<u64> {
    let r = d.dx.unsigned_abs().max(d.dy.unsigned_abs());
    if r > radius_bound || r > DEFAULT_RADIUS_BOUND {
        return Err(Error::RadiusExceeded {
            dx: d.dx,
            dy: d.dy,
            bound: radius_bound.min(DEFAULT_RADIUS_BOUND),
        });
    }
    Ok(encode_unchecked(d))
}

/// Spiral code of `d` under the default radius bound.
pub fn encode(d: Displacement) -> Result<u64> {
    encode_bounded(d, DEFAULT_RADIUS_BOUND)
}

fn encode_unchecked(d: Displacement) -> u64 {
    let (x, y) = (d.dx, d.dy);
    let r = x.abs().max(y.abs());
    if r == 0 {
        return 0;
    }
    let base = ((2 * r - 1) * (2 * r - 1)) as u64;
    let offset = if x == r && y < r {
        (r - 1) - y
    } else if y == -r && x < r {
        2 * r + (r - 1 - x)
    } else if x == -r && y > -r {
        4 * r + (y + r - 1)
    } else {
        6 * r + (x + r - 1)
    };
    base + offset as u64
}

/// Inverse of [`encode`], in closed form.
pub fn decode(code: u64) -> Displacement {
    if code == 0 {
        return Displacement::ZERO;
    }
    let s = code.isqrt();
    let r = (s + 1) / 2;
    let base = (2 * r - 1) * (2 * r - 1);
    let offset = code - base;
    let side = 2 * r;
    let (edge, e) = (offset / side, (offset % side) as i64);
    let r = r as i64;
    match edge {
        0 => Displacement::new(r, r - 1 - e),
        1 => Displacement::new(r - 1 - e, -r),
        2 => Displacement::new(-r, e - r + 1),
        _ => Displacement::new(e - r + 1, r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Walks the spiral one cell at a time.
    fn walk(n: usize) -> Vec<Displacement> {
        let mut out = vec![Displacement::ZERO];
        let (mut x, mut y) = (0i64, 0i64);
        let mut r = 0i64;
        while out.len() < n {
            // step east from the NE corner of ring r into ring r+1
            r += 1;
            x += 1;
            out.push(Displacement::new(x, y));
            let moves = [((0, -1), 2 * r - 1), ((-1, 0), 2 * r), ((0, 1), 2 * r), ((1, 0), 2 * r)];
            for ((sx, sy), count) in moves {
                for _ in 0..count {
                    x += sx;
                    y += sy;
                    out.push(Displacement::new(x, y));
                }
            }
        }
        out.truncate(n);
        out
    }

    #[test]
    fn walk_oracle_agrees_with_closed_form() {
        for (code, d) in walk(2000).into_iter().enumerate() {
            assert_eq!(encode(d).unwrap(), code as u64, "{d:?}");
            assert_eq!(decode(code as u64), d, "{code}");
        }
    }

    #[test]
    fn anchors() {
        assert_eq!(encode(Displacement::new(1, 1)).unwrap(), 8);
        assert_eq!(encode(Displacement::new(0, 3)).unwrap(), 45);
        assert_eq!(encode(Displacement::ZERO).unwrap(), 0);
        assert_eq!(walk(10)[9], Displacement::new(2, 1));
        assert_eq!(encode(Displacement::new(2, 1)).unwrap(), 9);
        assert_eq!(decode(8), Displacement::new(1, 1));
        assert_eq!(decode(4) + decode(5), Displacement::new(-2, -1));
        assert_eq!(decode(2) + decode(9), Displacement::new(3, 0));
    }

    #[test]
    fn first_ring() {
        let expect = [(0, 0), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (2, 1), (2, 0)];
        for (c, &(x, y)) in expect.iter().enumerate() {
            assert_eq!(decode(c as u64), Displacement::new(x, y));
        }
    }

    #[test]
    fn radius_bound() {
        assert!(encode_bounded(Displacement::new(5, 0), 4).is_err());
        assert!(encode_bounded(Displacement::new(4, -4), 4).is_ok());
        let far = Displacement::new(-(1 << 30), 1 << 30);
        assert_eq!(decode(encode(far).unwrap()), far);
        assert!(encode(Displacement::new(1 << 31, 0)).is_err());
    }
}
