//! Exact planar primitives: rational vectors, primitive integer directions,
//! segments and convex polygon charts.
//!
//! Every predicate here is decided by exact sign computations on
//! arbitrary-precision rationals; nothing is ever rounded.

use crate::angle::Angle;
use crate::{Error, Int, Rat, Result};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// Parse a rational from the wire format `"p/q"` or `"p"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n = Int::from_str(num.trim())
        .map_err(|_| Error::geometry(format!("bad rational numerator {num:?}")))?;
    let d = Int::from_str(den.trim())
        .map_err(|_| Error::geometry(format!("bad rational denominator {den:?}")))?;
    if d.is_zero() {
        return Err(Error::geometry(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(n, d))
}

/// Format a rational in the wire format: `"p/q"`, or `"p"` when the
/// denominator is one.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Shorthand for an integer-valued rational.
pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

/// Shorthand `n/d` constructor used all over the tests and generators.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

/// A point or translation vector of the plane, with exact rational
/// coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vec2 {
    pub x: Rat,
    pub y: Rat,
}

impl fmt::Debug for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", fmt_rat(&self.x), fmt_rat(&self.y))
    }
}

impl Vec2 {
    pub fn new(x: Rat, y: Rat) -> Self {
        Vec2 { x, y }
    }

    pub fn zero() -> Self {
        Vec2 { x: Rat::zero(), y: Rat::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn add(&self, o: &Vec2) -> Vec2 {
        Vec2::new(&self.x + &o.x, &self.y + &o.y)
    }

    pub fn sub(&self, o: &Vec2) -> Vec2 {
        Vec2::new(&self.x - &o.x, &self.y - &o.y)
    }

    pub fn neg(&self) -> Vec2 {
        Vec2::new(-self.x.clone(), -self.y.clone())
    }

    pub fn scale(&self, t: &Rat) -> Vec2 {
        Vec2::new(&self.x * t, &self.y * t)
    }

    /// Cross product `self.x * o.y - self.y * o.x`.
    pub fn cross(&self, o: &Vec2) -> Rat {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn dot(&self, o: &Vec2) -> Rat {
        &self.x * &o.x + &self.y * &o.y
    }

    /// Squared Euclidean length.
    pub fn norm2(&self) -> Rat {
        self.dot(self)
    }
}

/// Sign of an exact quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

pub fn sign(r: &Rat) -> Sign {
    match r.numer().sign() {
        num_bigint::Sign::Minus => Sign::Neg,
        num_bigint::Sign::NoSign => Sign::Zero,
        num_bigint::Sign::Plus => Sign::Pos,
    }
}

/// Orientation of the triangle `a, b, c`: `Pos` for counterclockwise.
pub fn orient(a: &Vec2, b: &Vec2, c: &Vec2) -> Sign {
    sign(&b.sub(a).cross(&c.sub(a)))
}

/// An oriented direction of the circle: a primitive integer vector.
/// A direction and its negation are distinct.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Direction {
    pub dx: Int,
    pub dy: Int,
}

impl fmt::Debug for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.dx, self.dy)
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.dx, self.dy)
    }
}

impl Direction {
    /// Build from integer components, reducing by the gcd.
    pub fn new(dx: impl Into<Int>, dy: impl Into<Int>) -> Result<Self> {
        let (dx, dy) = (dx.into(), dy.into());
        if dx.is_zero() && dy.is_zero() {
            return Err(Error::geometry("zero vector has no direction"));
        }
        let g = dx.gcd(&dy);
        Ok(Direction { dx: dx / &g, dy: dy / &g })
    }

    /// The unique primitive integer vector positively proportional to `v`.
    pub fn normalize(v: &Vec2) -> Result<Self> {
        if v.is_zero() {
            return Err(Error::geometry("zero vector has no direction"));
        }
        let l = v.x.denom().lcm(v.y.denom());
        let dx = v.x.numer() * (&l / v.x.denom());
        let dy = v.y.numer() * (&l / v.y.denom());
        Direction::new(dx, dy)
    }

    pub fn as_vec(&self) -> Vec2 {
        Vec2::new(Rat::from_integer(self.dx.clone()), Rat::from_integer(self.dy.clone()))
    }

    pub fn opposite(&self) -> Direction {
        Direction { dx: -self.dx.clone(), dy: -self.dy.clone() }
    }

    pub fn cross_int(&self, o: &Direction) -> Int {
        &self.dx * &o.dy - &self.dy * &o.dx
    }

    pub fn dot_int(&self, o: &Direction) -> Int {
        &self.dx * &o.dx + &self.dy * &o.dy
    }

    /// True when `v` points in exactly this direction.
    pub fn matches(&self, v: &Vec2) -> bool {
        let d = self.as_vec();
        d.cross(v).is_zero() && d.dot(v).is_positive()
    }

    /// Half of the circle this direction lies in: 0 for argument in
    /// `[0, pi)`, 1 for `[pi, 2pi)`.
    fn half(&self) -> u8 {
        if self.dy.is_positive() || (self.dy.is_zero() && self.dx.is_positive()) {
            0
        } else {
            1
        }
    }
}

/// Total circular order by argument in `[0, 2pi)`, starting at `(1, 0)`.
impl Ord for Direction {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.half().cmp(&other.half()) {
            Ordering::Equal => {
                let c = self.cross_int(other);
                if c.is_positive() {
                    Ordering::Less
                } else if c.is_negative() {
                    Ordering::Greater
                } else {
                    Ordering::Equal
                }
            }
            o => o,
        }
    }
}

impl PartialOrd for Direction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A straight segment with distinct rational endpoints.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Segment {
    pub start: Vec2,
    pub end: Vec2,
}

impl fmt::Debug for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}--{:?}", self.start, self.end)
    }
}

/// Exact classification of a segment-segment intersection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SegmentMeet {
    Empty,
    Point(Vec2),
    Overlap(Segment),
}

impl Segment {
    pub fn new(start: Vec2, end: Vec2) -> Result<Self> {
        if start == end {
            return Err(Error::geometry("degenerate segment"));
        }
        Ok(Segment { start, end })
    }

    pub fn vector(&self) -> Vec2 {
        self.end.sub(&self.start)
    }

    pub fn len2(&self) -> Rat {
        self.vector().norm2()
    }

    /// Exact intersection of two segments,总 total over all configurations:
    /// disjoint, transversal point, endpoint touch, or collinear overlap.
    pub fn intersect(&self, other: &Segment) -> SegmentMeet {
        let r = self.vector();
        let s = other.vector();
        let qp = other.start.sub(&self.start);
        let denom = r.cross(&s);
        if !denom.is_zero() {
            let t = qp.cross(&s) / denom.clone();
            let u = qp.cross(&r) / denom;
            let unit = |v: &Rat| !v.is_negative() && *v <= Rat::one();
            if unit(&t) && unit(&u) {
                return SegmentMeet::Point(self.start.add(&r.scale(&t)));
            }
            return SegmentMeet::Empty;
        }
        // Parallel segments.
        if !qp.cross(&r).is_zero() {
            return SegmentMeet::Empty;
        }
        // Collinear: parametrize `other`'s endpoints along `self`.
        let rr = r.norm2();
        let t0 = qp.dot(&r) / rr.clone();
        let t1 = other.end.sub(&self.start).dot(&r) / rr;
        let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        let lo = lo.max(Rat::zero());
        let hi = hi.min(Rat::one());
        match lo.cmp(&hi) {
            Ordering::Greater => SegmentMeet::Empty,
            Ordering::Equal => SegmentMeet::Point(self.start.add(&r.scale(&lo))),
            Ordering::Less => SegmentMeet::Overlap(Segment {
                start: self.start.add(&r.scale(&lo)),
                end: self.start.add(&r.scale(&hi)),
            }),
        }
    }

    /// True when the two segments cross transversally at a single point
    /// interior to both. Touching at endpoints or collinear overlap does not
    /// count.
    pub fn crosses_properly(&self, other: &Segment) -> bool {
        let r = self.vector();
        let s = other.vector();
        let d1 = sign(&r.cross(&other.start.sub(&self.start)));
        let d2 = sign(&r.cross(&other.end.sub(&self.start)));
        let d3 = sign(&s.cross(&self.start.sub(&other.start)));
        let d4 = sign(&s.cross(&self.end.sub(&other.start)));
        let opp = |a: Sign, b: Sign| {
            matches!((a, b), (Sign::Pos, Sign::Neg) | (Sign::Neg, Sign::Pos))
        };
        opp(d1, d2) && opp(d3, d4)
    }

    /// Squared distance from `p` to the closed segment.
    pub fn dist2_to_point(&self, p: &Vec2) -> Rat {
        let r = self.vector();
        let t = p.sub(&self.start).dot(&r) / r.norm2();
        let t = t.max(Rat::zero()).min(Rat::one());
        p.sub(&self.start.add(&r.scale(&t))).norm2()
    }
}

/// A convex polygon chart of the translation atlas. Vertices run
/// counterclockwise; straight corners (angle exactly pi) are allowed, which
/// is how edge subdivision points are represented.
#[derive(Clone, PartialEq, Eq)]
pub struct PolygonChart {
    vertices: Vec<Vec2>,
}

impl fmt::Debug for PolygonChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polygon{:?}", self.vertices)
    }
}

impl PolygonChart {
    /// Validate and build. Rejects polygons that are degenerate, clockwise,
    /// non-convex or traversed more than once.
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::geometry("polygon needs at least 3 vertices"));
        }
        let n = vertices.len();
        for i in 0..n {
            if vertices[i] == vertices[(i + 1) % n] {
                return Err(Error::geometry("repeated consecutive vertex"));
            }
        }
        {
            let mut sorted: Vec<&Vec2> = vertices.iter().collect();
            sorted.sort();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::geometry("repeated vertex"));
            }
        }
        let p = PolygonChart { vertices };
        if !p.shoelace().is_positive() {
            return Err(Error::geometry("polygon is clockwise or flat"));
        }
        // Convexity with straight corners allowed, plus total turning of one
        // full turn, which rules out multiply-wound vertex cycles.
        let mut turning = Angle::zero();
        for k in 0..p.vertices.len() {
            let e_prev = p.edge_vec((k + p.vertices.len() - 1) % p.vertices.len());
            let e_next = p.edge_vec(k);
            if sign(&e_prev.cross(&e_next)) == Sign::Neg {
                return Err(Error::geometry("polygon is not convex"));
            }
            turning = turning.add(&Angle::between(&e_prev, &e_next));
        }
        if turning != Angle::two_pi() {
            return Err(Error::geometry("polygon boundary winds more than once"));
        }
        Ok(p)
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertex(&self, k: usize) -> &Vec2 {
        &self.vertices[k % self.vertices.len()]
    }

    /// Edge `k` runs from vertex `k` to vertex `k + 1 (mod n)`.
    pub fn edge(&self, k: usize) -> Segment {
        Segment {
            start: self.vertex(k).clone(),
            end: self.vertex(k + 1).clone(),
        }
    }

    pub fn edge_vec(&self, k: usize) -> Vec2 {
        self.vertex(k + 1).sub(self.vertex(k))
    }

    fn shoelace(&self) -> Rat {
        let mut acc = Rat::zero();
        let n = self.vertices.len();
        for k in 0..n {
            acc += self.vertices[k].cross(&self.vertices[(k + 1) % n]);
        }
        acc
    }

    /// Shoelace area; strictly positive by construction.
    pub fn area(&self) -> Rat {
        self.shoelace() / rat_i(2)
    }

    pub fn centroid(&self) -> Vec2 {
        let n = rat_i(self.vertices.len() as i64);
        let mut acc = Vec2::zero();
        for v in &self.vertices {
            acc = acc.add(v);
        }
        acc.scale(&(Rat::one() / n))
    }

    pub fn translate(&self, t: &Vec2) -> PolygonChart {
        PolygonChart {
            vertices: self.vertices.iter().map(|v| v.add(t)).collect(),
        }
    }

    /// Point containment on the closed polygon.
    pub fn contains(&self, p: &Vec2) -> bool {
        (0..self.vertices.len())
            .all(|k| sign(&self.edge_vec(k).cross(&p.sub(self.vertex(k)))) != Sign::Neg)
    }

    /// Point containment in the open interior.
    pub fn contains_interior(&self, p: &Vec2) -> bool {
        (0..self.vertices.len())
            .all(|k| sign(&self.edge_vec(k).cross(&p.sub(self.vertex(k)))) == Sign::Pos)
    }

    /// Interior angle at vertex `k`, in `(0, pi]`.
    pub fn corner_angle(&self, k: usize) -> Angle {
        let n = self.vertices.len();
        let d_out = self.edge_vec(k);
        let d_in = self.vertex((k + n - 1) % n).sub(self.vertex(k));
        Angle::between(&d_out, &d_in)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: (i64, i64), y: (i64, i64)) -> Vec2 {
        Vec2::new(rat(x.0, x.1), rat(y.0, y.1))
    }

    fn vi(x: i64, y: i64) -> Vec2 {
        Vec2::new(rat_i(x), rat_i(y))
    }

    #[test]
    fn normalize_direction_examples() {
        // scaling invariance
        let d = Direction::normalize(&v((4, 6), (2, 6))).unwrap();
        assert_eq!((d.dx, d.dy), (Int::from(2), Int::from(1)));
        // axis case
        let d = Direction::normalize(&vi(-3, 0)).unwrap();
        assert_eq!((d.dx, d.dy), (Int::from(-1), Int::from(0)));
        // clear denominators then divide by gcd
        let d = Direction::normalize(&v((1, 2), (-3, 4))).unwrap();
        assert_eq!((d.dx, d.dy), (Int::from(2), Int::from(-3)));
        assert!(Direction::normalize(&Vec2::zero()).is_err());
    }

    #[test]
    fn polygon_area_examples() {
        let sq = PolygonChart::new(vec![vi(0, 0), vi(1, 0), vi(1, 1), vi(0, 1)]).unwrap();
        assert_eq!(sq.area(), rat_i(1));
        let tri = PolygonChart::new(vec![vi(0, 0), vi(1, 0), vi(0, 1)]).unwrap();
        assert_eq!(tri.area(), rat(1, 2));
        let rect = PolygonChart::new(vec![vi(0, 0), vi(1, 0), v((1, 1), (1, 2)), v((0, 1), (1, 2))])
            .unwrap();
        assert_eq!(rect.area(), rat(1, 2));
    }

    #[test]
    fn polygon_rejects_bad_input() {
        assert!(PolygonChart::new(vec![vi(0, 0), vi(1, 0)]).is_err());
        // clockwise
        assert!(PolygonChart::new(vec![vi(0, 0), vi(0, 1), vi(1, 0)]).is_err());
        // collinear (flat)
        assert!(PolygonChart::new(vec![vi(0, 0), vi(1, 0), vi(2, 0)]).is_err());
        // non-convex
        assert!(PolygonChart::new(vec![
            vi(0, 0),
            vi(2, 0),
            vi(2, 2),
            vi(1, 1),
            vi(0, 2)
        ])
        .is_err());
        // pentagram winds twice
        assert!(PolygonChart::new(vec![
            vi(0, 0),
            vi(4, 3),
            vi(0, 3),
            vi(4, 0),
            vi(2, 5),
        ])
        .is_err());
        // straight corners are fine
        assert!(PolygonChart::new(vec![vi(0, 0), vi(1, 0), vi(2, 0), vi(2, 2), vi(0, 2)]).is_ok());
    }

    #[test]
    fn intersect_segments_examples() {
        let s = |a: Vec2, b: Vec2| Segment::new(a, b).unwrap();
        let m = s(vi(0, 0), vi(1, 1)).intersect(&s(vi(0, 1), vi(1, 0)));
        assert_eq!(m, SegmentMeet::Point(v((1, 2), (1, 2))));
        let m = s(vi(0, 0), vi(1, 0)).intersect(&s(vi(0, 1), vi(1, 1)));
        assert_eq!(m, SegmentMeet::Empty);
        let m = s(vi(0, 0), vi(1, 0)).intersect(&s(v((1, 2), (0, 1)), vi(2, 0)));
        assert_eq!(
            m,
            SegmentMeet::Overlap(s(v((1, 2), (0, 1)), vi(1, 0)))
        );
    }

    #[test]
    fn intersect_is_symmetric() {
        let s = |a: Vec2, b: Vec2| Segment::new(a, b).unwrap();
        let cases = vec![
            (s(vi(0, 0), vi(1, 1)), s(vi(0, 1), vi(1, 0))),
            (s(vi(0, 0), vi(1, 0)), s(vi(1, 0), vi(2, 1))),
            (s(vi(0, 0), vi(2, 0)), s(vi(1, 0), vi(3, 0))),
            (s(vi(0, 0), vi(1, 0)), s(vi(0, 1), vi(1, 2))),
        ];
        for (a, b) in cases {
            let ab = a.intersect(&b);
            let ba = b.intersect(&a);
            // Overlaps are reported in the first segment's orientation, so
            // compare as sets of endpoints.
            match (ab, ba) {
                (SegmentMeet::Overlap(u), SegmentMeet::Overlap(w)) => {
                    let mut us = [u.start, u.end];
                    let mut ws = [w.start, w.end];
                    us.sort();
                    ws.sort();
                    assert_eq!(us, ws);
                }
                (x, y) => assert_eq!(x, y),
            }
        }
    }

    #[test]
    fn direction_circular_order() {
        let d = |x: i64, y: i64| Direction::new(x, y).unwrap();
        let mut dirs = vec![d(0, -1), d(1, 0), d(-1, 0), d(0, 1), d(1, 1), d(-1, -1)];
        dirs.sort();
        assert_eq!(
            dirs,
            vec![d(1, 0), d(1, 1), d(0, 1), d(-1, 0), d(-1, -1), d(0, -1)]
        );
    }

    #[test]
    fn rational_wire_format() {
        assert_eq!(fmt_rat(&rat(4, 6)), "2/3");
        assert_eq!(fmt_rat(&rat_i(-7)), "-7");
        assert_eq!(parse_rat("2/3").unwrap(), rat(2, 3));
        assert_eq!(parse_rat("-7").unwrap(), rat_i(-7));
        assert!(parse_rat("1/0").is_err());
    }
}
