//! Exact region algebra on chart-local convex pieces: intersection areas,
//! unions as disjoint piece lists, containment by area. Regions are finite
//! unions of convex polygons tagged with the chart they live in; all
//! computations are rational and exact.

use crate::geom::{sign, Sign, Vec2};
use crate::Rat;
use num_traits::Zero;

/// A convex piece in a named chart. Vertices counterclockwise; the piece may
/// be degenerate (area zero) after clipping, which callers treat as empty.
#[derive(Debug, Clone)]
pub struct Piece {
    pub chart: usize,
    pub vertices: Vec<Vec2>,
}

impl Piece {
    pub fn area(&self) -> Rat {
        shoelace(&self.vertices) / crate::geom::rat_i(2)
    }
}

fn shoelace(vs: &[Vec2]) -> Rat {
    let n = vs.len();
    let mut acc = Rat::zero();
    if n < 3 {
        return acc;
    }
    for k in 0..n {
        acc += vs[k].cross(&vs[(k + 1) % n]);
    }
    acc
}

pub fn region_area(region: &[Piece]) -> Rat {
    let mut acc = Rat::zero();
    for p in region {
        acc += p.area();
    }
    acc
}

/// Clip a convex polygon by the half-plane on the left of `a -> b`.
fn clip_halfplane(vs: &[Vec2], a: &Vec2, b: &Vec2) -> Vec<Vec2> {
    let mut out = Vec::new();
    let n = vs.len();
    if n == 0 {
        return out;
    }
    let dir = b.sub(a);
    let side = |p: &Vec2| sign(&dir.cross(&p.sub(a)));
    for i in 0..n {
        let cur = &vs[i];
        let nxt = &vs[(i + 1) % n];
        let sc = side(cur);
        let sn = side(nxt);
        if sc != Sign::Neg {
            out.push(cur.clone());
        }
        if (sc == Sign::Pos && sn == Sign::Neg) || (sc == Sign::Neg && sn == Sign::Pos) {
            // Exact crossing point of the segment with the line; the signs
            // guarantee the denominator is nonzero.
            let e = nxt.sub(cur);
            let t = dir.cross(&a.sub(cur)) / dir.cross(&e);
            out.push(cur.add(&e.scale(&t)));
        }
    }
    out
}

/// Intersection of two convex vertex lists (Sutherland-Hodgman), exact.
fn convex_intersection(subject: &[Vec2], clip: &[Vec2]) -> Vec<Vec2> {
    let mut cur = subject.to_vec();
    let n = clip.len();
    for i in 0..n {
        if cur.is_empty() {
            break;
        }
        cur = clip_halfplane(&cur, &clip[i], &clip[(i + 1) % n]);
    }
    cur
}

/// Exact area of the intersection of two regions.
pub fn intersection_area(a: &[Piece], b: &[Piece]) -> Rat {
    let mut acc = Rat::zero();
    for pa in a {
        for pb in b {
            if pa.chart != pb.chart {
                continue;
            }
            acc += shoelace(&convex_intersection(&pa.vertices, &pb.vertices))
                / crate::geom::rat_i(2);
        }
    }
    acc
}

/// `inner` is contained in `outer` up to measure zero.
pub fn region_contains(outer: &[Piece], inner: &[Piece]) -> bool {
    intersection_area(outer, inner) == region_area(inner)
}

/// Convex difference `p \ q` as a list of convex pieces (clip `p` against
/// the complement half-planes of `q` one by one).
fn convex_difference(p: &Piece, q: &Piece) -> Vec<Piece> {
    if p.chart != q.chart {
        return vec![p.clone()];
    }
    let mut out = Vec::new();
    let mut remaining = p.vertices.clone();
    let n = q.vertices.len();
    for i in 0..n {
        if remaining.is_empty() {
            break;
        }
        let a = &q.vertices[i];
        let b = &q.vertices[(i + 1) % n];
        // The part of `remaining` right of a->b leaves q for good; clipping
        // by the reversed line keeps exactly that part, still CCW.
        let outside = clip_halfplane(&remaining, b, a);
        if !shoelace(&outside).is_zero() {
            out.push(Piece { chart: p.chart, vertices: outside });
        }
        remaining = clip_halfplane(&remaining, a, b);
    }
    out
}

/// Add a region to a disjoint union, returning the union still as disjoint
/// pieces.
pub fn disjoint_union(existing: &[Piece], added: &[Piece]) -> Vec<Piece> {
    let mut out: Vec<Piece> = existing.to_vec();
    for p in added {
        let mut fresh = vec![p.clone()];
        for e in existing {
            let mut next = Vec::new();
            for f in &fresh {
                next.extend(convex_difference(f, e));
            }
            fresh = next;
            if fresh.is_empty() {
                break;
            }
        }
        out.extend(fresh.into_iter().filter(|p| !p.area().is_zero()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{rat, rat_i};

    fn piece(chart: usize, pts: &[(i64, i64)]) -> Piece {
        Piece {
            chart,
            vertices: pts
                .iter()
                .map(|(x, y)| Vec2::new(rat_i(*x), rat_i(*y)))
                .collect(),
        }
    }

    #[test]
    fn intersection_and_containment() {
        let unit = piece(0, &[(0, 0), (2, 0), (2, 2), (0, 2)]);
        let shifted = Piece {
            chart: 0,
            vertices: vec![
                Vec2::new(rat_i(1), rat_i(1)),
                Vec2::new(rat_i(3), rat_i(1)),
                Vec2::new(rat_i(3), rat_i(3)),
                Vec2::new(rat_i(1), rat_i(3)),
            ],
        };
        assert_eq!(intersection_area(&[unit.clone()], &[shifted.clone()]), rat_i(1));
        assert!(!region_contains(&[unit.clone()], &[shifted.clone()]));
        let small = piece(0, &[(0, 0), (1, 0), (1, 1), (0, 1)]);
        assert!(region_contains(&[unit.clone()], &[small]));
        // Different charts never meet.
        let other = piece(1, &[(0, 0), (2, 0), (2, 2), (0, 2)]);
        assert_eq!(intersection_area(&[unit], &[other]), rat_i(0));
    }

    #[test]
    fn union_is_measured_once() {
        let a = piece(0, &[(0, 0), (2, 0), (2, 2), (0, 2)]);
        let b = piece(0, &[(1, 0), (3, 0), (3, 2), (1, 2)]);
        let u = disjoint_union(&[a.clone()], &[b]);
        assert_eq!(region_area(&u), rat_i(6));
        let u2 = disjoint_union(&u, &[a]);
        assert_eq!(region_area(&u2), rat_i(6));
        assert_eq!(region_area(&u2), rat(6, 1));
    }
}
