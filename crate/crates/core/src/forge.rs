//! Deterministic generators for test surfaces: the flat torus, slit tori,
//! square-tiled surfaces with slits built from permutation data, nested
//! invariant-subsurface families, and a seeded random origami corpus.

use crate::geom::{rat_i, PolygonChart, Vec2};
use crate::surface::{EdgeRef, Surface};
use crate::{Error, Int, Rat, Result};
use num_traits::{One, Signed, Zero};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Unit-square torus with its single vertex class as a marked point.
pub fn flat_torus() -> Surface {
    make_origami(&OrigamiSpec::torus(1)).expect("flat torus is valid")
}

/// Unit-square torus with a centered horizontal slit of the given length at
/// height 1/2, presented as two rectangle charts. The slit stands in for a
/// pole of order 2.
pub fn make_slit_torus(slit_length: Rat) -> Result<Surface> {
    if !slit_length.is_positive() || slit_length >= Rat::one() {
        return Err(Error::surface(format!(
            "slit length must lie in (0, 1), got {slit_length}"
        )));
    }
    let a = (Rat::one() - &slit_length) / rat_i(2);
    let b = (Rat::one() + &slit_length) / rat_i(2);
    let h = Rat::new(1.into(), 2.into());
    let v = |x: Rat, y: Rat| Vec2::new(x, y);
    let r0 = PolygonChart::new(vec![
        v(Rat::zero(), Rat::zero()),
        v(Rat::one(), Rat::zero()),
        v(Rat::one(), h.clone()),
        v(b.clone(), h.clone()),
        v(a.clone(), h.clone()),
        v(Rat::zero(), h.clone()),
    ])?;
    let r1 = PolygonChart::new(vec![
        v(Rat::zero(), h.clone()),
        v(a.clone(), h.clone()),
        v(b.clone(), h.clone()),
        v(Rat::one(), h.clone()),
        v(Rat::one(), Rat::one()),
        v(Rat::zero(), Rat::one()),
    ])?;
    let e = EdgeRef::new;
    let gluings = vec![
        (e(0, 0), e(1, 4)), // bottom <-> top of the torus
        (e(0, 1), e(0, 5)), // right <-> left of the bottom rectangle
        (e(1, 3), e(1, 5)), // right <-> left of the top rectangle
        (e(0, 2), e(1, 2)), // middle line, right of the slit
        (e(0, 4), e(1, 0)), // middle line, left of the slit
    ];
    let mut poles = BTreeMap::new();
    poles.insert(0usize, 2u32);
    Surface::build(Some("slit-torus".into()), vec![r0, r1], &gluings, poles)
}

/// A slit on a square edge: `lo..hi` in the edge's own parameter, which runs
/// from vertex `side` to vertex `side + 1` of the unit square
/// (0 bottom, 1 right, 2 top, 3 left).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlitSpec {
    pub square: usize,
    pub side: usize,
    pub lo: Rat,
    pub hi: Rat,
}

/// Permutation data for a square-tiled surface with slits.
#[derive(Debug, Clone)]
pub struct OrigamiSpec {
    /// Number of unit squares.
    pub squares: usize,
    /// `h[i]` is the square to the right of square `i`.
    pub h: Vec<usize>,
    /// `v[i]` is the square above square `i`.
    pub v: Vec<usize>,
    pub slits: Vec<SlitSpec>,
    /// Pole order per boundary loop in canonical loop order; when `None`
    /// every loop is declared order 2.
    pub pole_orders: Option<Vec<u32>>,
    pub name: Option<String>,
}

impl OrigamiSpec {
    /// The `n`-square horizontal torus cover: `h` a cycle, `v` the identity.
    pub fn torus(n: usize) -> Self {
        OrigamiSpec {
            squares: n,
            h: (0..n).map(|i| (i + 1) % n).collect(),
            v: (0..n).collect(),
            slits: Vec::new(),
            pole_orders: None,
            name: Some(if n == 1 { "flat-torus".into() } else { format!("torus-cover-{n}") }),
        }
    }
}

fn is_permutation(p: &[usize]) -> bool {
    let n = p.len();
    let mut seen = vec![false; n];
    for &x in p {
        if x >= n || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

/// Build a surface of unit squares glued by the permutations, with the
/// declared sub-intervals of edges left unpaired as slits.
pub fn make_origami(spec: &OrigamiSpec) -> Result<Surface> {
    let n = spec.squares;
    if n == 0 {
        return Err(Error::surface("origami needs at least one square"));
    }
    if spec.h.len() != n || spec.v.len() != n {
        return Err(Error::surface("permutation length does not match square count"));
    }
    if !is_permutation(&spec.h) || !is_permutation(&spec.v) {
        return Err(Error::surface("h and v must be permutations"));
    }
    // Subdivision points per (square, side), in edge parameters.
    let mut cuts: Vec<[Vec<Rat>; 4]> = vec![[vec![], vec![], vec![], vec![]]; n];
    // Slit intervals per (square, side).
    let mut open: Vec<[Vec<(Rat, Rat)>; 4]> = vec![[vec![], vec![], vec![], vec![]]; n];
    let partner_of = |sq: usize, side: usize| -> (usize, usize) {
        match side {
            0 => {
                // bottom of sq pairs with top of v^{-1}(sq); express via v
                // by scanning (n is small).
                let below = (0..n).find(|&j| spec.v[j] == sq);
                (below.unwrap_or(sq), 2)
            }
            1 => (spec.h[sq], 3),
            2 => (spec.v[sq], 0),
            3 => {
                let left = (0..n).find(|&j| spec.h[j] == sq);
                (left.unwrap_or(sq), 1)
            }
            _ => unreachable!(),
        }
    };
    // Wait on partner lookups until permutation validity is known (checked
    // above), then spread each slit to both sides of its gluing.
    for slit in &spec.slits {
        if slit.square >= n || slit.side > 3 {
            return Err(Error::surface("slit references a nonexistent edge"));
        }
        if slit.lo.is_negative() || slit.lo >= slit.hi || slit.hi > Rat::one() {
            return Err(Error::surface("slit interval must satisfy 0 <= lo < hi <= 1"));
        }
        let (ps, pe) = partner_of(slit.square, slit.side);
        let mirrored = (Rat::one() - &slit.hi, Rat::one() - &slit.lo);
        open[slit.square][slit.side].push((slit.lo.clone(), slit.hi.clone()));
        open[ps][pe].push(mirrored.clone());
        for t in [slit.lo.clone(), slit.hi.clone()] {
            if !t.is_zero() && t != Rat::one() {
                cuts[slit.square][slit.side].push(t);
            }
        }
        for t in [mirrored.0, mirrored.1] {
            if !t.is_zero() && t != Rat::one() {
                cuts[ps][pe].push(t);
            }
        }
    }
    for square in &mut cuts {
        for side in square.iter_mut() {
            side.sort();
            side.dedup();
        }
    }
    for square in &open {
        for side in square.iter() {
            for w in side.windows(2) {
                if w[0].1 > w[1].0 {
                    return Err(Error::surface("overlapping slits on one edge"));
                }
            }
        }
    }
    // Assemble polygons: unit squares with subdivision vertices inserted.
    let corners = [
        Vec2::new(Rat::zero(), Rat::zero()),
        Vec2::new(Rat::one(), Rat::zero()),
        Vec2::new(Rat::one(), Rat::one()),
        Vec2::new(Rat::zero(), Rat::one()),
    ];
    let mut polygons = Vec::with_capacity(n);
    // (square, side, sub-index) -> flat edge index within the polygon.
    let mut edge_index: Vec<[Vec<usize>; 4]> = vec![[vec![], vec![], vec![], vec![]]; n];
    for sq in 0..n {
        let mut vertices = Vec::new();
        for side in 0..4 {
            let from = &corners[side];
            let dir = corners[(side + 1) % 4].sub(from);
            let base = vertices.len();
            vertices.push(from.clone());
            for t in &cuts[sq][side] {
                vertices.push(from.add(&dir.scale(t)));
            }
            let count = cuts[sq][side].len() + 1;
            edge_index[sq][side] = (0..count).map(|k| base + k).collect();
        }
        polygons.push(PolygonChart::new(vertices)?);
    }
    // Pair sub-edges, skipping slit intervals. Each gluing pair is visited
    // from its canonical side (sides 1 and 2 own their gluings).
    let mut gluings: Vec<(EdgeRef, EdgeRef)> = Vec::new();
    for sq in 0..n {
        for side in [1usize, 2usize] {
            let (psq, pside) = partner_of(sq, side);
            let subs = &edge_index[sq][side];
            let psubs = &edge_index[psq][pside];
            if subs.len() != psubs.len() {
                return Err(Error::surface("subdivision mismatch across a gluing"));
            }
            let m = subs.len();
            let params: Vec<Rat> = std::iter::once(Rat::zero())
                .chain(cuts[sq][side].iter().cloned())
                .collect();
            for k in 0..m {
                let lo = &params[k];
                let is_open = open[sq][side]
                    .iter()
                    .any(|(a, b)| a <= lo && lo < b);
                if is_open {
                    continue;
                }
                gluings.push((
                    EdgeRef::new(sq, subs[k]),
                    EdgeRef::new(psq, psubs[m - 1 - k]),
                ));
            }
        }
    }
    let probe = Surface::build(spec.name.clone(), polygons.clone(), &gluings, BTreeMap::new())
        .map_err(|e| match e {
            Error::Surface(msg) if msg.contains("disconnected") => {
                Error::surface("disconnected: permutations do not act transitively")
            }
            other => other,
        })?;
    let loops = probe.boundary_loops().len();
    let orders: Vec<u32> = match &spec.pole_orders {
        Some(o) => o.clone(),
        None => vec![2; loops],
    };
    if orders.len() != loops {
        return Err(Error::surface(format!(
            "{} pole orders declared for {} boundary loops",
            orders.len(),
            loops
        )));
    }
    let poles: BTreeMap<usize, u32> = orders.into_iter().enumerate().collect();
    Surface::build(spec.name.clone(), polygons, &gluings, poles)
}

/// Deterministic corpus of random slit origamis with at most `max_squares`
/// squares and 1 to 2 slits, for property suites.
pub fn random_corpus(count: usize, max_squares: usize, seed: u64) -> Vec<Surface> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count && attempts < count * 200 {
        attempts += 1;
        let n = rng.gen_range(1..=max_squares);
        let mut h: Vec<usize> = (0..n).collect();
        let mut v: Vec<usize> = (0..n).collect();
        h.shuffle(&mut rng);
        v.shuffle(&mut rng);
        let slit_count = rng.gen_range(1..=2usize);
        let mut slits = Vec::new();
        let mut used: Vec<(usize, usize)> = Vec::new();
        for _ in 0..slit_count {
            let square = rng.gen_range(0..n);
            let side = rng.gen_range(0..4usize);
            // One slit per edge class, strictly interior, so every slit is
            // its own 2-edge boundary loop.
            if used.contains(&(square, side)) {
                continue;
            }
            let denom = rng.gen_range(4..=8u64) * 2;
            let lo_num = rng.gen_range(1..denom / 2);
            let hi_num = rng.gen_range(lo_num + 1..denom);
            let slit = SlitSpec {
                square,
                side,
                lo: Rat::new(Int::from(lo_num), Int::from(denom)),
                hi: Rat::new(Int::from(hi_num), Int::from(denom)),
            };
            let mirror = (side + 2) % 4;
            let hpart = match side {
                1 => h[square],
                3 => (0..n).find(|&j| h[j] == square).unwrap(),
                2 => v[square],
                _ => (0..n).find(|&j| v[j] == square).unwrap(),
            };
            used.push((square, side));
            used.push((hpart, mirror));
            slits.push(slit);
        }
        if slits.is_empty() {
            continue;
        }
        let spec = OrigamiSpec {
            squares: n,
            h,
            v,
            slits,
            pole_orders: None,
            name: Some(format!("corpus-{}", out.len())),
        };
        if let Ok(s) = make_origami(&spec) {
            out.push(s);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::rat;

    #[test]
    fn slit_torus_shape() {
        let s = make_slit_torus(rat(1, 2)).unwrap();
        assert_eq!(s.polygons().len(), 2);
        assert_eq!(s.boundary_loops().len(), 1);
        assert_eq!(s.boundary_loops()[0].len(), 2);
        assert_eq!(s.total_area(), rat_i(1));
        assert!(make_slit_torus(rat_i(1)).is_err());
        assert!(make_slit_torus(rat_i(0)).is_err());
    }

    #[test]
    fn flat_torus_shape() {
        let s = flat_torus();
        assert_eq!(s.polygons().len(), 1);
        assert_eq!(s.boundary_loops().len(), 0);
        assert_eq!(s.classes().len(), 1);
        assert!(s.classes()[0].singular, "lone regular class is marked");
        assert_eq!(s.total_area(), rat_i(1));
    }
}
