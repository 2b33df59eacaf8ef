//! Tracing and enumeration against independent oracles: the primitive
//! lattice-vector oracle on the marked flat torus, and hand-traced fates on
//! the slit torus.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use slitsurf::forge::{flat_torus, make_slit_torus, random_corpus};
use slitsurf::geom::{rat, rat_i, Direction, Vec2};
use slitsurf::surface::{CornerRef, VertexKind};
use slitsurf::tracer::{
    enumerate_saddle_connections, saddle_connections_in_direction, trace_ray,
    witness_avoids_boundary, RayFate, DEFAULT_STEP_CAP,
};
use slitsurf::{Int, Rat};
use std::collections::BTreeSet;

fn dir(x: i64, y: i64) -> Direction {
    Direction::new(x, y).unwrap()
}

fn hol_set(conns: &[slitsurf::tracer::SaddleConnection]) -> Vec<(Int, Int)> {
    let mut v: Vec<(Int, Int)> = conns
        .iter()
        .map(|c| {
            assert!(c.holonomy.x.denom().is_one() && c.holonomy.y.denom().is_one());
            (c.holonomy.x.numer().clone(), c.holonomy.y.numer().clone())
        })
        .collect();
    v.sort();
    v
}

/// Independent oracle: primitive integer vectors of squared norm <= l2.
fn primitive_lattice_vectors(l2: i64) -> Vec<(Int, Int)> {
    let r = (l2 as f64).sqrt() as i64 + 1;
    let mut out = Vec::new();
    for p in -r..=r {
        for q in -r..=r {
            if (p, q) == (0, 0) || p * p + q * q > l2 {
                continue;
            }
            if p.unsigned_abs().gcd(&q.unsigned_abs()) == 1 {
                out.push((Int::from(p), Int::from(q)));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn torus_enumeration_matches_lattice_oracle() {
    let t = flat_torus();
    for l2 in [1i64, 2, 4, 5, 25] {
        let res = enumerate_saddle_connections(&t, &rat_i(l2)).unwrap();
        assert!(!res.truncated);
        let got = hol_set(&res.connections);
        let want = primitive_lattice_vectors(l2);
        assert_eq!(got, want, "l2 = {l2}");
    }
    // The spec's two counting rows.
    let res = enumerate_saddle_connections(&t, &rat_i(5)).unwrap();
    assert_eq!(res.connections.len(), 16);
    let res = enumerate_saddle_connections(&t, &rat_i(4)).unwrap();
    assert_eq!(res.connections.len(), 8);
}

#[test]
fn torus_trace_and_in_direction() {
    let t = flat_torus();
    let corner = CornerRef { poly: 0, vertex: 0 };
    match trace_ray(&t, corner, &dir(1, 0), DEFAULT_STEP_CAP).unwrap() {
        RayFate::HitsSingularity(c) => {
            assert_eq!(c.holonomy, Vec2::new(rat_i(1), rat_i(0)));
            assert_eq!(c.from_class, c.to_class);
        }
        other => panic!("expected singular hit, got {other:?}"),
    }
    // Direction outside the corner sector is rejected.
    assert!(trace_ray(&t, corner, &dir(-1, -1), DEFAULT_STEP_CAP).is_err());
    let (conns, complete) = saddle_connections_in_direction(&t, &dir(1, 1), DEFAULT_STEP_CAP);
    assert!(complete);
    assert_eq!(conns.len(), 1);
    assert_eq!(conns[0].holonomy, Vec2::new(rat_i(1), rat_i(1)));
}

/// Find the slit-torus corner whose sector contains the given direction at a
/// boundary singularity with the given chart point.
fn corner_at(
    s: &slitsurf::Surface,
    point: &Vec2,
    d: &Direction,
) -> CornerRef {
    let dv = d.as_vec();
    for class in s.classes().iter().filter(|c| c.singular) {
        for &c in &class.corners {
            if s.corner_point(c) != point {
                continue;
            }
            let (u, w) = s.corner_rays(c);
            let inside = u.cross(&dv).is_positive() && dv.cross(&w).is_positive();
            let along_u = u.cross(&dv).is_zero() && u.dot(&dv).is_positive();
            let along_w = w.cross(&dv).is_zero() && w.dot(&dv).is_positive();
            if inside || along_u || along_w {
                return c;
            }
        }
    }
    panic!("no corner at {point:?} containing {d}");
}

#[test]
fn slit_torus_traces_match_hand_counts() {
    use num_traits::Signed;
    let s = make_slit_torus(rat(1, 2)).unwrap();
    let p = Vec2::new(rat(1, 4), rat(1, 2));
    // Leftward along y = 1/2 through the x = 0 ~ 1 gluing.
    let c = corner_at(&s, &p, &dir(-1, 0));
    match trace_ray(&s, c, &dir(-1, 0), DEFAULT_STEP_CAP).unwrap() {
        RayFate::HitsSingularity(conn) => {
            assert_eq!(conn.holonomy, Vec2::new(rat(-1, 2), rat_i(0)));
            assert_ne!(conn.from_class, conn.to_class);
        }
        other => panic!("{other:?}"),
    }
    // Straight up: wraps and returns to the same endpoint.
    let c = corner_at(&s, &p, &dir(0, 1));
    match trace_ray(&s, c, &dir(0, 1), DEFAULT_STEP_CAP).unwrap() {
        RayFate::HitsSingularity(conn) => {
            assert_eq!(conn.holonomy, Vec2::new(rat_i(0), rat_i(1)));
            assert_eq!(conn.from_class, conn.to_class);
        }
        other => panic!("{other:?}"),
    }
    // Down at slope -2 the separatrix threads exactly into the far slit
    // endpoint: a genuine saddle connection.
    let c = corner_at(&s, &p, &dir(1, -2));
    match trace_ray(&s, c, &dir(1, -2), DEFAULT_STEP_CAP).unwrap() {
        RayFate::HitsSingularity(conn) => {
            assert_eq!(conn.holonomy, Vec2::new(rat(1, 2), rat_i(-1)));
        }
        other => panic!("{other:?}"),
    }
    // Down at slope -4 it crashes into the slit interior.
    let c = corner_at(&s, &p, &dir(1, -4));
    match trace_ray(&s, c, &dir(1, -4), DEFAULT_STEP_CAP).unwrap() {
        RayFate::HitsBoundary { dist2, point, .. } => {
            assert!(dist2.is_positive());
            assert_eq!(point, Vec2::new(rat(1, 2), rat(1, 2)));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn slit_torus_directional_counts() {
    let s = make_slit_torus(rat(1, 2)).unwrap();
    // Horizontal: the two slit sides plus the complementary arc.
    let (conns, complete) = saddle_connections_in_direction(&s, &dir(1, 0), DEFAULT_STEP_CAP);
    assert!(complete);
    assert_eq!(conns.len(), 3);
    for c in &conns {
        assert_eq!(c.len2, rat(1, 4));
        assert_eq!(c.direction, dir(1, 0));
    }
    // Vertical: the loops through the two slit endpoints.
    let (conns, complete) = saddle_connections_in_direction(&s, &dir(0, 1), DEFAULT_STEP_CAP);
    assert!(complete);
    assert_eq!(conns.len(), 2);
    for c in &conns {
        assert_eq!(c.len2, rat_i(1));
        assert_eq!(c.from_class, c.to_class);
    }
    // Direction (1, 2): separatrices thread into the opposite endpoint, so
    // connections exist even though no cylinder survives.
    let (conns, complete) = saddle_connections_in_direction(&s, &dir(1, 2), DEFAULT_STEP_CAP);
    assert!(complete);
    assert!(!conns.is_empty());
    // Direction (1, 3): every separatrix crosses the slit first, so there is
    // no saddle connection at all (first y = 1/2 returns land at x = 7/12,
    // 5/12 off the endpoints).
    let (conns, complete) = saddle_connections_in_direction(&s, &dir(1, 3), DEFAULT_STEP_CAP);
    assert!(complete);
    assert!(conns.is_empty());
}

#[test]
fn slit_torus_tiny_radius_enumeration() {
    let s = make_slit_torus(rat(1, 2)).unwrap();
    let res = enumerate_saddle_connections(&s, &rat(1, 4)).unwrap();
    assert!(!res.truncated);
    // Three horizontal connections of length 1/2, both orientations.
    assert_eq!(res.connections.len(), 6);
    for c in &res.connections {
        assert_eq!(c.len2, rat(1, 4));
        assert!(c.holonomy.y.numer().is_zero() || c.holonomy.y == rat_i(0));
    }
    let plus: Vec<_> = res
        .connections
        .iter()
        .filter(|c| c.direction == dir(1, 0))
        .collect();
    assert_eq!(plus.len(), 3);
}

#[test]
fn orientation_symmetry_and_witnesses() {
    let s = make_slit_torus(rat(1, 2)).unwrap();
    let res = enumerate_saddle_connections(&s, &rat_i(9)).unwrap();
    assert!(!res.truncated);
    // sigma is found iff its reverse is found, with negated holonomy.
    let keys: BTreeSet<(usize, usize, (Int, Int))> = res
        .connections
        .iter()
        .map(|c| {
            (
                c.from_class,
                c.to_class,
                (
                    c.holonomy.x.numer() * c.holonomy.y.denom(),
                    c.holonomy.y.numer() * c.holonomy.x.denom(),
                ),
            )
        })
        .collect();
    for (from, to, (hx, hy)) in &keys {
        assert!(
            keys.contains(&(*to, *from, (-hx, -hy))),
            "reverse of {from}->{to} ({hx},{hy}) missing"
        );
    }
    // No witness crosses a boundary edge.
    for c in &res.connections {
        assert!(witness_avoids_boundary(&s, c));
    }
}

#[test]
fn in_direction_subset_of_enumeration() {
    let s = make_slit_torus(rat(1, 2)).unwrap();
    let all = enumerate_saddle_connections(&s, &rat_i(25)).unwrap();
    let all_keys: BTreeSet<(usize, usize, String)> = all
        .connections
        .iter()
        .map(|c| (c.from_class, c.to_class, format!("{:?}", c.holonomy)))
        .collect();
    for d in [dir(1, 0), dir(0, 1), dir(1, 1), dir(2, 1), dir(3, 1)] {
        let (conns, complete) = saddle_connections_in_direction(&s, &d, DEFAULT_STEP_CAP);
        assert!(complete);
        for c in conns {
            if c.len2 <= rat_i(25) {
                assert!(
                    all_keys.contains(&(c.from_class, c.to_class, format!("{:?}", c.holonomy))),
                    "directional connection {c:?} missing from enumeration"
                );
            }
        }
    }
}

#[test]
fn corpus_enumeration_smoke() {
    // Small-radius enumeration across the corpus: witnesses never cross
    // boundary and every oriented record has its reverse.
    for s in random_corpus(12, 6, 11) {
        let res = enumerate_saddle_connections(&s, &rat_i(2)).unwrap();
        for c in &res.connections {
            assert!(witness_avoids_boundary(&s, c));
        }
        let keys: BTreeSet<(usize, usize, String)> = res
            .connections
            .iter()
            .map(|c| (c.from_class, c.to_class, format!("{:?}", c.holonomy)))
            .collect();
        for c in &res.connections {
            let rev = (
                c.to_class,
                c.from_class,
                format!("{:?}", c.holonomy.neg()),
            );
            assert!(keys.contains(&rev));
        }
    }
}

#[test]
fn boundary_classes_are_split_per_bank() {
    // Sanity on the seeding structure of the slit torus: two singular
    // boundary classes, each a chain of two straight corners.
    let s = make_slit_torus(rat(1, 2)).unwrap();
    let singular: Vec<_> = s.classes().iter().filter(|c| c.singular).collect();
    assert_eq!(singular.len(), 2);
    for class in singular {
        assert_eq!(class.kind, VertexKind::Boundary);
        assert_eq!(class.corners.len(), 2);
    }
}

fn _unused(_: Rat) {}
