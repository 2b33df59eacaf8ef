//! Directional decompositions of the named fixtures: component classes,
//! areas, topology, and exact Gauss-Bonnet ledgers.

use slitsurf::foliation::{
    angle_defect_sum, component_topology, decompose, ComponentClass,
};
use slitsurf::forge::{flat_torus, make_slit_torus, random_corpus};
use slitsurf::geom::{rat, rat_i, Direction, Vec2};
use slitsurf::surface::{EdgeRef, Surface};
use slitsurf::tracer::DEFAULT_STEP_CAP;
use std::collections::BTreeMap;

fn dir(x: i64, y: i64) -> Direction {
    Direction::new(x, y).unwrap()
}

#[test]
fn slit_torus_horizontal_is_one_cylinder() {
    let s = make_slit_torus(rat(1, 2)).unwrap();
    let d = decompose(&s, &dir(1, 0), DEFAULT_STEP_CAP).unwrap();
    assert!(d.complete);
    assert_eq!(d.components.len(), 1);
    let c = &d.components[0];
    assert_eq!(c.class, ComponentClass::FiniteCylinder);
    assert_eq!(c.area, rat_i(1));
    // Circumference 1: the closed-leaf holonomy is (1, 0).
    assert_eq!(c.cylinder_holonomy, Some(Vec2::new(rat_i(1), rat_i(0))));
    assert_eq!(component_topology(c), (0, 2));
    // The interval exchange certificate is a rigid translation.
    let iet = c.iet.as_ref().expect("cylinder has a transversal");
    assert!(iet.is_rigid());
    // Flat annulus: defect total 0.
    let ledger = angle_defect_sum(c).unwrap();
    assert_eq!(ledger.total_pi, 0);
}

#[test]
fn slit_torus_vertical_splits_cylinder_and_free_strip() {
    let s = make_slit_torus(rat(1, 2)).unwrap();
    let d = decompose(&s, &dir(0, 1), DEFAULT_STEP_CAP).unwrap();
    assert!(d.complete);
    assert_eq!(d.components.len(), 2);
    let cyl: Vec<_> = d
        .components
        .iter()
        .filter(|c| c.class == ComponentClass::FiniteCylinder)
        .collect();
    let free: Vec<_> = d
        .components
        .iter()
        .filter(|c| c.class == ComponentClass::PoleAdjacentFree)
        .collect();
    assert_eq!(cyl.len(), 1);
    assert_eq!(free.len(), 1);
    assert_eq!(cyl[0].area, rat(1, 2));
    assert_eq!(free[0].area, rat(1, 2));
    assert_eq!(component_topology(cyl[0]), (0, 2));
    // The free strip closes into a disk: one boundary circle.
    assert_eq!(component_topology(free[0]), (0, 1));
    // Flat annulus defect total 0; disk total -2 pi.
    assert_eq!(angle_defect_sum(cyl[0]).unwrap().total_pi, 0);
    assert_eq!(angle_defect_sum(free[0]).unwrap().total_pi, -2);
}

#[test]
fn flat_torus_horizontal_is_one_cylinder() {
    let t = flat_torus();
    let d = decompose(&t, &dir(1, 0), DEFAULT_STEP_CAP).unwrap();
    assert!(d.complete);
    assert_eq!(d.components.len(), 1);
    let c = &d.components[0];
    assert_eq!(c.class, ComponentClass::FiniteCylinder);
    assert_eq!(c.area, rat_i(1));
    assert_eq!(component_topology(c), (0, 2));
}

#[test]
fn slit_torus_slope_two_has_no_cylinder() {
    let s = make_slit_torus(rat(1, 2)).unwrap();
    let d = decompose(&s, &dir(1, 2), DEFAULT_STEP_CAP).unwrap();
    assert!(d.complete);
    assert!(!d.connections.is_empty());
    assert!(d
        .components
        .iter()
        .all(|c| c.class != ComponentClass::FiniteCylinder));
    // Exact area conservation over the pieces.
    let total: slitsurf::Rat = d
        .components
        .iter()
        .map(|c| c.area.clone())
        .fold(rat_i(0), |a, b| a + b);
    assert_eq!(total, rat_i(1));
}

#[test]
fn slit_torus_slope_three_is_whole_surface() {
    let s = make_slit_torus(rat(1, 2)).unwrap();
    let d = decompose(&s, &dir(1, 3), DEFAULT_STEP_CAP).unwrap();
    assert!(d.complete);
    assert!(d.connections.is_empty());
    assert_eq!(d.components.len(), 1);
    let c = &d.components[0];
    assert_eq!(c.class, ComponentClass::PoleAdjacentFree);
    // Cutting along nothing: genus 1, one boundary circle.
    assert_eq!(component_topology(c), (1, 1));
    // Bordered slit torus ledger: two corners of angle 2 pi, defect pi each.
    let ledger = angle_defect_sum(c).unwrap();
    assert_eq!(ledger.total_pi, 2);
    assert_eq!(ledger.corners.len(), 2);
}

#[test]
fn transverse_measure_oracle_on_slit_torus() {
    // A direction (p, q) survives the length-1/2 slit iff |q| <= 1.
    let s = make_slit_torus(rat(1, 2)).unwrap();
    for (p, q, survives) in [
        (1i64, 0i64, true),
        (1, 1, true),
        (2, 1, true),
        (3, 1, true),
        (-1, 1, true),
        (1, 2, false),
        (1, -2, false),
        (3, 2, false),
        (2, 3, false),
        (1, 4, false),
    ] {
        let d = decompose(&s, &dir(p, q), DEFAULT_STEP_CAP).unwrap();
        let has_cyl = d
            .components
            .iter()
            .any(|c| c.class == ComponentClass::FiniteCylinder);
        assert_eq!(has_cyl, survives, "direction ({p},{q})");
    }
}

#[test]
fn thinner_slit_shifts_the_survival_threshold() {
    // Slit length 1/3: cylinders survive iff |q| < 3.
    let s = make_slit_torus(rat(1, 3)).unwrap();
    for (p, q, survives) in [
        (1i64, 1i64, true),
        (1, 2, true),
        (3, 2, true),
        (1, 3, false),
        (2, 3, false),
        (1, 4, false),
    ] {
        let d = decompose(&s, &dir(p, q), DEFAULT_STEP_CAP).unwrap();
        let has_cyl = d
            .components
            .iter()
            .any(|c| c.class == ComponentClass::FiniteCylinder);
        assert_eq!(has_cyl, survives, "direction ({p},{q})");
    }
}

/// Slit torus with the torus gluing edges subdivided at extra points:
/// metrically the same surface.
fn subdivided_slit_torus() -> Surface {
    let base = make_slit_torus(rat(1, 2)).unwrap();
    let v = |x: slitsurf::Rat, y: slitsurf::Rat| Vec2::new(x, y);
    let h = rat(1, 2);
    // Bottom rectangle with its bottom edge split at x = 1/3.
    let r0 = slitsurf::geom::PolygonChart::new(vec![
        v(rat_i(0), rat_i(0)),
        v(rat(1, 3), rat_i(0)),
        v(rat_i(1), rat_i(0)),
        v(rat_i(1), h.clone()),
        v(rat(3, 4), h.clone()),
        v(rat(1, 4), h.clone()),
        v(rat_i(0), h.clone()),
    ])
    .unwrap();
    // Top rectangle with its top edge split at the matching point.
    let r1 = slitsurf::geom::PolygonChart::new(vec![
        v(rat_i(0), h.clone()),
        v(rat(1, 4), h.clone()),
        v(rat(3, 4), h.clone()),
        v(rat_i(1), h.clone()),
        v(rat_i(1), rat_i(1)),
        v(rat(1, 3), rat_i(1)),
        v(rat_i(0), rat_i(1)),
    ])
    .unwrap();
    let e = EdgeRef::new;
    let gluings = vec![
        (e(0, 0), e(1, 5)), // bottom left piece <-> top left piece
        (e(0, 1), e(1, 4)), // bottom right piece <-> top right piece
        (e(0, 2), e(0, 6)), // right <-> left of r0
        (e(1, 3), e(1, 6)), // right <-> left of r1
        (e(0, 3), e(1, 2)), // middle right of the slit
        (e(0, 5), e(1, 0)), // middle left of the slit
    ];
    let mut poles = BTreeMap::new();
    poles.insert(0usize, 2u32);
    let s = Surface::build(Some("subdivided".into()), vec![r0, r1], &gluings, poles).unwrap();
    assert_eq!(s.total_area(), base.total_area());
    s
}

#[test]
fn classification_is_stable_under_subdivision() {
    let a = make_slit_torus(rat(1, 2)).unwrap();
    let b = subdivided_slit_torus();
    assert_eq!(b.genus().unwrap(), 1);
    assert_eq!(b.stratum_signature(false).unwrap().to_string(), "H(1,1,-2)");
    for d0 in [dir(1, 0), dir(0, 1), dir(1, 1), dir(1, 2), dir(2, 1)] {
        let da = decompose(&a, &d0, DEFAULT_STEP_CAP).unwrap();
        let db = decompose(&b, &d0, DEFAULT_STEP_CAP).unwrap();
        let mut ka: Vec<(&str, slitsurf::Rat)> = da
            .components
            .iter()
            .map(|c| (c.class.as_str(), c.area.clone()))
            .collect();
        let mut kb: Vec<(&str, slitsurf::Rat)> = db
            .components
            .iter()
            .map(|c| (c.class.as_str(), c.area.clone()))
            .collect();
        ka.sort();
        kb.sort();
        assert_eq!(ka, kb, "direction {d0}");
    }
}

#[test]
fn corpus_decompositions_conserve_area_and_defects() {
    use num_traits::Zero;
    for s in random_corpus(10, 6, 23) {
        for d0 in [dir(1, 0), dir(0, 1), dir(1, 1), dir(1, -1), dir(2, 1)] {
            let d = decompose(&s, &d0, DEFAULT_STEP_CAP).unwrap();
            assert!(d.complete);
            let mut total = slitsurf::Rat::zero();
            for c in &d.components {
                total += c.area.clone();
                // The ledger constructor verifies the Gauss-Bonnet total.
                angle_defect_sum(c).unwrap();
            }
            assert_eq!(total, s.total_area());
        }
    }
}
