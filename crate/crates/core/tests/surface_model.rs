//! Surface building, genus, stratum signatures and the angle census on the
//! named fixtures.

use slitsurf::angle::Angle;
use slitsurf::forge::{flat_torus, make_origami, make_slit_torus, random_corpus, OrigamiSpec, SlitSpec};
use slitsurf::geom::{rat, rat_i, PolygonChart, Vec2};
use slitsurf::surface::{EdgeRef, Surface, VertexKind};
use std::collections::BTreeMap;

fn vi(x: i64, y: i64) -> Vec2 {
    Vec2::new(rat_i(x), rat_i(y))
}

#[test]
fn flat_torus_topology_and_signature() {
    let t = flat_torus();
    assert_eq!(t.genus().unwrap(), 1);
    assert_eq!(t.classes().len(), 1);
    assert_eq!(t.classes()[0].angle, Angle::two_pi());
    // No pole: only accepted in no-pole test mode.
    assert!(t.stratum_signature(false).is_err());
    let sig = t.stratum_signature(true).unwrap();
    assert_eq!(sig.to_string(), "H(0)");
    assert!(sig.no_pole_mode);
    t.gauss_bonnet_check().unwrap();
}

#[test]
fn slit_torus_topology_and_signature() {
    let s = make_slit_torus(rat(1, 2)).unwrap();
    // Euler characteristic oracle: V=4 classes, E=7, F=2, one cap.
    assert_eq!(s.classes().len(), 4);
    assert_eq!(s.polygons().len(), 2);
    assert_eq!(s.genus().unwrap(), 1);
    // One boundary loop of 2 edges, two boundary singularities of
    // surface-side angle 2 pi.
    assert_eq!(s.boundary_loops().len(), 1);
    assert_eq!(s.boundary_loops()[0].len(), 2);
    let boundary_classes: Vec<_> = s
        .classes()
        .iter()
        .filter(|c| c.kind == VertexKind::Boundary)
        .collect();
    assert_eq!(boundary_classes.len(), 2);
    for c in &boundary_classes {
        assert_eq!(c.angle, Angle::two_pi());
        assert!(c.singular);
    }
    // Interior classes are regular points here and therefore inert.
    for c in s.classes().iter().filter(|c| c.kind == VertexKind::Interior) {
        assert_eq!(c.angle, Angle::two_pi());
        assert!(!c.singular);
    }
    let sig = s.stratum_signature(false).unwrap();
    assert_eq!(sig.to_string(), "H(1,1,-2)");
    assert_eq!(sig.genus, 1);
    s.gauss_bonnet_check().unwrap();
    assert_eq!(s.total_area(), rat_i(1));
}

#[test]
fn slit_torus_rejects_wrong_pole_order() {
    // Same complex, pole order 3 declared: 1 + 1 - 3 != 2g - 2.
    let good = make_slit_torus(rat(1, 2)).unwrap();
    let polys = good.polygons().to_vec();
    let mut gluings = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for e in good.edge_refs() {
        if let Some(f) = good.partner(e) {
            if seen.insert((e.min(f), e.max(f))) {
                gluings.push((e.min(f), e.max(f)));
            }
        }
    }
    let mut poles = BTreeMap::new();
    poles.insert(0usize, 3u32);
    let s = Surface::build(None, polys, &gluings, poles).unwrap();
    let err = s.stratum_signature(false).unwrap_err();
    assert!(err.to_string().contains("inconsistent pole declaration"), "{err}");
}

#[test]
fn holonomy_mismatch_is_rejected() {
    let sq = PolygonChart::new(vec![vi(0, 0), vi(1, 0), vi(1, 1), vi(0, 1)]).unwrap();
    let rect = PolygonChart::new(vec![vi(0, 0), vi(2, 0), vi(2, 1), vi(0, 1)]).unwrap();
    let e = EdgeRef::new;
    // Glue the top of the square to the bottom of the 2x1 rectangle.
    let err = Surface::build(
        None,
        vec![sq, rect],
        &[(e(0, 2), e(1, 0))],
        BTreeMap::new(),
    )
    .unwrap_err();
    assert!(err.to_string().contains("holonomy mismatch"), "{err}");
}

#[test]
fn lonely_square_is_rejected() {
    let sq = PolygonChart::new(vec![vi(0, 0), vi(1, 0), vi(1, 1), vi(0, 1)]).unwrap();
    let err = Surface::build(None, vec![sq], &[], BTreeMap::new()).unwrap_err();
    assert!(err.to_string().contains("no glued edges"), "{err}");
}

#[test]
fn two_square_torus_cover() {
    let s = make_origami(&OrigamiSpec::torus(2)).unwrap();
    assert_eq!(s.genus().unwrap(), 1);
    assert_eq!(s.total_area(), rat_i(2));
    assert_eq!(s.boundary_loops().len(), 0);
    s.gauss_bonnet_check().unwrap();
}

fn l_shaped_spec(slit: Option<SlitSpec>) -> OrigamiSpec {
    OrigamiSpec {
        squares: 4,
        h: vec![1, 2, 0, 3],
        v: vec![3, 1, 2, 0],
        slits: slit.into_iter().collect(),
        pole_orders: None,
        name: Some("l-origami".into()),
    }
}

#[test]
fn l_shaped_origami_has_genus_two() {
    let s = make_origami(&l_shaped_spec(None)).unwrap();
    assert_eq!(s.genus().unwrap(), 2);
    let sig = s.stratum_signature(true).unwrap();
    assert_eq!(sig.to_string(), "H(2)");
    s.gauss_bonnet_check().unwrap();

    let slit = SlitSpec { square: 2, side: 0, lo: rat(1, 4), hi: rat(3, 4) };
    let s = make_origami(&l_shaped_spec(Some(slit))).unwrap();
    assert_eq!(s.genus().unwrap(), 2);
    assert_eq!(s.boundary_loops().len(), 1);
    let sig = s.stratum_signature(false).unwrap();
    assert_eq!(sig.to_string(), "H(2,1,1,-2)");
    s.gauss_bonnet_check().unwrap();
}

#[test]
fn intransitive_origami_is_rejected() {
    let spec = OrigamiSpec {
        squares: 2,
        h: vec![0, 1],
        v: vec![0, 1],
        slits: vec![],
        pole_orders: None,
        name: None,
    };
    let err = make_origami(&spec).unwrap_err();
    assert!(err.to_string().contains("disconnected"), "{err}");
}

#[test]
fn corpus_builds_and_passes_census() {
    let corpus = random_corpus(40, 8, 7);
    assert40(&corpus);
    for s in &corpus {
        s.gauss_bonnet_check().unwrap();
        s.stratum_signature(false).unwrap();
        assert!(s.genus().is_ok());
    }
}

fn assert40(corpus: &[Surface]) {
    assert_eq!(corpus.len(), 40, "corpus generation should not stall");
}
