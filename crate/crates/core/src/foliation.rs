//! Directional decomposition: cut the surface along every saddle connection
//! in a direction, collect the invariant components, classify them, and
//! verify exact angle-defect ledgers.
//!
//! Cutting is implemented in two passes. First every connection is re-traced
//! and its witness split into chart chords; chords lying along glued edges
//! mark those pairs for severing, transversal chords subdivide edges and
//! slice polygons into convex strips. The sliced complex keeps the full
//! pairing plus the set of severed pairs, so components can be re-glued
//! later when a closure subsurface is needed.

use crate::angle::Angle;
use crate::geom::{Direction, PolygonChart, Vec2};
use crate::region::Piece;
use crate::surface::{BoundaryOrigin, EdgeRef, Surface, VertexKind};
use crate::tracer::{
    saddle_connections_in_direction, FlowEnd, FlowTrace, SaddleConnection,
};
use crate::{Error, Rat, Result};
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// Classification of an invariant component of the directional foliation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentClass {
    /// Every interior leaf closed with a common period; genus 0 with two
    /// boundary circles.
    FiniteCylinder,
    /// No slit on the boundary, interval exchange with at least two
    /// intervals, no closed leaf found within the step cap. Exact minimality
    /// is not certifiable over the rationals.
    MinimalPresumed,
    /// The boundary contains an original slit edge: the finite-area shadow
    /// of a pole-adjacent region.
    PoleAdjacentFree,
    /// Classification was unsafe (incomplete separatrix data).
    UndeterminedClass,
}

impl ComponentClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            ComponentClass::FiniteCylinder => "finite-cylinder",
            ComponentClass::MinimalPresumed => "minimal-presumed",
            ComponentClass::PoleAdjacentFree => "pole-adjacent-free",
            ComponentClass::UndeterminedClass => "undetermined",
        }
    }
}

/// First-return record on a transversal edge: the exact interval exchange
/// induced by the foliation.
#[derive(Debug, Clone)]
pub struct IetRecord {
    /// The transversal, as an edge pair of the component surface.
    pub transversal: (EdgeRef, EdgeRef),
    /// Interior breakpoints, as parameters in (0, 1) along the transversal.
    pub breakpoints: Vec<Rat>,
    /// Return translation per interval: image parameter minus parameter,
    /// `None` when the return trace hit the step cap.
    pub translations: Vec<Option<Rat>>,
}

impl IetRecord {
    pub fn interval_count(&self) -> usize {
        self.breakpoints.len() + 1
    }

    /// A rigid translation: a single interval with a defined return.
    pub fn is_rigid(&self) -> bool {
        self.breakpoints.is_empty() && self.translations.iter().all(|t| t.is_some())
    }
}

/// A connected piece of the cut surface.
#[derive(Debug, Clone)]
pub struct InvariantComponent {
    /// Piece indices into the parent [`CutComplex`].
    pub piece_ids: Vec<usize>,
    /// The component as a bordered surface with induced gluings; severed
    /// edges are marked as cuts, surviving slit edges stay slits.
    pub surface: Surface,
    pub direction: Direction,
    pub class: ComponentClass,
    pub area: Rat,
    pub genus: u64,
    pub boundary_circles: usize,
    /// Common closed-leaf holonomy for cylinders.
    pub cylinder_holonomy: Option<Vec2>,
    pub iet: Option<IetRecord>,
    pub has_slit_boundary: bool,
}

/// The sliced polygon complex shared by all components of one decomposition.
#[derive(Debug, Clone)]
pub struct CutComplex {
    pub pieces: Vec<PolygonChart>,
    /// Chart of the original surface each piece lives in (piece coordinates
    /// are unchanged, so regions can be compared across decompositions).
    pub orig_chart: Vec<usize>,
    /// Full pairing of the refined complex, including severed pairs.
    pub full_pairing: Vec<Vec<Option<EdgeRef>>>,
    /// Boundary edges of the refined complex that were original slits.
    pub slit_edge: BTreeSet<EdgeRef>,
    /// Pairs severed by the cutting, canonically ordered.
    pub severed: BTreeSet<(EdgeRef, EdgeRef)>,
    pub component_of: Vec<usize>,
}

impl CutComplex {
    fn is_severed(&self, e: EdgeRef, f: EdgeRef) -> bool {
        self.severed.contains(&(e.min(f), e.max(f)))
    }

    /// Build the bordered surface spanned by a set of pieces. With
    /// `reglue_cuts` the severed pairs internal to the set are restored,
    /// which yields the closure of a union of components.
    pub fn subsurface(&self, piece_ids: &BTreeSet<usize>, reglue_cuts: bool) -> Result<Surface> {
        let local: BTreeMap<usize, usize> = piece_ids
            .iter()
            .enumerate()
            .map(|(i, p)| (*p, i))
            .collect();
        let mut polygons = Vec::with_capacity(piece_ids.len());
        let mut pairing = Vec::with_capacity(piece_ids.len());
        let mut origins = Vec::with_capacity(piece_ids.len());
        for &p in piece_ids {
            polygons.push(self.pieces[p].clone());
            let mut prow = Vec::new();
            let mut orow = Vec::new();
            for k in 0..self.pieces[p].len() {
                let e = EdgeRef::new(p, k);
                match self.full_pairing[p][k] {
                    Some(f)
                        if local.contains_key(&f.poly)
                            && (reglue_cuts || !self.is_severed(e, f)) =>
                    {
                        prow.push(Some(EdgeRef::new(local[&f.poly], f.edge)));
                        orow.push(None);
                    }
                    Some(_) => {
                        // Severed, or the partner lies outside the selection.
                        prow.push(None);
                        orow.push(Some(BoundaryOrigin::Cut));
                    }
                    None => {
                        prow.push(None);
                        orow.push(Some(if self.slit_edge.contains(&e) {
                            BoundaryOrigin::Slit
                        } else {
                            BoundaryOrigin::Cut
                        }));
                    }
                }
            }
            pairing.push(prow);
            origins.push(orow);
        }
        Surface::assemble(None, polygons, pairing, origins, BTreeMap::new())
    }

    /// Topology of an arbitrary union of pieces: total genus over connected
    /// parts, part count, boundary circles. Unlike [`CutComplex::subsurface`]
    /// this accepts disconnected unions.
    pub fn subsurface_topology(
        &self,
        piece_ids: &BTreeSet<usize>,
        reglue_cuts: bool,
    ) -> Result<(u64, usize, usize)> {
        let ids: Vec<usize> = piece_ids.iter().copied().collect();
        let index: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        let mut uf: Vec<usize> = (0..ids.len()).collect();
        for &p in &ids {
            for k in 0..self.pieces[p].len() {
                let e = EdgeRef::new(p, k);
                if let Some(f) = self.full_pairing[p][k] {
                    if index.contains_key(&f.poly) && (reglue_cuts || !self.is_severed(e, f)) {
                        let a = find(&mut uf, index[&p]);
                        let b = find(&mut uf, index[&f.poly]);
                        uf[a] = b;
                    }
                }
            }
        }
        let mut parts: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for (i, &p) in ids.iter().enumerate() {
            parts.entry(find(&mut uf, i)).or_default().insert(p);
        }
        let mut genus_sum = 0u64;
        let mut boundary = 0usize;
        for part in parts.values() {
            let s = self.subsurface(part, reglue_cuts)?;
            let (g, b) = s.bordered_topology()?;
            genus_sum += g;
            boundary += b;
        }
        Ok((genus_sum, parts.len(), boundary))
    }

    pub fn region_of(&self, piece_ids: &[usize]) -> Vec<Piece> {
        piece_ids
            .iter()
            .map(|&p| Piece {
                chart: self.orig_chart[p],
                vertices: self.pieces[p].vertices().to_vec(),
            })
            .collect()
    }
}

fn find(uf: &mut Vec<usize>, x: usize) -> usize {
    if uf[x] != x {
        let r = find(uf, uf[x]);
        uf[x] = r;
    }
    uf[x]
}

/// A full directional decomposition.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub direction: Direction,
    pub complete: bool,
    pub connections: Vec<SaddleConnection>,
    pub complex: CutComplex,
    pub components: Vec<InvariantComponent>,
}

impl Decomposition {
    pub fn component_region(&self, idx: usize) -> Vec<Piece> {
        self.complex.region_of(&self.components[idx].piece_ids)
    }
}

/// Exact Gauss-Bonnet ledger of a bordered surface.
#[derive(Debug, Clone)]
pub struct AngleDefectLedger {
    /// Interior classes: (class id, cone order = defect / 2 pi).
    pub interior: Vec<(usize, u64)>,
    /// Boundary corner classes: (class id, corner angle alpha); the defect
    /// is alpha - pi.
    pub corners: Vec<(usize, Angle)>,
    pub genus: u64,
    pub boundary_circles: usize,
    /// Verified total defect as a multiple of pi: `2 (2g - 2 + b)`.
    pub total_pi: i64,
}

/// Compute and verify the angle-defect ledger of a bordered surface: the
/// defect total must equal `2 pi (2g - 2 + b)` exactly. A mismatch indicates
/// a cutting bug and comes back as a hard error.
pub fn angle_defect_ledger(s: &Surface) -> Result<AngleDefectLedger> {
    let (genus, boundary_circles) = s.bordered_topology()?;
    let mut interior = Vec::new();
    let mut corners = Vec::new();
    let mut lhs = Angle::zero();
    for (id, class) in s.classes().iter().enumerate() {
        lhs = lhs.add(&class.angle);
        match class.kind {
            VertexKind::Interior => {
                let order = class.cone_order().ok_or_else(|| {
                    Error::Decompose("interior angle is not a multiple of 2 pi".into())
                })?;
                interior.push((id, order));
            }
            VertexKind::Boundary => corners.push((id, class.angle.clone())),
        }
    }
    let total_pi = 2 * (2 * genus as i64 - 2 + boundary_circles as i64);
    let expected = total_pi + 2 * interior.len() as i64 + corners.len() as i64;
    if expected < 0 || lhs != Angle::from_pi_multiple(expected as u64) {
        return Err(Error::Decompose(format!(
            "angle defect total mismatch: angles sum to {lhs:?}, expected {expected} pi"
        )));
    }
    Ok(AngleDefectLedger { interior, corners, genus, boundary_circles, total_pi })
}

/// Ledger of one invariant component.
pub fn angle_defect_sum(c: &InvariantComponent) -> Result<AngleDefectLedger> {
    angle_defect_ledger(&c.surface)
}

/// Genus and boundary circle count of a component.
pub fn component_topology(c: &InvariantComponent) -> (u64, usize) {
    (c.genus, c.boundary_circles)
}

// ---------------------------------------------------------------------
// Cutting
// ---------------------------------------------------------------------

/// Re-trace a connection and split its witness into chart chords.
fn connection_chords(s: &Surface, conn: &SaddleConnection) -> Result<Vec<(usize, Vec2, Vec2)>> {
    let trace = FlowTrace::new(s, conn.direction.as_vec(), usize::MAX);
    let start = s.corner_point(conn.from_corner).clone();
    let (end, chords) = trace.run_recording(conn.from_corner.poly, start);
    match end {
        FlowEnd::Vertex { unfolded, .. } => {
            if unfolded != conn.holonomy {
                return Err(Error::Decompose(
                    "re-trace of a connection reached a different endpoint".into(),
                ));
            }
            Ok(chords)
        }
        _ => Err(Error::Decompose(
            "re-trace of a connection did not end at a vertex".into(),
        )),
    }
}

enum OnBoundary {
    Vertex,
    EdgeInterior(usize, Rat),
}

fn locate_on_boundary(poly: &PolygonChart, x: &Vec2) -> Option<OnBoundary> {
    let n = poly.len();
    for k in 0..n {
        if poly.vertex(k) == x {
            return Some(OnBoundary::Vertex);
        }
    }
    for k in 0..n {
        let a = poly.vertex(k);
        let e = poly.edge_vec(k);
        let d = x.sub(a);
        if d.cross(&e).is_zero() {
            let t = d.dot(&e) / e.norm2();
            if t.is_positive() && t < Rat::one() {
                return Some(OnBoundary::EdgeInterior(k, t));
            }
        }
    }
    None
}

struct PieceBuilder {
    verts: Vec<Vec2>,
    tags: Vec<EdgeTag>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EdgeTag {
    /// Sub-edge `sub` of original edge (poly, edge).
    Inherited { poly: usize, edge: usize, sub: usize },
    /// One side of cut chord `id`.
    ChordCut { id: usize },
}

/// Cut the surface along the witness segments of the given connections.
/// Returns the sliced complex with severed pairs and connected components
/// already computed.
pub fn cut_along(s: &Surface, connections: &[SaddleConnection]) -> Result<CutComplex> {
    // Pass 1: subdivision points, edge runs to sever, transversal chords.
    let mut edge_points: BTreeMap<(usize, usize), BTreeSet<Rat>> = BTreeMap::new();
    let mut sever_edges: BTreeSet<(EdgeRef, EdgeRef)> = BTreeSet::new();
    let mut chords_by_poly: BTreeMap<usize, Vec<(Vec2, Vec2)>> = BTreeMap::new();
    for conn in connections {
        for (poly, a, b) in connection_chords(s, conn)? {
            if a == b {
                continue;
            }
            let chart = s.polygon(poly);
            let n = chart.len();
            // An along-edge run covers a whole original edge.
            let mut was_edge_run = false;
            for k in 0..n {
                let (va, vb) = (chart.vertex(k), chart.vertex(k + 1));
                if (va == &a && vb == &b) || (va == &b && vb == &a) {
                    let e = EdgeRef::new(poly, k);
                    if let Some(f) = s.partner(e) {
                        sever_edges.insert((e.min(f), e.max(f)));
                    }
                    was_edge_run = true;
                    break;
                }
            }
            if was_edge_run {
                continue;
            }
            for x in [&a, &b] {
                match locate_on_boundary(chart, x) {
                    Some(OnBoundary::Vertex) => {}
                    Some(OnBoundary::EdgeInterior(k, t)) => {
                        edge_points.entry((poly, k)).or_default().insert(t);
                    }
                    None => {
                        return Err(Error::Decompose(
                            "chord endpoint is not on the polygon boundary".into(),
                        ))
                    }
                }
            }
            let entry = chords_by_poly.entry(poly).or_default();
            if !entry
                .iter()
                .any(|(x, y)| (x, y) == (&a, &b) || (x, y) == (&b, &a))
            {
                entry.push((a, b));
            }
        }
    }

    // Mirror subdivision points across gluings (twice: mirrored points can
    // feed back once).
    for _ in 0..2 {
        let keys: Vec<(usize, usize)> = edge_points.keys().copied().collect();
        for (p, k) in keys {
            if let Some(f) = s.partner(EdgeRef::new(p, k)) {
                let ts: Vec<Rat> = edge_points[&(p, k)].iter().cloned().collect();
                let mirror = edge_points.entry((f.poly, f.edge)).or_default();
                for t in ts {
                    mirror.insert(Rat::one() - t);
                }
            }
        }
    }

    // Pass 2: refined polygons with subdivision vertices inserted.
    let mut builders: Vec<Vec<PieceBuilder>> = Vec::new();
    for (p, chart) in s.polygons().iter().enumerate() {
        let mut verts = Vec::new();
        let mut tags = Vec::new();
        for k in 0..chart.len() {
            let a = chart.vertex(k).clone();
            let e = chart.edge_vec(k);
            verts.push(a.clone());
            tags.push(EdgeTag::Inherited { poly: p, edge: k, sub: 0 });
            if let Some(ts) = edge_points.get(&(p, k)) {
                for (i, t) in ts.iter().enumerate() {
                    verts.push(a.add(&e.scale(t)));
                    tags.push(EdgeTag::Inherited { poly: p, edge: k, sub: i + 1 });
                }
            }
        }
        builders.push(vec![PieceBuilder { verts, tags }]);
    }

    // Pass 3: slice polygons along transversal chords.
    let mut cut_id = 0usize;
    for (p, chords) in &chords_by_poly {
        for (a, b) in chords {
            let pieces = &mut builders[*p];
            let mut target = None;
            for (idx, piece) in pieces.iter().enumerate() {
                let ia = piece.verts.iter().position(|v| v == a);
                let ib = piece.verts.iter().position(|v| v == b);
                if let (Some(ia), Some(ib)) = (ia, ib) {
                    target = Some((idx, ia, ib));
                    break;
                }
            }
            let (idx, ia, ib) = target.ok_or_else(|| {
                Error::Decompose("chord endpoints not found in a single piece".into())
            })?;
            let piece = pieces.swap_remove(idx);
            let n = piece.verts.len();
            let collect = |from: usize, to: usize| -> (Vec<Vec2>, Vec<EdgeTag>) {
                let mut vs = Vec::new();
                let mut ts = Vec::new();
                let mut i = from;
                loop {
                    vs.push(piece.verts[i].clone());
                    if i == to {
                        break;
                    }
                    ts.push(piece.tags[i]);
                    i = (i + 1) % n;
                }
                ts.push(EdgeTag::ChordCut { id: cut_id });
                (vs, ts)
            };
            let (v1, t1) = collect(ia, ib);
            let (v2, t2) = collect(ib, ia);
            cut_id += 1;
            pieces.push(PieceBuilder { verts: v1, tags: t1 });
            pieces.push(PieceBuilder { verts: v2, tags: t2 });
        }
    }

    // Pass 4: global assembly.
    let mut pieces: Vec<PolygonChart> = Vec::new();
    let mut orig_chart: Vec<usize> = Vec::new();
    let mut flat: Vec<(usize, PieceBuilder)> = Vec::new();
    for (p, bs) in builders.into_iter().enumerate() {
        for b in bs {
            flat.push((p, b));
        }
    }
    let mut inherited_at: BTreeMap<(usize, usize, usize), EdgeRef> = BTreeMap::new();
    let mut chord_sides: BTreeMap<usize, Vec<EdgeRef>> = BTreeMap::new();
    for (gid, (p, b)) in flat.iter().enumerate() {
        for (k, tag) in b.tags.iter().enumerate() {
            match tag {
                EdgeTag::Inherited { poly, edge, sub } => {
                    inherited_at.insert((*poly, *edge, *sub), EdgeRef::new(gid, k));
                }
                EdgeTag::ChordCut { id } => {
                    chord_sides.entry(*id).or_default().push(EdgeRef::new(gid, k));
                }
            }
        }
        let chart = PolygonChart::new(b.verts.clone())
            .map_err(|e| Error::Decompose(format!("sliced piece of chart {p} is invalid: {e}")))?;
        pieces.push(chart);
        orig_chart.push(*p);
    }
    let sub_count =
        |p: usize, k: usize| -> usize { 1 + edge_points.get(&(p, k)).map_or(0, |ts| ts.len()) };
    let mut full_pairing: Vec<Vec<Option<EdgeRef>>> =
        pieces.iter().map(|p| vec![None; p.len()]).collect();
    let mut slit_edge: BTreeSet<EdgeRef> = BTreeSet::new();
    let mut severed: BTreeSet<(EdgeRef, EdgeRef)> = BTreeSet::new();
    for (p, row) in s.pairing().iter().enumerate() {
        for (k, partner) in row.iter().enumerate() {
            match partner {
                None => {
                    if s.boundary_origin(EdgeRef::new(p, k)) == Some(BoundaryOrigin::Slit) {
                        for sub in 0..sub_count(p, k) {
                            slit_edge.insert(inherited_at[&(p, k, sub)]);
                        }
                    }
                }
                Some(f) => {
                    let m = sub_count(p, k);
                    debug_assert_eq!(m, sub_count(f.poly, f.edge));
                    for sub in 0..m {
                        let e_new = inherited_at[&(p, k, sub)];
                        let f_new = inherited_at[&(f.poly, f.edge, m - 1 - sub)];
                        full_pairing[e_new.poly][e_new.edge] = Some(f_new);
                        full_pairing[f_new.poly][f_new.edge] = Some(e_new);
                        let e_ref = EdgeRef::new(p, k);
                        if sever_edges.contains(&(e_ref.min(*f), e_ref.max(*f))) {
                            severed.insert((e_new.min(f_new), e_new.max(f_new)));
                        }
                    }
                }
            }
        }
    }
    for (id, sides) in &chord_sides {
        if sides.len() != 2 {
            return Err(Error::Decompose(format!(
                "chord {id} has {} sides after slicing",
                sides.len()
            )));
        }
        let (e, f) = (sides[0], sides[1]);
        full_pairing[e.poly][e.edge] = Some(f);
        full_pairing[f.poly][f.edge] = Some(e);
        severed.insert((e.min(f), e.max(f)));
    }

    // Pass 5: connected components over the severed pairing.
    let mut uf: Vec<usize> = (0..pieces.len()).collect();
    for p in 0..pieces.len() {
        for k in 0..pieces[p].len() {
            let e = EdgeRef::new(p, k);
            if let Some(f) = full_pairing[p][k] {
                if !severed.contains(&(e.min(f), e.max(f))) {
                    let a = find(&mut uf, p);
                    let b = find(&mut uf, f.poly);
                    uf[a] = b;
                }
            }
        }
    }
    let mut root_to_comp: BTreeMap<usize, usize> = BTreeMap::new();
    let mut component_of: Vec<usize> = vec![0; pieces.len()];
    for p in 0..pieces.len() {
        let r = find(&mut uf, p);
        let next = root_to_comp.len();
        let c = *root_to_comp.entry(r).or_insert(next);
        component_of[p] = c;
    }
    Ok(CutComplex {
        pieces,
        orig_chart,
        full_pairing,
        slit_edge,
        severed,
        component_of,
    })
}

/// Cut the surface along all saddle connections in direction `d` and return
/// the invariant components with classification, plus the shared complex.
pub fn decompose(s: &Surface, d: &Direction, step_cap: usize) -> Result<Decomposition> {
    let (connections, complete) = saddle_connections_in_direction(s, d, step_cap);
    let complex = cut_along(s, &connections)?;

    // Per-component surfaces and classification.
    let comp_count = complex.component_of.iter().copied().max().unwrap_or(0) + 1;
    let mut components = Vec::with_capacity(comp_count);
    for c in 0..comp_count {
        let piece_ids: Vec<usize> = (0..complex.pieces.len())
            .filter(|p| complex.component_of[*p] == c)
            .collect();
        let id_set: BTreeSet<usize> = piece_ids.iter().copied().collect();
        let surface = complex.subsurface(&id_set, false)?;
        let area = surface.total_area();
        let (genus, boundary_circles) = surface.bordered_topology()?;
        let has_slit = surface
            .boundary_edges()
            .any(|e| surface.boundary_origin(e) == Some(BoundaryOrigin::Slit));
        // A slit parallel to the direction lies along the cut system and
        // blocks nothing; only a transverse slit absorbs leaves into the
        // pole domain.
        let has_blocking_slit = surface.boundary_edges().any(|e| {
            surface.boundary_origin(e) == Some(BoundaryOrigin::Slit)
                && !surface
                    .polygon(e.poly)
                    .edge_vec(e.edge)
                    .cross(&d.as_vec())
                    .is_zero()
        });
        let mut cylinder_holonomy = None;
        let mut iet = None;
        let class = if has_blocking_slit {
            ComponentClass::PoleAdjacentFree
        } else if !complete {
            ComponentClass::UndeterminedClass
        } else {
            match classify_closed_leaves(&surface, d, step_cap) {
                LeafCensus::AllClosed(h) => {
                    cylinder_holonomy = Some(h);
                    iet = first_return_map(&surface, d, step_cap);
                    if genus == 0 && boundary_circles == 2 {
                        ComponentClass::FiniteCylinder
                    } else {
                        ComponentClass::UndeterminedClass
                    }
                }
                LeafCensus::NoneClosed => {
                    iet = first_return_map(&surface, d, step_cap);
                    let nontrivial =
                        iet.as_ref().map(|r| r.interval_count() >= 2).unwrap_or(false);
                    if genus >= 1 && nontrivial && !has_slit {
                        ComponentClass::MinimalPresumed
                    } else {
                        ComponentClass::UndeterminedClass
                    }
                }
                LeafCensus::Mixed => ComponentClass::UndeterminedClass,
            }
        };
        components.push(InvariantComponent {
            piece_ids,
            surface,
            direction: d.clone(),
            class,
            area,
            genus,
            boundary_circles,
            cylinder_holonomy,
            iet,
            has_slit_boundary: has_slit,
        });
    }

    // Area conservation, exactly.
    let mut total = Rat::zero();
    for c in &components {
        total += c.area.clone();
    }
    if total != s.total_area() {
        return Err(Error::Decompose(format!(
            "area not conserved by cutting: {} != {}",
            total,
            s.total_area()
        )));
    }

    Ok(Decomposition {
        direction: d.clone(),
        complete,
        connections,
        complex,
        components,
    })
}

enum LeafCensus {
    AllClosed(Vec2),
    NoneClosed,
    Mixed,
}

/// Trace the leaf through every piece centroid; a cylinder closes all of
/// them with one common holonomy.
fn classify_closed_leaves(surface: &Surface, d: &Direction, step_cap: usize) -> LeafCensus {
    let mut common: Option<Vec2> = None;
    let mut closed = 0usize;
    let mut open = 0usize;
    for p in 0..surface.polygons().len() {
        let centroid = surface.polygon(p).centroid();
        let mut trace = FlowTrace::new(surface, d.as_vec(), step_cap);
        trace.stop_at = Some((p, centroid.clone()));
        match trace.run(p, centroid) {
            FlowEnd::ClosedUp { holonomy, .. } => {
                closed += 1;
                match &common {
                    None => common = Some(holonomy),
                    Some(h) if *h == holonomy => {}
                    Some(_) => return LeafCensus::Mixed,
                }
            }
            FlowEnd::Cap { .. } => open += 1,
            // A leaf from an interior point hitting a vertex or the boundary
            // means the component is not a clean cylinder.
            _ => return LeafCensus::Mixed,
        }
    }
    match (closed, open) {
        (_, 0) if common.is_some() => LeafCensus::AllClosed(common.unwrap()),
        (0, _) => LeafCensus::NoneClosed,
        _ => LeafCensus::Mixed,
    }
}

/// Exact first-return record on a maximal transversal edge.
fn first_return_map(surface: &Surface, d: &Direction, step_cap: usize) -> Option<IetRecord> {
    let dv = d.as_vec();
    let mut best: Option<(Rat, EdgeRef, EdgeRef)> = None;
    for e in surface.edge_refs() {
        if let Some(f) = surface.partner(e) {
            let ev = surface.polygon(e.poly).edge_vec(e.edge);
            if ev.cross(&dv).is_zero() {
                continue;
            }
            let l2 = ev.norm2();
            let canonical = (e.min(f), e.max(f));
            if best.as_ref().map_or(true, |(b, ..)| l2 > *b) {
                best = Some((l2, canonical.0, canonical.1));
            }
        }
    }
    let (_, t_edge, t_partner) = best?;
    let seg = surface.edge_segment(t_edge);
    let seg_vec = seg.vector();
    let param_of = |x: &Vec2| -> Rat { x.sub(&seg.start).dot(&seg_vec) / seg_vec.norm2() };

    // Breakpoints: backward traces from every singular corner land on the
    // transversal at the discontinuities of the forward return map.
    let back = dv.neg();
    let mut breakpoints: BTreeSet<Rat> = BTreeSet::new();
    for class in surface.classes().iter().filter(|c| c.singular) {
        for &corner in &class.corners {
            let (u, w) = surface.corner_rays(corner);
            let inside = u.cross(&back).is_positive() && back.cross(&w).is_positive();
            let along = |a: &Vec2| a.cross(&back).is_zero() && a.dot(&back).is_positive();
            if !(inside || along(&u) || along(&w)) {
                continue;
            }
            let mut trace = FlowTrace::new(surface, back.clone(), step_cap);
            trace.return_to = Some((t_edge, t_partner));
            match trace.run(corner.poly, surface.corner_point(corner).clone()) {
                FlowEnd::Boundary { edge, point, .. } if edge == t_edge || edge == t_partner => {
                    let x = if edge == t_edge {
                        point
                    } else {
                        let (_, p2) = surface.transport(edge, &point).expect("glued");
                        p2
                    };
                    let t = param_of(&x);
                    if t.is_positive() && t < Rat::one() {
                        breakpoints.insert(t);
                    }
                }
                _ => {}
            }
        }
    }
    let bps: Vec<Rat> = breakpoints.iter().cloned().collect();
    let mut cuts = vec![Rat::zero()];
    cuts.extend(bps.iter().cloned());
    cuts.push(Rat::one());
    let into_side = if seg_vec.cross(&dv).is_positive() {
        t_edge
    } else {
        t_partner
    };
    let mut translations = Vec::new();
    for wdw in cuts.windows(2) {
        let mid = (&wdw[0] + &wdw[1]) / crate::geom::rat_i(2);
        let start_on_edge = seg.start.add(&seg_vec.scale(&mid));
        let (poly, start) = if into_side == t_edge {
            (t_edge.poly, start_on_edge.clone())
        } else {
            let (f, x) = surface.transport(t_edge, &start_on_edge).expect("glued");
            (f.poly, x)
        };
        let mut trace = FlowTrace::new(surface, dv.clone(), step_cap);
        trace.return_to = Some((t_edge, t_partner));
        match trace.run(poly, start) {
            FlowEnd::Boundary { edge, point, .. } if edge == t_edge || edge == t_partner => {
                let x = if edge == t_edge {
                    point
                } else {
                    let (_, p2) = surface.transport(edge, &point).expect("glued");
                    p2
                };
                translations.push(Some(param_of(&x) - mid));
            }
            _ => translations.push(None),
        }
    }
    Some(IetRecord {
        transversal: (t_edge, t_partner),
        breakpoints: bps,
        translations,
    })
}
