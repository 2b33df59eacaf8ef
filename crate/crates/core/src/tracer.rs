//! Straight-line flow by chart unfolding: separatrix tracing and complete
//! enumeration of saddle connections up to a length bound, never crossing
//! slits.
//!
//! Two engines live here. [`trace_ray`] follows a single ray exactly in
//! rational coordinates, passing straight through regular vertices and
//! stopping at singular points or boundary edges. The enumerator runs a
//! breadth-first search over unfolded charts with an exact visibility cone
//! per branch; cone ends are opened when the bounding ray passes through a
//! singular vertex, which is precisely the statement that saddle connection
//! interiors avoid singularities.

use crate::geom::{Direction, PolygonChart, Segment, Vec2};
use crate::surface::{CornerRef, EdgeRef, Surface, VertexKind};
use crate::{Error, Int, Rat, Result};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::collections::HashSet;

pub const DEFAULT_STEP_CAP: usize = 10_000;
/// Hard cap on explored unfolding nodes per seed before flagging truncation.
pub const DEFAULT_NODE_CAP: usize = 40_000_000;

/// One chart visited by a witness segment. `entry` is the edge crossed into
/// the chart; `None` for the seed chart and for entries through a vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartStep {
    pub poly: usize,
    pub entry: Option<EdgeRef>,
}

/// A saddle connection witness: singular endpoints, holonomy, and the chart
/// chain its segment traverses.
#[derive(Debug, Clone)]
pub struct SaddleConnection {
    pub from_class: usize,
    pub to_class: usize,
    pub from_corner: CornerRef,
    pub holonomy: Vec2,
    pub direction: Direction,
    pub len2: Rat,
    pub chart_path: Vec<ChartStep>,
}

impl SaddleConnection {
    /// Deterministic sort key: by squared length, then direction, then
    /// holonomy, then the seed corner.
    fn sort_key(&self) -> (Rat, Direction, Vec2, CornerRef, usize) {
        (
            self.len2.clone(),
            self.direction.clone(),
            self.holonomy.clone(),
            self.from_corner,
            self.chart_path.len(),
        )
    }
}

/// Exact fate of a traced separatrix.
#[derive(Debug, Clone)]
pub enum RayFate {
    HitsSingularity(Box<SaddleConnection>),
    HitsBoundary {
        edge: EdgeRef,
        point: Vec2,
        dist2: Rat,
    },
    Undetermined {
        crossings: usize,
    },
}

// ---------------------------------------------------------------------
// Exact single-ray tracer
// ---------------------------------------------------------------------

enum ExitKind {
    Vertex(usize),
    Edge(usize, Vec2),
}

struct PolyExit {
    t: Rat,
    kind: ExitKind,
}

/// First exit of the ray `p + t d` (t > 0) from a convex polygon whose
/// closed region contains `p`. Along-edge runs exit at the far vertex.
fn polygon_exit(poly: &PolygonChart, p: &Vec2, d: &Vec2) -> Option<PolyExit> {
    let n = poly.len();
    let mut best: Option<PolyExit> = None;
    let mut push = |t: Rat, kind: ExitKind| {
        let better = match &best {
            None => true,
            Some(b) => {
                t < b.t
                    || (t == b.t
                        && matches!(kind, ExitKind::Vertex(_))
                        && matches!(b.kind, ExitKind::Edge(..)))
            }
        };
        if better {
            best = Some(PolyExit { t, kind });
        }
    };
    let dd = d.norm2();
    for k in 0..n {
        let a = poly.vertex(k).clone();
        let b = poly.vertex(k + 1).clone();
        let e = b.sub(&a);
        let den = d.cross(&e);
        let ap = a.sub(p);
        if den.is_zero() {
            if ap.cross(d).is_zero() {
                // Ray runs along this edge's line: it can exit at a vertex.
                for (v, idx) in [(a.clone(), k), (b.clone(), (k + 1) % n)] {
                    let t = v.sub(p).dot(d) / dd.clone();
                    if t.is_positive() {
                        push(t, ExitKind::Vertex(idx));
                    }
                }
            }
            continue;
        }
        let t = ap.cross(&e) / den.clone();
        if !t.is_positive() {
            continue;
        }
        let u = ap.cross(d) / den;
        if u.is_negative() || u > Rat::one() {
            continue;
        }
        if u.is_zero() {
            push(t, ExitKind::Vertex(k));
        } else if u == Rat::one() {
            push(t, ExitKind::Vertex((k + 1) % n));
        } else {
            let x = p.add(&d.scale(&t));
            push(t, ExitKind::Edge(k, x));
        }
    }
    best
}

fn ray_strictly_inside(u: &Vec2, w: &Vec2, d: &Vec2) -> bool {
    u.cross(d).is_positive() && d.cross(w).is_positive()
}

fn ray_along(u: &Vec2, d: &Vec2) -> bool {
    u.cross(d).is_zero() && u.dot(d).is_positive()
}

/// Closed sector membership for sectors of angle at most pi.
fn ray_in_closed_sector(u: &Vec2, w: &Vec2, d: &Vec2) -> bool {
    ray_along(u, d) || ray_along(w, d) || ray_strictly_inside(u, w, d)
}

enum VertexPass {
    Stop,
    Continue(CornerRef),
    OutOfSurface,
}

/// Decide what happens when the flow reaches vertex `vertex` of polygon
/// `poly` heading in direction `d`.
fn pass_vertex(s: &Surface, poly: usize, vertex: usize, d: &Vec2) -> VertexPass {
    let class = s.class_of(CornerRef { poly, vertex });
    if class.singular {
        return VertexPass::Stop;
    }
    for &c in &class.corners {
        let (u, w) = s.corner_rays(c);
        if ray_along(&u, d) || ray_strictly_inside(&u, &w, d) {
            return VertexPass::Continue(c);
        }
    }
    // Only possible at a regular boundary vertex (total angle pi) with the
    // ray pointing out of the surface.
    VertexPass::OutOfSurface
}

pub enum FlowEnd {
    /// Reached a singular vertex.
    Vertex {
        corner: CornerRef,
        unfolded: Vec2,
        path: Vec<ChartStep>,
    },
    Boundary {
        edge: EdgeRef,
        point: Vec2,
        unfolded: Vec2,
        #[allow(dead_code)]
        path: Vec<ChartStep>,
    },
    Cap {
        crossings: usize,
    },
    /// The flow line passed through `stop_at` again (closed-leaf detection).
    ClosedUp {
        holonomy: Vec2,
        crossings: usize,
    },
}

pub struct FlowTrace<'a> {
    pub surface: &'a Surface,
    pub dir: Vec2,
    pub step_cap: usize,
    /// When set, stop as soon as the flow line passes through this chart
    /// point again (the start of a leaf).
    pub stop_at: Option<(usize, Vec2)>,
    /// When set, stop when crossing either side of this edge pair
    /// (first-return maps to a transversal).
    pub return_to: Option<(EdgeRef, EdgeRef)>,
}

impl<'a> FlowTrace<'a> {
    pub fn new(surface: &'a Surface, dir: Vec2, step_cap: usize) -> Self {
        FlowTrace { surface, dir, step_cap, stop_at: None, return_to: None }
    }

    /// Run from a chart point (interior, edge or vertex point of `poly`).
    pub fn run(&self, start_poly: usize, start: Vec2) -> FlowEnd {
        self.run_recording(start_poly, start).0
    }

    /// Like [`FlowTrace::run`], also returning the chart chords
    /// `(poly, entry point, exit point)` the flow line traverses.
    pub fn run_recording(&self, start_poly: usize, start: Vec2) -> (FlowEnd, Vec<(usize, Vec2, Vec2)>) {
        let s = self.surface;
        let mut poly = start_poly;
        let mut pos = start.clone();
        let mut to_unfolded = start.neg();
        let mut path = vec![ChartStep { poly, entry: None }];
        let mut chords: Vec<(usize, Vec2, Vec2)> = Vec::new();
        let mut crossings = 0usize;
        loop {
            let exit = match polygon_exit(s.polygon(poly), &pos, &self.dir) {
                Some(e) => e,
                None => return (FlowEnd::Cap { crossings }, chords),
            };
            // Closed-leaf detection: does the chord through this chart pass
            // through the stop point before exiting?
            if let Some((stop_poly, stop_point)) = &self.stop_at {
                if *stop_poly == poly && crossings > 0 {
                    let delta = stop_point.sub(&pos);
                    if delta.cross(&self.dir).is_zero() && !delta.dot(&self.dir).is_negative() {
                        let along = delta.dot(&self.dir);
                        let exit_along = match &exit.kind {
                            ExitKind::Vertex(v) => {
                                s.polygon(poly).vertex(*v).sub(&pos).dot(&self.dir)
                            }
                            ExitKind::Edge(_, x) => x.sub(&pos).dot(&self.dir),
                        };
                        if along <= exit_along {
                            let holonomy = stop_point.add(&to_unfolded);
                            if &pos != stop_point {
                                chords.push((poly, pos.clone(), stop_point.clone()));
                            }
                            return (FlowEnd::ClosedUp { holonomy, crossings }, chords);
                        }
                    }
                }
            }
            match exit.kind {
                ExitKind::Vertex(v) => {
                    let vp = s.polygon(poly).vertex(v).clone();
                    if pos != vp {
                        chords.push((poly, pos.clone(), vp.clone()));
                    }
                    match pass_vertex(s, poly, v, &self.dir) {
                        VertexPass::Stop => {
                            let unfolded = vp.add(&to_unfolded);
                            return (
                                FlowEnd::Vertex {
                                    corner: CornerRef { poly, vertex: v },
                                    unfolded,
                                    path,
                                },
                                chords,
                            );
                        }
                        VertexPass::Continue(c) => {
                            let unf = vp.add(&to_unfolded);
                            let new_vp = s.corner_point(c).clone();
                            to_unfolded = unf.sub(&new_vp);
                            poly = c.poly;
                            pos = new_vp;
                            path.push(ChartStep { poly, entry: None });
                        }
                        VertexPass::OutOfSurface => {
                            let unfolded = vp.add(&to_unfolded);
                            let edge = s.corner_out_edge(CornerRef { poly, vertex: v });
                            return (
                                FlowEnd::Boundary { edge, point: vp, unfolded, path },
                                chords,
                            );
                        }
                    }
                }
                ExitKind::Edge(k, x) => {
                    let e = EdgeRef::new(poly, k);
                    chords.push((poly, pos.clone(), x.clone()));
                    if let Some((r0, r1)) = &self.return_to {
                        if e == *r0 || e == *r1 {
                            let unfolded = x.add(&to_unfolded);
                            return (
                                FlowEnd::Boundary { edge: e, point: x, unfolded, path },
                                chords,
                            );
                        }
                    }
                    match s.transport(e, &x) {
                        None => {
                            let unfolded = x.add(&to_unfolded);
                            return (
                                FlowEnd::Boundary { edge: e, point: x, unfolded, path },
                                chords,
                            );
                        }
                        Some((f, x2)) => {
                            let t = s.gluing_translation(e).expect("glued edge");
                            to_unfolded = to_unfolded.sub(&t);
                            poly = f.poly;
                            pos = x2;
                            path.push(ChartStep { poly, entry: Some(f) });
                        }
                    }
                }
            }
            crossings += 1;
            if crossings > self.step_cap {
                return (FlowEnd::Cap { crossings }, chords);
            }
        }
    }
}

/// Trace the separatrix leaving the singular point at `corner` in direction
/// `d`, which must point into the corner's sector.
pub fn trace_ray(
    s: &Surface,
    corner: CornerRef,
    d: &Direction,
    step_cap: usize,
) -> Result<RayFate> {
    let (u, w) = s.corner_rays(corner);
    let dv = d.as_vec();
    if !ray_in_closed_sector(&u, &w, &dv) {
        return Err(Error::Trace(format!(
            "direction {d} does not point into the sector of {corner:?}"
        )));
    }
    let start = s.corner_point(corner).clone();
    let trace = FlowTrace::new(s, dv, step_cap);
    Ok(match trace.run(corner.poly, start) {
        FlowEnd::Vertex { corner: arrival, unfolded, path } => {
            let len2 = unfolded.norm2();
            RayFate::HitsSingularity(Box::new(SaddleConnection {
                from_class: s.class_id_of(corner),
                to_class: s.class_id_of(arrival),
                from_corner: corner,
                direction: Direction::normalize(&unfolded).expect("nonzero holonomy"),
                holonomy: unfolded,
                len2,
                chart_path: path,
            }))
        }
        FlowEnd::Boundary { edge, point, unfolded, .. } => RayFate::HitsBoundary {
            edge,
            point,
            dist2: unfolded.norm2(),
        },
        FlowEnd::Cap { crossings } => RayFate::Undetermined { crossings },
        FlowEnd::ClosedUp { .. } => unreachable!("no stop point was set"),
    })
}

/// Whether direction `d` belongs to the corner's seeding sector. Sectors are
/// half-open `[d_out, d_in)` so that the fan of a vertex class is tiled
/// exactly once; the counterclockwise-most corner of a boundary chain also
/// owns its final ray.
fn seed_contains(s: &Surface, corner: CornerRef, chain_end: bool, d: &Vec2) -> bool {
    let (u, w) = s.corner_rays(corner);
    if ray_along(&u, d) {
        return true;
    }
    if ray_along(&w, d) {
        return chain_end;
    }
    ray_strictly_inside(&u, &w, d)
}

/// Every seeding corner of every singular class, with its chain-end flag.
pub(crate) fn seeds(s: &Surface) -> Vec<(CornerRef, bool)> {
    let mut out = Vec::new();
    for class in s.classes() {
        if !class.singular {
            continue;
        }
        let last = class.corners.len() - 1;
        for (i, &c) in class.corners.iter().enumerate() {
            let chain_end = class.kind == VertexKind::Boundary && i == last;
            out.push((c, chain_end));
        }
    }
    out
}

/// All saddle connections in direction `±d`, found by tracing every
/// separatrix whose sector contains the direction. Returns one record per
/// unoriented connection (oriented along `+d`) plus a completeness verdict.
pub fn saddle_connections_in_direction(
    s: &Surface,
    d: &Direction,
    step_cap: usize,
) -> (Vec<SaddleConnection>, bool) {
    let mut out = Vec::new();
    let mut complete = true;
    let dirs = [d.clone(), d.opposite()];
    for (corner, chain_end) in seeds(s) {
        for dd in &dirs {
            if !seed_contains(s, corner, chain_end, &dd.as_vec()) {
                continue;
            }
            match trace_ray(s, corner, dd, step_cap).expect("seed sector contains direction") {
                RayFate::HitsSingularity(conn) => {
                    if conn.direction == *d {
                        out.push(*conn);
                    }
                }
                RayFate::HitsBoundary { .. } => {}
                RayFate::Undetermined { .. } => complete = false,
            }
        }
    }
    out.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    (out, complete)
}

// ---------------------------------------------------------------------
// Enumeration by cone search over unfolded charts
// ---------------------------------------------------------------------

type IVec = (i128, i128);

fn icross(a: IVec, b: IVec) -> i128 {
    a.0 * b.1 - a.1 * b.0
}

fn idot(a: IVec, b: IVec) -> i128 {
    a.0 * b.0 + a.1 * b.1
}

fn isub(a: IVec, b: IVec) -> IVec {
    (a.0 - b.0, a.1 - b.1)
}

fn iadd(a: IVec, b: IVec) -> IVec {
    (a.0 + b.0, a.1 + b.1)
}

fn ineg(a: IVec) -> IVec {
    (-a.0, -a.1)
}

fn inorm2(a: IVec) -> i128 {
    idot(a, a)
}

fn iprimitive(a: IVec) -> IVec {
    let g = a.0.unsigned_abs().gcd(&a.1.unsigned_abs()) as i128;
    if g == 0 {
        a
    } else {
        (a.0 / g, a.1 / g)
    }
}

fn same_ray(a: IVec, b: IVec) -> bool {
    icross(a, b) == 0 && idot(a, b) > 0
}

/// A visibility cone of angle at most pi, with independently open or closed
/// boundary rays. An open end marks a ray blocked by a singular vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Cone {
    u: IVec,
    w: IVec,
    open_u: bool,
    open_w: bool,
}

impl Cone {
    fn normalized(u: IVec, w: IVec, open_u: bool, open_w: bool) -> Option<Cone> {
        let u = iprimitive(u);
        let w = iprimitive(w);
        let c = icross(u, w);
        if c < 0 {
            return None;
        }
        if c == 0 && idot(u, w) > 0 && (open_u || open_w) {
            // Single ray with an open end is empty.
            return None;
        }
        Some(Cone { u, w, open_u, open_w })
    }

    fn contains(&self, v: IVec) -> bool {
        if v == (0, 0) {
            return false;
        }
        let along_u = same_ray(self.u, v);
        let along_w = same_ray(self.w, v);
        if along_u && along_w {
            return !self.open_u && !self.open_w;
        }
        if along_u {
            return !self.open_u;
        }
        if along_w {
            return !self.open_w;
        }
        icross(self.u, v) > 0 && icross(v, self.w) > 0
    }

    /// Closed-cone membership (openness ignored); picks intersection
    /// boundaries.
    fn contains_weak(&self, v: IVec) -> bool {
        if same_ray(self.u, v) || same_ray(self.w, v) {
            return true;
        }
        icross(self.u, v) > 0 && icross(v, self.w) > 0
    }

    fn intersect(&self, other: &Cone) -> Option<Cone> {
        let (u, open_u) = if same_ray(self.u, other.u) {
            (self.u, self.open_u || other.open_u)
        } else if other.contains_weak(self.u) {
            (self.u, self.open_u)
        } else if self.contains_weak(other.u) {
            (other.u, other.open_u)
        } else {
            return None;
        };
        let (w, open_w) = if same_ray(self.w, other.w) {
            (self.w, self.open_w || other.open_w)
        } else if other.contains_weak(self.w) {
            (self.w, self.open_w)
        } else if self.contains_weak(other.w) {
            (other.w, other.open_w)
        } else {
            return None;
        };
        let cone = Cone::normalized(u, w, open_u, open_w)?;
        // Both resulting rays must lie inside both parents as weak
        // boundaries; anything stricter is already encoded in the openness.
        for parent in [self, other] {
            for ray in [cone.u, cone.w] {
                if !parent.contains_weak(ray) {
                    return None;
                }
            }
        }
        Some(cone)
    }
}

/// Integer-rescaled copy of the surface for the cone search.
struct IntModel {
    polys: Vec<Vec<IVec>>,
    /// Scaled gluing translation per edge (None for boundary).
    translations: Vec<Vec<Option<IVec>>>,
    class_of: Vec<Vec<usize>>,
    singular: Vec<bool>,
    /// Squared length bound: `n` is within iff `n * bound_den <= bound_num`.
    bound_num: i128,
    bound_den: i128,
    denominator: Int,
}

impl IntModel {
    fn build(s: &Surface, l2: &Rat) -> Result<IntModel> {
        if !l2.is_positive() {
            return Err(Error::Trace("length bound must be positive".into()));
        }
        let mut den = Int::one();
        for p in s.polygons() {
            for v in p.vertices() {
                den = den.lcm(v.x.denom());
                den = den.lcm(v.y.denom());
            }
        }
        let scale = |r: &Rat| -> Result<i128> {
            let v = r.numer() * (&den / r.denom());
            v.to_i128()
                .ok_or_else(|| Error::Trace("coordinates overflow the enumeration model".into()))
        };
        let mut polys = Vec::new();
        for p in s.polygons() {
            let vs: Result<Vec<IVec>> = p
                .vertices()
                .iter()
                .map(|v| Ok((scale(&v.x)?, scale(&v.y)?)))
                .collect();
            polys.push(vs?);
        }
        let mut translations = Vec::new();
        for p in 0..polys.len() {
            let mut row = Vec::new();
            for k in 0..polys[p].len() {
                let e = EdgeRef::new(p, k);
                match s.gluing_translation(e) {
                    None => row.push(None),
                    Some(t) => row.push(Some((scale(&t.x)?, scale(&t.y)?))),
                }
            }
            translations.push(row);
        }
        let class_of: Vec<Vec<usize>> = (0..polys.len())
            .map(|p| {
                (0..polys[p].len())
                    .map(|v| s.class_id_of(CornerRef { poly: p, vertex: v }))
                    .collect()
            })
            .collect();
        let singular = s.classes().iter().map(|c| c.singular).collect();
        let d2 = &den * &den;
        let bound_num = (l2.numer() * &d2)
            .to_i128()
            .ok_or_else(|| Error::Trace("length bound overflows the enumeration model".into()))?;
        let bound_den = l2
            .denom()
            .to_i128()
            .ok_or_else(|| Error::Trace("length bound overflows the enumeration model".into()))?;
        // Magnitude guard: cross products of in-range vectors must fit in
        // i128 even after squaring and multiplying by the bound parts.
        let mut max_abs: i128 = 0;
        for p in &polys {
            for v in p {
                max_abs = max_abs.max(v.0.abs()).max(v.1.abs());
            }
        }
        let radius = int_sqrt_ceil(bound_num / bound_den.max(1)) + 1;
        if (4 * max_abs + 4).saturating_add(radius) > (1i128 << 30)
            || bound_num > (1i128 << 100)
        {
            return Err(Error::Trace(
                "surface coordinates too large for the i128 enumeration model".into(),
            ));
        }
        Ok(IntModel {
            polys,
            translations,
            class_of,
            singular,
            bound_num,
            bound_den,
            denominator: den,
        })
    }

    fn within_bound(&self, norm2: i128) -> bool {
        norm2 * self.bound_den <= self.bound_num
    }

    /// Exact `min dist^2 <= bound` test for the segment `[a, b]` against the
    /// origin.
    fn segment_within_bound(&self, a: IVec, b: IVec) -> bool {
        if self.within_bound(inorm2(a)) || self.within_bound(inorm2(b)) {
            return true;
        }
        let e = isub(b, a);
        if idot(ineg(a), e) > 0 && idot(ineg(b), ineg(e)) > 0 {
            // Perpendicular foot lies inside: dist^2 = cross(e, a)^2 / |e|^2.
            let c = icross(e, a);
            return c * c * self.bound_den <= self.bound_num * inorm2(e);
        }
        false
    }
}

fn int_sqrt_ceil(n: i128) -> i128 {
    if n <= 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as i128 + 2;
    while x * x > n {
        x -= 1;
    }
    while x * x < n {
        x += 1;
    }
    x
}

struct SearchNode {
    poly: usize,
    offset: IVec,
    cone: Cone,
    /// Index into the step arena for path reconstruction.
    step: usize,
}

#[derive(Debug, Clone, Copy)]
struct ArenaStep {
    poly: u32,
    entry_edge: u32,
    has_entry: bool,
    parent: u32,
}

/// Result of a full enumeration.
#[derive(Debug, Clone)]
pub struct Enumeration {
    pub connections: Vec<SaddleConnection>,
    pub truncated: bool,
}

/// Exactly the saddle connections with squared length at most `l2`, each
/// reported once per orientation, found by breadth-first polygon unfolding
/// from every singular sector.
pub fn enumerate_saddle_connections(s: &Surface, l2: &Rat) -> Result<Enumeration> {
    enumerate_with_node_cap(s, l2, DEFAULT_NODE_CAP)
}

pub fn enumerate_with_node_cap(s: &Surface, l2: &Rat, node_cap: usize) -> Result<Enumeration> {
    let model = IntModel::build(s, l2)?;
    let seed_list = seeds(s);
    let per_seed: Vec<(Vec<SaddleConnection>, bool)> = seed_list
        .par_iter()
        .map(|(corner, chain_end)| search_seed(s, &model, *corner, *chain_end, node_cap))
        .collect();
    let mut connections = Vec::new();
    let mut truncated = false;
    for (mut conns, trunc) in per_seed {
        connections.append(&mut conns);
        truncated |= trunc;
    }
    connections.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(Enumeration { connections, truncated })
}

fn search_seed(
    s: &Surface,
    model: &IntModel,
    corner: CornerRef,
    chain_end: bool,
    node_cap: usize,
) -> (Vec<SaddleConnection>, bool) {
    let seed_vertex = model.polys[corner.poly][corner.vertex];
    let n = model.polys[corner.poly].len();
    let d_out = isub(model.polys[corner.poly][(corner.vertex + 1) % n], seed_vertex);
    let d_in = isub(
        model.polys[corner.poly][(corner.vertex + n - 1) % n],
        seed_vertex,
    );
    // Seeding sector [d_out, d_in), closed at d_in only for a chain end.
    let cone = match Cone::normalized(d_out, d_in, false, !chain_end) {
        Some(c) => c,
        None => return (Vec::new(), false),
    };
    let from_class = model.class_of[corner.poly][corner.vertex];

    let mut arena: Vec<ArenaStep> = vec![ArenaStep {
        poly: corner.poly as u32,
        entry_edge: 0,
        has_entry: false,
        parent: 0,
    }];
    let mut queue: Vec<SearchNode> = vec![SearchNode {
        poly: corner.poly,
        offset: ineg(seed_vertex),
        cone,
        step: 0,
    }];
    let mut visited: HashSet<(u32, IVec, IVec, IVec, bool, bool)> = HashSet::new();
    let mut found: HashSet<IVec> = HashSet::new();
    let mut out: Vec<SaddleConnection> = Vec::new();
    let mut truncated = false;
    let mut head = 0usize;

    while head < queue.len() {
        if queue.len() > node_cap {
            truncated = true;
            break;
        }
        let node_idx = head;
        head += 1;
        let (poly, offset, cone, step) = {
            let nd = &queue[node_idx];
            (nd.poly, nd.offset, nd.cone.clone(), nd.step)
        };
        let key = (poly as u32, offset, cone.u, cone.w, cone.open_u, cone.open_w);
        if !visited.insert(key) {
            continue;
        }
        let verts = &model.polys[poly];
        let m = verts.len();
        // Candidate vertices: walk each ray outward, stopping at the first
        // singular vertex (segments may pass through regular ones).
        let mut candidates: Vec<(i128, IVec, usize)> = Vec::new();
        for (idx, v) in verts.iter().enumerate() {
            let p = iadd(*v, offset);
            if p == (0, 0) || !cone.contains(p) {
                continue;
            }
            candidates.push((inorm2(p), p, idx));
        }
        candidates.sort_by_key(|(n2, _, _)| *n2);
        // Nearest singular vertex per ray: trajectories die there.
        let mut blocked_rays: Vec<(IVec, i128)> = Vec::new();
        for (n2, p, idx) in &candidates {
            let ray = iprimitive(*p);
            if blocked_rays.iter().any(|(r, _)| *r == ray) {
                continue;
            }
            let class = model.class_of[poly][*idx];
            if model.singular[class] {
                blocked_rays.push((ray, *n2));
                if model.within_bound(*n2) && found.insert(*p) {
                    out.push(build_connection(
                        model, corner, from_class, class, *p, &arena, step,
                    ));
                }
            }
        }
        // A subtend end is open when its ray is already dead: either the
        // edge endpoint itself is singular, or a nearer singular vertex of
        // this chart lies on the same ray (collinear chains along radial
        // edge lines).
        let ray_dead = |v: IVec, cls: usize| -> bool {
            if model.singular[cls] {
                return true;
            }
            let ray = iprimitive(v);
            blocked_rays
                .iter()
                .any(|(r, n2)| *r == ray && *n2 < inorm2(v))
        };
        // Recurse across glued edges.
        for k in 0..m {
            let a = iadd(verts[k], offset);
            let b = iadd(verts[(k + 1) % m], offset);
            if a == (0, 0) || b == (0, 0) {
                continue;
            }
            if icross(a, b) == 0 {
                // Radial edge: grazing propagation is covered by the edges
                // incident to its endpoints.
                continue;
            }
            let t = match model.translations[poly][k] {
                Some(t) => t,
                None => continue, // boundary edge: trajectories stop here
            };
            let ca = model.class_of[poly][k];
            let cb = model.class_of[poly][(k + 1) % m];
            let (lo, hi, open_lo, open_hi) = if icross(a, b) > 0 {
                (a, b, ray_dead(a, ca), ray_dead(b, cb))
            } else {
                (b, a, ray_dead(b, cb), ray_dead(a, ca))
            };
            let sub = match Cone::normalized(lo, hi, open_lo, open_hi) {
                Some(c) => c,
                None => continue,
            };
            let new_cone = match cone.intersect(&sub) {
                Some(c) => c,
                None => continue,
            };
            if !model.segment_within_bound(a, b) {
                continue;
            }
            let partner = s.partner(EdgeRef::new(poly, k)).expect("glued");
            arena.push(ArenaStep {
                poly: partner.poly as u32,
                entry_edge: partner.edge as u32,
                has_entry: true,
                parent: step as u32,
            });
            queue.push(SearchNode {
                poly: partner.poly,
                offset: isub(offset, t),
                cone: new_cone,
                step: arena.len() - 1,
            });
        }
    }
    (out, truncated)
}

fn build_connection(
    model: &IntModel,
    seed: CornerRef,
    from_class: usize,
    to_class: usize,
    holonomy_scaled: IVec,
    arena: &[ArenaStep],
    step: usize,
) -> SaddleConnection {
    let den = Rat::from_integer(model.denominator.clone());
    let hol = Vec2::new(
        Rat::from_integer(Int::from(holonomy_scaled.0)) / den.clone(),
        Rat::from_integer(Int::from(holonomy_scaled.1)) / den,
    );
    let mut path = Vec::new();
    let mut at = step;
    loop {
        let st = arena[at];
        path.push(ChartStep {
            poly: st.poly as usize,
            entry: st
                .has_entry
                .then(|| EdgeRef::new(st.poly as usize, st.entry_edge as usize)),
        });
        if at == 0 {
            break;
        }
        at = st.parent as usize;
    }
    path.reverse();
    let len2 = hol.norm2();
    SaddleConnection {
        from_class,
        to_class,
        from_corner: seed,
        direction: Direction::new(holonomy_scaled.0, holonomy_scaled.1)
            .expect("nonzero holonomy"),
        holonomy: hol,
        len2,
        chart_path: path,
    }
}

/// Re-verify that a connection's witness segment crosses no boundary edge
/// transversally in any chart it visits.
pub fn witness_avoids_boundary(s: &Surface, conn: &SaddleConnection) -> bool {
    let mut offset = s.corner_point(conn.from_corner).neg();
    let seg_end = conn.holonomy.clone();
    let mut charts: Vec<(usize, Vec2)> = Vec::new();
    for (i, chart) in conn.chart_path.iter().enumerate() {
        if i == 0 {
            charts.push((chart.poly, offset.clone()));
            continue;
        }
        match chart.entry {
            Some(entry) => {
                // `entry` is the edge of the new chart that was crossed; the
                // offset update is the reverse gluing translation.
                let back = s.partner(entry).expect("entry edge is glued");
                let t = s.gluing_translation(back).expect("glued");
                offset = offset.sub(&t);
                charts.push((chart.poly, offset.clone()));
            }
            None => {
                // Vertex passage: the segment only touches the chart at a
                // point, so there is nothing to cross.
                continue;
            }
        }
    }
    for (poly, off) in charts {
        // The witness in this chart's frame runs from -off to holonomy - off.
        let a = Vec2::zero().sub(&off);
        let b = seg_end.sub(&off);
        let seg = match Segment::new(a, b) {
            Ok(s) => s,
            Err(_) => return false,
        };
        for k in 0..s.polygon(poly).len() {
            let e = EdgeRef::new(poly, k);
            if s.is_boundary(e) && seg.crosses_properly(&s.edge_segment(e)) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{rat, rat_i};

    #[test]
    fn polygon_exit_basics() {
        let sq = PolygonChart::new(vec![
            Vec2::new(rat_i(0), rat_i(0)),
            Vec2::new(rat_i(1), rat_i(0)),
            Vec2::new(rat_i(1), rat_i(1)),
            Vec2::new(rat_i(0), rat_i(1)),
        ])
        .unwrap();
        let e = polygon_exit(&sq, &Vec2::zero(), &Vec2::new(rat_i(1), rat_i(1))).unwrap();
        assert!(matches!(e.kind, ExitKind::Vertex(2)));
        let e = polygon_exit(
            &sq,
            &Vec2::new(rat(1, 2), rat(1, 4)),
            &Vec2::new(rat_i(0), rat_i(1)),
        )
        .unwrap();
        match e.kind {
            ExitKind::Edge(k, x) => {
                assert_eq!(k, 2);
                assert_eq!(x, Vec2::new(rat(1, 2), rat_i(1)));
            }
            _ => panic!("expected edge exit"),
        }
        let e = polygon_exit(&sq, &Vec2::zero(), &Vec2::new(rat_i(1), rat_i(0))).unwrap();
        assert!(matches!(e.kind, ExitKind::Vertex(1)));
    }

    #[test]
    fn cone_intersection() {
        let c1 = Cone::normalized((1, 0), (0, 1), false, false).unwrap();
        let c2 = Cone::normalized((1, 1), (-1, 1), false, false).unwrap();
        let i = c1.intersect(&c2).unwrap();
        assert_eq!(i.u, (1, 1));
        assert_eq!(i.w, (0, 1));
        // Disjoint.
        let c3 = Cone::normalized((-1, 0), (-1, -1), false, false).unwrap();
        assert!(c1.intersect(&c3).is_none());
        // Touching in a single closed ray.
        let c4 = Cone::normalized((0, 1), (-1, 0), false, false).unwrap();
        let r = c1.intersect(&c4).unwrap();
        assert!(same_ray(r.u, (0, 1)) && same_ray(r.w, (0, 1)));
        // Openness kills the shared ray.
        let c5 = Cone::normalized((0, 1), (-1, 0), true, false).unwrap();
        assert!(c1.intersect(&c5).is_none());
    }
}
