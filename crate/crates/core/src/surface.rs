//! The slit translation surface: convex polygon charts, translation gluings,
//! boundary (slit) edges, vertex classes with exact cone angles, boundary
//! loops, genus and stratum signature.

use crate::angle::Angle;
use crate::geom::{PolygonChart, Segment, Vec2};
use crate::{Error, Rat, Result};
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;

/// A directed edge of the polygon complex: edge `edge` of polygon `poly`
/// runs from vertex `edge` to vertex `edge + 1 (mod n)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeRef {
    pub poly: usize,
    pub edge: usize,
}

impl fmt::Debug for EdgeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}.{}", self.poly, self.edge)
    }
}

impl EdgeRef {
    pub fn new(poly: usize, edge: usize) -> Self {
        EdgeRef { poly, edge }
    }
}

/// A polygon corner: vertex `vertex` of polygon `poly`, spanning the sector
/// between outgoing edge `vertex` and incoming edge `vertex - 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CornerRef {
    pub poly: usize,
    pub vertex: usize,
}

impl fmt::Debug for CornerRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}.{}", self.poly, self.vertex)
    }
}

/// Where a boundary edge came from: a slit declared in the input (standing
/// in for a pole domain) or a cut made by a decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryOrigin {
    Slit,
    Cut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexKind {
    Interior,
    Boundary,
}

/// A class of polygon corners identified by the gluings: one point of the
/// surface together with its total angle.
#[derive(Debug, Clone)]
pub struct VertexClass {
    /// Interior classes: the full corner cycle in counterclockwise walk
    /// order. Boundary classes: the corner chain from the clockwise-most
    /// corner to the counterclockwise-most one.
    pub corners: Vec<CornerRef>,
    pub kind: VertexKind,
    /// Total surface-side angle.
    pub angle: Angle,
    /// Whether trajectories stop here and saddle connections may end here.
    pub singular: bool,
}

impl VertexClass {
    /// Cone order `a` for an interior class of angle `(1 + a) 2 pi`.
    pub fn cone_order(&self) -> Option<u64> {
        match self.kind {
            VertexKind::Interior => self.angle.as_two_pi_multiple().map(|m| m - 1),
            VertexKind::Boundary => None,
        }
    }
}

/// Zero orders, pole orders and genus of the capped surface, with the
/// stratum relation already verified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratumSignature {
    pub zeros: Vec<u64>,
    pub poles: Vec<u32>,
    pub genus: u64,
    /// Set when the surface has no boundary and was accepted in no-pole
    /// test mode.
    pub no_pole_mode: bool,
}

impl fmt::Display for StratumSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H(")?;
        for (i, z) in self.zeros.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{z}")?;
        }
        for p in &self.poles {
            write!(f, ",-{p}")?;
        }
        write!(f, ")")
    }
}

impl StratumSignature {
    pub fn zero_count(&self) -> usize {
        self.zeros.len()
    }
    pub fn pole_count(&self) -> usize {
        self.poles.len()
    }
}

/// A slit translation surface. Immutable after construction.
#[derive(Clone)]
pub struct Surface {
    name: Option<String>,
    polygons: Vec<PolygonChart>,
    /// Per edge: the glued partner, or `None` for boundary edges.
    pairing: Vec<Vec<Option<EdgeRef>>>,
    /// Per edge: `Some(origin)` exactly when the edge is boundary.
    origins: Vec<Vec<Option<BoundaryOrigin>>>,
    /// Declared pole order per boundary loop (canonical loop order).
    pole_orders: BTreeMap<usize, u32>,
    // Derived data.
    class_of: Vec<Vec<usize>>,
    classes: Vec<VertexClass>,
    boundary_loops: Vec<Vec<EdgeRef>>,
}

impl fmt::Debug for Surface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Surface({} polygons, {} classes, {} boundary loops)",
            self.polygons.len(),
            self.classes.len(),
            self.boundary_loops.len()
        )
    }
}

impl Surface {
    /// Validate raw polygons and gluings and compute the derived structure.
    /// All boundary edges are marked as slits; this is the entry point for
    /// input data.
    pub fn build(
        name: Option<String>,
        polygons: Vec<PolygonChart>,
        gluings: &[(EdgeRef, EdgeRef)],
        pole_orders: BTreeMap<usize, u32>,
    ) -> Result<Surface> {
        let mut pairing: Vec<Vec<Option<EdgeRef>>> = polygons
            .iter()
            .map(|p| vec![None; p.len()])
            .collect();
        let in_range = |e: &EdgeRef| e.poly < polygons.len() && e.edge < polygons[e.poly].len();
        for (a, b) in gluings {
            if !in_range(a) || !in_range(b) {
                return Err(Error::surface(format!(
                    "dangling gluing reference {a:?} <-> {b:?}"
                )));
            }
            if a == b {
                return Err(Error::surface(format!("edge {a:?} glued to itself")));
            }
            if pairing[a.poly][a.edge].is_some() || pairing[b.poly][b.edge].is_some() {
                return Err(Error::surface(format!(
                    "edge appears in more than one gluing: {a:?} <-> {b:?}"
                )));
            }
            pairing[a.poly][a.edge] = Some(*b);
            pairing[b.poly][b.edge] = Some(*a);
        }
        let origins = pairing
            .iter()
            .map(|row| {
                row.iter()
                    .map(|p| p.is_none().then_some(BoundaryOrigin::Slit))
                    .collect()
            })
            .collect();
        if polygons.len() == 1 && pairing[0].iter().all(|p| p.is_none()) {
            return Err(Error::surface(
                "invalid translation data: polygon has no glued edges",
            ));
        }
        let mut s = Surface::assemble(name, polygons, pairing, origins, pole_orders)?;
        // An input surface with no singular point at all (an unslit torus
        // cover) still needs a marked point for saddle connections to
        // exist: mark every class. Decomposition sub-surfaces skip this.
        if s.classes.iter().all(|c| !c.singular) {
            for c in &mut s.classes {
                c.singular = true;
            }
        }
        Ok(s)
    }

    /// Shared validation and derivation path; also used internally to build
    /// refined surfaces and decomposition components, which carry cut edges.
    pub(crate) fn assemble(
        name: Option<String>,
        polygons: Vec<PolygonChart>,
        pairing: Vec<Vec<Option<EdgeRef>>>,
        origins: Vec<Vec<Option<BoundaryOrigin>>>,
        pole_orders: BTreeMap<usize, u32>,
    ) -> Result<Surface> {
        if polygons.is_empty() {
            return Err(Error::surface("no polygons"));
        }
        // Holonomy validation: glued edges are identified by a translation,
        // so their vectors must be opposite.
        for (p, row) in pairing.iter().enumerate() {
            for (k, partner) in row.iter().enumerate() {
                let e = EdgeRef::new(p, k);
                match partner {
                    None => {
                        if origins[p][k].is_none() {
                            return Err(Error::surface(format!(
                                "boundary edge {e:?} missing origin tag"
                            )));
                        }
                    }
                    Some(f) => {
                        if origins[p][k].is_some() {
                            return Err(Error::surface(format!(
                                "glued edge {e:?} carries a boundary tag"
                            )));
                        }
                        if pairing[f.poly][f.edge] != Some(e) {
                            return Err(Error::surface(format!(
                                "asymmetric pairing at {e:?}"
                            )));
                        }
                        let ev = polygons[p].edge_vec(k);
                        let fv = polygons[f.poly].edge_vec(f.edge);
                        if ev.add(&fv) != Vec2::zero() {
                            return Err(Error::surface(format!(
                                "holonomy mismatch: {e:?} and {f:?} are not opposite translates"
                            )));
                        }
                    }
                }
            }
        }
        // Connectivity of the glued complex.
        {
            let n = polygons.len();
            let mut seen = vec![false; n];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(p) = stack.pop() {
                for partner in pairing[p].iter().flatten() {
                    if !seen[partner.poly] {
                        seen[partner.poly] = true;
                        stack.push(partner.poly);
                    }
                }
            }
            if seen.iter().any(|s| !s) {
                return Err(Error::surface("disconnected complex"));
            }
        }
        let mut s = Surface {
            name,
            polygons,
            pairing,
            origins,
            pole_orders,
            class_of: Vec::new(),
            classes: Vec::new(),
            boundary_loops: Vec::new(),
        };
        s.compute_classes()?;
        s.compute_boundary_loops()?;
        for loop_id in s.pole_orders.keys() {
            if *loop_id >= s.boundary_loops.len() {
                return Err(Error::surface(format!(
                    "pole declared for nonexistent boundary loop {loop_id}"
                )));
            }
        }
        Ok(s)
    }

    // ------------------------------------------------------------------
    // Accessors
    // ------------------------------------------------------------------

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn polygons(&self) -> &[PolygonChart] {
        &self.polygons
    }

    pub fn polygon(&self, p: usize) -> &PolygonChart {
        &self.polygons[p]
    }

    pub fn partner(&self, e: EdgeRef) -> Option<EdgeRef> {
        self.pairing[e.poly][e.edge]
    }

    pub fn pairing(&self) -> &[Vec<Option<EdgeRef>>] {
        &self.pairing
    }

    pub fn is_boundary(&self, e: EdgeRef) -> bool {
        self.pairing[e.poly][e.edge].is_none()
    }

    pub fn boundary_origin(&self, e: EdgeRef) -> Option<BoundaryOrigin> {
        self.origins[e.poly][e.edge]
    }

    pub fn classes(&self) -> &[VertexClass] {
        &self.classes
    }

    pub fn class_id_of(&self, c: CornerRef) -> usize {
        self.class_of[c.poly][c.vertex]
    }

    pub fn class_of(&self, c: CornerRef) -> &VertexClass {
        &self.classes[self.class_id_of(c)]
    }

    pub fn boundary_loops(&self) -> &[Vec<EdgeRef>] {
        &self.boundary_loops
    }

    pub fn pole_order(&self, loop_id: usize) -> Option<u32> {
        self.pole_orders.get(&loop_id).copied()
    }

    pub fn pole_orders(&self) -> &BTreeMap<usize, u32> {
        &self.pole_orders
    }

    pub fn edge_segment(&self, e: EdgeRef) -> Segment {
        self.polygons[e.poly].edge(e.edge)
    }

    /// All edges of the complex, one `EdgeRef` per slot.
    pub fn edge_refs(&self) -> impl Iterator<Item = EdgeRef> + '_ {
        self.polygons.iter().enumerate().flat_map(|(p, poly)| {
            (0..poly.len()).map(move |k| EdgeRef::new(p, k))
        })
    }

    pub fn boundary_edges(&self) -> impl Iterator<Item = EdgeRef> + '_ {
        self.edge_refs().filter(|e| self.is_boundary(*e))
    }

    /// Translation applied to a point when crossing the glued edge `e`.
    pub fn gluing_translation(&self, e: EdgeRef) -> Option<Vec2> {
        let f = self.partner(e)?;
        let f_start = self.polygons[f.poly].vertex(f.edge).clone();
        let e_end = self.polygons[e.poly].vertex(e.edge + 1).clone();
        Some(f_start.sub(&e_end))
    }

    /// Cross glued edge `e` at chart point `x`, returning the partner edge
    /// and the transported point in the partner's chart.
    pub fn transport(&self, e: EdgeRef, x: &Vec2) -> Option<(EdgeRef, Vec2)> {
        let f = self.partner(e)?;
        let t = self.gluing_translation(e)?;
        Some((f, x.add(&t)))
    }

    // ------------------------------------------------------------------
    // Corner geometry and walks
    // ------------------------------------------------------------------

    /// Boundary rays of a corner sector: `(d_out, d_in)`. The sector spans
    /// counterclockwise from `d_out` (along the outgoing edge) to `d_in`
    /// (along the incoming edge, reversed).
    pub fn corner_rays(&self, c: CornerRef) -> (Vec2, Vec2) {
        let poly = &self.polygons[c.poly];
        let n = poly.len();
        let d_out = poly.edge_vec(c.vertex);
        let d_in = poly
            .vertex((c.vertex + n - 1) % n)
            .sub(poly.vertex(c.vertex));
        (d_out, d_in)
    }

    pub fn corner_angle(&self, c: CornerRef) -> Angle {
        self.polygons[c.poly].corner_angle(c.vertex)
    }

    pub fn corner_point(&self, c: CornerRef) -> &Vec2 {
        self.polygons[c.poly].vertex(c.vertex)
    }

    /// Incoming edge of a corner (edge `vertex - 1`).
    pub fn corner_in_edge(&self, c: CornerRef) -> EdgeRef {
        let n = self.polygons[c.poly].len();
        EdgeRef::new(c.poly, (c.vertex + n - 1) % n)
    }

    /// Outgoing edge of a corner (edge `vertex`).
    pub fn corner_out_edge(&self, c: CornerRef) -> EdgeRef {
        EdgeRef::new(c.poly, c.vertex)
    }

    /// Next corner counterclockwise around the same surface point, crossing
    /// the incoming edge; `None` when that edge is boundary.
    pub fn ccw_next(&self, c: CornerRef) -> Option<CornerRef> {
        let f = self.partner(self.corner_in_edge(c))?;
        Some(CornerRef { poly: f.poly, vertex: f.edge })
    }

    /// Next corner clockwise around the same surface point, crossing the
    /// outgoing edge; `None` when that edge is boundary.
    pub fn cw_next(&self, c: CornerRef) -> Option<CornerRef> {
        let f = self.partner(self.corner_out_edge(c))?;
        let n = self.polygons[f.poly].len();
        Some(CornerRef { poly: f.poly, vertex: (f.edge + 1) % n })
    }

    fn compute_classes(&mut self) -> Result<()> {
        let mut class_of: Vec<Vec<Option<usize>>> = self
            .polygons
            .iter()
            .map(|p| vec![None; p.len()])
            .collect();
        let mut classes: Vec<VertexClass> = Vec::new();
        for p in 0..self.polygons.len() {
            for v in 0..self.polygons[p].len() {
                if class_of[p][v].is_some() {
                    continue;
                }
                let start = CornerRef { poly: p, vertex: v };
                // Walk clockwise as far as possible to find a chain end (or
                // detect a cycle). cw_next is injective, so the orbit is a
                // cycle through `start` or a finite chain.
                let mut cursor = start;
                let mut is_cycle = false;
                let mut steps = 0usize;
                loop {
                    match self.cw_next(cursor) {
                        Some(next) => {
                            if next == start {
                                is_cycle = true;
                                break;
                            }
                            cursor = next;
                            steps += 1;
                            if steps > self.total_edge_slots() {
                                return Err(Error::surface("corner walk does not terminate"));
                            }
                        }
                        None => break,
                    }
                }
                // Collect the class in ccw order from the clockwise-most
                // corner (chain) or from the walk cursor (cycle).
                let first = cursor;
                let mut corners = vec![first];
                let mut at = first;
                while let Some(next) = self.ccw_next(at) {
                    if next == first {
                        break;
                    }
                    corners.push(next);
                    at = next;
                    if corners.len() > 4 * self.total_edge_slots() {
                        return Err(Error::surface("corner walk does not terminate"));
                    }
                }
                let kind = if is_cycle {
                    VertexKind::Interior
                } else {
                    VertexKind::Boundary
                };
                let corner_angles: Vec<Angle> =
                    corners.iter().map(|c| self.corner_angle(*c)).collect();
                let angle = Angle::sum(corner_angles.iter());
                let id = classes.len();
                for c in &corners {
                    class_of[c.poly][c.vertex] = Some(id);
                }
                if kind == VertexKind::Interior && angle.as_two_pi_multiple().is_none() {
                    return Err(Error::surface(format!(
                        "interior vertex class at {:?} has cone angle {:?}, not a multiple of 2 pi",
                        start, angle
                    )));
                }
                let singular = match kind {
                    VertexKind::Interior => angle != Angle::two_pi(),
                    VertexKind::Boundary => angle != Angle::pi(),
                };
                classes.push(VertexClass { corners, kind, angle, singular });
            }
        }
        self.class_of = class_of
            .into_iter()
            .map(|row| row.into_iter().map(|c| c.unwrap()).collect())
            .collect();
        self.classes = classes;
        Ok(())
    }

    fn total_edge_slots(&self) -> usize {
        self.polygons.iter().map(|p| p.len()).sum()
    }

    /// The boundary edge that follows `e` along its boundary loop, keeping
    /// the surface on the left.
    pub fn next_boundary_edge(&self, e: EdgeRef) -> EdgeRef {
        let n = self.polygons[e.poly].len();
        let mut c = CornerRef { poly: e.poly, vertex: (e.edge + 1) % n };
        loop {
            let out = self.corner_out_edge(c);
            if self.is_boundary(out) {
                return out;
            }
            c = self.cw_next(c).expect("glued edge must have a cw neighbor");
        }
    }

    fn compute_boundary_loops(&mut self) -> Result<()> {
        let mut loops: Vec<Vec<EdgeRef>> = Vec::new();
        let mut seen: BTreeMap<EdgeRef, bool> = BTreeMap::new();
        let boundary: Vec<EdgeRef> = self.boundary_edges().collect();
        for &e in &boundary {
            seen.insert(e, false);
        }
        for &start in &boundary {
            if seen[&start] {
                continue;
            }
            let mut cycle = vec![start];
            seen.insert(start, true);
            let mut at = self.next_boundary_edge(start);
            while at != start {
                if seen[&at] {
                    return Err(Error::surface("boundary walk is not a disjoint cycle cover"));
                }
                seen.insert(at, true);
                cycle.push(at);
                at = self.next_boundary_edge(at);
            }
            // Canonical rotation: smallest edge first.
            let min_pos = cycle
                .iter()
                .enumerate()
                .min_by_key(|(_, e)| **e)
                .map(|(i, _)| i)
                .unwrap();
            cycle.rotate_left(min_pos);
            loops.push(cycle);
        }
        loops.sort_by_key(|l| l[0]);
        self.boundary_loops = loops;
        Ok(())
    }

    /// The boundary corner classes met along a loop, one entry per edge:
    /// entry `i` is the class sitting between edge `i` and edge `i + 1`.
    pub fn loop_corner_classes(&self, loop_id: usize) -> Vec<usize> {
        self.boundary_loops[loop_id]
            .iter()
            .map(|e| {
                let n = self.polygons[e.poly].len();
                self.class_of[e.poly][(e.edge + 1) % n]
            })
            .collect()
    }

    // ------------------------------------------------------------------
    // Topology and signature
    // ------------------------------------------------------------------

    pub fn total_area(&self) -> Rat {
        let mut acc = Rat::zero();
        for p in &self.polygons {
            acc += p.area();
        }
        acc
    }

    fn edge_class_count(&self) -> usize {
        let slots = self.total_edge_slots();
        let boundary = self.boundary_edges().count();
        (slots - boundary) / 2 + boundary
    }

    /// Euler characteristic of the bordered complex (no caps).
    pub fn euler_characteristic(&self) -> i64 {
        self.classes.len() as i64 - self.edge_class_count() as i64 + self.polygons.len() as i64
    }

    /// Genus of the closed surface obtained by capping each boundary loop
    /// with a disk.
    pub fn genus(&self) -> Result<u64> {
        let chi = self.euler_characteristic() + self.boundary_loops.len() as i64;
        let rem = 2 - chi;
        if rem < 0 || rem % 2 != 0 {
            return Err(Error::surface(format!(
                "capped complex has Euler characteristic {chi}, not a closed orientable surface"
            )));
        }
        Ok((rem / 2) as u64)
    }

    /// Genus and boundary circle count of the bordered surface itself
    /// (`chi = 2 - 2g - b`).
    pub fn bordered_topology(&self) -> Result<(u64, usize)> {
        let b = self.boundary_loops.len();
        let chi = self.euler_characteristic();
        let rem = 2 - b as i64 - chi;
        if rem < 0 || rem % 2 != 0 {
            return Err(Error::surface(format!(
                "bordered complex has chi {chi} with {b} boundary circles"
            )));
        }
        Ok(((rem / 2) as u64, b))
    }

    /// Exact discrete Gauss-Bonnet census: the sum of interior defects
    /// `angle - 2 pi` and corner defects `angle - pi` must equal
    /// `2 pi (2g - 2 + b)`.
    pub fn gauss_bonnet_check(&self) -> Result<()> {
        let (g, b) = self.bordered_topology()?;
        let mut interior = 0i64;
        let mut corners = 0i64;
        let mut lhs = Angle::zero();
        for class in &self.classes {
            match class.kind {
                VertexKind::Interior => interior += 1,
                VertexKind::Boundary => corners += 1,
            }
            lhs = lhs.add(&class.angle);
        }
        let m = 2 * (2 * g as i64 - 2 + b as i64) + 2 * interior + corners;
        if m < 0 {
            return Err(Error::surface(
                "angle census fails: negative expected total".to_string(),
            ));
        }
        if lhs != Angle::from_pi_multiple(m as u64) {
            return Err(Error::surface(format!(
                "angle census fails: total angle {lhs:?} != {m} pi"
            )));
        }
        Ok(())
    }

    /// Read the stratum signature off the cone angles, validating the
    /// declared pole orders loop by loop.
    ///
    /// Capping rule: a boundary corner of surface-side angle `alpha` caps to
    /// total angle `2 pi m`, the smallest multiple of `2 pi` strictly above
    /// `alpha`, and contributes a zero of order `m - 1`. The declared order
    /// `b` of the loop must then satisfy
    /// `sum(cap remainders) = (b - 1) 2 pi + C pi` over the loop's `C`
    /// corners.
    pub fn stratum_signature(&self, allow_no_poles: bool) -> Result<StratumSignature> {
        let genus = self.genus()?;
        let mut zeros: Vec<u64> = Vec::new();
        for class in &self.classes {
            if class.kind == VertexKind::Interior {
                let order = class
                    .cone_order()
                    .ok_or_else(|| Error::surface("bad interior cone angle"))?;
                if order >= 1 {
                    zeros.push(order);
                }
            }
        }
        let mut poles: Vec<u32> = Vec::new();
        for (loop_id, edges) in self.boundary_loops.iter().enumerate() {
            let b = self.pole_order(loop_id).ok_or_else(|| {
                Error::surface(format!(
                    "boundary loop {loop_id} has no declared pole order"
                ))
            })?;
            if b < 1 {
                return Err(Error::surface("pole orders must be >= 1"));
            }
            let corner_classes = self.loop_corner_classes(loop_id);
            let mut gamma_sum = Angle::zero();
            for &cid in &corner_classes {
                let alpha = &self.classes[cid].angle;
                if *alpha == Angle::pi() {
                    // Straight boundary point: caps to 2 pi, remainder pi,
                    // no zero.
                    gamma_sum = gamma_sum.add(&Angle::pi());
                    continue;
                }
                let (m, gamma) = alpha.strict_two_pi_cover();
                gamma_sum = gamma_sum.add(&gamma);
                zeros.push(m - 1);
            }
            let expected = 2 * (b as u64 - 1) + edges.len() as u64;
            if gamma_sum != Angle::from_pi_multiple(expected) {
                return Err(Error::surface(format!(
                    "inconsistent pole declaration: loop {loop_id} with order {b} needs cap \
                     remainder {expected} pi, got {gamma_sum:?}"
                )));
            }
            poles.push(b);
        }
        if zeros.is_empty() {
            // No genuine zero anywhere: report the marked points.
            for class in &self.classes {
                if class.kind == VertexKind::Interior {
                    zeros.push(0);
                }
            }
            if zeros.is_empty() {
                return Err(Error::surface("surface has no zero and no marked point"));
            }
        }
        let no_pole_mode = poles.is_empty();
        if no_pole_mode && !allow_no_poles {
            return Err(Error::surface(
                "surface has no pole; pass no-pole test mode to accept",
            ));
        }
        zeros.sort_unstable_by(|a, b| b.cmp(a));
        let lhs: i64 = zeros.iter().map(|z| *z as i64).sum::<i64>()
            - poles.iter().map(|p| *p as i64).sum::<i64>();
        if lhs != 2 * genus as i64 - 2 {
            return Err(Error::surface(format!(
                "stratum relation violated: sum(a) - sum(b) = {lhs} but 2g - 2 = {}",
                2 * genus as i64 - 2
            )));
        }
        Ok(StratumSignature { zeros, poles, genus, no_pole_mode })
    }

    /// Rebuild with different boundary origin tags (used by cutting).
    pub(crate) fn with_parts(
        &self,
        polygons: Vec<PolygonChart>,
        pairing: Vec<Vec<Option<EdgeRef>>>,
        origins: Vec<Vec<Option<BoundaryOrigin>>>,
    ) -> Result<Surface> {
        Surface::assemble(self.name.clone(), polygons, pairing, origins, BTreeMap::new())
    }
}
