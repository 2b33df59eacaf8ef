//! Pole domains and the core (geodesic convex hull of the singularities) by
//! straightening boundary loops.
//!
//! Each boundary loop starts as its own degenerate pole domain. While some
//! boundary corner shows a core-side angle below pi, the corner is cut off
//! by the geodesic chord between its neighbouring vertices (found by
//! tracing; collinear singularities split the chord into a chain) and the
//! cut-off piece is absorbed into the domain. The walk ends when every
//! corner satisfies the convexity criterion, leaving the boundary a union
//! of saddle connections.

use crate::angle::Angle;
use crate::foliation::cut_along;
use crate::geom::{Direction, Segment, Vec2};
use crate::region::{region_area, Piece};
use crate::surface::{CornerRef, EdgeRef, Surface};
use crate::tracer::{trace_ray, RayFate, SaddleConnection};
use crate::{Error, Rat, Result};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;

/// A straight boundary arc of the core: a saddle connection given by its
/// chart segment and endpoint classes of the original surface.
#[derive(Debug, Clone)]
pub struct CoreArc {
    /// Chart of the original surface the arc starts in.
    pub chart: usize,
    pub segment: Segment,
    pub from_class: usize,
    pub to_class: usize,
    pub holonomy: Vec2,
}

/// The complement component of the core at one pole.
#[derive(Debug, Clone)]
pub struct PoleDomain {
    pub loop_id: usize,
    pub order: Option<u32>,
    /// Absorbed region in original chart coordinates; empty for a
    /// degenerate domain (the slit itself).
    pub region: Vec<Piece>,
    pub area: Rat,
    /// Boundary of the domain (equivalently, arcs of the core boundary).
    pub boundary: Vec<CoreArc>,
    /// Euler characteristic of the capped domain; 1 for a disk.
    pub euler_characteristic: i64,
    /// False when the walk was stopped by a cap or a blocking slit.
    pub complete: bool,
    pub straightening_steps: usize,
}

/// The core: complement of the open pole domains.
#[derive(Debug, Clone)]
pub struct CoreDescription {
    pub domains: Vec<PoleDomain>,
    /// Interior pieces of the core, in original chart coordinates.
    pub interior: Vec<Piece>,
    pub area: Rat,
    /// The core has empty interior.
    pub is_degenerate: bool,
}

/// Per-loop iteration cap for the straightening walk.
pub const STRAIGHTENING_STEP_CAP: usize = 512;

/// Compute all pole domains by straightening every boundary loop.
pub fn pole_domains(s: &Surface, step_cap: usize) -> Result<Vec<PoleDomain>> {
    Ok(core_of(s, step_cap)?.domains)
}

struct LoopState {
    /// Identifying segments (original chart coordinates) of the current
    /// boundary loop of this domain.
    identity: Vec<(usize, Segment)>,
    region: Vec<Piece>,
    euler: i64,
    complete: bool,
    steps: usize,
    settled: bool,
}

/// Straighten all boundary loops and return the core with its domains.
pub fn core_of(s: &Surface, step_cap: usize) -> Result<CoreDescription> {
    let loops = s.boundary_loops().to_vec();
    let mut states: Vec<LoopState> = loops
        .iter()
        .map(|edges| LoopState {
            identity: edges
                .iter()
                .map(|e| (e.poly, s.edge_segment(*e)))
                .collect(),
            region: Vec::new(),
            euler: 1, // the cap disk
            complete: true,
            steps: 0,
            settled: false,
        })
        .collect();

    // Working surface plus chart provenance per polygon.
    let mut work = s.clone();
    let mut chart_of: Vec<usize> = (0..s.polygons().len()).collect();

    loop {
        // Match current loops of `work` to the tracked domains.
        let current = work.boundary_loops().to_vec();
        let mut loop_of_domain: Vec<Option<usize>> = vec![None; states.len()];
        for (li, edges) in current.iter().enumerate() {
            let segs: Vec<(usize, Segment)> = edges
                .iter()
                .map(|e| (chart_of[e.poly], work.edge_segment(*e)))
                .collect();
            for (di, st) in states.iter().enumerate() {
                if loop_of_domain[di].is_some() {
                    continue;
                }
                if st.identity.iter().any(|(c, idseg)| {
                    segs.iter()
                        .any(|(c2, seg)| c2 == c && segments_overlap_collinear(idseg, seg))
                }) {
                    loop_of_domain[di] = Some(li);
                    break;
                }
            }
        }
        for (di, st) in states.iter_mut().enumerate() {
            if let Some(li) = loop_of_domain[di] {
                st.identity = current[li]
                    .iter()
                    .map(|e| (chart_of[e.poly], work.edge_segment(*e)))
                    .collect();
            } else if !st.settled {
                // Loop vanished without settling: an absorb went wrong.
                st.complete = false;
                st.settled = true;
            }
        }

        // Find a domain with a corner below pi.
        let mut action: Option<(usize, usize, usize)> = None;
        'outer: for (di, st) in states.iter().enumerate() {
            if st.settled || st.steps >= step_cap.min(STRAIGHTENING_STEP_CAP) {
                continue;
            }
            let li = match loop_of_domain[di] {
                Some(l) => l,
                None => continue,
            };
            let corner_classes = work.loop_corner_classes(li);
            for (pos, cid) in corner_classes.iter().enumerate() {
                if work.classes()[*cid].angle < Angle::pi() {
                    action = Some((di, li, pos));
                    break 'outer;
                }
            }
        }
        let (di, li, pos) = match action {
            Some(a) => a,
            None => break,
        };

        match straighten_step(&work, &current[li], pos, step_cap) {
            Ok(StepOutcome::Absorb { chain, absorbed_chi }) => {
                let complex = cut_along(&work, &chain)?;
                let comp_count =
                    complex.component_of.iter().copied().max().unwrap_or(0) + 1;
                if comp_count != 2 {
                    states[di].complete = false;
                    states[di].settled = true;
                    continue;
                }
                // The absorbed side contains the sub-edges of the replaced
                // boundary arc: locate via the corner's incoming edge.
                let sigma1 = current[li][pos];
                let sigma1_seg = work.edge_segment(sigma1);
                let mut absorbed_comp = None;
                for (pid, piece) in complex.pieces.iter().enumerate() {
                    if complex.orig_chart[pid] != sigma1.poly {
                        continue;
                    }
                    for k in 0..piece.len() {
                        let e = EdgeRef::new(pid, k);
                        if complex.full_pairing[pid][k].is_none()
                            && complex.slit_edge.contains(&e)
                            && segment_inside(&sigma1_seg, &piece.edge(k))
                        {
                            absorbed_comp = Some(complex.component_of[pid]);
                        }
                    }
                }
                let absorbed_comp = match absorbed_comp {
                    Some(c) => c,
                    None => {
                        states[di].complete = false;
                        states[di].settled = true;
                        continue;
                    }
                };
                let absorbed_ids: BTreeSet<usize> = (0..complex.pieces.len())
                    .filter(|p| complex.component_of[*p] == absorbed_comp)
                    .collect();
                let kept_ids: BTreeSet<usize> = (0..complex.pieces.len())
                    .filter(|p| complex.component_of[*p] != absorbed_comp)
                    .collect();
                if kept_ids.is_empty() {
                    states[di].complete = false;
                    states[di].settled = true;
                    continue;
                }
                let absorbed_surface = complex.subsurface(&absorbed_ids, false)?;
                if absorbed_surface.euler_characteristic() != absorbed_chi {
                    states[di].complete = false;
                    states[di].settled = true;
                    continue;
                }
                let absorbed_region: Vec<Piece> = absorbed_ids
                    .iter()
                    .map(|&p| Piece {
                        chart: chart_of[complex.orig_chart[p]],
                        vertices: complex.pieces[p].vertices().to_vec(),
                    })
                    .collect();
                let absorbed_area = region_area(&absorbed_region);
                if absorbed_area.is_zero() {
                    states[di].complete = false;
                    states[di].settled = true;
                    continue;
                }
                states[di].region.extend(absorbed_region);
                // Gluing a disk along an arc keeps chi(domain) = 1.
                states[di].euler += absorbed_chi - 1;
                states[di].steps += 1;
                let new_chart: Vec<usize> = kept_ids
                    .iter()
                    .map(|&p| chart_of[complex.orig_chart[p]])
                    .collect();
                work = complex.subsurface(&kept_ids, false)?;
                chart_of = new_chart;
            }
            Ok(StepOutcome::Blocked) | Err(_) => {
                states[di].complete = false;
                states[di].settled = true;
            }
        }
    }

    // Assemble the report from the final working surface.
    let final_loops = work.boundary_loops().to_vec();
    let mut used: Vec<bool> = vec![false; final_loops.len()];
    let mut domains = Vec::new();
    for (di, st) in states.iter().enumerate() {
        let mut matched = None;
        for (li, edges) in final_loops.iter().enumerate() {
            if used[li] {
                continue;
            }
            let hit = edges.iter().any(|e| {
                let seg = work.edge_segment(*e);
                st.identity.iter().any(|(c, idseg)| {
                    *c == chart_of[e.poly] && segments_overlap_collinear(idseg, &seg)
                })
            });
            if hit {
                matched = Some(li);
                used[li] = true;
                break;
            }
        }
        let boundary = match matched {
            Some(li) => loop_arcs(s, &work, &chart_of, &final_loops[li])?,
            None => Vec::new(),
        };
        domains.push(PoleDomain {
            loop_id: di,
            order: s.pole_order(di),
            area: region_area(&st.region),
            region: st.region.clone(),
            boundary,
            euler_characteristic: st.euler,
            complete: st.complete && matched.is_some(),
            straightening_steps: st.steps,
        });
    }
    let interior: Vec<Piece> = (0..work.polygons().len())
        .map(|p| Piece {
            chart: chart_of[p],
            vertices: work.polygon(p).vertices().to_vec(),
        })
        .collect();
    let area = work.total_area();
    Ok(CoreDescription {
        domains,
        interior,
        is_degenerate: area.is_zero(),
        area,
    })
}

enum StepOutcome {
    /// Chain of connections shortcutting the corner, plus the expected
    /// Euler characteristic of the absorbed side.
    Absorb {
        chain: Vec<SaddleConnection>,
        absorbed_chi: i64,
    },
    Blocked,
}

/// One straightening step at corner `pos` of the given loop: find the
/// geodesic chord (or collinear chain) between the corner's neighbours.
fn straighten_step(
    work: &Surface,
    loop_edges: &[EdgeRef],
    pos: usize,
    step_cap: usize,
) -> Result<StepOutcome> {
    let n = loop_edges.len();
    let sigma1 = loop_edges[pos];
    let sigma2 = loop_edges[(pos + 1) % n];
    // Unfold around the corner vertex: both charts place the vertex, so
    // relative positions are comparable (the atlas is rotation free).
    let a_chart = work.polygon(sigma1.poly);
    let a_pos = a_chart.vertex(sigma1.edge).clone();
    let v_pos_p = a_chart.vertex(sigma1.edge + 1).clone();
    let b_chart = work.polygon(sigma2.poly);
    let v_pos_q = b_chart.vertex(sigma2.edge).clone();
    let b_pos = b_chart.vertex(sigma2.edge + 1).clone();
    let a_unf = a_pos.sub(&v_pos_p);
    let b_unf = b_pos.sub(&v_pos_q);
    let chord = b_unf.sub(&a_unf);
    if chord.is_zero() {
        return Ok(StepOutcome::Blocked);
    }
    let dir = Direction::normalize(&chord)?;
    // Start corner at A: rotate counterclockwise from the ray toward the
    // corner vertex.
    let start_corner = CornerRef { poly: sigma1.poly, vertex: sigma1.edge };
    let toward_v = v_pos_p.sub(&a_pos);
    let c_a = corner_for_ray(work, start_corner, &toward_v, &chord)?;
    // Trace the chord; collinear singularities split it into a chain.
    let mut chain: Vec<SaddleConnection> = Vec::new();
    let mut reached = Vec2::zero();
    let mut guard = 0usize;
    let mut at_corner = c_a;
    while reached != chord {
        guard += 1;
        if guard > 64 {
            return Ok(StepOutcome::Blocked);
        }
        match trace_ray(work, at_corner, &dir, step_cap)? {
            RayFate::HitsSingularity(conn) => {
                reached = reached.add(&conn.holonomy);
                let overshoot = reached.dot(&chord) > chord.norm2();
                if !reached.cross(&chord).is_zero() || overshoot {
                    return Ok(StepOutcome::Blocked);
                }
                let arrival = last_corner(work, &conn)?;
                chain.push(*conn);
                if reached == chord {
                    break;
                }
                // Continue straight through the singular point on the core
                // side: rotate pi counterclockwise from the arrival ray.
                let back = dir.as_vec().neg();
                at_corner = match corner_for_ray(work, arrival, &back, &dir.as_vec()) {
                    Ok(c) => c,
                    Err(_) => return Ok(StepOutcome::Blocked),
                };
            }
            RayFate::HitsBoundary { .. } | RayFate::Undetermined { .. } => {
                return Ok(StepOutcome::Blocked)
            }
        }
    }
    // The absorbed side is bounded by the replaced arc and the chain: a disk.
    Ok(StepOutcome::Absorb { chain, absorbed_chi: 1 })
}

/// The corner of the vertex class reached by rotating counterclockwise from
/// `start_ray` (inside `start`'s closed sector) to `target_ray`.
fn corner_for_ray(
    s: &Surface,
    start: CornerRef,
    start_ray: &Vec2,
    target_ray: &Vec2,
) -> Result<CornerRef> {
    let (u, _) = s.corner_rays(start);
    let mut rem = Angle::between(&u, start_ray).add(&Angle::between(start_ray, target_ray));
    let mut corner = start;
    let mut guard = 0usize;
    loop {
        guard += 1;
        if guard > 8 * s.classes().len().max(8) {
            return Err(Error::Trace("corner rotation does not terminate".into()));
        }
        let alpha = s.corner_angle(corner);
        if rem <= alpha {
            return Ok(corner);
        }
        rem = rem
            .checked_sub(&alpha)
            .expect("remaining rotation exceeds the corner angle");
        corner = s
            .ccw_next(corner)
            .ok_or_else(|| Error::Trace("rotation leaves the surface at a boundary".into()))?;
    }
}

/// Arrival corner of a traced connection (the corner at its far endpoint).
fn last_corner(s: &Surface, conn: &SaddleConnection) -> Result<CornerRef> {
    let trace = crate::tracer::FlowTrace::new(s, conn.direction.as_vec(), usize::MAX);
    let start = s.corner_point(conn.from_corner).clone();
    match trace.run(conn.from_corner.poly, start) {
        crate::tracer::FlowEnd::Vertex { corner, .. } => Ok(corner),
        _ => Err(Error::Trace("re-trace did not reach a vertex".into())),
    }
}

/// True when `inner` lies inside `outer` on the same line.
fn segment_inside(outer: &Segment, inner: &Segment) -> bool {
    let d = outer.vector();
    let on_line = |p: &Vec2| d.cross(&p.sub(&outer.start)).is_zero();
    if !(on_line(&inner.start) && on_line(&inner.end)) {
        return false;
    }
    let l2 = d.norm2();
    let param = |p: &Vec2| p.sub(&outer.start).dot(&d) / l2.clone();
    let (t0, t1) = (param(&inner.start), param(&inner.end));
    let lo = t0.clone().min(t1.clone());
    let hi = t0.max(t1);
    !lo.is_negative() && hi <= Rat::one()
}

/// Two collinear segments sharing more than a point.
fn segments_overlap_collinear(a: &Segment, b: &Segment) -> bool {
    matches!(a.intersect(b), crate::geom::SegmentMeet::Overlap(_))
}

/// The boundary arcs of a final (straightened) loop, merged through straight
/// corners and mapped back to original-surface classes.
fn loop_arcs(
    original: &Surface,
    work: &Surface,
    chart_of: &[usize],
    edges: &[EdgeRef],
) -> Result<Vec<CoreArc>> {
    let n = edges.len();
    let corner_classes: Vec<usize> = edges
        .iter()
        .map(|e| {
            let m = work.polygon(e.poly).len();
            work.class_id_of(CornerRef { poly: e.poly, vertex: (e.edge + 1) % m })
        })
        .collect();
    let straight: Vec<bool> = corner_classes
        .iter()
        .map(|cid| work.classes()[*cid].angle == Angle::pi())
        .collect();
    if straight.iter().all(|s| *s) {
        return Err(Error::Surface("boundary loop with no singular corner".into()));
    }
    let mut start_idx = 0usize;
    while straight[start_idx] {
        start_idx += 1;
    }
    // Walk the loop, merging edges through straight corners into arcs.
    let mut arcs: Vec<(usize, Segment)> = Vec::new();
    let mut i = (start_idx + 1) % n;
    let mut current: Option<(usize, Segment)> = None;
    for _ in 0..n {
        let e = edges[i];
        let seg = work.edge_segment(e);
        current = Some(match current {
            None => (chart_of[e.poly], seg),
            Some((chart, acc)) => {
                // Extend by holonomy: the chart stays the first one.
                let v = acc.vector().add(&seg.vector());
                (
                    chart,
                    Segment::new(acc.start.clone(), acc.start.add(&v))
                        .map_err(|_| Error::Surface("degenerate boundary arc".into()))?,
                )
            }
        });
        if !straight[i] {
            arcs.push(current.take().unwrap());
        }
        i = (i + 1) % n;
    }
    let mut out = Vec::new();
    for (chart, seg) in arcs {
        let holonomy = seg.vector();
        let dir = Direction::normalize(&holonomy)?;
        let (from_class, conn) = verify_arc(original, chart, &seg, &dir)?;
        out.push(CoreArc {
            chart,
            segment: seg,
            from_class,
            to_class: conn.to_class,
            holonomy,
        });
    }
    Ok(out)
}

/// Re-trace an arc on the original surface: it must be a saddle connection
/// with the same holonomy starting at the same point.
fn verify_arc(
    original: &Surface,
    chart: usize,
    seg: &Segment,
    dir: &Direction,
) -> Result<(usize, SaddleConnection)> {
    let poly = original.polygon(chart);
    let mut corner = None;
    for k in 0..poly.len() {
        if poly.vertex(k) == &seg.start {
            corner = Some(k);
            break;
        }
    }
    let vertex = corner.ok_or_else(|| {
        Error::Surface("core arc does not start at an original vertex".into())
    })?;
    let class_id = original.class_id_of(CornerRef { poly: chart, vertex });
    let class = &original.classes()[class_id];
    if !class.singular {
        return Err(Error::Surface("core arc starts at a regular point".into()));
    }
    let holonomy = seg.vector();
    for &c in &class.corners {
        let (u, w) = original.corner_rays(c);
        let dv = dir.as_vec();
        let inside = u.cross(&dv).is_positive() && dv.cross(&w).is_positive();
        let along = |a: &Vec2| a.cross(&dv).is_zero() && a.dot(&dv).is_positive();
        if !(inside || along(&u) || along(&w)) {
            continue;
        }
        if let RayFate::HitsSingularity(conn) =
            trace_ray(original, c, dir, crate::tracer::DEFAULT_STEP_CAP)?
        {
            if conn.holonomy == holonomy {
                return Ok((class_id, *conn));
            }
        }
    }
    Err(Error::Surface(
        "core arc does not re-verify as a saddle connection".into(),
    ))
}
