//! Polygon intersection by Greiner-Hormann clipping.
//!
//! The core operates on pairs of simple rings. Holes are folded in by
//! subtracting each hole ring from the exterior intersection pieces.
//! Degenerate configurations (shared vertices, collinear overlapping
//! edges) are detected and resolved by retrying with a tiny deterministic
//! translation of the clip polygon; identical rings short-circuit to the
//! exact containment answer first.

use super::{ProjectedPoint, Polygon, Ring};
use crate::error::{Error, Result};

/// Parameter-space margin below which an edge crossing counts as
/// degenerate (endpoint contact) rather than a proper crossing.
const PARAM_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Intersection,
    Difference,
}

#[derive(Debug)]
enum ClipFailure {
    /// Shared vertices / collinear overlap: retry with perturbation.
    Degenerate,
    /// Structurally unsupported input (holes crossing holes).
    Unsupported(&'static str),
}

/// Intersection of two polygons (with holes). Returns the set of simple
/// polygons whose union is `a` ∩ `b`; the empty set when disjoint.
pub fn polygon_intersection(a: &Polygon, b: &Polygon) -> Result<Vec<Polygon>> {
    if !a.bbox().intersects(&b.bbox()) {
        return Ok(Vec::new());
    }
    let scale = {
        let ab = a.bbox().union(&b.bbox());
        ab.width().max(ab.height()).max(1.0)
    };
    let mut attempt = 0u32;
    loop {
        let b_try = if attempt == 0 {
            b.clone()
        } else {
            let d = scale * 1e-9 * 10f64.powi(attempt as i32 - 1);
            translate_polygon(b, d * 0.83, d * 0.56)
        };
        match intersect_impl(a, &b_try) {
            Ok(pieces) => return Ok(pieces),
            Err(ClipFailure::Degenerate) if attempt < 4 => attempt += 1,
            Err(ClipFailure::Degenerate) => {
                return Err(Error::Geometry(
                    "polygon intersection remained degenerate after perturbation".into(),
                ))
            }
            Err(ClipFailure::Unsupported(msg)) => {
                return Err(Error::Geometry(format!("unsupported geometry: {msg}")))
            }
        }
    }
}

/// Pairwise intersection of two multi-polygons; pieces are collected
/// across all pairs (disjoint for valid inputs).
pub fn multi_polygon_intersection(a: &[Polygon], b: &[Polygon]) -> Result<Vec<Polygon>> {
    let mut out = Vec::new();
    for pa in a {
        for pb in b {
            out.extend(polygon_intersection(pa, pb)?);
        }
    }
    Ok(out)
}

fn translate_polygon(p: &Polygon, dx: f64, dy: f64) -> Polygon {
    let shift = |ring: &Ring| {
        Ring::new(
            ring.open_points()
                .iter()
                .map(|q| ProjectedPoint::new(q.x + dx, q.y + dy))
                .collect(),
        )
        .expect("translation preserves ring validity")
    };
    Polygon::new(shift(p.exterior()), p.holes().iter().map(shift).collect())
}

fn intersect_impl(a: &Polygon, b: &Polygon) -> std::result::Result<Vec<Polygon>, ClipFailure> {
    let sub = a.exterior().open_points().to_vec();
    let clip = b.exterior().open_points().to_vec();

    // identical exteriors: exact containment answer, no tracing needed
    let mut pieces: Vec<Polygon> = if rings_identical(&sub, &clip) {
        vec![Polygon::new(a.exterior().clone(), Vec::new())]
    } else {
        match ring_clip(&sub, &clip, Op::Intersection)? {
            RingClip::Crossed(rings) => rings
                .into_iter()
                .map(|pts| Polygon::new(Ring::new(pts).expect("traced ring is valid"), Vec::new()))
                .collect(),
            RingClip::NoCrossings => {
                // no boundary contact: nesting or disjoint. Vertices are
                // strictly off the other ring (contacts were screened), so
                // a single vertex decides.
                if ring_contains(&clip, sub[0]) {
                    vec![Polygon::new(a.exterior().clone(), Vec::new())]
                } else if ring_contains(&sub, clip[0]) {
                    vec![Polygon::new(b.exterior().clone(), Vec::new())]
                } else {
                    Vec::new()
                }
            }
        }
    };

    for hole in a.holes().iter().chain(b.holes()) {
        pieces = subtract_hole(pieces, hole)?;
        if pieces.is_empty() {
            break;
        }
    }
    Ok(pieces)
}

/// Removes `hole` from every piece, splitting or attaching as needed.
fn subtract_hole(
    pieces: Vec<Polygon>,
    hole: &Ring,
) -> std::result::Result<Vec<Polygon>, ClipFailure> {
    // the clipper expects CCW rings; stored holes are CW
    let mut hole_pts = hole.open_points().to_vec();
    if signed_area(&hole_pts) < 0.0 {
        hole_pts.reverse();
    }
    let mut out = Vec::new();
    for piece in pieces {
        let ext = piece.exterior().open_points().to_vec();
        if rings_identical(&ext, &hole_pts) {
            continue; // piece exactly swallowed
        }
        match ring_clip(&ext, &hole_pts, Op::Difference)? {
            RingClip::Crossed(rings) => {
                if !piece.holes().is_empty() {
                    // existing holes must not cross the subtracted ring
                    for h in piece.holes() {
                        if rings_cross(h.open_points(), &hole_pts)? {
                            return Err(ClipFailure::Unsupported(
                                "hole rings of the two inputs cross each other",
                            ));
                        }
                    }
                }
                for pts in rings {
                    let new_ext = Ring::new(pts).expect("traced ring is valid");
                    // re-attach existing holes to the piece that contains
                    // them; hole vertices are strictly off the new boundary
                    let mut holes = Vec::new();
                    for h in piece.holes() {
                        if ring_contains(new_ext.open_points(), h.open_points()[0]) {
                            holes.push(h.clone());
                        }
                    }
                    out.push(Polygon::new(new_ext, holes));
                }
            }
            RingClip::NoCrossings => {
                if ring_contains(&hole_pts, ext[0]) {
                    // piece entirely inside the hole: vanishes
                    continue;
                }
                if !ring_contains(&ext, hole_pts[0]) {
                    out.push(piece); // disjoint
                    continue;
                }
                // hole lies strictly inside the piece exterior; skip if an
                // existing hole already covers it
                let covered = piece.holes().iter().any(|h| {
                    rings_identical(h.open_points(), &hole_pts)
                        || ring_contains(h.open_points(), hole_pts[0])
                });
                if covered {
                    out.push(piece);
                } else {
                    // existing holes swallowed by the new hole are dropped
                    let mut holes: Vec<Ring> = piece
                        .holes()
                        .iter()
                        .filter(|h| !ring_contains(&hole_pts, h.open_points()[0]))
                        .cloned()
                        .collect();
                    holes.push(hole.clone());
                    out.push(Polygon::new(piece.exterior().clone(), holes));
                }
            }
        }
    }
    Ok(out)
}

enum RingClip {
    Crossed(Vec<Vec<ProjectedPoint>>),
    NoCrossings,
}

struct GhNode {
    p: ProjectedPoint,
    next: usize,
    prev: usize,
    neighbor: usize,
    is_intersection: bool,
    entry: bool,
    visited: bool,
}

/// Clips `subject` against `clip` (both open CCW rings).
fn ring_clip(
    subject: &[ProjectedPoint],
    clip: &[ProjectedPoint],
    op: Op,
) -> std::result::Result<RingClip, ClipFailure> {
    // phase 1: pairwise proper intersections, degeneracy screened
    let mut crossings: Vec<(usize, usize, f64, f64, ProjectedPoint)> = Vec::new();
    let ns = subject.len();
    let nc = clip.len();
    for i in 0..ns {
        let (a1, a2) = (subject[i], subject[(i + 1) % ns]);
        for j in 0..nc {
            let (b1, b2) = (clip[j], clip[(j + 1) % nc]);
            match segment_crossing(a1, a2, b1, b2)? {
                Some((t, u)) => {
                    let p = ProjectedPoint::new(a1.x + t * (a2.x - a1.x), a1.y + t * (a2.y - a1.y));
                    crossings.push((i, j, t, u, p));
                }
                None => {}
            }
        }
    }
    if crossings.is_empty() {
        return Ok(RingClip::NoCrossings);
    }
    if crossings.len() % 2 != 0 {
        return Err(ClipFailure::Degenerate);
    }

    // phase 2: build doubly-linked vertex chains with intersection twins
    fn push(nodes: &mut Vec<GhNode>, p: ProjectedPoint, is_x: bool) -> usize {
        nodes.push(GhNode {
            p,
            next: usize::MAX,
            prev: usize::MAX,
            neighbor: usize::MAX,
            is_intersection: is_x,
            entry: false,
            visited: false,
        });
        nodes.len() - 1
    }
    let mut nodes: Vec<GhNode> = Vec::new();

    let mut tw_subject: Vec<(usize, f64, usize)> = Vec::new(); // (edge, t, node)
    let mut tw_clip: Vec<(usize, f64, usize)> = Vec::new();
    for &(i, j, t, u, p) in &crossings {
        let s = push(&mut nodes, p, true);
        let c = push(&mut nodes, p, true);
        tw_subject.push((i, t, s));
        tw_clip.push((j, u, c));
        nodes[s].neighbor = c;
        nodes[c].neighbor = s;
    }
    let subject_ids: Vec<usize> = subject
        .iter()
        .map(|&p| push(&mut nodes, p, false))
        .collect();
    let clip_ids: Vec<usize> = clip.iter().map(|&p| push(&mut nodes, p, false)).collect();

    let chain = |orig: &[usize],
                 twins: &mut Vec<(usize, f64, usize)>,
                 nodes: &mut Vec<GhNode>| {
        twins.sort_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap());
        let mut order: Vec<usize> = Vec::new();
        let mut k = 0;
        for (edge, &nid) in orig.iter().enumerate() {
            order.push(nid);
            while k < twins.len() && twins[k].0 == edge {
                order.push(twins[k].2);
                k += 1;
            }
        }
        let n = order.len();
        for idx in 0..n {
            let cur = order[idx];
            nodes[cur].next = order[(idx + 1) % n];
            nodes[cur].prev = order[(idx + n - 1) % n];
        }
        order[0]
    };
    let start_s = chain(&subject_ids, &mut tw_subject, &mut nodes);
    let start_c = chain(&clip_ids, &mut tw_clip, &mut nodes);

    // phase 3: entry/exit flags by alternating from a known outside/inside
    // status. `Difference` inverts the clip ring's flags.
    let mark = |start: usize, inside0: bool, nodes: &mut Vec<GhNode>| {
        let mut inside = inside0;
        let mut cur = start;
        loop {
            if nodes[cur].is_intersection {
                nodes[cur].entry = !inside;
                inside = !inside;
            }
            cur = nodes[cur].next;
            if cur == start {
                break;
            }
        }
    };
    let subject0_inside = ring_contains(clip, subject[0]);
    mark(
        start_s,
        if op == Op::Difference {
            !subject0_inside
        } else {
            subject0_inside
        },
        &mut nodes,
    );
    mark(start_c, ring_contains(subject, clip[0]), &mut nodes);

    // phase 4: trace result rings
    let total = nodes.len();
    let mut rings = Vec::new();
    for start in 0..total {
        if !nodes[start].is_intersection || nodes[start].visited {
            continue;
        }
        let mut ring = Vec::new();
        let mut cur = start;
        let mut steps = 0usize;
        loop {
            nodes[cur].visited = true;
            let twin = nodes[cur].neighbor;
            if twin != usize::MAX {
                nodes[twin].visited = true;
            }
            ring.push(nodes[cur].p);
            let entry = nodes[cur].entry;
            loop {
                cur = if entry { nodes[cur].next } else { nodes[cur].prev };
                steps += 1;
                if steps > 4 * total {
                    return Err(ClipFailure::Degenerate);
                }
                if nodes[cur].is_intersection {
                    break;
                }
                ring.push(nodes[cur].p);
            }
            cur = nodes[cur].neighbor;
            if cur == start {
                break;
            }
            if nodes[cur].visited {
                // flag inconsistency; resolved by the perturbation retry
                return Err(ClipFailure::Degenerate);
            }
        }
        // discard slivers produced by numeric noise
        if ring.len() >= 3 {
            let r = signed_area(&ring).abs();
            let scale = ring
                .iter()
                .map(|p| p.x.abs().max(p.y.abs()))
                .fold(1.0f64, f64::max);
            if r > (scale * 1e-9) * (scale * 1e-9) {
                if signed_area(&ring) < 0.0 {
                    ring.reverse();
                }
                rings.push(ring);
            }
        }
    }
    Ok(RingClip::Crossed(rings))
}

/// Proper-crossing test. `Ok(Some((t, u)))` for a transversal crossing with
/// both parameters strictly inside (0, 1); `Ok(None)` when disjoint;
/// `Err(Degenerate)` for contacts and collinear overlaps.
fn segment_crossing(
    a1: ProjectedPoint,
    a2: ProjectedPoint,
    b1: ProjectedPoint,
    b2: ProjectedPoint,
) -> std::result::Result<Option<(f64, f64)>, ClipFailure> {
    let d1 = (a2.x - a1.x, a2.y - a1.y);
    let d2 = (b2.x - b1.x, b2.y - b1.y);
    let denom = d1.0 * d2.1 - d1.1 * d2.0;
    let scale = d1.0.abs().max(d1.1.abs()).max(d2.0.abs()).max(d2.1.abs());
    if denom.abs() <= 1e-14 * scale * scale {
        // parallel: collinear overlap is degenerate, otherwise no crossing
        let cross_b1 = (b1.x - a1.x) * d1.1 - (b1.y - a1.y) * d1.0;
        if cross_b1.abs() <= 1e-12 * scale * scale {
            // collinear: check 1-d overlap
            let len2 = d1.0 * d1.0 + d1.1 * d1.1;
            if len2 > 0.0 {
                let proj = |p: ProjectedPoint| ((p.x - a1.x) * d1.0 + (p.y - a1.y) * d1.1) / len2;
                let (mut lo, mut hi) = (proj(b1), proj(b2));
                if lo > hi {
                    std::mem::swap(&mut lo, &mut hi);
                }
                if hi > PARAM_EPS && lo < 1.0 - PARAM_EPS {
                    return Err(ClipFailure::Degenerate);
                }
            }
        }
        return Ok(None);
    }
    let qp = (b1.x - a1.x, b1.y - a1.y);
    let t = (qp.0 * d2.1 - qp.1 * d2.0) / denom;
    let u = (qp.0 * d1.1 - qp.1 * d1.0) / denom;
    if t < -PARAM_EPS || t > 1.0 + PARAM_EPS || u < -PARAM_EPS || u > 1.0 + PARAM_EPS {
        return Ok(None);
    }
    if t < PARAM_EPS || t > 1.0 - PARAM_EPS || u < PARAM_EPS || u > 1.0 - PARAM_EPS {
        return Err(ClipFailure::Degenerate);
    }
    Ok(Some((t, u)))
}

/// True when any edge of `a` properly crosses an edge of `b`.
fn rings_cross(
    a: &[ProjectedPoint],
    b: &[ProjectedPoint],
) -> std::result::Result<bool, ClipFailure> {
    let na = a.len();
    let nb = b.len();
    for i in 0..na {
        for j in 0..nb {
            if segment_crossing(a[i], a[(i + 1) % na], b[j], b[(j + 1) % nb])?.is_some() {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

fn rings_identical(a: &[ProjectedPoint], b: &[ProjectedPoint]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let key = |pts: &[ProjectedPoint]| {
        let mut v: Vec<(u64, u64)> = pts.iter().map(|p| (p.x.to_bits(), p.y.to_bits())).collect();
        v.sort_unstable();
        v
    };
    key(a) == key(b)
}

/// Even-odd containment for an open ring, no boundary tolerance.
fn ring_contains(ring: &[ProjectedPoint], p: ProjectedPoint) -> bool {
    let n = ring.len();
    let mut inside = false;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x_cross {
                inside = !inside;
            }
        }
    }
    inside
}

fn signed_area(pts: &[ProjectedPoint]) -> f64 {
    let n = pts.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    acc / 2.0
}
