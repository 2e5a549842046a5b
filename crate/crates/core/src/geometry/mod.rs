//! Planar geometry primitives shared by every other module.
//!
//! All coordinates here are projected meters (see [`tmerc`]). Polygons are
//! stored with closed rings (first vertex repeated last), counter-clockwise
//! exteriors and clockwise holes; containment uses the even-odd rule with
//! boundary points counting as inside.

pub mod clip;
pub mod grid;
pub mod hex;
pub mod tmerc;

use crate::error::{Error, Result};

/// Tolerance for treating a point as lying on a polygon boundary.
const BOUNDARY_EPS: f64 = 1e-9;

/// A point in a projected (meters east/north) coordinate frame.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ProjectedPoint {
    pub x: f64,
    pub y: f64,
}

impl ProjectedPoint {
    pub fn new(x: f64, y: f64) -> Self {
        ProjectedPoint { x, y }
    }

    pub fn dist(&self, other: ProjectedPoint) -> f64 {
        self.dist2(other).sqrt()
    }

    pub fn dist2(&self, other: ProjectedPoint) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// Axis-aligned bounding rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Rect {
    pub fn new(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Self {
        Rect {
            min_x,
            min_y,
            max_x,
            max_y,
        }
    }

    /// Smallest rectangle covering all `points`; `None` when empty.
    pub fn covering(points: impl IntoIterator<Item = ProjectedPoint>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut r = Rect::new(first.x, first.y, first.x, first.y);
        for p in it {
            r.min_x = r.min_x.min(p.x);
            r.min_y = r.min_y.min(p.y);
            r.max_x = r.max_x.max(p.x);
            r.max_y = r.max_y.max(p.y);
        }
        Some(r)
    }

    pub fn expand(&self, margin: f64) -> Rect {
        Rect::new(
            self.min_x - margin,
            self.min_y - margin,
            self.max_x + margin,
            self.max_y + margin,
        )
    }

    pub fn union(&self, other: &Rect) -> Rect {
        Rect::new(
            self.min_x.min(other.min_x),
            self.min_y.min(other.min_y),
            self.max_x.max(other.max_x),
            self.max_y.max(other.max_y),
        )
    }

    pub fn contains(&self, p: ProjectedPoint) -> bool {
        p.x >= self.min_x && p.x <= self.max_x && p.y >= self.min_y && p.y <= self.max_y
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.min_x <= other.max_x
            && other.min_x <= self.max_x
            && self.min_y <= other.max_y
            && other.min_y <= self.max_y
    }

    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }
}

/// A closed ring of vertices (first == last, at least 4 entries).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Ring {
    points: Vec<ProjectedPoint>,
}

impl Ring {
    /// Builds a ring, closing it if the input is open. Errors on fewer than
    /// three distinct vertices or (numerically) zero area.
    pub fn new(mut points: Vec<ProjectedPoint>) -> Result<Self> {
        if let (Some(&first), Some(&last)) = (points.first(), points.last()) {
            if first != last {
                points.push(first);
            }
        }
        if points.len() < 4 {
            return Err(Error::Geometry(format!(
                "ring needs at least 3 distinct vertices, got {}",
                points.len().saturating_sub(1)
            )));
        }
        let ring = Ring { points };
        if ring.signed_area().abs() < 1e-12 {
            return Err(Error::Geometry("ring has zero area".into()));
        }
        Ok(ring)
    }

    /// Closed vertex list (first == last).
    pub fn points(&self) -> &[ProjectedPoint] {
        &self.points
    }

    /// Vertices without the closing duplicate.
    pub fn open_points(&self) -> &[ProjectedPoint] {
        &self.points[..self.points.len() - 1]
    }

    /// Shoelace area, positive for counter-clockwise winding.
    pub fn signed_area(&self) -> f64 {
        let pts = &self.points;
        let mut acc = 0.0;
        for w in pts.windows(2) {
            acc += w[0].x * w[1].y - w[1].x * w[0].y;
        }
        acc / 2.0
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn is_ccw(&self) -> bool {
        self.signed_area() > 0.0
    }

    pub fn reverse(&mut self) {
        self.points.reverse();
    }

    /// Area-weighted centroid of the ring.
    pub fn centroid(&self) -> ProjectedPoint {
        let a = self.signed_area();
        if a.abs() < 1e-12 {
            // degenerate: fall back to vertex mean
            let n = (self.points.len() - 1) as f64;
            let (sx, sy) = self
                .open_points()
                .iter()
                .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
            return ProjectedPoint::new(sx / n, sy / n);
        }
        let mut cx = 0.0;
        let mut cy = 0.0;
        for w in self.points.windows(2) {
            let cross = w[0].x * w[1].y - w[1].x * w[0].y;
            cx += (w[0].x + w[1].x) * cross;
            cy += (w[0].y + w[1].y) * cross;
        }
        ProjectedPoint::new(cx / (6.0 * a), cy / (6.0 * a))
    }

    /// Even-odd ray crossing test; boundary points are NOT handled here
    /// (see [`Polygon::contains`] for the closed-set convention).
    fn crossings_contain(&self, p: ProjectedPoint) -> bool {
        let mut inside = false;
        for w in self.points.windows(2) {
            let (a, b) = (w[0], w[1]);
            if (a.y > p.y) != (b.y > p.y) {
                let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x_cross {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Minimum distance from `p` to any ring segment.
    pub fn boundary_distance(&self, p: ProjectedPoint) -> f64 {
        self.points
            .windows(2)
            .map(|w| point_segment_distance(p, w[0], w[1]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn bbox(&self) -> Rect {
        Rect::covering(self.points.iter().copied()).expect("ring is non-empty")
    }
}

/// A simple polygon: one exterior ring plus zero or more hole rings.
///
/// The constructor normalizes winding (exterior CCW, holes CW).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Polygon {
    exterior: Ring,
    holes: Vec<Ring>,
}

impl Polygon {
    pub fn new(mut exterior: Ring, mut holes: Vec<Ring>) -> Self {
        if !exterior.is_ccw() {
            exterior.reverse();
        }
        for h in &mut holes {
            if h.is_ccw() {
                h.reverse();
            }
        }
        Polygon { exterior, holes }
    }

    pub fn from_exterior(points: Vec<ProjectedPoint>) -> Result<Self> {
        Ok(Polygon::new(Ring::new(points)?, Vec::new()))
    }

    pub fn exterior(&self) -> &Ring {
        &self.exterior
    }

    pub fn holes(&self) -> &[Ring] {
        &self.holes
    }

    /// Exterior area minus hole areas.
    pub fn area(&self) -> f64 {
        self.exterior.area() - self.holes.iter().map(Ring::area).sum::<f64>()
    }

    /// Even-odd containment over all rings; boundary points count as inside.
    pub fn contains(&self, p: ProjectedPoint) -> bool {
        if self.boundary_distance(p) <= BOUNDARY_EPS {
            return true;
        }
        let mut inside = self.exterior.crossings_contain(p);
        for h in &self.holes {
            if h.crossings_contain(p) {
                inside = !inside;
            }
        }
        inside
    }

    /// Minimum distance from `p` to any ring (exterior or hole) segment.
    pub fn boundary_distance(&self, p: ProjectedPoint) -> f64 {
        let mut d = self.exterior.boundary_distance(p);
        for h in &self.holes {
            d = d.min(h.boundary_distance(p));
        }
        d
    }

    /// Area centroid of the exterior ring; holes are ignored.
    pub fn centroid(&self) -> ProjectedPoint {
        self.exterior.centroid()
    }

    pub fn bbox(&self) -> Rect {
        self.exterior.bbox()
    }
}

/// True iff `p` lies inside `region` or within `buffer` meters of its
/// boundary. This is the membership predicate used everywhere a "buffered
/// study region" appears; no buffer geometry is ever constructed.
pub fn in_buffered_region(p: ProjectedPoint, region: &Polygon, buffer: f64) -> bool {
    debug_assert!(buffer >= 0.0);
    region.contains(p) || region.boundary_distance(p) <= buffer
}

/// Multi-polygon variant: membership in any part.
pub fn in_buffered_multi(p: ProjectedPoint, parts: &[Polygon], buffer: f64) -> bool {
    parts.iter().any(|poly| in_buffered_region(p, poly, buffer))
}

/// Distance from point `p` to segment `ab`.
pub fn point_segment_distance(p: ProjectedPoint, a: ProjectedPoint, b: ProjectedPoint) -> f64 {
    let abx = b.x - a.x;
    let aby = b.y - a.y;
    let len2 = abx * abx + aby * aby;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p.x - a.x) * abx + (p.y - a.y) * aby) / len2;
    let t = t.clamp(0.0, 1.0);
    p.dist(ProjectedPoint::new(a.x + t * abx, a.y + t * aby))
}

/// Arc length of a polyline.
pub fn polyline_length(pts: &[ProjectedPoint]) -> f64 {
    pts.windows(2).map(|w| w[0].dist(w[1])).sum()
}

/// Point at arc-length `offset` along the polyline (clamped to endpoints).
pub fn polyline_point_at(pts: &[ProjectedPoint], offset: f64) -> ProjectedPoint {
    debug_assert!(!pts.is_empty());
    if offset <= 0.0 {
        return pts[0];
    }
    let mut remaining = offset;
    for w in pts.windows(2) {
        let seg = w[0].dist(w[1]);
        if remaining <= seg {
            if seg == 0.0 {
                return w[0];
            }
            let t = remaining / seg;
            return ProjectedPoint::new(w[0].x + t * (w[1].x - w[0].x), w[0].y + t * (w[1].y - w[0].y));
        }
        remaining -= seg;
    }
    *pts.last().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Polygon {
        Polygon::from_exterior(vec![
            ProjectedPoint::new(0.0, 0.0),
            ProjectedPoint::new(1.0, 0.0),
            ProjectedPoint::new(1.0, 1.0),
            ProjectedPoint::new(0.0, 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn ring_closes_open_input() {
        let r = Ring::new(vec![
            ProjectedPoint::new(0.0, 0.0),
            ProjectedPoint::new(1.0, 0.0),
            ProjectedPoint::new(0.0, 1.0),
        ])
        .unwrap();
        assert_eq!(r.points().first(), r.points().last());
        assert_eq!(r.points().len(), 4);
    }

    #[test]
    fn ring_rejects_degenerate() {
        assert!(Ring::new(vec![ProjectedPoint::new(0.0, 0.0), ProjectedPoint::new(1.0, 0.0)]).is_err());
        // collinear => zero area
        assert!(Ring::new(vec![
            ProjectedPoint::new(0.0, 0.0),
            ProjectedPoint::new(1.0, 0.0),
            ProjectedPoint::new(2.0, 0.0),
        ])
        .is_err());
    }

    #[test]
    fn polygon_normalizes_winding() {
        // clockwise input exterior
        let p = Polygon::new(
            Ring::new(vec![
                ProjectedPoint::new(0.0, 0.0),
                ProjectedPoint::new(0.0, 1.0),
                ProjectedPoint::new(1.0, 1.0),
                ProjectedPoint::new(1.0, 0.0),
            ])
            .unwrap(),
            vec![],
        );
        assert!(p.exterior().is_ccw());
        assert!((p.area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn containment_even_odd_with_hole() {
        let hole = Ring::new(vec![
            ProjectedPoint::new(0.25, 0.25),
            ProjectedPoint::new(0.75, 0.25),
            ProjectedPoint::new(0.75, 0.75),
            ProjectedPoint::new(0.25, 0.75),
        ])
        .unwrap();
        let p = Polygon::new(unit_square().exterior().clone(), vec![hole]);
        assert!(p.contains(ProjectedPoint::new(0.1, 0.1)));
        assert!(!p.contains(ProjectedPoint::new(0.5, 0.5)));
        // hole boundary itself is polygon boundary -> inside (closed set)
        assert!(p.contains(ProjectedPoint::new(0.25, 0.5)));
        assert!((p.area() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn boundary_point_counts_as_inside_with_zero_buffer() {
        let sq = unit_square();
        assert!(in_buffered_region(ProjectedPoint::new(0.0, 0.5), &sq, 0.0));
        assert!(in_buffered_region(ProjectedPoint::new(1.0, 1.0), &sq, 0.0));
    }

    #[test]
    fn buffered_region_edge_arithmetic() {
        let sq = Polygon::from_exterior(vec![
            ProjectedPoint::new(0.0, 0.0),
            ProjectedPoint::new(4000.0, 0.0),
            ProjectedPoint::new(4000.0, 4000.0),
            ProjectedPoint::new(0.0, 4000.0),
        ])
        .unwrap();
        // centroid is inside for any buffer
        assert!(in_buffered_region(sq.centroid(), &sq, 0.0));
        // 1601 m beyond a straight edge with a 1600 m buffer: outside
        let p = ProjectedPoint::new(2000.0, -1601.0);
        assert!(!in_buffered_region(p, &sq, 1600.0));
        assert!(in_buffered_region(ProjectedPoint::new(2000.0, -1599.0), &sq, 1600.0));
    }

    #[test]
    fn buffer_monotonicity() {
        let sq = unit_square();
        let p = ProjectedPoint::new(3.0, 0.5);
        let mut prev = false;
        for b in [0.0, 1.0, 1.9, 2.0, 2.5, 10.0] {
            let now = in_buffered_region(p, &sq, b);
            assert!(!prev || now, "membership lost when buffer grew to {b}");
            prev = now;
        }
        assert!(prev);
    }

    #[test]
    fn centroid_of_unit_square() {
        let c = unit_square().centroid();
        assert!((c.x - 0.5).abs() < 1e-12 && (c.y - 0.5).abs() < 1e-12);
    }

    #[test]
    fn polyline_interpolation() {
        let pts = [
            ProjectedPoint::new(0.0, 0.0),
            ProjectedPoint::new(3.0, 0.0),
            ProjectedPoint::new(3.0, 4.0),
        ];
        assert!((polyline_length(&pts) - 7.0).abs() < 1e-12);
        let mid = polyline_point_at(&pts, 5.0);
        assert!((mid.x - 3.0).abs() < 1e-12 && (mid.y - 2.0).abs() < 1e-12);
        // clamped beyond the end
        let end = polyline_point_at(&pts, 100.0);
        assert_eq!(end, pts[2]);
    }

    #[test]
    fn segment_distance() {
        let a = ProjectedPoint::new(0.0, 0.0);
        let b = ProjectedPoint::new(10.0, 0.0);
        assert!((point_segment_distance(ProjectedPoint::new(5.0, 3.0), a, b) - 3.0).abs() < 1e-12);
        assert!((point_segment_distance(ProjectedPoint::new(-4.0, 3.0), a, b) - 5.0).abs() < 1e-12);
    }
}
