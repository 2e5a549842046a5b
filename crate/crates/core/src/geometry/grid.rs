//! Uniform-grid spatial indexes for points and segments.
//!
//! Bucket scans return a superset of candidates; every query verifies
//! exact distances, so results match an exhaustive scan. Ties break to
//! the lowest element id.

use super::{point_segment_distance, ProjectedPoint};
use std::collections::HashMap;

/// Point index over a uniform hash grid.
#[derive(Debug, Clone)]
pub struct GridIndex {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<u32>>,
    points: Vec<ProjectedPoint>,
}

impl GridIndex {
    /// Builds an index where element ids are positions in `points`.
    pub fn build(points: Vec<ProjectedPoint>, cell: f64) -> Self {
        assert!(cell > 0.0);
        let mut buckets: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            buckets
                .entry(Self::key(cell, *p))
                .or_default()
                .push(i as u32);
        }
        GridIndex {
            cell,
            buckets,
            points,
        }
    }

    fn key(cell: f64, p: ProjectedPoint) -> (i64, i64) {
        ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, id: u32) -> ProjectedPoint {
        self.points[id as usize]
    }

    /// Exact nearest element within `radius`, ties to the lowest id.
    pub fn nearest_within(&self, p: ProjectedPoint, radius: f64) -> Option<(u32, f64)> {
        if self.points.is_empty() || radius < 0.0 {
            return None;
        }
        let (cx, cy) = Self::key(self.cell, p);
        let max_ring = (radius / self.cell).ceil() as i64 + 1;
        let mut best: Option<(f64, u32)> = None;
        for ring in 0..=max_ring {
            // once a candidate is settled, further rings cannot beat it
            if let Some((bd, _)) = best {
                if (ring - 1) as f64 * self.cell > bd {
                    break;
                }
            }
            for (kx, ky) in ring_keys(cx, cy, ring) {
                if let Some(ids) = self.buckets.get(&(kx, ky)) {
                    for &id in ids {
                        let d = p.dist(self.points[id as usize]);
                        if d <= radius {
                            let cand = (d, id);
                            best = Some(match best {
                                None => cand,
                                Some(b) if cand < b => cand,
                                Some(b) => b,
                            });
                        }
                    }
                }
            }
        }
        best.map(|(d, id)| (id, d))
    }

    /// All elements within `radius` of `p`, unsorted.
    pub fn within(&self, p: ProjectedPoint, radius: f64) -> Vec<(u32, f64)> {
        let mut out = Vec::new();
        if self.points.is_empty() || radius < 0.0 {
            return out;
        }
        let (cx, cy) = Self::key(self.cell, p);
        let r = (radius / self.cell).ceil() as i64 + 1;
        for kx in (cx - r)..=(cx + r) {
            for ky in (cy - r)..=(cy + r) {
                if let Some(ids) = self.buckets.get(&(kx, ky)) {
                    for &id in ids {
                        let d = p.dist(self.points[id as usize]);
                        if d <= radius {
                            out.push((id, d));
                        }
                    }
                }
            }
        }
        out
    }
}

fn ring_keys(cx: i64, cy: i64, ring: i64) -> Vec<(i64, i64)> {
    if ring == 0 {
        return vec![(cx, cy)];
    }
    let mut keys = Vec::with_capacity((8 * ring) as usize);
    for dx in -ring..=ring {
        keys.push((cx + dx, cy - ring));
        keys.push((cx + dx, cy + ring));
    }
    for dy in (-ring + 1)..ring {
        keys.push((cx - ring, cy + dy));
        keys.push((cx + ring, cy + dy));
    }
    keys
}

/// Segment index over the same uniform grid; segments are registered in
/// every bucket their bounding box touches.
#[derive(Debug, Clone)]
pub struct SegmentIndex {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<u32>>,
    segments: Vec<(ProjectedPoint, ProjectedPoint)>,
}

impl SegmentIndex {
    pub fn build(segments: Vec<(ProjectedPoint, ProjectedPoint)>, cell: f64) -> Self {
        assert!(cell > 0.0);
        let mut buckets: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
        for (i, (a, b)) in segments.iter().enumerate() {
            let kx0 = ((a.x.min(b.x)) / cell).floor() as i64;
            let kx1 = ((a.x.max(b.x)) / cell).floor() as i64;
            let ky0 = ((a.y.min(b.y)) / cell).floor() as i64;
            let ky1 = ((a.y.max(b.y)) / cell).floor() as i64;
            for kx in kx0..=kx1 {
                for ky in ky0..=ky1 {
                    buckets.entry((kx, ky)).or_default().push(i as u32);
                }
            }
        }
        SegmentIndex {
            cell,
            buckets,
            segments,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Minimum distance from `p` to any segment, if one lies within
    /// `radius`.
    pub fn min_distance_within(&self, p: ProjectedPoint, radius: f64) -> Option<f64> {
        if self.segments.is_empty() || radius < 0.0 {
            return None;
        }
        let r = (radius / self.cell).ceil() as i64 + 1;
        let cx = (p.x / self.cell).floor() as i64;
        let cy = (p.y / self.cell).floor() as i64;
        let mut best: Option<f64> = None;
        let mut seen = std::collections::HashSet::new();
        for kx in (cx - r)..=(cx + r) {
            for ky in (cy - r)..=(cy + r) {
                if let Some(ids) = self.buckets.get(&(kx, ky)) {
                    for &id in ids {
                        if !seen.insert(id) {
                            continue;
                        }
                        let (a, b) = self.segments[id as usize];
                        let d = point_segment_distance(p, a, b);
                        if d <= radius && best.map_or(true, |bd| d < bd) {
                            best = Some(d);
                        }
                    }
                }
            }
        }
        best
    }
}
