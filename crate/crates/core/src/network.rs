//! Network analysis over the pedestrian graph: bounded shortest paths,
//! multi-source nearest-destination fields, node catchments, and
//! intersection consolidation.
//!
//! All searches are bounded Dijkstra runs with deterministic tie-breaking
//! by node index, so outputs are reproducible across runs and thread
//! counts.

use crate::error::{Error, Result};
use crate::geometry::grid::GridIndex;
use crate::geometry::hex::HexGrid;
use crate::geometry::ProjectedPoint;
use crate::osm::graph::PedestrianGraph;
use rayon::prelude::*;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Min-heap entry ordered by (distance, node index).
#[derive(Copy, Clone, PartialEq)]
struct State {
    dist: f64,
    node: u32,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed for a min-heap; distances are never NaN
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shared Dijkstra core: run from multiple `(node, start_dist)` sources,
/// returning `(node, dist)` pairs with `dist <= cutoff`, sorted by node.
fn bounded_dijkstra(
    g: &PedestrianGraph,
    sources: &[(u32, f64)],
    cutoff: f64,
) -> Vec<(u32, f64)> {
    let n = g.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    for &(s, d0) in sources {
        if d0 <= cutoff && d0 < dist[s as usize] {
            dist[s as usize] = d0;
            heap.push(State { dist: d0, node: s });
        }
    }
    let mut settled: Vec<(u32, f64)> = Vec::new();
    while let Some(State { dist: d, node }) = heap.pop() {
        if d > dist[node as usize] {
            continue;
        }
        settled.push((node, d));
        for (next, w) in g.neighbors(node) {
            let nd = d + w;
            if nd <= cutoff && nd < dist[next as usize] {
                dist[next as usize] = nd;
                heap.push(State {
                    dist: nd,
                    node: next,
                });
            }
        }
    }
    settled.sort_unstable_by_key(|&(node, _)| node);
    settled
}

/// Exact shortest-path distances from `source`, truncated at `cutoff`.
/// Nodes that are unreachable within the cutoff are absent.
pub fn bounded_sssp(g: &PedestrianGraph, source: u32, cutoff: f64) -> Result<Vec<(u32, f64)>> {
    if (source as usize) >= g.node_count() {
        return Err(Error::UnknownSource(source as i64));
    }
    if cutoff < 0.0 {
        return Ok(Vec::new());
    }
    Ok(bounded_dijkstra(g, &[(source, 0.0)], cutoff))
}

/// Per-node distance to the nearest destination of one class; absent =
/// unreached within the search cutoff.
#[derive(Debug, Clone, Default)]
pub struct NodeDistanceField {
    dist: Vec<Option<f64>>,
}

impl NodeDistanceField {
    pub fn get(&self, node: u32) -> Option<f64> {
        self.dist.get(node as usize).copied().flatten()
    }

    pub fn reached_count(&self) -> usize {
        self.dist.iter().filter(|d| d.is_some()).count()
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }
}

/// Counters from POI snapping.
#[derive(Debug, Clone, Default, serde::Serialize, serde::Deserialize)]
pub struct SnapDiagnostics {
    pub snapped: u64,
    pub dropped_beyond_snap_max: u64,
}

/// Snaps each destination to its nearest graph node within `snap_max`
/// (dropping and counting the rest), then runs one multi-source bounded
/// search from all snapped nodes.
pub fn nearest_destination_field(
    g: &PedestrianGraph,
    destinations: &[ProjectedPoint],
    snap_max_m: f64,
    cutoff_m: f64,
) -> (NodeDistanceField, SnapDiagnostics) {
    let mut diagnostics = SnapDiagnostics::default();
    let mut field = NodeDistanceField {
        dist: vec![None; g.node_count()],
    };
    if g.node_count() == 0 || destinations.is_empty() {
        return (field, diagnostics);
    }
    let index = GridIndex::build(g.coords().to_vec(), 50.0);
    let mut sources: Vec<(u32, f64)> = Vec::new();
    for &d in destinations {
        match index.nearest_within(d, snap_max_m) {
            Some((node, _)) => {
                diagnostics.snapped += 1;
                sources.push((node, 0.0));
            }
            None => diagnostics.dropped_beyond_snap_max += 1,
        }
    }
    sources.sort_unstable_by_key(|&(n, _)| n);
    sources.dedup_by_key(|&mut (n, _)| n);
    for (node, dist) in bounded_dijkstra(g, &sources, cutoff_m) {
        field.dist[node as usize] = Some(dist);
    }
    (field, diagnostics)
}

/// Assigns every node to its containing hex cell.
pub fn assign_nodes_to_hexes(g: &PedestrianGraph, grid: &HexGrid) -> Result<Vec<u64>> {
    (0..g.node_count() as u32)
        .map(|n| {
            grid.cell_containing(g.coord(n)).ok_or_else(|| {
                Error::Geometry(format!(
                    "node {} at ({}, {}) lies outside the hex grid",
                    g.node_id(n),
                    g.coord(n).x,
                    g.coord(n).y
                ))
            })
        })
        .collect()
}

/// Per-node set of hex cells reachable within the neighborhood cutoff,
/// always including the node's own cell.
pub fn node_catchments(
    g: &PedestrianGraph,
    hex_of_node: &[u64],
    cutoff_m: f64,
) -> Vec<Vec<u64>> {
    (0..g.node_count() as u32)
        .into_par_iter()
        .map(|source| {
            let mut hexes: Vec<u64> = bounded_dijkstra(g, &[(source, 0.0)], cutoff_m)
                .into_iter()
                .map(|(node, _)| hex_of_node[node as usize])
                .collect();
            hexes.push(hex_of_node[source as usize]);
            hexes.sort_unstable();
            hexes.dedup();
            hexes
        })
        .collect()
}

/// Unweighted mean of member-hex population and intersection densities
/// for each node's catchment.
pub fn node_local_density(
    catchments: &[Vec<u64>],
    grid: &HexGrid,
) -> Result<Vec<(f64, f64)>> {
    catchments
        .iter()
        .map(|hexes| {
            debug_assert!(!hexes.is_empty());
            let mut pop = 0.0;
            let mut inter = 0.0;
            for &h in hexes {
                let cell = grid.cell(h).ok_or(Error::MissingHex(h))?;
                pop += cell.pop_density;
                inter += cell.intersection_density;
            }
            let n = hexes.len() as f64;
            Ok((pop / n, inter / n))
        })
        .collect()
}

/// Consolidated street intersections.
#[derive(Debug, Clone, Default, serde::Serialize, serde::Deserialize)]
pub struct IntersectionSet {
    pub points: Vec<ProjectedPoint>,
}

impl IntersectionSet {
    /// Intersection count per hex cell by point containment; cells without
    /// intersections are absent.
    pub fn hex_counts(&self, grid: &HexGrid) -> std::collections::BTreeMap<u64, u32> {
        let mut counts = std::collections::BTreeMap::new();
        for p in &self.points {
            if let Some(h) = grid.cell_containing(*p) {
                *counts.entry(h).or_insert(0) += 1;
            }
        }
        counts
    }
}

/// Merges candidate intersection nodes (degree >= 3) lying within
/// `tolerance_m` of each other (transitively) into their centroid.
pub fn consolidate_intersections(g: &PedestrianGraph, tolerance_m: f64) -> IntersectionSet {
    assert!(tolerance_m > 0.0);
    let candidates: Vec<u32> = (0..g.node_count() as u32)
        .filter(|&n| g.degree(n) >= 3)
        .collect();
    if candidates.is_empty() {
        return IntersectionSet::default();
    }
    let coords: Vec<ProjectedPoint> = candidates.iter().map(|&n| g.coord(n)).collect();
    let index = GridIndex::build(coords.clone(), tolerance_m.max(1.0));

    // union-find over candidate positions
    let mut parent: Vec<u32> = (0..candidates.len() as u32).collect();
    fn find(parent: &mut [u32], i: u32) -> u32 {
        let mut root = i;
        while parent[root as usize] != root {
            root = parent[root as usize];
        }
        let mut cur = i;
        while parent[cur as usize] != root {
            let next = parent[cur as usize];
            parent[cur as usize] = root;
            cur = next;
        }
        root
    }
    for (i, p) in coords.iter().enumerate() {
        for (j, _) in index.within(*p, tolerance_m) {
            let (a, b) = (find(&mut parent, i as u32), find(&mut parent, j));
            if a != b {
                let (lo, hi) = (a.min(b), a.max(b));
                parent[hi as usize] = lo;
            }
        }
    }

    let mut clusters: std::collections::BTreeMap<u32, Vec<usize>> = std::collections::BTreeMap::new();
    for i in 0..candidates.len() {
        clusters
            .entry(find(&mut parent, i as u32))
            .or_default()
            .push(i);
    }
    let points = clusters
        .values()
        .map(|members| {
            let n = members.len() as f64;
            let (sx, sy) = members
                .iter()
                .fold((0.0, 0.0), |(sx, sy), &i| (sx + coords[i].x, sy + coords[i].y));
            ProjectedPoint::new(sx / n, sy / n)
        })
        .collect();
    IntersectionSet { points }
}
