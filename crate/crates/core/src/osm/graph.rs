//! Pedestrian street network derived from an OSM extract.
//!
//! Ways carrying a `highway` tag are retained unless they are motorways,
//! tagged `foot=no`, or `access=private`. Ways are split at shared nodes
//! so edges meet only at graph nodes; pass-through geometry survives as
//! edge polylines. Edges are clipped to the buffered study region, with
//! cut points introduced as synthetic nodes.

use super::{OsmExtract, Tags};
use crate::error::{Error, Result};
use crate::geometry::tmerc::TransverseMercator;
use crate::geometry::{in_buffered_multi, polyline_length, Polygon, ProjectedPoint};
use std::collections::HashMap;

/// An undirected edge with its preserved geometry.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct Edge {
    pub a: u32,
    pub b: u32,
    pub length_m: f64,
    pub polyline: Vec<ProjectedPoint>,
}

/// Undirected pedestrian network. Node indices are compact (`u32`), with
/// original OSM ids (negative for synthetic boundary-cut nodes) retained
/// for reference.
#[derive(Debug, Clone, Default)]
pub struct PedestrianGraph {
    node_ids: Vec<i64>,
    coords: Vec<ProjectedPoint>,
    adj: Vec<Vec<u32>>,
    edges: Vec<Edge>,
    id_index: HashMap<i64, u32>,
}

impl PedestrianGraph {
    /// Assembles a graph from id-keyed nodes and edges. Nodes are sorted by
    /// id so the layout is independent of input order.
    pub fn from_parts(
        mut nodes: Vec<(i64, ProjectedPoint)>,
        edges: Vec<(i64, i64, Vec<ProjectedPoint>)>,
    ) -> Result<PedestrianGraph> {
        nodes.sort_by_key(|(id, _)| *id);
        nodes.dedup_by_key(|(id, _)| *id);
        let id_index: HashMap<i64, u32> = nodes
            .iter()
            .enumerate()
            .map(|(i, (id, _))| (*id, i as u32))
            .collect();
        let mut g = PedestrianGraph {
            node_ids: nodes.iter().map(|(id, _)| *id).collect(),
            coords: nodes.iter().map(|(_, p)| *p).collect(),
            adj: vec![Vec::new(); nodes.len()],
            edges: Vec::with_capacity(edges.len()),
            id_index,
        };
        for (ua, ub, polyline) in edges {
            let a = *g
                .id_index
                .get(&ua)
                .ok_or_else(|| Error::Geometry(format!("edge endpoint {ua} not in node table")))?;
            let b = *g
                .id_index
                .get(&ub)
                .ok_or_else(|| Error::Geometry(format!("edge endpoint {ub} not in node table")))?;
            let length_m = polyline_length(&polyline);
            if length_m <= 0.0 {
                continue;
            }
            let idx = g.edges.len() as u32;
            g.adj[a as usize].push(idx);
            if b != a {
                g.adj[b as usize].push(idx);
            }
            g.edges.push(Edge {
                a,
                b,
                length_m,
                polyline,
            });
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_id(&self, idx: u32) -> i64 {
        self.node_ids[idx as usize]
    }

    pub fn node_index(&self, id: i64) -> Option<u32> {
        self.id_index.get(&id).copied()
    }

    pub fn coord(&self, idx: u32) -> ProjectedPoint {
        self.coords[idx as usize]
    }

    pub fn coords(&self) -> &[ProjectedPoint] {
        &self.coords
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, idx: u32) -> &Edge {
        &self.edges[idx as usize]
    }

    /// Edge indices incident to a node (self-loops appear once).
    pub fn incident_edges(&self, node: u32) -> &[u32] {
        &self.adj[node as usize]
    }

    /// Node degree counting self-loops twice.
    pub fn degree(&self, node: u32) -> usize {
        self.adj[node as usize]
            .iter()
            .map(|&e| {
                let edge = &self.edges[e as usize];
                if edge.a == edge.b {
                    2
                } else {
                    1
                }
            })
            .sum()
    }

    /// Neighbor node and edge length for each incident edge.
    pub fn neighbors(&self, node: u32) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.adj[node as usize].iter().map(move |&e| {
            let edge = &self.edges[e as usize];
            let other = if edge.a == node { edge.b } else { edge.a };
            (other, edge.length_m)
        })
    }

    pub fn total_length_m(&self) -> f64 {
        self.edges.iter().map(|e| e.length_m).sum()
    }
}

/// The pedestrian way filter: any `highway` except motorways, not
/// `foot=no`, not `access=private`.
pub fn is_pedestrian_way(tags: &Tags) -> bool {
    let Some(highway) = tags.get("highway") else {
        return false;
    };
    if highway == "motorway" || highway == "motorway_link" {
        return false;
    }
    if tags.get("foot").is_some_and(|v| v == "no") {
        return false;
    }
    if tags.get("access").is_some_and(|v| v == "private") {
        return false;
    }
    true
}

/// Counters reported by graph construction.
#[derive(Debug, Clone, Default, serde::Serialize, serde::Deserialize)]
pub struct GraphDiagnostics {
    pub ways_retained: u64,
    pub edges_clipped: u64,
    pub stubs_dropped: u64,
}

/// Derives the pedestrian network for a buffered study region.
pub fn build_pedestrian_graph(
    extract: &OsmExtract,
    projection: &TransverseMercator,
    region: &[Polygon],
    buffer_m: f64,
    region_name: &str,
) -> Result<(PedestrianGraph, GraphDiagnostics)> {
    let mut diagnostics = GraphDiagnostics::default();

    let mut ways: Vec<&super::OsmWay> = extract
        .ways
        .iter()
        .filter(|w| is_pedestrian_way(&w.tags))
        .collect();
    ways.sort_by_key(|w| w.id);
    diagnostics.ways_retained = ways.len() as u64;

    // junctions: way endpoints plus nodes referenced more than once
    let mut usage: HashMap<i64, u32> = HashMap::new();
    for w in &ways {
        for &r in &w.refs {
            *usage.entry(r).or_insert(0) += 1;
        }
    }
    let is_junction = |way: &super::OsmWay, pos: usize| -> bool {
        let id = way.refs[pos];
        pos == 0 || pos == way.refs.len() - 1 || usage.get(&id).copied().unwrap_or(0) >= 2
    };

    // projected coordinates for every referenced node
    let mut projected: HashMap<i64, ProjectedPoint> = HashMap::new();
    for w in &ways {
        for &r in &w.refs {
            if let std::collections::hash_map::Entry::Vacant(e) = projected.entry(r) {
                let (lat, lon) = extract.coord(r).expect("refs verified at load");
                e.insert(projection.forward(lat, lon)?);
            }
        }
    }

    let mut parts = GraphParts::default();
    for way in &ways {
        // split at junctions
        let mut seg_ids: Vec<i64> = Vec::new();
        let mut seg_pts: Vec<ProjectedPoint> = Vec::new();
        for pos in 0..way.refs.len() {
            let id = way.refs[pos];
            if seg_ids.last() == Some(&id) {
                continue; // duplicate consecutive reference
            }
            seg_ids.push(id);
            seg_pts.push(projected[&id]);
            if seg_ids.len() >= 2 && is_junction(way, pos) {
                parts.emit_clipped(&seg_ids, &seg_pts, region, buffer_m, &mut diagnostics);
                seg_ids = vec![id];
                seg_pts = vec![projected[&id]];
            }
        }
        if seg_ids.len() >= 2 {
            parts.emit_clipped(&seg_ids, &seg_pts, region, buffer_m, &mut diagnostics);
        }
    }

    let mut graph = PedestrianGraph::from_parts(parts.nodes, parts.edges)?;
    graph = drop_short_stubs(graph, 1.0, &mut diagnostics)?;
    if graph.edge_count() == 0 {
        return Err(Error::EmptyNetwork(region_name.to_string()));
    }
    Ok((graph, diagnostics))
}

/// Accumulates id-keyed nodes and edges during construction.
#[derive(Default)]
struct GraphParts {
    nodes: Vec<(i64, ProjectedPoint)>,
    edges: Vec<(i64, i64, Vec<ProjectedPoint>)>,
    seen: std::collections::HashSet<i64>,
    next_synth: i64,
}

impl GraphParts {
    fn add_node(&mut self, id: i64, p: ProjectedPoint) {
        if self.seen.insert(id) {
            self.nodes.push((id, p));
        }
    }

    fn synth(&mut self) -> i64 {
        self.next_synth -= 1;
        self.next_synth
    }

    fn flush_run(
        &mut self,
        run_pts: Vec<ProjectedPoint>,
        start_id: Option<i64>,
        end_id: Option<i64>,
    ) {
        if run_pts.len() < 2 || polyline_length(&run_pts) <= 0.0 {
            return;
        }
        let ua = start_id.unwrap_or_else(|| self.synth());
        let ub = end_id.unwrap_or_else(|| self.synth());
        self.add_node(ua, run_pts[0]);
        self.add_node(ub, *run_pts.last().unwrap());
        self.edges.push((ua, ub, run_pts));
    }

    /// Emits the inside runs of one split way segment, cutting at the
    /// buffered region boundary.
    fn emit_clipped(
        &mut self,
        seg_ids: &[i64],
        seg_pts: &[ProjectedPoint],
        region: &[Polygon],
        buffer_m: f64,
        diagnostics: &mut GraphDiagnostics,
    ) {
        let inside: Vec<bool> = seg_pts
            .iter()
            .map(|p| in_buffered_multi(*p, region, buffer_m))
            .collect();

        let mut run_pts: Vec<ProjectedPoint> = Vec::new();
        let mut run_start_id: Option<i64> = None;
        let mut clipped = false;

        for i in 0..seg_pts.len() {
            if inside[i] {
                if run_pts.is_empty() {
                    if i == 0 {
                        run_start_id = Some(seg_ids[0]);
                    } else {
                        // entering the region: cut on segment (i-1, i)
                        let cut = boundary_cut(seg_pts[i], seg_pts[i - 1], region, buffer_m);
                        run_pts.push(cut);
                        run_start_id = None;
                        clipped = true;
                    }
                }
                run_pts.push(seg_pts[i]);
                if i == seg_pts.len() - 1 {
                    let pts = std::mem::take(&mut run_pts);
                    self.flush_run(pts, run_start_id, Some(seg_ids[i]));
                }
            } else if !run_pts.is_empty() {
                // leaving the region: cut on segment (i-1, i)
                let cut = boundary_cut(seg_pts[i - 1], seg_pts[i], region, buffer_m);
                run_pts.push(cut);
                clipped = true;
                let pts = std::mem::take(&mut run_pts);
                self.flush_run(pts, run_start_id, None);
                run_start_id = None;
            }
        }
        if clipped {
            diagnostics.edges_clipped += 1;
        }
    }
}

/// Bisects for the buffered-region boundary between an inside and an
/// outside point.
fn boundary_cut(
    inside: ProjectedPoint,
    outside: ProjectedPoint,
    region: &[Polygon],
    buffer_m: f64,
) -> ProjectedPoint {
    let mut lo = 0.0f64; // at `inside`
    let mut hi = 1.0f64; // at `outside`
    for _ in 0..40 {
        let mid = (lo + hi) / 2.0;
        let p = ProjectedPoint::new(
            inside.x + mid * (outside.x - inside.x),
            inside.y + mid * (outside.y - inside.y),
        );
        if in_buffered_multi(p, region, buffer_m) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ProjectedPoint::new(
        inside.x + lo * (outside.x - inside.x),
        inside.y + lo * (outside.y - inside.y),
    )
}

/// Removes dangling edges shorter than `min_len` attached at a degree-1
/// endpoint, then compacts the node set.
fn drop_short_stubs(
    g: PedestrianGraph,
    min_len: f64,
    diagnostics: &mut GraphDiagnostics,
) -> Result<PedestrianGraph> {
    let keep: Vec<bool> = g
        .edges
        .iter()
        .map(|e| {
            let dangling = g.degree(e.a) == 1 || g.degree(e.b) == 1;
            !(dangling && e.length_m < min_len)
        })
        .collect();
    let dropped = keep.iter().filter(|k| !**k).count();
    if dropped == 0 {
        return Ok(g);
    }
    diagnostics.stubs_dropped += dropped as u64;
    let mut nodes: Vec<(i64, ProjectedPoint)> = Vec::new();
    let mut used = std::collections::HashSet::new();
    let mut edges = Vec::new();
    for (e, keep_it) in g.edges.iter().zip(&keep) {
        if !keep_it {
            continue;
        }
        for idx in [e.a, e.b] {
            if used.insert(idx) {
                nodes.push((g.node_id(idx), g.coord(idx)));
            }
        }
        edges.push((g.node_id(e.a), g.node_id(e.b), e.polyline.clone()));
    }
    PedestrianGraph::from_parts(nodes, edges)
}
