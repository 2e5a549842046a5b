//! Sample-point generation and per-point indicator estimation.
//!
//! Sample points are generated at a fixed arc-length interval along every
//! network edge, retained where the containing hex cell meets the
//! population threshold, and estimated by combining the two terminal
//! nodes' first-pass results.

pub mod aggregate;
pub mod score;

use crate::error::{Error, Result};
use crate::geometry::hex::HexGrid;
use crate::geometry::{in_buffered_multi, polyline_point_at, Polygon, ProjectedPoint};
use crate::network::NodeDistanceField;
use crate::osm::graph::PedestrianGraph;
use score::{AccessMethod, AccessParams};
use std::collections::BTreeMap;

/// A proxy residential origin on a network edge. `n1`/`n2` are the edge's
/// terminal node ids; `l1`/`l2` the arc-length distances to each. For a
/// closed loop edge the two ids coincide.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SamplePoint {
    pub id: u64,
    pub location: ProjectedPoint,
    pub n1: i64,
    pub n2: i64,
    pub l1: f64,
    pub l2: f64,
    pub hex: u64,
}

/// Generates sample points every `interval_m` along each edge (offsets 0,
/// i, 2i, ... strictly below the edge length), deduplicating points that
/// coincide with a node already sampled by an earlier edge. Hex ids come
/// from containment in `grid`.
pub fn generate_sample_points(
    g: &PedestrianGraph,
    interval_m: f64,
    grid: &HexGrid,
) -> Result<Vec<SamplePoint>> {
    assert!(interval_m > 0.0, "sample interval must be positive");
    let mut points = Vec::new();
    let mut node_sampled = vec![false; g.node_count()];
    let mut id = 0u64;
    for edge in g.edges() {
        let mut offset = 0.0;
        while offset < edge.length_m {
            if offset == 0.0 {
                // point coincident with terminal node a
                if node_sampled[edge.a as usize] {
                    offset += interval_m;
                    continue;
                }
                node_sampled[edge.a as usize] = true;
            }
            let location = polyline_point_at(&edge.polyline, offset);
            let hex = grid.cell_containing(location).ok_or_else(|| {
                Error::Geometry(format!(
                    "sample point at ({}, {}) outside the hex grid",
                    location.x, location.y
                ))
            })?;
            points.push(SamplePoint {
                id,
                location,
                n1: g.node_id(edge.a),
                n2: g.node_id(edge.b),
                l1: offset,
                l2: edge.length_m - offset,
                hex,
            });
            id += 1;
            offset += interval_m;
        }
    }
    Ok(points)
}

/// Keeps points inside the (unbuffered) study region; the graph extends
/// into the buffer but origins are sampled within the region itself.
pub fn retain_in_region(points: Vec<SamplePoint>, region: &[Polygon]) -> Vec<SamplePoint> {
    points
        .into_iter()
        .filter(|p| in_buffered_multi(p.location, region, 0.0))
        .collect()
}

/// Retains points whose hex cell population meets the threshold.
pub fn filter_sample_points(
    points: Vec<SamplePoint>,
    grid: &HexGrid,
    threshold: f64,
) -> Result<Vec<SamplePoint>> {
    let mut kept = Vec::with_capacity(points.len());
    for p in points {
        let cell = grid.cell(p.hex).ok_or(Error::MissingHex(p.hex))?;
        if cell.population >= threshold {
            kept.push(p);
        }
    }
    Ok(kept)
}

/// Result of evaluating one sample point against one destination class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleAccess {
    /// Minimum full distance via either terminal node.
    Distance(f64),
    /// Both terminal nodes present but unreached within the cutoff.
    Unreached,
    /// A terminal node id is absent from the graph; the sample point must
    /// be omitted from all estimates.
    Omitted,
}

/// Minimum full distance from a sample point to its nearest destination:
/// `min_i(l_i + field[n_i])` over terminal nodes present in the field.
pub fn sample_access_distance(
    sp: &SamplePoint,
    g: &PedestrianGraph,
    field: &NodeDistanceField,
) -> SampleAccess {
    let (Some(i1), Some(i2)) = (g.node_index(sp.n1), g.node_index(sp.n2)) else {
        return SampleAccess::Omitted;
    };
    let via1 = field.get(i1).map(|d| sp.l1 + d);
    let via2 = field.get(i2).map(|d| sp.l2 + d);
    match (via1, via2) {
        (Some(a), Some(b)) => SampleAccess::Distance(a.min(b)),
        (Some(a), None) => SampleAccess::Distance(a),
        (None, Some(b)) => SampleAccess::Distance(b),
        (None, None) => SampleAccess::Unreached,
    }
}

/// Per-point indicator estimates.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SampleEstimate {
    pub point: SamplePoint,
    pub nh_pop_density: f64,
    pub nh_intersection_density: f64,
    /// Network distance per destination class; `None` = unreached.
    pub access_distance: BTreeMap<String, Option<f64>>,
    /// Score per class under the configured method.
    pub access_score: BTreeMap<String, f64>,
    pub daily_living: f64,
    pub walkability: f64,
}

#[derive(Debug, Clone, Default, serde::Serialize, serde::Deserialize)]
pub struct EstimateDiagnostics {
    pub omitted_missing_terminal: u64,
    pub degenerate_z_columns: Vec<String>,
}

/// Inputs prepared by the first-pass (node-level) analysis.
pub struct NodeEstimates<'a> {
    /// (pop_density, intersection_density) per node index.
    pub local_density: &'a [(f64, f64)],
    /// Nearest-destination field per class.
    pub fields: &'a BTreeMap<String, NodeDistanceField>,
}

/// Second-pass analysis: derives estimates for every retained sample
/// point, then standardizes within the region to produce walkability.
pub fn estimate_sample_points(
    g: &PedestrianGraph,
    points: &[SamplePoint],
    node: &NodeEstimates,
    method: AccessMethod,
    params: &AccessParams,
    daily_classes: &[String; 3],
) -> Result<(Vec<SampleEstimate>, EstimateDiagnostics)> {
    let mut diagnostics = EstimateDiagnostics::default();
    let mut estimates: Vec<SampleEstimate> = Vec::with_capacity(points.len());

    'points: for sp in points {
        let (Some(i1), Some(i2)) = (g.node_index(sp.n1), g.node_index(sp.n2)) else {
            diagnostics.omitted_missing_terminal += 1;
            continue;
        };
        let (pop1, int1) = node.local_density[i1 as usize];
        let (pop2, int2) = node.local_density[i2 as usize];
        let nh_pop_density = score::interpolate_density(pop1, pop2, sp.l1, sp.l2)?;
        let nh_intersection_density = score::interpolate_density(int1, int2, sp.l1, sp.l2)?;

        let mut access_distance = BTreeMap::new();
        let mut access = BTreeMap::new();
        for (class, field) in node.fields {
            match sample_access_distance(sp, g, field) {
                SampleAccess::Distance(d) => {
                    access_distance.insert(class.clone(), Some(d));
                    access.insert(class.clone(), score::access_score(Some(d), method, params));
                }
                SampleAccess::Unreached => {
                    access_distance.insert(class.clone(), None);
                    access.insert(class.clone(), 0.0);
                }
                SampleAccess::Omitted => {
                    diagnostics.omitted_missing_terminal += 1;
                    continue 'points;
                }
            }
        }

        let binary = |class: &String| -> f64 {
            let d = access_distance.get(class).copied().flatten();
            score::access_score(d, AccessMethod::Binary, params)
        };
        let daily = score::daily_living([
            binary(&daily_classes[0]),
            binary(&daily_classes[1]),
            binary(&daily_classes[2]),
        ])?;

        estimates.push(SampleEstimate {
            point: sp.clone(),
            nh_pop_density,
            nh_intersection_density,
            access_distance,
            access_score: access,
            daily_living: daily,
            walkability: 0.0,
        });
    }

    // within-region standardization over the retained sample points
    if estimates.len() >= 2 {
        let col =
            |f: &dyn Fn(&SampleEstimate) -> f64| estimates.iter().map(f).collect::<Vec<f64>>();
        let (z_pop, f1) = score::zscores(&col(&|e| e.nh_pop_density))?;
        let (z_int, f2) = score::zscores(&col(&|e| e.nh_intersection_density))?;
        let (z_dl, f3) = score::zscores(&col(&|e| e.daily_living))?;
        for (name, flag) in [
            ("nh_pop_density", f1),
            ("nh_intersection_density", f2),
            ("daily_living", f3),
        ] {
            if flag {
                diagnostics.degenerate_z_columns.push(name.to_string());
            }
        }
        for (i, e) in estimates.iter_mut().enumerate() {
            e.walkability = score::walkability(z_pop[i], z_int[i], z_dl[i]);
        }
    }

    Ok((estimates, diagnostics))
}
