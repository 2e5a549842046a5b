//! Destination point-of-interest extraction from an OSM extract.
//!
//! Matching nodes become points directly; matching closed ways and
//! `multipolygon` relations are represented by the area centroid of their
//! exterior geometry. A feature matching queries of several classes
//! appears once in each class.

use super::{tags_match, ElementKind, OsmExtract, Tags};
use crate::error::Result;
use crate::geometry::tmerc::TransverseMercator;
use crate::geometry::{in_buffered_multi, Polygon, ProjectedPoint, Ring};
use std::collections::{BTreeMap, HashSet};

/// Destination queries per class: `class -> [(key, value)]`, `*` matching
/// any value.
pub type DestinationQueries = BTreeMap<String, Vec<(String, String)>>;

/// One extracted destination.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct Poi {
    pub source_id: i64,
    pub kind: ElementKind,
    pub location: ProjectedPoint,
    pub tags: Tags,
}

/// All destinations of one class.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct PoiSet {
    pub class: String,
    pub points: Vec<Poi>,
}

impl PoiSet {
    pub fn empty(class: impl Into<String>) -> Self {
        PoiSet {
            class: class.into(),
            points: Vec::new(),
        }
    }

    pub fn locations(&self) -> Vec<ProjectedPoint> {
        self.points.iter().map(|p| p.location).collect()
    }
}

/// Extracts classified POI sets within the buffered region. Empty classes
/// are allowed and returned empty.
pub fn extract_pois(
    extract: &OsmExtract,
    queries: &DestinationQueries,
    projection: &TransverseMercator,
    region: &[Polygon],
    buffer_m: f64,
) -> Result<Vec<PoiSet>> {
    let mut sets = Vec::new();
    for (class, pairs) in queries {
        let mut points: Vec<Poi> = Vec::new();
        let mut seen: HashSet<(ElementKind, i64)> = HashSet::new();

        for node in &extract.nodes {
            if node.tags.is_empty() || !tags_match(&node.tags, pairs) {
                continue;
            }
            let p = projection.forward(node.lat, node.lon)?;
            if in_buffered_multi(p, region, buffer_m) && seen.insert((ElementKind::Node, node.id)) {
                points.push(Poi {
                    source_id: node.id,
                    kind: ElementKind::Node,
                    location: p,
                    tags: node.tags.clone(),
                });
            }
        }

        for way in &extract.ways {
            if !tags_match(&way.tags, pairs) {
                continue;
            }
            let Some(centroid) = closed_way_centroid(extract, projection, &way.refs)? else {
                continue;
            };
            if in_buffered_multi(centroid, region, buffer_m)
                && seen.insert((ElementKind::Way, way.id))
            {
                points.push(Poi {
                    source_id: way.id,
                    kind: ElementKind::Way,
                    location: centroid,
                    tags: way.tags.clone(),
                });
            }
        }

        for rel in &extract.relations {
            if rel.tags.get("type").map(String::as_str) != Some("multipolygon")
                || !tags_match(&rel.tags, pairs)
            {
                continue;
            }
            let Some(centroid) = relation_centroid(extract, projection, rel)? else {
                continue;
            };
            if in_buffered_multi(centroid, region, buffer_m)
                && seen.insert((ElementKind::Relation, rel.id))
            {
                points.push(Poi {
                    source_id: rel.id,
                    kind: ElementKind::Relation,
                    location: centroid,
                    tags: rel.tags.clone(),
                });
            }
        }

        points.sort_by_key(|p| (p.kind, p.source_id));
        sets.push(PoiSet {
            class: class.clone(),
            points,
        });
    }
    Ok(sets)
}

/// Area centroid of a closed way's projected ring; `None` for open or
/// degenerate ways.
fn closed_way_centroid(
    extract: &OsmExtract,
    projection: &TransverseMercator,
    refs: &[i64],
) -> Result<Option<ProjectedPoint>> {
    if refs.len() < 4 || refs.first() != refs.last() {
        return Ok(None);
    }
    let mut pts = Vec::with_capacity(refs.len());
    for &r in refs {
        let Some((lat, lon)) = extract.coord(r) else {
            return Ok(None);
        };
        pts.push(projection.forward(lat, lon)?);
    }
    match Ring::new(pts) {
        Ok(ring) => Ok(Some(ring.centroid())),
        Err(_) => Ok(None),
    }
}

/// Area-weighted centroid over the closed outer member ways of a
/// multipolygon relation; inner rings are ignored.
fn relation_centroid(
    extract: &OsmExtract,
    projection: &TransverseMercator,
    rel: &super::OsmRelation,
) -> Result<Option<ProjectedPoint>> {
    let mut weighted = (0.0f64, 0.0f64);
    let mut total_area = 0.0f64;
    for m in &rel.members {
        if m.kind != ElementKind::Way || !(m.role == "outer" || m.role.is_empty()) {
            continue;
        }
        let Some(way) = extract.ways.iter().find(|w| w.id == m.id) else {
            continue;
        };
        if let Some(c) = closed_way_centroid(extract, projection, &way.refs)? {
            // recompute the ring for its area weight
            let mut pts = Vec::with_capacity(way.refs.len());
            for &r in &way.refs {
                let (lat, lon) = extract.coord(r).expect("checked by centroid");
                pts.push(projection.forward(lat, lon)?);
            }
            let area = Ring::new(pts).map(|r| r.area()).unwrap_or(0.0);
            weighted.0 += c.x * area;
            weighted.1 += c.y * area;
            total_area += area;
        }
    }
    if total_area <= 0.0 {
        return Ok(None);
    }
    Ok(Some(ProjectedPoint::new(
        weighted.0 / total_area,
        weighted.1 / total_area,
    )))
}

/// Polygon with the exterior ring's area centroid; exposed for tests and
/// for GeoJSON-sourced official layers.
pub fn ring_centroid(polygon: &Polygon) -> ProjectedPoint {
    polygon.centroid()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::tmerc::ProjectionContext;
    use crate::osm::{OsmNode, OsmWay, RelMember};

    fn tags(pairs: &[(&str, &str)]) -> Tags {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    fn queries(spec: &[(&str, &[(&str, &str)])]) -> DestinationQueries {
        spec.iter()
            .map(|(class, pairs)| {
                (
                    class.to_string(),
                    pairs
                        .iter()
                        .map(|(k, v)| (k.to_string(), v.to_string()))
                        .collect(),
                )
            })
            .collect()
    }

    fn world_region(projection: &TransverseMercator) -> Vec<Polygon> {
        let c = projection.forward(0.0, 9.0).unwrap();
        vec![Polygon::from_exterior(vec![
            ProjectedPoint::new(c.x - 50_000.0, c.y - 50_000.0),
            ProjectedPoint::new(c.x + 50_000.0, c.y - 50_000.0),
            ProjectedPoint::new(c.x + 50_000.0, c.y + 50_000.0),
            ProjectedPoint::new(c.x - 50_000.0, c.y + 50_000.0),
        ])
        .unwrap()]
    }

    #[test]
    fn node_poi_classified() {
        let projection = TransverseMercator::new(ProjectionContext::new(32, false));
        let mut ex = OsmExtract::default();
        ex.nodes.push(OsmNode {
            id: 1,
            lat: 0.0,
            lon: 9.0,
            tags: tags(&[("shop", "convenience")]),
        });
        ex.reindex();
        let q = queries(&[("convenience", &[("shop", "convenience")])]);
        let region = world_region(&projection);
        let sets = extract_pois(&ex, &q, &projection, &region, 0.0).unwrap();
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].class, "convenience");
        assert_eq!(sets[0].points.len(), 1);
        assert_eq!(sets[0].points[0].kind, ElementKind::Node);
    }

    #[test]
    fn closed_way_centroid_is_square_center() {
        let projection = TransverseMercator::new(ProjectionContext::new(32, false));
        // a roughly 100 m square footprint near (0, 9)
        let d = 0.0009; // ~100 m in longitude at the equator
        let mut ex = OsmExtract::default();
        for (i, (lat, lon)) in [
            (0.0, 9.0),
            (0.0, 9.0 + d),
            (d, 9.0 + d),
            (d, 9.0),
        ]
        .iter()
        .enumerate()
        {
            ex.nodes.push(OsmNode {
                id: i as i64 + 1,
                lat: *lat,
                lon: *lon,
                tags: Tags::new(),
            });
        }
        ex.ways.push(OsmWay {
            id: 100,
            refs: vec![1, 2, 3, 4, 1],
            tags: tags(&[("shop", "supermarket")]),
        });
        ex.reindex();
        let q = queries(&[("fresh_food_market", &[("shop", "supermarket")])]);
        let region = world_region(&projection);
        let sets = extract_pois(&ex, &q, &projection, &region, 0.0).unwrap();
        assert_eq!(sets[0].points.len(), 1);
        let c = sets[0].points[0].location;
        // centroid should sit at the mean of the projected corners
        let corners: Vec<ProjectedPoint> = [(0.0, 9.0), (0.0, 9.0 + d), (d, 9.0 + d), (d, 9.0)]
            .iter()
            .map(|(lat, lon)| projection.forward(*lat, *lon).unwrap())
            .collect();
        let mean = ProjectedPoint::new(
            corners.iter().map(|p| p.x).sum::<f64>() / 4.0,
            corners.iter().map(|p| p.y).sum::<f64>() / 4.0,
        );
        assert!(c.dist(mean) < 0.5, "centroid off by {}", c.dist(mean));
    }

    #[test]
    fn feature_in_multiple_classes_once_each() {
        let projection = TransverseMercator::new(ProjectionContext::new(32, false));
        let mut ex = OsmExtract::default();
        ex.nodes.push(OsmNode {
            id: 7,
            lat: 0.0,
            lon: 9.0,
            tags: tags(&[("shop", "supermarket"), ("amenity", "marketplace")]),
        });
        ex.reindex();
        let q = queries(&[
            ("fresh_food_market", &[("shop", "supermarket"), ("amenity", "marketplace")]),
            ("market_any", &[("amenity", "marketplace")]),
        ]);
        let region = world_region(&projection);
        let sets = extract_pois(&ex, &q, &projection, &region, 0.0).unwrap();
        assert_eq!(sets.len(), 2);
        for set in &sets {
            assert_eq!(set.points.len(), 1, "class {} should hold it once", set.class);
        }
    }

    #[test]
    fn outside_region_excluded_and_empty_class_allowed() {
        let projection = TransverseMercator::new(ProjectionContext::new(32, false));
        let mut ex = OsmExtract::default();
        ex.nodes.push(OsmNode {
            id: 1,
            lat: 2.0, // ~220 km north, outside the 50 km region
            lon: 9.0,
            tags: tags(&[("shop", "convenience")]),
        });
        ex.reindex();
        let q = queries(&[
            ("convenience", &[("shop", "convenience")]),
            ("pt_any", &[("highway", "bus_stop")]),
        ]);
        let region = world_region(&projection);
        let sets = extract_pois(&ex, &q, &projection, &region, 0.0).unwrap();
        assert!(sets.iter().all(|s| s.points.is_empty()));
        assert_eq!(sets.len(), 2);
    }

    #[test]
    fn multipolygon_relation_centroid() {
        let projection = TransverseMercator::new(ProjectionContext::new(32, false));
        let d = 0.0009;
        let mut ex = OsmExtract::default();
        for (i, (lat, lon)) in [(0.0, 9.0), (0.0, 9.0 + d), (d, 9.0 + d), (d, 9.0)]
            .iter()
            .enumerate()
        {
            ex.nodes.push(OsmNode {
                id: i as i64 + 1,
                lat: *lat,
                lon: *lon,
                tags: Tags::new(),
            });
        }
        ex.ways.push(OsmWay {
            id: 100,
            refs: vec![1, 2, 3, 4, 1],
            tags: Tags::new(),
        });
        ex.relations.push(super::super::OsmRelation {
            id: 500,
            members: vec![RelMember {
                kind: ElementKind::Way,
                id: 100,
                role: "outer".into(),
            }],
            tags: tags(&[("type", "multipolygon"), ("leisure", "park")]),
        });
        ex.reindex();
        let q = queries(&[("public_open_space_any", &[("leisure", "park")])]);
        let region = world_region(&projection);
        let sets = extract_pois(&ex, &q, &projection, &region, 0.0).unwrap();
        assert_eq!(sets[0].points.len(), 1);
        assert_eq!(sets[0].points[0].kind, ElementKind::Relation);
    }
}
