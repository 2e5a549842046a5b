//! `.osm.pbf` reader backed by the `osmpbf` crate.

use super::{ElementKind, OsmElement, OsmNode, OsmRelation, OsmWay, RelMember, Tags};
use crate::error::{Error, Result};
use osmpbf::{Element, ElementReader};
use std::path::Path;

pub fn parse_pbf(path: &Path, mut callback: impl FnMut(OsmElement)) -> Result<()> {
    let reader = ElementReader::from_path(path).map_err(|e| Error::OsmParse {
        path: path.to_path_buf(),
        detail: format!("open failed: {e}"),
    })?;
    reader
        .for_each(|element| match element {
            Element::Node(n) => {
                let tags: Tags = n
                    .tags()
                    .map(|(k, v)| (k.to_string(), v.to_string()))
                    .collect();
                callback(OsmElement::Node(OsmNode {
                    id: n.id(),
                    lat: n.lat(),
                    lon: n.lon(),
                    tags,
                }));
            }
            Element::DenseNode(n) => {
                let tags: Tags = n
                    .tags()
                    .map(|(k, v)| (k.to_string(), v.to_string()))
                    .collect();
                callback(OsmElement::Node(OsmNode {
                    id: n.id(),
                    lat: n.lat(),
                    lon: n.lon(),
                    tags,
                }));
            }
            Element::Way(w) => {
                let tags: Tags = w
                    .tags()
                    .map(|(k, v)| (k.to_string(), v.to_string()))
                    .collect();
                callback(OsmElement::Way(OsmWay {
                    id: w.id(),
                    refs: w.refs().collect(),
                    tags,
                }));
            }
            Element::Relation(r) => {
                let tags: Tags = r
                    .tags()
                    .map(|(k, v)| (k.to_string(), v.to_string()))
                    .collect();
                let members = r
                    .members()
                    .map(|m| RelMember {
                        kind: match m.member_type {
                            osmpbf::RelMemberType::Node => ElementKind::Node,
                            osmpbf::RelMemberType::Way => ElementKind::Way,
                            osmpbf::RelMemberType::Relation => ElementKind::Relation,
                        },
                        id: m.member_id,
                        role: m.role().unwrap_or_default().to_string(),
                    })
                    .collect();
                callback(OsmElement::Relation(OsmRelation {
                    id: r.id(),
                    members,
                    tags,
                }));
            }
        })
        .map_err(|e| Error::OsmParse {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })
}
