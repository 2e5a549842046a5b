//! OpenStreetMap extract parsing: element model, XML and PBF readers.
//!
//! Elements are streamed from the file; way geometry is resolved against a
//! node-coordinate table in a second pass, so memory scales with the node
//! table rather than the file size.

pub mod graph;
pub mod pbf;
pub mod poi;
pub mod xml;

use crate::error::{Error, Result};
use std::collections::{BTreeMap, HashMap};
use std::io::Read;
use std::path::Path;

/// Key-value tags of an element, ordered for deterministic output.
pub type Tags = BTreeMap<String, String>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub enum ElementKind {
    Node,
    Way,
    Relation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OsmNode {
    pub id: i64,
    pub lat: f64,
    pub lon: f64,
    pub tags: Tags,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OsmWay {
    pub id: i64,
    pub refs: Vec<i64>,
    pub tags: Tags,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelMember {
    pub kind: ElementKind,
    pub id: i64,
    pub role: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OsmRelation {
    pub id: i64,
    pub members: Vec<RelMember>,
    pub tags: Tags,
}

/// One parsed element, as streamed by [`parse_osm`].
#[derive(Debug, Clone, PartialEq)]
pub enum OsmElement {
    Node(OsmNode),
    Way(OsmWay),
    Relation(OsmRelation),
}

/// Parse problems that do not abort ingestion.
#[derive(Debug, Clone, Default, serde::Serialize, serde::Deserialize)]
pub struct OsmDiagnostics {
    /// Ways dropped because a referenced node is absent from the extract.
    pub ways_missing_nodes: u64,
    /// Ways dropped for having fewer than two node references.
    pub ways_too_short: u64,
}

/// A fully loaded extract with the way/node reference check applied.
#[derive(Debug, Clone, Default)]
pub struct OsmExtract {
    pub nodes: Vec<OsmNode>,
    pub ways: Vec<OsmWay>,
    pub relations: Vec<OsmRelation>,
    node_index: HashMap<i64, usize>,
    pub diagnostics: OsmDiagnostics,
}

impl OsmExtract {
    /// Loads and indexes an extract, dropping ways that fail referential
    /// integrity (missing node, under two references) and counting them.
    pub fn load(path: &Path) -> Result<OsmExtract> {
        let mut extract = OsmExtract::default();
        parse_osm(path, |el| match el {
            OsmElement::Node(n) => extract.nodes.push(n),
            OsmElement::Way(w) => extract.ways.push(w),
            OsmElement::Relation(r) => extract.relations.push(r),
        })?;
        extract.reindex();
        Ok(extract)
    }

    /// Builds the node index and applies the way reference check; used by
    /// `load` and by callers that assemble an extract programmatically.
    pub fn reindex(&mut self) {
        self.node_index = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id, i))
            .collect();
        let idx = &self.node_index;
        let diag = &mut self.diagnostics;
        self.ways.retain(|w| {
            if w.refs.len() < 2 {
                diag.ways_too_short += 1;
                return false;
            }
            if w.refs.iter().any(|r| !idx.contains_key(r)) {
                diag.ways_missing_nodes += 1;
                return false;
            }
            true
        });
    }

    pub fn node(&self, id: i64) -> Option<&OsmNode> {
        self.node_index.get(&id).map(|&i| &self.nodes[i])
    }

    /// Geographic coordinates (lat, lon) for a node id.
    pub fn coord(&self, id: i64) -> Option<(f64, f64)> {
        self.node(id).map(|n| (n.lat, n.lon))
    }
}

/// Streams all elements of an `.osm` XML or `.osm.pbf` file. The format is
/// sniffed from the leading bytes, falling back to the file extension.
pub fn parse_osm(path: &Path, callback: impl FnMut(OsmElement)) -> Result<()> {
    match sniff_format(path)? {
        OsmFormat::Xml => xml::parse_xml(path, callback),
        OsmFormat::Pbf => pbf::parse_pbf(path, callback),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OsmFormat {
    Xml,
    Pbf,
}

fn sniff_format(path: &Path) -> Result<OsmFormat> {
    let mut file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut head = [0u8; 16];
    let n = file.read(&mut head).map_err(|e| Error::io(path, e))?;
    for &b in &head[..n] {
        if b.is_ascii_whitespace() || b == 0xEF || b == 0xBB || b == 0xBF {
            continue;
        }
        return Ok(if b == b'<' { OsmFormat::Xml } else { OsmFormat::Pbf });
    }
    // empty or inconclusive: fall back to extension
    if path.extension().and_then(|e| e.to_str()) == Some("pbf") {
        Ok(OsmFormat::Pbf)
    } else {
        Ok(OsmFormat::Xml)
    }
}

/// True when the tag map satisfies any of the key-value pairs; a `*` value
/// matches any value for the key.
pub fn tags_match(tags: &Tags, pairs: &[(String, String)]) -> bool {
    pairs.iter().any(|(k, v)| match tags.get(k) {
        Some(tv) => v == "*" || tv == v,
        None => false,
    })
}
