//! `.osm` XML reader.

use super::{ElementKind, OsmElement, OsmNode, OsmRelation, OsmWay, RelMember, Tags};
use crate::error::{Error, Result};
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use std::path::Path;

fn malformed(path: &Path, detail: impl Into<String>) -> Error {
    Error::OsmParse {
        path: path.to_path_buf(),
        detail: detail.into(),
    }
}

struct PendingWay {
    id: i64,
    refs: Vec<i64>,
    tags: Tags,
}

struct PendingRelation {
    id: i64,
    members: Vec<RelMember>,
    tags: Tags,
}

enum Pending {
    None,
    Node(OsmNode),
    Way(PendingWay),
    Relation(PendingRelation),
}

pub fn parse_xml(path: &Path, mut callback: impl FnMut(OsmElement)) -> Result<()> {
    let mut reader =
        Reader::from_file(path).map_err(|e| malformed(path, format!("open failed: {e}")))?;
    reader.config_mut().trim_text(true);

    let mut buf = Vec::new();
    let mut pending = Pending::None;

    loop {
        let event = reader
            .read_event_into(&mut buf)
            .map_err(|e| malformed(path, format!("xml error at byte {}: {e}", reader.buffer_position())))?;
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let is_empty = matches!(event, Event::Empty(_));
                match e.name().as_ref() {
                    b"node" => {
                        let id = attr_i64(path, e, b"id")?;
                        let lat = attr_f64(path, e, b"lat")?;
                        let lon = attr_f64(path, e, b"lon")?;
                        let node = OsmNode {
                            id,
                            lat,
                            lon,
                            tags: Tags::new(),
                        };
                        if is_empty {
                            callback(OsmElement::Node(node));
                        } else {
                            pending = Pending::Node(node);
                        }
                    }
                    b"way" => {
                        let way = PendingWay {
                            id: attr_i64(path, e, b"id")?,
                            refs: Vec::new(),
                            tags: Tags::new(),
                        };
                        if is_empty {
                            callback(OsmElement::Way(OsmWay {
                                id: way.id,
                                refs: way.refs,
                                tags: way.tags,
                            }));
                        } else {
                            pending = Pending::Way(way);
                        }
                    }
                    b"relation" => {
                        let rel = PendingRelation {
                            id: attr_i64(path, e, b"id")?,
                            members: Vec::new(),
                            tags: Tags::new(),
                        };
                        if is_empty {
                            callback(OsmElement::Relation(OsmRelation {
                                id: rel.id,
                                members: rel.members,
                                tags: rel.tags,
                            }));
                        } else {
                            pending = Pending::Relation(rel);
                        }
                    }
                    b"tag" => {
                        let k = attr_string(path, e, b"k")?;
                        let v = attr_string(path, e, b"v")?;
                        match &mut pending {
                            Pending::Node(n) => {
                                n.tags.insert(k, v);
                            }
                            Pending::Way(w) => {
                                w.tags.insert(k, v);
                            }
                            Pending::Relation(r) => {
                                r.tags.insert(k, v);
                            }
                            Pending::None => {}
                        }
                    }
                    b"nd" => {
                        if let Pending::Way(w) = &mut pending {
                            w.refs.push(attr_i64(path, e, b"ref")?);
                        }
                    }
                    b"member" => {
                        if let Pending::Relation(r) = &mut pending {
                            let kind = match attr_string(path, e, b"type")?.as_str() {
                                "node" => ElementKind::Node,
                                "way" => ElementKind::Way,
                                "relation" => ElementKind::Relation,
                                other => {
                                    return Err(malformed(
                                        path,
                                        format!("unknown member type {other}"),
                                    ))
                                }
                            };
                            r.members.push(RelMember {
                                kind,
                                id: attr_i64(path, e, b"ref")?,
                                role: attr_string(path, e, b"role").unwrap_or_default(),
                            });
                        }
                    }
                    _ => {}
                }
            }
            Event::End(ref e) => match e.name().as_ref() {
                b"node" | b"way" | b"relation" => {
                    match std::mem::replace(&mut pending, Pending::None) {
                        Pending::Node(n) => callback(OsmElement::Node(n)),
                        Pending::Way(w) => callback(OsmElement::Way(OsmWay {
                            id: w.id,
                            refs: w.refs,
                            tags: w.tags,
                        })),
                        Pending::Relation(r) => callback(OsmElement::Relation(OsmRelation {
                            id: r.id,
                            members: r.members,
                            tags: r.tags,
                        })),
                        Pending::None => {}
                    }
                }
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }
    Ok(())
}

fn attr_raw(path: &Path, e: &BytesStart, name: &[u8]) -> Result<Option<String>> {
    for attr in e.attributes() {
        let attr = attr.map_err(|err| malformed(path, format!("bad attribute: {err}")))?;
        if attr.key.as_ref() == name {
            let v = attr
                .unescape_value()
                .map_err(|err| malformed(path, format!("bad attribute value: {err}")))?;
            return Ok(Some(v.into_owned()));
        }
    }
    Ok(None)
}

fn attr_string(path: &Path, e: &BytesStart, name: &[u8]) -> Result<String> {
    attr_raw(path, e, name)?.ok_or_else(|| {
        malformed(
            path,
            format!("missing attribute {}", String::from_utf8_lossy(name)),
        )
    })
}

fn attr_i64(path: &Path, e: &BytesStart, name: &[u8]) -> Result<i64> {
    let s = attr_string(path, e, name)?;
    s.parse()
        .map_err(|_| malformed(path, format!("invalid integer {s:?}")))
}

fn attr_f64(path: &Path, e: &BytesStart, name: &[u8]) -> Result<f64> {
    let s = attr_string(path, e, name)?;
    s.parse()
        .map_err(|_| malformed(path, format!("invalid number {s:?}")))
}
