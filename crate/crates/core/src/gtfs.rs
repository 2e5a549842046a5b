//! GTFS feed ingestion: stops, trips, stop_times, calendar.
//!
//! Feeds load from an uncompressed directory or a zip archive. Stop times
//! may exceed 24:00:00 (next-day service); they parse to seconds >= 86400
//! and are attributed to the service day. Rows violating referential
//! integrity are dropped and counted.

use crate::error::{Error, Result};
use crate::geometry::tmerc::TransverseMercator;
use crate::geometry::{in_buffered_multi, Polygon, ProjectedPoint};
use crate::osm::poi::{Poi, PoiSet};
use crate::osm::{ElementKind, Tags};
use std::collections::{BTreeMap, HashMap};
use std::io::Read;
use std::path::Path;

#[derive(Debug, Clone)]
pub struct GtfsStop {
    pub id: String,
    pub name: String,
    pub lat: f64,
    pub lon: f64,
}

#[derive(Debug, Clone)]
pub struct GtfsTrip {
    pub id: String,
    pub route: String,
    pub service: String,
}

#[derive(Debug, Clone)]
pub struct StopTime {
    pub trip: String,
    pub stop: String,
    pub departure_s: u32,
}

/// Service calendar row: weekday availability plus a date range
/// (YYYYMMDD integers).
#[derive(Debug, Clone)]
pub struct CalendarEntry {
    pub service: String,
    pub weekdays: [bool; 7],
    pub start_date: u32,
    pub end_date: u32,
}

#[derive(Debug, Clone, Default, serde::Serialize, serde::Deserialize)]
pub struct GtfsDiagnostics {
    pub stops_bad_coordinates: u64,
    pub stop_times_missing_refs: u64,
    pub stop_times_out_of_order: u64,
    pub merged_with_osm: u64,
}

#[derive(Debug, Clone, Default)]
pub struct GtfsFeed {
    pub stops: Vec<GtfsStop>,
    pub trips: HashMap<String, GtfsTrip>,
    pub stop_times: Vec<StopTime>,
    pub calendar: HashMap<String, CalendarEntry>,
    stop_index: HashMap<String, usize>,
    pub diagnostics: GtfsDiagnostics,
}

impl GtfsFeed {
    pub fn stop(&self, id: &str) -> Option<&GtfsStop> {
        self.stop_index.get(id).map(|&i| &self.stops[i])
    }
}

/// Parses "HH:MM:SS" allowing hours >= 24 and single-digit hours.
pub fn parse_gtfs_time(s: &str) -> Option<u32> {
    let mut parts = s.trim().split(':');
    let h: u32 = parts.next()?.trim().parse().ok()?;
    let m: u32 = parts.next()?.trim().parse().ok()?;
    let sec: u32 = parts.next()?.trim().parse().ok()?;
    if parts.next().is_some() || m >= 60 || sec >= 60 {
        return None;
    }
    Some(h * 3600 + m * 60 + sec)
}

enum FeedSource {
    Dir(std::path::PathBuf),
    Zip(Box<zip::ZipArchive<std::fs::File>>),
}

impl FeedSource {
    fn open(path: &Path) -> Result<FeedSource> {
        if path.is_dir() {
            return Ok(FeedSource::Dir(path.to_path_buf()));
        }
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let archive = zip::ZipArchive::new(file).map_err(|e| Error::GtfsParse {
            path: path.to_path_buf(),
            detail: format!("not a directory or readable zip: {e}"),
        })?;
        Ok(FeedSource::Zip(Box::new(archive)))
    }

    fn read(&mut self, name: &str) -> Result<Option<String>> {
        match self {
            FeedSource::Dir(dir) => {
                let p = dir.join(name);
                if !p.exists() {
                    return Ok(None);
                }
                std::fs::read_to_string(&p).map(Some).map_err(|e| Error::io(&p, e))
            }
            FeedSource::Zip(archive) => {
                let names: Vec<String> = archive.file_names().map(String::from).collect();
                // accept entries nested one directory deep (common packaging)
                let Some(entry) = names
                    .iter()
                    .find(|n| n.as_str() == name || n.ends_with(&format!("/{name}")))
                else {
                    return Ok(None);
                };
                let mut file = archive.by_name(entry).map_err(|e| Error::GtfsParse {
                    path: entry.into(),
                    detail: e.to_string(),
                })?;
                let mut text = String::new();
                file.read_to_string(&mut text).map_err(|e| Error::GtfsParse {
                    path: entry.into(),
                    detail: e.to_string(),
                })?;
                Ok(Some(text))
            }
        }
    }
}

/// Loads a GTFS feed from a directory or zip of the four core files.
pub fn read_gtfs(path: &Path) -> Result<GtfsFeed> {
    let mut source = FeedSource::open(path)?;
    let required = |name: &str, content: Option<String>| {
        content.ok_or_else(|| Error::GtfsParse {
            path: path.to_path_buf(),
            detail: format!("missing required file {name}"),
        })
    };
    let stops_txt = required("stops.txt", source.read("stops.txt")?)?;
    let trips_txt = required("trips.txt", source.read("trips.txt")?)?;
    let stop_times_txt = required("stop_times.txt", source.read("stop_times.txt")?)?;
    let calendar_txt = required("calendar.txt", source.read("calendar.txt")?)?;

    let mut feed = GtfsFeed::default();

    for record in csv_records(path, &stops_txt)? {
        let id = record_get(&record, "stop_id");
        let (Some(id), Some(lat), Some(lon)) = (
            id,
            record_get(&record, "stop_lat").and_then(|v| v.parse::<f64>().ok()),
            record_get(&record, "stop_lon").and_then(|v| v.parse::<f64>().ok()),
        ) else {
            feed.diagnostics.stops_bad_coordinates += 1;
            continue;
        };
        feed.stops.push(GtfsStop {
            id,
            name: record_get(&record, "stop_name").unwrap_or_default(),
            lat,
            lon,
        });
    }
    feed.stop_index = feed
        .stops
        .iter()
        .enumerate()
        .map(|(i, s)| (s.id.clone(), i))
        .collect();

    for record in csv_records(path, &trips_txt)? {
        let (Some(id), Some(route), Some(service)) = (
            record_get(&record, "trip_id"),
            record_get(&record, "route_id"),
            record_get(&record, "service_id"),
        ) else {
            continue;
        };
        feed.trips.insert(
            id.clone(),
            GtfsTrip { id, route, service },
        );
    }

    for record in csv_records(path, &calendar_txt)? {
        let Some(service) = record_get(&record, "service_id") else {
            continue;
        };
        let day = |name: &str| record_get(&record, name).as_deref() == Some("1");
        let date = |name: &str| {
            record_get(&record, name)
                .and_then(|v| v.parse::<u32>().ok())
                .unwrap_or(0)
        };
        feed.calendar.insert(
            service.clone(),
            CalendarEntry {
                service,
                weekdays: [
                    day("monday"),
                    day("tuesday"),
                    day("wednesday"),
                    day("thursday"),
                    day("friday"),
                    day("saturday"),
                    day("sunday"),
                ],
                start_date: date("start_date"),
                end_date: date("end_date"),
            },
        );
    }

    let mut last_dep: HashMap<String, u32> = HashMap::new();
    for record in csv_records(path, &stop_times_txt)? {
        let (Some(trip), Some(stop), Some(dep)) = (
            record_get(&record, "trip_id"),
            record_get(&record, "stop_id"),
            record_get(&record, "departure_time").and_then(|v| parse_gtfs_time(&v)),
        ) else {
            feed.diagnostics.stop_times_missing_refs += 1;
            continue;
        };
        if !feed.trips.contains_key(&trip) || !feed.stop_index.contains_key(&stop) {
            feed.diagnostics.stop_times_missing_refs += 1;
            continue;
        }
        if let Some(&prev) = last_dep.get(&trip) {
            if dep < prev {
                feed.diagnostics.stop_times_out_of_order += 1;
                continue;
            }
        }
        last_dep.insert(trip.clone(), dep);
        feed.stop_times.push(StopTime {
            trip,
            stop,
            departure_s: dep,
        });
    }

    Ok(feed)
}

fn csv_records(path: &Path, text: &str) -> Result<Vec<BTreeMap<String, String>>> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::GtfsParse {
            path: path.to_path_buf(),
            detail: format!("header row: {e}"),
        })?
        .iter()
        .map(|h| h.trim_start_matches('\u{feff}').to_string())
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::GtfsParse {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })?;
        let mut map = BTreeMap::new();
        for (h, v) in headers.iter().zip(record.iter()) {
            map.insert(h.clone(), v.to_string());
        }
        rows.push(map);
    }
    Ok(rows)
}

fn record_get(record: &BTreeMap<String, String>, key: &str) -> Option<String> {
    record.get(key).filter(|v| !v.is_empty()).cloned()
}

/// Stops inside the buffered region as `pt_any` destinations, merged with
/// OSM-derived public transport points and deduplicated within 10 m.
pub fn gtfs_stops_as_pois(
    feed: &GtfsFeed,
    projection: &TransverseMercator,
    region: &[Polygon],
    buffer_m: f64,
    osm_pt: &PoiSet,
    diagnostics: &mut GtfsDiagnostics,
) -> Result<PoiSet> {
    const MERGE_RADIUS_M: f64 = 10.0;
    let mut merged = PoiSet {
        class: osm_pt.class.clone(),
        points: osm_pt.points.clone(),
    };
    // bucket accumulated locations for the 10 m dedup
    let cell = 50.0f64;
    let key = |p: ProjectedPoint| ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64);
    let mut buckets: HashMap<(i64, i64), Vec<ProjectedPoint>> = HashMap::new();
    for p in &merged.points {
        buckets.entry(key(p.location)).or_default().push(p.location);
    }

    let mut stops: Vec<&GtfsStop> = feed.stops.iter().collect();
    stops.sort_by(|a, b| a.id.cmp(&b.id));
    let mut next_id: i64 = -1;
    for stop in stops {
        if !stop.lat.is_finite() || !stop.lon.is_finite() || stop.lat.abs() > 90.0 {
            diagnostics.stops_bad_coordinates += 1;
            continue;
        }
        let p = projection.forward(stop.lat, stop.lon)?;
        if !in_buffered_multi(p, region, buffer_m) {
            continue;
        }
        let (kx, ky) = key(p);
        let mut duplicate = false;
        'scan: for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(pts) = buckets.get(&(kx + dx, ky + dy)) {
                    if pts.iter().any(|q| q.dist(p) <= MERGE_RADIUS_M) {
                        duplicate = true;
                        break 'scan;
                    }
                }
            }
        }
        if duplicate {
            diagnostics.merged_with_osm += 1;
            continue;
        }
        buckets.entry((kx, ky)).or_default().push(p);
        let mut tags = Tags::new();
        tags.insert("gtfs_stop_id".into(), stop.id.clone());
        if !stop.name.is_empty() {
            tags.insert("name".into(), stop.name.clone());
        }
        merged.points.push(Poi {
            source_id: next_id,
            kind: ElementKind::Node,
            location: p,
            tags,
        });
        next_id -= 1;
    }
    Ok(merged)
}

/// Days since an epoch for a YYYYMMDD date (civil calendar), used for
/// weekday arithmetic.
fn day_number(yyyymmdd: u32) -> i64 {
    let y = (yyyymmdd / 10000) as i64;
    let m = ((yyyymmdd / 100) % 100) as i64;
    let d = (yyyymmdd % 100) as i64;
    let y = if m <= 2 { y - 1 } else { y };
    let era = if y >= 0 { y } else { y - 399 } / 400;
    let yoe = y - era * 400;
    let mp = (m + 9) % 12;
    let doy = (153 * mp + 2) / 5 + d - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146097 + doe
}

/// Weekday (0 = Monday .. 6 = Sunday) of a YYYYMMDD date.
fn weekday(yyyymmdd: u32) -> usize {
    // day_number(1970-01-01) = 719468, a Thursday; +2 aligns Monday to 0
    (day_number(yyyymmdd) + 2).rem_euclid(7) as usize
}

/// Average headway (minutes) at a stop on the most-served weekday in
/// `day_window`, using departures within `time_window` (seconds of day).
/// `None` when fewer than two departures exist.
pub fn stop_average_headway(
    feed: &GtfsFeed,
    stop_id: &str,
    day_window: (u32, u32),
    time_window: (u32, u32),
) -> Result<Option<f64>> {
    if feed.stop(stop_id).is_none() {
        return Err(Error::UnknownStop(stop_id.to_string()));
    }
    // services active on each weekday within the window
    let mut active: [std::collections::HashSet<&str>; 7] = Default::default();
    for entry in feed.calendar.values() {
        let lo = entry.start_date.max(day_window.0);
        let hi = entry.end_date.min(day_window.1);
        if lo > hi {
            continue;
        }
        let span = day_number(hi) - day_number(lo);
        for w in 0..7 {
            if !entry.weekdays[w] {
                continue;
            }
            let occurs = span >= 6
                || (0..=span).any(|k| (weekday(lo) + k as usize) % 7 == w);
            if occurs {
                active[w].insert(entry.service.as_str());
            }
        }
    }

    let mut per_day: [Vec<u32>; 7] = Default::default();
    for st in &feed.stop_times {
        if st.stop != stop_id {
            continue;
        }
        if st.departure_s < time_window.0 || st.departure_s > time_window.1 {
            continue;
        }
        let Some(trip) = feed.trips.get(&st.trip) else {
            continue;
        };
        for w in 0..7 {
            if active[w].contains(trip.service.as_str()) {
                per_day[w].push(st.departure_s);
            }
        }
    }

    let best = (0..7).max_by_key(|&w| (per_day[w].len(), 7 - w)).unwrap();
    let departures = &mut per_day[best];
    if departures.len() < 2 {
        return Ok(None);
    }
    departures.sort_unstable();
    let gaps: f64 = departures
        .windows(2)
        .map(|w| (w[1] - w[0]) as f64)
        .sum::<f64>()
        / (departures.len() - 1) as f64;
    Ok(Some(gaps / 60.0))
}
