//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced by any stage of the indicator workflow.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("latitude {0} outside supported band (|lat| <= 84 deg)")]
    LatitudeBand(f64),

    #[error("malformed OSM data in {path}: {detail}")]
    OsmParse { path: PathBuf, detail: String },

    #[error("no pedestrian network in region {0}")]
    EmptyNetwork(String),

    #[error("malformed raster {path}: {detail}")]
    RasterParse { path: PathBuf, detail: String },

    #[error("malformed GTFS feed {path}: {detail}")]
    GtfsParse { path: PathBuf, detail: String },

    #[error("unknown stop id {0}")]
    UnknownStop(String),

    #[error("unknown source node {0}")]
    UnknownSource(i64),

    #[error("missing hex id {0}")]
    MissingHex(u64),

    #[error("z-scores require at least 2 values, got {0}")]
    TooFewValues(usize),

    #[error("non-binary daily-living input {0}")]
    NonBinaryScore(f64),

    #[error("total population weight is zero for region {0}")]
    ZeroWeight(String),

    #[error("empty destination set")]
    EmptyDestinations,

    #[error("empty official layer")]
    EmptyOfficialLayer,

    #[error("output property name collision: {0}")]
    PropertyCollision(String),

    #[error("missing upstream stage output: {0}")]
    MissingStageInput(String),

    #[error("region {region}, stage {stage}: {source}")]
    Stage {
        region: String,
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed GeoJSON in {path}: {detail}")]
    GeoJson { path: PathBuf, detail: String },

    #[error("{0}")]
    Other(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Wraps an error with the region and stage it occurred in.
    pub fn in_stage(self, region: &str, stage: &'static str) -> Self {
        Error::Stage {
            region: region.to_string(),
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
