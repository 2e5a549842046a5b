//! Pedestrian accessibility indicators from open data.
//!
//! This crate derives walkability and destination-access indicators for
//! urban study regions using OpenStreetMap extracts, population rasters,
//! and GTFS feeds. Results are produced at three scales: disaggregate
//! sample points generated along the pedestrian street network, a regular
//! hexagonal grid, and whole-of-city summaries, with between-city
//! standardization for comparative work.
//!
//! The typical entry point is [`pipeline::run_pipeline`], driven by a
//! [`config::ProjectConfig`]. Individual building blocks (projection,
//! routing, scoring, aggregation, validation) are usable on their own.

pub mod config;
pub mod error;
pub mod geometry;
pub mod gtfs;
pub mod indicators;
pub mod io;
pub mod network;
pub mod osm;
pub mod pipeline;
pub mod raster;
pub mod synth;
pub mod validation;

pub use error::Error;
pub use geometry::hex::{HexCell, HexGrid};
pub use geometry::{Polygon, ProjectedPoint, Rect};

/// Crate version recorded in run manifests.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
