//! ESRI ASCII grid population rasters and the hex / region population
//! estimators.
//!
//! "Intersecting raster cells" is operationalized as cell-center
//! containment; hexagons smaller than a raster cell fall back to cells
//! whose footprint intersects the hexagon. NODATA cells contribute zero
//! population and are counted in diagnostics.

use crate::error::{Error, Result};
use crate::geometry::hex::HexCell;
use crate::geometry::tmerc::TransverseMercator;
use crate::geometry::{Polygon, ProjectedPoint, Rect};
use std::path::Path;

/// Coordinate frame of the raster grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum RasterFrame {
    /// Grid coordinates are meters in the region's projected frame.
    Projected,
    /// Grid coordinates are WGS84 degrees (lon = x, lat = y).
    Geographic,
}

#[derive(Debug, Clone)]
pub struct PopulationRaster {
    pub ncols: usize,
    pub nrows: usize,
    pub xllcorner: f64,
    pub yllcorner: f64,
    pub cellsize: f64,
    pub nodata: f64,
    pub frame: RasterFrame,
    /// Row-major values, first row northernmost (file order).
    values: Vec<f64>,
    pub nodata_cells: u64,
}

impl PopulationRaster {
    /// Raw value at (col, row-from-top); NODATA reads as 0.
    pub fn value_at(&self, col: usize, row: usize) -> f64 {
        let v = self.values[row * self.ncols + col];
        if v == self.nodata || v.is_nan() {
            0.0
        } else {
            v
        }
    }

    /// Grid-frame center of a cell.
    pub fn cell_center(&self, col: usize, row: usize) -> (f64, f64) {
        (
            self.xllcorner + (col as f64 + 0.5) * self.cellsize,
            self.yllcorner + ((self.nrows - row) as f64 - 0.5) * self.cellsize,
        )
    }

    /// Center of a cell in the projected frame.
    pub fn cell_center_projected(
        &self,
        col: usize,
        row: usize,
        tm: &TransverseMercator,
    ) -> Result<ProjectedPoint> {
        let (x, y) = self.cell_center(col, row);
        match self.frame {
            RasterFrame::Projected => Ok(ProjectedPoint::new(x, y)),
            RasterFrame::Geographic => tm.forward(y, x),
        }
    }

    /// Sum of non-NODATA values over the whole grid.
    pub fn total(&self) -> f64 {
        (0..self.nrows)
            .flat_map(|r| (0..self.ncols).map(move |c| (c, r)))
            .map(|(c, r)| self.value_at(c, r))
            .sum()
    }

    /// (col, row) ranges of cells whose centers could fall inside a
    /// projected bbox, with one cell of margin.
    fn candidate_range(
        &self,
        bbox: &Rect,
        tm: &TransverseMercator,
    ) -> (usize, usize, usize, usize) {
        let (min_x, min_y, max_x, max_y) = match self.frame {
            RasterFrame::Projected => (bbox.min_x, bbox.min_y, bbox.max_x, bbox.max_y),
            RasterFrame::Geographic => {
                // invert the bbox corners; pad for projection curvature
                let corners = [
                    ProjectedPoint::new(bbox.min_x, bbox.min_y),
                    ProjectedPoint::new(bbox.max_x, bbox.min_y),
                    ProjectedPoint::new(bbox.max_x, bbox.max_y),
                    ProjectedPoint::new(bbox.min_x, bbox.max_y),
                ];
                let mut lon = (f64::INFINITY, f64::NEG_INFINITY);
                let mut lat = (f64::INFINITY, f64::NEG_INFINITY);
                for c in corners {
                    let (la, lo) = tm.inverse(c);
                    lon = (lon.0.min(lo), lon.1.max(lo));
                    lat = (lat.0.min(la), lat.1.max(la));
                }
                let pad = self.cellsize;
                (lon.0 - pad, lat.0 - pad, lon.1 + pad, lat.1 + pad)
            }
        };
        let col0 = ((min_x - self.xllcorner) / self.cellsize - 1.0).floor().max(0.0) as usize;
        let col1 = (((max_x - self.xllcorner) / self.cellsize) + 1.0).ceil() as usize;
        let row_from_bottom0 =
            ((min_y - self.yllcorner) / self.cellsize - 1.0).floor().max(0.0) as usize;
        let row_from_bottom1 = (((max_y - self.yllcorner) / self.cellsize) + 1.0).ceil() as usize;
        let col1 = col1.min(self.ncols);
        let row0 = self
            .nrows
            .saturating_sub(row_from_bottom1.min(self.nrows));
        let row1 = self.nrows.saturating_sub(row_from_bottom0.min(self.nrows));
        (col0, col1, row0, row1)
    }

    /// Visits `(center, value, is_nodata)` for each candidate cell near a
    /// projected bbox.
    fn for_cells_near(
        &self,
        bbox: &Rect,
        tm: &TransverseMercator,
        mut f: impl FnMut(ProjectedPoint, f64, bool),
    ) -> Result<()> {
        let (col0, col1, row0, row1) = self.candidate_range(bbox, tm);
        for row in row0..row1 {
            for col in col0..col1 {
                let center = self.cell_center_projected(col, row, tm)?;
                let raw = self.values[row * self.ncols + col];
                let nodata = raw == self.nodata || raw.is_nan();
                f(center, if nodata { 0.0 } else { raw }, nodata);
            }
        }
        Ok(())
    }
}

/// Reads an ESRI ASCII grid (`.asc`).
pub fn read_raster(path: &Path) -> Result<PopulationRaster> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_raster(&text, path)
}

fn parse_raster(text: &str, path: &Path) -> Result<PopulationRaster> {
    let malformed = |detail: &str| Error::RasterParse {
        path: path.to_path_buf(),
        detail: detail.to_string(),
    };
    let mut ncols = None;
    let mut nrows = None;
    let mut xll = None;
    let mut yll = None;
    let mut cellsize = None;
    let mut nodata = -9999.0f64;

    let mut lines = text.lines().peekable();
    while let Some(line) = lines.peek() {
        let mut parts = line.split_whitespace();
        let Some(key) = parts.next() else {
            lines.next();
            continue;
        };
        let key_lc = key.to_ascii_lowercase();
        let is_header = matches!(
            key_lc.as_str(),
            "ncols" | "nrows" | "xllcorner" | "yllcorner" | "cellsize" | "nodata_value"
        );
        if !is_header {
            break;
        }
        let value: f64 = parts
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| malformed(&format!("unreadable header value for {key}")))?;
        match key_lc.as_str() {
            "ncols" => ncols = Some(value as usize),
            "nrows" => nrows = Some(value as usize),
            "xllcorner" => xll = Some(value),
            "yllcorner" => yll = Some(value),
            "cellsize" => cellsize = Some(value),
            "nodata_value" => nodata = value,
            _ => unreachable!(),
        }
        lines.next();
    }

    let ncols = ncols.ok_or_else(|| malformed("header missing ncols"))?;
    let nrows = nrows.ok_or_else(|| malformed("header missing nrows"))?;
    let xllcorner = xll.ok_or_else(|| malformed("header missing xllcorner"))?;
    let yllcorner = yll.ok_or_else(|| malformed("header missing yllcorner"))?;
    let cellsize = cellsize.ok_or_else(|| malformed("header missing cellsize"))?;
    if ncols == 0 || nrows == 0 || cellsize <= 0.0 {
        return Err(malformed("dimensions and cellsize must be positive"));
    }

    let mut values = Vec::with_capacity(ncols * nrows);
    let mut nodata_cells = 0u64;
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|tok| tok.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| malformed(&format!("non-numeric value in data row {i}")))?;
        if row.len() != ncols {
            return Err(malformed(&format!(
                "row {i} has {} values, expected {ncols}",
                row.len()
            )));
        }
        for v in &row {
            if *v == nodata || v.is_nan() {
                nodata_cells += 1;
            } else if *v < 0.0 {
                return Err(malformed("negative population value"));
            }
        }
        values.extend(row);
    }
    if values.len() != ncols * nrows {
        return Err(malformed(&format!(
            "expected {} values, found {}",
            ncols * nrows,
            values.len()
        )));
    }

    // heuristic frame detection; callers may override
    let frame = if cellsize <= 0.5
        && (-360.0..=360.0).contains(&xllcorner)
        && (-90.0..=90.0).contains(&yllcorner)
    {
        RasterFrame::Geographic
    } else {
        RasterFrame::Projected
    };

    Ok(PopulationRaster {
        ncols,
        nrows,
        xllcorner,
        yllcorner,
        cellsize,
        nodata,
        frame,
        values,
        nodata_cells,
    })
}

/// Population estimate for one hex cell: the mean of raster cells whose
/// centers fall inside the hexagon, falling back to cells whose footprint
/// intersects it, else 0.
pub fn hex_population(
    raster: &PopulationRaster,
    tm: &TransverseMercator,
    cell: &HexCell,
) -> Result<f64> {
    let bbox = cell.bbox().expand(raster.cellsize * 2.0);
    let mut inside = (0.0f64, 0u32);
    raster.for_cells_near(&bbox, tm, |center, value, _| {
        if cell.contains(center) {
            inside.0 += value;
            inside.1 += 1;
        }
    })?;
    if inside.1 > 0 {
        return Ok(inside.0 / inside.1 as f64);
    }
    // fallback: cells intersecting the hexagon footprint
    let half = raster.cellsize / 2.0;
    let mut touching = (0.0f64, 0u32);
    raster.for_cells_near(&bbox, tm, |center, value, _| {
        let rect = Rect::new(
            center.x - half,
            center.y - half,
            center.x + half,
            center.y + half,
        );
        if cell.intersects_rect(&rect) {
            touching.0 += value;
            touching.1 += 1;
        }
    })?;
    if touching.1 > 0 {
        Ok(touching.0 / touching.1 as f64)
    } else {
        Ok(0.0)
    }
}

/// Population estimate for the (unbuffered) study region: the sum of
/// raster cells whose centers fall inside any region polygon.
pub fn region_population(
    raster: &PopulationRaster,
    tm: &TransverseMercator,
    region: &[Polygon],
) -> Result<f64> {
    let Some(bbox) = region
        .iter()
        .map(Polygon::bbox)
        .reduce(|a, b| a.union(&b))
    else {
        return Ok(0.0);
    };
    let bbox = bbox.expand(raster.cellsize * 2.0);
    let mut sum = 0.0;
    raster.for_cells_near(&bbox, tm, |center, value, _| {
        if region.iter().any(|poly| poly.contains(center)) {
            sum += value;
        }
    })?;
    Ok(sum)
}
