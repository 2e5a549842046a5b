//! Hex- and city-level aggregation of sample-point estimates, plus
//! between-city standardization.
//!
//! Column names follow the output indicator dictionaries, with the
//! configured access distance substituted into the
//! `pct_access_{d}m_{class}_{method}` pattern.

use super::score::{zscores, AccessMethod};
use super::SampleEstimate;
use crate::error::{Error, Result};
use crate::geometry::hex::HexGrid;
use std::collections::BTreeMap;

/// A typed cell value in an indicator table.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(untagged)]
pub enum Value {
    Text(String),
    Int(i64),
    Num(f64),
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Num(v) => Some(*v),
            Value::Int(v) => Some(*v as f64),
            Value::Text(_) => None,
        }
    }

    /// Deterministic text form used by both CSV and GeoJSON writers.
    pub fn render(&self) -> String {
        match self {
            Value::Text(s) => s.clone(),
            Value::Int(v) => v.to_string(),
            Value::Num(v) => format!("{v}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum FrameLevel {
    Hex,
    City,
}

/// A keyed indicator table; rows are hex cells or cities.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct IndicatorFrame {
    pub level: FrameLevel,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl IndicatorFrame {
    pub fn new(level: FrameLevel, columns: Vec<String>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for c in &columns {
            if !seen.insert(c.clone()) {
                return Err(Error::PropertyCollision(c.clone()));
            }
        }
        Ok(IndicatorFrame {
            level,
            columns,
            rows: Vec::new(),
        })
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn push_row(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn num(&self, row: usize, column: &str) -> Option<f64> {
        let idx = self.column_index(column)?;
        self.rows.get(row)?.get(idx)?.as_f64()
    }

    /// Appends a column, filling existing rows with the given values.
    pub fn append_column(&mut self, name: String, values: Vec<Value>) -> Result<()> {
        if self.column_index(&name).is_some() {
            return Err(Error::PropertyCollision(name));
        }
        debug_assert_eq!(values.len(), self.rows.len());
        self.columns.push(name);
        for (row, v) in self.rows.iter_mut().zip(values) {
            row.push(v);
        }
        Ok(())
    }
}

/// `pct_access_{d}m_{class}_{method}` with the distance rendered without a
/// trailing fraction when whole.
pub fn pct_access_column(distance_m: f64, class: &str, method: AccessMethod) -> String {
    format!(
        "pct_access_{}m_{class}_{}",
        render_distance(distance_m),
        method.name()
    )
}

pub fn pop_pct_access_column(distance_m: f64, class: &str, method: AccessMethod) -> String {
    format!("pop_{}", pct_access_column(distance_m, class, method))
}

fn render_distance(d: f64) -> String {
    if d.fract() == 0.0 {
        format!("{}", d as i64)
    } else {
        format!("{d}")
    }
}

pub const HEX_KEY: &str = "hex_id";
pub const STUDY_REGION: &str = "Study region";
pub const POP_PER_SQKM: &str = "Population per sqkm";
pub const INTERSECTIONS: &str = "Intersections";
pub const INTERSECTIONS_PER_SQKM: &str = "Intersections per sqkm";
pub const SAMPLE_POINT_COUNT: &str = "urban_sample_point_count";
pub const AREA_SQKM: &str = "Area (sqkm)";
pub const POPULATION_ESTIMATE: &str = "Population estimate";

pub const LOCAL_NH_POP_DENSITY: &str = "local_nh_population_density";
pub const LOCAL_NH_INT_DENSITY: &str = "local_nh_intersection_density";
pub const LOCAL_DAILY_LIVING: &str = "local_daily_living";
pub const LOCAL_WALKABILITY: &str = "local_walkability";

pub const ALL_Z_POP: &str = "all_cities_z_nh_population_density";
pub const ALL_Z_INT: &str = "all_cities_z_nh_intersection_density";
pub const ALL_Z_DL: &str = "all_cities_z_daily_living";
pub const ALL_WALKABILITY: &str = "all_cities_walkability";

pub const POP_NH_POP_DENSITY: &str = "pop_nh_pop_density";
pub const POP_NH_INT_DENSITY: &str = "pop_nh_intersection_density";
pub const POP_DAILY_LIVING: &str = "pop_daily_living";
pub const POP_WALKABILITY: &str = "pop_walkability";

pub const ALL_POP_Z_POP: &str = "all_cities_pop_z_nh_population_density";
pub const ALL_POP_Z_INT: &str = "all_cities_pop_z_nh_intersection_density";
pub const ALL_POP_Z_DL: &str = "all_cities_pop_z_daily_living";
pub const ALL_POP_WALKABILITY: &str = "all_cities_pop_walkability";

/// Hex aggregation output: the frame plus each row's hex population (the
/// weight used by city aggregation and between-city standardization).
pub struct HexAggregate {
    pub frame: IndicatorFrame,
    pub hex_population: Vec<f64>,
}

/// Averages sample-point estimates per hex cell. Hexes without sample
/// points are excluded.
pub fn aggregate_hex(
    estimates: &[SampleEstimate],
    grid: &HexGrid,
    region_name: &str,
    access_distance_m: f64,
    method: AccessMethod,
    classes: &[String],
) -> Result<HexAggregate> {
    let mut columns = vec![
        HEX_KEY.to_string(),
        STUDY_REGION.to_string(),
        POP_PER_SQKM.to_string(),
        INTERSECTIONS.to_string(),
        INTERSECTIONS_PER_SQKM.to_string(),
        SAMPLE_POINT_COUNT.to_string(),
    ];
    for class in classes {
        columns.push(pct_access_column(access_distance_m, class, method));
    }
    columns.extend(
        [
            LOCAL_NH_POP_DENSITY,
            LOCAL_NH_INT_DENSITY,
            LOCAL_DAILY_LIVING,
            LOCAL_WALKABILITY,
        ]
        .map(String::from),
    );
    let mut frame = IndicatorFrame::new(FrameLevel::Hex, columns)?;

    let mut by_hex: BTreeMap<u64, Vec<&SampleEstimate>> = BTreeMap::new();
    for e in estimates {
        by_hex.entry(e.point.hex).or_default().push(e);
    }

    let mut hex_population = Vec::with_capacity(by_hex.len());
    for (hex, members) in by_hex {
        let cell = grid.cell(hex).ok_or(Error::MissingHex(hex))?;
        let n = members.len() as f64;
        let mean = |f: &dyn Fn(&SampleEstimate) -> f64| -> f64 {
            members.iter().map(|e| f(e)).sum::<f64>() / n
        };
        let mut row = vec![
            Value::Int(hex as i64),
            Value::Text(region_name.to_string()),
            Value::Num(cell.pop_density),
            Value::Int(cell.intersection_count as i64),
            Value::Num(cell.intersection_density),
            Value::Int(members.len() as i64),
        ];
        for class in classes {
            let pct = 100.0 * mean(&|e| e.access_score.get(class).copied().unwrap_or(0.0));
            debug_assert!((0.0..=100.0 + 1e-9).contains(&pct));
            row.push(Value::Num(pct));
        }
        row.push(Value::Num(mean(&|e| e.nh_pop_density)));
        row.push(Value::Num(mean(&|e| e.nh_intersection_density)));
        row.push(Value::Num(mean(&|e| e.daily_living)));
        row.push(Value::Num(mean(&|e| e.walkability)));
        frame.push_row(row);
        hex_population.push(cell.population);
    }

    Ok(HexAggregate {
        frame,
        hex_population,
    })
}

/// Whole-of-city covariates assembled during ingest.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct RegionStats {
    pub name: String,
    pub area_km2: f64,
    pub population: f64,
    pub intersections: u64,
}

/// Population-weighted city summary over the hex frame. Hexes with zero
/// population contribute nothing; a zero total weight is an error.
pub fn aggregate_city(
    hex: &HexAggregate,
    stats: &RegionStats,
    access_distance_m: f64,
    method: AccessMethod,
    classes: &[String],
) -> Result<IndicatorFrame> {
    let mut columns = vec![
        STUDY_REGION.to_string(),
        AREA_SQKM.to_string(),
        POPULATION_ESTIMATE.to_string(),
        POP_PER_SQKM.to_string(),
        INTERSECTIONS.to_string(),
        INTERSECTIONS_PER_SQKM.to_string(),
        SAMPLE_POINT_COUNT.to_string(),
    ];
    for class in classes {
        columns.push(pop_pct_access_column(access_distance_m, class, method));
    }
    columns.extend(
        [
            POP_NH_POP_DENSITY,
            POP_NH_INT_DENSITY,
            POP_DAILY_LIVING,
            POP_WALKABILITY,
        ]
        .map(String::from),
    );
    let mut frame = IndicatorFrame::new(FrameLevel::City, columns)?;

    let total_weight: f64 = hex.hex_population.iter().sum();
    if total_weight <= 0.0 {
        return Err(Error::ZeroWeight(stats.name.clone()));
    }
    let weighted = |column: &str| -> f64 {
        let idx = hex.frame.column_index(column).expect("known column");
        let mut acc = 0.0;
        for (row, w) in hex.frame.rows.iter().zip(&hex.hex_population) {
            if *w > 0.0 {
                acc += row[idx].as_f64().unwrap_or(0.0) * w;
            }
        }
        acc / total_weight
    };

    let sample_count: i64 = hex
        .frame
        .rows
        .iter()
        .map(|r| {
            r[hex.frame.column_index(SAMPLE_POINT_COUNT).unwrap()]
                .as_f64()
                .unwrap_or(0.0) as i64
        })
        .sum();

    let mut row = vec![
        Value::Text(stats.name.clone()),
        Value::Num(stats.area_km2),
        Value::Num(stats.population),
        Value::Num(if stats.area_km2 > 0.0 {
            stats.population / stats.area_km2
        } else {
            0.0
        }),
        Value::Int(stats.intersections as i64),
        Value::Num(if stats.area_km2 > 0.0 {
            stats.intersections as f64 / stats.area_km2
        } else {
            0.0
        }),
        Value::Int(sample_count),
    ];
    for class in classes {
        row.push(Value::Num(weighted(&pct_access_column(
            access_distance_m,
            class,
            method,
        ))));
    }
    row.push(Value::Num(weighted(LOCAL_NH_POP_DENSITY)));
    row.push(Value::Num(weighted(LOCAL_NH_INT_DENSITY)));
    row.push(Value::Num(weighted(LOCAL_DAILY_LIVING)));
    row.push(Value::Num(weighted(LOCAL_WALKABILITY)));
    frame.push_row(row);
    Ok(frame)
}

#[derive(Debug, Clone, Default, serde::Serialize, serde::Deserialize)]
pub struct PoolDiagnostics {
    pub degenerate_columns: Vec<String>,
}

/// Pools every region's hexes, standardizes the three core indicators over
/// the pool, and appends the between-city columns to each hex frame and
/// each (single-row) city frame.
pub fn between_city_z(
    hexes: &mut [HexAggregate],
    cities: &mut [IndicatorFrame],
) -> Result<PoolDiagnostics> {
    assert_eq!(hexes.len(), cities.len());
    let mut diagnostics = PoolDiagnostics::default();

    let pool = |column: &str| -> Vec<f64> {
        hexes
            .iter()
            .flat_map(|h| {
                let idx = h.frame.column_index(column).expect("known column");
                h.frame.rows.iter().map(move |r| r[idx].as_f64().unwrap_or(0.0))
            })
            .collect()
    };
    let pooled_pop = pool(LOCAL_NH_POP_DENSITY);
    let pooled_int = pool(LOCAL_NH_INT_DENSITY);
    let pooled_dl = pool(LOCAL_DAILY_LIVING);

    let (z_pop, f1) = zscores(&pooled_pop)?;
    let (z_int, f2) = zscores(&pooled_int)?;
    let (z_dl, f3) = zscores(&pooled_dl)?;
    for (name, flag) in [
        (LOCAL_NH_POP_DENSITY, f1),
        (LOCAL_NH_INT_DENSITY, f2),
        (LOCAL_DAILY_LIVING, f3),
    ] {
        if flag {
            diagnostics.degenerate_columns.push(name.to_string());
        }
    }

    let mut offset = 0usize;
    for (hex, city) in hexes.iter_mut().zip(cities.iter_mut()) {
        let n = hex.frame.rows.len();
        let zp = &z_pop[offset..offset + n];
        let zi = &z_int[offset..offset + n];
        let zd = &z_dl[offset..offset + n];
        offset += n;

        let walk: Vec<f64> = (0..n).map(|i| zp[i] + zi[i] + zd[i]).collect();
        hex.frame
            .append_column(ALL_Z_POP.into(), zp.iter().map(|v| Value::Num(*v)).collect())?;
        hex.frame
            .append_column(ALL_Z_INT.into(), zi.iter().map(|v| Value::Num(*v)).collect())?;
        hex.frame
            .append_column(ALL_Z_DL.into(), zd.iter().map(|v| Value::Num(*v)).collect())?;
        hex.frame.append_column(
            ALL_WALKABILITY.into(),
            walk.iter().map(|v| Value::Num(*v)).collect(),
        )?;

        let total_weight: f64 = hex.hex_population.iter().sum();
        let weighted = |vals: &[f64]| -> f64 {
            if total_weight <= 0.0 {
                return 0.0;
            }
            vals.iter()
                .zip(&hex.hex_population)
                .filter(|(_, w)| **w > 0.0)
                .map(|(v, w)| v * w)
                .sum::<f64>()
                / total_weight
        };
        city.append_column(ALL_POP_Z_POP.into(), vec![Value::Num(weighted(zp))])?;
        city.append_column(ALL_POP_Z_INT.into(), vec![Value::Num(weighted(zi))])?;
        city.append_column(ALL_POP_Z_DL.into(), vec![Value::Num(weighted(zd))])?;
        city.append_column(ALL_POP_WALKABILITY.into(), vec![Value::Num(weighted(&walk))])?;
    }
    Ok(diagnostics)
}

/// Concatenates per-region city frames (identical columns) into one table.
pub fn concat_city_frames(frames: Vec<IndicatorFrame>) -> Result<IndicatorFrame> {
    let mut iter = frames.into_iter();
    let mut merged = iter.next().ok_or_else(|| Error::Other("no city frames".into()))?;
    for f in iter {
        if f.columns != merged.columns {
            return Err(Error::Other("city frame columns differ between regions".into()));
        }
        merged.rows.extend(f.rows);
    }
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ProjectedPoint, Rect};
    use crate::indicators::SamplePoint;

    fn fake_estimate(hex: u64, id: u64, score: f64, pop_d: f64, int_d: f64, dl: f64) -> SampleEstimate {
        let mut access_score = BTreeMap::new();
        access_score.insert("fresh_food_market".to_string(), score);
        let mut access_distance = BTreeMap::new();
        access_distance.insert("fresh_food_market".to_string(), Some(100.0));
        SampleEstimate {
            point: SamplePoint {
                id,
                location: ProjectedPoint::new(0.0, 0.0),
                n1: 1,
                n2: 2,
                l1: 1.0,
                l2: 1.0,
                hex,
            },
            nh_pop_density: pop_d,
            nh_intersection_density: int_d,
            access_distance,
            access_score,
            daily_living: dl,
            walkability: 0.0,
        }
    }

    fn grid() -> HexGrid {
        HexGrid::tessellate(Rect::new(0.0, 0.0, 2000.0, 2000.0), 250.0)
    }

    fn classes() -> Vec<String> {
        vec!["fresh_food_market".to_string()]
    }

    #[test]
    fn hex_percentage_from_binary_scores() {
        let grid = grid();
        let est: Vec<SampleEstimate> = [1.0, 1.0, 0.0, 0.0]
            .iter()
            .enumerate()
            .map(|(i, s)| fake_estimate(3, i as u64, *s, 1000.0, 10.0, 2.0))
            .collect();
        let agg = aggregate_hex(&est, &grid, "testville", 500.0, AccessMethod::Binary, &classes())
            .unwrap();
        assert_eq!(agg.frame.rows.len(), 1);
        let pct = agg
            .frame
            .num(0, "pct_access_500m_fresh_food_market_binary")
            .unwrap();
        assert_eq!(pct, 50.0);
        assert_eq!(agg.frame.num(0, SAMPLE_POINT_COUNT).unwrap(), 4.0);
    }

    #[test]
    fn singleton_hex_equals_point_values() {
        let grid = grid();
        let est = vec![fake_estimate(5, 0, 1.0, 4000.0, 55.0, 3.0)];
        let agg = aggregate_hex(&est, &grid, "t", 500.0, AccessMethod::Binary, &classes()).unwrap();
        assert_eq!(agg.frame.num(0, LOCAL_NH_POP_DENSITY).unwrap(), 4000.0);
        assert_eq!(agg.frame.num(0, LOCAL_NH_INT_DENSITY).unwrap(), 55.0);
        assert_eq!(agg.frame.num(0, LOCAL_DAILY_LIVING).unwrap(), 3.0);
    }

    #[test]
    fn hex_means_match_recomputation() {
        let grid = grid();
        let mut est = Vec::new();
        let mut state = 77u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for i in 0..500 {
            let hex = (i % 7) as u64;
            est.push(fake_estimate(
                hex,
                i as u64,
                if next() > 0.5 { 1.0 } else { 0.0 },
                next() * 10_000.0,
                next() * 200.0,
                (next() * 4.0).floor().min(3.0),
            ));
        }
        let agg = aggregate_hex(&est, &grid, "t", 500.0, AccessMethod::Binary, &classes()).unwrap();
        // oracle: recompute means per hex directly
        for (row_idx, row) in agg.frame.rows.iter().enumerate() {
            let hex = row[0].as_f64().unwrap() as u64;
            let members: Vec<&SampleEstimate> = est.iter().filter(|e| e.point.hex == hex).collect();
            let n = members.len() as f64;
            let mean_pop = members.iter().map(|e| e.nh_pop_density).sum::<f64>() / n;
            let got = agg.frame.num(row_idx, LOCAL_NH_POP_DENSITY).unwrap();
            assert!((got - mean_pop).abs() < 1e-12);
            let pct = agg
                .frame
                .num(row_idx, "pct_access_500m_fresh_food_market_binary")
                .unwrap();
            assert!((0.0..=100.0).contains(&pct));
        }
    }

    fn hex_aggregate_fixture(values: &[(f64, f64)]) -> HexAggregate {
        // (indicator value, population) pairs, one hex row each
        let grid = grid();
        let mut est = Vec::new();
        for (i, (v, _)) in values.iter().enumerate() {
            est.push(fake_estimate(i as u64, i as u64, 1.0, *v, *v, 1.0));
        }
        let mut agg =
            aggregate_hex(&est, &grid, "t", 500.0, AccessMethod::Binary, &classes()).unwrap();
        agg.hex_population = values.iter().map(|(_, p)| *p).collect();
        agg
    }

    #[test]
    fn city_population_weighted_mean() {
        let agg = hex_aggregate_fixture(&[(10.0, 100.0), (30.0, 300.0)]);
        let stats = RegionStats {
            name: "t".into(),
            area_km2: 10.0,
            population: 400.0,
            intersections: 42,
        };
        let city =
            aggregate_city(&agg, &stats, 500.0, AccessMethod::Binary, &classes()).unwrap();
        // (10*100 + 30*300) / 400 = 25
        assert_eq!(city.num(0, POP_NH_POP_DENSITY).unwrap(), 25.0);
        assert_eq!(city.num(0, SAMPLE_POINT_COUNT).unwrap(), 2.0);
        assert_eq!(city.num(0, INTERSECTIONS).unwrap(), 42.0);
    }

    #[test]
    fn uniform_weights_equal_unweighted_mean() {
        let agg = hex_aggregate_fixture(&[(10.0, 50.0), (30.0, 50.0), (20.0, 50.0)]);
        let stats = RegionStats {
            name: "t".into(),
            area_km2: 1.0,
            population: 150.0,
            intersections: 0,
        };
        let city = aggregate_city(&agg, &stats, 500.0, AccessMethod::Binary, &classes()).unwrap();
        assert!((city.num(0, POP_NH_POP_DENSITY).unwrap() - 20.0).abs() < 1e-12);
    }

    #[test]
    fn zero_total_weight_is_an_error() {
        let agg = hex_aggregate_fixture(&[(10.0, 0.0), (30.0, 0.0)]);
        let stats = RegionStats {
            name: "t".into(),
            area_km2: 1.0,
            population: 0.0,
            intersections: 0,
        };
        assert!(matches!(
            aggregate_city(&agg, &stats, 500.0, AccessMethod::Binary, &classes()),
            Err(Error::ZeroWeight(_))
        ));
    }

    #[test]
    fn pooled_z_standardizes_and_matches_single_region() {
        let mut hexes = vec![hex_aggregate_fixture(&[
            (1000.0, 10.0),
            (2000.0, 20.0),
            (4000.0, 30.0),
            (2500.0, 5.0),
        ])];
        let stats = RegionStats {
            name: "t".into(),
            area_km2: 1.0,
            population: 65.0,
            intersections: 1,
        };
        let mut cities =
            vec![aggregate_city(&hexes[0], &stats, 500.0, AccessMethod::Binary, &classes()).unwrap()];
        between_city_z(&mut hexes, &mut cities).unwrap();
        // single region: pooled z equals within-region z of the hex column
        let raw: Vec<f64> = (0..4)
            .map(|r| hexes[0].frame.num(r, LOCAL_NH_POP_DENSITY).unwrap())
            .collect();
        let (expect, _) = zscores(&raw).unwrap();
        for (r, e) in expect.iter().enumerate() {
            let got = hexes[0].frame.num(r, ALL_Z_POP).unwrap();
            assert!((got - e).abs() < 1e-12);
        }
        // pooled column standardized
        let zs: Vec<f64> = (0..4).map(|r| hexes[0].frame.num(r, ALL_Z_POP).unwrap()).collect();
        let mean = zs.iter().sum::<f64>() / 4.0;
        let sd = (zs.iter().map(|z| (z - mean) * (z - mean)).sum::<f64>() / 4.0).sqrt();
        assert!(mean.abs() < 1e-9 && (sd - 1.0).abs() < 1e-9);
    }

    #[test]
    fn two_region_pool_matches_direct_recomputation() {
        let mut hexes = vec![
            hex_aggregate_fixture(&[(1000.0, 10.0), (3000.0, 20.0)]),
            hex_aggregate_fixture(&[(2000.0, 15.0), (6000.0, 25.0), (500.0, 1.0)]),
        ];
        let stats = |name: &str, pop: f64| RegionStats {
            name: name.into(),
            area_km2: 1.0,
            population: pop,
            intersections: 0,
        };
        let mut cities = vec![
            aggregate_city(&hexes[0], &stats("a", 30.0), 500.0, AccessMethod::Binary, &classes())
                .unwrap(),
            aggregate_city(&hexes[1], &stats("b", 41.0), 500.0, AccessMethod::Binary, &classes())
                .unwrap(),
        ];
        between_city_z(&mut hexes, &mut cities).unwrap();
        // oracle: pool all five values, standardize directly
        let pooled = [1000.0, 3000.0, 2000.0, 6000.0, 500.0];
        let n = pooled.len() as f64;
        let mean = pooled.iter().sum::<f64>() / n;
        let sd = (pooled.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
        let expect_first_of_b = (2000.0 - mean) / sd;
        let got = hexes[1].frame.num(0, ALL_Z_POP).unwrap();
        assert!((got - expect_first_of_b).abs() < 1e-12);
        // city-level weighted z for region b
        let zb: Vec<f64> = (0..3).map(|r| hexes[1].frame.num(r, ALL_Z_POP).unwrap()).collect();
        let w = [15.0, 25.0, 1.0];
        let expect_city = zb.iter().zip(&w).map(|(z, w)| z * w).sum::<f64>() / 41.0;
        let got_city = cities[1].num(0, ALL_POP_Z_POP).unwrap();
        assert!((got_city - expect_city).abs() < 1e-12);
    }

    #[test]
    fn column_collision_is_an_error() {
        let res = IndicatorFrame::new(
            FrameLevel::Hex,
            vec!["a".into(), "b".into(), "a".into()],
        );
        assert!(matches!(res, Err(Error::PropertyCollision(_))));
        let mut frame = IndicatorFrame::new(FrameLevel::Hex, vec!["a".into()]).unwrap();
        assert!(matches!(
            frame.append_column("a".into(), vec![]),
            Err(Error::PropertyCollision(_))
        ));
    }

    #[test]
    fn distance_substitution_in_column_names() {
        assert_eq!(
            pct_access_column(500.0, "fresh_food_market", AccessMethod::Binary),
            "pct_access_500m_fresh_food_market_binary"
        );
        assert_eq!(
            pct_access_column(800.0, "convenience", AccessMethod::Soft),
            "pct_access_800m_convenience_soft"
        );
        assert_eq!(
            pop_pct_access_column(500.0, "pt_any", AccessMethod::Binary),
            "pop_pct_access_500m_pt_any_binary"
        );
    }
}
