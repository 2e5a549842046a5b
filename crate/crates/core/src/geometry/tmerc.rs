//! Self-contained transverse Mercator projection on the WGS84 ellipsoid.
//!
//! Forward and inverse mappings use the 6th-order Krüger series in the
//! third flattening, good to well under a millimeter across a UTM zone.
//! UTM conventions apply: scale 0.9996 on the central meridian, 500 km
//! false easting, 10 000 km false northing in the southern hemisphere.

use super::ProjectedPoint;
use crate::error::{Error, Result};

const WGS84_A: f64 = 6_378_137.0;
const WGS84_F: f64 = 1.0 / 298.257_223_563;
const SCALE: f64 = 0.9996;
const FALSE_EASTING: f64 = 500_000.0;
const FALSE_NORTHING_SOUTH: f64 = 10_000_000.0;

/// Highest latitude the projection accepts, in degrees.
pub const MAX_LATITUDE_DEG: f64 = 84.0;

/// UTM zone number for a longitude in [-180, 180).
pub fn utm_zone_for(lon_deg: f64) -> u8 {
    let z = ((lon_deg + 180.0) / 6.0).floor() as i32 + 1;
    z.clamp(1, 60) as u8
}

/// A projection context: UTM zone plus hemisphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ProjectionContext {
    pub zone: u8,
    pub south: bool,
}

impl ProjectionContext {
    pub fn new(zone: u8, south: bool) -> Self {
        ProjectionContext { zone, south }
    }

    /// Context for a geographic location (zone from longitude, hemisphere
    /// from latitude sign).
    pub fn for_location(lat_deg: f64, lon_deg: f64) -> Self {
        ProjectionContext {
            zone: utm_zone_for(lon_deg),
            south: lat_deg < 0.0,
        }
    }

    pub fn central_meridian_deg(&self) -> f64 {
        (self.zone as f64) * 6.0 - 183.0
    }
}

/// Transverse Mercator mapping for one projection context.
///
/// Series coefficients are precomputed at construction; `forward` and
/// `inverse` are pure functions after that.
#[derive(Debug, Clone)]
pub struct TransverseMercator {
    ctx: ProjectionContext,
    lon0_rad: f64,
    ecc: f64,
    e2: f64,
    // rectifying radius and Krüger coefficients
    radius: f64,
    alpha: [f64; 6],
    beta: [f64; 6],
}

impl TransverseMercator {
    pub fn new(ctx: ProjectionContext) -> Self {
        let f = WGS84_F;
        let n = f / (2.0 - f);
        let n2 = n * n;
        let n3 = n2 * n;
        let n4 = n3 * n;
        let n5 = n4 * n;
        let n6 = n5 * n;

        let radius = WGS84_A / (1.0 + n) * (1.0 + n2 / 4.0 + n4 / 64.0 + n6 / 256.0);

        let alpha = [
            n / 2.0 - 2.0 / 3.0 * n2 + 5.0 / 16.0 * n3 + 41.0 / 180.0 * n4 - 127.0 / 288.0 * n5
                + 7891.0 / 37800.0 * n6,
            13.0 / 48.0 * n2 - 3.0 / 5.0 * n3 + 557.0 / 1440.0 * n4 + 281.0 / 630.0 * n5
                - 1_983_433.0 / 1_935_360.0 * n6,
            61.0 / 240.0 * n3 - 103.0 / 140.0 * n4 + 15061.0 / 26880.0 * n5
                + 167_603.0 / 181_440.0 * n6,
            49561.0 / 161_280.0 * n4 - 179.0 / 168.0 * n5 + 6_601_661.0 / 7_257_600.0 * n6,
            34729.0 / 80640.0 * n5 - 3_418_889.0 / 1_995_840.0 * n6,
            212_378_941.0 / 319_334_400.0 * n6,
        ];
        let beta = [
            n / 2.0 - 2.0 / 3.0 * n2 + 37.0 / 96.0 * n3 - 1.0 / 360.0 * n4 - 81.0 / 512.0 * n5
                + 96199.0 / 604_800.0 * n6,
            1.0 / 48.0 * n2 + 1.0 / 15.0 * n3 - 437.0 / 1440.0 * n4 + 46.0 / 105.0 * n5
                - 1_118_711.0 / 3_870_720.0 * n6,
            17.0 / 480.0 * n3 - 37.0 / 840.0 * n4 - 209.0 / 4480.0 * n5 + 5569.0 / 90720.0 * n6,
            4397.0 / 161_280.0 * n4 - 11.0 / 504.0 * n5 - 830_251.0 / 7_257_600.0 * n6,
            4583.0 / 161_280.0 * n5 - 108_847.0 / 3_991_680.0 * n6,
            20_648_693.0 / 638_668_800.0 * n6,
        ];

        let e2 = f * (2.0 - f);
        TransverseMercator {
            ctx,
            lon0_rad: ctx.central_meridian_deg().to_radians(),
            ecc: e2.sqrt(),
            e2,
            radius,
            alpha,
            beta,
        }
    }

    pub fn context(&self) -> ProjectionContext {
        self.ctx
    }

    /// Projects geographic degrees to meters east/north.
    pub fn forward(&self, lat_deg: f64, lon_deg: f64) -> Result<ProjectedPoint> {
        if lat_deg.abs() > MAX_LATITUDE_DEG {
            return Err(Error::LatitudeBand(lat_deg));
        }
        let lat = lat_deg.to_radians();
        let mut dlon = lon_deg.to_radians() - self.lon0_rad;
        // wrap to [-pi, pi)
        while dlon < -std::f64::consts::PI {
            dlon += 2.0 * std::f64::consts::PI;
        }
        while dlon >= std::f64::consts::PI {
            dlon -= 2.0 * std::f64::consts::PI;
        }

        // conformal latitude via Karney's tau' form
        let t = lat.tan();
        let sigma = (self.ecc * (self.ecc * t / (1.0 + t * t).sqrt()).atanh()).sinh();
        let tp = t * (1.0 + sigma * sigma).sqrt() - sigma * (1.0 + t * t).sqrt();

        let xi_p = tp.atan2(dlon.cos());
        let eta_p = (dlon.sin() / (tp * tp + dlon.cos() * dlon.cos()).sqrt()).asinh();

        let mut xi = xi_p;
        let mut eta = eta_p;
        for (j, a) in self.alpha.iter().enumerate() {
            let k = 2.0 * (j as f64 + 1.0);
            xi += a * (k * xi_p).sin() * (k * eta_p).cosh();
            eta += a * (k * xi_p).cos() * (k * eta_p).sinh();
        }

        let x = SCALE * self.radius * eta + FALSE_EASTING;
        let mut y = SCALE * self.radius * xi;
        if self.ctx.south {
            y += FALSE_NORTHING_SOUTH;
        }
        Ok(ProjectedPoint::new(x, y))
    }

    /// Inverse mapping back to geographic degrees (lat, lon).
    pub fn inverse(&self, p: ProjectedPoint) -> (f64, f64) {
        let y = if self.ctx.south {
            p.y - FALSE_NORTHING_SOUTH
        } else {
            p.y
        };
        let xi = y / (SCALE * self.radius);
        let eta = (p.x - FALSE_EASTING) / (SCALE * self.radius);

        let mut xi_p = xi;
        let mut eta_p = eta;
        for (j, b) in self.beta.iter().enumerate() {
            let k = 2.0 * (j as f64 + 1.0);
            xi_p -= b * (k * xi).sin() * (k * eta).cosh();
            eta_p -= b * (k * xi).cos() * (k * eta).sinh();
        }

        let tp = xi_p.sin() / (eta_p.sinh().powi(2) + xi_p.cos().powi(2)).sqrt();
        let dlon = eta_p.sinh().atan2(xi_p.cos());

        // invert the conformal latitude by Newton iteration on tau
        let mut t = tp;
        for _ in 0..8 {
            let sigma = (self.ecc * (self.ecc * t / (1.0 + t * t).sqrt()).atanh()).sinh();
            let tpi = t * (1.0 + sigma * sigma).sqrt() - sigma * (1.0 + t * t).sqrt();
            let dt = (tp - tpi) * (1.0 + (1.0 - self.e2) * t * t)
                / ((1.0 - self.e2) * (1.0 + tpi * tpi).sqrt() * (1.0 + t * t).sqrt());
            t += dt;
            if dt.abs() < 1e-15 * t.abs().max(1.0) {
                break;
            }
        }

        let lat = t.atan().to_degrees();
        let lon = (dlon + self.lon0_rad).to_degrees();
        (lat, lon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent forward implementation using the classic USGS (Snyder)
    /// series in the squared eccentricity; used purely as a test oracle.
    fn snyder_forward(lat_deg: f64, lon_deg: f64, ctx: ProjectionContext) -> (f64, f64) {
        let a = WGS84_A;
        let f = WGS84_F;
        let e2 = f * (2.0 - f);
        let ep2 = e2 / (1.0 - e2);
        let lat = lat_deg.to_radians();
        let lon0 = ctx.central_meridian_deg().to_radians();
        let dlon = lon_deg.to_radians() - lon0;

        let sin = lat.sin();
        let cos = lat.cos();
        let tan = lat.tan();
        let nn = a / (1.0 - e2 * sin * sin).sqrt();
        let t = tan * tan;
        let c = ep2 * cos * cos;
        let aa = cos * dlon;

        let m = a
            * ((1.0 - e2 / 4.0 - 3.0 * e2 * e2 / 64.0 - 5.0 * e2 * e2 * e2 / 256.0) * lat
                - (3.0 * e2 / 8.0 + 3.0 * e2 * e2 / 32.0 + 45.0 * e2 * e2 * e2 / 1024.0)
                    * (2.0 * lat).sin()
                + (15.0 * e2 * e2 / 256.0 + 45.0 * e2 * e2 * e2 / 1024.0) * (4.0 * lat).sin()
                - (35.0 * e2 * e2 * e2 / 3072.0) * (6.0 * lat).sin());

        let x = SCALE
            * nn
            * (aa + (1.0 - t + c) * aa.powi(3) / 6.0
                + (5.0 - 18.0 * t + t * t + 72.0 * c - 58.0 * ep2) * aa.powi(5) / 120.0)
            + FALSE_EASTING;
        let mut y = SCALE
            * (m + nn
                * tan
                * (aa * aa / 2.0
                    + (5.0 - t + 9.0 * c + 4.0 * c * c) * aa.powi(4) / 24.0
                    + (61.0 - 58.0 * t + t * t + 600.0 * c - 330.0 * ep2) * aa.powi(6) / 720.0));
        if ctx.south {
            y += FALSE_NORTHING_SOUTH;
        }
        (x, y)
    }

    #[test]
    fn zone_from_longitude() {
        assert_eq!(utm_zone_for(0.5), 31);
        assert_eq!(utm_zone_for(-180.0), 1);
        assert_eq!(utm_zone_for(179.999), 60);
        assert_eq!(utm_zone_for(-0.001), 30);
    }

    #[test]
    fn central_meridian_maps_to_false_easting() {
        let tm = TransverseMercator::new(ProjectionContext::new(32, false));
        let p = tm.forward(48.0, 9.0).unwrap();
        assert!((p.x - 500_000.0).abs() < 1e-6, "easting {}", p.x);
    }

    #[test]
    fn equator_maps_to_zero_northing() {
        let tm = TransverseMercator::new(ProjectionContext::new(32, false));
        let p = tm.forward(0.0, 10.0).unwrap();
        assert!(p.y.abs() < 1e-6, "northing {}", p.y);
    }

    #[test]
    fn southern_hemisphere_false_northing() {
        let tm = TransverseMercator::new(ProjectionContext::new(56, true));
        let p = tm.forward(0.0, 153.0).unwrap();
        assert!((p.y - 10_000_000.0).abs() < 1e-6);
        // south of the equator stays below the false northing
        let q = tm.forward(-27.5, 153.0).unwrap();
        assert!(q.y < 10_000_000.0);
    }

    #[test]
    fn latitude_band_rejected() {
        let tm = TransverseMercator::new(ProjectionContext::new(33, false));
        assert!(matches!(tm.forward(85.0, 15.0), Err(Error::LatitudeBand(_))));
        assert!(matches!(tm.forward(-84.5, 15.0), Err(Error::LatitudeBand(_))));
    }

    #[test]
    fn matches_independent_series_reference() {
        // Reference point checked against a high-precision evaluation of the
        // exact Gauss-Krüger mapping: easting 414273.126036, northing
        // 5316283.291063 (zone 32 north).
        let ctx = ProjectionContext::new(32, false);
        let tm = TransverseMercator::new(ctx);
        let p = tm.forward(47.9941, 7.8509).unwrap();
        assert!((p.x - 414_273.126_036).abs() < 0.01, "easting {}", p.x);
        assert!((p.y - 5_316_283.291_063).abs() < 0.01, "northing {}", p.y);

        let (sx, sy) = snyder_forward(47.9941, 7.8509, ctx);
        assert!((p.x - sx).abs() < 0.01, "easting {} vs snyder {}", p.x, sx);
        assert!((p.y - sy).abs() < 0.01, "northing {} vs snyder {}", p.y, sy);
    }

    #[test]
    fn agrees_with_snyder_series_across_zone() {
        let ctx = ProjectionContext::new(32, false);
        let tm = TransverseMercator::new(ctx);
        for lat10 in (-800..=800).step_by(37) {
            let lat = lat10 as f64 / 10.0;
            for dlon10 in (-25..=25).step_by(5) {
                let lon = 9.0 + dlon10 as f64 / 10.0;
                let p = tm.forward(lat, lon).unwrap();
                let (sx, sy) = snyder_forward(lat, lon, ctx);
                assert!(
                    (p.x - sx).abs() < 0.01 && (p.y - sy).abs() < 0.01,
                    "mismatch at lat {lat} lon {lon}: ({}, {}) vs ({sx}, {sy})",
                    p.x,
                    p.y
                );
            }
        }
    }

    #[test]
    fn round_trip_under_one_millimeter() {
        // deterministic pseudo-random sample of the zone band
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for &south in &[false, true] {
            let ctx = ProjectionContext::new(32, south);
            let tm = TransverseMercator::new(ctx);
            for _ in 0..10_000 {
                let lat = next() * 168.0 - 84.0;
                let lon = 9.0 + (next() * 6.0 - 3.0);
                let p = tm.forward(lat, lon).unwrap();
                let (lat2, lon2) = tm.inverse(p);
                let q = tm.forward(lat2, lon2).unwrap();
                let err = p.dist(q);
                assert!(err < 1e-3, "round trip error {err} m at lat {lat} lon {lon}");
                assert!((lat - lat2).abs() < 1e-8 && (lon - lon2).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn context_for_location() {
        let ctx = ProjectionContext::for_location(-37.8, 145.0);
        assert_eq!(ctx.zone, 55);
        assert!(ctx.south);
    }
}
