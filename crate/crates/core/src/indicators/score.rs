//! Access scoring, density interpolation, and standardization.

use crate::error::{Error, Result};

/// Destination access scoring method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccessMethod {
    Binary,
    Soft,
    Gaussian,
}

impl AccessMethod {
    pub fn name(&self) -> &'static str {
        match self {
            AccessMethod::Binary => "binary",
            AccessMethod::Soft => "soft",
            AccessMethod::Gaussian => "gaussian",
        }
    }
}

/// Parameters of the scoring functions: threshold `t` (meters), soft
/// slope `k`, gaussian decay variance `v` (square meters).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct AccessParams {
    pub threshold_m: f64,
    pub soft_slope: f64,
    pub gaussian_variance_m2: f64,
}

impl Default for AccessParams {
    fn default() -> Self {
        AccessParams {
            threshold_m: 500.0,
            soft_slope: 5.0,
            gaussian_variance_m2: 129_842.0,
        }
    }
}

impl AccessParams {
    pub fn validate(&self) -> Result<()> {
        if self.threshold_m <= 0.0 || self.soft_slope <= 0.0 || self.gaussian_variance_m2 <= 0.0 {
            return Err(Error::Config(
                "access parameters t, k, v must all be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Scores a network distance to the nearest destination; `None` means
/// unreached within the search cutoff and scores 0 under every method.
pub fn access_score(distance_m: Option<f64>, method: AccessMethod, p: &AccessParams) -> f64 {
    let Some(d) = distance_m else {
        return 0.0;
    };
    let t = p.threshold_m;
    match method {
        AccessMethod::Binary => {
            if d <= t {
                1.0
            } else {
                0.0
            }
        }
        AccessMethod::Soft => 1.0 / (1.0 + (p.soft_slope * (d - t) / t).exp()),
        AccessMethod::Gaussian => {
            if d <= t {
                1.0
            } else {
                (-(d - t) * (d - t) / p.gaussian_variance_m2).exp()
            }
        }
    }
}

/// Distance-weighted interpolation of node estimates onto a sample point:
/// coincident points take the node value directly, otherwise each node is
/// weighted by the complement of its relative distance.
pub fn interpolate_density(d1: f64, d2: f64, l1: f64, l2: f64) -> Result<f64> {
    if l1 < 0.0 || l2 < 0.0 {
        return Err(Error::Geometry(format!(
            "negative distance to terminal node: l1={l1}, l2={l2}"
        )));
    }
    if l1 == 0.0 {
        return Ok(d1);
    }
    if l2 == 0.0 {
        return Ok(d2);
    }
    let total = l1 + l2;
    Ok((1.0 - l1 / total) * d1 + (1.0 - l2 / total) * d2)
}

/// Sum of the three daily-living binary scores; each input must be 0 or 1.
pub fn daily_living(scores: [f64; 3]) -> Result<f64> {
    for s in scores {
        if s != 0.0 && s != 1.0 {
            return Err(Error::NonBinaryScore(s));
        }
    }
    Ok(scores.iter().sum())
}

/// Population-sd z-scores. Returns the transformed values and a flag set
/// when the input was constant (all zeros are returned in that case).
pub fn zscores(values: &[f64]) -> Result<(Vec<f64>, bool)> {
    if values.len() < 2 {
        return Err(Error::TooFewValues(values.len()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let sd = var.sqrt();
    if sd == 0.0 {
        return Ok((vec![0.0; values.len()], true));
    }
    Ok((values.iter().map(|v| (v - mean) / sd).collect(), false))
}

/// Walkability index: sum of the three standardized components.
pub fn walkability(z_pop: f64, z_intersection: f64, z_daily_living: f64) -> f64 {
    z_pop + z_intersection + z_daily_living
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> AccessParams {
        AccessParams::default()
    }

    #[test]
    fn binary_threshold_inclusive() {
        assert_eq!(access_score(Some(499.0), AccessMethod::Binary, &p()), 1.0);
        assert_eq!(access_score(Some(500.0), AccessMethod::Binary, &p()), 1.0);
        assert_eq!(access_score(Some(501.0), AccessMethod::Binary, &p()), 0.0);
    }

    #[test]
    fn soft_is_half_at_threshold() {
        assert_eq!(access_score(Some(500.0), AccessMethod::Soft, &p()), 0.5);
        // 1/(1+e^-1)
        let s = access_score(Some(400.0), AccessMethod::Soft, &p());
        assert!((s - 0.731_058_578_630_004_9).abs() < 1e-12, "got {s}");
    }

    #[test]
    fn gaussian_continuous_at_threshold() {
        assert_eq!(access_score(Some(500.0), AccessMethod::Gaussian, &p()), 1.0);
        let just_over = access_score(Some(500.0 + 1e-9), AccessMethod::Gaussian, &p());
        assert!((just_over - 1.0).abs() < 1e-12);
        // exp(-250000/129842)
        let s = access_score(Some(1000.0), AccessMethod::Gaussian, &p());
        assert!((s - 0.145_814_932_736_864_87).abs() < 1e-12, "got {s}");
    }

    #[test]
    fn unreached_scores_zero_under_every_method() {
        for m in [AccessMethod::Binary, AccessMethod::Soft, AccessMethod::Gaussian] {
            assert_eq!(access_score(None, m, &p()), 0.0);
        }
    }

    #[test]
    fn scores_non_increasing_in_distance() {
        for m in [AccessMethod::Binary, AccessMethod::Soft, AccessMethod::Gaussian] {
            let mut prev = f64::INFINITY;
            for d in (0..3000).step_by(25) {
                let s = access_score(Some(d as f64), m, &p());
                assert!(s <= prev + 1e-15, "{m:?} increased at {d}");
                assert!((0.0..=1.0).contains(&s));
                prev = s;
            }
        }
    }

    #[test]
    fn interpolation_piecewise_cases() {
        assert_eq!(interpolate_density(10.0, 20.0, 0.0, 70.0).unwrap(), 10.0);
        assert_eq!(interpolate_density(10.0, 20.0, 30.0, 0.0).unwrap(), 20.0);
        let v = interpolate_density(10.0, 20.0, 30.0, 70.0).unwrap();
        assert!((v - 13.0).abs() < 1e-12);
        // constant densities interpolate to the constant
        assert_eq!(interpolate_density(7.0, 7.0, 13.0, 29.0).unwrap(), 7.0);
        assert!(interpolate_density(1.0, 2.0, -1.0, 5.0).is_err());
    }

    #[test]
    fn interpolation_is_a_convex_combination() {
        let mut state = 5u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let d1 = next() * 1e4;
            let d2 = next() * 1e4;
            let l1 = next() * 100.0;
            let l2 = next() * 100.0;
            let v = interpolate_density(d1, d2, l1, l2).unwrap();
            assert!(v >= d1.min(d2) - 1e-9 && v <= d1.max(d2) + 1e-9);
        }
    }

    #[test]
    fn daily_living_sums() {
        assert_eq!(daily_living([1.0, 1.0, 0.0]).unwrap(), 2.0);
        assert_eq!(daily_living([0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(daily_living([1.0, 1.0, 1.0]).unwrap(), 3.0);
        assert!(matches!(daily_living([0.5, 0.0, 0.0]), Err(Error::NonBinaryScore(_))));
    }

    #[test]
    fn zscore_pair() {
        let (z, flag) = zscores(&[1.0, 3.0]).unwrap();
        assert_eq!(z, vec![-1.0, 1.0]);
        assert!(!flag);
    }

    #[test]
    fn zscore_constant_flags() {
        let (z, flag) = zscores(&[4.0, 4.0, 4.0]).unwrap();
        assert!(z.iter().all(|v| *v == 0.0));
        assert!(flag);
    }

    #[test]
    fn zscore_standardizes() {
        let values: Vec<f64> = (0..100).map(|i| (i * i) as f64 * 0.37 + 5.0).collect();
        let (z, flag) = zscores(&values).unwrap();
        assert!(!flag);
        let n = z.len() as f64;
        let mean = z.iter().sum::<f64>() / n;
        let sd = (z.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
        assert!(mean.abs() < 1e-12);
        assert!((sd - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zscore_needs_two_values() {
        assert!(matches!(zscores(&[1.0]), Err(Error::TooFewValues(1))));
    }

    #[test]
    fn walkability_is_a_sum() {
        assert_eq!(walkability(0.0, 0.0, 0.0), 0.0);
        assert_eq!(walkability(1.0, -0.5, 0.25), 0.75);
    }
}
