//! Logistic and Hénon orbits and extropy-rate bifurcation scans.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::base::LogBase;
use crate::complexity::{round_codes, SeriesSample};
use crate::error::{Error, Result};
use crate::rate::{sequence_extropy_rate, RateEstimate};

pub const DEFAULT_BURN_IN: usize = 500;
pub const DEFAULT_ORBIT_LENGTH: usize = 300;
pub const DEFAULT_ROUND_DECIMALS: u32 = 2;
pub const HENON_DEFAULT_B: f64 = 0.3;

/// Orbits with `|x|` beyond this are treated as diverged.
const HENON_ESCAPE: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    Logistic,
    Henon,
}

impl MapKind {
    pub fn name(self) -> &'static str {
        match self {
            MapKind::Logistic => "logistic",
            MapKind::Henon => "henon",
        }
    }

    /// Admissible range of the scanned parameter (`r` or `a`).
    pub fn parameter_range(self) -> (f64, f64) {
        match self {
            MapKind::Logistic => (2.5, 4.0),
            MapKind::Henon => (1.0, 1.4),
        }
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logistic" => Ok(MapKind::Logistic),
            "henon" => Ok(MapKind::Henon),
            other => Err(Error::invalid(format!("unknown map `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapConfig {
    pub kind: MapKind,
    /// `r` for the logistic map, `a` for the Hénon map.
    pub param: f64,
    /// Hénon `b`; ignored by the logistic map.
    pub b: f64,
    pub x0: f64,
    /// Hénon `y0`; ignored by the logistic map.
    pub y0: f64,
    pub burn_in: usize,
    pub length: usize,
    pub round_decimals: u32,
}

impl MapConfig {
    pub fn logistic(r: f64) -> Self {
        MapConfig {
            kind: MapKind::Logistic,
            param: r,
            b: HENON_DEFAULT_B,
            x0: 0.1,
            y0: 0.1,
            burn_in: DEFAULT_BURN_IN,
            length: DEFAULT_ORBIT_LENGTH,
            round_decimals: DEFAULT_ROUND_DECIMALS,
        }
    }

    pub fn henon(a: f64) -> Self {
        MapConfig {
            kind: MapKind::Henon,
            ..Self::logistic(a)
        }
    }

    pub fn with_param(mut self, param: f64) -> Self {
        self.param = param;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.length == 0 {
            return Err(Error::invalid("orbit length must be at least 1"));
        }
        let (lo, hi) = self.kind.parameter_range();
        if !(lo..=hi).contains(&self.param) {
            return Err(Error::invalid(format!(
                "{} parameter {} outside [{lo}, {hi}]",
                self.kind, self.param
            )));
        }
        match self.kind {
            MapKind::Logistic => {
                if !(self.x0 > 0.0 && self.x0 < 1.0) {
                    return Err(Error::invalid(format!(
                        "logistic x0 = {} not in (0, 1)",
                        self.x0
                    )));
                }
            }
            MapKind::Henon => {
                if !self.b.is_finite() || !self.x0.is_finite() || !self.y0.is_finite() {
                    return Err(Error::invalid("Hénon b, x0 and y0 must be finite"));
                }
            }
        }
        Ok(())
    }

    pub fn orbit(&self) -> Result<SeriesSample> {
        match self.kind {
            MapKind::Logistic => logistic_orbit(self),
            MapKind::Henon => henon_orbit(self),
        }
    }
}

/// Iterates `x ← r x (1 - x)`, dropping the first `burn_in` iterates.
pub fn logistic_orbit(c: &MapConfig) -> Result<SeriesSample> {
    if c.kind != MapKind::Logistic {
        return Err(Error::invalid("not a logistic map configuration"));
    }
    c.validate()?;
    let r = c.param;
    let mut x = c.x0;
    let mut values = Vec::with_capacity(c.length);
    for i in 0..(c.burn_in + c.length) {
        x = r * x * (1.0 - x);
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::domain(format!(
                "logistic orbit left (0, 1) at iterate {} (r = {r})",
                i + 1
            )));
        }
        if i >= c.burn_in {
            values.push(x);
        }
    }
    SeriesSample::new(format!("logistic r={r}"), values)
}

/// Iterates `(x, y) ← (1 + y - a x², b x)` and returns the x coordinates
/// after burn-in.
pub fn henon_orbit(c: &MapConfig) -> Result<SeriesSample> {
    if c.kind != MapKind::Henon {
        return Err(Error::invalid("not a Hénon map configuration"));
    }
    c.validate()?;
    let (a, b) = (c.param, c.b);
    let (mut x, mut y) = (c.x0, c.y0);
    let mut values = Vec::with_capacity(c.length);
    for i in 0..(c.burn_in + c.length) {
        (x, y) = (1.0 + y - a * x * x, b * x);
        if !x.is_finite() || x.abs() > HENON_ESCAPE {
            return Err(Error::domain(format!(
                "Hénon orbit diverged at iterate {} (a = {a})",
                i + 1
            )));
        }
        if i >= c.burn_in {
            values.push(x);
        }
    }
    SeriesSample::new(format!("henon a={a}"), values)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanPoint {
    pub parameter: f64,
    pub rate: Option<RateEstimate>,
    pub distinct_states: Option<usize>,
    pub orbit_min: Option<f64>,
    pub orbit_max: Option<f64>,
    /// Retained orbit, empty when the grid point failed.
    #[serde(skip)]
    pub orbit: Vec<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub kind: MapKind,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub points: Vec<ScanPoint>,
}

fn evaluate_point(config: MapConfig, base: LogBase) -> ScanPoint {
    let outcome = config.orbit().and_then(|orbit| {
        let codes = round_codes(&orbit.values, config.round_decimals);
        let rate = sequence_extropy_rate(&codes, base)?;
        Ok((orbit, rate))
    });
    match outcome {
        Ok((orbit, rate)) => {
            let lo = orbit.values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = orbit
                .values
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            ScanPoint {
                parameter: config.param,
                rate: Some(rate),
                distinct_states: Some(rate.support),
                orbit_min: Some(lo),
                orbit_max: Some(hi),
                orbit: orbit.values,
                error: None,
            }
        }
        Err(e) => ScanPoint {
            parameter: config.param,
            rate: None,
            distinct_states: None,
            orbit_min: None,
            orbit_max: None,
            orbit: Vec::new(),
            error: Some(e.to_string()),
        },
    }
}

/// Evenly spaced grid of `steps` values from `from` to `to` inclusive.
pub fn parameter_grid(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::invalid("a scan needs at least 2 steps"));
    }
    if !(from.is_finite() && to.is_finite() && from < to) {
        return Err(Error::invalid(format!("invalid scan range [{from}, {to}]")));
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i == steps - 1 {
                to
            } else {
                from + (to - from) * i as f64 / last
            }
        })
        .collect())
}

/// Extropy-rate scan over the map parameter. Failing grid points are kept
/// with their error instead of aborting the scan.
pub fn bifurcation_scan(
    template: &MapConfig,
    from: f64,
    to: f64,
    steps: usize,
    base: LogBase,
) -> Result<ScanResult> {
    let (lo, hi) = template.kind.parameter_range();
    if from < lo || to > hi {
        return Err(Error::invalid(format!(
            "{} scan range [{from}, {to}] outside [{lo}, {hi}]",
            template.kind
        )));
    }
    let grid = parameter_grid(from, to, steps)?;
    let points = grid
        .par_iter()
        .map(|&p| evaluate_point(template.with_param(p), base))
        .collect();
    Ok(ScanResult {
        kind: template.kind,
        from,
        to,
        steps,
        points,
    })
}

/// Rate at a single parameter value using the scan's discretization.
pub fn rate_at(template: &MapConfig, param: f64, base: LogBase) -> Result<RateEstimate> {
    let c = template.with_param(param);
    let orbit = c.orbit()?;
    sequence_extropy_rate(&round_codes(&orbit.values, c.round_decimals), base)
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    #[test]
    fn logistic_first_iterates() {
        let c = MapConfig {
            burn_in: 0,
            length: 3,
            ..MapConfig::logistic(4.0)
        };
        let o = logistic_orbit(&c).unwrap();
        assert_abs_diff_eq!(o.values[0], 0.36, epsilon = 1e-15);
        assert_abs_diff_eq!(o.values[1], 0.9216, epsilon = 1e-15);
    }

    #[test]
    fn logistic_fixed_point_and_period_two() {
        let c = MapConfig {
            length: 10,
            ..MapConfig::logistic(2.5)
        };
        for v in logistic_orbit(&c).unwrap().values {
            assert!((v - 0.6).abs() < 1e-6);
        }
        let o = logistic_orbit(&MapConfig::logistic(3.2)).unwrap();
        assert_eq!(o.distinct_rounded(2), 2);
    }

    #[test]
    fn logistic_validation() {
        let bad_x0 = MapConfig {
            x0: 1.0,
            ..MapConfig::logistic(3.0)
        };
        assert!(logistic_orbit(&bad_x0).is_err());
        assert!(logistic_orbit(&MapConfig::logistic(4.5)).is_err());
        assert!(logistic_orbit(&MapConfig::henon(1.2)).is_err());
        // x0 = 0.5 at r = 4 lands on 1 and then 0
        let escape = MapConfig {
            x0: 0.5,
            ..MapConfig::logistic(4.0)
        };
        assert!(logistic_orbit(&escape).unwrap_err().is_numerical());
    }

    #[test]
    fn henon_first_iterate() {
        let c = MapConfig {
            burn_in: 0,
            length: 1,
            ..MapConfig::henon(1.4)
        };
        let o = henon_orbit(&c).unwrap();
        assert_abs_diff_eq!(o.values[0], 1.086, epsilon = 1e-12);
    }

    #[test]
    fn henon_periodic_and_chaotic() {
        let periodic = MapConfig {
            burn_in: 1000,
            ..MapConfig::henon(1.0)
        };
        assert!(henon_orbit(&periodic).unwrap().distinct_rounded(2) <= 8);
        let chaotic = MapConfig {
            burn_in: 1000,
            length: 500,
            ..MapConfig::henon(1.4)
        };
        assert!(henon_orbit(&chaotic).unwrap().distinct_rounded(2) > 100);
    }

    #[test]
    fn henon_divergence_is_a_domain_error() {
        let c = MapConfig {
            x0: 5.0,
            y0: 5.0,
            ..MapConfig::henon(1.4)
        };
        assert!(henon_orbit(&c).unwrap_err().is_numerical());
    }

    #[test]
    fn logistic_rates_increase_through_the_cascade() {
        let t = MapConfig::logistic(3.0);
        let rates: Vec<f64> = [2.8, 3.2, 3.55, 3.9]
            .iter()
            .map(|&r| rate_at(&t, r, LogBase::Two).unwrap().value)
            .collect();
        assert!(rates.windows(2).all(|w| w[0] < w[1]), "{rates:?}");
        assert_eq!(rate_at(&t, 2.6, LogBase::Two).unwrap().value, 0.0);
    }

    #[test]
    fn henon_rate_grows_with_a() {
        let t = MapConfig::henon(1.2);
        let low = rate_at(&t, 1.05, LogBase::Two).unwrap().value;
        let high = rate_at(&t, 1.4, LogBase::Two).unwrap().value;
        assert!(high > low, "{low} vs {high}");
    }

    #[test]
    fn scan_grid_and_determinism() {
        let t = MapConfig::logistic(3.0);
        let scan = bifurcation_scan(&t, 2.5, 4.0, 151, LogBase::Two).unwrap();
        assert_eq!(scan.points.len(), 151);
        assert!(scan
            .points
            .windows(2)
            .all(|w| w[0].parameter < w[1].parameter));
        assert_eq!(scan.points[0].parameter, 2.5);
        assert_eq!(scan.points[150].parameter, 4.0);
        assert_eq!(
            scan,
            bifurcation_scan(&t, 2.5, 4.0, 151, LogBase::Two).unwrap()
        );
        assert!(bifurcation_scan(&t, 2.5, 4.0, 1, LogBase::Two).is_err());
        assert!(bifurcation_scan(&t, 2.0, 4.0, 5, LogBase::Two).is_err());
    }

    #[test]
    fn scan_records_failures() {
        let t = MapConfig {
            x0: 2.0,
            y0: 2.0,
            ..MapConfig::henon(1.2)
        };
        let scan = bifurcation_scan(&t, 1.0, 1.4, 3, LogBase::Two).unwrap();
        assert_eq!(scan.points.len(), 3);
        assert!(scan
            .points
            .iter()
            .any(|p| p.error.is_some() && p.rate.is_none()));
    }
}
