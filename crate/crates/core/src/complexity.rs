//! Time-series complexity: approximate entropy, permutation entropy and the
//! extropy-rate estimate, plus the six reference series generators.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::base::LogBase;
use crate::error::{Error, Result};
use crate::info::entropy_nats;
use crate::rate::{sequence_extropy_rate, RateEstimate};

/// Length of the reference series.
pub const DEFAULT_LENGTH: usize = 25;

/// Decimal places kept when a real series is turned into categories.
pub const DEFAULT_ROUND_DECIMALS: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesSample {
    pub name: String,
    pub values: Vec<f64>,
    pub seed: Option<u64>,
}

impl SeriesSample {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("series is empty"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("series value {i} is not finite")));
        }
        Ok(SeriesSample {
            name: name.into(),
            values,
            seed: None,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Categories obtained by rounding to `decimals` places.
    pub fn rounded_codes(&self, decimals: u32) -> Vec<i64> {
        round_codes(&self.values, decimals)
    }

    /// Number of distinct values after rounding.
    pub fn distinct_rounded(&self, decimals: u32) -> usize {
        let mut codes = self.rounded_codes(decimals);
        codes.sort_unstable();
        codes.dedup();
        codes.len()
    }
}

/// `round(x · 10^decimals)` as an integer key.
pub fn round_codes(values: &[f64], decimals: u32) -> Vec<i64> {
    let scale = 10f64.powi(decimals as i32);
    values.iter().map(|&x| (x * scale).round() as i64).collect()
}

/// Approximate-entropy parameters: template length `m` and tolerance `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApEnParams {
    pub m: usize,
    pub r: f64,
}

impl ApEnParams {
    pub fn new(m: usize, r: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("ApEn block size must be at least 1"));
        }
        if !r.is_finite() || r < 0.0 {
            return Err(Error::invalid(format!(
                "ApEn tolerance {r} must be non-negative"
            )));
        }
        Ok(ApEnParams { m, r })
    }

    /// `m = 2`, `r = 0.2 · sd` (sample standard deviation).
    pub fn default_for(series: &SeriesSample) -> Self {
        Self::relative(2, 0.2, series)
    }

    pub fn relative(m: usize, factor: f64, series: &SeriesSample) -> Self {
        ApEnParams {
            m: m.max(1),
            r: factor.abs() * sample_sd(&series.values),
        }
    }
}

fn sample_sd(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    (x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Approximate entropy `Φ_m(r) - Φ_{m+1}(r)`, self-matches included.
///
/// A pair of templates matches at length `m + 1` exactly when it matches at
/// length `m` and the next samples are within `r`, so both counts come out of
/// a single pass over the pairs.
pub fn approximate_entropy(s: &SeriesSample, p: ApEnParams) -> Result<f64> {
    let x = &s.values;
    let n = x.len();
    let m = p.m;
    if n < m + 1 {
        return Err(Error::invalid(format!(
            "series of length {n} is too short for block size {m}"
        )));
    }
    let len_m = n - m + 1;
    let len_m1 = n - m;
    let mut c_m = vec![1u64; len_m];
    let mut c_m1 = vec![1u64; len_m1];
    for i in 0..len_m {
        for j in (i + 1)..len_m {
            if (0..m).all(|k| (x[i + k] - x[j + k]).abs() <= p.r) {
                c_m[i] += 1;
                c_m[j] += 1;
                if j < len_m1 && (x[i + m] - x[j + m]).abs() <= p.r {
                    c_m1[i] += 1;
                    c_m1[j] += 1;
                }
            }
        }
    }
    let phi = |counts: &[u64]| {
        let total = counts.len() as f64;
        counts.iter().map(|&c| (c as f64 / total).ln()).sum::<f64>() / total
    };
    Ok(phi(&c_m) - phi(&c_m1))
}

/// Permutation-entropy parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PermEnParams {
    /// Embedding dimension.
    pub order: usize,
    /// Embedding delay.
    pub delay: usize,
    /// Divide by `log(order!)`.
    pub normalized: bool,
}

impl Default for PermEnParams {
    fn default() -> Self {
        PermEnParams {
            order: 3,
            delay: 1,
            normalized: true,
        }
    }
}

impl PermEnParams {
    pub fn new(order: usize, delay: usize, normalized: bool) -> Result<Self> {
        if order < 2 {
            return Err(Error::invalid("permutation order must be at least 2"));
        }
        if delay < 1 {
            return Err(Error::invalid("permutation delay must be at least 1"));
        }
        Ok(PermEnParams {
            order,
            delay,
            normalized,
        })
    }
}

/// Ordinal pattern of a window: positions sorted by value, equal values
/// ranked by position.
fn ordinal_pattern(window: &[f64]) -> Vec<u8> {
    let mut idx: Vec<u8> = (0..window.len() as u8).collect();
    idx.sort_by(|&a, &b| {
        window[a as usize]
            .total_cmp(&window[b as usize])
            .then(a.cmp(&b))
    });
    idx
}

/// Shannon entropy of the ordinal-pattern distribution.
pub fn permutation_entropy(s: &SeriesSample, p: PermEnParams, base: LogBase) -> Result<f64> {
    let PermEnParams {
        order,
        delay,
        normalized,
    } = PermEnParams::new(p.order, p.delay, p.normalized)?;
    let span = (order - 1) * delay;
    let n = s.values.len();
    if n <= span {
        return Err(Error::invalid(format!(
            "series of length {n} has no windows for order {order}, delay {delay}"
        )));
    }
    let windows = n - span;
    let mut counts: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
    let mut buf = vec![0.0; order];
    for start in 0..windows {
        for (k, slot) in buf.iter_mut().enumerate() {
            *slot = s.values[start + k * delay];
        }
        *counts.entry(ordinal_pattern(&buf)).or_insert(0) += 1;
    }
    let masses: Vec<f64> = counts
        .values()
        .map(|&c| c as f64 / windows as f64)
        .collect();
    let h = entropy_nats(&masses).max(0.0);
    if normalized {
        let ln_fact: f64 = (2..=order).map(|k| (k as f64).ln()).sum();
        Ok(h / ln_fact)
    } else {
        Ok(base.from_nats(h))
    }
}

/// The six reference series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    Constant,
    Step,
    Periodic,
    Ar1,
    NoisyPeriodic,
    RandomWalk,
}

/// Levels of one period of the periodic series: a dwell on the lowest level
/// followed by a climb through the remaining three.
const PERIODIC_LEVELS: [f64; 6] = [1.0, 1.0, 1.0, 2.0, 3.0, 4.0];
const AR_COEFFICIENT: f64 = 0.7;
const AR_NOISE_SD: f64 = 0.1;
const WALK_STEP_SD: f64 = 1.5;

impl SeriesKind {
    pub const ALL: [SeriesKind; 6] = [
        SeriesKind::Constant,
        SeriesKind::Step,
        SeriesKind::Periodic,
        SeriesKind::Ar1,
        SeriesKind::NoisyPeriodic,
        SeriesKind::RandomWalk,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SeriesKind::Constant => "constant",
            SeriesKind::Step => "step",
            SeriesKind::Periodic => "periodic",
            SeriesKind::Ar1 => "ar1",
            SeriesKind::NoisyPeriodic => "noisy_periodic",
            SeriesKind::RandomWalk => "random_walk",
        }
    }

    /// Seed used for the reference table.
    pub fn default_seed(self) -> u64 {
        match self {
            SeriesKind::Ar1 => AR1_SEED,
            SeriesKind::NoisyPeriodic => NOISY_SEED,
            SeriesKind::RandomWalk => WALK_SEED,
            _ => 0,
        }
    }
}

// Picked so that the length-25 series have 6, 8 and 15 distinct values and
// their ApEn and permutation entropy increase in table order.
const AR1_SEED: u64 = 180;
const NOISY_SEED: u64 = 369;
const WALK_SEED: u64 = 392;

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SeriesKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SeriesKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown series kind `{s}`")))
    }
}

fn round_to(x: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    (x * scale).round() / scale
}

/// Deterministic reference series of the given kind.
pub fn generate_series(kind: SeriesKind, length: usize, seed: u64) -> Result<SeriesSample> {
    if length == 0 {
        return Err(Error::invalid("series length must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let periodic = |t: usize| PERIODIC_LEVELS[t % PERIODIC_LEVELS.len()];
    let values: Vec<f64> = match kind {
        SeriesKind::Constant => vec![1.0; length],
        SeriesKind::Step => {
            let block = (length / 2).max(1);
            (0..length).map(|t| ((t / block) % 2) as f64).collect()
        }
        SeriesKind::Periodic => (0..length).map(periodic).collect(),
        SeriesKind::Ar1 => {
            let noise = Normal::new(0.0, AR_NOISE_SD).expect("valid normal");
            let mut x = 0.0;
            (0..length)
                .map(|_| {
                    x = AR_COEFFICIENT * x + noise.sample(&mut rng);
                    round_to(x, 1)
                })
                .collect()
        }
        SeriesKind::NoisyPeriodic => (0..length)
            .map(|t| 2.0 * periodic(t) + rng.random::<f64>().round())
            .collect(),
        SeriesKind::RandomWalk => {
            let step = Normal::new(0.0, WALK_STEP_SD).expect("valid normal");
            let mut x = 0.0;
            (0..length)
                .map(|t| {
                    if t > 0 {
                        x += step.sample(&mut rng).round();
                    }
                    x
                })
                .collect()
        }
    };
    let mut s = SeriesSample::new(kind.name(), values)?;
    s.seed = match kind {
        SeriesKind::Ar1 | SeriesKind::NoisyPeriodic | SeriesKind::RandomWalk => Some(seed),
        _ => None,
    };
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityReport {
    pub series: String,
    pub apen: f64,
    pub pe: f64,
    pub extropy_rate: f64,
    pub distinct_values: usize,
}

/// ApEn, permutation entropy and the extropy-rate estimate of the series
/// rounded to `decimals` places.
pub fn complexity_report(
    s: &SeriesSample,
    apen: ApEnParams,
    pe: PermEnParams,
    base: LogBase,
    decimals: u32,
) -> Result<ComplexityReport> {
    let codes = s.rounded_codes(decimals);
    let rate: RateEstimate = sequence_extropy_rate(&codes, base)?;
    Ok(ComplexityReport {
        series: s.name.clone(),
        apen: approximate_entropy(s, apen)?,
        pe: permutation_entropy(s, pe, base)?,
        extropy_rate: rate.value,
        distinct_values: rate.support,
    })
}

/// Report rows for the six reference series with their default seeds.
pub fn reference_table(length: usize, base: LogBase) -> Result<Vec<ComplexityReport>> {
    SeriesKind::ALL
        .iter()
        .map(|&kind| {
            let s = generate_series(kind, length, kind.default_seed())?;
            complexity_report(
                &s,
                ApEnParams::default_for(&s),
                PermEnParams::default(),
                base,
                DEFAULT_ROUND_DECIMALS,
            )
        })
        .collect()
}
