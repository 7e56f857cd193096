//! Feature scoring and top-k selection.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::base::LogBase;
use crate::dist::JointPmf;
use crate::error::{Error, Result};
use crate::info::entropy_nats;
use crate::rate::{prefix_rate_profile, RateEstimate};

/// Named columns of non-negative category codes, all of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    names: Vec<String>,
    columns: Vec<Vec<u32>>,
    n_rows: usize,
}

impl FeatureMatrix {
    pub fn new(names: Vec<String>, columns: Vec<Vec<u32>>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::invalid("feature matrix has no columns"));
        }
        if names.len() != columns.len() {
            return Err(Error::invalid(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(Error::invalid(format!("duplicate feature name `{dup}`")));
        }
        let n_rows = columns[0].len();
        if n_rows == 0 {
            return Err(Error::invalid("feature matrix has no rows"));
        }
        if let Some(i) = columns.iter().position(|c| c.len() != n_rows) {
            return Err(Error::invalid(format!(
                "feature `{}` has {} rows, expected {n_rows}",
                names[i],
                columns[i].len()
            )));
        }
        Ok(FeatureMatrix {
            names,
            columns,
            n_rows,
        })
    }

    /// Unnamed columns get `f0, f1, ...`.
    pub fn from_columns(columns: Vec<Vec<u32>>) -> Result<Self> {
        let names = (0..columns.len()).map(|i| format!("f{i}")).collect();
        Self::new(names, columns)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn columns(&self) -> &[Vec<u32>] {
        &self.columns
    }

    pub fn column(&self, i: usize) -> &[u32] {
        &self.columns[i]
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    /// Restriction to the given rows, in the given order.
    pub fn rows(&self, rows: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            names: self.names.clone(),
            columns: self
                .columns
                .iter()
                .map(|c| rows.iter().map(|&r| c[r]).collect())
                .collect(),
            n_rows: rows.len(),
        }
    }
}

/// Empirical joint distribution of the chosen columns.
pub fn empirical_joint(m: &FeatureMatrix, cols: &[usize]) -> Result<JointPmf> {
    if cols.is_empty() {
        return Err(Error::invalid("no columns selected"));
    }
    if let Some(&c) = cols.iter().find(|&&c| c >= m.n_features()) {
        return Err(Error::invalid(format!("column {c} out of range")));
    }
    let mut counts: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    for r in 0..m.n_rows() {
        let key = cols.iter().map(|&c| m.columns[c][r] as usize).collect();
        *counts.entry(key).or_insert(0) += 1;
    }
    JointPmf::from_counts(counts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Extropy,
    Mi,
    Chi2,
    Fscore,
    Random,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Extropy,
        Method::Mi,
        Method::Chi2,
        Method::Fscore,
        Method::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Extropy => "extropy",
            Method::Mi => "mi",
            Method::Chi2 => "chi2",
            Method::Fscore => "fscore",
            Method::Random => "random",
        }
    }

    pub fn needs_target(self) -> bool {
        matches!(self, Method::Mi | Method::Chi2 | Method::Fscore)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionResult {
    pub method: Method,
    pub k: usize,
    /// Selected column indices, best first.
    pub selected: Vec<usize>,
    /// One score per column; empty for random selection.
    pub scores: Vec<f64>,
    /// Extropy rate of each column prefix; only for [`Method::Extropy`].
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub prefix_rates: Vec<RateEstimate>,
}

/// Indices of the `k` largest scores, ties broken towards the lower index.
pub fn top_k(scores: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.truncate(k);
    order
}

fn check_k(m: &FeatureMatrix, k: usize) -> Result<()> {
    if k == 0 || k > m.n_features() {
        return Err(Error::invalid(format!(
            "k must be in 1..={}, got {k}",
            m.n_features()
        )));
    }
    Ok(())
}

/// Unsupervised selection: column `j` is scored by the finite extropy rate
/// of the empirical joint of columns `0..=j`, and the `k` best are kept.
pub fn select_features_extropy(
    m: &FeatureMatrix,
    k: usize,
    base: LogBase,
) -> Result<SelectionResult> {
    check_k(m, k)?;
    let prefix_rates = prefix_rate_profile(m.columns(), base)?;
    let scores: Vec<f64> = prefix_rates.iter().map(|r| r.value).collect();
    Ok(SelectionResult {
        method: Method::Extropy,
        k,
        selected: top_k(&scores, k),
        scores,
        prefix_rates,
    })
}

/// `k` distinct columns drawn uniformly at random.
pub fn select_random(m: &FeatureMatrix, k: usize, seed: u64) -> Result<SelectionResult> {
    check_k(m, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(SelectionResult {
        method: Method::Random,
        k,
        selected: rand::seq::index::sample(&mut rng, m.n_features(), k).into_vec(),
        scores: Vec::new(),
        prefix_rates: Vec::new(),
    })
}

fn check_pair(len_a: usize, len_b: usize) -> Result<()> {
    if len_a == 0 {
        return Err(Error::invalid("empty input"));
    }
    if len_a != len_b {
        return Err(Error::invalid(format!(
            "feature has {len_a} rows, target has {len_b}"
        )));
    }
    Ok(())
}

fn count_entropy<K: std::hash::Hash + Eq>(keys: impl Iterator<Item = K>, n: f64) -> f64 {
    let mut counts: HashMap<K, u64> = HashMap::new();
    for k in keys {
        *counts.entry(k).or_insert(0) += 1;
    }
    let masses: Vec<f64> = counts.values().map(|&c| c as f64 / n).collect();
    entropy_nats(&masses)
}

/// Plug-in mutual information `H(F) + H(T) - H(F, T)`, clamped at zero.
pub fn mutual_information_score(feature: &[u32], target: &[u32], base: LogBase) -> Result<f64> {
    check_pair(feature.len(), target.len())?;
    let n = feature.len() as f64;
    let hf = count_entropy(feature.iter(), n);
    let ht = count_entropy(target.iter(), n);
    let hft = count_entropy(feature.iter().zip(target), n);
    Ok(base.from_nats((hf + ht - hft).max(0.0)))
}

/// Pearson chi-square statistic of the feature/target contingency table over
/// observed values.
pub fn chi_square_score(feature: &[u32], target: &[u32]) -> Result<f64> {
    check_pair(feature.len(), target.len())?;
    let mut table: HashMap<(u32, u32), u64> = HashMap::new();
    let mut rows: BTreeMap<u32, u64> = BTreeMap::new();
    let mut cols: BTreeMap<u32, u64> = BTreeMap::new();
    for (&f, &t) in feature.iter().zip(target) {
        *table.entry((f, t)).or_insert(0) += 1;
        *rows.entry(f).or_insert(0) += 1;
        *cols.entry(t).or_insert(0) += 1;
    }
    let n = feature.len() as f64;
    let mut chi2 = 0.0;
    for (&f, &rf) in &rows {
        for (&t, &ct) in &cols {
            let expected = rf as f64 * ct as f64 / n;
            let observed = table.get(&(f, t)).copied().unwrap_or(0) as f64;
            chi2 += (observed - expected).powi(2) / expected;
        }
    }
    Ok(chi2)
}

/// One-way ANOVA F statistic of a real feature across target classes.
/// Zero when the class means coincide, infinite when classes differ but
/// have no within-class spread.
pub fn anova_f_score(feature: &[f64], target: &[u32]) -> Result<f64> {
    check_pair(feature.len(), target.len())?;
    if feature.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("feature has non-finite values"));
    }
    let mut groups: BTreeMap<u32, (f64, usize)> = BTreeMap::new();
    for (&x, &t) in feature.iter().zip(target) {
        let g = groups.entry(t).or_insert((0.0, 0));
        g.0 += x;
        g.1 += 1;
    }
    let c = groups.len();
    let n = feature.len();
    if c < 2 {
        return Err(Error::invalid("F-score needs at least two classes"));
    }
    if n <= c {
        return Err(Error::invalid("F-score needs more samples than classes"));
    }
    let grand = feature.iter().sum::<f64>() / n as f64;
    let means: BTreeMap<u32, f64> = groups
        .iter()
        .map(|(&t, &(s, k))| (t, s / k as f64))
        .collect();
    let ssb: f64 = groups
        .iter()
        .map(|(t, &(_, k))| k as f64 * (means[t] - grand).powi(2))
        .sum();
    let ssw: f64 = feature
        .iter()
        .zip(target)
        .map(|(&x, t)| (x - means[t]).powi(2))
        .sum();
    if ssb == 0.0 {
        return Ok(0.0);
    }
    if ssw == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((ssb / (c - 1) as f64) / (ssw / (n - c) as f64))
}

/// Scores every column and keeps the best `k`. `raw` holds the real values
/// used by [`Method::Fscore`]; codes are used when it is absent. `seed` only
/// affects [`Method::Random`].
#[allow(clippy::too_many_arguments)]
pub fn rank_features(
    m: &FeatureMatrix,
    raw: Option<&[Vec<f64>]>,
    target: Option<&[u32]>,
    method: Method,
    k: usize,
    base: LogBase,
    seed: u64,
) -> Result<SelectionResult> {
    match method {
        Method::Extropy => return select_features_extropy(m, k, base),
        Method::Random => return select_random(m, k, seed),
        _ => {}
    }
    check_k(m, k)?;
    let target =
        target.ok_or_else(|| Error::invalid(format!("method `{method}` needs a target column")))?;
    if let Some(raw) = raw {
        if raw.len() != m.n_features() {
            return Err(Error::invalid("raw values do not match the feature matrix"));
        }
    }
    let scores = (0..m.n_features())
        .into_par_iter()
        .map(|j| {
            let codes = m.column(j);
            match method {
                Method::Mi => mutual_information_score(codes, target, base),
                Method::Chi2 => chi_square_score(codes, target),
                _ => match raw {
                    Some(raw) => anova_f_score(&raw[j], target),
                    None => {
                        let v: Vec<f64> = codes.iter().map(|&c| c as f64).collect();
                        anova_f_score(&v, target)
                    }
                },
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(SelectionResult {
        method,
        k,
        selected: top_k(&scores, k),
        scores,
        prefix_rates: Vec::new(),
    })
}
