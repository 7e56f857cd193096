use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::data::FeatureKind;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
    /// Features tried per split; `None` means `ceil(sqrt(d))`.
    pub features_per_split: Option<usize>,
    /// Tree `t` is grown from seed `seed + t`.
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 50,
            max_depth: 10,
            min_samples_split: 2,
            features_per_split: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Test {
    /// Left when `x <= t`.
    AtMost(f64),
    /// Left when `x == v`.
    Equals(f64),
}

impl Test {
    fn goes_left(self, x: f64) -> bool {
        match self {
            Test::AtMost(t) => x <= t,
            Test::Equals(v) => x == v,
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf(u32),
    Split {
        feature: usize,
        test: Test,
        left: usize,
        right: usize,
    },
}

/// A CART classification tree using Gini impurity.
#[derive(Debug, Clone)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    pub fn predict_one(&self, row: impl Fn(usize) -> f64) -> u32 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf(c) => return c,
                Node::Split {
                    feature,
                    test,
                    left,
                    right,
                } => {
                    at = if test.goes_left(row(feature)) {
                        left
                    } else {
                        right
                    }
                }
            }
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }
}

/// Weighted Gini impurity times node size: `n - sum(c^2) / n`.
fn gini_mass(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let sq: u64 = counts.iter().map(|c| c * c).sum();
    n as f64 - sq as f64 / n as f64
}

fn majority(counts: &[u64]) -> u32 {
    // first maximum, i.e. the smallest label on ties
    let mut best = 0;
    for (c, &v) in counts.iter().enumerate() {
        if v > counts[best] {
            best = c;
        }
    }
    best as u32
}

struct Grower<'a, R: Rng> {
    x: &'a [Vec<f64>],
    kinds: &'a [FeatureKind],
    y: &'a [u32],
    n_classes: usize,
    params: &'a ForestParams,
    mtry: usize,
    rng: R,
    nodes: Vec<Node>,
}

impl<R: Rng> Grower<'_, R> {
    fn counts(&self, idx: &[usize]) -> Vec<u64> {
        let mut c = vec![0u64; self.n_classes];
        for &i in idx {
            c[self.y[i] as usize] += 1;
        }
        c
    }

    fn best_split(&mut self, idx: &[usize], parent: &[u64]) -> Option<(usize, Test)> {
        let d = self.x.len();
        let features = rand::seq::index::sample(&mut self.rng, d, self.mtry).into_vec();
        let mut best: Option<(f64, usize, Test)> = None;
        let mut consider = |score: f64, f: usize, t: Test| {
            if best.is_none_or(|(s, _, _)| score < s) {
                best = Some((score, f, t));
            }
        };
        for f in features {
            let col = &self.x[f];
            match self.kinds[f] {
                FeatureKind::Real => {
                    let mut pairs: Vec<(f64, u32)> =
                        idx.iter().map(|&i| (col[i], self.y[i])).collect();
                    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
                    let mut left = vec![0u64; self.n_classes];
                    let mut right = parent.to_vec();
                    for w in 0..pairs.len() - 1 {
                        let c = pairs[w].1 as usize;
                        left[c] += 1;
                        right[c] -= 1;
                        let (a, b) = (pairs[w].0, pairs[w + 1].0);
                        if a < b {
                            let mid = a + (b - a) / 2.0;
                            let t = if mid < b { mid } else { a };
                            consider(gini_mass(&left) + gini_mass(&right), f, Test::AtMost(t));
                        }
                    }
                }
                FeatureKind::Categorical => {
                    let mut values: Vec<f64> = idx.iter().map(|&i| col[i]).collect();
                    values.sort_by(f64::total_cmp);
                    values.dedup();
                    if values.len() < 2 {
                        continue;
                    }
                    for v in values {
                        let mut left = vec![0u64; self.n_classes];
                        for &i in idx {
                            if col[i] == v {
                                left[self.y[i] as usize] += 1;
                            }
                        }
                        let right: Vec<u64> =
                            parent.iter().zip(&left).map(|(p, l)| p - l).collect();
                        consider(gini_mass(&left) + gini_mass(&right), f, Test::Equals(v));
                    }
                }
            }
        }
        let (score, f, t) = best?;
        (score < gini_mass(parent) - 1e-12).then_some((f, t))
    }

    fn grow(&mut self, idx: &mut [usize], depth: usize) -> usize {
        let counts = self.counts(idx);
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf(majority(&counts)));
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || depth >= self.params.max_depth || idx.len() < self.params.min_samples_split {
            return id;
        }
        let Some((feature, test)) = self.best_split(idx, &counts) else {
            return id;
        };
        let col = &self.x[feature];
        let mut split = 0;
        for k in 0..idx.len() {
            if test.goes_left(col[idx[k]]) {
                idx.swap(split, k);
                split += 1;
            }
        }
        let (l, r) = idx.split_at_mut(split);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split {
            feature,
            test,
            left,
            right,
        };
        id
    }
}

/// Bagged ensemble of CART trees with per-split feature subsampling.
#[derive(Debug, Clone)]
pub struct RandomForest {
    trees: Vec<Tree>,
    n_classes: usize,
    n_features: usize,
}

fn check_columns(x: &[Vec<f64>], rows: usize) -> Result<()> {
    if x.is_empty() {
        return Err(Error::invalid("no feature columns"));
    }
    if let Some(i) = x.iter().position(|c| c.len() != rows) {
        return Err(Error::invalid(format!(
            "feature column {i} has {} rows, expected {rows}",
            x[i].len()
        )));
    }
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::invalid("feature values must be finite"));
    }
    Ok(())
}

impl RandomForest {
    /// Trains on column-major features `x` and labels `y`.
    pub fn fit(
        x: &[Vec<f64>],
        kinds: &[FeatureKind],
        y: &[u32],
        params: &ForestParams,
    ) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::invalid("no training samples"));
        }
        check_columns(x, y.len())?;
        if kinds.len() != x.len() {
            return Err(Error::invalid("one feature kind per column required"));
        }
        if params.n_trees == 0 || params.max_depth == 0 {
            return Err(Error::invalid("forest needs at least one tree of depth 1"));
        }
        let d = x.len();
        let mtry = params
            .features_per_split
            .unwrap_or_else(|| (d as f64).sqrt().ceil() as usize)
            .clamp(1, d);
        let n_classes = *y.iter().max().expect("non-empty") as usize + 1;
        if y.iter().all(|&c| c == y[0]) {
            return Err(Error::invalid("training labels contain a single class"));
        }
        let n = y.len();
        let trees = (0..params.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(t as u64));
                let mut idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                let mut g = Grower {
                    x,
                    kinds,
                    y,
                    n_classes,
                    params,
                    mtry,
                    rng,
                    nodes: Vec::new(),
                };
                g.grow(&mut idx, 0);
                Tree { nodes: g.nodes }
            })
            .collect();
        Ok(RandomForest {
            trees,
            n_classes,
            n_features: d,
        })
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    /// Majority vote over trees; ties go to the smallest label.
    pub fn predict(&self, x: &[Vec<f64>]) -> Result<Vec<u32>> {
        let rows = x.first().map_or(0, Vec::len);
        check_columns(x, rows)?;
        if x.len() != self.n_features {
            return Err(Error::invalid(format!(
                "forest was trained on {} features, got {}",
                self.n_features,
                x.len()
            )));
        }
        Ok((0..rows)
            .map(|r| {
                let mut votes = vec![0u64; self.n_classes];
                for t in &self.trees {
                    let c = t.predict_one(|f| x[f][r]);
                    votes[c as usize] += 1;
                }
                majority(&votes)
            })
            .collect())
    }
}
