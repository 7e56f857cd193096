//! Train/test evaluation of feature subsets with a random forest.

mod forest;
mod metrics;
mod split;

pub use forest::{ForestParams, RandomForest, Tree};
pub use metrics::{classification_metrics, Metrics};
pub use split::stratified_split;

use serde::Serialize;

use crate::base::LogBase;
use crate::data::Prepared;
use crate::error::{Error, Result};
use crate::selection::{rank_features, Method};

pub const DEFAULT_TEST_FRACTION: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalConfig {
    pub k: usize,
    pub methods: Vec<Method>,
    /// Drives the split, random selection and the forest.
    pub seed: u64,
    pub test_fraction: f64,
    pub forest: ForestParams,
    pub base: LogBase,
    /// Label of the positive class; the last class label when absent.
    pub positive: Option<String>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            k: 3,
            methods: vec![Method::Extropy],
            seed: 0,
            test_fraction: DEFAULT_TEST_FRACTION,
            forest: ForestParams::default(),
            base: LogBase::Two,
            positive: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodEvaluation {
    pub method: Method,
    pub k: usize,
    pub seed: u64,
    pub selected: Vec<usize>,
    pub selected_names: Vec<String>,
    #[serde(flatten)]
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub n_train: usize,
    pub n_test: usize,
    pub positive_class: String,
    pub results: Vec<MethodEvaluation>,
}

fn columns(raw: &[Vec<f64>], selected: &[usize]) -> Vec<Vec<f64>> {
    selected.iter().map(|&j| raw[j].clone()).collect()
}

/// Splits the data, selects `k` features per method on the training rows,
/// fits a forest on them and scores it on the test rows.
pub fn evaluate(prepared: &Prepared, cfg: &EvalConfig) -> Result<Evaluation> {
    let target = prepared
        .target
        .as_ref()
        .ok_or_else(|| Error::invalid("evaluation needs a target column"))?;
    if target.n_classes() < 2 {
        return Err(Error::invalid("target has a single class"));
    }
    if cfg.methods.is_empty() {
        return Err(Error::invalid("no selection methods given"));
    }
    let positive = match &cfg.positive {
        Some(label) => target.code_of(label)?,
        None => (target.n_classes() - 1) as u32,
    };
    let (train_rows, test_rows) = stratified_split(&target.codes, cfg.test_fraction, cfg.seed)?;
    let train = prepared.rows(&train_rows);
    let test = prepared.rows(&test_rows);
    let y_train = &train.target.as_ref().expect("target kept").codes;
    let y_test = &test.target.as_ref().expect("target kept").codes;
    let forest = ForestParams {
        seed: cfg.seed,
        ..cfg.forest
    };

    let mut results = Vec::with_capacity(cfg.methods.len());
    for &method in &cfg.methods {
        let sel = rank_features(
            &train.features,
            Some(&train.raw),
            Some(y_train),
            method,
            cfg.k,
            cfg.base,
            cfg.seed,
        )?;
        let kinds: Vec<_> = sel.selected.iter().map(|&j| prepared.kinds[j]).collect();
        let model = RandomForest::fit(
            &columns(&train.raw, &sel.selected),
            &kinds,
            y_train,
            &forest,
        )?;
        let predicted = model.predict(&columns(&test.raw, &sel.selected))?;
        results.push(MethodEvaluation {
            method,
            k: cfg.k,
            seed: cfg.seed,
            selected_names: sel
                .selected
                .iter()
                .map(|&j| prepared.features.names()[j].clone())
                .collect(),
            selected: sel.selected,
            metrics: classification_metrics(y_test, &predicted, positive)?,
        });
    }
    Ok(Evaluation {
        n_train: train_rows.len(),
        n_test: test_rows.len(),
        positive_class: target.labels[positive as usize].clone(),
        results,
    })
}
