use serde::Serialize;

use crate::error::{Error, Result};

/// Binary classification summary with its confusion counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub f1: f64,
    pub tpr: f64,
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl Metrics {
    /// Ratios from counts; an undefined ratio is reported as 0.
    pub fn from_counts(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        Metrics {
            accuracy: ratio(tp + tn, tp + fp + fn_ + tn),
            f1: ratio(2 * tp, 2 * tp + fp + fn_),
            tpr: ratio(tp, tp + fn_),
            tp,
            fp,
            fn_,
            tn,
        }
    }
}

/// Metrics with `positive` as the positive class and every other label as
/// negative. Accuracy counts exact label matches.
pub fn classification_metrics(y_true: &[u32], y_pred: &[u32], positive: u32) -> Result<Metrics> {
    if y_true.len() != y_pred.len() {
        return Err(Error::invalid(format!(
            "{} labels but {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    if y_true.is_empty() {
        return Err(Error::invalid("no predictions to score"));
    }
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    let mut correct = 0u64;
    for (&t, &p) in y_true.iter().zip(y_pred) {
        correct += u64::from(t == p);
        match (t == positive, p == positive) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    let mut m = Metrics::from_counts(tp, fp, fn_, tn);
    m.accuracy = ratio(correct, y_true.len() as u64);
    Ok(m)
}
