use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Per-class random split. Each class with `n_c` samples sends
/// `round(n_c * test_fraction)` of them to the test set, clamped so both
/// sides keep at least one. Returns sorted `(train, test)` row indices.
pub fn stratified_split(
    y: &[u32],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::invalid(format!(
            "test fraction must be in (0, 1), got {test_fraction}"
        )));
    }
    if y.is_empty() {
        return Err(Error::invalid("no samples to split"));
    }
    let mut by_class: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, &c) in y.iter().enumerate() {
        by_class.entry(c).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (class, mut rows) in by_class {
        let n_c = rows.len();
        if n_c < 2 {
            return Err(Error::invalid(format!(
                "class {class} has {n_c} sample; stratified split needs at least 2"
            )));
        }
        let n_test = ((n_c as f64 * test_fraction).round() as usize).clamp(1, n_c - 1);
        rows.shuffle(&mut rng);
        test.extend_from_slice(&rows[..n_test]);
        train.extend_from_slice(&rows[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}
