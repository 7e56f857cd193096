//! Seeded synthetic classification data.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::{Column, Dataset};
use crate::error::Result;

pub const DEFAULT_ROWS: usize = 500;
pub const DEFAULT_SEED: u64 = 2024;

/// Column layout of [`selection_benchmark`], target last.
pub const BENCHMARK_COLUMNS: [&str; 9] = ["x1", "n1", "x2", "n2", "x3", "n3", "n4", "c", "y"];

/// Indices of the informative features among the non-target columns.
pub const INFORMATIVE: [usize; 3] = [0, 2, 4];

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

/// Three informative standard-normal features `x1..x3`, four independent
/// noise features `n1..n4`, a constant `c`, and the binary target
/// `y = 1{x1 + x2 + x3 + e > 0}` with `e ~ N(0, 0.5^2)`. Values are rounded
/// to four decimals.
pub fn selection_benchmark(rows: usize, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<Vec<f64>> = (0..8).map(|_| Vec::with_capacity(rows)).collect();
    let mut y = Vec::with_capacity(rows);
    for _ in 0..rows {
        let mut draw = || -> f64 { round4(StandardNormal.sample(&mut rng)) };
        let (x1, n1, x2, n2, x3, n3, n4) = (draw(), draw(), draw(), draw(), draw(), draw(), draw());
        let e: f64 = StandardNormal.sample(&mut rng);
        for (c, v) in cols.iter_mut().zip([x1, n1, x2, n2, x3, n3, n4, 1.0]) {
            c.push(v);
        }
        y.push(i64::from(x1 + x2 + x3 + 0.5 * e > 0.0));
    }
    let mut columns: Vec<Column> = cols.into_iter().map(Column::Real).collect();
    columns.push(Column::Integer(y));
    Dataset::new(
        BENCHMARK_COLUMNS.iter().map(|s| s.to_string()).collect(),
        columns,
    )
}
