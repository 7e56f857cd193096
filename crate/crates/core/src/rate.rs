//! Entropy and extropy rates of finite discrete processes.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::base::LogBase;
use crate::dist::{JointPmf, Pmf};
use crate::error::{Error, Result};
use crate::info::{complement_xlnx, entropy_nats, extropy_nats};

/// Above this many joint states the `(1-P)log(1-P)/(m^n - 1)` correction of
/// the sequence estimator is dropped.
pub const CORRECTION_CUTOFF: f64 = 1e15;

/// A rate value with the quantities it was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateEstimate {
    /// Log-base units per step.
    pub value: f64,
    /// Process length.
    pub n: usize,
    /// Positive-probability joint states. For [`sequence_extropy_rate`] this
    /// is the number of distinct observed values per step.
    pub support: usize,
    pub base: LogBase,
}

/// A finite process given either by independent per-step marginals or by an
/// explicit joint table.
#[derive(Debug, Clone)]
pub enum ProcessSpec {
    Independent(Vec<Pmf>),
    Joint(JointPmf),
}

impl ProcessSpec {
    pub fn len(&self) -> usize {
        match self {
            ProcessSpec::Independent(steps) => steps.len(),
            ProcessSpec::Joint(j) => j.arity(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn joint(&self) -> Result<JointPmf> {
        match self {
            ProcessSpec::Independent(steps) => JointPmf::product(steps),
            ProcessSpec::Joint(j) => Ok(j.clone()),
        }
    }

    pub fn extropy_rate(&self, base: LogBase) -> Result<RateEstimate> {
        finite_extropy_rate(&self.joint()?, self.len(), base)
    }

    pub fn entropy_rate(&self, base: LogBase) -> Result<RateEstimate> {
        finite_entropy_rate(&self.joint()?, self.len(), base)
    }
}

fn check_length(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("process length must be at least 1"));
    }
    Ok(())
}

/// `(log(S-1) + J/(S-1)) / n`, zero when `S = 1`.
fn extropy_rate_from_masses(masses: &[f64], n: usize, base: LogBase) -> RateEstimate {
    let support = masses.iter().filter(|&&p| p > 0.0).count();
    let value = if support <= 1 {
        0.0
    } else {
        let s1 = (support - 1) as f64;
        base.from_nats(s1.ln() + extropy_nats(masses) / s1) / n as f64
    };
    RateEstimate {
        value,
        n,
        support,
        base,
    }
}

/// Finite-process extropy rate of a joint table over `n` variables.
pub fn finite_extropy_rate(j: &JointPmf, n: usize, base: LogBase) -> Result<RateEstimate> {
    check_length(n)?;
    Ok(extropy_rate_from_masses(&j.masses(), n, base))
}

/// `H(X_1..X_n) / n`.
pub fn finite_entropy_rate(j: &JointPmf, n: usize, base: LogBase) -> Result<RateEstimate> {
    check_length(n)?;
    Ok(RateEstimate {
        value: base.from_nats(entropy_nats(&j.masses())).max(0.0) / n as f64,
        n,
        support: j.support(),
        base,
    })
}

/// Extropy (nats) of the uniform distribution over `S = exp(ln_s)` states:
/// `(S - 1) log(S / (S - 1))`, evaluated without forming `S`.
fn uniform_extropy_nats(ln_s: f64) -> f64 {
    let inv = (-ln_s).exp();
    if inv == 0.0 {
        return 1.0;
    }
    (1.0 - inv) * (-(-inv).ln_1p() / inv)
}

fn check_support(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::invalid("support per step must be at least 2"));
    }
    Ok(())
}

/// `J(uniform over k^n) / n` for `n = 1..=n_max`.
pub fn naive_rate_sequence(k: usize, n_max: usize, base: LogBase) -> Result<Vec<f64>> {
    check_support(k)?;
    let ln_k = (k as f64).ln();
    Ok((1..=n_max)
        .map(|n| base.from_nats(uniform_extropy_nats(n as f64 * ln_k)) / n as f64)
        .collect())
}

/// Distance of the IID-uniform finite extropy rate from `log k`:
/// `(1/n) log(k^n - 1) + J_uniform / (n (k^n - 1)) - log k`.
pub fn iid_rate_limit_check(k: usize, n: usize, base: LogBase) -> Result<f64> {
    check_support(k)?;
    check_length(n)?;
    let ln_k = (k as f64).ln();
    let ln_s = n as f64 * ln_k;
    let inv = (-ln_s).exp();
    let ln_s_minus_1 = ln_s + (-inv).ln_1p();
    let s_minus_1 = ln_s.exp_m1();
    let tail = if s_minus_1.is_finite() {
        uniform_extropy_nats(ln_s) / (n as f64 * s_minus_1)
    } else {
        0.0
    };
    Ok(base.from_nats(ln_s_minus_1 / n as f64 + tail - ln_k))
}

/// Extropy-rate estimate of a categorical sequence treated as independent
/// draws from its empirical marginal.
///
/// With `n` observations, `m` distinct values and `P = Π_j a_j / n` (the
/// product of each observation's relative frequency), the estimate is
/// `(1/n) (log(m^n - 1) - (1-P) log(1-P) / (m^n - 1))`.
pub fn sequence_extropy_rate<T: Ord>(series: &[T], base: LogBase) -> Result<RateEstimate> {
    let n = series.len();
    if n == 0 {
        return Err(Error::invalid("empty series"));
    }
    let mut counts: BTreeMap<&T, usize> = BTreeMap::new();
    for v in series {
        *counts.entry(v).or_insert(0) += 1;
    }
    let m = counts.len();
    if m == 1 {
        return Ok(RateEstimate {
            value: 0.0,
            n,
            support: 1,
            base,
        });
    }
    let nf = n as f64;
    let ln_states = nf * (m as f64).ln();
    let ln_states_minus_1 = ln_states + (-(-ln_states).exp()).ln_1p();
    let correction = if ln_states > CORRECTION_CUTOFF.ln() {
        0.0
    } else {
        // each distinct value contributes a * ln(a / n)
        let ln_p: f64 = counts
            .values()
            .map(|&a| a as f64 * (a as f64 / nf).ln())
            .sum();
        complement_xlnx(ln_p.exp()) / ln_states.exp_m1()
    };
    Ok(RateEstimate {
        value: base.from_nats(ln_states_minus_1 - correction) / nf,
        n,
        support: m,
        base,
    })
}

/// Group counts of the row partition induced by each prefix of columns.
fn prefix_partitions<C: AsRef<[u32]>>(columns: &[C]) -> Result<Vec<Vec<u64>>> {
    let Some(first) = columns.first() else {
        return Err(Error::invalid("no columns"));
    };
    let rows = first.as_ref().len();
    if rows == 0 {
        return Err(Error::invalid("columns have no rows"));
    }
    if let Some(i) = columns.iter().position(|c| c.as_ref().len() != rows) {
        return Err(Error::invalid(format!(
            "column {i} has {} rows, expected {rows}",
            columns[i].as_ref().len()
        )));
    }
    let mut group = vec![0usize; rows];
    let mut out = Vec::with_capacity(columns.len());
    for col in columns {
        let mut ids: HashMap<(usize, u32), usize> = HashMap::new();
        let mut counts: Vec<u64> = Vec::new();
        for (g, &code) in group.iter_mut().zip(col.as_ref()) {
            let next = ids.len();
            let id = *ids.entry((*g, code)).or_insert(next);
            if id == counts.len() {
                counts.push(0);
            }
            counts[id] += 1;
            *g = id;
        }
        out.push(counts);
    }
    Ok(out)
}

fn masses_from_counts(counts: &[u64]) -> Vec<f64> {
    let total: u64 = counts.iter().sum();
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}

/// Finite extropy rate of the empirical joint of the first `j` columns, for
/// every `j`. Each distinct row tuple has mass `count / rows`.
pub fn prefix_rate_profile<C: AsRef<[u32]>>(
    columns: &[C],
    base: LogBase,
) -> Result<Vec<RateEstimate>> {
    Ok(prefix_partitions(columns)?
        .iter()
        .enumerate()
        .map(|(i, counts)| extropy_rate_from_masses(&masses_from_counts(counts), i + 1, base))
        .collect())
}

/// Entropy-rate counterpart of [`prefix_rate_profile`].
pub fn prefix_entropy_profile<C: AsRef<[u32]>>(
    columns: &[C],
    base: LogBase,
) -> Result<Vec<RateEstimate>> {
    Ok(prefix_partitions(columns)?
        .iter()
        .enumerate()
        .map(|(i, counts)| RateEstimate {
            value: base
                .from_nats(entropy_nats(&masses_from_counts(counts)))
                .max(0.0)
                / (i + 1) as f64,
            n: i + 1,
            support: counts.len(),
            base,
        })
        .collect())
}

/// Lipschitz constant of extropy on distributions with every mass below `r`.
pub fn extropy_lipschitz_constant(r: f64) -> f64 {
    1.0 + (1.0 / ((1.0 - r) * (1.0 - r)) - 1.0 - 2.0 * r).abs()
}

/// Lipschitz constant of the finite extropy rate at fixed `n` and support `s`.
pub fn rate_lipschitz_constant(r: f64, n: usize, s: usize) -> f64 {
    extropy_lipschitz_constant(r) / (n as f64 * (s as f64 - 1.0))
}
