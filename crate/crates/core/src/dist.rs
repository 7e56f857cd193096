//! Discrete probability mass functions and sparse joint tables.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

/// Allowed deviation of `Σ p` from 1.
pub const SUM_TOLERANCE: f64 = 1e-9;

fn check_masses(masses: &[f64]) -> Result<()> {
    if masses.is_empty() {
        return Err(Error::InvalidDistribution("no masses".into()));
    }
    for (i, &p) in masses.iter().enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidDistribution(format!("mass {i} is {p}")));
        }
    }
    let total: f64 = masses.iter().sum();
    if (total - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::InvalidDistribution(format!(
            "masses sum to {total}, expected 1"
        )));
    }
    Ok(())
}

/// A finite probability mass function.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    masses: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl Pmf {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        check_masses(&masses)?;
        Ok(Pmf {
            masses,
            labels: None,
        })
    }

    /// Builds a pmf from non-negative weights, dividing by their total.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution(
                "weights must be finite and non-negative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        Pmf::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        Ok(Pmf {
            masses: vec![1.0 / m as f64; m],
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.masses.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} labels for {} masses",
                labels.len(),
                self.masses.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::InvalidDistribution(format!(
                "duplicate label `{dup}`"
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// Number of strictly positive masses.
    pub fn support_size(&self) -> usize {
        self.masses.iter().filter(|&&p| p > 0.0).count()
    }
}

/// Probability table over index tuples, stored sparsely.
///
/// Only strictly positive entries are kept; `support_sizes` records the dense
/// number of categories on each axis.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    entries: BTreeMap<Vec<usize>, f64>,
    support_sizes: Vec<usize>,
}

impl JointPmf {
    /// Builds a table from `(tuple, probability)` pairs. Axis sizes are taken
    /// as one past the largest index seen on each axis, zero entries included.
    pub fn new<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let entries: Vec<_> = entries.into_iter().collect();
        let arity = entries
            .first()
            .map(|(t, _)| t.len())
            .ok_or_else(|| Error::InvalidDistribution("empty joint table".into()))?;
        let mut sizes = vec![0usize; arity];
        for (tuple, _) in &entries {
            if tuple.len() == arity {
                for (s, &i) in sizes.iter_mut().zip(tuple) {
                    *s = (*s).max(i + 1);
                }
            }
        }
        Self::with_support_sizes(entries, sizes)
    }

    pub fn with_support_sizes<I>(entries: I, support_sizes: Vec<usize>) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let arity = support_sizes.len();
        if arity == 0 {
            return Err(Error::InvalidDistribution(
                "arity must be at least 1".into(),
            ));
        }
        let mut table = BTreeMap::new();
        let mut seen = std::collections::HashSet::new();
        for (tuple, p) in entries {
            if tuple.len() != arity {
                return Err(Error::InvalidDistribution(format!(
                    "tuple {tuple:?} has length {}, expected {arity}",
                    tuple.len()
                )));
            }
            if let Some(axis) = tuple.iter().zip(&support_sizes).position(|(i, s)| i >= s) {
                return Err(Error::InvalidDistribution(format!(
                    "index {} on axis {axis} exceeds support size {}",
                    tuple[axis], support_sizes[axis]
                )));
            }
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "entry {tuple:?} has mass {p}"
                )));
            }
            if !seen.insert(tuple.clone()) {
                return Err(Error::InvalidDistribution(format!(
                    "duplicate tuple {tuple:?}"
                )));
            }
            if p > 0.0 {
                table.insert(tuple, p);
            }
        }
        let total: f64 = table.values().sum();
        if table.is_empty() || (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "joint masses sum to {total}, expected 1"
            )));
        }
        Ok(JointPmf {
            entries: table,
            support_sizes,
        })
    }

    /// Empirical table: each distinct tuple gets `count / total`.
    pub fn from_counts<I>(counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, u64)>,
    {
        let counts: Vec<_> = counts.into_iter().collect();
        let total: u64 = counts.iter().map(|(_, c)| c).sum();
        if total == 0 {
            return Err(Error::InvalidDistribution("no observations".into()));
        }
        Self::new(
            counts
                .into_iter()
                .map(|(t, c)| (t, c as f64 / total as f64)),
        )
    }

    pub fn from_pmf(p: &Pmf) -> Self {
        JointPmf {
            entries: p
                .masses()
                .iter()
                .enumerate()
                .filter(|(_, &m)| m > 0.0)
                .map(|(i, &m)| (vec![i], m))
                .collect(),
            support_sizes: vec![p.len()],
        }
    }

    /// Independent product of the given marginals, one axis per factor.
    pub fn product(factors: &[Pmf]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidDistribution("no factors".into()));
        }
        let mut entries: Vec<(Vec<usize>, f64)> = vec![(Vec::new(), 1.0)];
        for f in factors {
            let mut next = Vec::with_capacity(entries.len() * f.support_size());
            for (tuple, p) in &entries {
                for (i, &q) in f.masses().iter().enumerate() {
                    if q > 0.0 {
                        let mut t = tuple.clone();
                        t.push(i);
                        next.push((t, p * q));
                    }
                }
            }
            entries = next;
        }
        let sizes = factors.iter().map(Pmf::len).collect();
        Self::with_support_sizes(entries, sizes)
    }

    /// Uniform table over the full grid with the given axis sizes.
    pub fn uniform(support_sizes: &[usize]) -> Result<Self> {
        let factors = support_sizes
            .iter()
            .map(|&m| Pmf::uniform(m))
            .collect::<Result<Vec<_>>>()?;
        Self::product(&factors)
    }

    pub fn arity(&self) -> usize {
        self.support_sizes.len()
    }

    pub fn support_sizes(&self) -> &[usize] {
        &self.support_sizes
    }

    /// Number of strictly positive entries (S).
    pub fn support(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, tuple: &[usize]) -> f64 {
        self.entries.get(tuple).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.entries.iter().map(|(t, &p)| (t.as_slice(), p))
    }

    /// Positive masses in tuple order: the flattened table.
    pub fn masses(&self) -> Vec<f64> {
        self.entries.values().copied().collect()
    }

    fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.arity() {
            return Err(Error::invalid(format!(
                "axis {axis} out of range for arity {}",
                self.arity()
            )));
        }
        Ok(())
    }

    pub fn marginal(&self, axis: usize) -> Result<Pmf> {
        self.check_axis(axis)?;
        let mut masses = vec![0.0; self.support_sizes[axis]];
        for (t, p) in self.iter() {
            masses[t[axis]] += p;
        }
        Pmf::new(masses)
    }

    /// Projection onto `axes`, in the given order.
    pub fn project(&self, axes: &[usize]) -> Result<JointPmf> {
        if axes.is_empty() {
            return Err(Error::invalid("projection needs at least one axis"));
        }
        for &a in axes {
            self.check_axis(a)?;
        }
        let mut table: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (t, p) in self.iter() {
            let key: Vec<usize> = axes.iter().map(|&a| t[a]).collect();
            *table.entry(key).or_insert(0.0) += p;
        }
        Ok(JointPmf {
            entries: table,
            support_sizes: axes.iter().map(|&a| self.support_sizes[a]).collect(),
        })
    }

    /// Parses the tab-separated text format: index tuple then probability,
    /// one entry per line, `#` starts a comment.
    pub fn parse_text(text: &str, origin: &Path) -> Result<Self> {
        let mut entries = Vec::new();
        let mut arity = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                path: origin.to_path_buf(),
                line: lineno as u64 + 1,
                message,
            };
            let fields: Vec<&str> = line.split(['\t', ' ']).filter(|f| !f.is_empty()).collect();
            if fields.len() < 2 {
                return Err(parse_err(
                    "expected index tuple followed by a probability".into(),
                ));
            }
            let n = fields.len() - 1;
            match arity {
                None => arity = Some(n),
                Some(a) if a != n => {
                    return Err(parse_err(format!("tuple of length {n}, expected {a}")))
                }
                _ => {}
            }
            let tuple = fields[..n]
                .iter()
                .map(|f| {
                    f.parse::<usize>()
                        .map_err(|_| parse_err(format!("bad index `{f}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            let p = fields[n]
                .parse::<f64>()
                .map_err(|_| parse_err(format!("bad probability `{}`", fields[n])))?;
            entries.push((tuple, p));
        }
        Self::new(entries)
    }

    pub fn read_text(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse_text(&text, path)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (t, p) in self.iter() {
            for i in t {
                out.push_str(&i.to_string());
                out.push('\t');
            }
            out.push_str(&format!("{p:?}\n"));
        }
        out
    }
}
