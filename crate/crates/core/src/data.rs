//! CSV ingestion, column typing and discretization.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::selection::FeatureMatrix;

#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Integer(Vec<i64>),
    Real(Vec<f64>),
    Categorical(Vec<String>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Integer(v) => v.len(),
            Column::Real(v) => v.len(),
            Column::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_numeric(&self) -> bool {
        !matches!(self, Column::Categorical(_))
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Column::Integer(_) => "integer",
            Column::Real(_) => "real",
            Column::Categorical(_) => "categorical",
        }
    }

    /// Numeric values as reals; `None` for categorical columns.
    pub fn as_reals(&self) -> Option<Vec<f64>> {
        match self {
            Column::Integer(v) => Some(v.iter().map(|&x| x as f64).collect()),
            Column::Real(v) => Some(v.clone()),
            Column::Categorical(_) => None,
        }
    }

    fn cell(&self, row: usize) -> String {
        match self {
            Column::Integer(v) => v[row].to_string(),
            Column::Real(v) => format!("{:?}", v[row]),
            Column::Categorical(v) => v[row].clone(),
        }
    }
}

/// A rectangular table of named, typed columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    names: Vec<String>,
    columns: Vec<Column>,
}

impl Dataset {
    pub fn new(names: Vec<String>, columns: Vec<Column>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::invalid(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(Error::invalid(format!("duplicate column name `{dup}`")));
        }
        if let Some(first) = columns.first() {
            let rows = first.len();
            if let Some(i) = columns.iter().position(|c| c.len() != rows) {
                return Err(Error::invalid(format!(
                    "column `{}` has {} rows, expected {rows}",
                    names[i],
                    columns[i].len()
                )));
            }
        }
        Ok(Dataset { names, columns })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, Column::len)
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::invalid(format!("no column named `{name}`")))
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        Ok(&self.columns[self.index_of(name)?])
    }
}

fn parse_error(path: &Path, line: u64, message: String) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    }
}

/// Reads a delimited file. Column types are inferred: all-integer columns
/// become [`Column::Integer`], other all-numeric columns [`Column::Real`],
/// anything else [`Column::Categorical`]. Empty cells are rejected.
pub fn read_csv(path: &Path, has_header: bool, delimiter: u8) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv_from(file, path, has_header, delimiter)
}

pub fn read_csv_from<R: std::io::Read>(
    reader: R,
    origin: &Path,
    has_header: bool,
    delimiter: u8,
) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .delimiter(delimiter)
        .from_reader(reader);
    let mut names: Option<Vec<String>> = None;
    let mut cells: Vec<Vec<String>> = Vec::new();
    let mut lines: Vec<u64> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(origin, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let fields: Vec<String> = record.iter().map(|f| f.trim().to_string()).collect();
        if names.is_none() && has_header {
            names = Some(fields);
            continue;
        }
        let width = names
            .as_ref()
            .map_or_else(|| cells.first().map_or(fields.len(), Vec::len), Vec::len);
        if fields.len() != width {
            return Err(parse_error(
                origin,
                line,
                format!("row {line} has {} fields, expected {width}", fields.len()),
            ));
        }
        if let Some(c) = fields.iter().position(String::is_empty) {
            return Err(parse_error(
                origin,
                line,
                format!("row {line}, column {}: missing value", c + 1),
            ));
        }
        cells.push(fields);
        lines.push(line);
    }
    if cells.is_empty() {
        return Err(parse_error(origin, 1, "no data rows".into()));
    }
    let width = cells[0].len();
    let names = names.unwrap_or_else(|| (1..=width).map(|i| format!("column_{i}")).collect());

    let mut columns = Vec::with_capacity(width);
    for c in 0..width {
        let raw: Vec<&str> = cells.iter().map(|r| r[c].as_str()).collect();
        if let Some(ints) = raw
            .iter()
            .map(|s| s.parse::<i64>().ok())
            .collect::<Option<Vec<_>>>()
        {
            columns.push(Column::Integer(ints));
            continue;
        }
        let reals: Vec<Option<f64>> = raw.iter().map(|s| s.parse::<f64>().ok()).collect();
        if reals.iter().all(Option::is_some) {
            let reals: Vec<f64> = reals.into_iter().flatten().collect();
            if let Some(r) = reals.iter().position(|v| !v.is_finite()) {
                return Err(parse_error(
                    origin,
                    lines[r],
                    format!(
                        "row {}, column {}: non-finite value `{}`",
                        lines[r],
                        c + 1,
                        raw[r]
                    ),
                ));
            }
            columns.push(Column::Real(reals));
        } else {
            columns.push(Column::Categorical(
                raw.iter().map(|s| s.to_string()).collect(),
            ));
        }
    }
    Dataset::new(names, columns)
}

/// Writes the dataset with a header row. Reals use the shortest
/// representation that parses back to the same value.
pub fn write_csv(ds: &Dataset, path: &Path, delimiter: u8) -> Result<()> {
    let io_err = |e: csv::Error| Error::Io {
        path: path.to_path_buf(),
        source: e.into(),
    };
    let mut w = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_path(path)
        .map_err(io_err)?;
    w.write_record(ds.names()).map_err(io_err)?;
    for row in 0..ds.n_rows() {
        w.write_record(ds.columns().iter().map(|c| c.cell(row)))
            .map_err(io_err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DiscretizeMode {
    Round { decimals: u32 },
    EqualWidth { bins: usize },
    Quantile { bins: usize },
}

impl Default for DiscretizeMode {
    fn default() -> Self {
        DiscretizeMode::Quantile { bins: 10 }
    }
}

impl fmt::Display for DiscretizeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiscretizeMode::Round { decimals } => write!(f, "round:{decimals}"),
            DiscretizeMode::EqualWidth { bins } => write!(f, "equal_width:{bins}"),
            DiscretizeMode::Quantile { bins } => write!(f, "quantile:{bins}"),
        }
    }
}

impl FromStr for DiscretizeMode {
    type Err = Error;

    /// `round:D`, `equal_width:B` or `quantile:B`.
    fn from_str(s: &str) -> Result<Self> {
        let (mode, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("discretization `{s}` needs MODE:VALUE")))?;
        let value: usize = arg
            .parse()
            .map_err(|_| Error::invalid(format!("bad discretization parameter `{arg}`")))?;
        let mode = match mode {
            "round" => DiscretizeMode::Round {
                decimals: value as u32,
            },
            "equal_width" => DiscretizeMode::EqualWidth { bins: value },
            "quantile" => DiscretizeMode::Quantile { bins: value },
            other => return Err(Error::invalid(format!("unknown discretization `{other}`"))),
        };
        mode.validate()?;
        Ok(mode)
    }
}

impl DiscretizeMode {
    fn validate(&self) -> Result<()> {
        match *self {
            DiscretizeMode::EqualWidth { bins } | DiscretizeMode::Quantile { bins }
                if bins == 0 =>
            {
                Err(Error::invalid("bins must be at least 1"))
            }
            _ => Ok(()),
        }
    }
}

/// Default mode plus per-column overrides.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DiscretizeSpec {
    pub default: DiscretizeMode,
    pub overrides: BTreeMap<String, DiscretizeMode>,
}

impl DiscretizeSpec {
    pub fn mode_for(&self, column: &str) -> DiscretizeMode {
        self.overrides.get(column).copied().unwrap_or(self.default)
    }
}

/// Relabels arbitrary ordered keys as `0..m` preserving order.
fn compact<K: Ord + Copy>(keys: &[K]) -> Vec<u32> {
    let distinct: BTreeSet<K> = keys.iter().copied().collect();
    let index: BTreeMap<K, u32> = distinct
        .into_iter()
        .enumerate()
        .map(|(i, k)| (k, i as u32))
        .collect();
    keys.iter().map(|k| index[k]).collect()
}

/// Maps a real column to contiguous category codes `0..m`, order preserving.
pub fn discretize(values: &[f64], mode: DiscretizeMode) -> Result<Vec<u32>> {
    mode.validate()?;
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("value {i} is not finite")));
    }
    if values.is_empty() {
        return Ok(Vec::new());
    }
    let keys: Vec<i64> = match mode {
        DiscretizeMode::Round { decimals } => crate::complexity::round_codes(values, decimals),
        DiscretizeMode::EqualWidth { bins } => {
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let width = (hi - lo) / bins as f64;
            if width <= 0.0 {
                vec![0; values.len()]
            } else {
                values
                    .iter()
                    .map(|&x| (((x - lo) / width).floor() as i64).clamp(0, bins as i64 - 1))
                    .collect()
            }
        }
        DiscretizeMode::Quantile { bins } => {
            let mut sorted = values.to_vec();
            sorted.sort_by(f64::total_cmp);
            let mut distinct = sorted.clone();
            distinct.dedup();
            if distinct.len() <= bins {
                values
                    .iter()
                    .map(|x| distinct.partition_point(|d| d < x) as i64)
                    .collect()
            } else {
                let n = values.len();
                values
                    .iter()
                    .map(|x| {
                        // ties take the rank of their first occurrence
                        let rank = sorted.partition_point(|s| s < x);
                        (rank * bins / n) as i64
                    })
                    .collect()
            }
        }
    };
    Ok(compact(&keys))
}

/// Codes for a categorical column: distinct labels in lexicographic order.
pub fn encode_labels(labels: &[String]) -> (Vec<u32>, Vec<String>) {
    let distinct: BTreeSet<&String> = labels.iter().collect();
    let names: Vec<String> = distinct.iter().map(|s| s.to_string()).collect();
    let codes = labels
        .iter()
        .map(|l| names.binary_search(l).expect("label present") as u32)
        .collect();
    (codes, names)
}

/// Class codes and their labels for a target column. Numeric targets are
/// ordered by value, categorical ones lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassColumn {
    pub name: String,
    pub codes: Vec<u32>,
    pub labels: Vec<String>,
}

impl ClassColumn {
    pub fn from_column(name: &str, col: &Column) -> Self {
        let (codes, labels) = match col {
            Column::Integer(v) => {
                let codes = compact(v);
                let labels: BTreeSet<i64> = v.iter().copied().collect();
                (codes, labels.into_iter().map(|x| x.to_string()).collect())
            }
            Column::Real(v) => {
                let mut distinct = v.clone();
                distinct.sort_by(f64::total_cmp);
                distinct.dedup();
                let codes = v
                    .iter()
                    .map(|x| distinct.partition_point(|d| d < x) as u32)
                    .collect();
                (codes, distinct.iter().map(|x| format!("{x:?}")).collect())
            }
            Column::Categorical(v) => encode_labels(v),
        };
        ClassColumn {
            name: name.to_string(),
            codes,
            labels,
        }
    }

    pub fn n_classes(&self) -> usize {
        self.labels.len()
    }

    pub fn code_of(&self, label: &str) -> Result<u32> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| i as u32)
            .ok_or_else(|| {
                Error::invalid(format!("class `{label}` not present in `{}`", self.name))
            })
    }
}

/// Whether a feature is split by threshold or by equality in the forest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Real,
    Categorical,
}

/// Features ready for selection and learning.
#[derive(Debug, Clone)]
pub struct Prepared {
    /// Discretized codes used by the information-based scorers.
    pub features: FeatureMatrix,
    /// Raw values (category codes for categorical columns), column-major.
    pub raw: Vec<Vec<f64>>,
    pub kinds: Vec<FeatureKind>,
    pub target: Option<ClassColumn>,
}

impl Prepared {
    /// Restriction to the given rows, in the given order.
    pub fn rows(&self, rows: &[usize]) -> Prepared {
        Prepared {
            features: self.features.rows(rows),
            raw: self
                .raw
                .iter()
                .map(|c| rows.iter().map(|&r| c[r]).collect())
                .collect(),
            kinds: self.kinds.clone(),
            target: self.target.as_ref().map(|t| ClassColumn {
                name: t.name.clone(),
                codes: rows.iter().map(|&r| t.codes[r]).collect(),
                labels: t.labels.clone(),
            }),
        }
    }
}

/// Splits off the target (if any) and discretizes every other column.
pub fn prepare(ds: &Dataset, target: Option<&str>, spec: &DiscretizeSpec) -> Result<Prepared> {
    let target_idx = target.map(|t| ds.index_of(t)).transpose()?;
    let mut names = Vec::new();
    let mut codes = Vec::new();
    let mut raw = Vec::new();
    let mut kinds = Vec::new();
    for (i, (name, col)) in ds.names().iter().zip(ds.columns()).enumerate() {
        if Some(i) == target_idx {
            continue;
        }
        match col.as_reals() {
            Some(values) => {
                codes.push(discretize(&values, spec.mode_for(name))?);
                raw.push(values);
                kinds.push(FeatureKind::Real);
            }
            None => {
                let Column::Categorical(labels) = col else {
                    unreachable!()
                };
                let (c, _) = encode_labels(labels);
                raw.push(c.iter().map(|&x| x as f64).collect());
                codes.push(c);
                kinds.push(FeatureKind::Categorical);
            }
        }
        names.push(name.clone());
    }
    if names.is_empty() {
        return Err(Error::invalid("no feature columns"));
    }
    Ok(Prepared {
        features: FeatureMatrix::new(names, codes)?,
        raw,
        kinds,
        target: target_idx.map(|i| ClassColumn::from_column(&ds.names()[i], &ds.columns()[i])),
    })
}
