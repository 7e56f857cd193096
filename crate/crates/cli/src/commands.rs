use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use extropy::chaos::{bifurcation_scan, MapConfig, MapKind};
use extropy::complexity::{
    complexity_report, generate_series, ApEnParams, ComplexityReport, PermEnParams, SeriesKind,
    SeriesSample,
};
use extropy::data::{prepare, read_csv_from, Column, Dataset, DiscretizeMode, DiscretizeSpec};
use extropy::eval::{evaluate as run_evaluation, EvalConfig, ForestParams};
use extropy::info::*;
use extropy::rate::{prefix_entropy_profile, prefix_rate_profile, RateEstimate};
use extropy::selection::{rank_features, Method};
use extropy::{JointPmf, LogBase, Pmf};
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::*;
use crate::{CliError, DiscretizeArgs, Format, OutputArgs, TableArgs};

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn delimiter_byte(c: char) -> Result<u8, CliError> {
    u8::try_from(c)
        .ok()
        .filter(u8::is_ascii)
        .ok_or_else(|| usage(format!("delimiter `{c}` is not a single ASCII character")))
}

fn load_table(t: &TableArgs) -> Result<(Dataset, InputDigest), CliError> {
    let delimiter = delimiter_byte(t.delimiter)?;
    let (bytes, digest) = read_input(&t.data)?;
    let ds = read_csv_from(bytes.as_slice(), &t.data, !t.no_header, delimiter)?;
    Ok((ds, digest))
}

fn table_config(t: &TableArgs) -> Value {
    json!({
        "data": t.data.display().to_string(),
        "delimiter": t.delimiter.to_string(),
        "header": !t.no_header,
    })
}

fn discretize_spec(d: &DiscretizeArgs) -> Result<DiscretizeSpec, CliError> {
    let mut overrides = BTreeMap::new();
    for item in &d.discretize_column {
        let (col, mode) = item.split_once('=').ok_or_else(|| {
            usage(format!(
                "--discretize-column expects COLUMN=MODE, got `{item}`"
            ))
        })?;
        let mode: DiscretizeMode = mode
            .parse()
            .map_err(|e: extropy::Error| usage(e.to_string()))?;
        overrides.insert(col.to_string(), mode);
    }
    Ok(DiscretizeSpec {
        default: d.discretize,
        overrides,
    })
}

fn spec_config(spec: &DiscretizeSpec) -> Value {
    json!({
        "default": spec.default.to_string(),
        "overrides": spec.overrides.iter().map(|(c, m)| (c.clone(), Value::from(m.to_string()))).collect::<serde_json::Map<_, _>>(),
    })
}

fn check_overrides(spec: &DiscretizeSpec, ds: &Dataset) -> Result<(), CliError> {
    for col in spec.overrides.keys() {
        if !ds.names().contains(col) {
            return Err(usage(format!(
                "--discretize-column names unknown column `{col}`"
            )));
        }
    }
    Ok(())
}

fn finish(
    output: &OutputArgs,
    default_format: Format,
    name: &str,
    csv: impl FnOnce() -> Result<String, CliError>,
    json: impl FnOnce() -> Result<String, CliError>,
) -> Result<(), CliError> {
    let format = output.format.unwrap_or(default_format);
    let (ext, content) = match format {
        Format::Csv => ("csv", csv()?),
        Format::Json => ("json", json()?),
    };
    let mut outs = Outputs::default();
    outs.push(
        destination(output.out.as_deref(), &format!("{name}.{ext}")),
        content,
    );
    outs.commit()
}

#[derive(Serialize)]
struct AxisReport {
    axis: usize,
    entropy: f64,
    extropy: f64,
    support: usize,
}

#[derive(Serialize)]
struct PairReport {
    /// J(X|Y), first axis given the second.
    conditional_extropy_x_given_y: f64,
    conditional_extropy_y_given_x: f64,
    generalized_conditional_extropy: f64,
    generalized_conditional_identity_gap: f64,
    bounds: BoundsReport,
}

#[derive(Serialize)]
struct DistReport {
    arity: usize,
    support: usize,
    support_sizes: Vec<usize>,
    entropy: f64,
    extropy: f64,
    simpson_diversity: f64,
    duality_gap: f64,
    rescaled_entropy_identity_gap: Option<f64>,
    marginals: Vec<AxisReport>,
    pair: Option<PairReport>,
}

pub fn dist(path: &Path, base: LogBase, output: &OutputArgs) -> Result<(), CliError> {
    let (bytes, digest) = read_input(path)?;
    let text = String::from_utf8(bytes)
        .map_err(|_| CliError::Data(format!("{}: not valid UTF-8", path.display())))?;
    let j = JointPmf::parse_text(&text, path)?;
    let flat = Pmf::new(j.masses())?;
    let marginals = (0..j.arity())
        .map(|a| {
            let m = j.marginal(a)?;
            Ok(AxisReport {
                axis: a,
                entropy: shannon_entropy(&m, base),
                extropy: extropy(&m, base),
                support: m.support_size(),
            })
        })
        .collect::<extropy::Result<Vec<_>>>()?;
    let pair = if j.arity() == 2 {
        Some(PairReport {
            conditional_extropy_x_given_y: conditional_extropy(&j, 0, 1, base)?,
            conditional_extropy_y_given_x: conditional_extropy(&j, 1, 0, base)?,
            generalized_conditional_extropy: generalized_conditional_extropy(&j, base)?,
            generalized_conditional_identity_gap: generalized_conditional_identity_gap(&j, base)?,
            bounds: joint_bounds_report(&j, base)?,
        })
    } else {
        None
    };
    let report = DistReport {
        arity: j.arity(),
        support: j.support(),
        support_sizes: j.support_sizes().to_vec(),
        entropy: joint_entropy(&j, base),
        extropy: joint_extropy(&j, base),
        simpson_diversity: simpson_diversity(&flat),
        duality_gap: duality_gap(&flat, base),
        rescaled_entropy_identity_gap: if flat.len() >= 2 {
            Some(rescaled_entropy_identity_gap(&flat, base)?)
        } else {
            None
        },
        marginals,
        pair,
    };
    let meta = Metadata::new(
        "dist",
        json!({ "pmf": path.display().to_string(), "base": base.name() }),
        vec![digest],
    );
    finish(
        output,
        Format::Json,
        "dist",
        || {
            let mut rows = vec![
                vec!["entropy".into(), fixed(report.entropy)],
                vec!["extropy".into(), fixed(report.extropy)],
                vec!["simpson_diversity".into(), fixed(report.simpson_diversity)],
                vec!["duality_gap".into(), fixed(report.duality_gap)],
            ];
            for m in &report.marginals {
                rows.push(vec![format!("entropy_axis{}", m.axis), fixed(m.entropy)]);
                rows.push(vec![format!("extropy_axis{}", m.axis), fixed(m.extropy)]);
            }
            if let Some(p) = &report.pair {
                rows.push(vec![
                    "conditional_extropy_x_given_y".into(),
                    fixed(p.conditional_extropy_x_given_y),
                ]);
                rows.push(vec![
                    "conditional_extropy_y_given_x".into(),
                    fixed(p.conditional_extropy_y_given_x),
                ]);
            }
            Ok(render_csv(&meta, &["quantity", "value"], &rows))
        },
        || render_json(&meta, &report),
    )
}

fn select_columns(
    ds: &Dataset,
    columns: &[String],
    target: Option<&str>,
) -> Result<Dataset, CliError> {
    if let Some(t) = target {
        ds.index_of(t).map_err(|e| usage(e.to_string()))?;
    }
    let names: Vec<String> = if columns.is_empty() {
        ds.names()
            .iter()
            .filter(|n| Some(n.as_str()) != target)
            .cloned()
            .collect()
    } else {
        if let Some(t) = target.filter(|t| columns.iter().any(|c| c == t)) {
            return Err(usage(format!(
                "target `{t}` cannot also be a profile column"
            )));
        }
        columns.to_vec()
    };
    let cols = names
        .iter()
        .map(|n| ds.column(n).cloned().map_err(|e| usage(e.to_string())))
        .collect::<Result<Vec<Column>, _>>()?;
    Ok(Dataset::new(names, cols)?)
}

pub fn rate(
    table: &TableArgs,
    target: Option<&str>,
    columns: &[String],
    discretize: &DiscretizeArgs,
    base: LogBase,
    output: &OutputArgs,
) -> Result<(), CliError> {
    let spec = discretize_spec(discretize)?;
    let (ds, digest) = load_table(table)?;
    check_overrides(&spec, &ds)?;
    let sub = select_columns(&ds, columns, target)?;
    let prepared = prepare(&sub, None, &spec)?;
    let cols = prepared.features.columns();
    let ext = prefix_rate_profile(cols, base)?;
    let ent = prefix_entropy_profile(cols, base)?;
    let names = prepared.features.names();

    let mut config = table_config(table);
    config["target"] = json!(target);
    config["columns"] = json!(names);
    config["discretize"] = spec_config(&spec);
    config["base"] = json!(base.name());
    let meta = Metadata::new("rate", config, vec![digest]);

    #[derive(Serialize)]
    struct Step<'a> {
        step: usize,
        column: &'a str,
        extropy_rate: f64,
        entropy_rate: f64,
        support_size: usize,
    }
    let steps: Vec<Step> = ext
        .iter()
        .zip(&ent)
        .zip(names)
        .map(|((x, h), name)| Step {
            step: x.n,
            column: name,
            extropy_rate: x.value,
            entropy_rate: h.value,
            support_size: x.support,
        })
        .collect();
    finish(
        output,
        Format::Csv,
        "rate",
        || {
            let rows: Vec<Vec<String>> = steps
                .iter()
                .map(|s| {
                    vec![
                        s.step.to_string(),
                        fixed(s.extropy_rate),
                        fixed(s.entropy_rate),
                        s.support_size.to_string(),
                        s.column.to_string(),
                    ]
                })
                .collect();
            Ok(render_csv(
                &meta,
                &[
                    "step",
                    "extropy_rate",
                    "entropy_rate",
                    "support_size",
                    "column",
                ],
                &rows,
            ))
        },
        || render_json(&meta, json!({ "steps": steps })),
    )
}

pub struct ComplexityOpts {
    pub data: Option<PathBuf>,
    pub delimiter: char,
    pub no_header: bool,
    pub length: usize,
    pub seed: Option<u64>,
    pub decimals: u32,
    pub apen_m: usize,
    pub apen_r: f64,
    pub pe_order: usize,
    pub pe_delay: usize,
    pub pe_normalized: bool,
    pub base: LogBase,
}

pub fn complexity(o: &ComplexityOpts, output: &OutputArgs) -> Result<(), CliError> {
    if !(o.apen_r >= 0.0 && o.apen_r.is_finite()) {
        return Err(usage("--apen-r must be a non-negative number"));
    }
    let pe = PermEnParams::new(o.pe_order, o.pe_delay, o.pe_normalized)
        .map_err(|e| usage(e.to_string()))?;
    let mut inputs = Vec::new();
    let series: Vec<(SeriesSample, Option<u64>)> = match &o.data {
        Some(path) => {
            let table = TableArgs {
                data: path.clone(),
                delimiter: o.delimiter,
                no_header: o.no_header,
            };
            let (ds, digest) = load_table(&table)?;
            inputs.push(digest);
            let mut out = Vec::new();
            for (name, col) in ds.names().iter().zip(ds.columns()) {
                if let Some(values) = col.as_reals() {
                    out.push((SeriesSample::new(name.clone(), values)?, None));
                }
            }
            if out.is_empty() {
                return Err(CliError::Data(format!(
                    "{}: no numeric columns",
                    path.display()
                )));
            }
            out
        }
        None => SeriesKind::ALL
            .iter()
            .map(|&kind| {
                let seed = o.seed.unwrap_or(kind.default_seed());
                Ok((generate_series(kind, o.length, seed)?, Some(seed)))
            })
            .collect::<extropy::Result<_>>()?,
    };
    let reports: Vec<ComplexityReport> = series
        .iter()
        .map(|(s, _)| {
            let apen = ApEnParams::relative(o.apen_m, o.apen_r, s);
            complexity_report(s, apen, pe, o.base, o.decimals)
        })
        .collect::<extropy::Result<_>>()?;

    let config = json!({
        "data": o.data.as_ref().map(|p| p.display().to_string()),
        "delimiter": o.delimiter.to_string(),
        "header": !o.no_header,
        "length": if o.data.is_none() { json!(o.length) } else { Value::Null },
        "seeds": series.iter().filter_map(|(s, seed)| seed.map(|v| (s.name.clone(), Value::from(v)))).collect::<serde_json::Map<_, _>>(),
        "decimals": o.decimals,
        "apen_m": o.apen_m,
        "apen_r_factor": o.apen_r,
        "pe_order": o.pe_order,
        "pe_delay": o.pe_delay,
        "pe_normalized": o.pe_normalized,
        "base": o.base.name(),
    });
    let meta = Metadata::new("complexity", config, inputs);
    finish(
        output,
        Format::Csv,
        "complexity",
        || {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    vec![
                        r.series.clone(),
                        fixed(r.apen),
                        fixed(r.pe),
                        fixed(r.extropy_rate),
                    ]
                })
                .collect();
            Ok(render_csv(
                &meta,
                &["series", "apen", "pe", "extropy_rate"],
                &rows,
            ))
        },
        || render_json(&meta, json!({ "series": reports })),
    )
}

pub struct BifurcateOpts {
    pub map: MapKind,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub steps: usize,
    pub burn_in: usize,
    pub length: usize,
    pub decimals: u32,
    pub x0: Option<f64>,
    pub y0: Option<f64>,
    pub b: f64,
    pub base: LogBase,
    pub diagram: Option<PathBuf>,
}

fn opt_cell<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub fn bifurcate(o: &BifurcateOpts, output: &OutputArgs) -> Result<(), CliError> {
    let (lo, hi) = o.map.parameter_range();
    let from = o.from.unwrap_or(lo);
    let to = o.to.unwrap_or(hi);
    if from > to {
        return Err(usage(format!("--from {from} is greater than --to {to}")));
    }
    let mut template = match o.map {
        MapKind::Logistic => MapConfig::logistic(from),
        MapKind::Henon => MapConfig::henon(from),
    };
    template.b = o.b;
    template.burn_in = o.burn_in;
    template.length = o.length;
    template.round_decimals = o.decimals;
    if let Some(x0) = o.x0 {
        template.x0 = x0;
    }
    if let Some(y0) = o.y0 {
        template.y0 = y0;
    }
    template.validate().map_err(|e| usage(e.to_string()))?;
    let scan =
        bifurcation_scan(&template, from, to, o.steps, o.base).map_err(|e| usage(e.to_string()))?;
    if let Some(p) = scan.points.iter().find(|p| p.error.is_some()) {
        if scan.points.iter().all(|p| p.error.is_some()) {
            return Err(CliError::Numeric(format!(
                "every grid point failed, e.g. at {}: {}",
                p.parameter,
                p.error.as_deref().unwrap_or_default()
            )));
        }
    }

    let config = json!({
        "map": o.map.name(),
        "from": from,
        "to": to,
        "steps": o.steps,
        "burn_in": o.burn_in,
        "length": o.length,
        "decimals": o.decimals,
        "x0": template.x0,
        "y0": if o.map == MapKind::Henon { json!(template.y0) } else { Value::Null },
        "b": if o.map == MapKind::Henon { json!(template.b) } else { Value::Null },
        "base": o.base.name(),
    });
    let meta = Metadata::new("bifurcate", config, Vec::new());
    let format = output.format.unwrap_or(Format::Csv);
    let ext = if format == Format::Csv { "csv" } else { "json" };
    let content = match format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = scan
                .points
                .iter()
                .map(|p| {
                    vec![
                        fixed(p.parameter),
                        opt_cell(p.rate.map(|r| fixed(r.value))),
                        opt_cell(p.distinct_states),
                        opt_cell(p.orbit_min.map(fixed)),
                        opt_cell(p.orbit_max.map(fixed)),
                    ]
                })
                .collect();
            render_csv(
                &meta,
                &[
                    "parameter",
                    "extropy_rate",
                    "distinct_states",
                    "orbit_min",
                    "orbit_max",
                ],
                &rows,
            )
        }
        Format::Json => render_json(&meta, &scan)?,
    };
    let mut outs = Outputs::default();
    outs.push(
        destination(output.out.as_deref(), &format!("bifurcate.{ext}")),
        content,
    );
    if let Some(path) = &o.diagram {
        let rows: Vec<Vec<String>> = scan
            .points
            .iter()
            .flat_map(|p| p.orbit.iter().map(|&v| vec![fixed(p.parameter), fixed(v)]))
            .collect();
        outs.push(
            Some(path.clone()),
            render_csv(&meta, &["parameter", "value"], &rows),
        );
    }
    outs.commit()
}

fn check_methods(methods: &[Method], has_target: bool) -> Result<(), CliError> {
    if methods.is_empty() {
        return Err(usage("no methods given"));
    }
    let mut seen = Vec::new();
    for &m in methods {
        if seen.contains(&m) {
            return Err(usage(format!("method `{m}` listed twice")));
        }
        seen.push(m);
        if m.needs_target() && !has_target {
            return Err(usage(format!("method `{m}` needs --target")));
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ScoredFeature<'a> {
    index: usize,
    name: &'a str,
    score: Value,
}

#[derive(Serialize)]
struct PrefixRate {
    step: usize,
    value: f64,
    support: usize,
}

#[derive(Serialize)]
struct MethodSelection<'a> {
    method: Method,
    k: usize,
    selected: Vec<usize>,
    selected_names: Vec<&'a str>,
    scores: Vec<ScoredFeature<'a>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    prefix_rates: Vec<PrefixRate>,
}

#[allow(clippy::too_many_arguments)]
pub fn select(
    table: &TableArgs,
    target: Option<&str>,
    k: usize,
    methods: &[Method],
    seed: u64,
    discretize: &DiscretizeArgs,
    base: LogBase,
    output: &OutputArgs,
) -> Result<(), CliError> {
    check_methods(methods, target.is_some())?;
    let spec = discretize_spec(discretize)?;
    let (ds, digest) = load_table(table)?;
    check_overrides(&spec, &ds)?;
    if let Some(t) = target {
        ds.index_of(t).map_err(|e| usage(e.to_string()))?;
    }
    let prepared = prepare(&ds, target, &spec)?;
    let d = prepared.features.n_features();
    if k == 0 || k > d {
        return Err(usage(format!("--k must be in 1..={d}")));
    }
    let names = prepared.features.names();
    let y = prepared.target.as_ref().map(|t| t.codes.as_slice());
    let results = methods
        .iter()
        .map(|&m| {
            let r = rank_features(&prepared.features, Some(&prepared.raw), y, m, k, base, seed)?;
            Ok(MethodSelection {
                method: m,
                k,
                selected_names: r.selected.iter().map(|&i| names[i].as_str()).collect(),
                scores: r
                    .scores
                    .iter()
                    .enumerate()
                    .map(|(i, &s)| ScoredFeature {
                        index: i,
                        name: &names[i],
                        score: json_real(s),
                    })
                    .collect(),
                prefix_rates: r
                    .prefix_rates
                    .iter()
                    .map(|p: &RateEstimate| PrefixRate {
                        step: p.n,
                        value: p.value,
                        support: p.support,
                    })
                    .collect(),
                selected: r.selected,
            })
        })
        .collect::<extropy::Result<Vec<_>>>()?;

    let mut config = table_config(table);
    config["target"] = json!(target);
    config["k"] = json!(k);
    config["methods"] = json!(methods);
    config["seed"] = json!(seed);
    config["discretize"] = spec_config(&spec);
    config["base"] = json!(base.name());
    let meta = Metadata::new("select", config, vec![digest]);
    finish(
        output,
        Format::Json,
        "select",
        || {
            let rows: Vec<Vec<String>> = results
                .iter()
                .flat_map(|r| {
                    r.selected.iter().enumerate().map(move |(rank, &i)| {
                        let score = r.scores[i].score.as_f64().map_or_else(
                            || r.scores[i].score.as_str().unwrap_or("").to_string(),
                            fixed,
                        );
                        vec![
                            r.method.to_string(),
                            (rank + 1).to_string(),
                            i.to_string(),
                            names[i].clone(),
                            score,
                        ]
                    })
                })
                .collect();
            Ok(render_csv(
                &meta,
                &["method", "rank", "index", "name", "score"],
                &rows,
            ))
        },
        || render_json(&meta, json!({ "features": names, "results": results })),
    )
}

pub struct EvaluateOpts {
    pub target: String,
    pub k: usize,
    pub methods: Vec<Method>,
    pub seed: u64,
    pub test_fraction: f64,
    pub trees: usize,
    pub max_depth: usize,
    pub min_split: usize,
    pub features_per_split: Option<usize>,
    pub positive: Option<String>,
    pub base: LogBase,
}

pub fn evaluate(
    o: &EvaluateOpts,
    table: &TableArgs,
    discretize: &DiscretizeArgs,
    output: &OutputArgs,
) -> Result<(), CliError> {
    check_methods(&o.methods, true)?;
    if !(o.test_fraction > 0.0 && o.test_fraction < 1.0) {
        return Err(usage("--test-fraction must be in (0, 1)"));
    }
    if o.trees == 0 || o.max_depth == 0 || o.features_per_split == Some(0) {
        return Err(usage(
            "--trees, --max-depth and --features-per-split must be positive",
        ));
    }
    let spec = discretize_spec(discretize)?;
    let (ds, digest) = load_table(table)?;
    check_overrides(&spec, &ds)?;
    ds.index_of(&o.target).map_err(|e| usage(e.to_string()))?;
    let prepared = prepare(&ds, Some(&o.target), &spec)?;
    let d = prepared.features.n_features();
    if o.k == 0 || o.k > d {
        return Err(usage(format!("--k must be in 1..={d}")));
    }
    let forest = ForestParams {
        n_trees: o.trees,
        max_depth: o.max_depth,
        min_samples_split: o.min_split,
        features_per_split: o.features_per_split,
        seed: o.seed,
    };
    let cfg = EvalConfig {
        k: o.k,
        methods: o.methods.clone(),
        seed: o.seed,
        test_fraction: o.test_fraction,
        forest,
        base: o.base,
        positive: o.positive.clone(),
    };
    let report = run_evaluation(&prepared, &cfg)?;

    let mut config = table_config(table);
    config["target"] = json!(o.target);
    config["k"] = json!(o.k);
    config["methods"] = json!(o.methods);
    config["seed"] = json!(o.seed);
    config["test_fraction"] = json!(o.test_fraction);
    config["forest"] = json!({
        "trees": o.trees,
        "max_depth": o.max_depth,
        "min_samples_split": o.min_split,
        "features_per_split": o.features_per_split,
    });
    config["positive"] = json!(report.positive_class);
    config["discretize"] = spec_config(&spec);
    config["base"] = json!(o.base.name());
    let meta = Metadata::new("evaluate", config, vec![digest]);
    finish(
        output,
        Format::Json,
        "evaluate",
        || {
            let rows: Vec<Vec<String>> = report
                .results
                .iter()
                .map(|r| {
                    let m = &r.metrics;
                    vec![
                        r.method.to_string(),
                        r.k.to_string(),
                        r.seed.to_string(),
                        r.selected_names.join(" "),
                        fixed(m.accuracy),
                        fixed(m.f1),
                        fixed(m.tpr),
                        m.tp.to_string(),
                        m.fp.to_string(),
                        m.fn_.to_string(),
                        m.tn.to_string(),
                    ]
                })
                .collect();
            Ok(render_csv(
                &meta,
                &[
                    "method", "k", "seed", "selected", "accuracy", "f1", "tpr", "tp", "fp", "fn",
                    "tn",
                ],
                &rows,
            ))
        },
        || render_json(&meta, &report),
    )
}
