//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use extropy::chaos::{rate_at, MapConfig};
use extropy::complexity::{reference_table, round_codes, SeriesKind};
use extropy::data::{prepare, read_csv, DiscretizeSpec};
use extropy::eval::{classification_metrics, evaluate, EvalConfig, Metrics};
use extropy::info::*;
use extropy::rate::*;
use extropy::selection::{select_features_extropy, FeatureMatrix, Method};
use extropy::{JointPmf, LogBase, Pmf};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXAMPLE_TOL: f64 = 1e-5;
const IDENTITY_TOL: f64 = 1e-9;
const TIGHT_TOL: f64 = 1e-12;
const NAIVE_LIMIT: f64 = 1e-3;
const IID_TOL: f64 = 1e-6;
const ORACLE_TOL: f64 = 1e-9;
const INSTANCES: usize = 1000;
const LIPSCHITZ_R: f64 = 0.9;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(name: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || {
        format!("{name} = {got:.9}, expected {want} ± {tol:e}")
    })
}

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

fn reference_joint() -> JointPmf {
    JointPmf::new([
        (vec![0, 0], 0.1),
        (vec![0, 1], 0.2),
        (vec![1, 0], 0.3),
        (vec![1, 1], 0.4),
    ])
    .unwrap()
}

/// J(X|Y) summed by hand over the 2x2 table.
#[allow(clippy::needless_range_loop)]
fn brute_conditional(p: [[f64; 2]; 2]) -> f64 {
    let mut total = 0.0;
    for j in 0..2 {
        let py = p[0][j] + p[1][j];
        let ext: f64 = (0..2)
            .map(|i| {
                let q = 1.0 - p[i][j] / py;
                if q > 0.0 {
                    -q * q.ln()
                } else {
                    0.0
                }
            })
            .sum();
        total += py * ext;
    }
    total
}

fn criterion_1() -> Outcome {
    let j = reference_joint();
    let joint = joint_extropy(&j, LogBase::Natural);
    let jy = extropy(&j.marginal(1).unwrap(), LogBase::Natural);
    let cond = conditional_extropy(&j, 0, 1, LogBase::Natural).unwrap();
    let oracle = brute_conditional([[0.1, 0.2], [0.3, 0.4]]);
    close("J(X,Y)", joint, 0.829507, EXAMPLE_TOL)?;
    close("J(Y)", jy, 0.673011, EXAMPLE_TOL)?;
    close("J(X|Y) vs oracle", cond, oracle, EXAMPLE_TOL)?;
    close("J(X|Y)", cond, 0.606842, EXAMPLE_TOL)?;
    let gap = (joint - (cond + jy)).abs();
    ensure(gap > 0.01, || format!("non-additivity gap {gap} <= 0.01"))?;
    Ok(format!(
        "J(X,Y)={joint:.6} J(Y)={jy:.6} J(X|Y)={cond:.6} gap={gap:.6}"
    ))
}

fn criterion_2() -> Outcome {
    let rows = reference_table(25, LogBase::Two).map_err(|e| e.to_string())?;
    let by: BTreeMap<&str, _> = rows.iter().map(|r| (r.series.as_str(), r)).collect();
    ensure(by["constant"].extropy_rate == 0.0, || {
        format!(
            "constant rate {} is not exactly 0",
            by["constant"].extropy_rate
        )
    })?;
    close("step", by["step"].extropy_rate, 1.00, 0.01)?;
    close("periodic", by["periodic"].extropy_rate, 2.00, 0.01)?;
    close("ar1", by["ar1"].extropy_rate, 2.58, 0.35)?;
    close(
        "noisy_periodic",
        by["noisy_periodic"].extropy_rate,
        3.00,
        0.15,
    )?;
    close("random_walk", by["random_walk"].extropy_rate, 3.90, 0.35)?;
    let order: Vec<_> = SeriesKind::ALL.iter().map(|k| by[k.name()]).collect();
    for w in order.windows(2) {
        ensure(w[0].extropy_rate < w[1].extropy_rate, || {
            format!("rate order broken at {} / {}", w[0].series, w[1].series)
        })?;
        ensure(w[0].apen < w[1].apen, || {
            format!("ApEn order broken at {} / {}", w[0].series, w[1].series)
        })?;
        ensure(w[0].pe < w[1].pe, || {
            format!("PE order broken at {} / {}", w[0].series, w[1].series)
        })?;
    }
    Ok(order
        .iter()
        .map(|r| format!("{}={:.2}", r.series, r.extropy_rate))
        .collect::<Vec<_>>()
        .join(" "))
}

fn random_masses(rng: &mut impl Rng, m: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..m).map(|_| rng.random_range(0.001..1.0)).collect();
    let t: f64 = w.iter().sum();
    w.iter().map(|x| x / t).collect()
}

fn random_pmf(rng: &mut impl Rng, lo: usize, hi: usize) -> Pmf {
    let m = rng.random_range(lo..=hi);
    Pmf::new(random_masses(rng, m)).unwrap()
}

fn random_joint(rng: &mut impl Rng) -> JointPmf {
    let rows = rng.random_range(1..=5);
    let cols = rng.random_range(1..=5);
    loop {
        let w: Vec<f64> = (0..rows * cols)
            .map(|_| {
                if rng.random_bool(0.2) {
                    0.0
                } else {
                    rng.random_range(0.001..1.0)
                }
            })
            .collect();
        let t: f64 = w.iter().sum();
        if t > 0.0 {
            return JointPmf::new(
                w.iter()
                    .enumerate()
                    .map(|(i, &x)| (vec![i / cols, i % cols], x / t)),
            )
            .unwrap();
        }
    }
}

fn l1(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum()
}

fn bounded_pair(rng: &mut impl Rng, m: usize) -> (Pmf, Pmf) {
    loop {
        let p = random_masses(rng, m);
        let q = random_masses(rng, m);
        if p.iter().chain(&q).all(|&x| x < LIPSCHITZ_R) {
            return (Pmf::new(p).unwrap(), Pmf::new(q).unwrap());
        }
    }
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let base = LogBase::Natural;
    let zeta = extropy_lipschitz_constant(LIPSCHITZ_R);
    for i in 0..INSTANCES {
        let fail = |what: &str| format!("{what} failed on instance {i}");
        let p = random_pmf(&mut rng, 1, 10);
        ensure(duality_gap(&p, base).abs() <= IDENTITY_TOL, || {
            fail("duality")
        })?;
        let p = random_pmf(&mut rng, 2, 10);
        ensure(
            rescaled_entropy_identity_gap(&p, base).unwrap().abs() <= IDENTITY_TOL,
            || fail("rescaling"),
        )?;
        let j = random_joint(&mut rng);
        ensure(
            generalized_conditional_identity_gap(&j, base)
                .unwrap()
                .abs()
                <= IDENTITY_TOL,
            || fail("generalized conditional identity"),
        )?;
        let sizes: Vec<usize> = (0..rng.random_range(1..=4))
            .map(|_| rng.random_range(1..=6))
            .collect();
        let u = JointPmf::uniform(&sizes).unwrap();
        let rate = finite_extropy_rate(&u, sizes.len(), base).unwrap().value;
        ensure(
            (rate - (u.support() as f64).ln() / sizes.len() as f64).abs() <= IDENTITY_TOL,
            || fail("uniform rate"),
        )?;
        let a: f64 = rng.random_range(0.0001..0.9999);
        let b = Pmf::new(vec![a, 1.0 - a]).unwrap();
        ensure(
            (shannon_entropy(&b, base) - extropy(&b, base)).abs() <= TIGHT_TOL,
            || fail("binary H = J"),
        )?;
        let px = random_pmf(&mut rng, 1, 6);
        let py = random_pmf(&mut rng, 1, 6);
        let prod = JointPmf::product(&[px.clone(), py.clone()]).unwrap();
        ensure(
            (conditional_extropy(&prod, 0, 1, base).unwrap() - extropy(&px, base)).abs()
                <= TIGHT_TOL,
            || fail("independence"),
        )?;
        let j = random_joint(&mut rng);
        ensure(
            conditional_extropy(&j, 1, 0, base).unwrap()
                <= extropy(&j.marginal(1).unwrap(), base) + TIGHT_TOL,
            || fail("uncertainty reduction"),
        )?;
        let px = random_pmf(&mut rng, 2, 6);
        let py = random_pmf(&mut rng, 2, 6);
        let prod = JointPmf::product(&[px.clone(), py.clone()]).unwrap();
        ensure(
            joint_extropy(&prod, base) < extropy(&px, base) + extropy(&py, base) - TIGHT_TOL,
            || fail("subadditivity"),
        )?;
        let r = joint_bounds_report(&j, base).unwrap();
        if r.x_marginals_below_threshold {
            ensure(r.joint <= r.m_y as f64 * r.extropy_x + TIGHT_TOL, || {
                fail("bound m_Y J(X)")
            })?;
        }
        if r.y_marginals_below_threshold {
            ensure(r.joint <= r.m_x as f64 * r.extropy_y + TIGHT_TOL, || {
                fail("bound m_X J(Y)")
            })?;
        }
        let m = rng.random_range(2..=8);
        let (p, q) = bounded_pair(&mut rng, m);
        let d = l1(p.masses(), q.masses());
        ensure(
            (extropy(&p, base) - extropy(&q, base)).abs() <= zeta * d + TIGHT_TOL,
            || fail("Lipschitz"),
        )?;
        let n = rng.random_range(1..=5);
        let rp = finite_extropy_rate(&JointPmf::from_pmf(&p), n, base)
            .unwrap()
            .value;
        let rq = finite_extropy_rate(&JointPmf::from_pmf(&q), n, base)
            .unwrap()
            .value;
        ensure(
            (rp - rq).abs() <= rate_lipschitz_constant(LIPSCHITZ_R, n, m) * d + TIGHT_TOL,
            || fail("rate Lipschitz"),
        )?;
    }
    Ok(format!(
        "{INSTANCES} instances x 12 identities, zeta(0.9) = {zeta:.1}"
    ))
}

fn criterion_4() -> Outcome {
    let mut detail = Vec::new();
    let mut problems = Vec::new();
    for k in 2..=4 {
        let seq = naive_rate_sequence(k, 20, LogBase::Natural).map_err(|e| e.to_string())?;
        if !seq.windows(2).all(|w| w[1] < w[0]) {
            problems.push(format!("k={k} not strictly decreasing"));
        }
        let last = seq[19];
        detail.push(format!("k={k}: {last:.6}"));
        if last >= NAIVE_LIMIT {
            problems.push(format!(
                "k={k}: value at n=20 is {last:.6} nats, not < {NAIVE_LIMIT:e}"
            ));
        }
    }
    let iid = iid_rate_limit_check(2, 20, LogBase::Two).map_err(|e| e.to_string())?;
    if iid.abs() >= IID_TOL {
        problems.push(format!("IID check {iid:e}"));
    }
    if problems.is_empty() {
        Ok(format!("{} iid={iid:e}", detail.join(" ")))
    } else {
        Err(format!(
            "{}; decreasing and IID parts hold; the naive rate behaves like 1/n (J of a uniform law tends to 1 nat)",
            problems.join("; ")
        ))
    }
}

fn criterion_5() -> Outcome {
    let logistic = MapConfig::logistic(3.0);
    let rate = |r: f64| {
        rate_at(&logistic, r, LogBase::Two)
            .map(|e| e.value)
            .map_err(|e| e.to_string())
    };
    let rates = [rate(2.8)?, rate(3.2)?, rate(3.55)?, rate(3.9)?];
    ensure(rates.windows(2).all(|w| w[0] < w[1]), || {
        format!("logistic rates not increasing: {rates:?}")
    })?;
    let r26 = rate(2.6)?;
    ensure(r26 == 0.0, || format!("rate(2.6) = {r26}"))?;
    for (r, want) in [(2.8, 1), (3.2, 2)] {
        let c = logistic.with_param(r);
        let orbit = c.orbit().map_err(|e| e.to_string())?;
        let mut codes = round_codes(&orbit.values, c.round_decimals);
        codes.sort_unstable();
        codes.dedup();
        ensure(codes.len() == want, || {
            format!("r = {r}: {} distinct states, expected {want}", codes.len())
        })?;
    }
    let henon = MapConfig::henon(1.2);
    let h = |a: f64| {
        rate_at(&henon, a, LogBase::Two)
            .map(|e| e.value)
            .map_err(|e| e.to_string())
    };
    let (h105, h14) = (h(1.05)?, h(1.4)?);
    ensure(h14 > h105, || {
        format!("Hénon rate(1.4) = {h14} <= rate(1.05) = {h105}")
    })?;
    Ok(format!(
        "logistic {:.3} < {:.3} < {:.3} < {:.3}; henon {h105:.3} < {h14:.3}",
        rates[0], rates[1], rates[2], rates[3]
    ))
}

fn brute_prefix_rate(cols: &[Vec<u32>], j: usize) -> f64 {
    let rows = cols[0].len();
    let mut counts: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    for r in 0..rows {
        *counts
            .entry(cols[..j].iter().map(|c| c[r]).collect())
            .or_default() += 1;
    }
    let s = counts.len() as f64;
    if counts.len() == 1 {
        return 0.0;
    }
    let ext: f64 = counts
        .values()
        .map(|&c| {
            let q = 1.0 - c as f64 / rows as f64;
            -q * q.ln()
        })
        .sum();
    ((s - 1.0).ln() + ext / (s - 1.0)) / j as f64
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for case in 0..100 {
        let d = rng.random_range(1..=6);
        let rows = rng.random_range(1..=200);
        let alphabet = rng.random_range(1..=5);
        let cols: Vec<Vec<u32>> = (0..d)
            .map(|_| (0..rows).map(|_| rng.random_range(0..alphabet)).collect())
            .collect();
        let profile = prefix_rate_profile(&cols, LogBase::Natural).map_err(|e| e.to_string())?;
        for j in 1..=d {
            let oracle = brute_prefix_rate(&cols, j);
            close(
                &format!("case {case} prefix {j}"),
                profile[j - 1].value,
                oracle,
                ORACLE_TOL,
            )?;
        }
        for redundant in [vec![7; rows], cols[rng.random_range(0..d)].clone()] {
            let mut more = cols.clone();
            more.push(redundant);
            let p = prefix_rate_profile(&more, LogBase::Natural).map_err(|e| e.to_string())?;
            let want = p[d - 1].value * d as f64 / (d + 1) as f64;
            close(
                &format!("case {case} redundant column"),
                p[d].value,
                want,
                TIGHT_TOL,
            )?;
        }
        let k = rng.random_range(1..=d);
        let m = FeatureMatrix::from_columns(cols.clone()).unwrap();
        let before = select_features_extropy(&m, k, LogBase::Two).map_err(|e| e.to_string())?;
        let mut recoded = cols.clone();
        let c = rng.random_range(0..d);
        let shift: u32 = rng.random_range(1..50);
        recoded[c] = recoded[c]
            .iter()
            .map(|&v| (alphabet - 1 - v) * 3 + shift)
            .collect();
        let m2 = FeatureMatrix::from_columns(recoded).unwrap();
        let after = select_features_extropy(&m2, k, LogBase::Two).map_err(|e| e.to_string())?;
        ensure(
            before.selected == after.selected && before.scores == after.scores,
            || format!("case {case}: recoding changed the selection"),
        )?;
    }
    Ok("100 matrices checked against brute force".into())
}

fn criterion_7() -> Outcome {
    let data = data_dir().join("synth.csv");
    let ds = read_csv(&data, true, b',').map_err(|e| e.to_string())?;
    ensure(ds.n_rows() == 500 && ds.n_columns() == 9, || {
        "unexpected synthetic shape".into()
    })?;
    let prepared =
        prepare(&ds, Some("y"), &DiscretizeSpec::default()).map_err(|e| e.to_string())?;
    let (mut ext, mut rnd) = (0.0, 0.0);
    for seed in 0..20 {
        let cfg = EvalConfig {
            k: 3,
            methods: vec![Method::Extropy, Method::Random],
            seed,
            ..Default::default()
        };
        let e = evaluate(&prepared, &cfg).map_err(|e| e.to_string())?;
        ext += e.results[0].metrics.accuracy / 20.0;
        rnd += e.results[1].metrics.accuracy / 20.0;
    }
    ensure(ext >= rnd, || {
        format!("mean accuracy extropy {ext:.4} < random {rnd:.4}")
    })?;

    let run = || -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_extropy"))
            .current_dir(env!("CARGO_MANIFEST_DIR"))
            .env_remove("EXTROPY_OUT_DIR")
            .args([
                "evaluate",
                "--data",
                "tests/data/synth.csv",
                "--target",
                "y",
                "--k",
                "3",
                "--methods",
                "extropy,mi,chi2,fscore",
                "--seed",
                "42",
            ])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || {
            String::from_utf8_lossy(&out.stderr).into_owned()
        })?;
        Ok(out.stdout)
    };
    let first = run()?;
    let second = run()?;
    ensure(first == second, || {
        "evaluate output differs between reruns".into()
    })?;
    let pinned =
        std::fs::read(data_dir().join("evaluate_seed42.json")).map_err(|e| e.to_string())?;
    ensure(first == pinned, || {
        "evaluate output differs from the pinned snapshot".into()
    })?;
    Ok(format!(
        "mean accuracy extropy {ext:.4} >= random {rnd:.4}; evaluate JSON bit-identical"
    ))
}

fn exact(name: &str, m: &Metrics, want: (f64, f64, f64)) -> Result<(), String> {
    ensure((m.accuracy, m.f1, m.tpr) == want, || {
        format!(
            "{name}: got ({}, {}, {}), expected {want:?}",
            m.accuracy, m.f1, m.tpr
        )
    })
}

fn labels(tp: usize, fp: usize, fn_: usize, tn: usize) -> (Vec<u32>, Vec<u32>) {
    let mut t = Vec::new();
    let mut p = Vec::new();
    for (truth, pred, n) in [(1, 1, tp), (0, 1, fp), (1, 0, fn_), (0, 0, tn)] {
        t.extend(std::iter::repeat_n(truth, n));
        p.extend(std::iter::repeat_n(pred, n));
    }
    (t, p)
}

fn criterion_8() -> Outcome {
    let cases = [
        ("perfect", (3, 0, 0, 7), (1.0, 1.0, 1.0)),
        (
            "tp2 fp1 fn1 tn6",
            (2, 1, 1, 6),
            (8.0 / 10.0, 4.0 / 6.0, 2.0 / 3.0),
        ),
        (
            "tp2 fp1 fn2 tn5",
            (2, 1, 2, 5),
            (7.0 / 10.0, 4.0 / 7.0, 2.0 / 4.0),
        ),
        ("all negative", (0, 0, 3, 7), (0.7, 0.0, 0.0)),
        ("no positives", (0, 0, 0, 4), (1.0, 0.0, 0.0)),
    ];
    for (name, (tp, fp, fn_, tn), want) in cases {
        let (t, p) = labels(tp, fp, fn_, tn);
        let m = classification_metrics(&t, &p, 1).map_err(|e| e.to_string())?;
        ensure(
            (m.tp, m.fp, m.fn_, m.tn) == (tp as u64, fp as u64, fn_ as u64, tn as u64),
            || format!("{name}: confusion counts wrong"),
        )?;
        exact(name, &m, want)?;
    }
    close("f1 fixture", 4.0 / 7.0, 0.571429, 1e-6)?;
    Ok(format!("{} fixtures exact", cases.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        (
            "worked-example fidelity",
            criterion_1,
            Duration::from_secs(1),
        ),
        (
            "reference series rates",
            criterion_2,
            Duration::from_secs(5),
        ),
        ("identity suites", criterion_3, Duration::from_secs(30)),
        ("asymptotic checks", criterion_4, Duration::from_secs(1)),
        (
            "bifurcation characterization",
            criterion_5,
            Duration::from_secs(10),
        ),
        (
            "feature-selection oracle",
            criterion_6,
            Duration::from_secs(20),
        ),
        (
            "end-to-end evaluation",
            criterion_7,
            Duration::from_secs(60),
        ),
        ("metrics exactness", criterion_8, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > *limit => Err(format!("{msg}; took {elapsed:?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!(
                "criterion {} {name}: PASS ({:.2} s) {msg}",
                i + 1,
                elapsed.as_secs_f64()
            ),
            Err(msg) => {
                failed += 1;
                println!(
                    "criterion {} {name}: FAIL ({:.2} s) {msg}",
                    i + 1,
                    elapsed.as_secs_f64()
                );
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
