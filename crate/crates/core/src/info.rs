//! Entropy, extropy and the identities tying them together.
//!
//! All functionals are computed in nats and converted to the requested
//! [`LogBase`] at the end. Terms with a zero argument inside the logarithm
//! contribute zero (`0 · log 0 = 0`).

use std::collections::BTreeMap;

use serde::Serialize;

use crate::base::LogBase;
use crate::dist::{JointPmf, Pmf};
use crate::error::{Error, Result};

/// `x ln x` with the `0 ln 0 = 0` convention.
#[inline]
pub(crate) fn xlnx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// `(1 - p) ln(1 - p)`, accurate for small `p` and zero at `p = 1`.
#[inline]
pub(crate) fn complement_xlnx(p: f64) -> f64 {
    let q = 1.0 - p;
    if q > 0.0 {
        q * (-p).ln_1p()
    } else {
        0.0
    }
}

pub(crate) fn entropy_nats(masses: &[f64]) -> f64 {
    -masses.iter().map(|&p| xlnx(p)).sum::<f64>()
}

pub(crate) fn extropy_nats(masses: &[f64]) -> f64 {
    -masses.iter().map(|&p| complement_xlnx(p)).sum::<f64>()
}

/// Shannon entropy `-Σ p log p`.
pub fn shannon_entropy(p: &Pmf, base: LogBase) -> f64 {
    base.from_nats(entropy_nats(p.masses())).max(0.0)
}

/// Extropy `-Σ (1 - p) log(1 - p)`.
pub fn extropy(p: &Pmf, base: LogBase) -> f64 {
    base.from_nats(extropy_nats(p.masses())).max(0.0)
}

/// Extropy over unnormalized masses: `-Σ (T - m) log(T - m)` with `T = Σ m`.
///
/// Reduces to [`extropy`] when the masses sum to one. The value may be
/// negative once `T - m` exceeds one.
pub fn generalized_extropy(masses: &[f64], base: LogBase) -> Result<f64> {
    if masses.iter().any(|m| !m.is_finite() || *m < 0.0) {
        return Err(Error::invalid("masses must be finite and non-negative"));
    }
    let total: f64 = masses.iter().sum();
    if total <= 0.0 {
        return Err(Error::invalid(
            "generalized extropy needs a positive total mass",
        ));
    }
    let nats = -masses
        .iter()
        .map(|&m| xlnx((total - m).max(0.0)))
        .sum::<f64>();
    Ok(base.from_nats(nats))
}

pub fn joint_entropy(j: &JointPmf, base: LogBase) -> f64 {
    base.from_nats(entropy_nats(&j.masses())).max(0.0)
}

/// Extropy of the flattened joint table.
pub fn joint_extropy(j: &JointPmf, base: LogBase) -> f64 {
    base.from_nats(extropy_nats(&j.masses())).max(0.0)
}

/// Groups the table by the `given` axes and returns, for each conditioning
/// value, its probability and the unnormalized slice over `target`.
fn conditional_slices(
    j: &JointPmf,
    target: usize,
    given: &[usize],
) -> Result<Vec<(f64, Vec<f64>)>> {
    if given.is_empty() {
        return Err(Error::invalid(
            "conditional extropy needs a conditioning axis",
        ));
    }
    if given.contains(&target) {
        return Err(Error::invalid("target axis cannot also be conditioned on"));
    }
    let mut axes = vec![target];
    axes.extend_from_slice(given);
    let proj = j.project(&axes)?;
    let m_target = j.support_sizes()[target];
    let mut slices: BTreeMap<&[usize], (f64, Vec<f64>)> = BTreeMap::new();
    for (t, p) in proj.iter() {
        let slot = slices
            .entry(&t[1..])
            .or_insert_with(|| (0.0, vec![0.0; m_target]));
        slot.0 += p;
        slot.1[t[0]] += p;
    }
    Ok(slices.into_values().collect())
}

/// `J(target | given) = Σ_y p(y) · J(target | given = y)`.
pub fn conditional_extropy(
    j: &JointPmf,
    target_axis: usize,
    given_axis: usize,
    base: LogBase,
) -> Result<f64> {
    conditional_extropy_given(j, target_axis, &[given_axis], base)
}

/// Conditional extropy with several conditioning axes flattened into one
/// composite axis.
pub fn conditional_extropy_given(
    j: &JointPmf,
    target_axis: usize,
    given_axes: &[usize],
    base: LogBase,
) -> Result<f64> {
    let mut nats = 0.0;
    for (p_y, slice) in conditional_slices(j, target_axis, given_axes)? {
        if p_y > 0.0 {
            let cond: Vec<f64> = slice.iter().map(|&p| p / p_y).collect();
            nats += p_y * extropy_nats(&cond);
        }
    }
    Ok(base.from_nats(nats).max(0.0))
}

/// `H(p) + J(p) - Σ_i H({p_i, 1 - p_i})`; zero up to rounding.
pub fn duality_gap(p: &Pmf, base: LogBase) -> f64 {
    let event_wise: f64 = p
        .masses()
        .iter()
        .map(|&pi| -(xlnx(pi) + complement_xlnx(pi)))
        .sum();
    shannon_entropy(p, base) + extropy(p, base) - base.from_nats(event_wise)
}

/// `H(q) - [log(m - 1) + J(p) / (m - 1)]` with `q_i = (1 - p_i) / (m - 1)`,
/// where `m` is the number of masses.
pub fn rescaled_entropy_identity_gap(p: &Pmf, base: LogBase) -> Result<f64> {
    let m = p.len();
    if m < 2 {
        return Err(Error::domain("rescaling needs at least two masses (log 0)"));
    }
    let scale = (m - 1) as f64;
    let q: Vec<f64> = p.masses().iter().map(|&pi| (1.0 - pi) / scale).collect();
    let lhs = base.from_nats(entropy_nats(&q));
    let rhs = base.log(scale) + extropy(p, base) / scale;
    Ok(lhs - rhs)
}

/// Simpson's diversity index `1 - Σ p²`.
pub fn simpson_diversity(p: &Pmf) -> f64 {
    1.0 - p.masses().iter().map(|&x| x * x).sum::<f64>()
}

fn require_arity_two(j: &JointPmf) -> Result<()> {
    if j.arity() != 2 {
        return Err(Error::invalid(format!(
            "expected a two-axis joint, got arity {}",
            j.arity()
        )));
    }
    Ok(())
}

/// `-Σ_{i,j} (p_j - p_ij) log(p_j - p_ij)` over the dense X axis (axis 0)
/// and the observed values of Y (axis 1).
pub fn generalized_conditional_extropy(j: &JointPmf, base: LogBase) -> Result<f64> {
    require_arity_two(j)?;
    let mut nats = 0.0;
    for (p_y, slice) in conditional_slices(j, 0, &[1])? {
        nats -= slice.iter().map(|&p| xlnx((p_y - p).max(0.0))).sum::<f64>();
    }
    Ok(base.from_nats(nats))
}

/// `J(X|Y) - [genJ(X|Y) - (m_X - 1) H(Y)]`, which vanishes identically.
pub fn generalized_conditional_identity_gap(j: &JointPmf, base: LogBase) -> Result<f64> {
    require_arity_two(j)?;
    let cond = conditional_extropy(j, 0, 1, base)?;
    let gen = generalized_conditional_extropy(j, base)?;
    let m_x = j.support_sizes()[0] as f64;
    let h_y = shannon_entropy(&j.marginal(1)?, base);
    Ok(cond - (gen - (m_x - 1.0) * h_y))
}

/// Diagnostic comparison of a two-axis joint extropy against the bounds
/// in terms of marginal and conditional extropies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub joint: f64,
    pub conditional_x_given_y: f64,
    pub extropy_x: f64,
    pub extropy_y: f64,
    /// Positive-mass category counts of X and Y.
    pub m_x: usize,
    pub m_y: usize,
    pub max_joint_mass: f64,
    /// Every marginal mass of X is below `1 - 1/e`.
    pub x_marginals_below_threshold: bool,
    pub y_marginals_below_threshold: bool,
    /// `J(X,Y) ≤ m_Y · J(X)`
    pub joint_le_m_y_extropy_x: bool,
    /// `J(X,Y) ≤ m_X · J(Y)`
    pub joint_le_m_x_extropy_y: bool,
    /// `J(X,Y) ≤ J(X|Y)`; reported only, it fails on simple tables.
    pub joint_le_conditional: bool,
}

pub fn joint_bounds_report(j: &JointPmf, base: LogBase) -> Result<BoundsReport> {
    require_arity_two(j)?;
    let threshold = 1.0 - (-1.0f64).exp();
    let px = j.marginal(0)?;
    let py = j.marginal(1)?;
    let joint = joint_extropy(j, base);
    let cond = conditional_extropy(j, 0, 1, base)?;
    let jx = extropy(&px, base);
    let jy = extropy(&py, base);
    let m_x = px.support_size();
    let m_y = py.support_size();
    let max_joint_mass = j.iter().map(|(_, p)| p).fold(0.0, f64::max);
    Ok(BoundsReport {
        joint,
        conditional_x_given_y: cond,
        extropy_x: jx,
        extropy_y: jy,
        m_x,
        m_y,
        max_joint_mass,
        x_marginals_below_threshold: px.masses().iter().all(|&p| p < threshold),
        y_marginals_below_threshold: py.masses().iter().all(|&p| p < threshold),
        joint_le_m_y_extropy_x: joint <= m_y as f64 * jx,
        joint_le_m_x_extropy_y: joint <= m_x as f64 * jy,
        joint_le_conditional: joint <= cond,
    })
}
