use serde::{Deserialize, Serialize};

use super::quadrature::integrate;
use super::ENV_TOL;
use crate::error::{Error, Result};
use crate::model::{linspace, Posterior, StateActionModel};

/// Pooling two states versus revealing them. States are in canonical order:
/// `low_state` has the (weakly) lower full-information action.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinarySplitResult {
    pub low_state: f64,
    pub high_state: f64,
    /// Probability of `low_state` under the pooling message.
    pub p_low: f64,
    pub a_pool: f64,
    pub a_low: f64,
    pub a_high: f64,
    /// `p_low·U_a(low_state, a_pool)`, equal to `−p_high·U_a(high_state, a_pool)`.
    pub k: f64,
    /// Sender's gain from revealing the two states instead of pooling them.
    pub gain: f64,
    /// Expected action under revelation minus the pooled action.
    pub effort_delta: f64,
}

impl BinarySplitResult {
    pub fn p_high(&self) -> f64 {
        1.0 - self.p_low
    }

    /// `|p_low·U_a(ω₁, a*) + p_high·U_a(ω₂, a*)|`.
    pub fn foc_residual(&self, model: &StateActionModel) -> f64 {
        (self.p_low * model.u_a(self.low_state, self.a_pool)
            + self.p_high() * model.u_a(self.high_state, self.a_pool))
        .abs()
    }
}

struct Canonical {
    low: f64,
    high: f64,
    p_low: f64,
    a_low: f64,
    a_high: f64,
}

fn canonical(model: &StateActionModel, w1: f64, w2: f64, p1: f64) -> Result<Canonical> {
    if !(p1 > 0.0 && p1 < 1.0) {
        return Err(Error::InvalidArgument(format!("pooling weight {p1} must lie in (0, 1)")));
    }
    if w1 == w2 {
        return Err(Error::InvalidArgument(format!("states must differ, both are {w1}")));
    }
    let a1 = model.state_best_response(w1)?;
    let a2 = model.state_best_response(w2)?;
    Ok(if a1 <= a2 {
        Canonical { low: w1, high: w2, p_low: p1, a_low: a1, a_high: a2 }
    } else {
        Canonical { low: w2, high: w1, p_low: 1.0 - p1, a_low: a2, a_high: a1 }
    })
}

fn pooled_action(model: &StateActionModel, c: &Canonical) -> Result<f64> {
    if c.a_low == c.a_high {
        return Ok(c.a_low);
    }
    let post = Posterior::from_pairs(&[(c.low, c.p_low), (c.high, 1.0 - c.p_low)])?;
    model.best_response(&post)
}

/// Sender's gain from revealing `ω₁` and `ω₂` rather than pooling them under
/// a message that puts probability `p1` on `ω₁`:
///
/// ```text
/// π₂[V(ω₂,a₂*) − V(ω₂,a*)] − π₁[V(ω₁,a*) − V(ω₁,a₁*)]
/// ```
pub fn binary_split_gain(model: &StateActionModel, w1: f64, w2: f64, p1: f64) -> Result<BinarySplitResult> {
    let c = canonical(model, w1, w2, p1)?;
    let a = pooled_action(model, &c)?;
    let p_high = 1.0 - c.p_low;
    let gain = p_high * (model.v(c.high, c.a_high) - model.v(c.high, a))
        - c.p_low * (model.v(c.low, a) - model.v(c.low, c.a_low));
    Ok(BinarySplitResult {
        low_state: c.low,
        high_state: c.high,
        p_low: c.p_low,
        a_pool: a,
        a_low: c.a_low,
        a_high: c.a_high,
        k: c.p_low * model.u_a(c.low, a),
        gain,
        effort_delta: c.p_low * c.a_low + p_high * c.a_high - a,
    })
}

/// The same gain written as `∫ π₂V_a(ω₂,·)` over `[a*, a₂*]` minus
/// `∫ π₁V_a(ω₁,·)` over `[a₁*, a*]`, by composite Gauss–Legendre quadrature.
pub fn gain_via_integrals(model: &StateActionModel, w1: f64, w2: f64, p1: f64, quad_points: usize) -> Result<f64> {
    let c = canonical(model, w1, w2, p1)?;
    let a = pooled_action(model, &c)?;
    let upper = integrate(|x| model.v_a(c.high, x), a, c.a_high, quad_points)?;
    let lower = integrate(|x| model.v_a(c.low, x), c.a_low, a, quad_points)?;
    Ok((1.0 - c.p_low) * upper - c.p_low * lower)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChangeOfVariables {
    pub k: f64,
    /// Largest endpoint mismatch of the two maps.
    pub residual: f64,
    pub samples: usize,
}

/// Checks that `x₁(a) = π₁U_a(ω₁,a)` decreases from 0 to `k` on `[a₁*, a*]`
/// and `x₂(a) = −π₂U_a(ω₂,a)` increases from `k` to 0 on `[a*, a₂*]`.
pub fn change_of_variables_check(
    model: &StateActionModel,
    w1: f64,
    w2: f64,
    p1: f64,
    samples: usize,
) -> Result<ChangeOfVariables> {
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    let c = canonical(model, w1, w2, p1)?;
    let a = pooled_action(model, &c)?;
    if !(c.a_low < a && a < c.a_high) {
        return Err(Error::InvalidArgument(format!(
            "need a₁* < a* < a₂*, got {}, {a}, {}",
            c.a_low, c.a_high
        )));
    }
    let p_high = 1.0 - c.p_low;
    let x1: Vec<f64> = linspace(c.a_low, a, samples).iter().map(|&t| c.p_low * model.u_a(c.low, t)).collect();
    let x2: Vec<f64> = linspace(a, c.a_high, samples).iter().map(|&t| -p_high * model.u_a(c.high, t)).collect();
    if let Some(i) = x1.windows(2).position(|w| w[1] > w[0]) {
        return Err(Error::MonotonicityViolation(format!("x₁ increases after sample {i} on [{}, {a}]", c.a_low)));
    }
    if let Some(i) = x2.windows(2).position(|w| w[1] < w[0]) {
        return Err(Error::MonotonicityViolation(format!("x₂ decreases after sample {i} on [{a}, {}]", c.a_high)));
    }
    let k = x1[samples - 1];
    let residual = [x1[0], x2[samples - 1], x2[0] - k].iter().fold(0.0f64, |m, r| m.max(r.abs()));
    Ok(ChangeOfVariables { k, residual, samples })
}

/// All binary splits over a support and a grid of pooling weights, with the
/// most negative gain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstPairReport {
    pub rows: Vec<BinarySplitResult>,
    pub min_gain: f64,
    pub worst: BinarySplitResult,
    /// True when `min_gain < −ENV_TOL`: pooling the worst pair strictly helps
    /// the sender.
    pub pooling_improves: bool,
}

/// Evaluates `binary_split_gain` for every pair of support states and every
/// `π₁ = k/(pi_grid + 1)`, `k = 1..=pi_grid`, where `π₁` is the weight on the
/// smaller state of the pair.
pub fn binary_pair_scan(model: &StateActionModel, support: &[f64], pi_grid: usize) -> Result<WorstPairReport> {
    if support.len() < 2 {
        return Err(Error::InvalidArgument("binary pair scan needs at least 2 states".into()));
    }
    if pi_grid == 0 {
        return Err(Error::InvalidArgument("pi grid must have at least one point".into()));
    }
    let mut states = support.to_vec();
    states.sort_by(f64::total_cmp);
    let mut rows = Vec::new();
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            for k in 1..=pi_grid {
                let p = k as f64 / (pi_grid + 1) as f64;
                rows.push(binary_split_gain(model, states[i], states[j], p)?);
            }
        }
    }
    let mut worst = rows[0];
    for r in &rows[1..] {
        if r.gain < worst.gain {
            worst = *r;
        }
    }
    Ok(WorstPairReport { min_gain: worst.gain, worst, pooling_improves: worst.gain < -ENV_TOL, rows })
}
