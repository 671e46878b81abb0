use serde::{Deserialize, Serialize};

use super::lp::maximize;
use super::{ENV_TOL, MIN_LINE_RESOLUTION};
use crate::error::{Error, Result};
use crate::model::{linspace, Posterior, StateActionModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EnvelopeVerdict {
    FullDisclosureOptimal,
    FullDisclosureSuboptimal,
}

impl EnvelopeVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            EnvelopeVerdict::FullDisclosureOptimal => "FULL_DISCLOSURE_OPTIMAL",
            EnvelopeVerdict::FullDisclosureSuboptimal => "FULL_DISCLOSURE_SUBOPTIMAL",
        }
    }
}

/// Sender value at one sampled posterior; `probabilities` is parallel to
/// `EnvelopeResult::states`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeSample {
    pub probabilities: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitComponent {
    pub posterior: Posterior,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeResult {
    /// States in increasing order.
    pub states: Vec<f64>,
    pub prior: Vec<f64>,
    pub samples: Vec<EnvelopeSample>,
    pub envelope_value_at_prior: f64,
    pub full_disclosure_value: f64,
    /// Sender value when nothing is revealed.
    pub pooled_value: f64,
    /// Posteriors and weights attaining the envelope at the prior.
    pub optimal_split: Vec<SplitComponent>,
    /// Upper hull vertices `(p, v̂)` for two-state instances, empty otherwise.
    pub hull: Vec<(f64, f64)>,
    pub verdict: EnvelopeVerdict,
    /// `envelope − full disclosure` when suboptimal, otherwise
    /// `full disclosure − pooled value`.
    pub margin: f64,
}

impl EnvelopeResult {
    /// Weighted average of the split posteriors, parallel to `states`.
    pub fn split_mean(&self) -> Vec<f64> {
        self.states
            .iter()
            .map(|&s| self.optimal_split.iter().map(|c| c.weight * c.posterior.probability_of(s)).sum())
            .collect()
    }
}

fn value_at(model: &StateActionModel, states: &[f64], probs: &[f64]) -> Result<f64> {
    let pairs: Vec<(f64, f64)> = states.iter().copied().zip(probs.iter().copied()).collect();
    model.sender_value(&Posterior::from_masses(&pairs)?)
}

fn split_component(states: &[f64], probs: &[f64], weight: f64) -> Result<SplitComponent> {
    let pairs: Vec<(f64, f64)> = states.iter().copied().zip(probs.iter().copied()).collect();
    Ok(SplitComponent { posterior: Posterior::from_masses(&pairs)?, weight })
}

#[allow(clippy::too_many_arguments)]
fn finish(
    states: Vec<f64>,
    prior: Vec<f64>,
    samples: Vec<EnvelopeSample>,
    envelope: f64,
    full: f64,
    pooled: f64,
    optimal_split: Vec<SplitComponent>,
    hull: Vec<(f64, f64)>,
) -> EnvelopeResult {
    let (verdict, margin) = if envelope - full > ENV_TOL {
        (EnvelopeVerdict::FullDisclosureSuboptimal, envelope - full)
    } else {
        (EnvelopeVerdict::FullDisclosureOptimal, full - pooled)
    };
    EnvelopeResult {
        states,
        prior,
        samples,
        envelope_value_at_prior: envelope,
        full_disclosure_value: full,
        pooled_value: pooled,
        optimal_split,
        hull,
        verdict,
        margin,
    }
}

fn upper_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &p in points {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Concavification over posteriors on two states. `prior_p` is the prior
/// probability of `pair.1`; `v̂` is sampled at `resolution` equally spaced
/// probabilities plus the prior itself.
pub fn concavify_2state(
    model: &StateActionModel,
    pair: (f64, f64),
    prior_p: f64,
    resolution: usize,
) -> Result<EnvelopeResult> {
    if !(prior_p > 0.0 && prior_p < 1.0) {
        return Err(Error::InvalidArgument(format!("prior probability {prior_p} must lie in (0, 1)")));
    }
    if resolution < MIN_LINE_RESOLUTION {
        return Err(Error::InvalidArgument(format!(
            "resolution {resolution} is below the minimum {MIN_LINE_RESOLUTION}"
        )));
    }
    if !(pair.0 != pair.1 && pair.0.is_finite() && pair.1.is_finite()) {
        return Err(Error::DegenerateSimplex(format!("states {} and {} must be distinct", pair.0, pair.1)));
    }
    let (states, p) = if pair.0 < pair.1 { ([pair.0, pair.1], prior_p) } else { ([pair.1, pair.0], 1.0 - prior_p) };

    let mut grid = linspace(0.0, 1.0, resolution);
    if let Err(pos) = grid.binary_search_by(|x| x.total_cmp(&p)) {
        grid.insert(pos, p);
    }
    let mut points = Vec::with_capacity(grid.len());
    let mut samples = Vec::with_capacity(grid.len());
    for &q in &grid {
        let v = value_at(model, &states, &[1.0 - q, q])?;
        points.push((q, v));
        samples.push(EnvelopeSample { probabilities: vec![1.0 - q, q], value: v });
    }
    let (v0, v1) = (points[0].1, points[points.len() - 1].1);
    let full = (1.0 - p) * v0 + p * v1;
    let pooled = points.iter().find(|pt| pt.0 == p).map(|pt| pt.1).unwrap();

    let hull = upper_hull(&points);
    let i = hull.partition_point(|h| h.0 < p);
    let (envelope, split) = if hull[i].0 == p {
        (hull[i].1, vec![split_component(&states, &[1.0 - p, p], 1.0)?])
    } else {
        let (l, r) = (hull[i - 1], hull[i]);
        let wl = (r.0 - p) / (r.0 - l.0);
        let env = wl * l.1 + (1.0 - wl) * r.1;
        (
            env,
            vec![
                split_component(&states, &[1.0 - l.0, l.0], wl)?,
                split_component(&states, &[1.0 - r.0, r.0], 1.0 - wl)?,
            ],
        )
    };
    Ok(finish(states.to_vec(), vec![1.0 - p, p], samples, envelope, full, pooled, split, hull))
}

/// Concavification over posteriors on three states, sampled on a triangular
/// grid with `resolution` points per side. The envelope at the prior is the
/// optimum of the linear program over convex combinations of samples that
/// average to the prior.
pub fn concavify_3state(
    model: &StateActionModel,
    states: [f64; 3],
    prior: &Posterior,
    resolution: usize,
) -> Result<EnvelopeResult> {
    let mut sorted = states;
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) || sorted.iter().any(|s| !s.is_finite()) {
        return Err(Error::DegenerateSimplex(format!("states {states:?} must be distinct")));
    }
    if prior.support() != sorted {
        return Err(Error::InvalidPosterior(format!(
            "prior support {:?} must equal the states {sorted:?}",
            prior.support()
        )));
    }
    if resolution < 2 {
        return Err(Error::InvalidArgument("resolution must be at least 2".into()));
    }
    let pr = prior.probabilities();
    let n = resolution - 1;
    let mut samples = Vec::new();
    let mut vertex = [0usize; 3];
    for i in 0..=n {
        for j in 0..=n - i {
            let k = n - i - j;
            let q = [i as f64 / n as f64, j as f64 / n as f64, k as f64 / n as f64];
            for (v, &count) in [i, j, k].iter().enumerate() {
                if count == n {
                    vertex[v] = samples.len();
                }
            }
            let value = value_at(model, &sorted, &q)?;
            samples.push(EnvelopeSample { probabilities: q.to_vec(), value });
        }
    }
    let pooled = model.sender_value(prior)?;
    if !samples.iter().any(|s| s.probabilities == pr) {
        samples.push(EnvelopeSample { probabilities: pr.to_vec(), value: pooled });
    }
    let full: f64 = (0..3).map(|v| pr[v] * samples[vertex[v]].value).sum();

    let cols: Vec<[f64; 3]> = samples.iter().map(|s| [s.probabilities[0], s.probabilities[1], s.probabilities[2]]).collect();
    let c: Vec<f64> = samples.iter().map(|s| s.value).collect();
    let basis = maximize(&cols, &c, [pr[0], pr[1], pr[2]], vertex)?;
    let envelope: f64 = basis.iter().map(|&(j, l)| l * c[j]).sum();
    let split = basis
        .iter()
        .filter(|&&(_, l)| l > 0.0)
        .map(|&(j, l)| split_component(&sorted, &samples[j].probabilities, l))
        .collect::<Result<Vec<_>>>()?;
    Ok(finish(sorted.to_vec(), pr.to_vec(), samples, envelope, full, pooled, split, Vec::new()))
}
