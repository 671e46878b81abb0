use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probabilities must sum to one within this tolerance.
pub const PROBABILITY_SUM_TOL: f64 = 1e-12;

/// Finite-support belief over states, in canonical (increasing-state) order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPosterior", into = "RawPosterior")]
pub struct Posterior {
    support: Vec<f64>,
    probabilities: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawPosterior {
    states: Vec<f64>,
    probabilities: Vec<f64>,
}

impl TryFrom<RawPosterior> for Posterior {
    type Error = Error;

    fn try_from(raw: RawPosterior) -> Result<Self> {
        if raw.states.len() != raw.probabilities.len() {
            return Err(Error::InvalidPosterior("states and probabilities differ in length".into()));
        }
        let pairs: Vec<(f64, f64)> = raw.states.into_iter().zip(raw.probabilities).collect();
        Posterior::from_pairs(&pairs)
    }
}

impl From<Posterior> for RawPosterior {
    fn from(p: Posterior) -> Self {
        RawPosterior { states: p.support, probabilities: p.probabilities }
    }
}

impl Posterior {
    /// Validates an already-canonical posterior.
    pub fn new(support: Vec<f64>, probabilities: Vec<f64>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidPosterior("support is empty".into()));
        }
        if support.len() != probabilities.len() {
            return Err(Error::InvalidPosterior(format!(
                "{} states but {} probabilities",
                support.len(),
                probabilities.len()
            )));
        }
        if let Some(s) = support.iter().find(|s| !s.is_finite()) {
            return Err(Error::InvalidPosterior(format!("non-finite state {s}")));
        }
        if let Some(p) = probabilities.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::InvalidPosterior(format!("probability {p} is not strictly positive")));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPosterior("support must be strictly increasing".into()));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > PROBABILITY_SUM_TOL {
            return Err(Error::InvalidPosterior(format!("probabilities sum to {total}")));
        }
        Ok(Self { support, probabilities })
    }

    /// Sorts `(state, probability)` pairs into canonical order and validates.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let mut pairs = pairs.to_vec();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let (support, probabilities) = pairs.into_iter().unzip();
        Self::new(support, probabilities)
    }

    /// Builds a posterior from nonnegative masses: zero masses are dropped and
    /// the rest normalized.
    pub fn from_masses(pairs: &[(f64, f64)]) -> Result<Self> {
        if let Some(&(_, m)) = pairs.iter().find(|(_, m)| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::InvalidPosterior(format!("mass {m} is negative or non-finite")));
        }
        let kept: Vec<(f64, f64)> = pairs.iter().copied().filter(|(_, m)| *m > 0.0).collect();
        let total: f64 = kept.iter().map(|(_, m)| m).sum();
        if kept.is_empty() || total <= 0.0 {
            return Err(Error::InvalidPosterior("all masses are zero".into()));
        }
        let normalized: Vec<(f64, f64)> = kept.iter().map(|&(s, m)| (s, m / total)).collect();
        Self::from_pairs(&normalized)
    }

    pub fn point(state: f64) -> Result<Self> {
        Self::new(vec![state], vec![1.0])
    }

    /// Two-point posterior with `p_low` on `low` and the rest on `high`.
    pub fn binary(low: f64, high: f64, p_low: f64) -> Result<Self> {
        if !(p_low > 0.0 && p_low < 1.0) {
            return Err(Error::InvalidPosterior(format!("binary weight {p_low} must lie in (0, 1)")));
        }
        Self::from_pairs(&[(low, p_low), (high, 1.0 - p_low)])
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.support.iter().copied().zip(self.probabilities.iter().copied())
    }

    /// Probability of `state`, zero when it is not in the support.
    pub fn probability_of(&self, state: f64) -> f64 {
        self.support
            .iter()
            .position(|&s| s == state)
            .map_or(0.0, |i| self.probabilities[i])
    }

    pub fn expectation(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(s, p)| p * f(s)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.expectation(|s| s)
    }
}
