use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Posterior, StateActionModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedPosterior {
    pub posterior: Posterior,
    pub weight: f64,
}

/// A pooling message split into a point mass on `ω₁`, a point mass on `ω₂`,
/// and a remainder that still induces the pooled action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub a_star: f64,
    pub m1: WeightedPosterior,
    pub m2: WeightedPosterior,
    /// `None` when the original posterior is supported on `{ω₁, ω₂}` only.
    pub m_c: Option<WeightedPosterior>,
    /// `|w₁·U_a(ω₁,a*) + w₂·U_a(ω₂,a*)|`.
    pub balance_residual: f64,
    /// Expected marginal utility of the remainder at `a*`.
    pub remainder_marginal: f64,
}

impl Decomposition {
    /// Total probability of each state across the three messages.
    pub fn mixture(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        let parts = [Some(&self.m1), Some(&self.m2), self.m_c.as_ref()];
        for part in parts.into_iter().flatten() {
            for (s, p) in part.posterior.iter() {
                let mass = part.weight * p;
                match out.iter_mut().find(|e| e.0 == s) {
                    Some(e) => e.1 += mass,
                    None => out.push((s, mass)),
                }
            }
        }
        out.sort_by(|x, y| x.0.total_cmp(&y.0));
        out
    }
}

/// Splits `post` into three messages around its best response `a*`. Fractions
/// `θ₁`, `θ₂` of the masses on `ω₁ = support[i1]` and `ω₂ = support[i2]` are
/// moved into point-mass messages, with `θ₁π₁U_a(ω₁,a*) + θ₂π₂U_a(ω₂,a*) = 0`
/// and the larger fraction fixed at one half, so the remainder keeps full
/// support and still has `a*` as its best response.
pub fn three_message_decomposition(
    model: &StateActionModel,
    post: &Posterior,
    i1: usize,
    i2: usize,
) -> Result<Decomposition> {
    let n = post.len();
    if i1 >= n || i2 >= n || i1 == i2 {
        return Err(Error::NoOpposingStates(format!("indices ({i1}, {i2}) invalid for a support of size {n}")));
    }
    let a = model.best_response(post)?;
    let (s, p) = (post.support(), post.probabilities());
    let (u1, u2) = (model.u_a(s[i1], a), model.u_a(s[i2], a));
    if !(u1 < 0.0 && u2 > 0.0) {
        return Err(Error::NoOpposingStates(format!(
            "need U_a(ω₁, a*) < 0 < U_a(ω₂, a*), got {u1:e} and {u2:e} at a* = {a}"
        )));
    }

    let (big_a, big_b) = (p[i1] * -u1, p[i2] * u2);
    let (theta1, theta2) = if n == 2 {
        (1.0, 1.0)
    } else if big_a >= big_b {
        (0.5 * big_b / big_a, 0.5)
    } else {
        (0.5, 0.5 * big_a / big_b)
    };
    if !(theta1.is_finite() && theta2.is_finite() && theta1 > 0.0 && theta2 > 0.0) {
        return Err(Error::InfeasibleWeights(format!("fractions {theta1}, {theta2} are not positive")));
    }
    let (w1, w2) = (theta1 * p[i1], theta2 * p[i2]);
    let balance_residual = (w1 * u1 + w2 * u2).abs();

    let m_c = if n == 2 {
        None
    } else {
        let masses: Vec<f64> = (0..n)
            .map(|i| match i {
                _ if i == i1 => p[i] - w1,
                _ if i == i2 => p[i] - w2,
                _ => p[i],
            })
            .collect();
        let weight: f64 = masses.iter().sum();
        if !(weight > 0.0) {
            return Err(Error::InfeasibleWeights(format!("remainder weight {weight} is not positive")));
        }
        let probs: Vec<f64> = masses.iter().map(|m| m / weight).collect();
        Some(WeightedPosterior { posterior: Posterior::new(s.to_vec(), probs)?, weight })
    };
    let remainder_marginal = m_c.as_ref().map_or(0.0, |m| model.expected_marginal(&m.posterior, a));
    Ok(Decomposition {
        a_star: a,
        m1: WeightedPosterior { posterior: Posterior::point(s[i1])?, weight: w1 },
        m2: WeightedPosterior { posterior: Posterior::point(s[i2])?, weight: w2 },
        m_c,
        balance_residual,
        remainder_marginal,
    })
}
