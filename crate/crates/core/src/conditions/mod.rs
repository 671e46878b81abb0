//! Grid checkers for the ratio conditions on `V_a / (-U_aa)`.
//!
//! Every verdict is evidence at a finite grid resolution, never a proof over
//! the continuum. Pairwise conditions report raw margins (`ratio₂ − ratio₁`,
//! sign-adjusted per condition) against a tolerance of `1e-9` times the median
//! `|ratio|` on the grid. Pointwise derivative conditions report margins
//! relative to the median magnitude of the inequality's terms against `1e-9`.

mod pairwise;
mod pointwise;
pub mod reference;
mod sweep;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{linspace, Interval, StateActionModel};

pub use pairwise::{
    check_derivable_condition, check_linear_receiver, check_suboptimality, check_weak_condition,
    LinearReceiverVerdict, PairCheck, SuboptimalityOutcome, SuboptimalityReport,
};
pub use pointwise::{check_derivative_conditions, check_linear_case, DerivativeVerdict, LinearCaseVerdict};
pub(crate) use pointwise::{combine, pointwise_verdict, PointwiseTerms};

/// Relative tolerance separating weak ties from violations.
pub const MARGIN_TOL_REL: f64 = 1e-9;
/// `|U_aω|` at or below this is treated as zero; such points are skipped.
pub const DERIV_TOL: f64 = 1e-9;
/// Maximum number of witnesses kept per verdict.
pub const MAX_WITNESSES: usize = 16;
pub const DEFAULT_STATE_POINTS: usize = 101;
pub const DEFAULT_ACTION_POINTS: usize = 201;

/// Rectangular grid of states and actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    state_points: Vec<f64>,
    action_points: Vec<f64>,
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.iter().all(|x| x.is_finite()) && xs.windows(2).all(|w| w[0] < w[1])
}

impl GridSpec {
    pub fn new(state_points: Vec<f64>, action_points: Vec<f64>) -> Result<Self> {
        if state_points.len() < 2 || action_points.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 state and 2 action points, got {}x{}",
                state_points.len(),
                action_points.len()
            )));
        }
        if !strictly_increasing(&state_points) || !strictly_increasing(&action_points) {
            return Err(Error::InvalidGrid("grid points must be finite and strictly increasing".into()));
        }
        Ok(Self { state_points, action_points })
    }

    pub fn uniform(states: Interval, actions: Interval, n_states: usize, n_actions: usize) -> Result<Self> {
        Self::new(states.linspace(n_states), actions.linspace(n_actions))
    }

    /// Default grid for a model: states span the state domain and actions span
    /// `[min a*·0.5, max a*·1.5]` (widened symmetrically for non-positive
    /// actions), clamped to the action domain.
    pub fn auto(model: &StateActionModel, n_states: usize, n_actions: usize) -> Result<Self> {
        let states = model.state_domain().linspace(n_states);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &w in &states {
            let a = model.state_best_response(w)?;
            lo = lo.min(a);
            hi = hi.max(a);
        }
        let (mut lo, mut hi) = (lo - 0.5 * lo.abs(), hi + 0.5 * hi.abs());
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        let dom = model.action_domain();
        let (lo, hi) = (lo.max(dom.lo), hi.min(dom.hi));
        Self::new(states, linspace(lo, hi, n_actions))
    }

    pub fn state_points(&self) -> &[f64] {
        &self.state_points
    }

    pub fn action_points(&self) -> &[f64] {
        &self.action_points
    }

    pub fn n_states(&self) -> usize {
        self.state_points.len()
    }

    pub fn n_actions(&self) -> usize {
        self.action_points.len()
    }

    pub fn resolution(&self) -> (usize, usize) {
        (self.n_states(), self.n_actions())
    }

    /// Errors unless every grid point lies in the model's domain rectangle.
    pub fn validate_for(&self, model: &StateActionModel) -> Result<()> {
        let (sd, ad) = (model.state_domain(), model.action_domain());
        let (s0, s1) = (self.state_points[0], *self.state_points.last().unwrap());
        let (a0, a1) = (self.action_points[0], *self.action_points.last().unwrap());
        if !(sd.contains(s0) && sd.contains(s1)) {
            return Err(Error::InvalidGrid(format!(
                "state points [{s0}, {s1}] leave the state domain [{}, {}]",
                sd.lo, sd.hi
            )));
        }
        if !(ad.contains(a0) && ad.contains(a1)) {
            return Err(Error::InvalidGrid(format!(
                "action points [{a0}, {a1}] leave the action domain [{}, {}]",
                ad.lo, ad.hi
            )));
        }
        Ok(())
    }

    /// True when the grid has exactly this state as a grid point.
    pub fn has_state(&self, state: f64) -> bool {
        self.state_points.contains(&state)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    HoldsStrictly,
    HoldsWeakly,
    Violated,
    Vacuous,
}

impl Status {
    pub fn holds(self) -> bool {
        matches!(self, Status::HoldsStrictly | Status::HoldsWeakly)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::HoldsStrictly => "HOLDS_STRICTLY",
            Status::HoldsWeakly => "HOLDS_WEAKLY",
            Status::Violated => "VIOLATED",
            Status::Vacuous => "VACUOUS",
        }
    }

    pub(crate) fn classify(min_margin: f64, tol: f64, pairs: u64) -> Self {
        if pairs == 0 {
            Status::Vacuous
        } else if min_margin < -tol {
            Status::Violated
        } else if min_margin > tol {
            Status::HoldsStrictly
        } else {
            Status::HoldsWeakly
        }
    }

    /// Conjunction of two sub-verdicts.
    pub fn and(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (Violated, _) | (_, Violated) => Violated,
            (Vacuous, s) | (s, Vacuous) => s,
            (HoldsStrictly, HoldsStrictly) => HoldsStrictly,
            _ => HoldsWeakly,
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub state: f64,
    pub action: f64,
}

/// A tested pair (or, for pointwise checks, a point repeated twice) with the
/// compared values and the sign-adjusted margin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub first: GridPoint,
    pub second: GridPoint,
    pub first_value: f64,
    pub second_value: f64,
    pub margin: f64,
}

impl Witness {
    /// Smallest margin first, then lexicographic on (ω₁, a₁, ω₂, a₂).
    pub(crate) fn order(&self, other: &Self) -> std::cmp::Ordering {
        self.margin
            .total_cmp(&other.margin)
            .then(self.first.state.total_cmp(&other.first.state))
            .then(self.first.action.total_cmp(&other.first.action))
            .then(self.second.state.total_cmp(&other.second.state))
            .then(self.second.action.total_cmp(&other.second.action))
    }
}

/// Outcome of one grid check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    pub condition: String,
    pub status: Status,
    pub min_margin: f64,
    pub margin_tol: f64,
    pub witnesses: Vec<Witness>,
    pub pairs_tested: u64,
    pub resolution: (usize, usize),
}

impl ConditionVerdict {
    pub(crate) fn from_parts(
        condition: &str,
        min_margin: f64,
        margin_tol: f64,
        witnesses: Vec<Witness>,
        pairs_tested: u64,
        resolution: (usize, usize),
    ) -> Self {
        let min_margin = if pairs_tested == 0 { 0.0 } else { min_margin };
        Self {
            condition: condition.to_string(),
            status: Status::classify(min_margin, margin_tol, pairs_tested),
            min_margin,
            margin_tol,
            witnesses,
            pairs_tested,
            resolution,
        }
    }

    pub fn holds(&self) -> bool {
        self.status.holds()
    }

    /// Human-readable qualifier attached to every grid verdict.
    pub fn evidence_label(&self) -> String {
        format!("evidence at resolution ({}, {})", self.resolution.0, self.resolution.1)
    }
}

/// Median of `|x|` over the values, used to scale tolerances.
pub(crate) fn median_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.into_iter().map(f64::abs).collect();
    if v.is_empty() {
        return 0.0;
    }
    let mid = v.len() / 2;
    v.select_nth_unstable_by(mid, |a, b| a.total_cmp(b));
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        let upper = v[mid];
        let lower = v[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

/// Ratio, receiver marginal utility, and receiver curvature on every grid
/// point, row-major by state.
pub(crate) struct GridTable {
    pub ratio: Vec<f64>,
    pub u_a: Vec<f64>,
    pub n_actions: usize,
}

impl GridTable {
    pub fn build(model: &StateActionModel, grid: &GridSpec) -> Result<Self> {
        grid.validate_for(model)?;
        let n = grid.n_states() * grid.n_actions();
        let mut ratio = Vec::with_capacity(n);
        let mut u_a = Vec::with_capacity(n);
        for &w in grid.state_points() {
            for &a in grid.action_points() {
                ratio.push(model.ratio(w, a)?);
                u_a.push(model.u_a(w, a));
            }
        }
        Ok(Self { ratio, u_a, n_actions: grid.n_actions() })
    }

    pub fn idx(&self, state_idx: usize, action_idx: usize) -> usize {
        state_idx * self.n_actions + action_idx
    }

    pub fn margin_tol(&self) -> f64 {
        MARGIN_TOL_REL * median_abs(self.ratio.iter().copied())
    }
}
