use serde::{Deserialize, Serialize};

use super::sweep::{keyed_sweep, prefix_sweep, Entry, PairAccumulator};
use super::{median_abs, ConditionVerdict, GridPoint, GridSpec, GridTable, Status, MARGIN_TOL_REL};
use crate::error::{Error, Result};
use crate::model::StateActionModel;

fn entries_by_action(
    grid: &GridSpec,
    table: &GridTable,
    score: &[f64],
    flags: impl Fn(f64, f64, f64) -> (bool, bool),
) -> Vec<Vec<Entry>> {
    let (states, actions) = (grid.state_points(), grid.action_points());
    (0..actions.len())
        .map(|j| {
            (0..states.len())
                .map(|i| {
                    let k = table.idx(i, j);
                    let (lower, upper) = flags(states[i], actions[j], table.u_a[k]);
                    Entry {
                        point: GridPoint { state: states[i], action: actions[j] },
                        score: score[k],
                        key: table.u_a[k],
                        lower,
                        upper,
                    }
                })
                .collect()
        })
        .collect()
}

/// Main ratio condition: over grid pairs with `a₁ < a₂` and
/// `U_a(ω₁,a₁) < 0 < U_a(ω₂,a₂)`, checks `ratio(ω₁,a₁) ≤ ratio(ω₂,a₂)`.
pub fn check_weak_condition(model: &StateActionModel, grid: &GridSpec) -> Result<ConditionVerdict> {
    let table = GridTable::build(model, grid)?;
    let levels = entries_by_action(grid, &table, &table.ratio, |_, _, ua| (ua < 0.0, ua > 0.0));
    let mut acc = PairAccumulator::default();
    prefix_sweep(levels.iter().map(Vec::as_slice), &mut acc);
    Ok(ConditionVerdict::from_parts(
        "weak",
        acc.min_margin,
        table.margin_tol(),
        acc.witnesses.into_vec(),
        acc.pairs,
        grid.resolution(),
    ))
}

/// Stronger variant over the admissible set `a₁ < a₂`,
/// `U_a(ω₁,a₁) < U_a(ω₂,a₂)` with no sign restriction.
pub fn check_derivable_condition(model: &StateActionModel, grid: &GridSpec) -> Result<ConditionVerdict> {
    let table = GridTable::build(model, grid)?;
    let levels = entries_by_action(grid, &table, &table.ratio, |_, _, _| (true, true));
    let slices: Vec<&[Entry]> = levels.iter().map(Vec::as_slice).collect();
    let mut acc = PairAccumulator::default();
    keyed_sweep(&slices, &mut acc);
    Ok(ConditionVerdict::from_parts(
        "derivable",
        acc.min_margin,
        table.margin_tol(),
        acc.witnesses.into_vec(),
        acc.pairs,
        grid.resolution(),
    ))
}

/// Per state pair outcome of the suboptimality search. `low_state` is the
/// state with the lower best response. The verdict's margin is
/// `ratio(low, a₁) − ratio(high, a₂)`; the reversed inequality holds for all
/// admissible pairs exactly when the status is `HoldsStrictly`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCheck {
    pub low_state: f64,
    pub high_state: f64,
    pub low_action: f64,
    pub high_action: f64,
    pub verdict: ConditionVerdict,
}

impl PairCheck {
    pub fn is_witness(&self) -> bool {
        self.verdict.status == Status::HoldsStrictly
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SuboptimalityOutcome {
    WitnessFound,
    NoneFound,
}

impl SuboptimalityOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            SuboptimalityOutcome::WitnessFound => "WITNESS_FOUND",
            SuboptimalityOutcome::NoneFound => "NONE_FOUND",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuboptimalityReport {
    pub outcome: SuboptimalityOutcome,
    /// First witness `(low_state, high_state)` in canonical pair order.
    pub witness: Option<(f64, f64)>,
    pub pairs: Vec<PairCheck>,
    pub resolution: (usize, usize),
}

impl SuboptimalityReport {
    pub fn witness_check(&self) -> Option<&PairCheck> {
        self.pairs.iter().find(|p| p.is_witness())
    }
}

/// Searches the prior support for a state pair where the ratio strictly
/// decreases across every admissible action pair, non-vacuously.
pub fn check_suboptimality(
    model: &StateActionModel,
    grid: &GridSpec,
    prior_support: &[f64],
) -> Result<SuboptimalityReport> {
    if prior_support.len() < 2 {
        return Err(Error::InvalidArgument("suboptimality search needs at least 2 support states".into()));
    }
    let mut support = prior_support.to_vec();
    support.sort_by(f64::total_cmp);
    if support.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("support states must be distinct".into()));
    }
    let state_idx: Vec<usize> = support
        .iter()
        .map(|&s| {
            grid.state_points()
                .iter()
                .position(|&g| g == s)
                .ok_or_else(|| Error::InvalidArgument(format!("support state {s} is not a grid state point")))
        })
        .collect::<Result<_>>()?;
    let table = GridTable::build(model, grid)?;
    let tol = table.margin_tol();
    let best: Vec<f64> = support.iter().map(|&s| model.state_best_response(s)).collect::<Result<_>>()?;
    let neg_ratio: Vec<f64> = table.ratio.iter().map(|r| -r).collect();
    let actions = grid.action_points();

    let mut pairs = Vec::new();
    for i in 0..support.len() {
        for j in i + 1..support.len() {
            let (lo, hi) = if best[i] <= best[j] { (i, j) } else { (j, i) };
            let mut acc = PairAccumulator::default();
            if best[lo] < best[hi] {
                let levels: Vec<Vec<Entry>> = (0..actions.len())
                    .map(|a| {
                        [(lo, true), (hi, false)]
                            .into_iter()
                            .map(|(which, is_low)| {
                                let k = table.idx(state_idx[which], a);
                                let ua = table.u_a[k];
                                Entry {
                                    point: GridPoint { state: support[which], action: actions[a] },
                                    score: neg_ratio[k],
                                    key: ua,
                                    lower: is_low && ua < 0.0,
                                    upper: !is_low && ua > 0.0,
                                }
                            })
                            .collect()
                    })
                    .collect();
                prefix_sweep(levels.iter().map(Vec::as_slice), &mut acc);
            }
            let witnesses = acc
                .witnesses
                .into_vec()
                .into_iter()
                .map(|mut w| {
                    w.first_value = -w.first_value;
                    w.second_value = -w.second_value;
                    w
                })
                .collect();
            pairs.push(PairCheck {
                low_state: support[lo],
                high_state: support[hi],
                low_action: best[lo],
                high_action: best[hi],
                verdict: ConditionVerdict::from_parts(
                    "non_transparency",
                    acc.min_margin,
                    tol,
                    witnesses,
                    acc.pairs,
                    grid.resolution(),
                ),
            });
        }
    }
    let witness = pairs.iter().find(|p| p.is_witness()).map(|p| (p.low_state, p.high_state));
    Ok(SuboptimalityReport {
        outcome: if witness.is_some() {
            SuboptimalityOutcome::WitnessFound
        } else {
            SuboptimalityOutcome::NoneFound
        },
        witness,
        pairs,
        resolution: grid.resolution(),
    })
}

/// Both linear-receiver conditions, side by side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearReceiverVerdict {
    /// `V_a(ω₁,a₁) ≤ V_a(ω₂,a₂)` for `a₁ < a₂`, `ω₁ − a₁ < 0 < ω₂ − a₂`.
    pub ours: ConditionVerdict,
    /// `V_a` nondecreasing in the action at fixed state and in the state at
    /// fixed action (convexity plus supermodularity).
    pub kolotilin: ConditionVerdict,
    /// Estimated `c` in `U_a = c·(ω − a)`.
    pub slope: f64,
}

const LINEAR_FORM_TOL: f64 = 1e-9;

pub fn check_linear_receiver(model: &StateActionModel, grid: &GridSpec) -> Result<LinearReceiverVerdict> {
    grid.validate_for(model)?;
    let (states, actions) = (grid.state_points(), grid.action_points());
    let (mut ref_gap, mut ref_ua) = (0.0f64, 0.0);
    for &w in states {
        for &a in actions {
            if (w - a).abs() > ref_gap.abs() {
                ref_gap = w - a;
                ref_ua = model.u_a(w, a);
            }
        }
    }
    let slope = ref_ua / ref_gap;
    if !(slope.is_finite() && slope > 0.0) {
        return Err(Error::NotLinearReceiver(format!("estimated slope {slope} is not positive")));
    }
    let n_a = actions.len();
    let mut v_a = Vec::with_capacity(states.len() * n_a);
    for &w in states {
        for &a in actions {
            let ua = model.u_a(w, a);
            let expected = slope * (w - a);
            if (ua - expected).abs() > LINEAR_FORM_TOL * ua.abs().max(1.0) {
                return Err(Error::NotLinearReceiver(format!(
                    "U_a({w}, {a}) = {ua} but {slope}·(ω − a) = {expected}"
                )));
            }
            v_a.push(model.v_a(w, a));
        }
    }
    let tol = MARGIN_TOL_REL * median_abs(v_a.iter().copied());
    let point = |i: usize, j: usize| GridPoint { state: states[i], action: actions[j] };
    let entry = |i: usize, j: usize, lower: bool, upper: bool| Entry {
        point: point(i, j),
        score: v_a[i * n_a + j],
        key: 0.0,
        lower,
        upper,
    };

    let ours_levels: Vec<Vec<Entry>> = (0..n_a)
        .map(|j| {
            (0..states.len())
                .map(|i| {
                    let gap = states[i] - actions[j];
                    entry(i, j, gap < 0.0, gap > 0.0)
                })
                .collect()
        })
        .collect();
    let mut ours = PairAccumulator::default();
    prefix_sweep(ours_levels.iter().map(Vec::as_slice), &mut ours);

    let mut kol = PairAccumulator::default();
    for i in 0..states.len() {
        let row: Vec<Entry> = (0..n_a).map(|j| entry(i, j, true, true)).collect();
        prefix_sweep(row.chunks(1), &mut kol);
    }
    for j in 0..n_a {
        let col: Vec<Entry> = (0..states.len()).map(|i| entry(i, j, true, true)).collect();
        prefix_sweep(col.chunks(1), &mut kol);
    }

    Ok(LinearReceiverVerdict {
        ours: ConditionVerdict::from_parts(
            "linear_receiver",
            ours.min_margin,
            tol,
            ours.witnesses.into_vec(),
            ours.pairs,
            grid.resolution(),
        ),
        kolotilin: ConditionVerdict::from_parts(
            "convex_supermodular",
            kol.min_margin,
            tol,
            kol.witnesses.into_vec(),
            kol.pairs,
            grid.resolution(),
        ),
        slope,
    })
}
