use serde::{Deserialize, Serialize};

use super::sweep::WitnessSet;
use super::{median_abs, ConditionVerdict, GridPoint, GridSpec, Witness, DERIV_TOL, MARGIN_TOL_REL};
use crate::error::{Error, Result};
use crate::model::StateActionModel;

/// One pointwise inequality `lhs ≥ rhs` evaluated at a grid point.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PointwiseTerms {
    pub point: GridPoint,
    pub lhs: f64,
    pub rhs: f64,
    /// Magnitude of the largest product entering either side.
    pub scale: f64,
}

/// Verdict for `lhs ≥ rhs` over all points. Margins are `(lhs − rhs) / scale`
/// where `scale` is the median of the per-point term magnitudes, so the
/// tolerance is relative.
pub(crate) fn pointwise_verdict(condition: &str, terms: &[PointwiseTerms], resolution: (usize, usize)) -> ConditionVerdict {
    let scale = median_abs(terms.iter().map(|t| t.scale));
    let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
    let mut min_margin = f64::INFINITY;
    let mut witnesses = WitnessSet::default();
    for t in terms {
        let margin = (t.lhs - t.rhs) / scale;
        min_margin = min_margin.min(margin);
        witnesses.insert(Witness {
            first: t.point,
            second: t.point,
            first_value: t.lhs,
            second_value: t.rhs,
            margin,
        });
    }
    ConditionVerdict::from_parts(
        condition,
        min_margin,
        DERIV_TOL,
        witnesses.into_vec(),
        terms.len() as u64,
        resolution,
    )
}

/// The two pointwise derivative inequalities and their conjunction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeVerdict {
    pub overall: ConditionVerdict,
    pub first: ConditionVerdict,
    pub second: ConditionVerdict,
    /// Grid points where `|U_aω| ≤ DERIV_TOL`.
    pub skipped: u64,
}

/// Sufficient pointwise conditions for the derivable condition. Where
/// `U_aω > 0`:
///
/// ```text
/// U_aaω·V_a ≥ V_aω·U_aa
/// V_a(U_aaa·U_aω − U_aaω·U_aa) ≥ U_aa(V_aa·U_aω − V_aω·U_aa)
/// ```
///
/// and both reversed where `U_aω < 0`.
pub fn check_derivative_conditions(model: &StateActionModel, grid: &GridSpec) -> Result<DerivativeVerdict> {
    grid.validate_for(model)?;
    let mut first = Vec::new();
    let mut second = Vec::new();
    let mut skipped = 0;
    for &w in grid.state_points() {
        for &a in grid.action_points() {
            let p = model.partials(w, a)?;
            if p.u_aw.abs() <= DERIV_TOL {
                skipped += 1;
                continue;
            }
            let point = GridPoint { state: w, action: a };
            let (l1, r1) = (p.u_aaw * p.v_a, p.v_aw * p.u_aa);
            let (l2, r2) = (
                p.v_a * (p.u_aaa * p.u_aw - p.u_aaw * p.u_aa),
                p.u_aa * (p.v_aa * p.u_aw - p.v_aw * p.u_aa),
            );
            let s1 = l1.abs().max(r1.abs());
            let s2 = [
                p.v_a * p.u_aaa * p.u_aw,
                p.v_a * p.u_aaw * p.u_aa,
                p.u_aa * p.v_aa * p.u_aw,
                p.u_aa * p.v_aw * p.u_aa,
            ]
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()));
            let ((l1, r1), (l2, r2)) = if p.u_aw > 0.0 { ((l1, r1), (l2, r2)) } else { ((r1, l1), (r2, l2)) };
            if ![l1, r1, l2, r2, s2].iter().all(|x| x.is_finite()) {
                return Err(Error::Domain(format!("derivative terms are not finite at ({w}, {a})")));
            }
            first.push(PointwiseTerms { point, lhs: l1, rhs: r1, scale: s1 });
            second.push(PointwiseTerms { point, lhs: l2, rhs: r2, scale: s2 });
        }
    }
    let res = grid.resolution();
    let first = pointwise_verdict("derivative_first", &first, res);
    let second = pointwise_verdict("derivative_second", &second, res);
    Ok(DerivativeVerdict { overall: combine("derivative", &first, &second), first, second, skipped })
}

/// Conjunction of two pointwise verdicts over the same points.
pub(crate) fn combine(condition: &str, first: &ConditionVerdict, second: &ConditionVerdict) -> ConditionVerdict {
    let mut witnesses = WitnessSet::default();
    for w in first.witnesses.iter().chain(&second.witnesses) {
        witnesses.insert(*w);
    }
    ConditionVerdict::from_parts(
        condition,
        first.min_margin.min(second.min_margin),
        first.margin_tol.max(second.margin_tol),
        witnesses.into_vec(),
        first.pairs_tested.max(second.pairs_tested),
        first.resolution,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearCaseVerdict {
    pub verdict: ConditionVerdict,
    /// In the linear case the condition is necessary as well as sufficient.
    pub necessary_and_sufficient: bool,
}

/// Sender utility `V(a)` with receiver `U_a = ω − a` on `[0, 1]`: full
/// disclosure is optimal exactly when `V′` is nondecreasing. Checks
/// consecutive grid actions strictly inside `(0, 1)`.
pub fn check_linear_case(v_prime: impl Fn(f64) -> f64, grid: &GridSpec) -> Result<LinearCaseVerdict> {
    let actions = grid.action_points();
    if actions[0] < 0.0 || *actions.last().unwrap() > 1.0 {
        return Err(Error::InvalidGrid("linear case needs action points inside [0, 1]".into()));
    }
    let interior: Vec<(f64, f64)> = actions
        .iter()
        .filter(|&&a| a > 0.0 && a < 1.0)
        .map(|&a| (a, v_prime(a)))
        .collect();
    if let Some((a, d)) = interior.iter().find(|(_, d)| !d.is_finite()) {
        return Err(Error::Domain(format!("V'({a}) = {d}")));
    }
    let tol = MARGIN_TOL_REL * median_abs(interior.iter().map(|p| p.1));
    let mut min_margin = f64::INFINITY;
    let mut witnesses = WitnessSet::default();
    for w in interior.windows(2) {
        let margin = w[1].1 - w[0].1;
        min_margin = min_margin.min(margin);
        witnesses.insert(Witness {
            first: GridPoint { state: 0.0, action: w[0].0 },
            second: GridPoint { state: 0.0, action: w[1].0 },
            first_value: w[0].1,
            second_value: w[1].1,
            margin,
        });
    }
    let pairs = interior.len().saturating_sub(1) as u64;
    Ok(LinearCaseVerdict {
        verdict: ConditionVerdict::from_parts(
            "linear_case",
            min_margin,
            tol,
            witnesses.into_vec(),
            pairs,
            grid.resolution(),
        ),
        necessary_and_sufficient: true,
    })
}
