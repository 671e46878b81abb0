//! Quadratic-time pair enumeration, kept as a reference for the sweeps.

use super::sweep::WitnessSet;
use super::{ConditionVerdict, GridPoint, GridSpec, GridTable, Witness};
use crate::error::Result;
use crate::model::StateActionModel;

fn enumerate(
    name: &str,
    model: &StateActionModel,
    grid: &GridSpec,
    admissible: impl Fn(f64, f64) -> bool,
) -> Result<ConditionVerdict> {
    let table = GridTable::build(model, grid)?;
    let (states, actions) = (grid.state_points(), grid.action_points());
    let mut min_margin = f64::INFINITY;
    let mut pairs = 0u64;
    let mut witnesses = WitnessSet::default();
    for i1 in 0..states.len() {
        for j1 in 0..actions.len() {
            let k1 = table.idx(i1, j1);
            for i2 in 0..states.len() {
                for j2 in j1 + 1..actions.len() {
                    let k2 = table.idx(i2, j2);
                    if !admissible(table.u_a[k1], table.u_a[k2]) {
                        continue;
                    }
                    let margin = table.ratio[k2] - table.ratio[k1];
                    pairs += 1;
                    min_margin = min_margin.min(margin);
                    witnesses.insert(Witness {
                        first: GridPoint { state: states[i1], action: actions[j1] },
                        second: GridPoint { state: states[i2], action: actions[j2] },
                        first_value: table.ratio[k1],
                        second_value: table.ratio[k2],
                        margin,
                    });
                }
            }
        }
    }
    Ok(ConditionVerdict::from_parts(
        name,
        min_margin,
        table.margin_tol(),
        witnesses.into_vec(),
        pairs,
        grid.resolution(),
    ))
}

pub fn weak_naive(model: &StateActionModel, grid: &GridSpec) -> Result<ConditionVerdict> {
    enumerate("weak", model, grid, |u1, u2| u1 < 0.0 && u2 > 0.0)
}

pub fn derivable_naive(model: &StateActionModel, grid: &GridSpec) -> Result<ConditionVerdict> {
    enumerate("derivable", model, grid, |u1, u2| u1 < u2)
}
