//! Built-in model families: CRRA principal and agent, separable production,
//! and the quadratic special cases.

mod crra;
mod separable;
mod special;

pub use crra::{crra_model, crra_ratio_closed_form, crra_regime, CrraParams, CrraRegime, CRRA_ACTION_FLOOR};
pub use separable::{
    check_separable_derivative_condition, multiplicative_benchmark, separable_model, BenchmarkVerdict, Beta, Curve,
    SeparableParams, SeparableVerdict,
};
pub use special::{linear_case_model, quadratic_cs_model, Polynomial};
