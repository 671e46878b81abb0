//! Brute-force persuasion oracles on finite-state instances.
//!
//! These routines never look at the ratio conditions. They solve the
//! receiver's problem directly and compare sender values, so they serve as an
//! independent check on the grid verdicts.

mod decompose;
mod envelope;
mod lp;
mod quadrature;
mod split;

pub use decompose::{three_message_decomposition, Decomposition, WeightedPosterior};
pub use envelope::{
    concavify_2state, concavify_3state, EnvelopeResult, EnvelopeSample, EnvelopeVerdict, SplitComponent,
};
pub use quadrature::gauss_legendre;
pub use split::{
    binary_pair_scan, binary_split_gain, change_of_variables_check, gain_via_integrals, BinarySplitResult,
    ChangeOfVariables, WorstPairReport,
};

/// Absolute tolerance separating genuine pooling improvements from noise.
pub const ENV_TOL: f64 = 1e-7;
/// Gauss–Legendre nodes per integral (16-point rule on 4 panels).
pub const DEFAULT_QUAD_POINTS: usize = 64;
/// Points per side of the triangular sampling grid.
pub const DEFAULT_SIMPLEX_RESOLUTION: usize = 60;
/// Smallest sampling resolution accepted by the two-state envelope.
pub const MIN_LINE_RESOLUTION: usize = 17;
