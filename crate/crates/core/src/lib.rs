// `!(x > 0.0)` checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod applications;
pub mod cli;
pub mod conditions;
pub mod error;
pub mod model;
pub mod oracle;

pub use error::{Error, Result};
