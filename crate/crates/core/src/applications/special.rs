use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Interval, Primitives, StateActionModel};

struct QuadraticCs {
    b: f64,
}

impl Primitives for QuadraticCs {
    fn u(&self, w: f64, a: f64) -> f64 {
        -(w - a) * (w - a)
    }
    fn u_a(&self, w: f64, a: f64) -> f64 {
        2.0 * (w - a)
    }
    fn u_aa(&self, _w: f64, _a: f64) -> f64 {
        -2.0
    }
    fn v(&self, w: f64, a: f64) -> f64 {
        let d = w - a - self.b;
        -d * d
    }
    fn v_a(&self, w: f64, a: f64) -> f64 {
        2.0 * (w - a - self.b)
    }
    fn u_aw(&self, _w: f64, _a: f64) -> Option<f64> {
        Some(2.0)
    }
    fn u_aaa(&self, _w: f64, _a: f64) -> Option<f64> {
        Some(0.0)
    }
    fn u_aaw(&self, _w: f64, _a: f64) -> Option<f64> {
        Some(0.0)
    }
    fn v_aa(&self, _w: f64, _a: f64) -> Option<f64> {
        Some(-2.0)
    }
    fn v_aw(&self, _w: f64, _a: f64) -> Option<f64> {
        Some(2.0)
    }
}

/// Quadratic-loss receiver with a sender biased upward by `b`. The default
/// action domain widens the state domain by half its width on each side.
pub fn quadratic_cs_model(b: f64, states: Interval, actions: Option<Interval>) -> Result<StateActionModel> {
    if !(b >= 0.0 && b.is_finite()) {
        return Err(Error::InvalidParams(format!("bias b = {b} must be non-negative")));
    }
    let actions = match actions {
        Some(a) => a,
        None => Interval::new(states.lo - 0.5 * states.width(), states.hi + 0.5 * states.width())?,
    };
    Ok(StateActionModel::new(format!("quadratic_cs(b={b})"), states, actions, Arc::new(QuadraticCs { b }))
        .with_linear_receiver_flag(true))
}

/// Polynomial `Σ cᵢ·aⁱ`, coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    pub coefficients: Vec<f64>,
}

impl Polynomial {
    pub fn new(coefficients: Vec<f64>) -> Self {
        Self { coefficients }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial {
            coefficients: self.coefficients.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect(),
        }
    }
}

struct LinearCase {
    v: Polynomial,
    dv: Polynomial,
    d2v: Polynomial,
}

impl Primitives for LinearCase {
    fn u(&self, w: f64, a: f64) -> f64 {
        -0.5 * (w - a) * (w - a)
    }
    fn u_a(&self, w: f64, a: f64) -> f64 {
        w - a
    }
    fn u_aa(&self, _w: f64, _a: f64) -> f64 {
        -1.0
    }
    fn v(&self, _w: f64, a: f64) -> f64 {
        self.v.eval(a)
    }
    fn v_a(&self, _w: f64, a: f64) -> f64 {
        self.dv.eval(a)
    }
    fn u_aw(&self, _w: f64, _a: f64) -> Option<f64> {
        Some(1.0)
    }
    fn u_aaa(&self, _w: f64, _a: f64) -> Option<f64> {
        Some(0.0)
    }
    fn u_aaw(&self, _w: f64, _a: f64) -> Option<f64> {
        Some(0.0)
    }
    fn v_aa(&self, _w: f64, a: f64) -> Option<f64> {
        Some(self.d2v.eval(a))
    }
    fn v_aw(&self, _w: f64, _a: f64) -> Option<f64> {
        Some(0.0)
    }
}

/// Sender utility depending on the action only, receiver `U = −(ω − a)²/2` so
/// that `U_a = ω − a`. States and actions both live in `[0, 1]`.
pub fn linear_case_model(sender: Polynomial) -> Result<StateActionModel> {
    if sender.coefficients.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidParams("sender polynomial has non-finite coefficients".into()));
    }
    let unit = Interval::new(0.0, 1.0)?;
    let dv = sender.derivative();
    let d2v = dv.derivative();
    Ok(StateActionModel::new("linear_case", unit, unit, Arc::new(LinearCase { v: sender, dv, d2v }))
        .with_linear_receiver_flag(true))
}
