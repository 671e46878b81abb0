//! Utility models, posteriors, and the receiver's best response.
//!
//! A [`StateActionModel`] bundles the receiver utility `U(state, action)`,
//! the sender utility `V(state, action)` and their partial derivatives in the
//! action on a rectangle of states and actions. Higher and cross partials are
//! optional on the [`Primitives`] trait; when a family does not provide them in
//! closed form they are estimated by central differences.

mod fd;
mod posterior;
mod solve;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fd::{DerivativeAudit, DEFAULT_FD_STEP};
pub use posterior::{Posterior, PROBABILITY_SUM_TOL};
pub use solve::{BISECTION_WIDTH, BRACKET_SCAN_POINTS, FOC_TOL};

/// A closed real interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::Domain(format!("interval [{lo}, {hi}] must be finite with lo < hi")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// `n` equally spaced points including both endpoints.
    pub fn linspace(&self, n: usize) -> Vec<f64> {
        linspace(self.lo, self.hi, n)
    }
}

pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// Utility primitives of a model family.
///
/// The five required evaluators are the ones every check needs. The optional
/// ones return `None` when the family has no closed form; [`StateActionModel`]
/// then falls back to central differences.
pub trait Primitives: Send + Sync {
    fn u(&self, state: f64, action: f64) -> f64;
    fn u_a(&self, state: f64, action: f64) -> f64;
    fn u_aa(&self, state: f64, action: f64) -> f64;
    fn v(&self, state: f64, action: f64) -> f64;
    fn v_a(&self, state: f64, action: f64) -> f64;

    fn u_aw(&self, _state: f64, _action: f64) -> Option<f64> {
        None
    }
    fn u_aaa(&self, _state: f64, _action: f64) -> Option<f64> {
        None
    }
    fn u_aaw(&self, _state: f64, _action: f64) -> Option<f64> {
        None
    }
    fn v_aa(&self, _state: f64, _action: f64) -> Option<f64> {
        None
    }
    fn v_aw(&self, _state: f64, _action: f64) -> Option<f64> {
        None
    }
}

/// All partials the condition checkers use, evaluated at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Partials {
    pub u: f64,
    pub u_a: f64,
    pub u_aa: f64,
    pub u_aw: f64,
    pub u_aaa: f64,
    pub u_aaw: f64,
    pub v: f64,
    pub v_a: f64,
    pub v_aa: f64,
    pub v_aw: f64,
}

/// Immutable evaluator bundle on a rectangle of (state, action) values.
///
/// Cloning is cheap: the primitives are shared behind an `Arc`.
#[derive(Clone)]
pub struct StateActionModel {
    name: String,
    states: Interval,
    actions: Interval,
    prims: Arc<dyn Primitives>,
    fd_step: f64,
    linear_receiver: bool,
}

impl fmt::Debug for StateActionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StateActionModel")
            .field("name", &self.name)
            .field("states", &self.states)
            .field("actions", &self.actions)
            .field("fd_step", &self.fd_step)
            .finish_non_exhaustive()
    }
}

impl StateActionModel {
    pub fn new(
        name: impl Into<String>,
        states: Interval,
        actions: Interval,
        prims: Arc<dyn Primitives>,
    ) -> Self {
        Self {
            name: name.into(),
            states,
            actions,
            prims,
            fd_step: DEFAULT_FD_STEP,
            linear_receiver: false,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn state_domain(&self) -> Interval {
        self.states
    }

    pub fn action_domain(&self) -> Interval {
        self.actions
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    /// True when the family is known to have `U_a = c * (state - action)`.
    pub fn is_linear_receiver(&self) -> bool {
        self.linear_receiver
    }

    pub fn with_fd_step(mut self, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidArgument(format!("finite-difference step must be positive, got {step}")));
        }
        self.fd_step = step;
        Ok(self)
    }

    pub fn with_action_domain(mut self, actions: Interval) -> Self {
        self.actions = actions;
        self
    }

    pub fn with_state_domain(mut self, states: Interval) -> Self {
        self.states = states;
        self
    }

    pub(crate) fn with_linear_receiver_flag(mut self, flag: bool) -> Self {
        self.linear_receiver = flag;
        self
    }

    pub fn u(&self, state: f64, action: f64) -> f64 {
        self.prims.u(state, action)
    }

    pub fn u_a(&self, state: f64, action: f64) -> f64 {
        self.prims.u_a(state, action)
    }

    pub fn u_aa(&self, state: f64, action: f64) -> f64 {
        self.prims.u_aa(state, action)
    }

    pub fn v(&self, state: f64, action: f64) -> f64 {
        self.prims.v(state, action)
    }

    pub fn v_a(&self, state: f64, action: f64) -> f64 {
        self.prims.v_a(state, action)
    }

    /// True when every optional partial has a closed form at this point.
    pub fn has_closed_form_partials(&self, state: f64, action: f64) -> bool {
        let p = &self.prims;
        p.u_aw(state, action).is_some()
            && p.u_aaa(state, action).is_some()
            && p.u_aaw(state, action).is_some()
            && p.v_aa(state, action).is_some()
            && p.v_aw(state, action).is_some()
    }

    /// Full partials record: closed forms where available, central differences
    /// with the model's step otherwise.
    pub fn partials(&self, state: f64, action: f64) -> Result<Partials> {
        let p = &self.prims;
        let closed = (
            p.u_aw(state, action),
            p.u_aaa(state, action),
            p.u_aaw(state, action),
            p.v_aa(state, action),
            p.v_aw(state, action),
        );
        let fallback = if matches!(closed, (Some(_), Some(_), Some(_), Some(_), Some(_))) {
            None
        } else {
            Some(
                self.finite_difference_partials(state, action, self.fd_step)
                    .map_err(|e| Error::MissingDerivatives {
                        state,
                        action,
                        reason: e.to_string(),
                    })?,
            )
        };
        let pick = |c: Option<f64>, f: fn(&Partials) -> f64| c.unwrap_or_else(|| f(fallback.as_ref().unwrap()));
        Ok(Partials {
            u: p.u(state, action),
            u_a: p.u_a(state, action),
            u_aa: p.u_aa(state, action),
            u_aw: pick(closed.0, |q| q.u_aw),
            u_aaa: pick(closed.1, |q| q.u_aaa),
            u_aaw: pick(closed.2, |q| q.u_aaw),
            v: p.v(state, action),
            v_a: p.v_a(state, action),
            v_aa: pick(closed.3, |q| q.v_aa),
            v_aw: pick(closed.4, |q| q.v_aw),
        })
    }

    /// Adds state-only terms to `U` and `V`. Best responses and split gains
    /// are unchanged by construction.
    pub fn shifted(
        &self,
        u_shift: impl Fn(f64) -> f64 + Send + Sync + 'static,
        v_shift: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let mut out = self.clone();
        out.prims = Arc::new(Transformed {
            inner: self.prims.clone(),
            u_shift: Some(Arc::new(u_shift)),
            v_shift: Some(Arc::new(v_shift)),
            v_scale: 1.0,
        });
        out.name = format!("{}+shift", self.name);
        out
    }

    /// Multiplies the sender utility by `factor > 0`.
    pub fn scaled_sender(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidArgument(format!("sender scale must be positive, got {factor}")));
        }
        let mut out = self.clone();
        out.prims = Arc::new(Transformed {
            inner: self.prims.clone(),
            u_shift: None,
            v_shift: None,
            v_scale: factor,
        });
        out.name = format!("{}*{factor}", self.name);
        Ok(out)
    }

    pub(crate) fn check_state(&self, state: f64) -> Result<()> {
        if !state.is_finite() || !self.states.contains(state) {
            return Err(Error::Domain(format!(
                "state {state} outside state domain [{}, {}]",
                self.states.lo, self.states.hi
            )));
        }
        Ok(())
    }
}

type StateFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

struct Transformed {
    inner: Arc<dyn Primitives>,
    u_shift: Option<StateFn>,
    v_shift: Option<StateFn>,
    v_scale: f64,
}

impl Primitives for Transformed {
    fn u(&self, s: f64, a: f64) -> f64 {
        self.inner.u(s, a) + self.u_shift.as_ref().map_or(0.0, |f| f(s))
    }
    fn u_a(&self, s: f64, a: f64) -> f64 {
        self.inner.u_a(s, a)
    }
    fn u_aa(&self, s: f64, a: f64) -> f64 {
        self.inner.u_aa(s, a)
    }
    fn v(&self, s: f64, a: f64) -> f64 {
        self.v_scale * self.inner.v(s, a) + self.v_shift.as_ref().map_or(0.0, |f| f(s))
    }
    fn v_a(&self, s: f64, a: f64) -> f64 {
        self.v_scale * self.inner.v_a(s, a)
    }
    fn u_aw(&self, s: f64, a: f64) -> Option<f64> {
        self.inner.u_aw(s, a)
    }
    fn u_aaa(&self, s: f64, a: f64) -> Option<f64> {
        self.inner.u_aaa(s, a)
    }
    fn u_aaw(&self, s: f64, a: f64) -> Option<f64> {
        self.inner.u_aaw(s, a)
    }
    fn v_aa(&self, s: f64, a: f64) -> Option<f64> {
        self.inner.v_aa(s, a).map(|x| self.v_scale * x)
    }
    fn v_aw(&self, s: f64, a: f64) -> Option<f64> {
        self.inner.v_aw(s, a).map(|x| self.v_scale * x)
    }
}

type PointFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A model assembled from closures, for ad-hoc or tabulated utilities.
///
/// Only the five required evaluators are mandatory; higher partials that are
/// not supplied are estimated by central differences.
#[derive(Clone)]
pub struct ClosureModel {
    u: PointFn,
    u_a: PointFn,
    u_aa: PointFn,
    v: PointFn,
    v_a: PointFn,
    u_aw: Option<PointFn>,
    u_aaa: Option<PointFn>,
    u_aaw: Option<PointFn>,
    v_aa: Option<PointFn>,
    v_aw: Option<PointFn>,
}

macro_rules! closure_setter {
    ($name:ident, $field:ident) => {
        pub fn $name(mut self, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
            self.$field = Some(Arc::new(f));
            self
        }
    };
}

impl ClosureModel {
    pub fn new(
        u: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        u_a: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        u_aa: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        v: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        v_a: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            u: Arc::new(u),
            u_a: Arc::new(u_a),
            u_aa: Arc::new(u_aa),
            v: Arc::new(v),
            v_a: Arc::new(v_a),
            u_aw: None,
            u_aaa: None,
            u_aaw: None,
            v_aa: None,
            v_aw: None,
        }
    }

    closure_setter!(with_u_aw, u_aw);
    closure_setter!(with_u_aaa, u_aaa);
    closure_setter!(with_u_aaw, u_aaw);
    closure_setter!(with_v_aa, v_aa);
    closure_setter!(with_v_aw, v_aw);

    pub fn into_model(self, name: impl Into<String>, states: Interval, actions: Interval) -> StateActionModel {
        StateActionModel::new(name, states, actions, Arc::new(self))
    }
}

impl Primitives for ClosureModel {
    fn u(&self, s: f64, a: f64) -> f64 {
        (self.u)(s, a)
    }
    fn u_a(&self, s: f64, a: f64) -> f64 {
        (self.u_a)(s, a)
    }
    fn u_aa(&self, s: f64, a: f64) -> f64 {
        (self.u_aa)(s, a)
    }
    fn v(&self, s: f64, a: f64) -> f64 {
        (self.v)(s, a)
    }
    fn v_a(&self, s: f64, a: f64) -> f64 {
        (self.v_a)(s, a)
    }
    fn u_aw(&self, s: f64, a: f64) -> Option<f64> {
        self.u_aw.as_ref().map(|f| f(s, a))
    }
    fn u_aaa(&self, s: f64, a: f64) -> Option<f64> {
        self.u_aaa.as_ref().map(|f| f(s, a))
    }
    fn u_aaw(&self, s: f64, a: f64) -> Option<f64> {
        self.u_aaw.as_ref().map(|f| f(s, a))
    }
    fn v_aa(&self, s: f64, a: f64) -> Option<f64> {
        self.v_aa.as_ref().map(|f| f(s, a))
    }
    fn v_aw(&self, s: f64, a: f64) -> Option<f64> {
        self.v_aw.as_ref().map(|f| f(s, a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic() -> StateActionModel {
        ClosureModel::new(
            |w, a| -(w - a) * (w - a),
            |w, a| 2.0 * (w - a),
            |_, _| -2.0,
            |w, a| -(w - a) * (w - a),
            |w, a| 2.0 * (w - a),
        )
        .into_model("quadratic", Interval::new(0.0, 1.0).unwrap(), Interval::new(-0.5, 1.5).unwrap())
    }

    #[test]
    fn interval_rejects_reversed_bounds() {
        assert!(Interval::new(1.0, 0.0).is_err());
        assert!(Interval::new(0.0, 0.0).is_err());
        assert!(Interval::new(0.0, f64::NAN).is_err());
    }

    #[test]
    fn linspace_hits_endpoints_exactly() {
        let pts = Interval::new(0.1, 0.7).unwrap().linspace(7);
        assert_eq!(pts.len(), 7);
        assert_eq!(pts[0], 0.1);
        assert_eq!(pts[6], 0.7);
    }

    #[test]
    fn partials_fall_back_to_finite_differences() {
        let m = quadratic();
        let p = m.partials(0.5, 0.3).unwrap();
        assert!((p.u_aw - 2.0).abs() < 1e-6);
        assert!(p.u_aaa.abs() < 1e-6);
        assert!((p.v_aw - 2.0).abs() < 1e-6);
        assert!((p.v_aa + 2.0).abs() < 1e-6);
    }

    #[test]
    fn partials_fail_near_boundary_without_closed_forms() {
        let m = quadratic();
        let err = m.partials(0.0, 0.3).unwrap_err();
        assert!(matches!(err, Error::MissingDerivatives { .. }));
    }

    #[test]
    fn scaling_and_shifting_act_on_sender_only_where_expected() {
        let m = quadratic();
        let s = m.scaled_sender(3.0).unwrap().shifted(|w| w * w, |w| 5.0 * w);
        assert_eq!(s.u_a(0.4, 0.1), m.u_a(0.4, 0.1));
        assert!((s.v_a(0.4, 0.1) - 3.0 * m.v_a(0.4, 0.1)).abs() < 1e-15);
        assert!((s.u(0.4, 0.1) - (m.u(0.4, 0.1) + 0.16)).abs() < 1e-15);
        assert!(m.scaled_sender(0.0).is_err());
    }
}
