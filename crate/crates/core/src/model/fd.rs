use serde::Serialize;

use super::{Partials, StateActionModel};
use crate::error::{Error, Result};

/// Default central-difference step on unit-scaled problems.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Largest relative discrepancy between closed-form partials and central
/// differences of the next-lower partial, over a set of points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeAudit {
    pub max_rel_error: f64,
    pub worst_partial: String,
    pub worst_state: f64,
    pub worst_action: f64,
    pub points_checked: usize,
}

fn central(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

impl StateActionModel {
    /// Central-difference estimates of the higher and cross partials.
    ///
    /// Requires `state ± step` and `action ± 2·step` inside the domain. The
    /// returned record carries the model's own `U`, `U_a`, `U_aa`, `V`, `V_a`.
    pub fn finite_difference_partials(&self, state: f64, action: f64, step: f64) -> Result<Partials> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
        }
        let (sd, ad) = (self.state_domain(), self.action_domain());
        if !(sd.contains(state - step) && sd.contains(state + step)) {
            return Err(Error::Domain(format!(
                "state {state} ± {step} leaves [{}, {}]",
                sd.lo, sd.hi
            )));
        }
        if !(ad.contains(action - 2.0 * step) && ad.contains(action + 2.0 * step)) {
            return Err(Error::Domain(format!(
                "action {action} ± 2·{step} leaves [{}, {}]",
                ad.lo, ad.hi
            )));
        }
        let h = step;
        Ok(Partials {
            u: self.u(state, action),
            u_a: self.u_a(state, action),
            u_aa: self.u_aa(state, action),
            u_aw: central(|w| self.u_a(w, action), state, h),
            u_aaa: central(|a| self.u_aa(state, a), action, h),
            u_aaw: central(|w| self.u_aa(w, action), state, h),
            v: self.v(state, action),
            v_a: self.v_a(state, action),
            v_aa: central(|a| self.v_a(state, a), action, h),
            v_aw: central(|w| self.v_a(w, action), state, h),
        })
    }

    /// Compares every closed-form partial with a central difference of the
    /// partial one order below, using steps relative to the coordinate
    /// (`step·|x|`, or `step` at zero). Points too close to the boundary for
    /// the stencil are skipped.
    pub fn derivative_audit(&self, states: &[f64], actions: &[f64], step: f64) -> Result<DerivativeAudit> {
        let (sd, ad) = (self.state_domain(), self.action_domain());
        let mut audit = DerivativeAudit {
            max_rel_error: 0.0,
            worst_partial: String::new(),
            worst_state: f64::NAN,
            worst_action: f64::NAN,
            points_checked: 0,
        };
        let rel = |exact: f64, approx: f64| (exact - approx).abs() / exact.abs().max(f64::EPSILON.sqrt());
        for &w in states {
            let hw = if w == 0.0 { step } else { step * w.abs() };
            if !(sd.contains(w - hw) && sd.contains(w + hw)) {
                continue;
            }
            for &a in actions {
                let ha = if a == 0.0 { step } else { step * a.abs() };
                if !(ad.contains(a - ha) && ad.contains(a + ha)) {
                    continue;
                }
                audit.points_checked += 1;
                let mut checks: Vec<(&str, f64, f64)> = vec![
                    ("U_a", self.u_a(w, a), central(|x| self.u(w, x), a, ha)),
                    ("U_aa", self.u_aa(w, a), central(|x| self.u_a(w, x), a, ha)),
                    ("V_a", self.v_a(w, a), central(|x| self.v(w, x), a, ha)),
                ];
                let p = &self.prims;
                if let Some(x) = p.u_aw(w, a) {
                    checks.push(("U_aw", x, central(|s| self.u_a(s, a), w, hw)));
                }
                if let Some(x) = p.u_aaa(w, a) {
                    checks.push(("U_aaa", x, central(|y| self.u_aa(w, y), a, ha)));
                }
                if let Some(x) = p.u_aaw(w, a) {
                    checks.push(("U_aaw", x, central(|s| self.u_aa(s, a), w, hw)));
                }
                if let Some(x) = p.v_aa(w, a) {
                    checks.push(("V_aa", x, central(|y| self.v_a(w, y), a, ha)));
                }
                if let Some(x) = p.v_aw(w, a) {
                    checks.push(("V_aw", x, central(|s| self.v_a(s, a), w, hw)));
                }
                for (name, exact, approx) in checks {
                    let e = rel(exact, approx);
                    if !e.is_finite() {
                        return Err(Error::Domain(format!("{name} is not finite at ({w}, {a})")));
                    }
                    if e > audit.max_rel_error {
                        audit.max_rel_error = e;
                        audit.worst_partial = name.to_string();
                        audit.worst_state = w;
                        audit.worst_action = a;
                    }
                }
            }
        }
        Ok(audit)
    }
}

#[cfg(test)]
mod tests {
    use crate::model::{ClosureModel, Interval, StateActionModel};

    fn quadratic() -> StateActionModel {
        ClosureModel::new(
            |w, a| -(w - a) * (w - a),
            |w, a| 2.0 * (w - a),
            |_, _| -2.0,
            |w, a| w * a,
            |w, _| w,
        )
        .into_model("q", Interval::new(0.0, 1.0).unwrap(), Interval::new(0.0, 1.0).unwrap())
    }

    #[test]
    fn quadratic_cross_partial_is_two() {
        let p = quadratic().finite_difference_partials(0.4, 0.6, 1e-4).unwrap();
        assert!((p.u_aw - 2.0).abs() < 1e-6);
        assert!(p.u_aaa.abs() < 1e-6);
        assert!(p.u_aaw.abs() < 1e-6);
        assert!((p.v_aw - 1.0).abs() < 1e-6);
        assert!(p.v_aa.abs() < 1e-6);
    }

    #[test]
    fn boundary_points_are_rejected() {
        let m = quadratic();
        assert!(m.finite_difference_partials(0.0, 0.5, 1e-4).is_err());
        assert!(m.finite_difference_partials(0.5, 1.5e-4, 1e-4).is_err());
        assert!(m.finite_difference_partials(0.5, 0.5, 0.0).is_err());
    }

    #[test]
    fn audit_of_consistent_closures_is_tight() {
        let m = quadratic();
        let pts: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
        let audit = m.derivative_audit(&pts, &pts, 1e-4).unwrap();
        assert_eq!(audit.points_checked, 81);
        assert!(audit.max_rel_error < 1e-6, "{audit:?}");
    }

    #[test]
    fn audit_flags_inconsistent_closures() {
        let m = ClosureModel::new(|w, a| -(w - a) * (w - a), |w, a| 3.0 * (w - a), |_, _| -2.0, |_, a| a, |_, _| 1.0)
            .into_model("bad", Interval::new(0.0, 1.0).unwrap(), Interval::new(0.0, 1.0).unwrap());
        let audit = m.derivative_audit(&[0.5], &[0.2], 1e-4).unwrap();
        assert!(audit.max_rel_error > 0.1);
        assert!(audit.worst_partial.starts_with("U_a"), "{audit:?}");
    }
}
