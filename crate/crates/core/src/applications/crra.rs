use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Interval, Primitives, StateActionModel};

/// Lower end of the default CRRA action domain.
pub const CRRA_ACTION_FLOOR: f64 = 1e-6;

/// Agent with CRRA utility over the output share `δ·y` net of effort, principal
/// with CRRA utility over `(1 − δ)·y`, output `y = ω·a^κ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrraParams {
    pub gamma: f64,
    pub rho: f64,
    pub delta: f64,
    pub kappa: f64,
}

impl CrraParams {
    pub fn new(gamma: f64, rho: f64, delta: f64, kappa: f64) -> Result<Self> {
        let p = Self { gamma, rho, delta, kappa };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_risk_aversion(self.gamma, self.rho)?;
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParams(format!("delta = {} must lie in (0, 1)", self.delta)));
        }
        if !(self.kappa > 0.0 && self.kappa < 1.0) {
            return Err(Error::InvalidParams(format!("kappa = {} must lie in (0, 1)", self.kappa)));
        }
        Ok(())
    }

    /// Closed-form full-information action `[κ(δω)^{1−γ}]^{1/(1−κ(1−γ))}`.
    pub fn best_action(&self, state: f64) -> f64 {
        let g = 1.0 - self.gamma;
        (self.kappa * (self.delta * state).powf(g)).powf(1.0 / (1.0 - self.kappa * g))
    }
}

fn check_risk_aversion(gamma: f64, rho: f64) -> Result<()> {
    for (name, x) in [("gamma", gamma), ("rho", rho)] {
        if !(x.is_finite() && x >= 0.0) {
            return Err(Error::InvalidParams(format!("{name} = {x} must be finite and non-negative")));
        }
        if x == 1.0 {
            return Err(Error::InvalidParams(format!("{name} = 1 (log utility) is not supported")));
        }
    }
    Ok(())
}

struct Crra {
    p: CrraParams,
}

impl Crra {
    /// `κ(δω)^{1−γ}a^{κ(1−γ)−1}`, i.e. `U_a + 1`.
    fn x(&self, w: f64, a: f64) -> f64 {
        let g = 1.0 - self.p.gamma;
        self.p.kappa * (self.p.delta * w).powf(g) * a.powf(self.p.kappa * g - 1.0)
    }

    fn guard(&self, w: f64, a: f64) -> bool {
        w > 0.0 && a > 0.0
    }
}

impl Primitives for Crra {
    fn u(&self, w: f64, a: f64) -> f64 {
        if !self.guard(w, a) {
            return f64::NAN;
        }
        let g = 1.0 - self.p.gamma;
        (self.p.delta * w).powf(g) * a.powf(self.p.kappa * g) / g - a
    }
    fn u_a(&self, w: f64, a: f64) -> f64 {
        if !self.guard(w, a) {
            return f64::NAN;
        }
        self.x(w, a) - 1.0
    }
    fn u_aa(&self, w: f64, a: f64) -> f64 {
        if !self.guard(w, a) {
            return f64::NAN;
        }
        let kg = self.p.kappa * (1.0 - self.p.gamma);
        (kg - 1.0) * self.x(w, a) / a
    }
    fn v(&self, w: f64, a: f64) -> f64 {
        if !self.guard(w, a) {
            return f64::NAN;
        }
        let r = 1.0 - self.p.rho;
        ((1.0 - self.p.delta) * w).powf(r) * a.powf(self.p.kappa * r) / r
    }
    fn v_a(&self, w: f64, a: f64) -> f64 {
        if !self.guard(w, a) {
            return f64::NAN;
        }
        let r = 1.0 - self.p.rho;
        self.p.kappa * ((1.0 - self.p.delta) * w).powf(r) * a.powf(self.p.kappa * r - 1.0)
    }
    fn u_aw(&self, w: f64, a: f64) -> Option<f64> {
        self.guard(w, a).then(|| (1.0 - self.p.gamma) * self.x(w, a) / w)
    }
    fn u_aaa(&self, w: f64, a: f64) -> Option<f64> {
        let kg = self.p.kappa * (1.0 - self.p.gamma);
        self.guard(w, a).then(|| (kg - 2.0) * (kg - 1.0) * self.x(w, a) / (a * a))
    }
    fn u_aaw(&self, w: f64, a: f64) -> Option<f64> {
        let g = 1.0 - self.p.gamma;
        self.guard(w, a).then(|| g * (self.p.kappa * g - 1.0) * self.x(w, a) / (a * w))
    }
    fn v_aa(&self, w: f64, a: f64) -> Option<f64> {
        let kr = self.p.kappa * (1.0 - self.p.rho);
        self.guard(w, a).then(|| (kr - 1.0) * self.v_a(w, a) / a)
    }
    fn v_aw(&self, w: f64, a: f64) -> Option<f64> {
        self.guard(w, a).then(|| (1.0 - self.p.rho) * self.v_a(w, a) / w)
    }
}

/// CRRA model on a strictly positive state domain. The action domain defaults
/// to `[1e-6, 2·max a*]` and is always extended so that it brackets every
/// full-information action with room on both sides.
pub fn crra_model(p: CrraParams, states: Interval, actions: Option<Interval>) -> Result<StateActionModel> {
    p.validate()?;
    if !(states.lo > 0.0) {
        return Err(Error::InvalidParams(format!("CRRA states must be positive, got [{}, {}]", states.lo, states.hi)));
    }
    let (a_lo, a_hi) = {
        let (x, y) = (p.best_action(states.lo), p.best_action(states.hi));
        (x.min(y), x.max(y))
    };
    if !(a_lo > 0.0 && a_hi.is_finite()) {
        return Err(Error::InvalidParams(format!("best actions [{a_lo}, {a_hi}] are not positive and finite")));
    }
    let (mut lo, mut hi) = match actions {
        Some(i) => (i.lo, i.hi),
        None => (CRRA_ACTION_FLOOR, 2.0 * a_hi),
    };
    if !(lo > 0.0) {
        return Err(Error::InvalidParams(format!("CRRA actions must be positive, got lower end {lo}")));
    }
    lo = lo.min(0.5 * a_lo);
    hi = hi.max(2.0 * a_hi);
    let name = format!("crra(gamma={}, rho={}, delta={}, kappa={})", p.gamma, p.rho, p.delta, p.kappa);
    Ok(StateActionModel::new(name, states, Interval::new(lo, hi)?, Arc::new(Crra { p })))
}

/// `C·(U_a + 1)^{(γ−ρ)/(1−γ)}·a^{(1−ρ)/(1−γ)}` with
/// `C = (1−δ)^{1−ρ} δ^{−(1−ρ)} κ^{(ρ−γ)/(1−γ)} / (1 − κ(1−γ))`.
pub fn crra_ratio_closed_form(p: &CrraParams, state: f64, action: f64) -> Result<f64> {
    p.validate()?;
    if !(state > 0.0 && action > 0.0) {
        return Err(Error::Domain(format!("state {state} and action {action} must be positive")));
    }
    let (g, r) = (1.0 - p.gamma, 1.0 - p.rho);
    let c = (1.0 - p.delta).powf(r) * p.delta.powf(-r) * p.kappa.powf((p.rho - p.gamma) / g) / (1.0 - p.kappa * g);
    let x = Crra { p: *p }.x(state, action);
    Ok(c * x.powf((p.gamma - p.rho) / g) * action.powf(r / g))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CrraRegime {
    Optimal,
    Suboptimal,
    Inconclusive,
}

impl CrraRegime {
    pub fn as_str(self) -> &'static str {
        match self {
            CrraRegime::Optimal => "OPTIMAL",
            CrraRegime::Suboptimal => "SUBOPTIMAL",
            CrraRegime::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl std::fmt::Display for CrraRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Analytic classification of full disclosure over `(γ, ρ)`.
pub fn crra_regime(gamma: f64, rho: f64) -> Result<CrraRegime> {
    check_risk_aversion(gamma, rho)?;
    Ok(if (rho <= gamma && gamma < 1.0) || (rho >= gamma && gamma > 1.0) {
        CrraRegime::Optimal
    } else if (rho < 1.0 && 1.0 < gamma) || (gamma < 1.0 && 1.0 < rho) {
        CrraRegime::Suboptimal
    } else {
        CrraRegime::Inconclusive
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn best_action_closed_form() {
        let p = CrraParams::new(0.0, 0.0, 0.5, 0.5).unwrap();
        assert!((p.best_action(1.0) - 0.0625).abs() < 1e-15);
        let m = crra_model(p, unit(1.0, 2.0), None).unwrap();
        assert!((m.state_best_response(1.0).unwrap() - 0.0625).abs() < 1e-12);
    }

    #[test]
    fn sender_value_at_full_information() {
        let p = CrraParams::new(0.0, 0.0, 0.5, 0.5).unwrap();
        let m = crra_model(p, unit(1.0, 2.0), None).unwrap();
        let v = m.sender_value(&crate::model::Posterior::point(1.0).unwrap()).unwrap();
        assert!((v - 0.125).abs() < 1e-12);
    }

    #[test]
    fn marginal_utility_display() {
        let p = CrraParams::new(0.5, 0.0, 0.5, 0.5).unwrap();
        let m = crra_model(p, unit(1.0, 2.0), None).unwrap();
        for a in [0.01f64, 0.1, 0.5] {
            let expected = 0.5 * 0.5f64.sqrt() * a.powf(-0.75) - 1.0;
            assert!((m.u_a(1.0, a) - expected).abs() < 1e-12 * expected.abs().max(1.0));
        }
        let dom = m.action_domain();
        assert!(m.u_a(1.0, dom.lo) > 0.0 && m.u_a(1.0, dom.hi) < 0.0);
    }

    #[test]
    fn rejects_log_utility_and_bad_domains() {
        assert!(CrraParams::new(1.0, 0.0, 0.5, 0.5).is_err());
        assert!(CrraParams::new(0.0, 1.0, 0.5, 0.5).is_err());
        assert!(CrraParams::new(0.0, 0.0, 1.0, 0.5).is_err());
        let p = CrraParams::new(0.5, 0.0, 0.5, 0.5).unwrap();
        assert!(crra_model(p, unit(0.0, 1.0), None).is_err());
        assert!(crra_model(p, unit(1.0, 2.0), Some(unit(-1.0, 1.0))).is_err());
        let m = crra_model(p, unit(1.0, 2.0), None).unwrap();
        assert!(m.u_a(1.0, 0.0).is_nan());
    }

    #[test]
    fn concave_everywhere() {
        for (g, k) in [(0.0, 0.9), (0.5, 0.5), (2.0, 0.3), (2.5, 0.9)] {
            let p = CrraParams::new(g, 0.0, 0.5, k).unwrap();
            let m = crra_model(p, unit(1.0, 2.0), None).unwrap();
            for a in [1e-3, 0.1, 1.0] {
                assert!(m.u_aa(1.5, a) < 0.0);
            }
        }
    }

    #[test]
    fn closed_form_ratio_matches() {
        for (g, r) in [(0.5, 0.0), (0.5, 0.5), (2.0, 0.0), (0.3, 2.2)] {
            let p = CrraParams::new(g, r, 0.5, 0.5).unwrap();
            let m = crra_model(p, unit(1.0, 2.0), None).unwrap();
            for (w, a) in [(1.0, 0.1), (1.7, 0.03), (2.0, 0.4)] {
                let generic = m.ratio(w, a).unwrap();
                let closed = crra_ratio_closed_form(&p, w, a).unwrap();
                assert!(((closed - generic) / generic).abs() < 1e-10, "{g} {r} {w} {a}");
            }
        }
    }

    #[test]
    fn regime_examples() {
        assert_eq!(crra_regime(0.5, 0.0).unwrap(), CrraRegime::Optimal);
        assert_eq!(crra_regime(2.0, 0.0).unwrap(), CrraRegime::Suboptimal);
        assert_eq!(crra_regime(0.5, 0.8).unwrap(), CrraRegime::Inconclusive);
        assert_eq!(crra_regime(0.5, 2.0).unwrap(), CrraRegime::Suboptimal);
        assert_eq!(crra_regime(2.0, 2.5).unwrap(), CrraRegime::Optimal);
        assert_eq!(crra_regime(2.0, 1.5).unwrap(), CrraRegime::Inconclusive);
        assert_eq!(crra_regime(0.5, 0.5).unwrap(), CrraRegime::Optimal);
        assert!(crra_regime(1.0, 0.0).is_err());
    }

    #[test]
    fn partials_audit() {
        let p = CrraParams::new(0.5, 0.5, 0.5, 0.5).unwrap();
        let m = crra_model(p, unit(0.5, 2.0), None).unwrap();
        let fd = m.finite_difference_partials(1.0, 0.1, 1e-4).unwrap();
        let exact = m.partials(1.0, 0.1).unwrap();
        for (x, y) in [
            (fd.u_aw, exact.u_aw),
            (fd.u_aaa, exact.u_aaa),
            (fd.u_aaw, exact.u_aaw),
            (fd.v_aa, exact.v_aa),
            (fd.v_aw, exact.v_aw),
        ] {
            assert!(((x - y) / y).abs() < 1e-5, "{x} vs {y}");
        }
        let states = [0.8, 1.0, 1.5];
        let actions = [0.02, 0.1, 0.3];
        assert!(m.derivative_audit(&states, &actions, 1e-4).unwrap().max_rel_error < 1e-6);
    }
}
