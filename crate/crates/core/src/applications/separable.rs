use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::conditions::{pointwise_verdict, ConditionVerdict, GridPoint, GridSpec, PointwiseTerms, Status};
use crate::error::{Error, Result};
use crate::model::{Interval, Primitives, StateActionModel};

/// Number of points used to verify shape assumptions on a domain.
const SHAPE_SAMPLES: usize = 257;

/// Scalar production component of the action.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Curve {
    /// `scale·a^exponent`
    Power { scale: f64, exponent: f64 },
    /// `scale·ln a`
    Log { scale: f64 },
    /// `linear·a + quadratic·a²`
    Quadratic { linear: f64, quadratic: f64 },
    Zero,
}

impl Curve {
    pub fn value(&self, a: f64) -> f64 {
        match *self {
            Curve::Power { scale, exponent } => scale * a.powf(exponent),
            Curve::Log { scale } => scale * a.ln(),
            Curve::Quadratic { linear, quadratic } => linear * a + quadratic * a * a,
            Curve::Zero => 0.0,
        }
    }

    pub fn d1(&self, a: f64) -> f64 {
        match *self {
            Curve::Power { scale, exponent } => scale * exponent * a.powf(exponent - 1.0),
            Curve::Log { scale } => scale / a,
            Curve::Quadratic { linear, quadratic } => linear + 2.0 * quadratic * a,
            Curve::Zero => 0.0,
        }
    }

    pub fn d2(&self, a: f64) -> f64 {
        match *self {
            Curve::Power { scale, exponent } => scale * exponent * (exponent - 1.0) * a.powf(exponent - 2.0),
            Curve::Log { scale } => -scale / (a * a),
            Curve::Quadratic { quadratic, .. } => 2.0 * quadratic,
            Curve::Zero => 0.0,
        }
    }

    pub fn d3(&self, a: f64) -> f64 {
        match *self {
            Curve::Power { scale, exponent } => {
                scale * exponent * (exponent - 1.0) * (exponent - 2.0) * a.powf(exponent - 3.0)
            }
            Curve::Log { scale } => 2.0 * scale / (a * a * a),
            Curve::Quadratic { .. } | Curve::Zero => 0.0,
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        let ok = match *self {
            Curve::Power { scale, exponent } => scale > 0.0 && exponent > 0.0 && exponent <= 1.0,
            Curve::Log { scale } => scale > 0.0,
            Curve::Quadratic { linear, quadratic } => linear.is_finite() && quadratic.is_finite(),
            Curve::Zero => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("{name} = {self:?} is not admissible")))
        }
    }
}

/// State multiplier `β(ω)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Beta {
    #[default]
    Identity,
    Affine { intercept: f64, slope: f64 },
}

impl Beta {
    pub fn value(&self, w: f64) -> f64 {
        match *self {
            Beta::Identity => w,
            Beta::Affine { intercept, slope } => intercept + slope * w,
        }
    }

    pub fn d1(&self, _w: f64) -> f64 {
        match *self {
            Beta::Identity => 1.0,
            Beta::Affine { slope, .. } => slope,
        }
    }
}

/// Output `y = β(ω)φ(a) + ξ(a)` shared linearly: `U = δy − a`, `V = (1−δ)y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparableParams {
    #[serde(default)]
    pub beta: Beta,
    pub phi: Curve,
    pub xi: Curve,
    pub delta: f64,
}

impl SeparableParams {
    pub fn power_power(h: f64, kappa: f64, l: f64, tau: f64, delta: f64) -> Self {
        Self {
            beta: Beta::Identity,
            phi: Curve::Power { scale: h, exponent: kappa },
            xi: Curve::Power { scale: l, exponent: tau },
            delta,
        }
    }

    pub fn log_log(h: f64, l: f64, delta: f64) -> Self {
        Self { beta: Beta::Identity, phi: Curve::Log { scale: h }, xi: Curve::Log { scale: l }, delta }
    }

    fn y_a(&self, w: f64, a: f64) -> f64 {
        self.beta.value(w) * self.phi.d1(a) + self.xi.d1(a)
    }

    fn validate(&self, states: Interval, actions: Interval) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParams(format!("delta = {} must lie in (0, 1)", self.delta)));
        }
        if !matches!(self.phi, Curve::Power { .. } | Curve::Log { .. }) {
            return Err(Error::InvalidParams("phi must be a power or log curve".into()));
        }
        if !matches!(self.xi, Curve::Power { .. } | Curve::Log { .. } | Curve::Zero) {
            return Err(Error::InvalidParams("xi must be a power curve, a log curve or zero".into()));
        }
        self.phi.validate("phi")?;
        self.xi.validate("xi")?;
        if !(actions.lo > 0.0) {
            return Err(Error::InvalidParams(format!("actions must be positive, got lower end {}", actions.lo)));
        }
        for w in [states.lo, states.hi] {
            if !(self.beta.value(w) > 0.0 && self.beta.d1(w) > 0.0) {
                return Err(Error::InvalidParams(format!("beta must be positive and increasing, fails at {w}")));
            }
        }
        for a in actions.linspace(SHAPE_SAMPLES) {
            let (p2, x2) = (self.phi.d2(a), self.xi.d2(a));
            if !(p2 + x2 < 0.0) {
                return Err(Error::InvalidParams(format!("phi'' + xi'' = {} is not negative at a = {a}", p2 + x2)));
            }
            if p2 * x2 < 0.0 {
                return Err(Error::InvalidParams(format!("phi'' and xi'' have opposite signs at a = {a}")));
            }
        }
        for w in [states.lo, states.hi] {
            let ua = self.delta * self.y_a(w, actions.hi) - 1.0;
            if !(ua < 0.0) {
                return Err(Error::InvalidParams(format!(
                    "delta·y_a({w}, {}) = {} is not below 1",
                    actions.hi,
                    ua + 1.0
                )));
            }
            let ua = self.delta * self.y_a(w, actions.lo) - 1.0;
            if !(ua > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "delta·y_a({w}, {}) = {} is not above 1",
                    actions.lo,
                    ua + 1.0
                )));
            }
        }
        Ok(())
    }
}

struct Separable {
    p: SeparableParams,
}

impl Separable {
    fn y(&self, w: f64, a: f64) -> f64 {
        self.p.beta.value(w) * self.p.phi.value(a) + self.p.xi.value(a)
    }
    fn y_aa(&self, w: f64, a: f64) -> f64 {
        self.p.beta.value(w) * self.p.phi.d2(a) + self.p.xi.d2(a)
    }
    fn y_aaa(&self, w: f64, a: f64) -> f64 {
        self.p.beta.value(w) * self.p.phi.d3(a) + self.p.xi.d3(a)
    }
}

impl Primitives for Separable {
    fn u(&self, w: f64, a: f64) -> f64 {
        self.p.delta * self.y(w, a) - a
    }
    fn u_a(&self, w: f64, a: f64) -> f64 {
        self.p.delta * self.p.y_a(w, a) - 1.0
    }
    fn u_aa(&self, w: f64, a: f64) -> f64 {
        self.p.delta * self.y_aa(w, a)
    }
    fn v(&self, w: f64, a: f64) -> f64 {
        (1.0 - self.p.delta) * self.y(w, a)
    }
    fn v_a(&self, w: f64, a: f64) -> f64 {
        (1.0 - self.p.delta) * self.p.y_a(w, a)
    }
    fn u_aw(&self, w: f64, a: f64) -> Option<f64> {
        Some(self.p.delta * self.p.beta.d1(w) * self.p.phi.d1(a))
    }
    fn u_aaa(&self, w: f64, a: f64) -> Option<f64> {
        Some(self.p.delta * self.y_aaa(w, a))
    }
    fn u_aaw(&self, w: f64, a: f64) -> Option<f64> {
        Some(self.p.delta * self.p.beta.d1(w) * self.p.phi.d2(a))
    }
    fn v_aa(&self, w: f64, a: f64) -> Option<f64> {
        Some((1.0 - self.p.delta) * self.y_aa(w, a))
    }
    fn v_aw(&self, w: f64, a: f64) -> Option<f64> {
        Some((1.0 - self.p.delta) * self.p.beta.d1(w) * self.p.phi.d1(a))
    }
}

/// Upper end for the default separable action domain: doubles from 1 until
/// the agent's marginal return falls below the marginal cost at every state.
fn default_action_upper(p: &SeparableParams, states: Interval) -> f64 {
    let mut hi = 1.0;
    for _ in 0..200 {
        if p.delta * p.y_a(states.lo, hi) < 1.0 && p.delta * p.y_a(states.hi, hi) < 1.0 {
            break;
        }
        hi *= 2.0;
    }
    2.0 * hi
}

/// Risk-neutral model with separable output. The default action domain is
/// `[1e-6, hi]` with `hi` chosen so that best responses are interior.
pub fn separable_model(p: SeparableParams, states: Interval, actions: Option<Interval>) -> Result<StateActionModel> {
    let actions = match actions {
        Some(a) => a,
        None => Interval::new(1e-6, default_action_upper(&p, states))?,
    };
    p.validate(states, actions)?;
    let prims = Separable { p };
    for w in states.linspace(SHAPE_SAMPLES) {
        for a in [actions.lo, 0.5 * (actions.lo + actions.hi), actions.hi] {
            let cross = prims.u_aw(w, a).unwrap();
            if !(cross > 0.0) {
                return Err(Error::InvalidParams(format!("U_aω = {cross} is not positive at ({w}, {a})")));
            }
        }
    }
    Ok(StateActionModel::new("separable", states, actions, Arc::new(prims)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableVerdict {
    pub overall: ConditionVerdict,
    /// `φ″ξ′ ≥ φ′ξ″`
    pub first: ConditionVerdict,
    /// `β(φ‴φ′ − (φ″)²) ≥ ξ″φ″ − ξ‴φ′`
    pub second: ConditionVerdict,
    /// `κ ≥ τ` for power–power output, `None` otherwise.
    pub power_shortcut: Option<bool>,
}

/// The pointwise derivative conditions specialized to separable output.
pub fn check_separable_derivative_condition(p: &SeparableParams, grid: &GridSpec) -> Result<SeparableVerdict> {
    let states = Interval::new(grid.state_points()[0], *grid.state_points().last().unwrap())?;
    let actions = Interval::new(grid.action_points()[0], *grid.action_points().last().unwrap())?;
    p.validate(states, actions)?;
    let (phi, xi) = (p.phi, p.xi);
    let mut first = Vec::new();
    let mut second = Vec::new();
    for &w in grid.state_points() {
        let b = p.beta.value(w);
        for &a in grid.action_points() {
            let point = GridPoint { state: w, action: a };
            let (l1, r1) = (phi.d2(a) * xi.d1(a), phi.d1(a) * xi.d2(a));
            first.push(PointwiseTerms { point, lhs: l1, rhs: r1, scale: l1.abs().max(r1.abs()) });
            let terms = [
                b * phi.d3(a) * phi.d1(a),
                b * phi.d2(a) * phi.d2(a),
                xi.d2(a) * phi.d2(a),
                xi.d3(a) * phi.d1(a),
            ];
            second.push(PointwiseTerms {
                point,
                lhs: terms[0] - terms[1],
                rhs: terms[2] - terms[3],
                scale: terms.iter().fold(0.0f64, |m, t| m.max(t.abs())),
            });
        }
    }
    let res = grid.resolution();
    let first = pointwise_verdict("separable_first", &first, res);
    let second = pointwise_verdict("separable_second", &second, res);
    let power_shortcut = match (phi, xi) {
        (Curve::Power { exponent: k, .. }, Curve::Power { exponent: t, .. }) => Some(k >= t),
        _ => None,
    };
    Ok(SeparableVerdict {
        overall: crate::conditions::combine("separable", &first, &second),
        first,
        second,
        power_shortcut,
    })
}

/// Both readings of the multiplicative benchmark `y = ω·φ(a)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkVerdict {
    /// `φ‴φ′ ≥ (φ′)²`
    pub footnote: ConditionVerdict,
    /// `φ‴φ′ ≥ (φ″)²`
    pub specific_case: ConditionVerdict,
}

/// Evaluates both benchmark inequalities at every grid action.
pub fn multiplicative_benchmark(phi: Curve, grid: &GridSpec) -> Result<BenchmarkVerdict> {
    let mut footnote = Vec::new();
    let mut specific = Vec::new();
    for &a in grid.action_points() {
        let (d1, d2, d3) = (phi.d1(a), phi.d2(a), phi.d3(a));
        if ![d1, d2, d3].iter().all(|x| x.is_finite()) {
            return Err(Error::Domain(format!("phi derivatives are not finite at a = {a}")));
        }
        let point = GridPoint { state: 0.0, action: a };
        let lhs = d3 * d1;
        footnote.push(PointwiseTerms { point, lhs, rhs: d1 * d1, scale: lhs.abs().max(d1 * d1) });
        specific.push(PointwiseTerms { point, lhs, rhs: d2 * d2, scale: lhs.abs().max(d2 * d2) });
    }
    let res = (1, grid.n_actions());
    Ok(BenchmarkVerdict {
        footnote: pointwise_verdict("benchmark_footnote", &footnote, res),
        specific_case: pointwise_verdict("benchmark_specific_case", &specific, res),
    })
}

impl SeparableVerdict {
    pub fn status(&self) -> Status {
        self.overall.status
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditions::check_derivative_conditions;

    fn grid(states: (f64, f64), actions: (f64, f64), n: usize) -> GridSpec {
        GridSpec::uniform(
            Interval::new(states.0, states.1).unwrap(),
            Interval::new(actions.0, actions.1).unwrap(),
            n,
            n,
        )
        .unwrap()
    }

    #[test]
    fn power_power_shortcut() {
        let g = grid((1.0, 2.0), (0.05, 1.0), 21);
        let ok = check_separable_derivative_condition(&SeparableParams::power_power(1.0, 0.5, 1.0, 0.3, 0.5), &g).unwrap();
        assert!(ok.overall.holds());
        assert_eq!(ok.power_shortcut, Some(true));
        let bad = check_separable_derivative_condition(&SeparableParams::power_power(1.0, 0.3, 1.0, 0.5, 0.5), &g).unwrap();
        assert_eq!(bad.first.status, Status::Violated);
        assert!(bad.second.holds());
        assert_eq!(bad.power_shortcut, Some(false));
    }

    #[test]
    fn log_log_first_inequality_ties() {
        let g = grid((1.0, 2.0), (0.5, 3.0), 21);
        let v = check_separable_derivative_condition(&SeparableParams::log_log(1.0, 1.0, 0.5), &g).unwrap();
        assert_eq!(v.first.status, Status::HoldsWeakly);
        assert!(v.first.min_margin.abs() <= 1e-9);
        assert!(v.overall.holds());
        assert_eq!(v.power_shortcut, None);
    }

    #[test]
    fn generic_checker_agrees_on_separable_model() {
        let p = SeparableParams::power_power(1.0, 0.5, 1.0, 0.3, 0.5);
        let m = separable_model(p, Interval::new(1.0, 2.0).unwrap(), None).unwrap();
        let g = GridSpec::auto(&m, 11, 21).unwrap();
        let generic = check_derivative_conditions(&m, &g).unwrap();
        let special = check_separable_derivative_condition(&p, &g).unwrap();
        assert_eq!(generic.first.status, special.first.status);
        assert!(generic.overall.holds());
    }

    #[test]
    fn invalid_params() {
        let s = Interval::new(1.0, 2.0).unwrap();
        assert!(separable_model(SeparableParams::power_power(1.0, 1.0, 1.0, 1.0, 0.5), s, None).is_err());
        assert!(separable_model(SeparableParams::power_power(1.0, 0.5, 1.0, 0.3, 1.5), s, None).is_err());
        let mut p = SeparableParams::power_power(1.0, 0.5, 1.0, 0.3, 0.5);
        p.beta = Beta::Affine { intercept: 1.0, slope: -0.1 };
        assert!(separable_model(p, s, None).is_err());
    }

    #[test]
    fn models_are_valid_and_complementary() {
        let s = Interval::new(1.0, 2.0).unwrap();
        for p in [SeparableParams::power_power(1.0, 0.5, 1.0, 0.3, 0.5), SeparableParams::log_log(1.0, 1.0, 0.5)] {
            let m = separable_model(p, s, None).unwrap();
            let a1 = m.state_best_response(1.0).unwrap();
            let a2 = m.state_best_response(2.0).unwrap();
            assert!(a1 < a2);
            assert!(m.partials(1.5, a1).unwrap().u_aw > 0.0);
        }
    }

    #[test]
    fn benchmark_examples() {
        let g = grid((0.0, 1.0), (0.05, 0.9), 31);
        let sqrt = multiplicative_benchmark(Curve::Power { scale: 1.0, exponent: 0.5 }, &g).unwrap();
        assert_eq!(sqrt.specific_case.status, Status::HoldsStrictly);
        let log = multiplicative_benchmark(Curve::Log { scale: 1.0 }, &g).unwrap();
        assert_eq!(log.specific_case.status, Status::HoldsStrictly);
        assert_eq!(log.footnote.status, Status::HoldsStrictly);
        let quad = multiplicative_benchmark(Curve::Quadratic { linear: 1.0, quadratic: -0.5 }, &g).unwrap();
        assert_eq!(quad.specific_case.status, Status::Violated);
        assert_eq!(quad.footnote.status, Status::Violated);
    }

    #[test]
    fn sqrt_benchmark_gap_value() {
        // φ‴φ′ − (φ″)² = (0.375·0.5 − 0.0625)·a⁻³ = 0.125·a⁻³
        let phi = Curve::Power { scale: 1.0, exponent: 0.5 };
        for a in [0.1, 0.5, 2.0] {
            let gap = phi.d3(a) * phi.d1(a) - phi.d2(a).powi(2);
            assert!((gap - 0.125 * a.powi(-3)).abs() < 1e-12 * a.powi(-3));
        }
    }
}
