use super::{linspace, Posterior, StateActionModel};
use crate::error::{Error, Result};

/// Absolute tolerance on the expected first-order condition at a best response.
pub const FOC_TOL: f64 = 1e-10;
/// Number of equally spaced points used to bracket the best response.
pub const BRACKET_SCAN_POINTS: usize = 64;
/// Bisection stops once the bracket is this narrow.
pub const BISECTION_WIDTH: f64 = 1e-13;

impl StateActionModel {
    /// Expected receiver marginal utility `sum_i p_i U_a(state_i, action)`.
    pub fn expected_marginal(&self, post: &Posterior, action: f64) -> f64 {
        post.iter().map(|(s, p)| p * self.u_a(s, action)).sum()
    }

    fn expected_curvature(&self, post: &Posterior, action: f64) -> f64 {
        post.iter().map(|(s, p)| p * self.u_aa(s, action)).sum()
    }

    /// The receiver's unique optimal action under `post`.
    ///
    /// Scans the action domain for the sign change of the expected marginal
    /// utility, bisects the bracket, then takes one Newton step when it
    /// improves the residual.
    pub fn best_response(&self, post: &Posterior) -> Result<f64> {
        for &s in post.support() {
            self.check_state(s)?;
        }
        let g = |a: f64| self.expected_marginal(post, a);
        let dom = self.action_domain();
        let scan = linspace(dom.lo, dom.hi, BRACKET_SCAN_POINTS);
        let values: Vec<f64> = scan.iter().map(|&a| g(a)).collect();
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("expected marginal utility is {v} on the action scan")));
        }

        let mut bracket = None;
        for i in 0..scan.len() {
            if values[i].abs() <= FOC_TOL {
                bracket = Some((scan[i], scan[i]));
                break;
            }
            if i + 1 < scan.len() && values[i] > 0.0 && values[i + 1] < 0.0 {
                bracket = Some((scan[i], scan[i + 1]));
                break;
            }
        }
        let (mut lo, mut hi) = bracket.ok_or(Error::NoInteriorRoot {
            lo: dom.lo,
            hi: dom.hi,
            g_lo: values[0],
            g_hi: values[values.len() - 1],
        })?;

        while hi - lo > BISECTION_WIDTH {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let gm = g(mid);
            if gm > 0.0 {
                lo = mid;
            } else if gm < 0.0 {
                hi = mid;
            } else {
                return Ok(mid);
            }
        }

        let (blo, bhi) = (lo.min(hi), lo.max(hi));
        let mut best = 0.5 * (lo + hi);
        let mut best_res = g(best).abs();
        for cand in [lo, hi] {
            let r = g(cand).abs();
            if r < best_res {
                best = cand;
                best_res = r;
            }
        }
        let slope = self.expected_curvature(post, best);
        if slope.is_finite() && slope != 0.0 {
            let polished = best - g(best) / slope;
            let slack = BISECTION_WIDTH.max(f64::EPSILON * best.abs() * 4.0);
            if polished >= blo - slack && polished <= bhi + slack && dom.contains(polished) {
                let r = g(polished).abs();
                if r < best_res {
                    best = polished;
                }
            }
        }
        Ok(best)
    }

    /// Best response under a point mass at `state`.
    pub fn state_best_response(&self, state: f64) -> Result<f64> {
        self.best_response(&Posterior::point(state)?)
    }

    /// Sender marginal utility normalized by receiver curvature,
    /// `V_a / (-U_aa)`.
    pub fn ratio(&self, state: f64, action: f64) -> Result<f64> {
        let uaa = self.u_aa(state, action);
        if !(uaa < 0.0) {
            return Err(Error::ConcavityViolation { state, action, uaa });
        }
        let r = self.v_a(state, action) / -uaa;
        if !r.is_finite() {
            return Err(Error::Domain(format!("ratio is {r} at (state {state}, action {action})")));
        }
        Ok(r)
    }

    /// Sender's expected utility when the receiver best-responds to `post`.
    pub fn sender_value(&self, post: &Posterior) -> Result<f64> {
        let a = self.best_response(post)?;
        Ok(post.expectation(|s| self.v(s, a)))
    }
}
