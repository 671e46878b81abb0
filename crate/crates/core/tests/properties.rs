use disclosure_core::applications::{
    crra_model, crra_regime, quadratic_cs_model, separable_model, CrraParams, CrraRegime, SeparableParams,
};
use disclosure_core::conditions::reference::{derivable_naive, weak_naive};
use disclosure_core::conditions::{check_derivable_condition, check_weak_condition, GridSpec};
use disclosure_core::model::{Interval, Posterior, StateActionModel};
use disclosure_core::oracle::{binary_split_gain, gain_via_integrals, DEFAULT_QUAD_POINTS};
use proptest::prelude::*;

fn crra_params() -> impl Strategy<Value = CrraParams> {
    let away = (0.0..3.0f64).prop_filter("away from 1", |x| (x - 1.0).abs() > 0.05);
    (away.clone(), away, 0.1..0.9f64, 0.1..0.9f64).prop_map(|(g, r, d, k)| CrraParams::new(g, r, d, k).unwrap())
}

fn one_two() -> Interval {
    Interval::new(1.0, 2.0).unwrap()
}

/// CRRA, quadratic or power-power instance together with its state interval.
fn any_model() -> impl Strategy<Value = (StateActionModel, (f64, f64))> {
    prop_oneof![
        crra_params().prop_map(|p| (crra_model(p, one_two(), None).unwrap(), (1.0, 2.0))),
        (0.0..0.5f64).prop_map(|b| (quadratic_cs_model(b, Interval::new(0.0, 1.0).unwrap(), None).unwrap(), (0.0, 1.0))),
        (0.1..0.9f64, 0.1..0.9f64, 0.2..0.8f64).prop_map(|(k, t, d)| {
            let p = SeparableParams::power_power(1.0, k, 1.0, t, d);
            (separable_model(p, one_two(), None).unwrap(), (1.0, 2.0))
        }),
    ]
}

fn instance() -> impl Strategy<Value = (StateActionModel, f64, f64, f64)> {
    (any_model(), 0.0..1.0f64, 0.0..1.0f64, 0.05..0.95f64).prop_filter_map("distinct states", |((m, (lo, hi)), s, t, p)| {
        let (w1, w2) = (lo + s * (hi - lo), lo + t * (hi - lo));
        ((w1 - w2).abs() > 1e-3).then_some((m, w1.min(w2), w1.max(w2), p))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn best_response_solves_the_first_order_condition((m, lo, hi, p) in instance()) {
        let post = Posterior::binary(lo, hi, p).unwrap();
        let a = m.best_response(&post).unwrap();
        let scale = post.expectation(|w| m.u_aa(w, a).abs());
        prop_assert!(m.expected_marginal(&post, a).abs() <= 1e-9 * scale.max(1.0));
        let eu = |x: f64| post.expectation(|w| m.u(w, x));
        let h = 1e-4 * (1.0 + a.abs());
        prop_assert!(eu(a) >= eu(a - h) && eu(a) >= eu(a + h));
    }

    #[test]
    fn ratio_is_sender_marginal_over_receiver_curvature((m, lo, hi, _p) in instance(), t in 0.0..1.0f64) {
        let a = m.state_best_response(lo).unwrap() + t * (m.state_best_response(hi).unwrap() - m.state_best_response(lo).unwrap());
        let r = m.ratio(lo, a).unwrap();
        let expected = m.v_a(lo, a) / -m.u_aa(lo, a);
        prop_assert!((r - expected).abs() <= 1e-12 * expected.abs().max(1.0));
    }

    #[test]
    fn state_shifts_leave_actions_and_gains_alone((m, lo, hi, p) in instance(), c in -5.0..5.0f64) {
        let s = m.shifted(move |w| c * w.cos(), move |w| c * w * w);
        let post = Posterior::binary(lo, hi, p).unwrap();
        prop_assert_eq!(m.best_response(&post).unwrap(), s.best_response(&post).unwrap());
        let (g, h) = (binary_split_gain(&m, lo, hi, p).unwrap().gain, binary_split_gain(&s, lo, hi, p).unwrap().gain);
        prop_assert!((g - h).abs() <= 1e-12 * (1.0 + c.abs()));
    }

    #[test]
    fn positive_sender_scaling_keeps_the_weak_verdict((m, _lo, _hi, _p) in instance(), f in 0.05..20.0f64) {
        let grid = GridSpec::auto(&m, 9, 17).unwrap();
        let a = check_weak_condition(&m, &grid).unwrap();
        let b = check_weak_condition(&m.scaled_sender(f).unwrap(), &grid).unwrap();
        prop_assert_eq!(a.status, b.status);
        prop_assert_eq!(a.pairs_tested, b.pairs_tested);
    }

    #[test]
    fn sweeps_match_pair_enumeration((m, _lo, _hi, _p) in instance(), n in 3usize..9, k in 3usize..13) {
        let grid = GridSpec::auto(&m, n, k).unwrap();
        for (fast, slow) in [
            (check_weak_condition(&m, &grid).unwrap(), weak_naive(&m, &grid).unwrap()),
            (check_derivable_condition(&m, &grid).unwrap(), derivable_naive(&m, &grid).unwrap()),
        ] {
            prop_assert_eq!(fast.status, slow.status);
            prop_assert_eq!(fast.pairs_tested, slow.pairs_tested);
            prop_assert_eq!(fast.min_margin, slow.min_margin);
        }
    }

    #[test]
    fn split_gain_matches_its_integral_form((m, lo, hi, p) in instance()) {
        let g = binary_split_gain(&m, lo, hi, p).unwrap();
        let i = gain_via_integrals(&m, lo, hi, p, DEFAULT_QUAD_POINTS).unwrap();
        prop_assert!((g.gain - i).abs() <= 1e-8);
        prop_assert!(g.foc_residual(&m) <= 1e-9);
    }

    #[test]
    fn regimes_partition_the_plane(g in 0.0..4.0f64, r in 0.0..4.0f64) {
        prop_assume!(g != 1.0);
        let expected = if (r - g) * (g - 1.0) >= 0.0 {
            CrraRegime::Optimal
        } else if (r - 1.0) * (g - 1.0) < 0.0 {
            CrraRegime::Suboptimal
        } else {
            CrraRegime::Inconclusive
        };
        prop_assert_eq!(crra_regime(g, r).unwrap(), expected);
    }

    #[test]
    fn separable_receiver_marginal_rises_with_the_state(
        k in 0.1..0.9f64, t in 0.1..0.9f64, d in 0.2..0.8f64, a in 0.01..10.0f64, w in 1.0..1.9f64,
    ) {
        let m = separable_model(SeparableParams::power_power(1.0, k, 1.0, t, d), one_two(), None).unwrap();
        prop_assert!(m.u_a(w + 0.1, a) > m.u_a(w, a));
    }
}
