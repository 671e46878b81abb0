use disclosure_core::applications::{
    crra_model, linear_case_model, multiplicative_benchmark, quadratic_cs_model, separable_model, CrraParams, Curve,
    Polynomial, SeparableParams,
};
use disclosure_core::conditions::{
    check_derivable_condition, check_derivative_conditions, check_suboptimality, check_weak_condition, GridSpec, Status,
};
use disclosure_core::model::{ClosureModel, Interval, Posterior, StateActionModel};
use disclosure_core::oracle::{
    binary_pair_scan, binary_split_gain, change_of_variables_check, concavify_2state, concavify_3state,
    gain_via_integrals, three_message_decomposition, EnvelopeVerdict, DEFAULT_QUAD_POINTS,
};

fn iv(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi).unwrap()
}

fn crra(gamma: f64, rho: f64) -> StateActionModel {
    crra_model(CrraParams::new(gamma, rho, 0.5, 0.5).unwrap(), iv(1.0, 2.0), None).unwrap()
}

#[test]
fn crra_risk_neutral_benchmark_values() {
    let m = crra(0.0, 0.0);
    let point = Posterior::point(1.0).unwrap();
    assert!((m.best_response(&point).unwrap() - 0.0625).abs() < 1e-10);
    assert!((m.sender_value(&point).unwrap() - 0.125).abs() < 1e-10);
}

#[test]
fn crra_finite_differences_match_closed_forms() {
    let m = crra_model(CrraParams::new(0.5, 0.3, 0.5, 0.5).unwrap(), iv(0.5, 2.0), None).unwrap();
    let exact = m.partials(1.0, 0.1).unwrap();
    let fd = m.finite_difference_partials(1.0, 0.1, 1e-4).unwrap();
    for (x, y) in [
        (exact.u_aw, fd.u_aw),
        (exact.u_aaa, fd.u_aaa),
        (exact.u_aaw, fd.u_aaw),
        (exact.v_aa, fd.v_aa),
        (exact.v_aw, fd.v_aw),
    ] {
        assert!((x - y).abs() <= 1e-5 * x.abs(), "{x} vs {y}");
    }
}

#[test]
fn crra_condition_verdicts() {
    let m = crra(0.5, 0.5);
    let grid = GridSpec::auto(&m, 21, 41).unwrap();
    assert!(check_derivable_condition(&m, &grid).unwrap().holds());

    let m = crra(2.0, 0.0);
    let grid = GridSpec::auto(&m, 21, 41).unwrap();
    let weak = check_weak_condition(&m, &grid).unwrap();
    assert_eq!(weak.status, Status::Violated);
    assert!(!weak.witnesses.is_empty());
    assert!(check_suboptimality(&m, &grid, &[1.0, 2.0]).unwrap().witness.is_some());

    let m = crra(0.5, 2.0);
    let grid = GridSpec::auto(&m, 21, 41).unwrap();
    assert!(check_suboptimality(&m, &grid, &[1.0, 2.0]).unwrap().witness.is_some());
}

#[test]
fn crawford_sobel_has_no_reversed_pair() {
    let m = quadratic_cs_model(0.2, iv(0.0, 1.0), None).unwrap();
    let grid = GridSpec::auto(&m, 41, 41).unwrap();
    assert!(check_suboptimality(&m, &grid, &[0.2, 0.8]).unwrap().witness.is_none());
    assert!(binary_pair_scan(&m, &[0.2, 0.8], 21).unwrap().min_gain >= 0.0);
}

#[test]
fn split_gains_and_integrals() {
    let cs = quadratic_cs_model(0.0, iv(0.0, 1.0), None).unwrap();
    let split = binary_split_gain(&cs, 0.0, 1.0, 0.5).unwrap();
    assert!((split.gain - 0.25).abs() < 1e-12);
    assert!((gain_via_integrals(&cs, 0.0, 1.0, 0.5, DEFAULT_QUAD_POINTS).unwrap() - 0.25).abs() < 1e-8);
    let cov = change_of_variables_check(&cs, 0.0, 1.0, 0.5, 101).unwrap();
    assert!((cov.k + 0.5).abs() < 1e-10 && cov.residual < 1e-10);

    let m = crra(2.0, 0.0);
    let g = binary_split_gain(&m, 1.0, 2.0, 0.5).unwrap().gain;
    let i = gain_via_integrals(&m, 1.0, 2.0, 0.5, DEFAULT_QUAD_POINTS).unwrap();
    assert!(g < 0.0 && (g - i).abs() < 1e-8);

    let m = crra(0.5, 0.0);
    let split = binary_split_gain(&m, 1.0, 2.0, 0.5).unwrap();
    assert!(split.gain > 0.0 && split.effort_delta > 0.0);

    let m = crra(0.5, 0.5);
    assert!(change_of_variables_check(&m, 1.0, 2.0, 0.3, 101).unwrap().residual < 1e-9);
}

#[test]
fn three_state_envelopes() {
    let m = crra_model(CrraParams::new(0.5, 2.0, 0.5, 0.5).unwrap(), iv(1.0, 2.0), None).unwrap();
    let prior = Posterior::new(vec![1.0, 1.5, 2.0], vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]).unwrap();
    let env = concavify_3state(&m, [1.0, 1.5, 2.0], &prior, 40).unwrap();
    assert_eq!(env.verdict, EnvelopeVerdict::FullDisclosureSuboptimal);

    let flat = ClosureModel::new(
        |w, a| -(w - a) * (w - a),
        |w, a| 2.0 * (w - a),
        |_, _| -2.0,
        |w, _| w,
        |_, _| 0.0,
    )
    .into_model("flat sender", iv(0.0, 1.0), iv(-0.5, 1.5));
    let prior = Posterior::new(vec![0.0, 0.5, 1.0], vec![0.25, 0.5, 0.25]).unwrap();
    let env = concavify_3state(&flat, [0.0, 0.5, 1.0], &prior, 30).unwrap();
    assert_eq!(env.verdict, EnvelopeVerdict::FullDisclosureOptimal);
    assert!(env.margin.abs() < 1e-9);
}

#[test]
fn crra_three_message_decomposition() {
    let m = crra(0.5, 0.0);
    let post = Posterior::new(vec![1.0, 1.5, 2.0], vec![0.25, 0.5, 0.25]).unwrap();
    let d = three_message_decomposition(&m, &post, 0, 2).unwrap();
    assert!(d.balance_residual < 1e-9);
    for ((s, p), (t, q)) in d.mixture().into_iter().zip(post.iter()) {
        assert_eq!(s, t);
        assert!((p - q).abs() <= 1e-15);
    }
}

#[test]
fn linear_case_sender_examples() {
    let convex = linear_case_model(Polynomial::new(vec![0.0, 0.0, 1.0])).unwrap();
    let env = concavify_2state(&convex, (0.0, 1.0), 0.5, 101).unwrap();
    assert_eq!(env.verdict, EnvelopeVerdict::FullDisclosureOptimal);

    let linear = linear_case_model(Polynomial::new(vec![0.0, 1.0])).unwrap();
    let scan = binary_pair_scan(&linear, &[0.0, 0.5, 1.0], 9).unwrap();
    assert!(scan.rows.iter().all(|r| r.gain.abs() < 1e-12));
}

#[test]
fn separable_derivative_conditions_on_the_model() {
    let holds = separable_model(SeparableParams::power_power(1.0, 0.5, 1.0, 0.3, 0.5), iv(1.0, 2.0), None).unwrap();
    let grid = GridSpec::auto(&holds, 11, 31).unwrap();
    assert!(check_derivative_conditions(&holds, &grid).unwrap().overall.holds());

    let fails = separable_model(SeparableParams::power_power(1.0, 0.3, 1.0, 0.5, 0.5), iv(1.0, 2.0), None).unwrap();
    let grid = GridSpec::auto(&fails, 11, 31).unwrap();
    let v = check_derivative_conditions(&fails, &grid).unwrap();
    assert_eq!(v.first.status, Status::Violated);
}

#[test]
fn multiplicative_benchmark_examples() {
    let grid = GridSpec::uniform(iv(1.0, 2.0), iv(0.05, 0.9), 2, 40).unwrap();
    let sqrt = multiplicative_benchmark(Curve::Power { scale: 1.0, exponent: 0.5 }, &grid).unwrap();
    assert!(sqrt.specific_case.holds());
    assert!(multiplicative_benchmark(Curve::Log { scale: 1.0 }, &grid).unwrap().specific_case.holds());
    let quad = multiplicative_benchmark(Curve::Quadratic { linear: 1.0, quadratic: -0.5 }, &grid).unwrap();
    assert_eq!(quad.specific_case.status, Status::Violated);
}
