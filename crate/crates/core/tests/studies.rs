//! Monte Carlo studies end to end on small budgets.

use fbchan::channel::check_conditions;
use fbchan::coding::{error_rate_curve, CodeConfig};
use fbchan::discretize::{exponent_a3, fit_strong_rate, simulate_em, strong_error_study};
use fbchan::info::{mi_cmmse, mi_convergence_study, mi_plugin};
use fbchan::{drift, rng, BrownianPath, ChannelDrift, ChannelSpec, McConfig, Message, Reduction, TimeGrid};

fn builtins() -> Vec<ChannelDrift> {
    vec![
        drift::zero(),
        drift::constant_antipodal(1.0).unwrap(),
        drift::saturated_feedback(1.0).unwrap(),
        drift::sk_linear_feedback(1.0, vec![(-1.0, -1.0), (1.0, 1.0)], 0.125).unwrap(),
    ]
}

#[test]
fn builtin_drifts_honor_declared_constants() {
    let msg = Message::antipodal(0.5).unwrap();
    let grid = TimeGrid::even(1.0, 32).unwrap();
    for (k, d) in builtins().iter().enumerate() {
        let rep = check_conditions(d.as_ref(), &msg, &grid, 10_000, k as u64).unwrap();
        assert!(!rep.any_violation(), "{}: {rep:?}", d.name());
    }
}

#[test]
fn strong_rate_for_feedback_drifts() {
    let grids: Vec<TimeGrid> = [8, 16, 32, 64]
        .iter()
        .map(|&n| TimeGrid::even(1.0, n).unwrap())
        .collect();
    for d in &builtins()[2..] {
        let spec = ChannelSpec::new(d.clone(), Message::antipodal(0.5).unwrap(), 1.0, 2.0).unwrap();
        let rows = strong_error_study(&spec, &grids, 32, &McConfig::new(400, 1)).unwrap();
        let slope = fit_strong_rate(&rows).unwrap();
        assert!(slope >= 0.8, "{}: slope {slope}", d.name());
    }
}

#[test]
fn true_message_maximizes_mean_log_likelihood() {
    let d = drift::saturated_feedback(1.0).unwrap();
    let g = TimeGrid::even(1.0, 32).unwrap();
    let n = 4000;
    let mut gap = 0.0;
    for i in 0..n {
        let mut r = rng::stream(21, i);
        let b = BrownianPath::sample_with(&g, &mut r);
        let em = simulate_em(d.as_ref(), 1.0, &g, &b).unwrap();
        // −A₃ is the log-likelihood up to a message-free term
        let truth = -exponent_a3(d.as_ref(), 1.0, &em).value;
        let other = -exponent_a3(d.as_ref(), -1.0, &em).value;
        gap += truth - other;
    }
    assert!(gap / n as f64 > 0.0);
}

#[test]
fn estimators_agree_on_feedback_channels() {
    let g = TimeGrid::even(1.0, 32).unwrap();
    let mc = McConfig::new(20_000, 9);
    for d in builtins() {
        let spec = ChannelSpec::new(d, Message::antipodal(0.5).unwrap(), 1.0, 2.0).unwrap();
        let p = mi_plugin(&spec, &g, &mc).unwrap();
        let c = mi_cmmse(&spec, &g, &mc).unwrap();
        assert!((p.value - c.value).abs() <= 3.0 * p.combined_stderr(&c), "{p:?} {c:?}");
        assert!(p.value <= 2f64.ln() + 3.0 * p.stderr);
    }
}

#[test]
fn convergence_study_is_thread_independent_in_ordered_mode() {
    let spec = ChannelSpec::new(
        drift::saturated_feedback(1.0).unwrap(),
        Message::antipodal(0.5).unwrap(),
        1.0,
        2.0,
    )
    .unwrap();
    let g = TimeGrid::even(1.0, 8).unwrap();
    let mc = McConfig::new(1000, 5).with_reduction(Reduction::Ordered);
    let a = mi_convergence_study(&spec, &g, 3, &mc).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let b = pool.install(|| mi_convergence_study(&spec, &g, 3, &mc).unwrap());
    assert_eq!(a, b);
}

#[test]
fn error_rate_curve_rows_are_proportions() {
    let base = CodeConfig::new(0.4, 2.0, 2.0, TimeGrid::even(2.0, 32).unwrap()).unwrap();
    let rows = error_rate_curve(&base, &[2.0, 4.0], 500, 3).unwrap();
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert!((0.0..=1.0).contains(&r.p_e) && r.stderr <= 0.5);
        assert!(!r.power_violation, "{r:?}");
    }
}
