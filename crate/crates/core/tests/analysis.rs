use std::thread;

use alw_core::analysis::{
    anti_loewner_catalog, battery, classify_anti_loewner, classify_matrix_monotone, direct_monotonicity_probe,
    prop1_suite, random_grid, thm1_suite, trial_rng, Direction, Outcome, SignSearch, TrialConfig,
};
use alw_core::builders::anti_loewner;
use alw_core::functions::{sqrt_transform, FunctionSpec, Interval, SqrtDirection};
use alw_core::json;
use alw_core::linalg::psd_verdict;

#[test]
fn theorem1_forward_implication() {
    let cfg = TrialConfig::with_seed(31).trials(300);
    let squared = cfg.interval(cfg.interval.squared());
    for g in anti_loewner_catalog(31, 4) {
        for n in 1..=3 {
            let anti = classify_anti_loewner(&g, 2 * n, &cfg).unwrap();
            assert_eq!(anti.outcome, Outcome::NoCounterexampleFound, "{}", g.label());
            let h = sqrt_transform(&g, SqrtDirection::TimesSqrt);
            let mm = classify_matrix_monotone(&h, n, Direction::Increasing, &squared).unwrap();
            assert_eq!(mm.outcome, Outcome::NoCounterexampleFound, "{} at N = {n}", h.label());
        }
    }
}

#[test]
fn reciprocal_closure_instance_by_instance() {
    let iv = Interval::new(0.0, 10.0).unwrap();
    let fns = [
        FunctionSpec::power(0.5).unwrap(),
        FunctionSpec::power(2.0).unwrap(),
        FunctionSpec::power(3.0).unwrap(),
        FunctionSpec::log1p(),
    ];
    for g in fns {
        let inv = FunctionSpec::inverse_of(g.clone());
        for t in 0..200 {
            let grid = random_grid(&mut trial_rng(32, t), 3, &iv).unwrap();
            let a = psd_verdict(&anti_loewner(&g, &grid).unwrap(), 1e-9).unwrap();
            let b = psd_verdict(&anti_loewner(&inv, &grid).unwrap(), 1e-9).unwrap();
            if !a.marginal && !b.marginal {
                assert_eq!(a.status, b.status, "{} trial {t}", g.label());
            }
        }
    }
}

#[test]
fn probe_agrees_with_loewner_search() {
    let cfg = TrialConfig::with_seed(33).trials(200);
    for (f, n) in [
        (FunctionSpec::identity(), 3),
        (FunctionSpec::power(0.5).unwrap(), 3),
        (FunctionSpec::log1p(), 3),
        (FunctionSpec::power(2.0).unwrap(), 2),
        (FunctionSpec::power(3.0).unwrap(), 2),
    ] {
        let lo = classify_matrix_monotone(&f, n, Direction::Increasing, &cfg).unwrap();
        let probe = direct_monotonicity_probe(&f, n, &cfg).unwrap();
        assert_eq!(lo.outcome, probe.outcome, "{} at N = {n}", f.label());
    }
}

#[test]
fn reports_do_not_depend_on_threads() {
    let cfg = TrialConfig::with_seed(34).trials(40);
    let fns = anti_loewner_catalog(34, 2);
    let serial = (
        json::to_string(&prop1_suite(6, &cfg, SignSearch::Exhaustive).unwrap()).unwrap(),
        json::to_string(&thm1_suite(&fns, 6, &cfg).unwrap()).unwrap(),
    );
    let parallel = thread::scope(|s| {
        let a = s.spawn(|| json::to_string(&prop1_suite(6, &cfg, SignSearch::Exhaustive).unwrap()).unwrap());
        let b = s.spawn(|| json::to_string(&thm1_suite(&fns, 6, &cfg).unwrap()).unwrap());
        (a.join().unwrap(), b.join().unwrap())
    });
    assert_eq!(serial, parallel);
}

#[test]
fn battery_passes_and_is_reproducible() {
    let a = battery(7).unwrap();
    assert!(a.passed());
    assert_eq!(json::to_string(&a).unwrap(), json::to_string(&battery(7).unwrap()).unwrap());
    assert_ne!(json::to_string(&a).unwrap(), json::to_string(&battery(8).unwrap()).unwrap());
}
