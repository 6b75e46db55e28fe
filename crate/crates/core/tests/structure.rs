use nlt_core::exact::exact_indicators_cells;
use nlt_core::network::amplify;
use nlt_core::optimize::Evaluator;
use nlt_core::verify::{
    check_submodularity, search_counterexample, Family, Scope, SearchParams, SubmodularityOptions, ViolationKind,
};
use nlt_core::{InfoNetwork, SeedSets};

/// Four nodes with a cycle through the target.
fn cyclic_four() -> InfoNetwork {
    InfoNetwork::build(
        &["v", "a", "b", "c"],
        &[("v", "a", 0.4), ("v", "b", 0.3), ("a", "v", 0.6), ("b", "c", 0.5), ("c", "v", 0.9)],
    )
    .unwrap()
}

#[test]
fn amplified_leaves_lag_the_target_by_one_step() {
    let base = cyclic_four();
    let v = base.resolve("v").unwrap();
    let net = amplify(&base, v, 3).unwrap();
    let horizon = 5;
    for seeds in [&["b"][..], &["a", "c"], &["v"], &[]] {
        let s_base = SeedSets::from_labels(&base, seeds, &[] as &[&str]).unwrap();
        let s_amp = SeedSets::from_labels(&net, seeds, &[] as &[&str]).unwrap();
        let tb = exact_indicators_cells(&base, &s_base, horizon, 1_000_000).unwrap().table;
        let ta = exact_indicators_cells(&net, &s_amp, horizon, 1_000_000).unwrap().table;
        for t in 1..=horizon {
            for u in base.non_void_nodes() {
                assert!((tb.get(t, u) - ta.get(t, u)).abs() < 1e-12);
            }
            for leaf in ["v#leaf1", "v#leaf2", "v#leaf3"] {
                let l = net.resolve(leaf).unwrap();
                assert!((ta.get(t, l) - tb.get(t - 1, v)).abs() < 1e-12);
            }
        }
        let gain = ta.influence(&net) - tb.influence(&base);
        let lagged: f64 = (0..horizon).map(|t| tb.get(t, v)).sum::<f64>() * 3.0 / horizon as f64;
        assert!((gain - lagged).abs() < 1e-12);
    }
}

#[test]
fn found_counterexamples_fail_the_submodularity_check() {
    for family in [Family::GeneralCycles, Family::SelfLoopOnly] {
        let ce = search_counterexample(&SearchParams::new(family)).unwrap();
        let mut opts = SubmodularityOptions::new(Scope::FirstArg);
        opts.ground = Some(ce.base.non_void_nodes().collect());
        let rep = check_submodularity(&ce.network, ce.amplified_horizon, Evaluator::Cells { budget: 1_000_000 }, &opts)
            .unwrap();
        assert!(!rep.passed(), "{}", family.tag());
        assert!(rep.violations.iter().any(|v| v.kind == ViolationKind::Submodularity));
        assert!(rep.max_violation >= ce.violation - 1e-12);
    }
}

#[test]
fn acyclic_sweep_finds_no_counterexample() {
    let mut p = SearchParams::new(Family::Acyclic);
    p.max_nodes = 5;
    p.attempts = 300;
    p.horizons = (1, 5);
    assert!(matches!(search_counterexample(&p), Err(nlt_core::Error::NotFound)));
}

#[test]
fn empty_singleton_monotonicity_is_trivial() {
    let net = cyclic_four();
    for w in net.non_void_nodes() {
        let s = SeedSets::new(&net, [w], []).unwrap();
        assert!(Evaluator::Cells { budget: 1_000_000 }.evaluate(&net, &s, 3).unwrap() >= 0.0);
    }
}
