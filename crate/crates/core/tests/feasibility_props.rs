mod common;

use farr::br::{value_iteration_br, BrMethod, TabularPolicy};
use farr::envs::LavaWorld;
use farr::feasibility::{build_feasible_set, farr_utility, worst_case_feasible_reward, FeasibleSet};
use farr::upomdp::{estimate_utility, Environment, Theta};
use farr::Seed;
use proptest::prelude::*;

fn estimates() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-20.0f64..20.0, 1..30)
}

fn set_from(values: &[f64], lambda: f64) -> FeasibleSet {
    FeasibleSet::from_estimates(
        lambda,
        values.iter().enumerate().map(|(i, &v)| (Theta::goal(i / 5, i % 5), v, 0.1)),
    )
    .unwrap()
}

fn lava_set(lambda: f64) -> FeasibleSet {
    let env = LavaWorld::default_world();
    build_feasible_set(&env, lambda, &env.spec().theta_space.enumerate(), &BrMethod::Exact, 1, Seed(0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn penalty_applies_exactly_to_infeasible_records(values in estimates(), lambda in -20.0f64..20.0, u in -30.0f64..30.0) {
        let set = set_from(&values, lambda);
        let c = 1e3;
        for r in &set.records {
            prop_assert_eq!(farr_utility(u, r.br_value, r.lambda, c) == u, r.feasible);
        }
    }

    #[test]
    fn raising_lambda_shrinks_the_feasible_set(values in estimates(), a in -20.0f64..20.0, b in -20.0f64..20.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let low = set_from(&values, lo);
        let high = low.relabel(hi).unwrap();
        for t in high.feasible_thetas() {
            prop_assert!(low.is_feasible(&t) == Some(true));
        }
    }

    #[test]
    fn csv_round_trip_is_bit_identical(values in estimates(), lambda in -20.0f64..20.0) {
        let set = set_from(&values, lambda);
        let mut buf = Vec::new();
        set.write_csv(&mut buf).unwrap();
        let back = FeasibleSet::read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.records.len(), set.records.len());
        for (a, b) in back.records.iter().zip(&set.records) {
            prop_assert_eq!(a.br_value.to_bits(), b.br_value.to_bits());
            prop_assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
            prop_assert_eq!(a.lambda.to_bits(), b.lambda.to_bits());
            prop_assert_eq!(a.feasible, b.feasible);
            prop_assert_eq!(a.theta, b.theta);
        }
    }

    #[test]
    fn worst_case_is_a_lower_bound(seed in any::<u64>()) {
        let env = LavaWorld::default_world();
        let spec = env.spec();
        let set = lava_set(-10.0);
        let p = TabularPolicy::random_deterministic(spec.observation_count, spec.action_count, Seed(seed));
        let wc = worst_case_feasible_reward(&env, std::slice::from_ref(&p), &[1.0], &set, 1, Seed(0)).unwrap();
        for t in set.feasible_thetas() {
            prop_assert!(wc.value <= estimate_utility(&env, &t, &p, 1, Seed(0)).unwrap().mean);
        }
        prop_assert!(set.is_feasible(&wc.theta) == Some(true));
    }

    /// Lowering lambda only adds feasible parameters, which can only lower
    /// the minimum.
    #[test]
    fn worst_case_is_monotone_in_the_feasible_set(seed in any::<u64>(), l1 in -16.0f64..-1.0, l2 in -16.0f64..-1.0) {
        let env = LavaWorld::default_world();
        let spec = env.spec();
        let p = TabularPolicy::random_deterministic(spec.observation_count, spec.action_count, Seed(seed));
        let (small, large) = if l1 >= l2 { (l1, l2) } else { (l2, l1) };
        let base = lava_set(-10.0);
        let a = worst_case_feasible_reward(&env, std::slice::from_ref(&p), &[1.0], &base.relabel(small).unwrap(), 1, Seed(0)).unwrap();
        let b = worst_case_feasible_reward(&env, std::slice::from_ref(&p), &[1.0], &base.relabel(large).unwrap(), 1, Seed(0)).unwrap();
        prop_assert!(b.value <= a.value);
    }
}

#[test]
fn feasibility_examples() {
    let set = lava_set(-1000.0);
    assert_eq!(set.infeasible_count(), 0);
    let set = lava_set(-10.0);
    let env = LavaWorld::default_world();

    // Jumping into lava immediately: from the start, Down leads onto lava.
    let spec = env.spec();
    let down = TabularPolicy::deterministic(&vec![2; spec.observation_count], spec.action_count);
    let wc = worst_case_feasible_reward(&env, std::slice::from_ref(&down), &[1.0], &set, 100, Seed(0)).unwrap();
    assert_eq!(wc.value, -15.0);

    // A single feasible goal: the worst case is that goal's return.
    let t = Theta::goal(2, 2);
    let single = FeasibleSet::from_estimates(-10.0, [(t, -3.0, 0.0)]).unwrap();
    let (p, v) = value_iteration_br(&env, &t, 1e-9).unwrap();
    let wc = worst_case_feasible_reward(&env, std::slice::from_ref(&p), &[1.0], &single, 100, Seed(0)).unwrap();
    assert_eq!(wc.value, v);
    assert_eq!(wc.value, estimate_utility(&env, &t, &p, 100, Seed(0)).unwrap().mean);

    let empty = lava_set(0.0);
    assert!(worst_case_feasible_reward(&env, &[p], &[1.0], &empty, 1, Seed(0)).is_err());
}
