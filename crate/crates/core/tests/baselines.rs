use farr::br::{value_iteration_br, value_iteration_br_mixture, BrMethod};
use farr::envs::LavaWorld;
use farr::feasibility::{build_feasible_set, mixture_utility, worst_case_feasible_reward};
use farr::psro::{domain_randomization_train, robust_value, run_psro, Objective, PsroConfig};
use farr::upomdp::{estimate_utility, Environment};
use farr::Seed;

#[test]
fn uniform_mixture_value_matches_simulation() {
    let env = LavaWorld::default_world();
    let all = env.spec().theta_space.enumerate();
    let w = vec![1.0 / all.len() as f64; all.len()];
    let (p, v) = value_iteration_br_mixture(&env, &all, &w).unwrap();
    let simulated: f64 = all
        .iter()
        .zip(&w)
        .map(|(t, w)| w * estimate_utility(&env, t, &p, 10_000, Seed(1)).unwrap().mean)
        .sum();
    assert!((simulated - v).abs() < 1e-9);
}

#[test]
fn domain_randomization_examples() {
    let env = LavaWorld::default_world();
    let all = env.spec().theta_space.enumerate();
    let config = PsroConfig::default();
    let set = build_feasible_set(&env, config.lambda, &all, &BrMethod::Exact, 1, Seed(0)).unwrap();
    let rv = robust_value(&env, &set.feasible_thetas(), 100_000, 100, 1e-3).unwrap();

    let dr = domain_randomization_train(&env, &all, &BrMethod::Exact, Seed(0)).unwrap();
    let dr_wc = worst_case_feasible_reward(&env, std::slice::from_ref(&dr), &[1.0], &set, 1, Seed(0)).unwrap();
    assert!(dr_wc.value < rv.lower, "{} vs {}", dr_wc.value, rv.lower);

    // A single parameter: domain randomization is that parameter's best response.
    let t = all[7];
    let single = domain_randomization_train(&env, &[t], &BrMethod::Exact, Seed(0)).unwrap();
    let (br, v) = value_iteration_br(&env, &t, 1e-9).unwrap();
    assert!(single.same_behavior(&br));
    assert_eq!(estimate_utility(&env, &t, &single, 1, Seed(0)).unwrap().mean, v);

    // Domain randomization wins on average over every parameter.
    let average = |policies: &[_], weights: &[f64]| -> f64 {
        all.iter()
            .map(|t| mixture_utility(&env, t, policies, weights, 1, Seed(0)).unwrap().mean)
            .sum::<f64>()
            / all.len() as f64
    };
    for seed in 0..3 {
        let farr = run_psro(&env, Objective::Farr, &config, &set, Seed(seed)).unwrap();
        let (fp, fw) = farr.final_sigma_p();
        assert!(average(std::slice::from_ref(&dr), &[1.0]) >= average(fp, fw) - 1e-9);
    }
}
