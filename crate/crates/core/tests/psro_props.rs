mod common;

use std::collections::BTreeMap;

use farr::br::{estimate_br_value, value_iteration_br, BrMethod, TabularPolicy};
use farr::envs::LavaWorld;
use farr::feasibility::{build_feasible_set, FeasibleSet};
use farr::normform::{exploitability, fictitious_play};
use farr::psro::{init_state, payoff_entry, psro_iterate, run_psro, Objective, PsroConfig, PsroRun, PsroState};
use farr::upomdp::{Environment, Theta};
use farr::Seed;
use proptest::prelude::*;

fn env() -> LavaWorld {
    LavaWorld::default_world()
}

fn eval_set(lambda: f64) -> FeasibleSet {
    let env = env();
    build_feasible_set(&env, lambda, &env.spec().theta_space.enumerate(), &BrMethod::Exact, 1, Seed(0)).unwrap()
}

fn run(objective: Objective, config: &PsroConfig, seed: u64) -> PsroRun {
    run_psro(&env(), objective, config, &eval_set(config.lambda), Seed(seed)).unwrap()
}

fn infeasible_mass(run: &PsroRun, set: &FeasibleSet) -> f64 {
    run.last()
        .sigma_theta
        .iter()
        .filter(|(t, _)| set.is_feasible(t) != Some(true))
        .map(|(_, p)| p)
        .sum()
}

#[test]
fn payoff_entry_examples() {
    let env = env();
    let mut cache = BTreeMap::new();
    let lava_goal = Theta::goal(0, 1);
    let floor_goal = Theta::goal(2, 2);
    for t in [lava_goal, floor_goal] {
        cache.insert(t.key(), estimate_br_value(&env, &t, &BrMethod::Exact, 1, Seed(0)).unwrap());
    }
    let spec = env.spec();
    for k in 0..10 {
        let p = TabularPolicy::random_deterministic(spec.observation_count, spec.action_count, Seed(k));
        let v = payoff_entry(Objective::Farr, &env, &p, &lava_goal, &cache, -10.0, 50.0, 1, Seed(k)).unwrap();
        assert_eq!(v, 50.0);
    }
    let (br, _) = value_iteration_br(&env, &floor_goal, 1e-9).unwrap();
    let regret = payoff_entry(Objective::Regret, &env, &br, &floor_goal, &cache, -10.0, 50.0, 1, Seed(0)).unwrap();
    assert_eq!(regret, 0.0);
    assert!(payoff_entry(Objective::Regret, &env, &br, &Theta::goal(3, 3), &cache, -10.0, 50.0, 1, Seed(0)).is_err());
    assert_eq!(PsroConfig::default().rollouts_for(&env), 1);
}

#[test]
fn regret_entries_are_nonpositive() {
    let config = PsroConfig::default();
    for seed in 0..3 {
        let r = run(Objective::Regret, &config, seed);
        let game = r.state.restricted_game(&config).unwrap();
        for row in game.matrix() {
            for &x in row {
                assert!(x <= 1e-9, "regret entry {x}");
            }
        }
    }
}

#[test]
fn all_feasible_farr_matches_minimax() {
    let config = PsroConfig {
        lambda: -100.0,
        ..PsroConfig::default()
    };
    for seed in 0..2 {
        let farr = run(Objective::Farr, &config, seed);
        let minimax = run(Objective::Minimax, &config, seed);
        assert_eq!(farr.history.len(), minimax.history.len());
        for (a, b) in farr.history.iter().zip(&minimax.history) {
            let mut a = a.clone();
            a.objective = Objective::Minimax;
            assert_eq!(&a, b);
        }
        assert_eq!(
            farr.state.restricted_game(&config).unwrap(),
            minimax.state.restricted_game(&config).unwrap()
        );
    }
}

#[test]
fn farr_adversary_avoids_infeasible_goals() {
    let config = PsroConfig::default();
    let set = eval_set(config.lambda);
    for seed in 0..3 {
        let farr = run(Objective::Farr, &config, seed);
        assert!(infeasible_mass(&farr, &set) <= 1e-6);
        let minimax = run(Objective::Minimax, &config, seed);
        assert!(1.0 - infeasible_mass(&minimax, &set) <= 0.05);
    }
}

#[test]
fn histories_are_reproducible_across_thread_counts() {
    let config = PsroConfig::default();
    let go = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| Objective::ALL.map(|o| run(o, &config, 5).history))
    };
    let one = go(1);
    assert_eq!(one, go(4));
    assert_eq!(one, go(1));
}

fn permuted(state: &PsroState, rows: &[usize], cols: &[usize]) -> PsroState {
    let mut s = state.clone();
    s.protagonists = rows.iter().map(|&i| state.protagonists[i].clone()).collect();
    s.adversaries = cols.iter().map(|&j| state.adversaries[j]).collect();
    s.payoff.cells = rows
        .iter()
        .map(|&i| cols.iter().map(|&j| state.payoff.cells[i][j]).collect())
        .collect();
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn permuting_populations_permutes_the_game(seed in 0u64..1000, shuffle in any::<u64>(), oi in 0usize..3) {
        let objective = Objective::ALL[oi];
        let config = PsroConfig { iterations: 4, ..PsroConfig::default() };
        let state = run(objective, &config, seed).state;
        let mut rows: Vec<usize> = (0..state.protagonists.len()).collect();
        let mut cols: Vec<usize> = (0..state.adversaries.len()).collect();
        let mut rng = Seed(shuffle).rng();
        use rand::seq::SliceRandom;
        rows.shuffle(&mut rng);
        cols.shuffle(&mut rng);
        let p = permuted(&state, &rows, &cols);
        let g = state.restricted_game(&config).unwrap();
        let h = p.restricted_game(&config).unwrap();
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                prop_assert_eq!(h.get(a, b), g.get(i, j));
            }
        }
        let (ng, nh) = (fictitious_play(&g, 20_000).unwrap(), fictitious_play(&h, 20_000).unwrap());
        let slack = exploitability(&g, &ng).unwrap() + exploitability(&h, &nh).unwrap();
        prop_assert!((ng.game_value - nh.game_value).abs() <= slack + 1e-9);
    }

    /// Each new protagonist does at least as well against the adversary
    /// mixture it answered as every existing member.
    #[test]
    fn new_protagonists_improve(seed in 0u64..1000, oi in 0usize..3) {
        let objective = Objective::ALL[oi];
        let env = env();
        let config = PsroConfig::default();
        let mut state = init_state(&env, objective, &config, Seed(seed)).unwrap();
        for _ in 0..6 {
            let before = state.protagonists.len();
            let next = psro_iterate(state, &env, &config, Seed(seed)).unwrap();
            let ne = next.restricted_ne.clone().unwrap();
            if next.protagonists.len() > before {
                let game = next.restricted_game(&config).unwrap();
                let cols = ne.col_dist.len();
                let score = |i: usize| (0..cols).map(|j| ne.col_dist[j] * game.get(i, j)).sum::<f64>();
                let new = score(before);
                // FARR penalty columns are constant across rows, so the
                // raw-return response can only lose on them.
                let infeasible: f64 = next.adversaries[..cols]
                    .iter()
                    .zip(&ne.col_dist)
                    .filter(|(t, _)| objective == Objective::Farr && next.br_cache[&t.key()].value < config.lambda)
                    .map(|(_, p)| p)
                    .sum();
                for i in 0..before {
                    prop_assert!(new >= score(i) - 1e-9 - infeasible * 100.0);
                }
            }
            state = next;
            if state.converged {
                break;
            }
        }
    }
}
