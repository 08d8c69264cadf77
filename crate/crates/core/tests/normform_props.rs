mod common;

use farr::normform::{
    exploitability, farr_transform, feasible_columns, fictitious_play, iesds_reduce, MatrixGame, MixedPair,
};
use proptest::prelude::*;

fn game_strategy() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>, f64)> {
    (2usize..=5, 2usize..=6).prop_flat_map(|(r, c)| {
        (
            prop::collection::vec(prop::collection::vec(-10.0f64..10.0, c), r),
            prop::collection::vec(-10.0f64..10.0, c),
            -10.0f64..10.0,
        )
    })
}

/// Forces at least one feasible column.
fn with_feasible(mut br: Vec<f64>, lambda: f64) -> Vec<f64> {
    if !br.iter().any(|&v| v >= lambda) {
        br[0] = lambda;
    }
    br
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adversary_utility_is_negated((u, _, _) in game_strategy()) {
        let g = MatrixGame::new(u).unwrap();
        for i in 0..g.rows() {
            for j in 0..g.cols() {
                prop_assert_eq!(g.adversary_utility(i, j), -g.get(i, j));
            }
        }
    }

    #[test]
    fn transform_is_idempotent((u, br, lambda) in game_strategy()) {
        let g = MatrixGame::new(u).unwrap();
        let br = with_feasible(br, lambda);
        let once = farr_transform(&g, &br, lambda, 100.0).unwrap();
        let twice = farr_transform(&once, &br, lambda, 100.0).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn penalized_columns_are_strictly_dominated((u, br, lambda) in game_strategy()) {
        let g = MatrixGame::new(u).unwrap();
        let br = with_feasible(br, lambda);
        let t = farr_transform(&g, &br, lambda, 100.0).unwrap();
        let feasible = feasible_columns(&br, lambda);
        for bad in (0..t.cols()).filter(|&j| !feasible[j]) {
            for good in (0..t.cols()).filter(|&j| feasible[j]) {
                for i in 0..t.rows() {
                    // Adversary utility is strictly higher on every feasible column.
                    prop_assert!(t.adversary_utility(i, good) > t.adversary_utility(i, bad));
                }
            }
        }
    }

    #[test]
    fn too_small_penalty_is_rejected((u, br, lambda) in game_strategy()) {
        let g = MatrixGame::new(u).unwrap();
        let br = with_feasible(br, lambda);
        prop_assert!(farr_transform(&g, &br, lambda, -11.0).is_err());
    }

    #[test]
    fn fictitious_play_frequencies_are_exact((u, _, _) in game_strategy(), iters in 1usize..300) {
        let g = MatrixGame::new(u).unwrap();
        let ne = fictitious_play(&g, iters).unwrap();
        for d in [&ne.row_dist, &ne.col_dist] {
            for &p in d.iter() {
                let k = p * iters as f64;
                prop_assert!((k - k.round()).abs() < 1e-9, "{} is not a multiple of 1/{}", p, iters);
                prop_assert!(p >= 0.0);
            }
            prop_assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        prop_assert!(MixedPair::new(&g, ne.row_dist.clone(), ne.col_dist.clone()).is_ok());
    }

    #[test]
    fn exploitability_is_nonnegative((u, _, _) in game_strategy(), iters in 1usize..500) {
        let g = MatrixGame::new(u).unwrap();
        let ne = fictitious_play(&g, iters).unwrap();
        prop_assert!(exploitability(&g, &ne).unwrap() >= 0.0);
    }

    /// Any profile that is nearly unexploitable in a penalized game puts
    /// no weight on penalized columns.
    #[test]
    fn equilibria_avoid_penalized_columns((u, br, lambda) in game_strategy()) {
        let g = MatrixGame::new(u).unwrap();
        let br = with_feasible(br, lambda);
        let t = farr_transform(&g, &br, lambda, 100.0).unwrap();
        let reduction = iesds_reduce(&t).unwrap();
        let feasible = feasible_columns(&br, lambda);
        // Dominance elimination removes every penalized column.
        for (j, f) in feasible.iter().enumerate() {
            if !f {
                prop_assert!(reduction.removed_cols.contains(&j));
            }
        }
        let ne = fictitious_play(&t, 20_000).unwrap();
        if exploitability(&t, &ne).unwrap() <= 1e-6 {
            let mass: f64 = (0..t.cols()).filter(|&j| !feasible[j]).map(|j| ne.col_dist[j]).sum();
            prop_assert!(mass <= 1e-6);
        }
        // Fictitious play never best-responds with a dominated column after
        // the first move, so its penalized mass is at most one move.
        let mass: f64 = (0..t.cols()).filter(|&j| !feasible[j]).map(|j| ne.col_dist[j]).sum();
        prop_assert!(mass <= 1.0 / 20_000.0 + 1e-12);
    }

    #[test]
    fn reduction_never_removes_equilibrium_value((u, _, _) in game_strategy()) {
        let g = MatrixGame::new(u).unwrap();
        let red = iesds_reduce(&g).unwrap();
        prop_assert_eq!(red.kept_rows.len() + red.removed_rows.len(), g.rows());
        prop_assert_eq!(red.kept_cols.len() + red.removed_cols.len(), g.cols());
        let full = fictitious_play(&g, 20_000).unwrap();
        let small = fictitious_play(&red.game, 20_000).unwrap();
        prop_assert!((full.game_value - small.game_value).abs() < 0.3);
    }

    #[test]
    fn text_format_round_trips((u, _, _) in game_strategy()) {
        let g = MatrixGame::new(u).unwrap();
        prop_assert_eq!(MatrixGame::parse_text(&g.to_text()).unwrap(), g);
    }
}

#[test]
fn exact_equilibria_have_no_penalized_mass() {
    // Matching pennies plus an infeasible column; the exact equilibrium
    // mixes 50/50 on the feasible columns.
    let g = MatrixGame::new(vec![vec![1.0, -1.0, -5.0], vec![-1.0, 1.0, -5.0]]).unwrap();
    let t = farr_transform(&g, &[0.0, 0.0, -1.0], 0.0, 10.0).unwrap();
    let pair = MixedPair::new(&t, vec![0.5, 0.5], vec![0.5, 0.5, 0.0]).unwrap();
    assert!(exploitability(&t, &pair).unwrap() <= 1e-12);
}

#[test]
fn long_runs_are_nearly_unexploitable() {
    use rand::Rng;
    for g in 0..60u64 {
        let mut rng = farr::Seed(g).child("fp").rng();
        let rows = rng.random_range(2..=6);
        let cols = rng.random_range(2..=8);
        let game = common::random_game(&mut rng, rows, cols);
        let ne = fictitious_play(&game, 100_000).unwrap();
        assert!(exploitability(&game, &ne).unwrap() <= 0.01, "game {g}");
    }
}

#[test]
fn symmetric_games_converge_to_uniform() {
    let pennies = MatrixGame::new(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
    let rps = MatrixGame::new(vec![vec![0.0, -1.0, 1.0], vec![1.0, 0.0, -1.0], vec![-1.0, 1.0, 0.0]]).unwrap();
    for g in [pennies, rps] {
        let ne = fictitious_play(&g, 2000).unwrap();
        let k = g.rows() as f64;
        for &p in ne.row_dist.iter().chain(&ne.col_dist) {
            assert!((p - 1.0 / k).abs() <= 0.02);
        }
        assert!(ne.game_value.abs() <= 0.02);
    }
}
