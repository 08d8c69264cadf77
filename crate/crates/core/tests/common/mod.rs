//! Oracles shared by the integration tests. They are written independently
//! of the library code they check.
#![allow(dead_code)]

use std::collections::VecDeque;

use farr::envs::windy::ACTION_RIGHT;
use farr::envs::{GridMap, WindyWalk};
use farr::normform::MatrixGame;
use farr::upomdp::{estimate_utility, ConstantPolicy, Theta, UtilityEstimate};
use farr::Seed;
use rand::Rng;

/// Shortest walking distance from the start to every cell, never stepping
/// on lava except possibly as the final cell. `None` when unreachable.
pub fn bfs_distances(map: &GridMap) -> Vec<Option<usize>> {
    let (h, w) = (map.height(), map.width());
    let mut dist = vec![None; h * w];
    let start = map.start();
    dist[start] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        let (r, col) = (c / w, c % w);
        let d = dist[c].unwrap();
        let mut nbrs = Vec::new();
        if r > 0 {
            nbrs.push(c - w);
        }
        if r + 1 < h {
            nbrs.push(c + w);
        }
        if col > 0 {
            nbrs.push(c - 1);
        }
        if col + 1 < w {
            nbrs.push(c + 1);
        }
        for n in nbrs {
            if dist[n].is_none() && !map.is_lava(n) {
                dist[n] = Some(d + 1);
                queue.push_back(n);
            }
        }
    }
    dist
}

/// Floor goals within `max_steps` of the start.
pub fn bfs_feasible_goals(map: &GridMap, max_steps: usize) -> Vec<Theta> {
    let dist = bfs_distances(map);
    map.goals()
        .into_iter()
        .filter(|t| match t {
            Theta::GridGoal { row, col } => {
                let i = row * map.width() + col;
                !map.is_lava(i) && dist[i].is_some_and(|d| d <= max_steps)
            }
            _ => false,
        })
        .collect()
}

/// Monte Carlo return of always moving right.
pub fn always_right(env: &WindyWalk, theta: &Theta, episodes: usize, seed: Seed) -> UtilityEstimate {
    let policy = ConstantPolicy::for_env(env, ACTION_RIGHT);
    estimate_utility(env, theta, &policy, episodes, seed).unwrap()
}

/// A random game with `rows x cols` entries drawn from [-10, 10].
pub fn random_game(rng: &mut impl Rng, rows: usize, cols: usize) -> MatrixGame {
    let u = (0..rows)
        .map(|_| (0..cols).map(|_| rng.random_range(-10.0..=10.0)).collect())
        .collect();
    MatrixGame::new(u).unwrap()
}

/// Lower median.
pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v[(v.len() - 1) / 2]
}
