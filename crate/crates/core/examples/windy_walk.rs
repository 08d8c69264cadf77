//! WindyWalk: feasibility map from Q-learning, then PSRO with the FARR and
//! minimax objectives.
//!
//!     cargo run --release --example windy_walk -- [lambda] [seed]

use farr::br::{BrMethod, QLearningConfig};
use farr::envs::windy::THETA_GRID;
use farr::envs::WindyWalk;
use farr::feasibility::build_feasible_set;
use farr::psro::{run_psro, Objective, PsroConfig};
use farr::upomdp::{Environment, Theta};
use farr::Seed;

fn main() -> farr::Result<()> {
    let mut args = std::env::args().skip(1);
    let lambda: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(5.0);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let env = WindyWalk::new();
    let method = BrMethod::Qlearning(QLearningConfig {
        budget: 30_000,
        ..QLearningConfig::default()
    });
    let grid = env.spec().theta_space.enumerate();
    let set = build_feasible_set(&env, lambda, &grid, &method, 7, Seed(0))?;

    println!("feasibility at lambda = {lambda} ('#' feasible), alpha down, beta across:");
    for &a in &THETA_GRID {
        let line: String = THETA_GRID
            .iter()
            .map(|&b| if set.is_feasible(&Theta::beta(a, b)) == Some(true) { '#' } else { '.' })
            .collect();
        println!("  {a:>5}  {line}");
    }

    let config = PsroConfig {
        lambda,
        iterations: 10,
        payoff_rollouts: Some(100),
        br_method: method,
        ..PsroConfig::default()
    };
    for objective in [Objective::Farr, Objective::Minimax] {
        let run = run_psro(&env, objective, &config, &set, Seed(seed))?;
        let last = run.last();
        println!(
            "{objective}: worst-case feasible reward {:.3} (se {:.3}) at {}",
            last.worst_case_feasible_reward, last.worst_case_stderr, last.argmin_theta
        );
    }
    Ok(())
}
