//! PSRO on Lava World with each objective, compared with the best
//! achievable worst-case feasible return.
//!
//!     cargo run --release --example psro_lava_world -- [seed]

use farr::br::BrMethod;
use farr::envs::LavaWorld;
use farr::feasibility::build_feasible_set;
use farr::psro::{robust_value, run_psro, Objective, PsroConfig};
use farr::upomdp::Environment;
use farr::Seed;

fn main() -> farr::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let env = LavaWorld::default_world();
    let config = PsroConfig::default();
    let grid = env.spec().theta_space.enumerate();
    let set = build_feasible_set(&env, config.lambda, &grid, &BrMethod::Exact, 1, Seed(0))?;
    let rv = robust_value(&env, &set.feasible_thetas(), 100_000, 100, 1e-3)?;
    println!("best worst-case feasible return in [{:.3}, {:.3}]", rv.lower, rv.upper);
    for objective in Objective::ALL {
        let run = run_psro(&env, objective, &config, &set, Seed(seed))?;
        println!("\n{objective}:");
        for m in &run.history {
            println!(
                "  iter {:>2}  worst-case {:>8.3} at {:<10}  exploitability {:.4}  populations {}x{}",
                m.iteration,
                m.worst_case_feasible_reward,
                m.argmin_theta.to_string(),
                m.exploitability,
                m.protagonist_population,
                m.adversary_population
            );
        }
        let infeasible: f64 = run
            .last()
            .sigma_theta
            .iter()
            .filter(|(t, _)| set.is_feasible(t) != Some(true))
            .map(|(_, p)| p)
            .sum();
        println!("  adversary mass on infeasible goals: {infeasible:.4}");
    }
    Ok(())
}
