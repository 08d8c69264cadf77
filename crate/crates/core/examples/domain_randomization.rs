//! Domain randomization against FARR on Lava World: average return over
//! feasible goals and worst-case return.
//!
//!     cargo run --release --example domain_randomization

use farr::br::BrMethod;
use farr::envs::LavaWorld;
use farr::feasibility::{build_feasible_set, mixture_utility, worst_case_feasible_reward};
use farr::psro::{domain_randomization_train, run_psro, Objective, PsroConfig};
use farr::upomdp::Environment;
use farr::Seed;

fn main() -> farr::Result<()> {
    let env = LavaWorld::default_world();
    let config = PsroConfig::default();
    let grid = env.spec().theta_space.enumerate();
    let set = build_feasible_set(&env, config.lambda, &grid, &BrMethod::Exact, 1, Seed(0))?;
    let feasible = set.feasible_thetas();

    let dr = domain_randomization_train(&env, &grid, &BrMethod::Exact, Seed(0))?;
    let farr = run_psro(&env, Objective::Farr, &config, &set, Seed(0))?;
    let (fp, fw) = farr.final_sigma_p();

    for (name, policies, weights) in [("dr", std::slice::from_ref(&dr), &[1.0][..]), ("farr", fp, fw)] {
        let mut avg = 0.0;
        for t in &feasible {
            avg += mixture_utility(&env, t, policies, weights, 1, Seed(0))?.mean;
        }
        avg /= feasible.len() as f64;
        let wc = worst_case_feasible_reward(&env, policies, weights, &set, 1, Seed(0))?;
        println!("{name:>5}: average {avg:>7.3}, worst case {:>7.3} at {}", wc.value, wc.theta);
    }
    Ok(())
}
