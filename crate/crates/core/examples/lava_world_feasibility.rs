//! Prints the Lava World map and, for each goal, its best return and
//! whether it is feasible at a threshold.
//!
//!     cargo run --example lava_world_feasibility -- [lambda]

use farr::br::BrMethod;
use farr::envs::LavaWorld;
use farr::feasibility::build_feasible_set;
use farr::upomdp::Environment;
use farr::Seed;

fn main() -> farr::Result<()> {
    let lambda: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(-10.0);
    let env = LavaWorld::default_world();
    println!("{}", env.map());
    let grid = env.spec().theta_space.enumerate();
    let set = build_feasible_set(&env, lambda, &grid, &BrMethod::Exact, 1, Seed(0))?;
    for r in &set.records {
        println!("{:<12} best return {:>6.1}  {}", r.theta.to_string(), r.br_value, if r.feasible { "feasible" } else { "infeasible" });
    }
    println!("{} feasible, {} infeasible at lambda = {lambda}", set.feasible_count(), set.infeasible_count());
    Ok(())
}
