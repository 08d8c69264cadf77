//! Checks on random games that solving the penalized game recovers an
//! equilibrium of the game restricted to feasible columns.
//!
//!     cargo run --release --example penalty_equivalence -- [games] [seed]

use farr::normform::{theorem1_report, MatrixGame};
use farr::Seed;
use rand::Rng;

fn main() -> farr::Result<()> {
    let mut args = std::env::args().skip(1);
    let games: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let mut holds = 0;
    let mut worst_mass: f64 = 0.0;
    let mut worst_expl: f64 = 0.0;
    for g in 0..games {
        let mut rng = Seed(seed).child("game").index(g as u64).rng();
        let rows = rng.random_range(2..=6);
        let cols = rng.random_range(2..=8);
        let u: Vec<Vec<f64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.random_range(-10.0..=10.0)).collect())
            .collect();
        let game = MatrixGame::new(u)?;
        // Column best-response values; at least one column stays feasible.
        let mut br: Vec<f64> = (0..cols).map(|_| rng.random_range(-10.0..=10.0)).collect();
        let lambda = rng.random_range(-10.0..=10.0);
        let keep = rng.random_range(0..cols);
        br[keep] = br[keep].max(lambda);
        let report = theorem1_report(&game, &br, lambda, 100.0, 0.05, 100_000)?;
        holds += report.holds as usize;
        worst_mass = worst_mass.max(report.infeasible_mass);
        worst_expl = worst_expl.max(report.restricted_exploitability);
    }
    println!("{holds}/{games} games pass");
    println!("largest infeasible mass {worst_mass:.2e}, largest restricted exploitability {worst_expl:.4}");
    Ok(())
}
