//! The cabinet game: solve it, penalize the infeasible column, and reduce
//! the penalized game by dominance.
//!
//!     cargo run --example matrix_game

use farr::harness::cabinet_demo;

fn main() -> farr::Result<()> {
    let demo = cabinet_demo()?;
    print!("{}", demo.report);
    Ok(())
}
