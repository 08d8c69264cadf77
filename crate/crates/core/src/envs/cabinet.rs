//! The item-retrieval matrix game: the adversary hides a bowl in the left,
//! middle or locked right cabinet and the protagonist decides whether to
//! try to grab it.

use crate::normform::MatrixGame;

/// Feasibility threshold for the cabinet game.
pub const CABINET_LAMBDA: f64 = 1.0;
/// Infeasibility penalty for the cabinet game.
pub const CABINET_PENALTY: f64 = 500.0;

pub const GRAB: usize = 0;
pub const DONT_GRAB: usize = 1;
pub const LEFT: usize = 0;
pub const MIDDLE: usize = 1;
pub const LOCKED: usize = 2;

/// Grabbing from the left cabinet pays 2, from the harder middle cabinet 1,
/// and a failed grab at the locked cabinet costs 10. Not grabbing pays 0.
pub fn canonical_cabinet_game() -> MatrixGame {
    MatrixGame::new(vec![vec![2.0, 1.0, -10.0], vec![0.0, 0.0, 0.0]])
        .and_then(|g| g.with_labels(&["grab", "dont-grab"], &["left", "middle", "locked-right"]))
        .expect("static game is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normform::{farr_transform, feasible_columns, fictitious_play};

    #[test]
    fn feasibility_vector() {
        let g = canonical_cabinet_game();
        assert_eq!(
            feasible_columns(&g.column_maxima(), CABINET_LAMBDA),
            vec![true, true, false]
        );
    }

    #[test]
    fn farr_equilibrium_grabs_middle() {
        let g = canonical_cabinet_game();
        let t = farr_transform(&g, &g.column_maxima(), CABINET_LAMBDA, CABINET_PENALTY).unwrap();
        let ne = fictitious_play(&t, 2000).unwrap();
        assert!(ne.row_dist[GRAB] >= 0.98);
        assert!(ne.col_dist[MIDDLE] >= 0.98);
        assert!((ne.game_value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn original_equilibrium_does_not_grab() {
        let ne = fictitious_play(&canonical_cabinet_game(), 2000).unwrap();
        assert!(ne.row_dist[DONT_GRAB] >= 0.98);
        assert!(ne.game_value.abs() < 0.02);
    }
}
