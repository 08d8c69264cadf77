//! Lava World: a 5×5 grid with a hidden goal chosen by the adversary.
//!
//! The protagonist pays 1 per step until it reaches the goal. Entering lava
//! ends the episode with a single -15 (replacing that step's -1), whether or
//! not the goal is there. Episodes last at most 20 steps.

use std::collections::VecDeque;
use std::fmt;

use crate::br::TabularPolicy;
use crate::error::{FarrError, Result};
use crate::rng::Seed;
use crate::upomdp::{Environment, Outcome, Step, Theta, ThetaSpace, UpomdpSpec};

pub const LAVA_HORIZON: usize = 20;
pub const STEP_REWARD: f64 = -1.0;
pub const LAVA_REWARD: f64 = -15.0;

/// Shipped layout: a 3×3 platform with a spur below and the start on its
/// left edge, plus an isolated floor cell in the top-left corner that
/// cannot be reached without crossing lava.
pub const DEFAULT_MAP: &str = "\
.LLLL
L...L
L...L
S...L
LL.LL
";

/// Most floor goals the belief solver will track at once.
const MAX_TRACKED_GOALS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Floor,
    Lava,
    Start,
}

/// Up, right, down, left.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Up = 0,
    Right = 1,
    Down = 2,
    Left = 3,
}

pub const MOVES: [Move; 4] = [Move::Up, Move::Right, Move::Down, Move::Left];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMap {
    width: usize,
    height: usize,
    cells: Vec<Cell>,
    start: usize,
}

/// Parses an ASCII map of `S` (start), `.` (floor) and `L` (lava).
pub fn load_map(text: &str) -> Result<GridMap> {
    let rows: Vec<&str> = text
        .lines()
        .map(str::trim_end)
        .filter(|l| !l.is_empty())
        .collect();
    if rows.is_empty() {
        return Err(FarrError::MapParse("map is empty".into()));
    }
    let width = rows[0].chars().count();
    let mut cells = Vec::with_capacity(width * rows.len());
    for (r, line) in rows.iter().enumerate() {
        if line.chars().count() != width {
            return Err(FarrError::MapParse(format!(
                "row {r} has {} cells, expected {width}",
                line.chars().count()
            )));
        }
        for (c, ch) in line.chars().enumerate() {
            cells.push(match ch {
                '.' => Cell::Floor,
                'L' => Cell::Lava,
                'S' => Cell::Start,
                other => {
                    return Err(FarrError::MapParse(format!("bad character {other:?} at ({r}, {c})")))
                }
            });
        }
    }
    let starts: Vec<usize> = (0..cells.len()).filter(|&i| cells[i] == Cell::Start).collect();
    let start = match starts[..] {
        [s] => s,
        [] => return Err(FarrError::MapParse("map has no start cell".into())),
        _ => return Err(FarrError::MapParse(format!("map has {} start cells", starts.len()))),
    };
    if cells.len() < 2 {
        return Err(FarrError::MapParse("map has no legal goal cells".into()));
    }
    Ok(GridMap {
        width,
        height: rows.len(),
        cells,
        start,
    })
}

impl GridMap {
    pub fn default_map() -> GridMap {
        load_map(DEFAULT_MAP).expect("shipped map parses")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn cell(&self, idx: usize) -> Cell {
        self.cells[idx]
    }

    pub fn is_lava(&self, idx: usize) -> bool {
        self.cells[idx] == Cell::Lava
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.width + col
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx / self.width, idx % self.width)
    }

    /// Moves one cell, staying put at the border.
    pub fn neighbor(&self, idx: usize, m: Move) -> usize {
        let (r, c) = self.coords(idx);
        let (r, c) = match m {
            Move::Up => (r.saturating_sub(1), c),
            Move::Right => (r, (c + 1).min(self.width - 1)),
            Move::Down => ((r + 1).min(self.height - 1), c),
            Move::Left => (r, c.saturating_sub(1)),
        };
        self.index(r, c)
    }

    /// Every cell except the start, row-major.
    pub fn goals(&self) -> Vec<Theta> {
        (0..self.cells.len())
            .filter(|&i| i != self.start)
            .map(|i| {
                let (r, c) = self.coords(i);
                Theta::goal(r, c)
            })
            .collect()
    }

    /// Cells reachable from the start without touching lava.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.cells.len()];
        let mut queue = VecDeque::from([self.start]);
        seen[self.start] = true;
        while let Some(i) = queue.pop_front() {
            for m in MOVES {
                let j = self.neighbor(i, m);
                if !seen[j] && !self.is_lava(j) {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen
    }
}

impl fmt::Display for GridMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.height {
            for c in 0..self.width {
                let ch = match self.cells[self.index(r, c)] {
                    Cell::Floor => '.',
                    Cell::Lava => 'L',
                    Cell::Start => 'S',
                };
                write!(f, "{ch}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// One Lava World transition toward a goal cell.
pub fn lava_step(map: &GridMap, state: usize, action: usize, goal: usize) -> Step {
    let next = map.neighbor(state, MOVES[action]);
    if map.is_lava(next) {
        Step {
            next,
            reward: LAVA_REWARD,
            terminal: true,
        }
    } else {
        Step {
            next,
            reward: STEP_REWARD,
            terminal: next == goal,
        }
    }
}

/// The Lava World environment family. Observations are `(cell, step)`
/// pairs, so the goal stays hidden while open-loop search plans remain
/// expressible as observation tables.
#[derive(Debug, Clone)]
pub struct LavaWorld {
    map: GridMap,
    spec: UpomdpSpec,
}

impl LavaWorld {
    pub fn new(map: GridMap) -> Self {
        let spec = UpomdpSpec {
            action_count: MOVES.len(),
            observation_count: map.len() * LAVA_HORIZON,
            horizon: LAVA_HORIZON,
            discount: 1.0,
            theta_space: ThetaSpace::Finite(map.goals()),
        };
        LavaWorld { map, spec }
    }

    pub fn default_world() -> Self {
        LavaWorld::new(GridMap::default_map())
    }

    pub fn map(&self) -> &GridMap {
        &self.map
    }

    fn goal_index(&self, theta: &Theta) -> usize {
        match *theta {
            Theta::GridGoal { row, col } => self.map.index(row, col),
            Theta::BetaParams { .. } => usize::MAX,
        }
    }

    pub fn observation(&self, cell: usize, t: usize) -> usize {
        cell * LAVA_HORIZON + t
    }
}

impl Environment for LavaWorld {
    fn spec(&self) -> &UpomdpSpec {
        &self.spec
    }

    fn state_count(&self) -> usize {
        self.map.len()
    }

    fn initial_state(&self, _theta: &Theta) -> usize {
        self.map.start
    }

    fn observe(&self, state: usize, t: usize) -> usize {
        self.observation(state, t.min(LAVA_HORIZON - 1))
    }

    fn step(&self, state: usize, action: usize, theta: &Theta, _seed: Seed) -> Step {
        lava_step(&self.map, state, action, self.goal_index(theta))
    }

    fn transitions(&self, state: usize, action: usize, theta: &Theta) -> Option<Vec<Outcome>> {
        let s = lava_step(&self.map, state, action, self.goal_index(theta));
        Some(vec![Outcome {
            prob: 1.0,
            next: s.next,
            reward: s.reward,
            terminal: s.terminal,
        }])
    }

    fn observes_time(&self) -> bool {
        true
    }

    fn is_deterministic(&self) -> bool {
        true
    }

    fn reward_bounds(&self) -> (f64, f64) {
        (LAVA_REWARD, STEP_REWARD)
    }

    fn max_achievable_return(&self) -> f64 {
        STEP_REWARD
    }

    /// Exact best response to a goal distribution.
    ///
    /// Nothing is observed about the goal until the episode ends, so the
    /// protagonist commits to a single path. Along that path the posterior
    /// is the prior restricted to goals not yet stepped on, which makes
    /// `(cell, step, set of visited support goals)` an exact belief state.
    /// Lava and unreachable goals can never be found and stay in the
    /// active mass until the path enters lava or the horizon runs out.
    fn mixture_best_response(&self, thetas: &[Theta], weights: &[f64]) -> Result<(TabularPolicy, f64)> {
        if thetas.is_empty() || thetas.len() != weights.len() {
            return Err(FarrError::DimensionMismatch(format!(
                "{} thetas with {} weights",
                thetas.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|&w| w.is_nan() || w < 0.0) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(FarrError::InvalidArgument("mixture weights must be a distribution".into()));
        }
        for t in thetas {
            self.check_theta(t)?;
        }

        let map = &self.map;
        let cells = map.len();
        let reachable = map.reachable();
        let mut cell_weight = vec![0.0; cells];
        for (t, &w) in thetas.iter().zip(weights) {
            cell_weight[self.goal_index(t)] += w;
        }
        // Findable goals get a bit in the visited mask.
        let tracked: Vec<usize> = (0..cells)
            .filter(|&i| cell_weight[i] > 0.0 && reachable[i] && !map.is_lava(i))
            .collect();
        if tracked.len() > MAX_TRACKED_GOALS {
            return Err(FarrError::Intractable(format!(
                "{} findable goals in support (limit {MAX_TRACKED_GOALS})",
                tracked.len()
            )));
        }
        let mut bit_of = vec![None; cells];
        for (b, &i) in tracked.iter().enumerate() {
            bit_of[i] = Some(b);
        }
        let masks = 1usize << tracked.len();
        // Probability mass whose episode is still running under each mask.
        let active: Vec<f64> = (0..masks)
            .map(|m| {
                let found: f64 = tracked
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| m & (1 << b) != 0)
                    .map(|(_, &i)| cell_weight[i])
                    .sum();
                (1.0 - found).max(0.0)
            })
            .collect();

        let horizon = self.spec.horizon;
        let layer = masks * cells;
        let mut next_v = vec![0.0f64; layer];
        let mut cur_v = vec![0.0f64; layer];
        let mut choice = vec![0u8; horizon * layer];
        for t in (0..horizon).rev() {
            for m in 0..masks {
                let mass = active[m];
                for pos in 0..cells {
                    let mut best = f64::NEG_INFINITY;
                    let mut best_a = 0u8;
                    for (a, &mv) in MOVES.iter().enumerate() {
                        let nxt = map.neighbor(pos, mv);
                        let q = if map.is_lava(nxt) {
                            LAVA_REWARD * mass
                        } else {
                            let m2 = match bit_of[nxt] {
                                Some(b) => m | (1 << b),
                                None => m,
                            };
                            STEP_REWARD * mass + next_v[m2 * cells + nxt]
                        };
                        if q > best {
                            best = q;
                            best_a = a as u8;
                        }
                    }
                    cur_v[m * cells + pos] = best;
                    choice[t * layer + m * cells + pos] = best_a;
                }
            }
            std::mem::swap(&mut cur_v, &mut next_v);
        }
        let value = next_v[map.start];

        let mut table = vec![0usize; self.spec.observation_count];
        let (mut pos, mut mask) = (map.start, 0usize);
        for t in 0..horizon {
            if active[mask] <= 0.0 {
                break;
            }
            let a = choice[t * layer + mask * cells + pos] as usize;
            table[self.observation(pos, t)] = a;
            let nxt = map.neighbor(pos, MOVES[a]);
            if map.is_lava(nxt) {
                break;
            }
            if let Some(b) = bit_of[nxt] {
                mask |= 1 << b;
            }
            pos = nxt;
        }
        let policy = TabularPolicy::deterministic(&table, MOVES.len());
        Ok((policy, value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::upomdp::{rollout, ConstantPolicy};

    #[test]
    fn default_map_counts() {
        let map = GridMap::default_map();
        let goals = map.goals();
        assert_eq!(goals.len(), 24);
        let lava = (0..map.len()).filter(|&i| map.is_lava(i)).count();
        assert_eq!(lava, 13);
        assert_eq!(map.coords(map.start()), (3, 0));
        assert_eq!(map.to_string(), DEFAULT_MAP);
    }

    #[test]
    fn load_map_errors() {
        assert!(load_map("S.\n.S\n").is_err());
        assert!(load_map("..\n..\n").is_err());
        assert!(load_map("S").is_err());
        assert!(load_map("S..\n..\n").is_err());
        assert!(load_map("S.x\n").is_err());
        assert!(load_map("").is_err());
    }

    #[test]
    fn step_rules() {
        let map = GridMap::default_map();
        let s = map.start();
        let far_goal = map.index(1, 3);
        let step = lava_step(&map, s, Move::Right as usize, far_goal);
        assert_eq!((step.reward, step.terminal), (-1.0, false));
        let lava_goal = map.index(2, 0);
        let step = lava_step(&map, s, Move::Up as usize, lava_goal);
        assert_eq!((step.reward, step.terminal), (-15.0, true));
        let step = lava_step(&map, s, Move::Right as usize, map.index(3, 1));
        assert_eq!((step.reward, step.terminal), (-1.0, true));
        // Walking into the west wall stays put.
        assert_eq!(lava_step(&map, s, Move::Left as usize, far_goal).next, s);
    }

    #[test]
    fn horizon_cap() {
        let env = LavaWorld::default_world();
        // Bumping the wall forever never reaches the goal.
        let pol = ConstantPolicy::for_env(&env, Move::Left as usize);
        let tr = rollout(&env, &Theta::goal(1, 3), &pol, Seed(0)).unwrap();
        assert_eq!(tr.steps.len(), 20);
        assert_eq!(tr.return_value, -20.0);
    }

    #[test]
    fn lava_jump_is_minus_fifteen() {
        let env = LavaWorld::default_world();
        let pol = ConstantPolicy::for_env(&env, Move::Up as usize);
        for goal in env.map().goals() {
            let tr = rollout(&env, &goal, &pol, Seed(9)).unwrap();
            assert_eq!(tr.return_value, -15.0);
        }
    }

    #[test]
    fn mixture_rejects_bad_weights() {
        let env = LavaWorld::default_world();
        let g = env.map().goals();
        assert!(env.mixture_best_response(&g[..2], &[0.5]).is_err());
        assert!(env.mixture_best_response(&g[..2], &[0.7, 0.7]).is_err());
        assert!(env
            .mixture_best_response(&[Theta::beta(1.0, 1.0)], &[1.0])
            .is_err());
    }
}
