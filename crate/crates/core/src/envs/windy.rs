//! WindyWalk: a one-dimensional walk pushed around by beta-distributed wind.
//!
//! Each step the adversary's distribution `Beta(alpha, beta)` yields a
//! sample `X`; the wind displaces the walker right when `X > 0.7` and left
//! when `X < 0.3`. Moving exposes the walker to the wind at twice its
//! strength, while holding still ignores it. Reward is the clamped position
//! change, so an episode's return is its final position.

use rand_distr::{Beta, Distribution};
use statrs::function::beta::beta_reg;

use crate::error::{FarrError, Result};
use crate::rng::Seed;
use crate::upomdp::{Environment, Outcome, Step, Theta, ThetaSpace, UpomdpSpec};

pub const POSITION_LIMIT: i64 = 15;
pub const WINDY_HORIZON: usize = 50;
pub const LOW_THRESHOLD: f64 = 0.3;
pub const HIGH_THRESHOLD: f64 = 0.7;
pub const WIND_GAIN: i64 = 2;

/// The discretization used for enumerating `(alpha, beta)`.
pub const THETA_GRID: [f64; 11] = [0.01, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];

/// Step left, hold, step right.
pub const ACTIONS: [i64; 3] = [-1, 0, 1];
pub const ACTION_LEFT: usize = 0;
pub const ACTION_HOLD: usize = 1;
pub const ACTION_RIGHT: usize = 2;

const POSITIONS: usize = (2 * POSITION_LIMIT + 1) as usize;

/// Wind displacement for a beta sample.
pub fn wind_from_sample(x: f64) -> i64 {
    if x > HIGH_THRESHOLD {
        1
    } else if x < LOW_THRESHOLD {
        -1
    } else {
        0
    }
}

/// Probabilities of wind `(-1, 0, +1)` under `Beta(alpha, beta)`.
pub fn wind_probabilities(alpha: f64, beta: f64) -> [f64; 3] {
    let left = beta_reg(alpha, beta, LOW_THRESHOLD);
    let right = 1.0 - beta_reg(alpha, beta, HIGH_THRESHOLD);
    [left, (1.0 - left - right).max(0.0), right]
}

fn beta_params(theta: &Theta) -> Result<(f64, f64)> {
    match *theta {
        Theta::BetaParams { alpha, beta }
            if alpha > 0.0 && alpha <= 10.0 && beta > 0.0 && beta <= 10.0 =>
        {
            Ok((alpha, beta))
        }
        _ => Err(FarrError::IllegalTheta(theta.to_string())),
    }
}

fn apply(position: i64, action: usize, wind: i64) -> i64 {
    let shift = match ACTIONS[action] {
        0 => 0,
        a => a + WIND_GAIN * wind,
    };
    (position + shift).clamp(-POSITION_LIMIT, POSITION_LIMIT)
}

/// One WindyWalk transition from `position`, drawing the wind from `seed`.
pub fn windy_step(position: i64, action: usize, theta: &Theta, seed: Seed) -> Result<(i64, f64, bool)> {
    let (alpha, beta) = beta_params(theta)?;
    if action >= ACTIONS.len() {
        return Err(FarrError::InvalidArgument(format!("action {action} out of range")));
    }
    let dist = Beta::new(alpha, beta).map_err(|e| FarrError::IllegalTheta(e.to_string()))?;
    let x: f64 = dist.sample(&mut seed.rng());
    let next = apply(position, action, wind_from_sample(x));
    Ok((next, (next - position) as f64, false))
}

#[derive(Debug, Clone)]
pub struct WindyWalk {
    spec: UpomdpSpec,
    time_in_observation: bool,
}

impl WindyWalk {
    /// Position-only observations.
    pub fn new() -> Self {
        Self::with_time_observation(false)
    }

    /// With `true`, observations are `(position, step)` pairs, which lets
    /// exact value iteration express its time-dependent optimal policy.
    pub fn with_time_observation(time_in_observation: bool) -> Self {
        let observation_count = if time_in_observation {
            POSITIONS * WINDY_HORIZON
        } else {
            POSITIONS
        };
        WindyWalk {
            spec: UpomdpSpec {
                action_count: ACTIONS.len(),
                observation_count,
                horizon: WINDY_HORIZON,
                discount: 1.0,
                theta_space: ThetaSpace::BetaBox {
                    grid: THETA_GRID.to_vec(),
                },
            },
            time_in_observation,
        }
    }

    pub fn state_of(position: i64) -> usize {
        (position + POSITION_LIMIT) as usize
    }

    pub fn position_of(state: usize) -> i64 {
        state as i64 - POSITION_LIMIT
    }
}

impl Default for WindyWalk {
    fn default() -> Self {
        Self::new()
    }
}

impl Environment for WindyWalk {
    fn spec(&self) -> &UpomdpSpec {
        &self.spec
    }

    fn check_theta(&self, theta: &Theta) -> Result<()> {
        beta_params(theta).map(|_| ())
    }

    fn state_count(&self) -> usize {
        POSITIONS
    }

    fn initial_state(&self, _theta: &Theta) -> usize {
        Self::state_of(0)
    }

    fn observe(&self, state: usize, t: usize) -> usize {
        if self.time_in_observation {
            state * WINDY_HORIZON + t.min(WINDY_HORIZON - 1)
        } else {
            state
        }
    }

    fn step(&self, state: usize, action: usize, theta: &Theta, seed: Seed) -> Step {
        let pos = Self::position_of(state);
        let (next, reward, terminal) =
            windy_step(pos, action, theta, seed).expect("theta checked before rollout");
        Step {
            next: Self::state_of(next),
            reward,
            terminal,
        }
    }

    fn transitions(&self, state: usize, action: usize, theta: &Theta) -> Option<Vec<Outcome>> {
        let (alpha, beta) = beta_params(theta).ok()?;
        let pos = Self::position_of(state);
        if ACTIONS[action] == 0 {
            return Some(vec![Outcome {
                prob: 1.0,
                next: state,
                reward: 0.0,
                terminal: false,
            }]);
        }
        let probs = wind_probabilities(alpha, beta);
        Some(
            [-1i64, 0, 1]
                .iter()
                .zip(probs)
                .filter(|(_, p)| *p > 0.0)
                .map(|(&wind, prob)| {
                    let next = apply(pos, action, wind);
                    Outcome {
                        prob,
                        next: Self::state_of(next),
                        reward: (next - pos) as f64,
                        terminal: false,
                    }
                })
                .collect(),
        )
    }

    fn observes_time(&self) -> bool {
        self.time_in_observation
    }

    fn is_deterministic(&self) -> bool {
        false
    }

    fn reward_bounds(&self) -> (f64, f64) {
        let m = (1 + WIND_GAIN) as f64;
        (-m, m)
    }

    fn max_achievable_return(&self) -> f64 {
        POSITION_LIMIT as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wind_rule() {
        assert_eq!(wind_from_sample(0.71), 1);
        assert_eq!(wind_from_sample(0.7), 0);
        assert_eq!(wind_from_sample(0.3), 0);
        assert_eq!(wind_from_sample(0.29), -1);
    }

    #[test]
    fn step_is_seed_deterministic() {
        let th = Theta::beta(2.0, 3.0);
        for s in 0..50 {
            let a = windy_step(3, ACTION_RIGHT, &th, Seed(s)).unwrap();
            let b = windy_step(3, ACTION_RIGHT, &th, Seed(s)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn invalid_theta_rejected() {
        for th in [Theta::beta(0.0, 1.0), Theta::beta(1.0, 10.5), Theta::goal(0, 0)] {
            assert!(windy_step(0, ACTION_RIGHT, &th, Seed(1)).is_err());
        }
    }

    #[test]
    fn hold_ignores_wind_and_clamp_holds() {
        let th = Theta::beta(0.01, 10.0);
        for s in 0..20 {
            assert_eq!(windy_step(4, ACTION_HOLD, &th, Seed(s)).unwrap().0, 4);
            let (n, r, _) = windy_step(-15, ACTION_LEFT, &th, Seed(s)).unwrap();
            assert_eq!((n, r), (-15, 0.0));
        }
    }

    #[test]
    fn model_probabilities_sum_to_one() {
        let env = WindyWalk::new();
        for th in env.spec().theta_space.enumerate() {
            for a in 0..3 {
                let out = env.transitions(10, a, &th).unwrap();
                let s: f64 = out.iter().map(|o| o.prob).sum();
                assert!((s - 1.0).abs() < 1e-12, "{th} {a}: {s}");
            }
        }
    }
}
