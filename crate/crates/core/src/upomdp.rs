//! Underspecified POMDPs: environments indexed by a free parameter `Theta`,
//! episode rollouts, and Monte Carlo utility estimates.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::br::TabularPolicy;
use crate::error::{FarrError, Result};
use crate::rng::Seed;

/// Largest legal beta-distribution shape parameter.
pub const BETA_PARAM_MAX: f64 = 10.0;

/// An adversary pure strategy: one setting of the environment's free
/// parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Theta {
    GridGoal { row: usize, col: usize },
    BetaParams { alpha: f64, beta: f64 },
}

impl Theta {
    pub fn goal(row: usize, col: usize) -> Self {
        Theta::GridGoal { row, col }
    }

    pub fn beta(alpha: f64, beta: f64) -> Self {
        Theta::BetaParams { alpha, beta }
    }

    /// Stable text key, used for seeding and map lookups.
    pub fn key(&self) -> String {
        match *self {
            Theta::GridGoal { row, col } => format!("goal:{row}:{col}"),
            Theta::BetaParams { alpha, beta } => {
                format!("beta:{:016x}:{:016x}", alpha.to_bits(), beta.to_bits())
            }
        }
    }

    /// The two numeric fields, in CSV column order.
    pub fn fields(&self) -> (f64, f64) {
        match *self {
            Theta::GridGoal { row, col } => (row as f64, col as f64),
            Theta::BetaParams { alpha, beta } => (alpha, beta),
        }
    }

    pub fn field_names(&self) -> (&'static str, &'static str) {
        match self {
            Theta::GridGoal { .. } => ("row", "col"),
            Theta::BetaParams { .. } => ("alpha", "beta"),
        }
    }
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Theta::GridGoal { row, col } => write!(f, "goal({row},{col})"),
            Theta::BetaParams { alpha, beta } => write!(f, "beta({alpha},{beta})"),
        }
    }
}

/// The legal parameter values of an environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ThetaSpace {
    /// An explicit finite list.
    Finite(Vec<Theta>),
    /// The box `(0, 10]²` of beta shape pairs, discretized on `grid × grid`
    /// whenever an enumeration is needed.
    BetaBox { grid: Vec<f64> },
}

impl ThetaSpace {
    /// The enumerable universe: the finite list, or the discretization grid
    /// in `(alpha, beta)` row-major order.
    pub fn enumerate(&self) -> Vec<Theta> {
        match self {
            ThetaSpace::Finite(v) => v.clone(),
            ThetaSpace::BetaBox { grid } => grid
                .iter()
                .flat_map(|&a| grid.iter().map(move |&b| Theta::beta(a, b)))
                .collect(),
        }
    }

    pub fn contains(&self, theta: &Theta) -> bool {
        match (self, theta) {
            (ThetaSpace::Finite(v), t) => v.contains(t),
            (ThetaSpace::BetaBox { .. }, Theta::BetaParams { alpha, beta }) => {
                let ok = |x: f64| x > 0.0 && x <= BETA_PARAM_MAX;
                ok(*alpha) && ok(*beta)
            }
            _ => false,
        }
    }
}

/// Static description of an environment family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpomdpSpec {
    pub action_count: usize,
    pub observation_count: usize,
    pub horizon: usize,
    pub discount: f64,
    pub theta_space: ThetaSpace,
}

impl UpomdpSpec {
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(FarrError::InvalidArgument("horizon must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.discount) {
            return Err(FarrError::InvalidArgument(format!("discount {} outside [0, 1]", self.discount)));
        }
        Ok(())
    }
}

/// The outcome of one environment step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub next: usize,
    pub reward: f64,
    pub terminal: bool,
}

/// One branch of an exact transition model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub prob: f64,
    pub next: usize,
    pub reward: f64,
    pub terminal: bool,
}

/// A parameterized environment with finite states, observations and
/// actions. States are dense indices; the initial state, transitions and
/// rewards may depend on `theta`.
pub trait Environment: Sync + Send {
    fn spec(&self) -> &UpomdpSpec;

    fn check_theta(&self, theta: &Theta) -> Result<()> {
        if self.spec().theta_space.contains(theta) {
            Ok(())
        } else {
            Err(FarrError::IllegalTheta(theta.to_string()))
        }
    }

    fn state_count(&self) -> usize;

    fn initial_state(&self, theta: &Theta) -> usize;

    /// Observation id at `state` after `t` elapsed steps.
    fn observe(&self, state: usize, t: usize) -> usize;

    /// Samples one transition. Stochastic environments draw only from
    /// `seed`.
    fn step(&self, state: usize, action: usize, theta: &Theta, seed: Seed) -> Step;

    /// Exact transition distribution, if the environment exposes a model.
    fn transitions(&self, _state: usize, _action: usize, _theta: &Theta) -> Option<Vec<Outcome>> {
        None
    }

    /// Whether observations determine both the state and the elapsed time,
    /// so a finite-horizon optimal policy is expressible as an observation
    /// table.
    fn observes_time(&self) -> bool;

    fn is_deterministic(&self) -> bool;

    /// Smallest and largest single-step reward.
    fn reward_bounds(&self) -> (f64, f64);

    /// Largest return any policy can achieve on any legal parameter.
    fn max_achievable_return(&self) -> f64;

    /// Exact best response to a distribution over parameters, for
    /// environments whose belief space is tractable.
    fn mixture_best_response(&self, _thetas: &[Theta], _weights: &[f64]) -> Result<(TabularPolicy, f64)> {
        Err(FarrError::Intractable(
            "this environment has no exact belief-space solver".into(),
        ))
    }
}

/// Anything that can pick an action from an observation.
pub trait Policy: Sync {
    fn action_count(&self) -> usize;
    fn observation_count(&self) -> usize;
    fn act(&self, obs: usize, seed: Seed) -> usize;
    fn is_deterministic(&self) -> bool;
}

/// One recorded transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStep {
    pub observation: usize,
    pub action: usize,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub steps: Vec<TrajectoryStep>,
    pub return_value: f64,
}

fn check_policy<E: Environment + ?Sized, P: Policy + ?Sized>(env: &E, policy: &P) -> Result<()> {
    let spec = env.spec();
    if policy.action_count() != spec.action_count || policy.observation_count() != spec.observation_count {
        return Err(FarrError::PolicyMismatch(format!(
            "policy is {} obs x {} actions, environment is {} x {}",
            policy.observation_count(),
            policy.action_count(),
            spec.observation_count,
            spec.action_count
        )));
    }
    Ok(())
}

/// Plays one episode. The result depends only on `(theta, policy, seed)`.
pub fn rollout<E, P>(env: &E, theta: &Theta, policy: &P, seed: Seed) -> Result<Trajectory>
where
    E: Environment + ?Sized,
    P: Policy + ?Sized,
{
    env.check_theta(theta)?;
    check_policy(env, policy)?;
    Ok(rollout_unchecked(env, theta, policy, seed))
}

pub(crate) fn rollout_unchecked<E, P>(env: &E, theta: &Theta, policy: &P, seed: Seed) -> Trajectory
where
    E: Environment + ?Sized,
    P: Policy + ?Sized,
{
    let spec = env.spec();
    let act_seed = seed.child("act");
    let env_seed = seed.child("env");
    let mut state = env.initial_state(theta);
    let mut steps = Vec::with_capacity(spec.horizon);
    let mut ret = 0.0;
    let mut discount = 1.0;
    for t in 0..spec.horizon {
        let observation = env.observe(state, t);
        let action = policy.act(observation, act_seed.index(t as u64));
        let step = env.step(state, action, theta, env_seed.index(t as u64));
        ret += discount * step.reward;
        discount *= spec.discount;
        steps.push(TrajectoryStep {
            observation,
            action,
            reward: step.reward,
        });
        state = step.next;
        if step.terminal {
            break;
        }
    }
    Trajectory {
        steps,
        return_value: ret,
    }
}

/// Sample mean and standard error of episode returns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilityEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub episodes: usize,
}

impl UtilityEstimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let stderr = if n > 1 {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        UtilityEstimate {
            mean,
            stderr,
            episodes: n,
        }
    }
}

/// Mean return over `episodes` rollouts seeded `seed.index(0..episodes)`.
///
/// When both the environment and the policy are deterministic every
/// episode is identical, so a single rollout is played.
pub fn estimate_utility<E, P>(
    env: &E,
    theta: &Theta,
    policy: &P,
    episodes: usize,
    seed: Seed,
) -> Result<UtilityEstimate>
where
    E: Environment + ?Sized,
    P: Policy + ?Sized,
{
    if episodes == 0 {
        return Err(FarrError::InvalidArgument("episodes must be at least 1".into()));
    }
    env.check_theta(theta)?;
    check_policy(env, policy)?;
    if env.is_deterministic() && policy.is_deterministic() {
        let r = rollout_unchecked(env, theta, policy, seed.index(0)).return_value;
        return Ok(UtilityEstimate {
            mean: r,
            stderr: 0.0,
            episodes,
        });
    }
    let samples: Vec<f64> = (0..episodes)
        .map(|i| rollout_unchecked(env, theta, policy, seed.index(i as u64)).return_value)
        .collect();
    Ok(UtilityEstimate::from_samples(&samples))
}

/// A fixed stationary action, for baselines and tests.
#[derive(Debug, Clone, Copy)]
pub struct ConstantPolicy {
    pub action: usize,
    pub action_count: usize,
    pub observation_count: usize,
}

impl ConstantPolicy {
    pub fn for_env<E: Environment + ?Sized>(env: &E, action: usize) -> Self {
        ConstantPolicy {
            action,
            action_count: env.spec().action_count,
            observation_count: env.spec().observation_count,
        }
    }
}

impl Policy for ConstantPolicy {
    fn action_count(&self) -> usize {
        self.action_count
    }
    fn observation_count(&self) -> usize {
        self.observation_count
    }
    fn act(&self, _obs: usize, _seed: Seed) -> usize {
        self.action
    }
    fn is_deterministic(&self) -> bool {
        true
    }
}
