//! Best-response oracles: exact backward induction for environments that
//! expose a model, and tabular Q-learning with a fixed experience budget.

use rand::{Rng as _, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{FarrError, Result};
use crate::rng::Seed;
use crate::upomdp::{estimate_utility, Environment, Policy, Theta};

/// Observation-indexed action distributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolicyRepr", into = "PolicyRepr")]
pub struct TabularPolicy {
    table: Vec<Vec<f64>>,
    /// `Some(a)` where the row is one-hot on `a`.
    pure: Vec<Option<usize>>,
    pub label: String,
    pub budget_used: usize,
}

#[derive(Serialize, Deserialize)]
struct PolicyRepr {
    table: Vec<Vec<f64>>,
    label: String,
    budget_used: usize,
}

impl TryFrom<PolicyRepr> for TabularPolicy {
    type Error = FarrError;
    fn try_from(r: PolicyRepr) -> Result<Self> {
        let mut p = TabularPolicy::from_table(r.table)?;
        p.label = r.label;
        p.budget_used = r.budget_used;
        Ok(p)
    }
}

impl From<TabularPolicy> for PolicyRepr {
    fn from(p: TabularPolicy) -> Self {
        PolicyRepr {
            table: p.table,
            label: p.label,
            budget_used: p.budget_used,
        }
    }
}

impl TabularPolicy {
    pub fn from_table(table: Vec<Vec<f64>>) -> Result<Self> {
        let width = table.first().map(Vec::len).unwrap_or(0);
        if table.is_empty() || width == 0 {
            return Err(FarrError::InvalidArgument("policy table is empty".into()));
        }
        let mut pure = Vec::with_capacity(table.len());
        for (o, row) in table.iter().enumerate() {
            if row.len() != width {
                return Err(FarrError::InvalidArgument(format!("policy row {o} has wrong width")));
            }
            let sum: f64 = row.iter().sum();
            if row.iter().any(|&p| p.is_nan() || p < 0.0) || (sum - 1.0).abs() > 1e-9 {
                return Err(FarrError::InvalidArgument(format!(
                    "policy row {o} is not a distribution"
                )));
            }
            pure.push(row.iter().position(|&p| p == 1.0));
        }
        Ok(TabularPolicy {
            table,
            pure,
            label: String::new(),
            budget_used: 0,
        })
    }

    /// One-hot rows from an action per observation.
    pub fn deterministic(actions: &[usize], action_count: usize) -> Self {
        let table = actions
            .iter()
            .map(|&a| {
                let mut row = vec![0.0; action_count];
                row[a] = 1.0;
                row
            })
            .collect();
        TabularPolicy {
            table,
            pure: actions.iter().map(|&a| Some(a)).collect(),
            label: String::new(),
            budget_used: 0,
        }
    }

    /// A deterministic policy with an independently uniform action per
    /// observation.
    pub fn random_deterministic(observation_count: usize, action_count: usize, seed: Seed) -> Self {
        let mut rng = seed.rng();
        let actions: Vec<usize> = (0..observation_count)
            .map(|_| rng.random_range(0..action_count))
            .collect();
        Self::deterministic(&actions, action_count).labeled("random")
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn table(&self) -> &[Vec<f64>] {
        &self.table
    }

    pub fn distribution(&self, obs: usize) -> &[f64] {
        &self.table[obs]
    }

    /// Same action choices, ignoring labels.
    pub fn same_behavior(&self, other: &TabularPolicy) -> bool {
        self.table == other.table
    }
}

impl Policy for TabularPolicy {
    fn action_count(&self) -> usize {
        self.table[0].len()
    }

    fn observation_count(&self) -> usize {
        self.table.len()
    }

    fn act(&self, obs: usize, seed: Seed) -> usize {
        if let Some(a) = self.pure[obs] {
            return a;
        }
        let u: f64 = seed.rng().random();
        let row = &self.table[obs];
        let mut acc = 0.0;
        for (a, &p) in row.iter().enumerate() {
            acc += p;
            if u < acc {
                return a;
            }
        }
        row.iter().rposition(|&p| p > 0.0).unwrap_or(0)
    }

    fn is_deterministic(&self) -> bool {
        self.pure.iter().all(Option::is_some)
    }
}

fn model_transitions<E: Environment + ?Sized>(
    env: &E,
    theta: &Theta,
) -> Result<Vec<Vec<Vec<crate::upomdp::Outcome>>>> {
    env.check_theta(theta)?;
    let actions = env.spec().action_count;
    (0..env.state_count())
        .map(|s| {
            (0..actions)
                .map(|a| {
                    env.transitions(s, a, theta).ok_or_else(|| {
                        FarrError::ModelUnavailable("environment exposes no transition model".into())
                    })
                })
                .collect()
        })
        .collect()
}

/// Backward induction over `(state, step)`. Returns the optimal start-state
/// value and the chosen action per `(step, state)`; among actions within
/// `tolerance` of the best, the lowest index wins.
fn backward_induction<E: Environment + ?Sized>(
    env: &E,
    theta: &Theta,
    tolerance: f64,
) -> Result<(f64, Vec<Vec<usize>>)> {
    let model = model_transitions(env, theta)?;
    let spec = env.spec();
    let n = env.state_count();
    let mut next_v = vec![0.0; n];
    let mut choice = vec![vec![0usize; n]; spec.horizon];
    for t in (0..spec.horizon).rev() {
        let mut v = vec![0.0; n];
        for s in 0..n {
            let mut best = f64::NEG_INFINITY;
            for (a, outcomes) in model[s].iter().enumerate() {
                let q: f64 = outcomes
                    .iter()
                    .map(|o| {
                        let cont = if o.terminal { 0.0 } else { next_v[o.next] };
                        o.prob * (o.reward + spec.discount * cont)
                    })
                    .sum();
                if q > best + tolerance {
                    best = q;
                    choice[t][s] = a;
                }
            }
            v[s] = best;
        }
        next_v = v;
    }
    Ok((next_v[env.initial_state(theta)], choice))
}

/// Exact optimal expected return for `theta` over all history-dependent
/// policies. Needs only a transition model.
pub fn optimal_value<E: Environment + ?Sized>(env: &E, theta: &Theta) -> Result<f64> {
    backward_induction(env, theta, 0.0).map(|(v, _)| v)
}

/// Exact best response to a single parameter, by finite-horizon backward
/// induction. The environment's observations must encode the step index.
pub fn value_iteration_br<E: Environment + ?Sized>(
    env: &E,
    theta: &Theta,
    tolerance: f64,
) -> Result<(TabularPolicy, f64)> {
    if !env.observes_time() {
        return Err(FarrError::ModelUnavailable(
            "observations do not encode the step index; a finite-horizon optimal policy is not representable"
                .into(),
        ));
    }
    let (value, choice) = backward_induction(env, theta, tolerance)?;
    let mut table = vec![0usize; env.spec().observation_count];
    for (t, row) in choice.iter().enumerate() {
        for (s, &a) in row.iter().enumerate() {
            table[env.observe(s, t)] = a;
        }
    }
    let policy = TabularPolicy::deterministic(&table, env.spec().action_count).labeled(format!("vi:{theta}"));
    Ok((policy, value))
}

/// Exact best response to a distribution over parameters.
pub fn value_iteration_br_mixture<E: Environment + ?Sized>(
    env: &E,
    thetas: &[Theta],
    weights: &[f64],
) -> Result<(TabularPolicy, f64)> {
    if thetas.len() != weights.len() || thetas.is_empty() {
        return Err(FarrError::DimensionMismatch(format!(
            "{} thetas with {} weights",
            thetas.len(),
            weights.len()
        )));
    }
    let support: Vec<&Theta> = thetas
        .iter()
        .zip(weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(t, _)| t)
        .collect();
    if let Some(first) = support.first() {
        if support.iter().all(|t| t == first) {
            return value_iteration_br(env, first, 0.0);
        }
    }
    let (policy, value) = env.mixture_best_response(thetas, weights)?;
    Ok((policy.labeled("vi:mixture"), value))
}

/// Exact expected return of a tabular policy, by backward evaluation over
/// `(state, step)`.
pub fn policy_value<E: Environment + ?Sized>(env: &E, theta: &Theta, policy: &TabularPolicy) -> Result<f64> {
    let model = model_transitions(env, theta)?;
    let spec = env.spec();
    if policy.observation_count() != spec.observation_count || policy.action_count() != spec.action_count {
        return Err(FarrError::PolicyMismatch("policy does not fit environment".into()));
    }
    let n = env.state_count();
    let mut next_v = vec![0.0; n];
    for t in (0..spec.horizon).rev() {
        let v: Vec<f64> = (0..n)
            .map(|s| {
                let dist = policy.distribution(env.observe(s, t));
                dist.iter()
                    .enumerate()
                    .filter(|(_, &p)| p > 0.0)
                    .map(|(a, &p)| {
                        p * model[s][a]
                            .iter()
                            .map(|o| {
                                let cont = if o.terminal { 0.0 } else { next_v[o.next] };
                                o.prob * (o.reward + spec.discount * cont)
                            })
                            .sum::<f64>()
                    })
                    .sum()
            })
            .collect();
        next_v = v;
    }
    Ok(next_v[env.initial_state(theta)])
}

/// Tabular Q-learning settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QLearningConfig {
    /// Environment steps per training run.
    pub budget: usize,
    pub learning_rate: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    /// Fraction of the budget over which epsilon anneals linearly.
    pub epsilon_decay_fraction: f64,
    pub initial_q: f64,
    /// Episodes used to score each trained policy.
    pub eval_episodes: usize,
}

impl Default for QLearningConfig {
    fn default() -> Self {
        QLearningConfig {
            budget: 150_000,
            learning_rate: 0.1,
            epsilon_start: 0.5,
            epsilon_end: 0.01,
            epsilon_decay_fraction: 0.8,
            initial_q: 0.0,
            eval_episodes: 100,
        }
    }
}

impl QLearningConfig {
    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(FarrError::InvalidArgument("Q-learning budget must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(FarrError::InvalidArgument("learning rate must be in (0, 1]".into()));
        }
        let eps_ok = |e: f64| (0.0..=1.0).contains(&e);
        if !eps_ok(self.epsilon_start) || !eps_ok(self.epsilon_end) {
            return Err(FarrError::InvalidArgument("epsilon must be in [0, 1]".into()));
        }
        if self.eval_episodes == 0 {
            return Err(FarrError::InvalidArgument("eval_episodes must be positive".into()));
        }
        Ok(())
    }

    fn epsilon(&self, step: usize) -> f64 {
        let horizon = (self.budget as f64 * self.epsilon_decay_fraction).max(1.0);
        let frac = (step as f64 / horizon).min(1.0);
        self.epsilon_start + frac * (self.epsilon_end - self.epsilon_start)
    }
}

fn greedy(q: &[f64]) -> usize {
    let mut best = 0;
    for (a, &x) in q.iter().enumerate().skip(1) {
        if x > q[best] {
            best = a;
        }
    }
    best
}

/// Q-learning against a single parameter.
pub fn q_learning_br<E: Environment + ?Sized>(
    env: &E,
    theta: &Theta,
    config: &QLearningConfig,
    seed: Seed,
) -> Result<TabularPolicy> {
    q_learning_br_mixture(env, std::slice::from_ref(theta), &[1.0], config, seed)
}

/// Q-learning against a distribution over parameters, resampling the
/// parameter at the start of every episode. Returns the greedy policy.
pub fn q_learning_br_mixture<E: Environment + ?Sized>(
    env: &E,
    thetas: &[Theta],
    weights: &[f64],
    config: &QLearningConfig,
    seed: Seed,
) -> Result<TabularPolicy> {
    config.validate()?;
    if thetas.is_empty() || thetas.len() != weights.len() {
        return Err(FarrError::DimensionMismatch("thetas and weights differ in length".into()));
    }
    for t in thetas {
        env.check_theta(t)?;
    }
    let spec = env.spec();
    let na = spec.action_count;
    let mut q = vec![config.initial_q; spec.observation_count * na];
    let mut rng = seed.rng();
    let total: f64 = weights.iter().sum();

    let mut steps = 0usize;
    while steps < config.budget {
        let theta = if thetas.len() == 1 {
            &thetas[0]
        } else {
            let u = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = thetas.len() - 1;
            for (i, &w) in weights.iter().enumerate() {
                acc += w;
                if u < acc {
                    pick = i;
                    break;
                }
            }
            &thetas[pick]
        };
        let mut state = env.initial_state(theta);
        for t in 0..spec.horizon {
            let obs = env.observe(state, t);
            let row = &q[obs * na..(obs + 1) * na];
            let action = if rng.random::<f64>() < config.epsilon(steps) {
                rng.random_range(0..na)
            } else {
                greedy(row)
            };
            let step = env.step(state, action, theta, Seed(rng.next_u64()));
            steps += 1;
            let last = step.terminal || t + 1 == spec.horizon;
            let target = if last {
                step.reward
            } else {
                let nobs = env.observe(step.next, t + 1);
                let nrow = &q[nobs * na..(nobs + 1) * na];
                step.reward + spec.discount * nrow.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            };
            let cell = &mut q[obs * na + action];
            *cell += config.learning_rate * (target - *cell);
            state = step.next;
            if last || steps >= config.budget {
                break;
            }
        }
    }
    let actions: Vec<usize> = (0..spec.observation_count)
        .map(|o| greedy(&q[o * na..(o + 1) * na]))
        .collect();
    let mut policy = TabularPolicy::deterministic(&actions, na).labeled("qlearning");
    policy.budget_used = steps;
    Ok(policy)
}

/// How best-response values are estimated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum BrMethod {
    Exact,
    Qlearning(QLearningConfig),
}

/// Estimated `U_p(BR(theta), theta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrEstimate {
    pub theta: Theta,
    pub value: f64,
    /// Standard error across seeds; zero for exact estimates.
    pub stderr: f64,
    pub seeds_used: usize,
    pub per_seed: Vec<f64>,
}

/// Estimates the best-response value for `theta`.
///
/// `Exact` runs backward induction once and ignores `seeds`. `Qlearning`
/// trains `seeds` independent greedy policies and averages their evaluated
/// returns.
pub fn estimate_br_value<E: Environment + ?Sized>(
    env: &E,
    theta: &Theta,
    method: &BrMethod,
    seeds: usize,
    seed: Seed,
) -> Result<BrEstimate> {
    match method {
        BrMethod::Exact => {
            let value = optimal_value(env, theta)?;
            Ok(BrEstimate {
                theta: *theta,
                value,
                stderr: 0.0,
                seeds_used: 1,
                per_seed: vec![value],
            })
        }
        BrMethod::Qlearning(cfg) => {
            if seeds == 0 {
                return Err(FarrError::InvalidArgument("seeds must be at least 1".into()));
            }
            let per_seed = (0..seeds)
                .map(|k| {
                    let s = seed.index(k as u64);
                    let policy = q_learning_br(env, theta, cfg, s.child("train"))?;
                    Ok(estimate_utility(env, theta, &policy, cfg.eval_episodes, s.child("eval"))?.mean)
                })
                .collect::<Result<Vec<f64>>>()?;
            let est = crate::upomdp::UtilityEstimate::from_samples(&per_seed);
            Ok(BrEstimate {
                theta: *theta,
                value: est.mean,
                stderr: est.stderr,
                seeds_used: seeds,
                per_seed,
            })
        }
    }
}
