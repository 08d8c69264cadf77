//! Policy-space response oracles over protagonist policies and adversary
//! parameters.
//!
//! Each iteration solves the restricted game on the current populations
//! with fictitious play, adds a protagonist best response to the
//! adversary's restricted mixture, adds a few unused parameters, and fills
//! in the new payoff cells. The restricted game's payoffs depend on the
//! objective:
//!
//! - `Farr`: the return, or `C` when the parameter is infeasible.
//! - `Minimax`: the return.
//! - `Regret`: the return minus the parameter's best-response value.

use std::collections::BTreeMap;
use std::fmt;

use log::{debug, warn};
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::br::{
    estimate_br_value, q_learning_br_mixture, value_iteration_br_mixture, BrEstimate, BrMethod,
    TabularPolicy,
};
use crate::error::{FarrError, Result};
use crate::feasibility::{farr_utility, min_over, FeasibleSet, WorstCase};
use crate::normform::{exploitability, fictitious_play, MatrixGame, MixedPair};
use crate::rng::Seed;
use crate::upomdp::{estimate_utility, Environment, Theta, UtilityEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Farr,
    Minimax,
    Regret,
}

impl Objective {
    pub const ALL: [Objective; 3] = [Objective::Farr, Objective::Minimax, Objective::Regret];

    pub fn name(self) -> &'static str {
        match self {
            Objective::Farr => "farr",
            Objective::Minimax => "minimax",
            Objective::Regret => "regret",
        }
    }

    /// Whether payoffs consult best-response estimates.
    pub fn needs_br(self) -> bool {
        !matches!(self, Objective::Minimax)
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Objective {
    type Err = FarrError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "farr" => Ok(Objective::Farr),
            "minimax" => Ok(Objective::Minimax),
            "regret" => Ok(Objective::Regret),
            other => Err(FarrError::InvalidArgument(format!("unknown objective `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsroConfig {
    pub lambda: f64,
    pub penalty_c: f64,
    /// Maximum number of population-growth steps.
    pub iterations: usize,
    pub fp_iterations: usize,
    pub initial_thetas: usize,
    pub thetas_per_iteration: usize,
    /// Rollouts per payoff cell; `None` picks 1 for deterministic
    /// environments and 100 otherwise.
    pub payoff_rollouts: Option<usize>,
    /// Episodes per parameter when scoring the worst-case feasible reward.
    pub eval_episodes: usize,
    pub br_method: BrMethod,
    /// Independent trainings averaged per best-response estimate.
    pub evaluator_seeds: usize,
}

impl Default for PsroConfig {
    fn default() -> Self {
        PsroConfig {
            lambda: -10.0,
            penalty_c: 50.0,
            iterations: 25,
            fp_iterations: 2000,
            initial_thetas: 3,
            thetas_per_iteration: 3,
            payoff_rollouts: None,
            eval_episodes: 100,
            br_method: BrMethod::Exact,
            evaluator_seeds: 1,
        }
    }
}

impl PsroConfig {
    pub fn validate<E: Environment + ?Sized>(&self, env: &E) -> Result<()> {
        if !self.lambda.is_finite() {
            return Err(FarrError::config("lambda", "must be finite"));
        }
        let max_return = env.max_achievable_return();
        if !self.penalty_c.is_finite() || self.penalty_c <= max_return {
            return Err(FarrError::PenaltyTooSmall {
                penalty: self.penalty_c,
                max_utility: max_return,
            });
        }
        if self.fp_iterations == 0 {
            return Err(FarrError::config("psro.fp_iterations", "must be at least 1"));
        }
        if self.initial_thetas == 0 || self.thetas_per_iteration == 0 {
            return Err(FarrError::config("psro.thetas_per_iteration", "must be at least 1"));
        }
        if self.payoff_rollouts == Some(0) || self.eval_episodes == 0 || self.evaluator_seeds == 0 {
            return Err(FarrError::config("psro", "rollout, episode and seed counts must be positive"));
        }
        if let BrMethod::Qlearning(q) = &self.br_method {
            q.validate()?;
        }
        Ok(())
    }

    pub fn rollouts_for<E: Environment + ?Sized>(&self, env: &E) -> usize {
        self.payoff_rollouts
            .unwrap_or(if env.is_deterministic() { 1 } else { 100 })
    }
}

/// Restricted-game payoff for the protagonist given a return estimate.
pub fn objective_payoff(
    objective: Objective,
    utility: f64,
    br_value: Option<f64>,
    lambda: f64,
    penalty_c: f64,
) -> Result<f64> {
    let need = || FarrError::MissingBrEstimate("payoff needs a best-response value".into());
    Ok(match objective {
        Objective::Minimax => utility,
        Objective::Farr => farr_utility(utility, br_value.ok_or_else(need)?, lambda, penalty_c),
        Objective::Regret => utility - br_value.ok_or_else(need)?,
    })
}

/// Estimates one restricted-game payoff from scratch.
#[allow(clippy::too_many_arguments)]
pub fn payoff_entry<E: Environment + ?Sized>(
    objective: Objective,
    env: &E,
    policy: &TabularPolicy,
    theta: &Theta,
    br_cache: &BTreeMap<String, BrEstimate>,
    lambda: f64,
    penalty_c: f64,
    rollouts: usize,
    seed: Seed,
) -> Result<f64> {
    let br = br_cache.get(&theta.key()).map(|e| e.value);
    if objective.needs_br() && br.is_none() {
        return Err(FarrError::MissingBrEstimate(theta.to_string()));
    }
    let u = estimate_utility(env, theta, policy, rollouts, seed)?;
    objective_payoff(objective, u.mean, br, lambda, penalty_c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffCell {
    pub utility: UtilityEstimate,
    pub seed: u64,
}

/// Estimated returns for every (protagonist, parameter) pair in the
/// populations. Rows follow the protagonist population, columns the
/// adversary population.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PayoffTable {
    pub cells: Vec<Vec<PayoffCell>>,
}

impl PayoffTable {
    pub fn rows(&self) -> usize {
        self.cells.len()
    }

    pub fn cols(&self) -> usize {
        self.cells.first().map_or(0, Vec::len)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PsroState {
    pub objective: Objective,
    pub protagonists: Vec<TabularPolicy>,
    pub adversaries: Vec<Theta>,
    pub payoff: PayoffTable,
    pub br_cache: BTreeMap<String, BrEstimate>,
    pub restricted_ne: Option<MixedPair>,
    pub iteration: usize,
    /// No unused parameters remain.
    pub exhausted: bool,
    /// No novel policy of either player could be added.
    pub converged: bool,
}

impl PsroState {
    /// The restricted game under this state's objective.
    pub fn restricted_game(&self, config: &PsroConfig) -> Result<MatrixGame> {
        let u = self
            .payoff
            .cells
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&self.adversaries)
                    .map(|(c, t)| {
                        let br = self.br_cache.get(&t.key()).map(|e| e.value);
                        objective_payoff(self.objective, c.utility.mean, br, config.lambda, config.penalty_c)
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        MatrixGame::new(u)
    }

    fn all_adversaries_infeasible(&self, lambda: f64) -> bool {
        self.objective == Objective::Farr
            && self
                .adversaries
                .iter()
                .all(|t| self.br_cache.get(&t.key()).is_some_and(|e| e.value < lambda))
    }

    /// Solves the restricted game with fictitious play.
    ///
    /// When every parameter in the population is infeasible the penalized
    /// game is constant and every profile is an equilibrium; the adversary
    /// then mixes uniformly and the protagonist plays its newest policy.
    pub fn solve_restricted(&self, config: &PsroConfig) -> Result<MixedPair> {
        let game = self.restricted_game(config)?;
        if self.all_adversaries_infeasible(config.lambda) {
            warn!(
                "iteration {}: every adversary parameter is infeasible; restricted game is constant",
                self.iteration
            );
            let mut row = vec![0.0; game.rows()];
            row[game.rows() - 1] = 1.0;
            let col = vec![1.0 / game.cols() as f64; game.cols()];
            return MixedPair::new(&game, row, col);
        }
        fictitious_play(&game, config.fp_iterations)
    }

    /// The adversary's restricted mixture as `(theta, probability)` pairs.
    pub fn sigma_theta(&self) -> Vec<(Theta, f64)> {
        match &self.restricted_ne {
            Some(ne) => self.adversaries.iter().copied().zip(ne.col_dist.iter().copied()).collect(),
            None => Vec::new(),
        }
    }
}

fn cell_seed(seed: Seed, row: usize, theta: &Theta) -> Seed {
    seed.child("cell").index(row as u64).child(&theta.key())
}

/// Picks up to `k` parameters from `universe` that are not in `used`,
/// uniformly without replacement, in a fixed partial Fisher-Yates order.
fn sample_unused(universe: &[Theta], used: &[Theta], k: usize, seed: Seed) -> Vec<Theta> {
    let mut pool: Vec<Theta> = universe.iter().filter(|t| !used.contains(t)).copied().collect();
    let mut rng = seed.rng();
    let k = k.min(pool.len());
    for i in 0..k {
        let j = rng.random_range(i..pool.len());
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}

fn add_br_estimates<E: Environment + ?Sized>(
    state: &mut PsroState,
    env: &E,
    config: &PsroConfig,
    thetas: &[Theta],
    seed: Seed,
) -> Result<()> {
    if !state.objective.needs_br() {
        return Ok(());
    }
    let missing: Vec<Theta> = thetas
        .iter()
        .filter(|t| !state.br_cache.contains_key(&t.key()))
        .copied()
        .collect();
    let estimates = missing
        .par_iter()
        .map(|t| {
            estimate_br_value(
                env,
                t,
                &config.br_method,
                config.evaluator_seeds,
                seed.child("evaluator").child(&t.key()),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    for e in estimates {
        state.br_cache.insert(e.theta.key(), e);
    }
    Ok(())
}

/// Computes every payoff cell not yet in the table.
fn fill_payoffs<E: Environment + ?Sized>(
    state: &mut PsroState,
    env: &E,
    config: &PsroConfig,
    seed: Seed,
) -> Result<()> {
    let rollouts = config.rollouts_for(env);
    let (old_rows, old_cols) = (state.payoff.rows(), state.payoff.cols());
    let rows = state.protagonists.len();
    let cols = state.adversaries.len();
    let missing: Vec<(usize, usize)> = (0..rows)
        .flat_map(|i| (0..cols).map(move |j| (i, j)))
        .filter(|&(i, j)| i >= old_rows || j >= old_cols)
        .collect();
    let computed = missing
        .par_iter()
        .map(|&(i, j)| {
            let theta = &state.adversaries[j];
            let s = cell_seed(seed, i, theta);
            let utility = estimate_utility(env, theta, &state.protagonists[i], rollouts, s)?;
            Ok(((i, j), PayoffCell { utility, seed: s.0 }))
        })
        .collect::<Result<Vec<_>>>()?;
    let placeholder = PayoffCell {
        utility: UtilityEstimate {
            mean: f64::NAN,
            stderr: 0.0,
            episodes: 0,
        },
        seed: 0,
    };
    state.payoff.cells.resize(rows, Vec::new());
    for row in state.payoff.cells.iter_mut() {
        row.resize(cols, placeholder);
    }
    for ((i, j), cell) in computed {
        state.payoff.cells[i][j] = cell;
    }
    Ok(())
}

/// Builds the initial populations: one random deterministic protagonist and
/// `initial_thetas` uniformly drawn parameters.
pub fn init_state<E: Environment + ?Sized>(
    env: &E,
    objective: Objective,
    config: &PsroConfig,
    seed: Seed,
) -> Result<PsroState> {
    config.validate(env)?;
    let spec = env.spec();
    let universe = spec.theta_space.enumerate();
    let protagonist =
        TabularPolicy::random_deterministic(spec.observation_count, spec.action_count, seed.child("init-protagonist"));
    let adversaries = sample_unused(&universe, &[], config.initial_thetas, seed.child("init-adversary"));
    let mut state = PsroState {
        objective,
        protagonists: vec![protagonist],
        adversaries: adversaries.clone(),
        payoff: PayoffTable::default(),
        br_cache: BTreeMap::new(),
        restricted_ne: None,
        iteration: 0,
        exhausted: false,
        converged: false,
    };
    add_br_estimates(&mut state, env, config, &adversaries, seed)?;
    fill_payoffs(&mut state, env, config, seed)?;
    Ok(state)
}

/// Best response of the protagonist to a parameter mixture, on unmodified
/// returns.
fn protagonist_br<E: Environment + ?Sized>(
    env: &E,
    thetas: &[Theta],
    weights: &[f64],
    method: &BrMethod,
    seed: Seed,
) -> Result<TabularPolicy> {
    match method {
        BrMethod::Exact => value_iteration_br_mixture(env, thetas, weights).map(|(p, _)| p),
        BrMethod::Qlearning(cfg) => q_learning_br_mixture(env, thetas, weights, cfg, seed),
    }
}

/// One PSRO iteration: solve the restricted game, then grow both
/// populations and fill the new payoff cells.
pub fn psro_iterate<E: Environment + ?Sized>(
    mut state: PsroState,
    env: &E,
    config: &PsroConfig,
    seed: Seed,
) -> Result<PsroState> {
    let ne = state.solve_restricted(config)?;
    let weights = ne.col_dist.clone();
    state.restricted_ne = Some(ne);

    let it = state.iteration as u64;
    let policy = protagonist_br(
        env,
        &state.adversaries,
        &weights,
        &config.br_method,
        seed.child("protagonist").index(it),
    )?
    .labeled(format!("br:{}", state.iteration));
    let novel_policy = !state.protagonists.iter().any(|p| p.same_behavior(&policy));

    let universe = env.spec().theta_space.enumerate();
    let new_thetas = sample_unused(
        &universe,
        &state.adversaries,
        config.thetas_per_iteration,
        seed.child("adversary").index(it),
    );
    if new_thetas.is_empty() {
        state.exhausted = true;
    }
    if !novel_policy && new_thetas.is_empty() {
        debug!("iteration {}: no novel strategies, stopping", state.iteration);
        state.converged = true;
        return Ok(state);
    }
    if novel_policy {
        state.protagonists.push(policy);
    }
    add_br_estimates(&mut state, env, config, &new_thetas, seed)?;
    state.adversaries.extend(new_thetas);
    fill_payoffs(&mut state, env, config, seed)?;
    state.iteration += 1;
    Ok(state)
}

/// Metrics recorded after solving each restricted game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationMetrics {
    pub iteration: usize,
    pub objective: Objective,
    pub worst_case_feasible_reward: f64,
    pub worst_case_stderr: f64,
    pub argmin_theta: Theta,
    pub exploitability: f64,
    pub restricted_value: f64,
    pub protagonist_population: usize,
    pub adversary_population: usize,
    pub sigma_p: Vec<f64>,
    pub sigma_theta: Vec<(Theta, f64)>,
}

/// A finished PSRO run.
#[derive(Debug, Clone)]
pub struct PsroRun {
    pub history: Vec<IterationMetrics>,
    pub state: PsroState,
}

impl PsroRun {
    pub fn last(&self) -> &IterationMetrics {
        self.history.last().expect("runs record at least one iteration")
    }

    /// The protagonist's final restricted mixture.
    pub fn final_sigma_p(&self) -> (&[TabularPolicy], &[f64]) {
        let m = self.last();
        (&self.state.protagonists[..m.sigma_p.len()], &m.sigma_p)
    }
}

/// Per-(policy, parameter) evaluations on the evaluation feasible set,
/// computed once per policy.
struct EvalCache {
    thetas: Vec<Theta>,
    rows: Vec<Vec<UtilityEstimate>>,
}

impl EvalCache {
    fn extend<E: Environment + ?Sized>(
        &mut self,
        env: &E,
        policies: &[TabularPolicy],
        episodes: usize,
        seed: Seed,
    ) -> Result<()> {
        let start = self.rows.len();
        let new_rows = (start..policies.len())
            .into_par_iter()
            .map(|i| {
                self.thetas
                    .iter()
                    .map(|t| {
                        estimate_utility(env, t, &policies[i], episodes, seed.child("eval").index(i as u64).child(&t.key()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        self.rows.extend(new_rows);
        Ok(())
    }

    fn worst_case(&self, weights: &[f64]) -> WorstCase {
        let values: Vec<UtilityEstimate> = (0..self.thetas.len())
            .map(|k| {
                let mut mean = 0.0;
                let mut var = 0.0;
                for (row, &w) in self.rows.iter().zip(weights) {
                    if w > 0.0 {
                        mean += w * row[k].mean;
                        var += w * w * row[k].stderr * row[k].stderr;
                    }
                }
                UtilityEstimate {
                    mean,
                    stderr: var.sqrt(),
                    episodes: row_episodes(&self.rows, k),
                }
            })
            .collect();
        min_over(&self.thetas, &values)
    }
}

fn row_episodes(rows: &[Vec<UtilityEstimate>], k: usize) -> usize {
    rows.first().map_or(0, |r| r[k].episodes)
}

fn record(
    state: &PsroState,
    ne: &MixedPair,
    game: &MatrixGame,
    cache: &EvalCache,
) -> Result<IterationMetrics> {
    let wc = cache.worst_case(&ne.row_dist);
    Ok(IterationMetrics {
        iteration: state.iteration,
        objective: state.objective,
        worst_case_feasible_reward: wc.value,
        worst_case_stderr: wc.stderr,
        argmin_theta: wc.theta,
        exploitability: exploitability(game, ne)?,
        restricted_value: ne.game_value,
        protagonist_population: state.protagonists.len(),
        adversary_population: state.adversaries.len(),
        sigma_p: ne.row_dist.clone(),
        sigma_theta: state.adversaries.iter().copied().zip(ne.col_dist.iter().copied()).collect(),
    })
}

/// Runs PSRO until the iteration cap or until neither population can grow,
/// scoring the protagonist's restricted mixture on `eval_set` after every
/// restricted solve.
pub fn run_psro<E: Environment + ?Sized>(
    env: &E,
    objective: Objective,
    config: &PsroConfig,
    eval_set: &FeasibleSet,
    seed: Seed,
) -> Result<PsroRun> {
    let thetas = eval_set.feasible_thetas();
    if thetas.is_empty() {
        return Err(FarrError::EmptyFeasibleSet);
    }
    let mut cache = EvalCache {
        thetas,
        rows: Vec::new(),
    };
    let mut state = init_state(env, objective, config, seed)?;
    let mut history = Vec::new();
    for _ in 0..config.iterations {
        let before = state.clone();
        state = psro_iterate(state, env, config, seed)?;
        let ne = state.restricted_ne.clone().expect("iterate sets the restricted NE");
        cache.extend(env, &before.protagonists, config.eval_episodes, seed)?;
        history.push(record(&before, &ne, &before.restricted_game(config)?, &cache)?);
        if state.converged {
            break;
        }
    }
    let ne = state.solve_restricted(config)?;
    state.restricted_ne = Some(ne.clone());
    cache.extend(env, &state.protagonists, config.eval_episodes, seed)?;
    let game = state.restricted_game(config)?;
    if !state.converged {
        history.push(record(&state, &ne, &game, &cache)?);
    }
    Ok(PsroRun { history, state })
}

/// Domain randomization: a single best response to the uniform
/// distribution over `thetas`.
pub fn domain_randomization_train<E: Environment + ?Sized>(
    env: &E,
    thetas: &[Theta],
    method: &BrMethod,
    seed: Seed,
) -> Result<TabularPolicy> {
    if thetas.is_empty() {
        return Err(FarrError::InvalidArgument("domain randomization needs parameters".into()));
    }
    let w = vec![1.0 / thetas.len() as f64; thetas.len()];
    Ok(protagonist_br(env, thetas, &w, method, seed.child("dr"))?.labeled("domain-randomization"))
}

/// Certified bounds on the protagonist's best worst-case return over a
/// parameter set, `max over mixed policies of min over thetas`.
#[derive(Debug, Clone)]
pub struct RobustValue {
    /// Guaranteed by `policies` mixed with `sigma_p`.
    pub lower: f64,
    /// No policy can beat this against `sigma_theta`.
    pub upper: f64,
    pub policies: Vec<TabularPolicy>,
    pub sigma_p: Vec<f64>,
    pub sigma_theta: Vec<f64>,
    pub thetas: Vec<Theta>,
}

impl RobustValue {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Double oracle with the full parameter set on the adversary side and
/// exact mixture best responses on the protagonist side. Bounds are valid
/// for any restricted solution; the loop stops once the gap is below `tol`
/// or the best response is already in the population.
pub fn robust_value<E: Environment + ?Sized>(
    env: &E,
    thetas: &[Theta],
    fp_iterations: usize,
    max_iterations: usize,
    tol: f64,
) -> Result<RobustValue> {
    if thetas.is_empty() {
        return Err(FarrError::EmptyFeasibleSet);
    }
    let n = thetas.len();
    let exact_u = |p: &TabularPolicy| -> Result<Vec<f64>> {
        thetas
            .iter()
            .map(|t| estimate_utility(env, t, p, 1, Seed(0)).map(|e| e.mean))
            .collect()
    };
    if !env.is_deterministic() {
        return Err(FarrError::ModelUnavailable("robust value needs a deterministic environment".into()));
    }
    let (first, _) = value_iteration_br_mixture(env, thetas, &vec![1.0 / n as f64; n])?;
    let mut policies = vec![first];
    let mut rows = vec![exact_u(&policies[0])?];
    let mut best: Option<RobustValue> = None;
    for _ in 0..max_iterations.max(1) {
        let game = MatrixGame::new(rows.clone())?;
        let ne = fictitious_play(&game, fp_iterations)?;
        let lower = game.col_payoffs(&ne.row_dist).into_iter().fold(f64::INFINITY, f64::min);
        let (br, upper) = value_iteration_br_mixture(env, thetas, &ne.col_dist)?;
        let better_lower = best.as_ref().is_none_or(|b| lower > b.lower);
        let better_upper = best.as_ref().is_none_or(|b| upper < b.upper);
        let mut cur = best.take().unwrap_or(RobustValue {
            lower,
            upper,
            policies: Vec::new(),
            sigma_p: Vec::new(),
            sigma_theta: Vec::new(),
            thetas: thetas.to_vec(),
        });
        if better_lower {
            cur.lower = lower;
            cur.policies = policies.clone();
            cur.sigma_p = ne.row_dist.clone();
        }
        if better_upper {
            cur.upper = upper;
            cur.sigma_theta = ne.col_dist.clone();
        }
        let done = cur.gap() <= tol || policies.iter().any(|p| p.same_behavior(&br));
        best = Some(cur);
        if done {
            break;
        }
        rows.push(exact_u(&br)?);
        policies.push(br);
    }
    Ok(best.expect("at least one iteration"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn objective_payoffs() {
        assert_eq!(objective_payoff(Objective::Farr, -7.0, Some(-12.0), -10.0, 50.0).unwrap(), 50.0);
        assert_eq!(objective_payoff(Objective::Farr, -7.0, Some(-3.0), -10.0, 50.0).unwrap(), -7.0);
        assert_eq!(objective_payoff(Objective::Regret, -7.0, Some(-3.0), -10.0, 50.0).unwrap(), -4.0);
        assert_eq!(objective_payoff(Objective::Minimax, -7.0, None, -10.0, 50.0).unwrap(), -7.0);
        assert!(objective_payoff(Objective::Regret, -7.0, None, -10.0, 50.0).is_err());
    }

    #[test]
    fn sampler_is_without_replacement() {
        let universe: Vec<Theta> = (0..10).map(|c| Theta::goal(0, c)).collect();
        let used = vec![universe[0], universe[5]];
        let picked = sample_unused(&universe, &used, 20, Seed(3));
        assert_eq!(picked.len(), 8);
        for (i, t) in picked.iter().enumerate() {
            assert!(!used.contains(t));
            assert!(!picked[..i].contains(t));
        }
        assert_eq!(picked, sample_unused(&universe, &used, 20, Seed(3)));
    }

    #[test]
    fn objective_parses() {
        for o in Objective::ALL {
            assert_eq!(o.name().parse::<Objective>().unwrap(), o);
        }
        assert!("dr".parse::<Objective>().is_err());
    }
}
