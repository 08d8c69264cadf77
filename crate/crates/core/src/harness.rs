//! Batch experiments: configuration, orchestration and CSV output.
//!
//! Configs are TOML files of dotted `key = value` settings. Every run
//! writes the resolved config next to its outputs, and the resolved config
//! plus the seeds determine every byte written.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::br::{BrMethod, QLearningConfig, TabularPolicy};
use crate::envs::cabinet::{CABINET_LAMBDA, CABINET_PENALTY};
use crate::envs::{canonical_cabinet_game, load_map, GridMap, LavaWorld, WindyWalk};
use crate::error::{FarrError, Result};
use crate::feasibility::{build_feasible_set, worst_case_feasible_reward, FeasibleSet, WorstCase};
use crate::normform::{exploitability, fictitious_play, iesds_reduce, theorem1_report, MatrixGame};
use crate::psro::{domain_randomization_train, robust_value, run_psro, Objective, PsroConfig, PsroRun};
use crate::rng::Seed;
use crate::upomdp::{Environment, Theta};

/// Exit status for configuration errors.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status for failures while running.
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvKind {
    LavaWorld,
    WindyWalk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentConfig {
    pub kind: EnvKind,
    /// ASCII map for Lava World; the shipped map when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<PathBuf>,
    /// WindyWalk only: append the step index to observations.
    #[serde(default)]
    pub time_in_observation: bool,
}

/// A run kind: one of the game objectives, or domain randomization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunKind {
    Farr,
    Minimax,
    Regret,
    Dr,
}

impl RunKind {
    pub fn name(self) -> &'static str {
        match self {
            RunKind::Farr => "farr",
            RunKind::Minimax => "minimax",
            RunKind::Regret => "regret",
            RunKind::Dr => "dr",
        }
    }

    pub fn objective(self) -> Option<Objective> {
        match self {
            RunKind::Farr => Some(Objective::Farr),
            RunKind::Minimax => Some(Objective::Minimax),
            RunKind::Regret => Some(Objective::Regret),
            RunKind::Dr => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub objectives: Vec<RunKind>,
    pub lambdas: Vec<f64>,
    pub penalty_c: f64,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    /// Worker threads; 0 uses every core.
    #[serde(default)]
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsroSection {
    pub iterations: usize,
    #[serde(default = "default_fp")]
    pub fp_iterations: usize,
    #[serde(default = "default_three")]
    pub initial_thetas: usize,
    #[serde(default = "default_three")]
    pub thetas_per_iteration: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payoff_rollouts: Option<usize>,
    #[serde(default = "default_hundred")]
    pub eval_episodes: usize,
    #[serde(default = "default_one")]
    pub evaluator_seeds: usize,
}

fn default_fp() -> usize {
    2000
}
fn default_three() -> usize {
    3
}
fn default_hundred() -> usize {
    100
}
fn default_one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    Exact,
    Qlearning,
}

// `flatten` and `deny_unknown_fields` do not combine in serde, so unknown
// keys in this section are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrSection {
    pub method: MethodName,
    #[serde(default, flatten)]
    pub qlearning: QLearningConfig,
}

impl BrSection {
    pub fn method(&self) -> BrMethod {
        match self.method {
            MethodName::Exact => BrMethod::Exact,
            MethodName::Qlearning => BrMethod::Qlearning(self.qlearning.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeasibilitySection {
    pub method: MethodName,
    #[serde(default = "default_seven")]
    pub seeds: usize,
    /// Seed for the ground-truth grid, shared by every run.
    #[serde(default)]
    pub seed: u64,
}

fn default_seven() -> usize {
    7
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub environment: EnvironmentConfig,
    pub experiment: ExperimentSection,
    pub psro: PsroSection,
    pub br: BrSection,
    pub feasibility: FeasibilitySection,
}

fn parse_value(raw: &str) -> toml::Value {
    let probe = format!("v = {raw}");
    match probe.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.to_string())),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

/// Applies a `dotted.key=value` override to a TOML table.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| FarrError::config(assignment, "override must look like key=value"))?;
    let key = key.trim();
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(FarrError::config(key, "empty key segment"));
    }
    let mut cur = table;
    for part in &parts[..parts.len() - 1] {
        let entry = cur
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| FarrError::config(key, format!("`{part}` is not a section")))?;
    }
    let mut value = parse_value(raw.trim());
    // A scalar override of a list setting replaces it with a one-element list.
    let last = parts[parts.len() - 1];
    if cur.get(last).is_some_and(toml::Value::is_array) && !value.is_array() {
        value = toml::Value::Array(vec![value]);
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self> {
        let cfg = Self::parse(text, overrides)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| FarrError::config("<file>", e.to_string()))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        table
            .try_into()
            .map_err(|e: toml::de::Error| FarrError::config("<schema>", e.message().to_string()))
    }

    /// Loads a config file; a relative `environment.map` resolves against
    /// the file's directory when it does not exist as given.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| FarrError::config(path.display().to_string(), e.to_string()))?;
        let mut cfg = Self::parse(&text, overrides)?;
        if let (Some(map), Some(dir)) = (&cfg.environment.map, path.parent()) {
            if map.is_relative() && !map.exists() {
                cfg.environment.map = Some(dir.join(map));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks everything that does not need the environment built.
    pub fn validate(&self) -> Result<()> {
        let e = &self.experiment;
        if e.objectives.is_empty() {
            return Err(FarrError::config("experiment.objectives", "list is empty"));
        }
        if e.lambdas.is_empty() {
            return Err(FarrError::config("experiment.lambdas", "list is empty"));
        }
        if let Some(l) = e.lambdas.iter().find(|l| !l.is_finite()) {
            return Err(FarrError::config("experiment.lambdas", format!("{l} is not finite")));
        }
        if !e.penalty_c.is_finite() {
            return Err(FarrError::config("experiment.penalty_c", "must be finite"));
        }
        if e.seeds.is_empty() {
            return Err(FarrError::config("experiment.seeds", "need at least one seed"));
        }
        if self.psro.fp_iterations == 0 {
            return Err(FarrError::config("psro.fp_iterations", "must be at least 1"));
        }
        if self.psro.eval_episodes == 0 {
            return Err(FarrError::config("psro.eval_episodes", "must be at least 1"));
        }
        if self.psro.payoff_rollouts == Some(0) {
            return Err(FarrError::config("psro.payoff_rollouts", "must be at least 1"));
        }
        if self.psro.thetas_per_iteration == 0 || self.psro.initial_thetas == 0 {
            return Err(FarrError::config("psro.thetas_per_iteration", "must be at least 1"));
        }
        if self.feasibility.seeds == 0 {
            return Err(FarrError::config("feasibility.seeds", "must be at least 1"));
        }
        if self.br.method == MethodName::Qlearning {
            self.br
                .qlearning
                .validate()
                .map_err(|err| FarrError::config("br", err.to_string()))?;
        }
        let env = self.build_env()?;
        let max_return = env.max_achievable_return();
        if e.penalty_c <= max_return {
            return Err(FarrError::config(
                "experiment.penalty_c",
                format!("{} must exceed the largest achievable return {max_return}", e.penalty_c),
            ));
        }
        Ok(())
    }

    pub fn build_env(&self) -> Result<AnyEnv> {
        match self.environment.kind {
            EnvKind::LavaWorld => {
                let map = match &self.environment.map {
                    Some(path) => {
                        let text = fs::read_to_string(path)
                            .map_err(|e| FarrError::config("environment.map", format!("{}: {e}", path.display())))?;
                        load_map(&text).map_err(|e| FarrError::config("environment.map", e.to_string()))?
                    }
                    None => GridMap::default_map(),
                };
                Ok(AnyEnv::Lava(LavaWorld::new(map)))
            }
            EnvKind::WindyWalk => Ok(AnyEnv::Windy(WindyWalk::with_time_observation(
                self.environment.time_in_observation,
            ))),
        }
    }

    pub fn psro_config(&self, lambda: f64) -> PsroConfig {
        PsroConfig {
            lambda,
            penalty_c: self.experiment.penalty_c,
            iterations: self.psro.iterations,
            fp_iterations: self.psro.fp_iterations,
            initial_thetas: self.psro.initial_thetas,
            thetas_per_iteration: self.psro.thetas_per_iteration,
            payoff_rollouts: self.psro.payoff_rollouts,
            eval_episodes: self.psro.eval_episodes,
            br_method: self.br.method(),
            evaluator_seeds: self.psro.evaluator_seeds,
        }
    }

    pub fn feasibility_method(&self) -> BrMethod {
        match self.feasibility.method {
            MethodName::Exact => BrMethod::Exact,
            MethodName::Qlearning => BrMethod::Qlearning(self.br.qlearning.clone()),
        }
    }
}

/// The environments a config can select.
#[derive(Debug, Clone)]
pub enum AnyEnv {
    Lava(LavaWorld),
    Windy(WindyWalk),
}

impl AnyEnv {
    pub fn as_dyn(&self) -> &(dyn Environment + 'static) {
        match self {
            AnyEnv::Lava(e) => e,
            AnyEnv::Windy(e) => e,
        }
    }
}

impl std::ops::Deref for AnyEnv {
    type Target = dyn Environment;
    fn deref(&self) -> &Self::Target {
        self.as_dyn()
    }
}

/// Runs `f` on a pool with `threads` workers (0 = all cores).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| FarrError::InvalidArgument(e.to_string()))?;
    Ok(pool.install(f))
}

/// Ground-truth feasible set for the configured environment.
pub fn compute_feasible_set(cfg: &ExperimentConfig, env: &AnyEnv, lambda: f64) -> Result<FeasibleSet> {
    if !lambda.is_finite() {
        return Err(FarrError::config("lambda", format!("{lambda} is not finite")));
    }
    let grid = env.spec().theta_space.enumerate();
    build_feasible_set(
        env.as_dyn(),
        lambda,
        &grid,
        &cfg.feasibility_method(),
        cfg.feasibility.seeds,
        Seed(cfg.feasibility.seed).child("feasibility"),
    )
}

/// One metrics row. Domain-randomization rows leave the game columns empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub iteration: usize,
    pub objective: String,
    pub worst_case_feasible_reward: f64,
    pub worst_case_stderr: f64,
    pub argmin_theta: String,
    pub exploitability: Option<f64>,
    pub restricted_value: Option<f64>,
    pub protagonist_population: usize,
    pub adversary_population: usize,
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_metrics_csv<W: Write>(rows: &[MetricsRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "iteration",
        "objective",
        "worst_case_feasible_reward",
        "worst_case_stderr",
        "argmin_theta",
        "exploitability",
        "restricted_value",
        "protagonist_population",
        "adversary_population",
    ])?;
    for r in rows {
        out.write_record([
            r.iteration.to_string(),
            r.objective.clone(),
            r.worst_case_feasible_reward.to_string(),
            r.worst_case_stderr.to_string(),
            r.argmin_theta.clone(),
            opt(r.exploitability),
            opt(r.restricted_value),
            r.protagonist_population.to_string(),
            r.adversary_population.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_metrics_csv<R: std::io::Read>(r: R) -> Result<Vec<MetricsRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut rows = Vec::new();
    let bad = |f: &str| FarrError::InvalidArgument(format!("bad metrics field {f}"));
    for rec in rdr.records() {
        let rec = rec?;
        let f = |i: usize| rec.get(i).unwrap_or_default();
        let optf = |i: usize| -> Result<Option<f64>> {
            match f(i) {
                "" => Ok(None),
                s => s.parse().map(Some).map_err(|_| bad("float")),
            }
        };
        rows.push(MetricsRow {
            iteration: f(0).parse().map_err(|_| bad("iteration"))?,
            objective: f(1).to_string(),
            worst_case_feasible_reward: f(2).parse().map_err(|_| bad("worst_case_feasible_reward"))?,
            worst_case_stderr: f(3).parse().map_err(|_| bad("worst_case_stderr"))?,
            argmin_theta: f(4).to_string(),
            exploitability: optf(5)?,
            restricted_value: optf(6)?,
            protagonist_population: f(7).parse().map_err(|_| bad("protagonist_population"))?,
            adversary_population: f(8).parse().map_err(|_| bad("adversary_population"))?,
        });
    }
    Ok(rows)
}

/// Writes `iteration,<field>,<field>,probability` for every population
/// member at every iteration.
pub fn write_sigma_theta_csv<W: Write>(run: &PsroRun, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let names = run.state.adversaries[0].field_names();
    out.write_record(["iteration", names.0, names.1, "probability"])?;
    for m in &run.history {
        for (t, p) in &m.sigma_theta {
            let (a, b) = t.fields();
            out.write_record([m.iteration.to_string(), a.to_string(), b.to_string(), p.to_string()])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// A saved protagonist mixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyFile {
    pub policies: Vec<TabularPolicy>,
    pub weights: Vec<f64>,
}

impl StrategyFile {
    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s: StrategyFile = serde_json::from_str(&fs::read_to_string(path)?)?;
        if s.policies.len() != s.weights.len() || s.policies.is_empty() {
            return Err(FarrError::InvalidArgument("strategy file has mismatched policies and weights".into()));
        }
        Ok(s)
    }
}

pub fn metrics_from_run(run: &PsroRun) -> Vec<MetricsRow> {
    run.history
        .iter()
        .map(|m| MetricsRow {
            iteration: m.iteration,
            objective: m.objective.name().to_string(),
            worst_case_feasible_reward: m.worst_case_feasible_reward,
            worst_case_stderr: m.worst_case_stderr,
            argmin_theta: m.argmin_theta.to_string(),
            exploitability: Some(m.exploitability),
            restricted_value: Some(m.restricted_value),
            protagonist_population: m.protagonist_population,
            adversary_population: m.adversary_population,
        })
        .collect()
}

fn dr_row(wc: &WorstCase) -> MetricsRow {
    MetricsRow {
        iteration: 0,
        objective: RunKind::Dr.name().to_string(),
        worst_case_feasible_reward: wc.value,
        worst_case_stderr: wc.stderr,
        argmin_theta: wc.theta.to_string(),
        exploitability: None,
        restricted_value: None,
        protagonist_population: 1,
        adversary_population: 0,
    }
}

/// Final result of one (run kind, lambda, seed) job.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JobSummary {
    pub kind: RunKind,
    pub lambda: f64,
    pub seed: u64,
    pub final_worst_case: f64,
    pub final_stderr: f64,
    /// Probability the final adversary mixture puts on infeasible
    /// parameters (game runs only).
    pub infeasible_mass: Option<f64>,
    pub dir: PathBuf,
}

#[derive(Debug, Clone)]
pub struct LambdaSummary {
    pub lambda: f64,
    pub feasible_set: FeasibleSet,
    /// Certified bounds on the best achievable worst-case feasible return,
    /// when the environment admits the exact oracle.
    pub robust_bounds: Option<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub lambdas: Vec<LambdaSummary>,
    pub jobs: Vec<JobSummary>,
}

impl RunSummary {
    pub fn jobs_for(&self, kind: RunKind, lambda: f64) -> Vec<&JobSummary> {
        self.jobs.iter().filter(|j| j.kind == kind && j.lambda == lambda).collect()
    }
}

fn lambda_dir(root: &Path, lambda: f64) -> PathBuf {
    root.join(format!("lambda_{lambda}"))
}

fn write_file(path: &Path, f: impl FnOnce(fs::File) -> Result<()>) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    f(fs::File::create(path)?)
}

/// Runs every (objective, lambda, seed) job of a config and writes its
/// outputs. Domain randomization trains once per seed and is scored
/// against every lambda's feasible set.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let env = cfg.build_env()?;
    let root = cfg.experiment.output_dir.clone();
    fs::create_dir_all(&root)?;
    fs::write(root.join("config.resolved.toml"), cfg.to_toml())?;

    with_threads(cfg.experiment.threads, || -> Result<RunSummary> {
        let mut lambdas = Vec::new();
        for &lambda in &cfg.experiment.lambdas {
            let set = compute_feasible_set(cfg, &env, lambda)?;
            let dir = lambda_dir(&root, lambda);
            write_file(&dir.join("feasible_set.csv"), |f| set.write_csv(f))?;
            info!(
                "lambda {lambda}: {} feasible, {} infeasible",
                set.feasible_count(),
                set.infeasible_count()
            );
            let robust_bounds = match (&env, cfg.br.method) {
                (AnyEnv::Lava(lava), MethodName::Exact) if set.feasible_count() > 0 => {
                    let rv = robust_value(lava, &set.feasible_thetas(), 100_000, 100, 1e-3)?;
                    fs::write(dir.join("robust_value.txt"), format!("lower {}\nupper {}\n", rv.lower, rv.upper))?;
                    Some((rv.lower, rv.upper))
                }
                _ => None,
            };
            lambdas.push(LambdaSummary {
                lambda,
                feasible_set: set,
                robust_bounds,
            });
        }

        let dr_policies: Vec<(u64, TabularPolicy)> = if cfg.experiment.objectives.contains(&RunKind::Dr) {
            let universe = env.spec().theta_space.enumerate();
            cfg.experiment
                .seeds
                .par_iter()
                .map(|&s| Ok((s, domain_randomization_train(env.as_dyn(), &universe, &cfg.br.method(), Seed(s))?)))
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };

        let mut jobs = Vec::new();
        for ls in &lambdas {
            for &kind in &cfg.experiment.objectives {
                for &s in &cfg.experiment.seeds {
                    jobs.push((ls, kind, s));
                }
            }
        }
        let summaries = jobs
            .par_iter()
            .map(|&(ls, kind, s)| run_job(cfg, &env, ls, kind, s, &dr_policies, &root))
            .collect::<Result<Vec<_>>>()?;

        let mut summary_csv = csv::Writer::from_path(root.join("summary.csv"))?;
        summary_csv.write_record(["kind", "lambda", "seed", "final_worst_case", "final_stderr", "infeasible_mass"])?;
        for j in &summaries {
            summary_csv.write_record([
                j.kind.name().to_string(),
                j.lambda.to_string(),
                j.seed.to_string(),
                j.final_worst_case.to_string(),
                j.final_stderr.to_string(),
                opt(j.infeasible_mass),
            ])?;
        }
        summary_csv.flush()?;
        Ok(RunSummary {
            output_dir: root.clone(),
            lambdas,
            jobs: summaries,
        })
    })?
}

fn run_job(
    cfg: &ExperimentConfig,
    env: &AnyEnv,
    ls: &LambdaSummary,
    kind: RunKind,
    seed: u64,
    dr_policies: &[(u64, TabularPolicy)],
    root: &Path,
) -> Result<JobSummary> {
    let dir = lambda_dir(root, ls.lambda).join(kind.name()).join(format!("seed_{seed}"));
    fs::create_dir_all(&dir)?;
    let set = &ls.feasible_set;
    match kind.objective() {
        Some(objective) => {
            let run = run_psro(env.as_dyn(), objective, &cfg.psro_config(ls.lambda), set, Seed(seed))?;
            let rows = metrics_from_run(&run);
            write_file(&dir.join("metrics.csv"), |f| write_metrics_csv(&rows, f))?;
            write_file(&dir.join("sigma_theta.csv"), |f| write_sigma_theta_csv(&run, f))?;
            let (policies, weights) = run.final_sigma_p();
            StrategyFile {
                policies: policies.to_vec(),
                weights: weights.to_vec(),
            }
            .save(&dir.join("policy.json"))?;
            let last = run.last();
            let infeasible_mass = last
                .sigma_theta
                .iter()
                .filter(|(t, _)| set.is_feasible(t) == Some(false))
                .map(|(_, p)| p)
                .sum();
            Ok(JobSummary {
                kind,
                lambda: ls.lambda,
                seed,
                final_worst_case: last.worst_case_feasible_reward,
                final_stderr: last.worst_case_stderr,
                infeasible_mass: Some(infeasible_mass),
                dir,
            })
        }
        None => {
            let policy = dr_policies
                .iter()
                .find(|(s, _)| *s == seed)
                .map(|(_, p)| p.clone())
                .ok_or_else(|| FarrError::InvalidArgument("missing domain-randomization policy".into()))?;
            let wc = worst_case_feasible_reward(
                env.as_dyn(),
                std::slice::from_ref(&policy),
                &[1.0],
                set,
                cfg.psro.eval_episodes,
                Seed(seed).child("eval"),
            )?;
            write_file(&dir.join("metrics.csv"), |f| write_metrics_csv(&[dr_row(&wc)], f))?;
            StrategyFile {
                policies: vec![policy],
                weights: vec![1.0],
            }
            .save(&dir.join("policy.json"))?;
            Ok(JobSummary {
                kind,
                lambda: ls.lambda,
                seed,
                final_worst_case: wc.value,
                final_stderr: wc.stderr,
                infeasible_mass: None,
                dir,
            })
        }
    }
}

/// Scores a saved strategy against a saved feasible set.
pub fn eval_strategy(
    cfg: &ExperimentConfig,
    strategy: &StrategyFile,
    set: &FeasibleSet,
    seed: u64,
) -> Result<WorstCase> {
    let env = cfg.build_env()?;
    worst_case_feasible_reward(
        env.as_dyn(),
        &strategy.policies,
        &strategy.weights,
        set,
        cfg.psro.eval_episodes,
        Seed(seed).child("eval"),
    )
}

fn fmt_dist(labels: &[String], d: &[f64]) -> String {
    labels
        .iter()
        .zip(d)
        .map(|(l, p)| format!("{l}={p:.4}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Structured output of the matrix-game demonstration.
#[derive(Debug, Clone)]
pub struct MatrixDemo {
    pub original: MatrixGame,
    pub original_ne: crate::normform::MixedPair,
    pub original_exploitability: f64,
    pub transformed: MatrixGame,
    pub transformed_ne: crate::normform::MixedPair,
    pub transformed_exploitability: f64,
    pub reduction: crate::normform::Reduction,
    pub penalty_equivalence: bool,
    pub report: String,
}

/// Solves a game and its penalized version, reduces the penalized game by
/// dominance, and checks the penalty equivalence. `br_values` defaults to
/// the column maxima.
pub fn matrix_demo(game: &MatrixGame, lambda: f64, penalty_c: f64, fp_iterations: usize) -> Result<MatrixDemo> {
    let br = game.column_maxima();
    let original_ne = fictitious_play(game, fp_iterations)?;
    let original_exploitability = exploitability(game, &original_ne)?;
    let t1 = theorem1_report(game, &br, lambda, penalty_c, 0.05, fp_iterations)?;
    let transformed = t1.transformed.clone();
    let transformed_ne = t1.transformed_ne.clone();
    let transformed_exploitability = exploitability(&transformed, &transformed_ne)?;
    let reduction = iesds_reduce(&transformed)?;

    let mut r = String::new();
    let _ = writeln!(r, "original game (protagonist utilities):\n{game}");
    let _ = writeln!(r, "fictitious play, {fp_iterations} iterations:");
    let _ = writeln!(r, "  protagonist: {}", fmt_dist(game.row_labels(), &original_ne.row_dist));
    let _ = writeln!(r, "  adversary:   {}", fmt_dist(game.col_labels(), &original_ne.col_dist));
    let _ = writeln!(r, "  value {:.4}, exploitability {:.4}\n", original_ne.game_value, original_exploitability);
    let flags: Vec<String> = game
        .col_labels()
        .iter()
        .zip(&t1.feasible)
        .map(|(l, f)| format!("{l}={}", if *f { "feasible" } else { "infeasible" }))
        .collect();
    let _ = writeln!(r, "feasibility at lambda = {lambda}: {}", flags.join(" "));
    let _ = writeln!(r, "penalized game (C = {penalty_c}):\n{transformed}");
    let _ = writeln!(r, "fictitious play, {fp_iterations} iterations:");
    let _ = writeln!(r, "  protagonist: {}", fmt_dist(transformed.row_labels(), &transformed_ne.row_dist));
    let _ = writeln!(r, "  adversary:   {}", fmt_dist(transformed.col_labels(), &transformed_ne.col_dist));
    let _ = writeln!(
        r,
        "  value {:.4}, exploitability {:.4}\n",
        transformed_ne.game_value, transformed_exploitability
    );
    let names = |idx: &[usize], labels: &[String]| -> String {
        idx.iter().map(|&i| labels[i].clone()).collect::<Vec<_>>().join(", ")
    };
    let _ = writeln!(r, "iterated elimination of strictly dominated strategies:");
    let _ = writeln!(r, "  removed adversary strategies: [{}]", names(&reduction.removed_cols, game.col_labels()));
    let _ = writeln!(r, "  removed protagonist strategies: [{}]", names(&reduction.removed_rows, game.row_labels()));
    let _ = writeln!(r, "  reduced game:\n{}", reduction.game);
    let _ = writeln!(
        r,
        "penalty equivalence: {} (infeasible mass {:.2e}, exploitability on feasible columns {:.4})",
        t1.holds, t1.infeasible_mass, t1.restricted_exploitability
    );
    Ok(MatrixDemo {
        original: game.clone(),
        original_ne,
        original_exploitability,
        transformed,
        transformed_ne,
        transformed_exploitability,
        reduction,
        penalty_equivalence: t1.holds,
        report: r,
    })
}

/// The demonstration on the cabinet game.
pub fn cabinet_demo() -> Result<MatrixDemo> {
    matrix_demo(&canonical_cabinet_game(), CABINET_LAMBDA, CABINET_PENALTY, 2000)
}

/// Theta as the CSV-friendly display string used in metrics files.
pub fn theta_label(t: &Theta) -> String {
    t.to_string()
}
