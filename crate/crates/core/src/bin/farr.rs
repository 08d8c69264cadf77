use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use farr::feasibility::FeasibleSet;
use farr::harness::{
    compute_feasible_set, eval_strategy, matrix_demo, run_experiment, with_threads, ExperimentConfig,
    StrategyFile, EXIT_CONFIG, EXIT_RUNTIME,
};
use farr::normform::MatrixGame;
use farr::FarrError;

#[derive(Parser)]
#[command(name = "farr", version, about = "Feasibility-constrained adversarial robust RL experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Override a config entry, e.g. `--set psro.iterations=10`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Run with this seed only.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (overrides `experiment.output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> farr::Result<ExperimentConfig> {
        let mut overrides = self.overrides.clone();
        if let Some(s) = self.seed {
            overrides.push(format!("experiment.seeds=[{s}]"));
        }
        if let Some(out) = &self.out {
            overrides.push(format!("experiment.output_dir={}", toml_string(&out.display().to_string())));
        }
        ExperimentConfig::load(&self.config, &overrides)
    }
}

fn toml_string(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured objective, lambda and seed.
    Run(Common),
    /// Compute the ground-truth feasible set for one lambda.
    FeasibleSet {
        #[command(flatten)]
        common: Common,
        /// Threshold; defaults to the first configured lambda.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
    },
    /// Solve a matrix game and its penalized version.
    MatrixDemo {
        /// Game in the text matrix format; the cabinet game when absent.
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 500.0)]
        penalty: f64,
        #[arg(long, default_value_t = 2000)]
        fp_iterations: usize,
    },
    /// Score a saved strategy against a saved feasible set.
    Eval {
        #[command(flatten)]
        common: Common,
        /// `policy.json` written by `run`.
        #[arg(long)]
        policy: PathBuf,
        /// `feasible_set.csv` written by `run` or `feasible-set`.
        #[arg(long)]
        feasible_set: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                FarrError::Config { .. } | FarrError::PenaltyTooSmall { .. } => EXIT_CONFIG,
                _ => EXIT_RUNTIME,
            };
            ExitCode::from(code as u8)
        }
    }
}

fn dispatch(command: Command) -> farr::Result<()> {
    match command {
        Command::Run(common) => {
            let cfg = common.load()?;
            let summary = run_experiment(&cfg)?;
            for ls in &summary.lambdas {
                println!(
                    "lambda {}: {} feasible / {} infeasible",
                    ls.lambda,
                    ls.feasible_set.feasible_count(),
                    ls.feasible_set.infeasible_count()
                );
                if let Some((lo, hi)) = ls.robust_bounds {
                    println!("  best worst-case feasible return in [{lo:.4}, {hi:.4}]");
                }
            }
            for j in &summary.jobs {
                println!(
                    "{:>8} lambda {:>6} seed {:>3}: worst-case feasible reward {:.4} (se {:.4})",
                    j.kind.name(),
                    j.lambda,
                    j.seed,
                    j.final_worst_case,
                    j.final_stderr
                );
            }
            println!("outputs in {}", summary.output_dir.display());
        }
        Command::FeasibleSet { common, lambda } => {
            let cfg = common.load()?;
            let lambda = lambda.unwrap_or(cfg.experiment.lambdas[0]);
            if !lambda.is_finite() {
                return Err(FarrError::config("lambda", format!("{lambda} is not finite")));
            }
            let env = cfg.build_env()?;
            let set = with_threads(cfg.experiment.threads, || compute_feasible_set(&cfg, &env, lambda))??;
            let out = &cfg.experiment.output_dir;
            fs::create_dir_all(out)?;
            let path = out.join("feasible_set.csv");
            set.write_csv(fs::File::create(&path)?)?;
            println!(
                "lambda {lambda}: {} feasible, {} infeasible -> {}",
                set.feasible_count(),
                set.infeasible_count(),
                path.display()
            );
        }
        Command::MatrixDemo {
            matrix,
            lambda,
            penalty,
            fp_iterations,
        } => {
            let demo = match matrix {
                None => matrix_demo(&farr::envs::canonical_cabinet_game(), lambda, penalty, fp_iterations)?,
                Some(path) => {
                    let text = fs::read_to_string(&path)
                        .map_err(|e| FarrError::config(path.display().to_string(), e.to_string()))?;
                    let game = MatrixGame::parse_text(&text)
                        .map_err(|e| FarrError::config(path.display().to_string(), e.to_string()))?;
                    matrix_demo(&game, lambda, penalty, fp_iterations)?
                }
            };
            print!("{}", demo.report);
        }
        Command::Eval {
            common,
            policy,
            feasible_set,
        } => {
            let cfg = common.load()?;
            let strategy = StrategyFile::load(&policy)?;
            let set = FeasibleSet::read_csv(fs::File::open(&feasible_set)?)?;
            let seed = common.seed.unwrap_or(cfg.experiment.seeds[0]);
            let wc = with_threads(cfg.experiment.threads, || eval_strategy(&cfg, &strategy, &set, seed))??;
            println!(
                "worst-case feasible reward {:.4} (se {:.4}) at {}",
                wc.value, wc.stderr, wc.theta
            );
        }
    }
    Ok(())
}
