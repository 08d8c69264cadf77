//! Feasible parameter sets and the feasibility-penalized utility.
//!
//! A parameter is feasible at threshold `lambda` when the best achievable
//! return on it is at least `lambda`. Evaluation of a protagonist is the
//! minimum of its mean return over the feasible set.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::br::{estimate_br_value, BrMethod, TabularPolicy};
use crate::error::{FarrError, Result};
use crate::rng::Seed;
use crate::upomdp::{estimate_utility, Environment, Theta, UtilityEstimate};

/// Protagonist utility with the adversary penalized for infeasible
/// parameters: `penalty_c` when `br_value < lambda`, else `u_p`.
pub fn farr_utility(u_p: f64, br_value: f64, lambda: f64, penalty_c: f64) -> f64 {
    if br_value < lambda {
        penalty_c
    } else {
        u_p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityRecord {
    pub theta: Theta,
    pub br_value: f64,
    pub stderr: f64,
    pub lambda: f64,
    pub feasible: bool,
}

impl FeasibilityRecord {
    pub fn new(theta: Theta, br_value: f64, stderr: f64, lambda: f64) -> Self {
        FeasibilityRecord {
            theta,
            br_value,
            stderr,
            lambda,
            feasible: br_value >= lambda,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibleSet {
    pub lambda: f64,
    pub records: Vec<FeasibilityRecord>,
}

impl FeasibleSet {
    /// Builds a set from best-response estimates, thresholding at `lambda`.
    pub fn from_estimates(lambda: f64, estimates: impl IntoIterator<Item = (Theta, f64, f64)>) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(FarrError::InvalidArgument(format!("lambda must be finite, got {lambda}")));
        }
        let records: Vec<FeasibilityRecord> = estimates
            .into_iter()
            .map(|(t, v, se)| FeasibilityRecord::new(t, v, se, lambda))
            .collect();
        for (i, r) in records.iter().enumerate() {
            if records[..i].iter().any(|q| q.theta == r.theta) {
                return Err(FarrError::InvalidArgument(format!("duplicate theta {}", r.theta)));
            }
        }
        Ok(FeasibleSet { lambda, records })
    }

    /// The same estimates thresholded at a different `lambda`.
    pub fn relabel(&self, lambda: f64) -> Result<Self> {
        Self::from_estimates(
            lambda,
            self.records.iter().map(|r| (r.theta, r.br_value, r.stderr)),
        )
    }

    pub fn feasible_thetas(&self) -> Vec<Theta> {
        self.records.iter().filter(|r| r.feasible).map(|r| r.theta).collect()
    }

    pub fn feasible_count(&self) -> usize {
        self.records.iter().filter(|r| r.feasible).count()
    }

    pub fn infeasible_count(&self) -> usize {
        self.records.len() - self.feasible_count()
    }

    pub fn record(&self, theta: &Theta) -> Option<&FeasibilityRecord> {
        self.records.iter().find(|r| r.theta == *theta)
    }

    pub fn is_feasible(&self, theta: &Theta) -> Option<bool> {
        self.record(theta).map(|r| r.feasible)
    }

    /// Writes `<field>,<field>,br_value,stderr,lambda,feasible`, where the
    /// leading fields are `row,col` or `alpha,beta`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let (a, b) = self
            .records
            .first()
            .map(|r| r.theta.field_names())
            .unwrap_or(("row", "col"));
        out.write_record([a, b, "br_value", "stderr", "lambda", "feasible"])?;
        for r in &self.records {
            let (x, y) = r.theta.fields();
            out.write_record([
                fmt_field(&r.theta, x),
                fmt_field(&r.theta, y),
                r.br_value.to_string(),
                r.stderr.to_string(),
                r.lambda.to_string(),
                r.feasible.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let headers = rdr.headers()?.clone();
        let grid = match (headers.get(0), headers.get(1)) {
            (Some("row"), Some("col")) => true,
            (Some("alpha"), Some("beta")) => false,
            _ => return Err(FarrError::InvalidArgument(format!("unrecognized feasible-set header {headers:?}"))),
        };
        let bad = |what: &str| FarrError::InvalidArgument(format!("bad feasible-set field {what}"));
        let mut records = Vec::new();
        let mut lambda = None;
        for row in rdr.records() {
            let row = row?;
            let get = |i: usize| row.get(i).ok_or_else(|| bad("count"));
            let theta = if grid {
                Theta::goal(
                    get(0)?.parse().map_err(|_| bad("row"))?,
                    get(1)?.parse().map_err(|_| bad("col"))?,
                )
            } else {
                Theta::beta(
                    get(0)?.parse().map_err(|_| bad("alpha"))?,
                    get(1)?.parse().map_err(|_| bad("beta"))?,
                )
            };
            let br_value: f64 = get(2)?.parse().map_err(|_| bad("br_value"))?;
            let stderr: f64 = get(3)?.parse().map_err(|_| bad("stderr"))?;
            let lam: f64 = get(4)?.parse().map_err(|_| bad("lambda"))?;
            let feasible: bool = get(5)?.parse().map_err(|_| bad("feasible"))?;
            if feasible != (br_value >= lam) {
                return Err(bad("feasible (inconsistent with br_value and lambda)"));
            }
            if lambda.is_some_and(|l: f64| l != lam) {
                return Err(bad("lambda (rows disagree)"));
            }
            lambda = Some(lam);
            records.push(FeasibilityRecord {
                theta,
                br_value,
                stderr,
                lambda: lam,
                feasible,
            });
        }
        let lambda = lambda.ok_or_else(|| bad("rows (none)"))?;
        Ok(FeasibleSet { lambda, records })
    }
}

fn fmt_field(theta: &Theta, x: f64) -> String {
    match theta {
        Theta::GridGoal { .. } => format!("{}", x as usize),
        Theta::BetaParams { .. } => x.to_string(),
    }
}

/// Estimates the best-response value of every grid point and thresholds
/// at `lambda`. Grid points run in parallel; each draws from its own
/// stream `seed.child(theta.key())`, so the result does not depend on the
/// thread count.
pub fn build_feasible_set<E: Environment + ?Sized>(
    env: &E,
    lambda: f64,
    theta_grid: &[Theta],
    method: &BrMethod,
    seeds: usize,
    seed: Seed,
) -> Result<FeasibleSet> {
    if theta_grid.is_empty() {
        return Err(FarrError::InvalidArgument("theta grid is empty".into()));
    }
    if !lambda.is_finite() {
        return Err(FarrError::InvalidArgument(format!("lambda must be finite, got {lambda}")));
    }
    let estimates = theta_grid
        .par_iter()
        .map(|t| {
            let est = estimate_br_value(env, t, method, seeds, seed.child(&t.key()))?;
            Ok((*t, est.value, est.stderr))
        })
        .collect::<Result<Vec<_>>>()?;
    FeasibleSet::from_estimates(lambda, estimates)
}

/// Mean return of a mixed protagonist strategy on one parameter: the
/// weighted sum of each member's estimate. This has the same expectation
/// as drawing a member at the start of each episode, with no sampling noise
/// from the draw. Member `i` uses stream `seed.index(i)`.
pub fn mixture_utility<E: Environment + ?Sized>(
    env: &E,
    theta: &Theta,
    policies: &[TabularPolicy],
    weights: &[f64],
    episodes: usize,
    seed: Seed,
) -> Result<UtilityEstimate> {
    if policies.len() != weights.len() || policies.is_empty() {
        return Err(FarrError::DimensionMismatch("policies and weights differ in length".into()));
    }
    let mut mean = 0.0;
    let mut var = 0.0;
    for (i, (p, &w)) in policies.iter().zip(weights).enumerate() {
        if w == 0.0 {
            continue;
        }
        let e = estimate_utility(env, theta, p, episodes, seed.index(i as u64))?;
        mean += w * e.mean;
        var += w * w * e.stderr * e.stderr;
    }
    Ok(UtilityEstimate {
        mean,
        stderr: var.sqrt(),
        episodes,
    })
}

/// The minimum over feasible parameters of a strategy's mean return.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstCase {
    pub value: f64,
    pub stderr: f64,
    pub theta: Theta,
}

/// Evaluates a (mixed) protagonist on every feasible parameter and returns
/// the smallest mean, ties going to the earliest record.
pub fn worst_case_feasible_reward<E: Environment + ?Sized>(
    env: &E,
    policies: &[TabularPolicy],
    weights: &[f64],
    feasible_set: &FeasibleSet,
    episodes: usize,
    seed: Seed,
) -> Result<WorstCase> {
    let thetas = feasible_set.feasible_thetas();
    if thetas.is_empty() {
        return Err(FarrError::EmptyFeasibleSet);
    }
    let values = thetas
        .par_iter()
        .map(|t| mixture_utility(env, t, policies, weights, episodes, seed.child(&t.key())))
        .collect::<Result<Vec<_>>>()?;
    Ok(min_over(&thetas, &values))
}

pub(crate) fn min_over(thetas: &[Theta], values: &[UtilityEstimate]) -> WorstCase {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if v.mean < values[best].mean {
            best = i;
        }
    }
    WorstCase {
        value: values[best].mean,
        stderr: values[best].stderr,
        theta: thetas[best],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn farr_utility_examples() {
        assert_eq!(farr_utility(-7.0, -12.0, -10.0, 50.0), 50.0);
        assert_eq!(farr_utility(-7.0, -10.0, -10.0, 50.0), -7.0);
        assert_eq!(farr_utility(3.0, 100.0, 1.0, 500.0), 3.0);
    }

    #[test]
    fn relabel_and_counts() {
        let set = FeasibleSet::from_estimates(
            0.0,
            [(Theta::goal(0, 1), -1.0, 0.0), (Theta::goal(0, 2), 2.0, 0.0)],
        )
        .unwrap();
        assert_eq!(set.feasible_count(), 1);
        assert_eq!(set.relabel(-5.0).unwrap().feasible_count(), 2);
        assert!(set.relabel(f64::INFINITY).is_err());
        assert!(FeasibleSet::from_estimates(0.0, [(Theta::goal(0, 1), 1.0, 0.0); 2]).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let set = FeasibleSet::from_estimates(
            0.1,
            [
                (Theta::beta(0.01, 10.0), 0.1 + 0.2, 1.0 / 3.0),
                (Theta::beta(3.0, 7.0), -2.5e-17, 0.0),
            ],
        )
        .unwrap();
        let mut buf = Vec::new();
        set.write_csv(&mut buf).unwrap();
        let back = FeasibleSet::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, set);
    }

    #[test]
    fn csv_rejects_inconsistent_rows() {
        let text = "row,col,br_value,stderr,lambda,feasible\n0,1,-12,0,-10,true\n";
        assert!(FeasibleSet::read_csv(text.as_bytes()).is_err());
    }
}
