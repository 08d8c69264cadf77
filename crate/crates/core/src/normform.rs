//! Finite two-player zero-sum normal-form games.
//!
//! The row player is the protagonist and maximizes `u`; the column player is
//! the adversary and maximizes `-u`. Everything here is a pure function of
//! its inputs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{FarrError, Result};

/// Tolerance used when validating probability vectors.
pub const PROB_TOL: f64 = 1e-9;

/// A finite zero-sum game given by the protagonist's utility matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixGame {
    u: Vec<Vec<f64>>,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
}

impl MatrixGame {
    pub fn new(u: Vec<Vec<f64>>) -> Result<Self> {
        let rows = u.len();
        if rows == 0 {
            return Err(FarrError::InvalidGame("game needs at least one row".into()));
        }
        let cols = u[0].len();
        if cols == 0 {
            return Err(FarrError::InvalidGame("game needs at least one column".into()));
        }
        for (i, row) in u.iter().enumerate() {
            if row.len() != cols {
                return Err(FarrError::InvalidGame(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            if let Some(j) = row.iter().position(|x| !x.is_finite()) {
                return Err(FarrError::InvalidGame(format!("entry ({i}, {j}) is not finite")));
            }
        }
        Ok(MatrixGame {
            row_labels: (0..rows).map(|i| format!("r{i}")).collect(),
            col_labels: (0..cols).map(|j| format!("c{j}")).collect(),
            u,
        })
    }

    pub fn with_labels(mut self, rows: &[&str], cols: &[&str]) -> Result<Self> {
        if rows.len() != self.rows() || cols.len() != self.cols() {
            return Err(FarrError::DimensionMismatch("label counts do not match game".into()));
        }
        self.row_labels = rows.iter().map(|s| s.to_string()).collect();
        self.col_labels = cols.iter().map(|s| s.to_string()).collect();
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.u.len()
    }

    pub fn cols(&self) -> usize {
        self.u[0].len()
    }

    /// Protagonist utility of the pure profile `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.u[i][j]
    }

    /// Adversary utility of the pure profile `(i, j)`.
    pub fn adversary_utility(&self, i: usize, j: usize) -> f64 {
        -self.u[i][j]
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.u
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn max_entry(&self) -> f64 {
        self.u.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Maximum of each column (the best pure-strategy reply to each column).
    pub fn column_maxima(&self) -> Vec<f64> {
        (0..self.cols())
            .map(|j| (0..self.rows()).map(|i| self.u[i][j]).fold(f64::NEG_INFINITY, f64::max))
            .collect()
    }

    /// The subgame on the given row and column indices, labels carried over.
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> Result<MatrixGame> {
        let u = rows
            .iter()
            .map(|&i| cols.iter().map(|&j| self.u[i][j]).collect())
            .collect();
        let mut g = MatrixGame::new(u)?;
        g.row_labels = rows.iter().map(|&i| self.row_labels[i].clone()).collect();
        g.col_labels = cols.iter().map(|&j| self.col_labels[j].clone()).collect();
        Ok(g)
    }

    /// `u · col_dist`, the row player's payoff for each pure row.
    pub fn row_payoffs(&self, col_dist: &[f64]) -> Vec<f64> {
        self.u
            .iter()
            .map(|row| row.iter().zip(col_dist).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `row_dist · u`, the row player's payoff for each pure column.
    pub fn col_payoffs(&self, row_dist: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols()];
        for (row, &p) in self.u.iter().zip(row_dist) {
            if p == 0.0 {
                continue;
            }
            for (o, &x) in out.iter_mut().zip(row) {
                *o += p * x;
            }
        }
        out
    }

    pub fn expected_value(&self, row_dist: &[f64], col_dist: &[f64]) -> f64 {
        self.row_payoffs(col_dist)
            .iter()
            .zip(row_dist)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Parses the plain-text matrix format:
    ///
    /// ```text
    /// 2 3
    /// 2 1 -10
    /// 0 0 0
    /// row 0 grab
    /// col 2 locked
    /// ```
    pub fn parse_text(text: &str) -> Result<MatrixGame> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| FarrError::InvalidGame("empty matrix text".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| FarrError::InvalidGame(format!("bad header `{header}`: {e}")))?;
        let [rows, cols] = dims[..] else {
            return Err(FarrError::InvalidGame(format!("header `{header}` must be `rows cols`")));
        };
        let mut u = Vec::with_capacity(rows);
        for i in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| FarrError::InvalidGame(format!("missing matrix row {i}")))?;
            let row: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| FarrError::InvalidGame(format!("row {i}: {e}")))?;
            if row.len() != cols {
                return Err(FarrError::InvalidGame(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            u.push(row);
        }
        let mut game = MatrixGame::new(u)?;
        for line in lines {
            let mut parts = line.splitn(3, char::is_whitespace);
            let kind = parts.next().unwrap_or_default();
            let idx = parts
                .next()
                .and_then(|t| t.parse::<usize>().ok())
                .ok_or_else(|| FarrError::InvalidGame(format!("bad label line `{line}`")))?;
            let name = parts.next().unwrap_or_default().trim().to_string();
            match kind {
                "row" if idx < rows => game.row_labels[idx] = name,
                "col" if idx < cols => game.col_labels[idx] = name,
                _ => return Err(FarrError::InvalidGame(format!("bad label line `{line}`"))),
            }
        }
        Ok(game)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows(), self.cols());
        for row in &self.u {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            s.push_str(&cells.join(" "));
            s.push('\n');
        }
        for (i, l) in self.row_labels.iter().enumerate() {
            s.push_str(&format!("row {i} {l}\n"));
        }
        for (j, l) in self.col_labels.iter().enumerate() {
            s.push_str(&format!("col {j} {l}\n"));
        }
        s
    }
}

impl fmt::Display for MatrixGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self
            .col_labels
            .iter()
            .map(String::len)
            .chain(self.u.iter().flatten().map(|x| format!("{x}").len()))
            .max()
            .unwrap_or(4)
            .max(4);
        let rw = self.row_labels.iter().map(String::len).max().unwrap_or(0);
        write!(f, "{:rw$}", "")?;
        for l in &self.col_labels {
            write!(f, " {l:>w$}")?;
        }
        writeln!(f)?;
        for (l, row) in self.row_labels.iter().zip(&self.u) {
            write!(f, "{l:rw$}")?;
            for x in row {
                write!(f, " {:>w$}", format!("{x}"))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// A mixed strategy profile `(row_dist, col_dist)` and its value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedPair {
    pub row_dist: Vec<f64>,
    pub col_dist: Vec<f64>,
    pub game_value: f64,
}

fn check_distribution(name: &str, d: &[f64]) -> Result<()> {
    if d.iter().any(|&p| p < 0.0 || !p.is_finite()) {
        return Err(FarrError::InvalidArgument(format!("{name} has a negative or non-finite entry")));
    }
    let s: f64 = d.iter().sum();
    if (s - 1.0).abs() > PROB_TOL {
        return Err(FarrError::InvalidArgument(format!("{name} sums to {s}, not 1")));
    }
    Ok(())
}

impl MixedPair {
    /// Builds a pair for `game`, computing the value.
    pub fn new(game: &MatrixGame, row_dist: Vec<f64>, col_dist: Vec<f64>) -> Result<Self> {
        if row_dist.len() != game.rows() || col_dist.len() != game.cols() {
            return Err(FarrError::DimensionMismatch(format!(
                "pair is {}x{}, game is {}x{}",
                row_dist.len(),
                col_dist.len(),
                game.rows(),
                game.cols()
            )));
        }
        check_distribution("row_dist", &row_dist)?;
        check_distribution("col_dist", &col_dist)?;
        let game_value = game.expected_value(&row_dist, &col_dist);
        Ok(MixedPair {
            row_dist,
            col_dist,
            game_value,
        })
    }
}

fn argmax_lowest(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

fn argmin_lowest(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x < xs[best] {
            best = i;
        }
    }
    best
}

/// Alternating fictitious play.
///
/// In each round the row player best-responds to the column player's
/// empirical play so far (to pure column 0 in the first round), then the
/// column player best-responds to the row history including that move.
/// Ties go to the lowest index. The returned distributions are play counts
/// divided by `iterations`.
pub fn fictitious_play(game: &MatrixGame, iterations: usize) -> Result<MixedPair> {
    if iterations == 0 {
        return Err(FarrError::InvalidArgument("fictitious play needs at least one iteration".into()));
    }
    let (m, n) = (game.rows(), game.cols());
    let u = game.matrix();
    let mut row_counts = vec![0u64; m];
    let mut col_counts = vec![0u64; n];
    // Cumulative payoff of each pure row against the column history, and of
    // each pure column against the row history.
    let mut row_acc: Vec<f64> = (0..m).map(|i| u[i][0]).collect();
    let mut col_acc = vec![0.0; n];

    for t in 0..iterations {
        let r = argmax_lowest(&row_acc);
        if t == 0 {
            row_acc.iter_mut().for_each(|x| *x = 0.0);
        }
        row_counts[r] += 1;
        for (acc, &x) in col_acc.iter_mut().zip(&u[r]) {
            *acc += x;
        }
        let c = argmin_lowest(&col_acc);
        col_counts[c] += 1;
        for (acc, row) in row_acc.iter_mut().zip(u) {
            *acc += row[c];
        }
    }
    let total = iterations as f64;
    let row_dist = row_counts.iter().map(|&k| k as f64 / total).collect();
    let col_dist = col_counts.iter().map(|&k| k as f64 / total).collect();
    MixedPair::new(game, row_dist, col_dist)
}

/// Sum of both players' best unilateral improvements; zero exactly at a
/// Nash equilibrium.
pub fn exploitability(game: &MatrixGame, pair: &MixedPair) -> Result<f64> {
    if pair.row_dist.len() != game.rows() || pair.col_dist.len() != game.cols() {
        return Err(FarrError::DimensionMismatch(format!(
            "pair is {}x{}, game is {}x{}",
            pair.row_dist.len(),
            pair.col_dist.len(),
            game.rows(),
            game.cols()
        )));
    }
    let best_row = game
        .row_payoffs(&pair.col_dist)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let best_col = game
        .col_payoffs(&pair.row_dist)
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok((best_row - best_col).max(0.0))
}

/// Column `j` is feasible iff `br_values[j] >= lambda`.
pub fn feasible_columns(br_values: &[f64], lambda: f64) -> Vec<bool> {
    br_values.iter().map(|&v| v >= lambda).collect()
}

/// Replaces every infeasible column with the constant `penalty_c`.
///
/// `penalty_c` must exceed every entry of the columns that stay, so that
/// each penalized column is strictly dominated for the adversary.
pub fn farr_transform(
    game: &MatrixGame,
    br_values: &[f64],
    lambda: f64,
    penalty_c: f64,
) -> Result<MatrixGame> {
    if br_values.len() != game.cols() {
        return Err(FarrError::DimensionMismatch(format!(
            "{} br values for {} columns",
            br_values.len(),
            game.cols()
        )));
    }
    if !lambda.is_finite() || !penalty_c.is_finite() {
        return Err(FarrError::InvalidArgument("lambda and C must be finite".into()));
    }
    let feasible = feasible_columns(br_values, lambda);
    let max_kept = game
        .matrix()
        .iter()
        .flat_map(|row| row.iter().zip(&feasible).filter(|(_, &f)| f).map(|(x, _)| *x))
        .fold(f64::NEG_INFINITY, f64::max);
    if penalty_c <= max_kept {
        return Err(FarrError::PenaltyTooSmall {
            penalty: penalty_c,
            max_utility: max_kept,
        });
    }
    let mut out = game.clone();
    for row in out.u.iter_mut() {
        for (x, &f) in row.iter_mut().zip(&feasible) {
            if !f {
                *x = penalty_c;
            }
        }
    }
    Ok(out)
}

/// Result of iterated elimination of strictly dominated strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub game: MatrixGame,
    /// Original indices of the surviving rows and columns.
    pub kept_rows: Vec<usize>,
    pub kept_cols: Vec<usize>,
    /// Original indices in elimination order.
    pub removed_rows: Vec<usize>,
    pub removed_cols: Vec<usize>,
}

/// Iterated elimination of strictly dominated pure strategies.
///
/// Dominance is strict with no epsilon, so exact ties block elimination.
/// Each pass removes the lowest-index dominated row, or failing that the
/// lowest-index dominated column, and starts over.
pub fn iesds_reduce(game: &MatrixGame) -> Result<Reduction> {
    let u = game.matrix();
    let mut rows: Vec<usize> = (0..game.rows()).collect();
    let mut cols: Vec<usize> = (0..game.cols()).collect();
    let mut removed_rows = Vec::new();
    let mut removed_cols = Vec::new();

    loop {
        let dominated_row = rows.iter().position(|&i| {
            rows.iter()
                .any(|&k| k != i && cols.iter().all(|&j| u[k][j] > u[i][j]))
        });
        if let Some(pos) = dominated_row {
            removed_rows.push(rows.remove(pos));
            continue;
        }
        // Column k dominates j for the adversary when it leaves the row
        // player strictly less everywhere.
        let dominated_col = cols.iter().position(|&j| {
            cols.iter()
                .any(|&k| k != j && rows.iter().all(|&i| u[i][k] < u[i][j]))
        });
        if let Some(pos) = dominated_col {
            removed_cols.push(cols.remove(pos));
            continue;
        }
        break;
    }
    Ok(Reduction {
        game: game.restrict(&rows, &cols)?,
        kept_rows: rows,
        kept_cols: cols,
        removed_rows,
        removed_cols,
    })
}

/// Default fictitious-play length used by [`verify_theorem1`].
pub const THEOREM1_FP_ITERATIONS: usize = 100_000;

/// Details of a penalty-equivalence check.
#[derive(Debug, Clone)]
pub struct Theorem1Report {
    pub transformed: MatrixGame,
    pub transformed_ne: MixedPair,
    pub feasible: Vec<bool>,
    pub infeasible_mass: f64,
    /// The transformed equilibrium restricted to feasible columns, scored in
    /// the original game restricted to those columns.
    pub restricted_exploitability: f64,
    pub holds: bool,
}

/// Checks that an approximate equilibrium of the penalized game is an
/// approximate equilibrium of the game restricted to feasible columns.
pub fn verify_theorem1(
    game: &MatrixGame,
    br_values: &[f64],
    lambda: f64,
    penalty_c: f64,
    tol: f64,
) -> Result<bool> {
    Ok(theorem1_report(game, br_values, lambda, penalty_c, tol, THEOREM1_FP_ITERATIONS)?.holds)
}

pub fn theorem1_report(
    game: &MatrixGame,
    br_values: &[f64],
    lambda: f64,
    penalty_c: f64,
    tol: f64,
    fp_iterations: usize,
) -> Result<Theorem1Report> {
    let feasible = feasible_columns(br_values, lambda);
    if br_values.len() == game.cols() && !feasible.iter().any(|&f| f) {
        return Err(FarrError::EmptyFeasibleSet);
    }
    let transformed = farr_transform(game, br_values, lambda, penalty_c)?;
    let ne = fictitious_play(&transformed, fp_iterations)?;

    let feasible_idx: Vec<usize> = (0..game.cols()).filter(|&j| feasible[j]).collect();
    let feasible_mass: f64 = feasible_idx.iter().map(|&j| ne.col_dist[j]).sum();
    let infeasible_mass = (1.0 - feasible_mass).max(0.0);

    let (restricted_exploitability, holds) = if feasible_mass > 0.0 {
        let all_rows: Vec<usize> = (0..game.rows()).collect();
        let reduced = game.restrict(&all_rows, &feasible_idx)?;
        let col: Vec<f64> = feasible_idx.iter().map(|&j| ne.col_dist[j] / feasible_mass).collect();
        let total: f64 = col.iter().sum();
        let col: Vec<f64> = col.iter().map(|p| p / total).collect();
        let pair = MixedPair::new(&reduced, ne.row_dist.clone(), col)?;
        let e = exploitability(&reduced, &pair)?;
        (e, e <= tol && infeasible_mass <= tol)
    } else {
        (f64::INFINITY, false)
    };
    Ok(Theorem1Report {
        transformed,
        transformed_ne: ne,
        feasible,
        infeasible_mass,
        restricted_exploitability,
        holds,
    })
}
