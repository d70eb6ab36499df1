//! Cell-level matching rate and run latency.

use std::collections::HashSet;
use std::fmt;
use std::time::{Duration, Instant};

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::parallel::Execution;
use crate::table::{Cell, Table};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("run failed after {elapsed:?}: {message}")]
    EvaluationAborted { message: String, elapsed: Duration },
}

/// How the matched-cell count is normalized.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Normalization {
    /// Divide by `m·n`: the mean over all cells.
    #[default]
    Cells,
    /// Divide by `m` only, summing per-column rates. Can exceed 1.
    Rows,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub rate: f64,
    pub per_column: IndexMap<String, f64>,
    pub m: usize,
    pub n: usize,
    pub mismatches: usize,
    #[serde(rename = "latency_s", serialize_with = "secs")]
    pub latency: Duration,
}

fn secs<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rate: {:.1}%", self.rate * 100.0)?;
        writeln!(f, "rows: {}", self.m)?;
        writeln!(f, "columns: {}", self.n)?;
        writeln!(f, "mismatches: {}", self.mismatches)?;
        writeln!(f, "latency: {:.3} s", self.latency.as_secs_f64())?;
        for (c, r) in &self.per_column {
            writeln!(f, "column {c}: {:.1}%", r * 100.0)?;
        }
        Ok(())
    }
}

fn same(a: &Cell, b: &Cell) -> bool {
    match (a, b) {
        (Cell::Text(x), Cell::Text(y)) => x.trim_end() == y.trim_end(),
        (Cell::Missing, Cell::Missing) => true,
        _ => false,
    }
}

/// Share of cells in `clean` equal to the same-named cell in `truth`.
///
/// Columns are matched by name, so order does not matter. Text is compared
/// exactly after trimming trailing whitespace; missing matches only missing.
/// An empty table (no rows) scores 1.
pub fn cell_match_rate(clean: &Table, truth: &Table) -> Result<EvalReport, EvalError> {
    cell_match_rate_with(clean, truth, Normalization::Cells, Execution::default())
}

pub fn cell_match_rate_with(
    clean: &Table,
    truth: &Table,
    normalization: Normalization,
    execution: Execution,
) -> Result<EvalReport, EvalError> {
    let (m, n) = (truth.row_count(), truth.column_count());
    if clean.row_count() != m {
        return Err(EvalError::ShapeMismatch(format!("{} rows vs {m} rows", clean.row_count())));
    }
    let names: HashSet<&String> = clean.columns().iter().collect();
    if clean.column_count() != n || truth.columns().iter().any(|c| !names.contains(c)) {
        return Err(EvalError::ShapeMismatch(format!(
            "columns {:?} vs {:?}",
            clean.columns(),
            truth.columns()
        )));
    }
    let pairs: Vec<(usize, usize)> = truth
        .columns()
        .iter()
        .enumerate()
        .map(|(j, c)| (clean.column_index(c).expect("checked above"), j))
        .collect();
    let matched: Vec<usize> = execution.map(&pairs, |&(cj, tj)| {
        (0..m).filter(|&i| same(clean.cell(i, cj), truth.cell(i, tj))).count()
    });

    let total: usize = matched.iter().sum();
    let rate_of = |hits: usize, denom: usize| if denom == 0 { 1.0 } else { hits as f64 / denom as f64 };
    let per_column = truth
        .columns()
        .iter()
        .zip(&matched)
        .map(|(c, &hits)| (c.clone(), rate_of(hits, m)))
        .collect();
    let rate = match normalization {
        Normalization::Cells => rate_of(total, m * n),
        Normalization::Rows => rate_of(total, m),
    };
    Ok(EvalReport {
        rate,
        per_column,
        m,
        n,
        mismatches: m * n - total,
        latency: Duration::ZERO,
    })
}

/// Times `runner` on `input` and scores its output against `truth`.
pub fn evaluate_run<F, E>(input: &Table, runner: F, truth: &Table) -> Result<EvalReport, EvalError>
where
    F: FnOnce(&Table) -> Result<Table, E>,
    E: fmt::Display,
{
    let start = Instant::now();
    let outcome = runner(input);
    let elapsed = start.elapsed();
    let clean = outcome.map_err(|e| EvalError::EvaluationAborted { message: e.to_string(), elapsed })?;
    let mut report = cell_match_rate(&clean, truth)?;
    report.latency = elapsed;
    Ok(report)
}
