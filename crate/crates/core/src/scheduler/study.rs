use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lifecycle::{run_lifecycle, LifecycleResult, Strategy};
use super::Planner;
use crate::costs::cm_only_rate;
use crate::error::{domain, Result};
use crate::rng::{mix, tag};

/// Per-strategy statistics of simulated monthly rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySummary {
    pub strategy: Strategy,
    pub replications: usize,
    pub mean_rate: f64,
    pub stderr: f64,
    pub ci95: (f64, f64),
    /// Saving of this strategy's mean rate against the simulated CM-only
    /// mean, percent. `None` when CM-only was not simulated.
    pub saving_vs_cm_only_pct: Option<f64>,
}

/// Paired-seed comparison of strategies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub seed: u64,
    pub table_replications: u64,
    pub strategies: Vec<StrategySummary>,
    /// Objective of the first next-PM solve from the fresh system.
    pub planning_objective: Option<f64>,
    /// Long-run CM-only rate from the renewal approximation.
    pub cm_only_approximation: f64,
    /// `1 - planning_objective / cm_only_approximation`, percent.
    pub planning_saving_pct: Option<f64>,
    #[serde(skip)]
    pub runs: Vec<Vec<LifecycleResult>>,
}

/// Replication `k` of every strategy uses the seed `mix(seed, k)`, so all
/// strategies face the same component lives.
pub fn run_study(
    planner: &Planner<'_>,
    strategies: &[Strategy],
    replications: usize,
    seed: u64,
) -> Result<StudyReport> {
    if replications < 1 {
        return Err(domain("a study needs at least one replication"));
    }
    let seeds: Vec<u64> = (0..replications as u64).map(|k| mix(seed, &[tag::REPLICATION, k])).collect();
    let runs = strategies
        .iter()
        .map(|&strategy| {
            seeds
                .par_iter()
                .map(|&s| run_lifecycle(planner, strategy, s))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut summaries: Vec<StrategySummary> = strategies
        .iter()
        .zip(&runs)
        .map(|(&strategy, results)| summarize(strategy, results))
        .collect();
    let cm_mean = summaries
        .iter()
        .find(|s| s.strategy == Strategy::CmOnly)
        .map(|s| s.mean_rate);
    for s in &mut summaries {
        s.saving_vs_cm_only_pct = cm_mean.map(|cm| 100.0 * (1.0 - s.mean_rate / cm));
    }

    let planning_objective = runs
        .iter()
        .flatten()
        .find_map(|r| r.first_plan.as_ref().map(|p| p.objective));
    let approx = cm_only_rate(planner.config());
    Ok(StudyReport {
        seed,
        table_replications: planner.settings().replications,
        strategies: summaries,
        planning_objective,
        cm_only_approximation: approx,
        planning_saving_pct: planning_objective.map(|f| 100.0 * (1.0 - f / approx)),
        runs,
    })
}

fn summarize(strategy: Strategy, results: &[LifecycleResult]) -> StrategySummary {
    let n = results.len() as f64;
    let mean = results.iter().map(|r| r.monthly_rate).sum::<f64>() / n;
    let var = if results.len() > 1 {
        results.iter().map(|r| (r.monthly_rate - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let stderr = (var / n).sqrt();
    StrategySummary {
        strategy,
        replications: results.len(),
        mean_rate: mean,
        stderr,
        ci95: (mean - 1.96 * stderr, mean + 1.96 * stderr),
        saving_vs_cm_only_pct: None,
    }
}

impl StudyReport {
    /// Writes `strategy,mean_rate,stderr,ci_low,ci_high,saving_pct`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["strategy", "mean_rate", "stderr", "ci_low", "ci_high", "saving_pct"])?;
        for s in &self.strategies {
            w.write_record([
                s.strategy.label().to_string(),
                s.mean_rate.to_string(),
                s.stderr.to_string(),
                s.ci95.0.to_string(),
                s.ci95.1.to_string(),
                s.saving_vs_cm_only_pct.map(|p| p.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary(&self, strategy: Strategy) -> Option<&StrategySummary> {
        self.strategies.iter().find(|s| s.strategy == strategy)
    }
}
