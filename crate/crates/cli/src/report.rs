//! Machine-readable reports emitted by the protocols.

use serde::{Deserialize, Serialize};
use stmf_core::metrics::{median, MetricsReport};
use stmf_core::stmf::Termination;

use crate::config::ExperimentConfig;

pub const SCHEMA_VERSION: u32 = 1;

/// Shape echo of the evaluated input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputDescriptor {
    pub path: String,
    pub rows: usize,
    pub cols: usize,
    pub given_entries: usize,
}

/// One repetition: a fresh mask split, one fit, one evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepetitionReport {
    pub repetition: usize,
    #[serde(flatten)]
    pub metrics: MetricsReport,
    /// Objective at the fitted model: the b-norm for stmf, the masked
    /// squared error for nmf.
    pub final_objective: f64,
    pub iterations_run: Option<usize>,
    pub terminated_by: Option<Termination>,
}

/// Cross-repetition aggregates, recomputable from the repetition list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunAggregate {
    pub dcor_min: f64,
    pub dcor_median: f64,
    pub dcor_max: f64,
    pub train_rmse_median: f64,
    pub test_rmse_median: f64,
    pub runtime_seconds_total: f64,
}

impl RunAggregate {
    pub fn from_repetitions(reps: &[RepetitionReport]) -> Self {
        let dcors: Vec<f64> = reps.iter().map(|r| r.metrics.dcor).collect();
        let train: Vec<f64> = reps.iter().map(|r| r.metrics.train_rmse).collect();
        let test: Vec<f64> = reps.iter().map(|r| r.metrics.test_rmse).collect();
        RunAggregate {
            dcor_min: dcors.iter().copied().fold(f64::INFINITY, f64::min),
            dcor_median: median(&dcors),
            dcor_max: dcors.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            train_rmse_median: median(&train),
            test_rmse_median: median(&test),
            runtime_seconds_total: reps.iter().map(|r| r.metrics.runtime_seconds).sum(),
        }
    }
}

/// Full output of the `run` protocol.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub input: InputDescriptor,
    pub repetitions: Vec<RepetitionReport>,
    pub aggregate: RunAggregate,
}

impl RunReport {
    /// Per-repetition table for external plotting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "repetition,train_rmse,test_rmse,dcor,pearson_mean,spearman_mean,final_objective,runtime_seconds\n",
        );
        for rep in &self.repetitions {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                rep.repetition,
                rep.metrics.train_rmse,
                rep.metrics.test_rmse,
                rep.metrics.dcor,
                rep.metrics.pearson_rows.mean,
                rep.metrics.spearman_rows.mean,
                rep.final_objective,
                rep.metrics.runtime_seconds,
            ));
        }
        out
    }
}

/// One rank's row in a sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepEntry {
    pub rank: usize,
    pub train_rmse_median: f64,
    pub test_rmse_median: f64,
    pub dcor_median: f64,
    pub runtime_seconds_total: f64,
}

/// Output of the rank sweep: per-rank training errors and the selected rank
/// (argmin of median training error, ties to the smaller rank).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub input: InputDescriptor,
    pub ranks: Vec<SweepEntry>,
    pub selected_rank: usize,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("rank,train_rmse_median,test_rmse_median,dcor_median,selected\n");
        for entry in &self.ranks {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                entry.rank,
                entry.train_rmse_median,
                entry.test_rmse_median,
                entry.dcor_median,
                entry.rank == self.selected_rank,
            ));
        }
        out
    }
}

/// One ordering strategy's distance-correlation samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderingEntry {
    pub strategy: String,
    pub dcor_samples: Vec<f64>,
    pub dcor_median: f64,
}

/// Output of the ordering study: one sample group per strategy, common mask
/// splits across strategies.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderingReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub input: InputDescriptor,
    pub strategies: Vec<OrderingEntry>,
}

impl OrderingReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("strategy,repetition,dcor\n");
        for entry in &self.strategies {
            for (rep, d) in entry.dcor_samples.iter().enumerate() {
                out.push_str(&format!("{},{},{}\n", entry.strategy, rep, d));
            }
        }
        out
    }
}
