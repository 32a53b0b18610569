//! Protocol orchestration: masked repetitions, rank sweeps, ordering study,
//! preprocessing pipeline.

use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use stmf_core::datagen::{log_transform, mask_split, feature_agglomeration};
use stmf_core::matrix::{Matrix, MaskedMatrix};
use stmf_core::metrics::{
    distance_correlation, rmse, row_correlations, CorrelationKind, MetricsReport,
    RowCorrelationSummary,
};
use stmf_core::nmf::{masked_squared_error, nmf_fit, nmf_predict};
use stmf_core::seeding::derive_seed;
use stmf_core::stmf::{fit, predict, FitConfig, OrderingStrategy};

use crate::config::{DcorScope, ExperimentConfig, Method};
use crate::report::{
    InputDescriptor, OrderingEntry, OrderingReport, RepetitionReport, RunAggregate, RunReport,
    SweepEntry, SweepReport, SCHEMA_VERSION,
};

// Disjoint seed streams per repetition: the mask split must not change when
// the method or its initialization does.
const MASK_STREAM: u64 = 0x4d41_534b;
const MODEL_STREAM: u64 = 0x494e_4954;

/// Runs the full repetition protocol on a fully-given input matrix.
pub fn run_experiment(
    input: &MaskedMatrix,
    input_desc: InputDescriptor,
    config: &ExperimentConfig,
) -> Result<RunReport> {
    config.validate().map_err(|msg| anyhow!(msg))?;
    if !input.is_fully_given() {
        bail!(
            "the evaluation protocol needs a fully given input matrix (ground truth at held-out \
             entries); this one has {} missing entries",
            input.rows() * input.cols() - input.given_count()
        );
    }

    let repetitions: Result<Vec<RepetitionReport>> = (0..config.repetitions)
        .into_par_iter()
        .map(|rep| run_repetition(input, config, rep))
        .collect();
    let repetitions = repetitions?;
    let aggregate = RunAggregate::from_repetitions(&repetitions);
    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        input: input_desc,
        repetitions,
        aggregate,
    })
}

fn run_repetition(
    input: &MaskedMatrix,
    config: &ExperimentConfig,
    rep: usize,
) -> Result<RepetitionReport> {
    let rep_seed = config.seed.wrapping_add(rep as u64);
    let mask_seed = derive_seed(rep_seed, MASK_STREAM);
    let model_seed = derive_seed(rep_seed, MODEL_STREAM);

    let split = mask_split(input, config.mask_fraction, mask_seed)
        .with_context(|| format!("mask split failed in repetition {rep}"))?;
    let train = input
        .with_mask(split.train_mask.clone())
        .with_context(|| format!("train restriction failed in repetition {rep}"))?;

    let started = Instant::now();
    let (prediction, final_objective, iterations_run, terminated_by) = match config.method {
        Method::Stmf => {
            let fit_config = FitConfig {
                rank: config.rank,
                max_outer_iterations: config.max_iterations,
                tolerance: config.tolerance,
                ordering: config.ordering,
                subset_size: config.subset_size,
                seed: model_seed,
            };
            let (factorization, trace) = fit(&train, &fit_config)
                .with_context(|| format!("stmf fit failed in repetition {rep}"))?;
            (
                predict(&factorization),
                trace.final_objective(),
                Some(trace.iterations_run),
                Some(trace.terminated_by),
            )
        }
        Method::Nmf => {
            let init = config
                .init
                .as_nmf_init()
                .expect("validated: nmf init is nndsvd or random");
            let factorization =
                nmf_fit(&train, config.rank, config.max_iterations, model_seed, init)
                    .with_context(|| format!("nmf fit failed in repetition {rep}"))?;
            let objective = masked_squared_error(&train, factorization.w(), factorization.h());
            (nmf_predict(&factorization), objective, None, None)
        }
    };
    let runtime_seconds = started.elapsed().as_secs_f64();

    let original = input.values();
    let train_rmse = rmse(original, &prediction, &split.train_mask)?;
    let test_rmse = rmse(original, &prediction, &split.test_mask)?;
    let dcor = match config.dcor_scope {
        DcorScope::Full => distance_correlation(original, &prediction)?,
        DcorScope::Test => {
            let held_out = split.test_mask.true_entries();
            let n = held_out.len();
            let mut x = Matrix::zeros(n, 1);
            let mut y = Matrix::zeros(n, 1);
            for (row, &(i, j)) in held_out.iter().enumerate() {
                x.set(row, 0, original.get(i, j));
                y.set(row, 0, prediction.get(i, j));
            }
            distance_correlation(&x, &y)?
        }
    };
    let pearson =
        RowCorrelationSummary::from_rows(&row_correlations(original, &prediction, CorrelationKind::Pearson)?);
    let spearman = RowCorrelationSummary::from_rows(&row_correlations(
        original,
        &prediction,
        CorrelationKind::Spearman,
    )?);

    Ok(RepetitionReport {
        repetition: rep,
        metrics: MetricsReport {
            train_rmse,
            test_rmse,
            dcor,
            pearson_rows: pearson,
            spearman_rows: spearman,
            silhouette: None,
            runtime_seconds,
        },
        final_objective,
        iterations_run,
        terminated_by,
    })
}

/// Runs the protocol once per rank and selects the rank with the smallest
/// median training error (ties to the smaller rank).
pub fn sweep(
    input: &MaskedMatrix,
    input_desc: InputDescriptor,
    config: &ExperimentConfig,
    ranks: &[usize],
) -> Result<SweepReport> {
    if ranks.is_empty() {
        bail!("sweep needs at least one rank");
    }
    let mut entries = Vec::with_capacity(ranks.len());
    for &rank in ranks {
        let run_config = ExperimentConfig {
            rank,
            ..config.clone()
        };
        let report = run_experiment(input, input_desc.clone(), &run_config)?;
        entries.push(SweepEntry {
            rank,
            train_rmse_median: report.aggregate.train_rmse_median,
            test_rmse_median: report.aggregate.test_rmse_median,
            dcor_median: report.aggregate.dcor_median,
            runtime_seconds_total: report.aggregate.runtime_seconds_total,
        });
    }
    let selected_rank = entries
        .iter()
        .map(|e| (e.train_rmse_median, e.rank))
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)))
        .expect("non-empty")
        .1;
    Ok(SweepReport {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        input: input_desc,
        ranks: entries,
        selected_rank,
    })
}

/// Repeats the protocol per ordering strategy with common seeds, so every
/// strategy sees identical mask splits.
pub fn ordering_study(
    input: &MaskedMatrix,
    input_desc: InputDescriptor,
    config: &ExperimentConfig,
    strategies: &[OrderingStrategy],
) -> Result<OrderingReport> {
    if strategies.is_empty() {
        bail!("ordering study needs at least one strategy");
    }
    if config.method != Method::Stmf {
        bail!("the ordering study applies to stmf only");
    }
    let mut entries = Vec::with_capacity(strategies.len());
    for &strategy in strategies {
        let run_config = ExperimentConfig {
            ordering: strategy,
            ..config.clone()
        };
        let report = run_experiment(input, input_desc.clone(), &run_config)?;
        let samples: Vec<f64> = report.repetitions.iter().map(|r| r.metrics.dcor).collect();
        entries.push(OrderingEntry {
            strategy: strategy.name().to_string(),
            dcor_median: report.aggregate.dcor_median,
            dcor_samples: samples,
        });
    }
    Ok(OrderingReport {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        input: input_desc,
        strategies: entries,
    })
}

/// Preprocessing chain: log2(x+1) first when requested, then Ward feature
/// agglomeration. Returns the matrix and, when agglomeration ran, the
/// per-column cluster assignment.
pub fn preprocess(
    input: &MaskedMatrix,
    log2: bool,
    agglomerate: Option<usize>,
) -> Result<(MaskedMatrix, Option<Vec<usize>>)> {
    let mut current = input.clone();
    if log2 {
        current = log_transform(&current).context("log transform failed")?;
    }
    let mut assignment = None;
    if let Some(n_clusters) = agglomerate {
        if !current.is_fully_given() {
            bail!("feature agglomeration needs a fully given matrix (preprocessing precedes masking)");
        }
        let (reduced, labels) = feature_agglomeration(current.values(), n_clusters)
            .context("feature agglomeration failed")?;
        current = MaskedMatrix::fully_given(reduced)?;
        assignment = Some(labels);
    }
    Ok((current, assignment))
}
