//! The four experiment commands. Each writes its data files plus a
//! `manifest.json` into the output directory; identical (config, seed)
//! reruns produce byte-identical data files.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::config::RunConfig;
use super::csv::write_csv;
use super::manifest::ManifestBuilder;
use crate::abc::{abc_rejection, AbcConfig, PriorSpec, SampleSet};
use crate::bo::{approx_posterior, bolfi_run, AcquisitionConfig, BolfiConfig, BoTrace};
use crate::discrepancy::delta_theta;
use crate::error::{Error, Result};
use crate::seed::RngSeed;
use crate::sim::{observed_data, DataSet, GaussianMeanSimulator, ParameterPoint};
use crate::stats::normal_cdf;

// Stream ids carved out of the root seed; listed in every manifest.
const STREAM_OBSERVED: u64 = 10;
const STREAM_CURVE: u64 = 20;
const STREAM_DIST: u64 = 21;
const STREAM_ABC: u64 = 22;
const STREAM_BOLFI: u64 = 23;
const STREAM_BASELINE: u64 = 24;

fn ensure_dir(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    Ok(())
}

fn observed(n: usize, root: RngSeed) -> Result<DataSet<f64>> {
    observed_data(n, root.child(STREAM_OBSERVED))
}

fn lambda_of(config: &RunConfig) -> Option<f64> {
    config.lambda
}

/// Discriminability sweep over a θ grid at large n, with the closed-form
/// Bayes accuracy Φ(|θ|/2) alongside.
pub fn cmd_curve(config: &RunConfig, seed: u64, out: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(out)?;
    let root = RngSeed::root(seed);
    let mut manifest = ManifestBuilder::new("curve", seed, config);
    manifest.note_seed(format!("observed data: root.child({STREAM_OBSERVED})").as_str());
    manifest.note_seed(
        format!("θ grid point i: root.child({STREAM_CURVE}).child(i)").as_str(),
    );

    manifest.begin_stage("simulate+classify");
    let sim = GaussianMeanSimulator::new(config.bounds.0, config.bounds.1, config.curve.n)?;
    let obs = observed(config.curve.n, root)?;
    let grid = RunConfig::grid(
        config.curve.theta_min,
        config.curve.theta_max,
        config.curve.theta_step,
    );
    let rows: Result<Vec<Vec<f64>>> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &theta)| {
            let d = delta_theta(
                &ParameterPoint::scalar(theta)?,
                &sim,
                &obs,
                config.curve.n,
                config.n_folds,
                lambda_of(config),
                root.child(STREAM_CURVE).child(i as u64),
            )?;
            Ok(vec![theta, d.value, normal_cdf(theta.abs() / 2.0)])
        })
        .collect();
    let rows = rows?;
    manifest.begin_stage("write");
    let path = out.join("curve.csv");
    write_csv(&path, &["theta", "discriminability", "bayes_accuracy"], &rows)?;
    manifest.record_output(&path)?;
    let mpath = manifest.write(out)?;
    Ok(vec![path, mpath])
}

/// Per-θ distribution of Δθ at small n: mean, sd, and quantile bands over
/// seeded repetitions.
pub fn cmd_dist(config: &RunConfig, seed: u64, out: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(out)?;
    let root = RngSeed::root(seed);
    let mut manifest = ManifestBuilder::new("dist", seed, config);
    manifest.note_seed(format!("observed data: root.child({STREAM_OBSERVED})").as_str());
    manifest.note_seed(
        format!("grid point i, repetition r: root.child({STREAM_DIST}).child(i).child(r)")
            .as_str(),
    );

    manifest.begin_stage("sweep");
    let sim = GaussianMeanSimulator::new(config.bounds.0, config.bounds.1, config.dist.n)?;
    let obs = observed(config.dist.n, root)?;
    let grid = RunConfig::grid(
        config.dist.theta_min,
        config.dist.theta_max,
        config.dist.theta_step,
    );
    let reps = config.dist.repetitions;
    let rows: Result<Vec<Vec<f64>>> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &theta)| {
            let point = ParameterPoint::scalar(theta)?;
            let draws: Result<Vec<f64>> = (0..reps)
                .into_par_iter()
                .map(|r| {
                    Ok(delta_theta(
                        &point,
                        &sim,
                        &obs,
                        config.dist.n,
                        config.n_folds,
                        lambda_of(config),
                        root.child(STREAM_DIST).child(i as u64).child(r as u64),
                    )?
                    .value)
                })
                .collect();
            let draws = draws?;
            let q = |p: f64| crate::stats::quantile(&draws, p);
            Ok(vec![
                theta,
                crate::stats::mean(&draws),
                crate::stats::std_dev(&draws),
                q(0.05),
                q(0.25),
                q(0.50),
                q(0.75),
                q(0.95),
            ])
        })
        .collect();
    let rows = rows?;
    manifest.begin_stage("write");
    let path = out.join("dist.csv");
    write_csv(
        &path,
        &["theta", "mean", "sd", "q05", "q25", "q50", "q75", "q95"],
        &rows,
    )?;
    manifest.record_output(&path)?;
    let mpath = manifest.write(out)?;
    Ok(vec![path, mpath])
}

#[derive(Debug, Serialize)]
struct AbcDiagnostics {
    status: String,
    requested: usize,
    accepted: usize,
    proposals_used: usize,
    acceptance_rate: f64,
}

fn write_abc_outputs(
    out: &Path,
    manifest: &mut ManifestBuilder,
    set: &SampleSet<f64>,
    requested: usize,
    status: &str,
) -> Result<Vec<PathBuf>> {
    let rows: Vec<Vec<f64>> = set
        .accepted
        .iter()
        .enumerate()
        .map(|(i, s)| {
            vec![
                i as f64,
                s.proposal_index as f64,
                s.theta.as_scalar(),
                s.delta,
            ]
        })
        .collect();
    let samples = out.join("samples.csv");
    write_csv(&samples, &["index", "proposal_index", "theta", "delta"], &rows)?;
    let diag = AbcDiagnostics {
        status: status.into(),
        requested,
        accepted: set.accepted.len(),
        proposals_used: set.proposals_used,
        acceptance_rate: set.acceptance_rate,
    };
    let diag_path = out.join("diagnostics.json");
    std::fs::write(&diag_path, serde_json::to_string_pretty(&diag).unwrap())?;
    manifest.record_output(&samples)?;
    manifest.record_output(&diag_path)?;
    Ok(vec![samples, diag_path])
}

/// Rejection ABC with the classifier discrepancy.
pub fn cmd_abc(config: &RunConfig, seed: u64, out: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(out)?;
    let root = RngSeed::root(seed);
    let mut manifest = ManifestBuilder::new("abc", seed, config);
    manifest.note_seed(format!("observed data: root.child({STREAM_OBSERVED})").as_str());
    manifest.note_seed(
        format!(
            "proposal i: root.child({STREAM_ABC}).child(1).child(i); its Δ evaluation: root.child({STREAM_ABC}).child(2).child(i)"
        )
        .as_str(),
    );

    manifest.begin_stage("rejection");
    let sim = GaussianMeanSimulator::new(config.bounds.0, config.bounds.1, config.abc.n)?;
    let obs = observed(config.abc.n, root)?;
    let prior = PriorSpec::uniform(vec![config.bounds])?;
    let abc_config = AbcConfig {
        n_accept: config.abc.n_accept,
        epsilon: config.abc.epsilon,
        max_proposals: config.abc.max_proposals,
        n: config.abc.n,
        n_folds: config.n_folds,
        seed: root.child(STREAM_ABC),
    };

    match abc_rejection(&prior, &abc_config, &sim, &obs) {
        Ok(set) => {
            manifest.begin_stage("write");
            let mut paths =
                write_abc_outputs(out, &mut manifest, &set, config.abc.n_accept, "complete")?;
            paths.push(manifest.write(out)?);
            Ok(paths)
        }
        Err((err, partial)) => {
            manifest.begin_stage("write");
            write_abc_outputs(
                out,
                &mut manifest,
                &partial,
                config.abc.n_accept,
                "budget_exhausted",
            )?;
            manifest.write(out)?;
            Err(err)
        }
    }
}

#[derive(Debug, Serialize)]
struct BudgetReport {
    bo_evaluations: usize,
    bo_posterior_mode: f64,
    bo_mode_within_half: bool,
    abc_requested: usize,
    abc_accepted: usize,
    abc_proposals_used: usize,
    abc_posterior_mode: f64,
    abc_mode_within_half: bool,
    /// rejection-ABC proposals per BO evaluation
    simulation_ratio: f64,
}

fn histogram_mode(samples: &[f64], bounds: (f64, f64), bins: usize) -> f64 {
    let width = (bounds.1 - bounds.0) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &s in samples {
        let b = (((s - bounds.0) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let best = counts
        .iter()
        .enumerate()
        .max_by_key(|&(i, &c)| (c, std::cmp::Reverse(i)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    bounds.0 + width * (best as f64 + 0.5)
}

fn write_trace_outputs(
    out: &Path,
    manifest: &mut ManifestBuilder,
    trace: &BoTrace<f64>,
) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    let rows: Vec<Vec<f64>> = trace
        .steps
        .iter()
        .map(|s| {
            vec![
                s.k as f64,
                s.theta.as_scalar(),
                s.delta,
                s.incumbent.as_scalar(),
                s.incumbent_mean,
                s.hyper.signal_variance,
                s.hyper.lengthscales[0],
                s.hyper.noise_variance,
                s.hyper.prior_mean,
            ]
        })
        .collect();
    let trace_path = out.join("trace.csv");
    write_csv(
        &trace_path,
        &[
            "k",
            "theta",
            "delta",
            "incumbent",
            "incumbent_mean",
            "signal_variance",
            "lengthscale",
            "noise_variance",
            "prior_mean",
        ],
        &rows,
    )?;
    manifest.record_output(&trace_path)?;
    paths.push(trace_path);

    for step in &trace.steps {
        let rows: Vec<Vec<f64>> = trace
            .grid
            .iter()
            .zip(step.post_mean.iter().zip(&step.post_var))
            .map(|(g, (&m, &v))| vec![g.as_scalar(), m, v])
            .collect();
        let path = out.join(format!("snapshot_step_{:02}.csv", step.k));
        write_csv(&path, &["theta", "post_mean", "post_var"], &rows)?;
        manifest.record_output(&path)?;
        paths.push(path);
    }
    Ok(paths)
}

/// GP-surrogate acquisition run: per-step surrogate snapshots, the
/// approximate posterior, and (optionally) the simulation-budget comparison
/// against a matched rejection-ABC baseline.
pub fn cmd_bolfi(config: &RunConfig, seed: u64, out: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(out)?;
    let root = RngSeed::root(seed);
    let mut manifest = ManifestBuilder::new("bolfi", seed, config);
    manifest.note_seed(format!("observed data: root.child({STREAM_OBSERVED})").as_str());
    manifest.note_seed(
        format!(
            "initial design: root.child({STREAM_BOLFI}).child(0); evaluation k: root.child({STREAM_BOLFI}).child(1).child(k); acquisition k: root.child({STREAM_BOLFI}).child(2).child(k)"
        )
        .as_str(),
    );

    manifest.begin_stage("acquisition-loop");
    let section = &config.bolfi;
    let sim = GaussianMeanSimulator::new(config.bounds.0, config.bounds.1, section.n)?;
    let obs = observed(section.n, root)?;
    let bounds = [config.bounds];
    let bolfi_config = BolfiConfig {
        n: section.n,
        n_folds: config.n_folds,
        total_acquisitions: section.total_acquisitions,
        acquisition: AcquisitionConfig {
            candidate_grid_size: section.candidate_grid_size,
            jitter_count: section.jitter_count,
            initial_design_size: section.initial_design_size,
            hyperopt_from: section.hyperopt_from,
        },
        trace_grid_size: section.trace_grid_size,
        seed: root.child(STREAM_BOLFI),
    };
    let trace = match bolfi_run(&sim, &obs, &bounds, &bolfi_config) {
        Ok(t) => t,
        Err((err, partial)) => {
            if !partial.steps.is_empty() {
                manifest.begin_stage("write-partial");
                write_trace_outputs(out, &mut manifest, &partial)?;
                manifest.write(out)?;
            }
            return Err(err);
        }
    };

    manifest.begin_stage("posterior");
    let model = trace
        .model_after(trace.steps.len())
        .expect("final refit matches the recorded fit");
    let prior = PriorSpec::uniform(vec![config.bounds])?;
    let posterior = approx_posterior(&model, &prior, &trace.grid, None)?;

    manifest.begin_stage("write");
    let mut paths = write_trace_outputs(out, &mut manifest, &trace)?;
    let rows: Vec<Vec<f64>> = posterior
        .grid
        .iter()
        .zip(posterior.unnormalized.iter().zip(&posterior.normalized))
        .map(|(g, (&u, &p))| vec![g.as_scalar(), u, p])
        .collect();
    let post_path = out.join("posterior.csv");
    write_csv(&post_path, &["theta", "unnormalized", "normalized"], &rows)?;
    manifest.record_output(&post_path)?;
    paths.push(post_path);

    if section.budget_report {
        manifest.begin_stage("abc-baseline");
        let abc_config = AbcConfig {
            n_accept: section.baseline_n_accept,
            epsilon: section.baseline_epsilon,
            max_proposals: section.baseline_max_proposals,
            n: section.n,
            n_folds: config.n_folds,
            seed: root.child(STREAM_BASELINE),
        };
        // a budget-exhausted baseline still yields a comparable report
        let baseline = match abc_rejection(&prior, &abc_config, &sim, &obs) {
            Ok(set) => set,
            Err((_, partial)) => partial,
        };
        let bo_mode = posterior
            .grid
            .iter()
            .zip(&posterior.normalized)
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(g, _)| g.as_scalar())
            .unwrap_or(f64::NAN);
        let abc_thetas: Vec<f64> = baseline.accepted.iter().map(|s| s.theta.as_scalar()).collect();
        let abc_mode = if abc_thetas.is_empty() {
            f64::NAN
        } else {
            histogram_mode(&abc_thetas, config.bounds, 80)
        };
        let report = BudgetReport {
            bo_evaluations: trace.steps.len(),
            bo_posterior_mode: bo_mode,
            bo_mode_within_half: bo_mode.abs() <= 0.5,
            abc_requested: section.baseline_n_accept,
            abc_accepted: baseline.accepted.len(),
            abc_proposals_used: baseline.proposals_used,
            abc_posterior_mode: abc_mode,
            abc_mode_within_half: abc_mode.abs() <= 0.5,
            simulation_ratio: baseline.proposals_used as f64 / trace.steps.len() as f64,
        };
        let report_path = out.join("budget_report.json");
        std::fs::write(&report_path, serde_json::to_string_pretty(&report).unwrap())?;
        manifest.record_output(&report_path)?;
        paths.push(report_path);
    }

    paths.push(manifest.write(out)?);
    Ok(paths)
}

/// Stable process exit code for an error, per the CLI contract:
/// 2 config, 3 budget exhaustion, 4 numerical failure, 1 everything else.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidConfig(_)
        | Error::DimensionMismatch { .. }
        | Error::SampleTooSmall { .. } => 2,
        Error::BudgetExhausted { .. } => 3,
        Error::NonFinite(_)
        | Error::SingularCovariance
        | Error::FactorizationFailed { .. } => 4,
        Error::Io(_) => 1,
    }
}
