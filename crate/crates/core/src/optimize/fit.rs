use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cobyla_minimize, OptimizerOptions};
use crate::error::{domain, Error, Result};
use crate::objective::{evaluate, LossReport, TargetDistribution, DEFAULT_KL_WEIGHT};
use crate::walk::{MultiSsqwConfig, ParamVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitSettings {
    pub restarts: usize,
    pub seed: u64,
    pub optimizer: OptimizerOptions,
    pub kl_weight: f64,
}

impl FitSettings {
    pub fn new(restarts: usize, seed: u64) -> Self {
        FitSettings {
            restarts,
            seed,
            optimizer: OptimizerOptions::default(),
            kl_weight: DEFAULT_KL_WEIGHT,
        }
    }
}

/// A restart that ended in an error and was left out of the statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedRestart {
    pub index: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Parameters of the best restart, angles in `[0, 2π)`.
    pub best_params: ParamVector,
    pub best_loss: LossReport,
    pub best_restart: usize,
    /// Final combined loss of every successful restart, in restart order.
    pub restart_final_losses: Vec<f64>,
    /// Best-so-far combined loss after each evaluation of the best restart.
    pub best_trace: Vec<f64>,
    pub evaluations: Vec<usize>,
    #[serde(skip)]
    pub restart_wall_times: Vec<Duration>,
    pub failed_restarts: Vec<FailedRestart>,
    pub seed: u64,
}

struct RestartOutcome {
    params: ParamVector,
    loss: LossReport,
    trace: Vec<f64>,
    evaluations: usize,
    wall: Duration,
}

/// Starting point for restart `index`: uniform angles from a per-restart
/// stream of the master seed, so results do not depend on scheduling.
pub(crate) fn initial_point(seed: u64, index: usize, dim: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    (0..dim).map(|_| rng.gen_range(0.0..TAU)).collect()
}

fn run_restart(
    config: &MultiSsqwConfig,
    target: &TargetDistribution,
    settings: &FitSettings,
    index: usize,
) -> Result<RestartOutcome> {
    let start = Instant::now();
    let x0 = initial_point(settings.seed, index, config.num_params());
    let mut failure: Option<Error> = None;
    let objective =
        |x: &[f64]| match evaluate(&ParamVector(x.to_vec()), config, target, settings.kl_weight) {
            Ok(r) => r.combined,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        };
    let outcome = cobyla_minimize(objective, &x0, &settings.optimizer);
    if let Some(e) = failure {
        return Err(e);
    }
    let outcome = outcome?;
    let params = ParamVector(outcome.x).canonical();
    let loss = evaluate(&params, config, target, settings.kl_weight)?;
    Ok(RestartOutcome {
        params,
        loss,
        trace: outcome.trace,
        evaluations: outcome.evaluations,
        wall: start.elapsed(),
    })
}

/// Fits the circuit parameters to `target` from `settings.restarts` random
/// starts and keeps the best. Restarts run on the current rayon pool.
pub fn fit(
    config: &MultiSsqwConfig,
    target: &TargetDistribution,
    settings: &FitSettings,
) -> Result<FitResult> {
    config.validate()?;
    target.validate()?;
    if settings.restarts == 0 {
        return Err(domain("restarts must be at least 1"));
    }
    if !(settings.kl_weight >= 0.0 && settings.kl_weight.is_finite()) {
        return Err(domain(format!("invalid KL weight {}", settings.kl_weight)));
    }
    settings.optimizer.validate(config.num_params())?;
    if target.num_bins() != config.num_positions() {
        return Err(domain(format!(
            "target has {} bins but the register has {} positions",
            target.num_bins(),
            config.num_positions()
        )));
    }
    config.unreachable_mass(&target.probs);

    let outcomes: Vec<Result<RestartOutcome>> = (0..settings.restarts)
        .into_par_iter()
        .map(|i| run_restart(config, target, settings, i))
        .collect();

    let mut best: Option<(usize, RestartOutcome)> = None;
    let mut restart_final_losses = Vec::with_capacity(settings.restarts);
    let mut evaluations = Vec::with_capacity(settings.restarts);
    let mut restart_wall_times = Vec::with_capacity(settings.restarts);
    let mut failed_restarts = Vec::new();
    for (index, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(o) => {
                restart_final_losses.push(o.loss.combined);
                evaluations.push(o.evaluations);
                restart_wall_times.push(o.wall);
                if best
                    .as_ref()
                    .map_or(true, |(_, b)| o.loss.combined < b.loss.combined)
                {
                    best = Some((index, o));
                }
            }
            Err(e) => {
                log::warn!("restart {index} failed: {e}");
                failed_restarts.push(FailedRestart {
                    index,
                    message: e.to_string(),
                });
            }
        }
    }
    let Some((best_restart, b)) = best else {
        return Err(domain(format!(
            "all {} restarts failed; first error: {}",
            settings.restarts, failed_restarts[0].message
        )));
    };
    Ok(FitResult {
        best_params: b.params,
        best_loss: b.loss,
        best_restart,
        restart_final_losses,
        best_trace: b.trace,
        evaluations,
        restart_wall_times,
        failed_restarts,
        seed: settings.seed,
    })
}
