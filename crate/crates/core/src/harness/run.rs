//! Monte Carlo execution and aggregation.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{pga_solve, random_solve};
use crate::channel::{rng_from_seed, ChannelParams, ChannelRealization};
use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, Method, SweepAxis};
use crate::metrics::{upper_bound, ImpairmentParams};
use crate::optimizer::{solve, SolveReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordStatus {
    Ok,
    Failed,
}

/// One (sweep value, trial, method) outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub sweep_value: f64,
    pub trial_index: usize,
    pub method: Method,
    pub spectral_efficiency: f64,
    /// Absent for the analytic bound.
    pub q1: Option<f64>,
    pub outer_iters: usize,
    /// Largest relative decrease `(q_k − q_{k+1})/(1 + |q_k|)` along the
    /// objective trace; zero for a non-decreasing trace.
    pub max_trace_drop: f64,
    pub wall_time_s: f64,
    pub seed: u64,
    /// Digest of the channel draw; equal across methods of one cell.
    pub realization_digest: String,
    pub status: RecordStatus,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub sweep_axis: SweepAxis,
    pub sweep_value: f64,
    pub method: Method,
    pub mean_se: f64,
    pub stderr_se: f64,
    pub trials_ok: usize,
    pub trials_failed: usize,
    pub mean_outer_iters: f64,
    pub mean_wall_time_s: f64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `base_seed ⊕ hash(sweep_value, trial)`.
pub fn cell_seed(base_seed: u64, sweep_value: f64, trial: usize) -> u64 {
    base_seed ^ splitmix64(splitmix64(sweep_value.to_bits()) ^ trial as u64)
}

/// Channel and impairment parameters at one sweep value.
pub fn point_parameters(cfg: &ExperimentConfig, value: f64) -> Result<(ChannelParams, ImpairmentParams<f64>)> {
    let mut channel = cfg.channel.clone();
    let mut imp = cfg.impairments;
    match cfg.sweep_axis {
        SweepAxis::SnrDb => imp.snr_db = value,
        SweepAxis::Antennas => channel.m = value as usize,
        SweepAxis::Elements => channel.n = value as usize,
        SweepAxis::ImpairmentLevel => {
            imp.rho_b = value * value;
            imp.rho_u = value * value;
        }
    }
    Ok((channel, imp.resolve()?))
}

fn max_trace_drop(trace: &[f64]) -> f64 {
    trace
        .windows(2)
        .map(|w| (w[0] - w[1]) / (1.0 + w[0].abs()))
        .fold(0.0, f64::max)
}

struct Outcome {
    se: f64,
    q1: Option<f64>,
    outer_iters: usize,
    trace_drop: f64,
}

struct Cell {
    sweep_index: usize,
    sweep_value: f64,
    trial: usize,
}

fn failed(cell: &Cell, method: Method, seed: u64, digest: &str, err: String) -> TrialRecord {
    TrialRecord {
        sweep_value: cell.sweep_value,
        trial_index: cell.trial,
        method,
        spectral_efficiency: f64::NAN,
        q1: None,
        outer_iters: 0,
        max_trace_drop: 0.0,
        wall_time_s: 0.0,
        seed,
        realization_digest: digest.to_string(),
        status: RecordStatus::Failed,
        error: Some(err),
    }
}

fn run_method(
    cfg: &ExperimentConfig,
    method: Method,
    real: &ChannelRealization<f64>,
    imp: &ImpairmentParams<f64>,
    seed: u64,
) -> Result<Outcome> {
    let from_report = |r: SolveReport<f64>| Outcome {
        se: r.final_se(),
        q1: Some(r.final_q1()),
        outer_iters: r.outer_iters,
        trace_drop: max_trace_drop(&r.objective_trace),
    };
    match method {
        Method::Proposed => Ok(from_report(solve(real, imp, &cfg.phase_model, &cfg.solver)?)),
        Method::Pga => Ok(from_report(pga_solve(real, imp, &cfg.phase_model, &cfg.pga, &cfg.solver)?)),
        Method::Random => {
            let mut rng = rng_from_seed(splitmix64(seed ^ 0x5241_4e44));
            Ok(from_report(random_solve(real, imp, &cfg.phase_model, &mut rng, cfg.random_restarts)?))
        }
        Method::UpperBound => Ok(Outcome {
            se: upper_bound(real.m(), imp)?,
            q1: None,
            outer_iters: 0,
            trace_drop: 0.0,
        }),
    }
}

fn run_cell(cfg: &ExperimentConfig, cell: &Cell) -> Vec<TrialRecord> {
    let seed = cell_seed(cfg.base_seed, cell.sweep_value, cell.trial);
    let prepared = point_parameters(cfg, cell.sweep_value).and_then(|(mut channel, imp)| {
        channel.seed = seed;
        Ok((channel.realize::<f64>()?, imp))
    });
    let (real, imp) = match prepared {
        Ok(v) => v,
        Err(e) => {
            return cfg
                .methods
                .iter()
                .map(|&m| failed(cell, m, seed, "", e.to_string()))
                .collect()
        }
    };
    let digest = format!("{:016x}", real.digest());
    cfg.methods
        .iter()
        .map(|&method| {
            let start = Instant::now();
            let outcome = run_method(cfg, method, &real, &imp, seed);
            let wall = if cfg.record_wall_time {
                start.elapsed().as_secs_f64()
            } else {
                0.0
            };
            match outcome {
                Ok(o) if o.se.is_finite() && o.se >= 0.0 => TrialRecord {
                    sweep_value: cell.sweep_value,
                    trial_index: cell.trial,
                    method,
                    spectral_efficiency: o.se,
                    q1: o.q1,
                    outer_iters: o.outer_iters,
                    max_trace_drop: o.trace_drop,
                    wall_time_s: wall,
                    seed,
                    realization_digest: digest.clone(),
                    status: RecordStatus::Ok,
                    error: None,
                },
                Ok(o) => failed(cell, method, seed, &digest, format!("invalid spectral efficiency {}", o.se)),
                Err(e) => failed(cell, method, seed, &digest, e.to_string()),
            }
        })
        .collect()
}

/// Runs every (sweep value, trial, method) combination. All methods of a
/// cell share one channel draw. Output is sorted by sweep value, trial and
/// method, independent of scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let cells: Vec<Cell> = cfg
        .sweep_values
        .iter()
        .enumerate()
        .flat_map(|(i, &v)| {
            (0..cfg.trials).map(move |t| Cell {
                sweep_index: i,
                sweep_value: v,
                trial: t,
            })
        })
        .collect();
    let mut keyed: Vec<(usize, usize, TrialRecord)> = cells
        .par_iter()
        .flat_map_iter(|cell| {
            run_cell(cfg, cell)
                .into_iter()
                .map(move |r| (cell.sweep_index, cell.trial, r))
        })
        .collect();
    keyed.sort_by_key(|k| (k.0, k.1, k.2.method));
    Ok(keyed.into_iter().map(|(_, _, r)| r).collect())
}

/// Per (sweep value, method) sample mean and standard error of the spectral
/// efficiency over successful trials, in record order.
pub fn aggregate(axis: SweepAxis, records: &[TrialRecord]) -> Result<Vec<SummaryRow>> {
    if records.is_empty() {
        return Err(Error::Empty("no trial records to aggregate"));
    }
    let mut groups: Vec<((u64, Method), Vec<&TrialRecord>)> = Vec::new();
    for r in records {
        let key = (r.sweep_value.to_bits(), r.method);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(r),
            None => groups.push((key, vec![r])),
        }
    }
    Ok(groups
        .into_iter()
        .map(|((bits, method), members)| {
            let ok: Vec<&TrialRecord> = members.iter().copied().filter(|r| r.status == RecordStatus::Ok).collect();
            let n = ok.len();
            let mean = |f: &dyn Fn(&TrialRecord) -> f64| {
                if n == 0 {
                    f64::NAN
                } else {
                    ok.iter().map(|r| f(r)).sum::<f64>() / n as f64
                }
            };
            let mean_se = mean(&|r| r.spectral_efficiency);
            let stderr_se = match n {
                0 => f64::NAN,
                1 => 0.0,
                _ => {
                    let var = ok.iter().map(|r| (r.spectral_efficiency - mean_se).powi(2)).sum::<f64>() / (n - 1) as f64;
                    (var / n as f64).sqrt()
                }
            };
            SummaryRow {
                sweep_axis: axis,
                sweep_value: f64::from_bits(bits),
                method,
                mean_se,
                stderr_se,
                trials_ok: n,
                trials_failed: members.len() - n,
                mean_outer_iters: mean(&|r| r.outer_iters as f64),
                mean_wall_time_s: mean(&|r| r.wall_time_s),
            }
        })
        .collect())
}
