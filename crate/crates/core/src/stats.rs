//! Monte Carlo verification harness.
//!
//! Trial `j` of a run with seed `s` is driven by `RngStream::new(s, j)` and a
//! fresh coin source, so a summary depends only on the configuration, the
//! seed and `n`. Trials are grouped in fixed-size chunks that are merged in
//! index order, independent of the worker count.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::coins::{CoinEnsemble, CoinSource};
use crate::factories::{Budget, Constants, Factory, FactoryError, InvocationStats};
use crate::oracle::{Experiment, OracleError};
use crate::rng::RngStream;

const CHUNK: u64 = 4096;

/// Default acceptance threshold in standard errors.
pub const DEFAULT_Z_THRESHOLD: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Aggregate of `n` independent factory invocations.
///
/// Aborted trials count toward `n` and `aborted_count` only.
#[derive(Debug, Clone, Serialize)]
pub struct TrialSummary {
    pub n: u64,
    pub heads: u64,
    pub flip_total_sum: u64,
    pub flip_total_sum_sq: u128,
    pub per_coin_flip_sums: Vec<u64>,
    pub recursion_call_sum: u64,
    pub recursion_call_sum_sq: u128,
    pub max_flips_seen: u64,
    pub max_depth_seen: u32,
    pub aborted_count: u64,
    /// Lowest trial index that aborted, for replay.
    pub first_aborted_trial: Option<u64>,
    pub seed: u64,
    pub elapsed_s: f64,
}

/// Wall-clock time is the only field that may differ between reruns.
impl PartialEq for TrialSummary {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.heads == other.heads
            && self.flip_total_sum == other.flip_total_sum
            && self.flip_total_sum_sq == other.flip_total_sum_sq
            && self.per_coin_flip_sums == other.per_coin_flip_sums
            && self.recursion_call_sum == other.recursion_call_sum
            && self.recursion_call_sum_sq == other.recursion_call_sum_sq
            && self.max_flips_seen == other.max_flips_seen
            && self.max_depth_seen == other.max_depth_seen
            && self.aborted_count == other.aborted_count
            && self.first_aborted_trial == other.first_aborted_trial
            && self.seed == other.seed
    }
}

impl TrialSummary {
    fn empty(k: usize, seed: u64) -> Self {
        Self {
            n: 0,
            heads: 0,
            flip_total_sum: 0,
            flip_total_sum_sq: 0,
            per_coin_flip_sums: vec![0; k],
            recursion_call_sum: 0,
            recursion_call_sum_sq: 0,
            max_flips_seen: 0,
            max_depth_seen: 0,
            aborted_count: 0,
            first_aborted_trial: None,
            seed,
            elapsed_s: 0.0,
        }
    }

    fn merge(&mut self, other: &TrialSummary) {
        self.n += other.n;
        self.heads += other.heads;
        self.flip_total_sum += other.flip_total_sum;
        self.flip_total_sum_sq += other.flip_total_sum_sq;
        for (a, b) in self.per_coin_flip_sums.iter_mut().zip(&other.per_coin_flip_sums) {
            *a += b;
        }
        self.recursion_call_sum += other.recursion_call_sum;
        self.recursion_call_sum_sq += other.recursion_call_sum_sq;
        self.max_flips_seen = self.max_flips_seen.max(other.max_flips_seen);
        self.max_depth_seen = self.max_depth_seen.max(other.max_depth_seen);
        self.aborted_count += other.aborted_count;
        self.first_aborted_trial = match (self.first_aborted_trial, other.first_aborted_trial) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
    }

    pub fn completed(&self) -> u64 {
        self.n - self.aborted_count
    }

    pub fn p_hat(&self) -> f64 {
        self.heads as f64 / self.completed() as f64
    }

    pub fn flip_mean(&self) -> f64 {
        self.flip_total_sum as f64 / self.completed() as f64
    }

    /// Unbiased sample variance of per-trial flip totals.
    pub fn flip_variance(&self) -> f64 {
        sample_variance(self.completed(), self.flip_total_sum, self.flip_total_sum_sq)
    }

    /// Standard error of [`TrialSummary::flip_mean`].
    pub fn flip_standard_error(&self) -> f64 {
        (self.flip_variance() / self.completed() as f64).sqrt()
    }

    pub fn mean_recursion(&self) -> f64 {
        self.recursion_call_sum as f64 / self.completed() as f64
    }

    /// Standard error of [`TrialSummary::mean_recursion`].
    pub fn recursion_standard_error(&self) -> f64 {
        let n = self.completed();
        (sample_variance(n, self.recursion_call_sum, self.recursion_call_sum_sq) / n as f64).sqrt()
    }
}

/// Exact-integer sample variance from a count, sum and sum of squares.
fn sample_variance(n: u64, sum: u64, sum_sq: u128) -> f64 {
    let n = n as u128;
    if n < 2 {
        return 0.0;
    }
    let sum = sum as u128;
    (n * sum_sq - sum * sum) as f64 / (n * (n - 1)) as f64
}

/// Result of a single trial: the output bit and the factory's stats, or the
/// error that aborted it.
pub type TrialOutcome = Result<(bool, InvocationStats), FactoryError>;

/// Runs `n` trials of `trial` on fresh sources from `make_source`, on
/// `workers` threads.
pub fn run_trials_with<S, M, F>(
    n: u64,
    seed: u64,
    workers: usize,
    make_source: M,
    trial: F,
) -> TrialSummary
where
    S: CoinSource,
    M: Fn() -> S + Sync,
    F: Fn(&mut S, &mut RngStream) -> TrialOutcome + Sync,
{
    let started = Instant::now();
    let k = make_source().len();
    let chunks = n.div_ceil(CHUNK);
    let run_chunk = |chunk: u64| {
        let mut part = TrialSummary::empty(k, seed);
        for j in chunk * CHUNK..((chunk + 1) * CHUNK).min(n) {
            let mut source = make_source();
            let mut stream = RngStream::new(seed, j);
            part.n += 1;
            match trial(&mut source, &mut stream) {
                Ok((heads, stats)) => {
                    let ledger = source.ledger();
                    let total = ledger.total();
                    part.heads += heads as u64;
                    part.flip_total_sum += total;
                    part.flip_total_sum_sq += (total as u128) * (total as u128);
                    for (a, b) in part.per_coin_flip_sums.iter_mut().zip(ledger.per_coin()) {
                        *a += b;
                    }
                    part.recursion_call_sum += stats.recursion_calls;
                    part.recursion_call_sum_sq +=
                        (stats.recursion_calls as u128) * (stats.recursion_calls as u128);
                    part.max_flips_seen = part.max_flips_seen.max(total);
                    part.max_depth_seen = part.max_depth_seen.max(stats.max_depth);
                }
                Err(_) => {
                    part.aborted_count += 1;
                    part.first_aborted_trial.get_or_insert(j);
                }
            }
        }
        part
    };

    let parts: Vec<TrialSummary> = if workers <= 1 {
        (0..chunks).map(run_chunk).collect()
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            Ok(pool) => pool.install(|| (0..chunks).into_par_iter().map(run_chunk).collect()),
            Err(_) => (0..chunks).map(run_chunk).collect(),
        }
    };

    let mut summary = TrialSummary::empty(k, seed);
    for part in &parts {
        summary.merge(part);
    }
    summary.elapsed_s = started.elapsed().as_secs_f64();
    summary
}

/// Runs `n` trials of the configured factory on simulated coins.
///
/// Rejects configurations whose preconditions fail before sampling.
pub fn run_trials(
    experiment: &Experiment,
    n: u64,
    seed: u64,
    workers: usize,
    budget: Budget,
) -> Result<TrialSummary, StatsError> {
    if n == 0 {
        return Err(StatsError::InvalidInput("trial count must be positive".into()));
    }
    experiment.validate()?;
    let constants = Constants::new(&experiment.constants)
        .map_err(|e| StatsError::InvalidInput(e.to_string()))?;
    let coins = CoinEnsemble::new(experiment.biases.clone())
        .map_err(|e| StatsError::InvalidInput(e.to_string()))?;
    let kind = experiment.kind;
    Ok(run_trials_with(
        n,
        seed,
        workers,
        || coins.clone(),
        |source, stream| {
            let mut factory = Factory::new(source, stream).with_budget(budget);
            let heads = kind.sample(&mut factory, &constants)?;
            Ok((heads, factory.into_stats()))
        },
    ))
}

/// Wilson score interval for `heads` successes in `n` trials at `z`
/// standard normal units.
pub fn wilson_interval(heads: u64, n: u64, z: f64) -> (f64, f64) {
    let n_f = n as f64;
    let p = heads as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let center = (p + z2 / (2.0 * n_f)) / denom;
    let half = z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    let lo = if heads == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if heads == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// One-sample z statistic for a proportion against `p0` in (0, 1).
pub fn proportion_z(p_hat: f64, p0: f64, n: u64) -> Result<f64, StatsError> {
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(StatsError::InvalidInput(format!(
            "p0 = {p0} must lie strictly inside (0, 1); check 0/1 targets exactly"
        )));
    }
    if n == 0 {
        return Err(StatsError::InvalidInput("n must be >= 1".into()));
    }
    Ok((p_hat - p0) / (p0 * (1.0 - p0) / n as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub target_mean: f64,
    pub p_hat: f64,
    pub z: f64,
    pub mean_interval: (f64, f64),
    pub flip_mean: f64,
    pub flip_standard_error: f64,
    pub flip_bound: f64,
    pub flip_bound_is_exact: bool,
    /// `flip_mean / flip_bound`.
    pub flip_ratio: f64,
    pub mean_recursion: f64,
    pub aborted_count: u64,
    pub z_threshold: f64,
    pub pass_mean: bool,
    pub pass_flips: bool,
    /// Both tests pass and nothing aborted.
    pub pass: bool,
}

/// Tests a summary against the oracle for the same experiment.
///
/// The mean test is a two-sided z-test (an exact check when the target is 0
/// or 1). The flip test is two-sided when the oracle value is an exact
/// expectation, otherwise one-sided with `z_threshold` standard errors of
/// slack.
pub fn judge(
    summary: &TrialSummary,
    experiment: &Experiment,
    z_threshold: f64,
) -> Result<Verdict, StatsError> {
    let target_mean = experiment.exact_output_mean()?;
    let bound = experiment.expected_flip_bound()?;
    let completed = summary.completed();

    let (p_hat, z, pass_mean, mean_interval) = if completed == 0 {
        (f64::NAN, f64::NAN, false, (0.0, 1.0))
    } else {
        let p_hat = summary.p_hat();
        let interval = wilson_interval(summary.heads, completed, z_threshold);
        if target_mean > 0.0 && target_mean < 1.0 {
            let z = proportion_z(p_hat, target_mean, completed)?;
            (p_hat, z, z.abs() <= z_threshold, interval)
        } else {
            let exact = p_hat == target_mean;
            let z = if exact {
                0.0
            } else {
                (p_hat - target_mean).signum() * f64::INFINITY
            };
            (p_hat, z, exact, interval)
        }
    };

    let (flip_mean, flip_se) = if completed == 0 {
        (f64::NAN, f64::NAN)
    } else {
        (summary.flip_mean(), summary.flip_standard_error())
    };
    let pass_flips = if completed == 0 {
        false
    } else if bound.exact {
        let tolerance = (z_threshold * flip_se).max(1e-12 * bound.value.max(1.0));
        (flip_mean - bound.value).abs() <= tolerance
    } else {
        flip_mean <= bound.value + z_threshold * flip_se
    };

    Ok(Verdict {
        target_mean,
        p_hat,
        z,
        mean_interval,
        flip_mean,
        flip_standard_error: flip_se,
        flip_bound: bound.value,
        flip_bound_is_exact: bound.exact,
        flip_ratio: flip_mean / bound.value,
        mean_recursion: if completed == 0 { f64::NAN } else { summary.mean_recursion() },
        aborted_count: summary.aborted_count,
        z_threshold,
        pass_mean,
        pass_flips,
        pass: pass_mean && pass_flips && summary.aborted_count == 0,
    })
}
