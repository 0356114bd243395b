//! Independent checks of the expectation semantics: exact scenario
//! enumeration and Monte-Carlo execution of a schedule.

use crate::instance::{Instance, ScenarioKey};
use crate::schedule::{proc_time, Schedule, ScheduleError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Samples per independent random stream.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SimMode {
    /// At most one defect per job, second attempt always succeeds.
    SingleFailure,
    /// Unbounded retries, every operation can fail again.
    FullMarkov,
}

impl fmt::Display for SimMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SimMode::SingleFailure => "SINGLE_FAILURE",
            SimMode::FullMarkov => "FULL_MARKOV",
        })
    }
}

impl std::str::FromStr for SimMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "SINGLE_FAILURE" => Ok(SimMode::SingleFailure),
            "FULL_MARKOV" => Ok(SimMode::FullMarkov),
            _ => Err(format!("unknown simulation mode {s:?}")),
        }
    }
}

/// Outcome of one operation in the part's state chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transition {
    Advance,
    Rework,
    Discard,
}

/// One draw: advance with `1 - ps`, rework with `ps * pr`, discard otherwise.
pub fn sample_transition<R: Rng>(rng: &mut R, ps: f64, pr: f64) -> Transition {
    let u: f64 = rng.gen();
    if u >= ps {
        Transition::Advance
    } else if u < ps * pr {
        Transition::Rework
    } else {
        Transition::Discard
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobOutcome {
    /// Scenario of the schedule that was followed after the first defect.
    pub scenario: ScenarioKey,
    /// Defects after the second attempt started (always 0 for single-failure sampling).
    pub extra_failures: u32,
    pub completion: u32,
    pub weighted_tardiness: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// One line of an evaluation report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRow {
    pub mode: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub mean: f64,
    pub std_error: f64,
    pub exact_value: f64,
    pub z_score: f64,
}

impl EvaluationRow {
    pub fn new(mode: SimMode, est: &Estimate, exact: f64) -> Self {
        let diff = est.mean - exact;
        let z_score = if est.std_error > 0.0 {
            diff / est.std_error
        } else if diff.abs() <= 1e-9 * exact.abs().max(1.0) {
            0.0
        } else {
            f64::INFINITY.copysign(diff)
        };
        EvaluationRow {
            mode: mode.to_string(),
            n: est.samples,
            mean: est.mean,
            std_error: est.std_error,
            exact_value: exact,
            z_score,
        }
    }
}

/// Completion of the last operation of a scheduled chain.
fn chain_completion(inst: &Instance, schedule: &Schedule, job: usize, key: ScenarioKey) -> Result<u32, ScheduleError> {
    let n = inst.jobs[job].num_ops();
    let chain = schedule.jobs[job].scenario(key);
    let expected = n - key.first_op();
    let missing =
        || ScheduleError::MissingPlacement { job: job + 1, scenario: key.to_string(), found: chain.len(), expected };
    if chain.len() != expected {
        return Err(missing());
    }
    let last = chain.last().ok_or_else(missing)?;
    let p = proc_time(inst, job, n - 1, last.group).ok_or_else(missing)?;
    Ok(last.start + p - 1)
}

/// Expected weighted tardiness by walking every job's defect tree.
pub fn exact_expected_tardiness(inst: &Instance, schedule: &Schedule) -> Result<f64, ScheduleError> {
    if schedule.jobs.len() != inst.num_jobs() {
        return Err(ScheduleError::JobCount { expected: inst.num_jobs(), found: schedule.jobs.len() });
    }
    let mut total = 0.0;
    for (i, job) in inst.jobs.iter().enumerate() {
        let tard = |key| -> Result<f64, ScheduleError> {
            let c = chain_completion(inst, schedule, i, key)?;
            Ok(job.weight * (c as f64 - job.due_date as f64).max(0.0))
        };
        let mut reach = 1.0;
        for j in 0..job.num_ops() {
            let fail = reach * job.scrap(j);
            total += fail * job.rework(j) * tard(ScenarioKey::Rework(j))?;
            total += fail * (1.0 - job.rework(j)) * tard(ScenarioKey::Discard(j))?;
            reach -= fail;
        }
        total += reach * tard(ScenarioKey::FirstPass)?;
    }
    Ok(total)
}

/// Completion of operations `from..` run back to back on their fastest groups from `release`.
fn dispatch(inst: &Instance, job: usize, from: usize, release: u32) -> Vec<u32> {
    let mut t = release;
    inst.jobs[job].operations[from..]
        .iter()
        .map(|op| {
            let c = t + op.min_proc() - 1;
            t = c + 1;
            c
        })
        .collect()
}

/// Runs a chain with per-operation failure draws; returns the final
/// completion and the number of failures. `completions[k]` is the scheduled
/// completion of operation `from + k`.
fn run_markov<R: Rng>(inst: &Instance, job: usize, from: usize, completions: Vec<u32>, rng: &mut R) -> (u32, u32) {
    let spec = &inst.jobs[job];
    let mut failures = 0;
    let (mut from, mut completions) = (from, completions);
    loop {
        let mut restart = None;
        for (k, &c) in completions.iter().enumerate() {
            let j = from + k;
            match sample_transition(rng, spec.scrap(j), spec.rework(j)) {
                Transition::Advance => {}
                Transition::Rework => restart = Some((j, c)),
                Transition::Discard => restart = Some((0, c)),
            }
            if restart.is_some() {
                break;
            }
        }
        match restart {
            None => return (*completions.last().expect("chain has operations"), failures),
            Some((op, c)) => {
                failures += 1;
                from = op;
                completions = dispatch(inst, job, op, inst.restart_release(c));
            }
        }
    }
}

fn sample_job<R: Rng>(
    inst: &Instance,
    schedule: &Schedule,
    job: usize,
    mode: SimMode,
    rng: &mut R,
) -> Result<JobOutcome, ScheduleError> {
    let spec = &inst.jobs[job];
    let mut scenario = ScenarioKey::FirstPass;
    for j in 0..spec.num_ops() {
        match sample_transition(rng, spec.scrap(j), spec.rework(j)) {
            Transition::Advance => continue,
            Transition::Rework => scenario = ScenarioKey::Rework(j),
            Transition::Discard => scenario = ScenarioKey::Discard(j),
        }
        break;
    }
    let (completion, extra_failures) = match (mode, scenario) {
        (SimMode::SingleFailure, _) | (SimMode::FullMarkov, ScenarioKey::FirstPass) => {
            (chain_completion(inst, schedule, job, scenario)?, 0)
        }
        (SimMode::FullMarkov, key) => {
            chain_completion(inst, schedule, job, key)?;
            let completions: Vec<u32> = (key.first_op()..spec.num_ops())
                .map(|op| schedule.completion(inst, job, key, op).expect("chain checked"))
                .collect();
            run_markov(inst, job, key.first_op(), completions, rng)
        }
    };
    let weighted_tardiness = spec.weight * (completion as f64 - spec.due_date as f64).max(0.0);
    Ok(JobOutcome { scenario, extra_failures, completion, weighted_tardiness })
}

/// One realization of every job.
pub fn simulate_once<R: Rng>(
    inst: &Instance,
    schedule: &Schedule,
    mode: SimMode,
    rng: &mut R,
) -> Result<Vec<JobOutcome>, ScheduleError> {
    (0..inst.num_jobs()).map(|i| sample_job(inst, schedule, i, mode, rng)).collect()
}

/// Sample mean and standard error of total weighted tardiness.
///
/// Samples are split into fixed chunks, each drawn from its own stream of a
/// seeded ChaCha generator, so the result does not depend on the thread count.
pub fn monte_carlo_tardiness(
    inst: &Instance,
    schedule: &Schedule,
    samples: usize,
    seed: u64,
    mode: SimMode,
) -> Result<Estimate, ScheduleError> {
    assert!(samples >= 1, "at least one sample");
    schedule.check_complete(inst)?;
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<(f64, f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let n = CHUNK.min(samples - c * CHUNK);
            // running mean and sum of squared deviations
            let (mut mean, mut m2) = (0.0, 0.0);
            for k in 0..n {
                let x: f64 = simulate_once(inst, schedule, mode, &mut rng)
                    .expect("schedule checked")
                    .iter()
                    .map(|o| o.weighted_tardiness)
                    .sum();
                let d = x - mean;
                mean += d / (k + 1) as f64;
                m2 += d * (x - mean);
            }
            (n as f64, mean, m2)
        })
        .collect();
    let (mut n, mut mean, mut m2) = (0.0, 0.0, 0.0);
    for (nb, mb, m2b) in parts {
        let tot = n + nb;
        let d = mb - mean;
        mean += d * nb / tot;
        m2 += m2b + d * d * n * nb / tot;
        n = tot;
    }
    let var = if samples > 1 { m2 / (n - 1.0) } else { 0.0 };
    Ok(Estimate { mean, std_error: (var / n).sqrt(), samples })
}
