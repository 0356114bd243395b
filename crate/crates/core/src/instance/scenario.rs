use super::Job;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Which realization of a job's production a placement belongs to.
///
/// `Discard(j)` and `Rework(j)` are second attempts after a scrap at
/// operation `j` (0-based) of the first attempt. A discarded part restarts at
/// the first operation; a reworked part repeats operation `j` and continues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "trigger", rename_all = "snake_case")]
pub enum ScenarioKey {
    FirstPass,
    Discard(usize),
    Rework(usize),
}

impl ScenarioKey {
    /// All scenarios of a job with `num_ops` operations, in canonical order:
    /// first pass, then for every trigger the discard and the rework scenario.
    pub fn all(num_ops: usize) -> Vec<ScenarioKey> {
        let mut out = Vec::with_capacity(1 + 2 * num_ops);
        out.push(ScenarioKey::FirstPass);
        for j in 0..num_ops {
            out.push(ScenarioKey::Discard(j));
            out.push(ScenarioKey::Rework(j));
        }
        out
    }

    /// First operation executed in this scenario.
    pub fn first_op(self) -> usize {
        match self {
            ScenarioKey::FirstPass | ScenarioKey::Discard(_) => 0,
            ScenarioKey::Rework(j) => j,
        }
    }

    pub fn trigger(self) -> Option<usize> {
        match self {
            ScenarioKey::FirstPass => None,
            ScenarioKey::Discard(j) | ScenarioKey::Rework(j) => Some(j),
        }
    }

    pub fn is_second_attempt(self) -> bool {
        self != ScenarioKey::FirstPass
    }

    /// Short label with 1-based operation numbers, e.g. `D3`, `R1`, `FP`.
    pub fn label(self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ScenarioKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioKey::FirstPass => write!(f, "FP"),
            ScenarioKey::Discard(j) => write!(f, "D{}", j + 1),
            ScenarioKey::Rework(j) => write!(f, "R{}", j + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioWeight {
    pub key: ScenarioKey,
    pub weight: f64,
}

/// Probability that the part survives operations `0..upto` without scrap.
fn survival(job: &Job, upto: usize) -> f64 {
    (0..upto).map(|j| 1.0 - job.scrap(j)).product()
}

/// Probability of every scenario of `job`, in [`ScenarioKey::all`] order.
pub fn scenario_weights(job: &Job) -> Vec<ScenarioWeight> {
    let n = job.num_ops();
    let mut out = Vec::with_capacity(1 + 2 * n);
    out.push(ScenarioWeight { key: ScenarioKey::FirstPass, weight: survival(job, n) });
    for j in 0..n {
        let scrapped_here = survival(job, j) - survival(job, j + 1);
        let pr = job.rework(j);
        out.push(ScenarioWeight { key: ScenarioKey::Discard(j), weight: scrapped_here * (1.0 - pr) });
        out.push(ScenarioWeight { key: ScenarioKey::Rework(j), weight: scrapped_here * pr });
    }
    out
}

/// Expected-occupancy coefficient of operation `op` in `scenario`.
///
/// First-pass operations count with the survival probability up to (not
/// including) the operation itself; second-attempt operations count with the
/// probability of their scenario.
pub fn capacity_coefficient(job: &Job, scenario: ScenarioKey, op: usize) -> f64 {
    match scenario {
        ScenarioKey::FirstPass => survival(job, op),
        ScenarioKey::Discard(j) => (survival(job, j) - survival(job, j + 1)) * (1.0 - job.rework(j)),
        ScenarioKey::Rework(j) => (survival(job, j) - survival(job, j + 1)) * job.rework(j),
    }
}
