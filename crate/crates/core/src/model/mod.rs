//! The time-indexed scenario model: placement layout, MILP builders and the
//! expected weighted tardiness objective.

mod build;
mod layout;

pub use build::{build_full_model, build_repair_model, build_subproblem_model, BuiltModel, ModelVars};
pub use layout::{scenario_index, Candidate, JobLayout, PlacementGroup, ScenarioLayout, VariableLayout};

use crate::instance::{scenario_weights, Instance};
use crate::schedule::{Schedule, ScheduleError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("subproblem needs at least one job")]
    EmptySubset,
    #[error("job {job}, scenario {scenario}, operation {op}: no start time left in its window")]
    EmptyWindow { job: usize, scenario: String, op: usize },
    #[error("{0}")]
    Layout(String),
    #[error("{0}")]
    Schedule(String),
}

/// Expected weighted tardiness of one job.
pub fn job_objective(inst: &Instance, schedule: &Schedule, job: usize) -> Result<f64, ScheduleError> {
    let j = &inst.jobs[job];
    let mut total = 0.0;
    for sw in scenario_weights(j) {
        let c = schedule.final_completion(inst, job, sw.key).ok_or_else(|| ScheduleError::MissingPlacement {
            job: job + 1,
            scenario: sw.key.to_string(),
            found: schedule.jobs[job].scenario(sw.key).len(),
            expected: j.num_ops() - sw.key.first_op(),
        })?;
        total += j.weight * sw.weight * (c as f64 - j.due_date as f64).max(0.0);
    }
    Ok(total)
}

/// Expected weighted tardiness over all jobs and scenarios.
pub fn evaluate_objective(inst: &Instance, schedule: &Schedule) -> Result<f64, ScheduleError> {
    schedule.check_complete(inst)?;
    let mut total = 0.0;
    for i in 0..inst.num_jobs() {
        total += job_objective(inst, schedule, i)?;
    }
    Ok(total)
}
