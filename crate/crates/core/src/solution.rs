//! Solution files and Gantt export rows.

use crate::instance::{capacity_coefficient, Instance, ScenarioKey};
use crate::schedule::{proc_time, JobSchedule, Placement, Schedule};
use crate::slblr::HyperParams;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

pub const SOLUTION_SCHEMA_VERSION: u32 = 1;

/// One placed operation. Job, operation and group numbers are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacementRecord {
    pub job: usize,
    pub op: usize,
    pub group: usize,
    pub start: u32,
    pub end: u32,
}

/// Second-attempt placement: `trigger` is the 1-based operation whose scrap started it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetryRecord {
    pub kind: RetryKind,
    pub trigger: usize,
    #[serde(flatten)]
    pub placement: PlacementRecord,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RetryKind {
    Discard,
    Rework,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub schema_version: u32,
    pub objective: f64,
    /// Best certified lower bound, when one was computed.
    pub bound: Option<f64>,
    pub gap: Option<f64>,
    pub hyperparameters: Option<HyperParams>,
    pub seed: Option<u64>,
    pub attempt1: Vec<PlacementRecord>,
    pub attempt2: Vec<RetryRecord>,
}

#[derive(Debug, Error)]
pub enum SolutionError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed solution file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported solution schema version {0}")]
    Version(u32),
    #[error("{0}")]
    Shape(String),
}

fn record(inst: &Instance, job: usize, op: usize, p: Placement) -> PlacementRecord {
    let dur = proc_time(inst, job, op, p.group).unwrap_or(1);
    PlacementRecord {
        job: inst.jobs[job].id,
        op: op + 1,
        group: inst.machine_groups.get(p.group).map_or(p.group + 1, |g| g.id),
        start: p.start,
        end: p.start + dur - 1,
    }
}

impl SolutionFile {
    pub fn from_schedule(inst: &Instance, schedule: &Schedule, objective: f64) -> Self {
        let mut attempt1 = Vec::new();
        let mut attempt2 = Vec::new();
        for (i, js) in schedule.jobs.iter().enumerate() {
            for (key, op, p) in js.iter() {
                let placement = record(inst, i, op, p);
                match key {
                    ScenarioKey::FirstPass => attempt1.push(placement),
                    ScenarioKey::Discard(j) => {
                        attempt2.push(RetryRecord { kind: RetryKind::Discard, trigger: j + 1, placement })
                    }
                    ScenarioKey::Rework(j) => {
                        attempt2.push(RetryRecord { kind: RetryKind::Rework, trigger: j + 1, placement })
                    }
                }
            }
        }
        SolutionFile {
            schema_version: SOLUTION_SCHEMA_VERSION,
            objective,
            bound: None,
            gap: None,
            hyperparameters: None,
            seed: None,
            attempt1,
            attempt2,
        }
    }

    /// Rebuilds the schedule. End times are ignored; they follow from the group.
    pub fn to_schedule(&self, inst: &Instance) -> Result<Schedule, SolutionError> {
        let mut jobs: Vec<JobSchedule> = inst
            .jobs
            .iter()
            .map(|j| JobSchedule {
                first_pass: Vec::new(),
                discard: vec![Vec::new(); j.num_ops()],
                rework: vec![Vec::new(); j.num_ops()],
            })
            .collect();
        let job_of = |id: usize| {
            inst.jobs.iter().position(|j| j.id == id).ok_or_else(|| SolutionError::Shape(format!("unknown job {id}")))
        };
        let group_of = |id: usize| {
            inst.machine_groups
                .iter()
                .position(|g| g.id == id)
                .ok_or_else(|| SolutionError::Shape(format!("unknown machine group {id}")))
        };
        let mut put = |key: ScenarioKey, r: &PlacementRecord| -> Result<(), SolutionError> {
            let i = job_of(r.job)?;
            let n = inst.jobs[i].num_ops();
            if r.op == 0 || r.op > n {
                return Err(SolutionError::Shape(format!("job {}: no operation {}", r.job, r.op)));
            }
            if let Some(t) = key.trigger() {
                if t >= n {
                    return Err(SolutionError::Shape(format!(
                        "job {}: no operation {} to trigger a retry",
                        r.job,
                        t + 1
                    )));
                }
            }
            let chain = jobs[i].scenario_mut(key);
            if r.op - 1 != key.first_op() + chain.len() {
                return Err(SolutionError::Shape(format!(
                    "job {} scenario {key}: operation {} out of order",
                    r.job, r.op
                )));
            }
            chain.push(Placement::new(group_of(r.group)?, r.start));
            Ok(())
        };
        for r in &self.attempt1 {
            put(ScenarioKey::FirstPass, r)?;
        }
        for r in &self.attempt2 {
            let t = r.trigger.checked_sub(1).ok_or_else(|| SolutionError::Shape("retry trigger 0".into()))?;
            let key = match r.kind {
                RetryKind::Discard => ScenarioKey::Discard(t),
                RetryKind::Rework => ScenarioKey::Rework(t),
            };
            put(key, &r.placement)?;
        }
        Ok(Schedule { jobs })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serializes")
    }

    pub fn parse(text: &str) -> Result<Self, SolutionError> {
        let sol: SolutionFile = serde_json::from_str(text)?;
        if sol.schema_version != SOLUTION_SCHEMA_VERSION {
            return Err(SolutionError::Version(sol.schema_version));
        }
        Ok(sol)
    }

    pub fn load(path: &Path) -> Result<Self, SolutionError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| SolutionError::Read { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), SolutionError> {
        std::fs::write(path, self.to_json() + "\n")
            .map_err(|source| SolutionError::Write { path: path.display().to_string(), source })
    }
}

/// One bar of a Gantt chart; `weight` is the placement's expected occupancy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GanttRow {
    pub scenario: String,
    pub job: usize,
    pub op: usize,
    pub group: usize,
    pub start: u32,
    pub end: u32,
    pub weight: f64,
}

pub fn gantt_rows(inst: &Instance, schedule: &Schedule) -> Vec<GanttRow> {
    let mut rows = Vec::new();
    for (i, js) in schedule.jobs.iter().enumerate() {
        for (key, op, p) in js.iter() {
            let r = record(inst, i, op, p);
            rows.push(GanttRow {
                scenario: key.to_string(),
                job: r.job,
                op: r.op,
                group: r.group,
                start: r.start,
                end: r.end,
                weight: capacity_coefficient(&inst.jobs[i], key, op),
            });
        }
    }
    rows
}
