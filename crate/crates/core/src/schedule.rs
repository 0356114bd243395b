//! Start-time assignments for every operation of every scenario.

use crate::instance::{Instance, ScenarioKey};
use serde::{Deserialize, Serialize};

/// One operation placed on a machine group (0-based) at a 1-based start block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Placement {
    pub group: usize,
    pub start: u32,
}

impl Placement {
    pub fn new(group: usize, start: u32) -> Self {
        Placement { group, start }
    }
}

/// Placements of one job.
///
/// `discard[j]` holds all operations of the restart after a scrap at
/// operation `j`; `rework[j]` holds operations `j..` of the repeat.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobSchedule {
    pub first_pass: Vec<Placement>,
    pub discard: Vec<Vec<Placement>>,
    pub rework: Vec<Vec<Placement>>,
}

impl JobSchedule {
    pub fn scenario(&self, key: ScenarioKey) -> &[Placement] {
        match key {
            ScenarioKey::FirstPass => &self.first_pass,
            ScenarioKey::Discard(j) => &self.discard[j],
            ScenarioKey::Rework(j) => &self.rework[j],
        }
    }

    pub fn scenario_mut(&mut self, key: ScenarioKey) -> &mut Vec<Placement> {
        match key {
            ScenarioKey::FirstPass => &mut self.first_pass,
            ScenarioKey::Discard(j) => &mut self.discard[j],
            ScenarioKey::Rework(j) => &mut self.rework[j],
        }
    }

    /// Placement of operation `op` (0-based, job-global numbering) in `key`.
    pub fn get(&self, key: ScenarioKey, op: usize) -> Option<Placement> {
        let first = key.first_op();
        if op < first {
            return None;
        }
        self.scenario(key).get(op - first).copied()
    }

    /// Iterates `(scenario, op, placement)` over everything scheduled for the job.
    pub fn iter(&self) -> impl Iterator<Item = (ScenarioKey, usize, Placement)> + '_ {
        let n = self.first_pass.len();
        ScenarioKey::all(self.discard.len().max(n)).into_iter().flat_map(move |key| {
            let first = key.first_op();
            let ops: &[Placement] = match key {
                ScenarioKey::FirstPass => &self.first_pass,
                ScenarioKey::Discard(j) => self.discard.get(j).map(Vec::as_slice).unwrap_or(&[]),
                ScenarioKey::Rework(j) => self.rework.get(j).map(Vec::as_slice).unwrap_or(&[]),
            };
            ops.iter().enumerate().map(move |(k, &p)| (key, first + k, p))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub jobs: Vec<JobSchedule>,
}

/// Processing time of operation `op` of job `job` (0-based) on a 0-based group,
/// or `None` when the group is not eligible.
pub fn proc_time(inst: &Instance, job: usize, op: usize, group: usize) -> Option<u32> {
    inst.jobs[job].operations[op].eligible.iter().find(|e| e.group == group + 1).map(|e| e.proc_time)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScheduleError {
    #[error("schedule has {found} jobs, instance has {expected}")]
    JobCount { found: usize, expected: usize },
    #[error("job {job}: scenario {scenario} has {found} placements, expected {expected}")]
    MissingPlacement { job: usize, scenario: String, found: usize, expected: usize },
    #[error("job {job} op {op} ({scenario}): group {group} is not eligible")]
    NotEligible { job: usize, op: usize, scenario: String, group: usize },
}

impl Schedule {
    /// Checks that every (scenario, operation) slot is filled with an eligible group.
    pub fn check_complete(&self, inst: &Instance) -> Result<(), ScheduleError> {
        if self.jobs.len() != inst.num_jobs() {
            return Err(ScheduleError::JobCount { found: self.jobs.len(), expected: inst.num_jobs() });
        }
        for (i, (js, job)) in self.jobs.iter().zip(&inst.jobs).enumerate() {
            let n = job.num_ops();
            if js.discard.len() != n || js.rework.len() != n {
                return Err(ScheduleError::MissingPlacement {
                    job: i + 1,
                    scenario: "second attempt".into(),
                    found: js.discard.len().min(js.rework.len()),
                    expected: n,
                });
            }
            for key in ScenarioKey::all(n) {
                let ops = js.scenario(key);
                let expected = n - key.first_op();
                if ops.len() != expected {
                    return Err(ScheduleError::MissingPlacement {
                        job: i + 1,
                        scenario: key.label(),
                        found: ops.len(),
                        expected,
                    });
                }
                for (k, p) in ops.iter().enumerate() {
                    let op = key.first_op() + k;
                    if proc_time(inst, i, op, p.group).is_none() {
                        return Err(ScheduleError::NotEligible {
                            job: i + 1,
                            op: op + 1,
                            scenario: key.label(),
                            group: p.group + 1,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Completion block of an operation (start + processing − 1).
    pub fn completion(&self, inst: &Instance, job: usize, key: ScenarioKey, op: usize) -> Option<u32> {
        let p = self.jobs.get(job)?.get(key, op)?;
        Some(p.start + proc_time(inst, job, op, p.group)? - 1)
    }

    /// Completion of the last operation of `key`.
    pub fn final_completion(&self, inst: &Instance, job: usize, key: ScenarioKey) -> Option<u32> {
        self.completion(inst, job, key, inst.jobs[job].num_ops() - 1)
    }
}
