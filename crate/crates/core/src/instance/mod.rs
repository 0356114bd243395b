//! Problem data: jobs, operations, machine groups and the scrap/rework
//! scenario algebra.
//!
//! Identifiers in the public types are 1-based, as they appear in instance
//! files. All code that indexes vectors goes through the 0-based accessors
//! (`job_index`, `group_index`) on [`Instance`].

mod generate;
mod io;
mod scenario;

pub use generate::{auto_horizon, example2_base, generate_instance, GeneratorConfig, Routing};
pub use io::{load_instance, parse_instance, save_instance, to_json, InstanceError, SCHEMA_VERSION};
pub use scenario::{capacity_coefficient, scenario_weights, ScenarioKey, ScenarioWeight};

use serde::{Deserialize, Serialize};

pub const DEFAULT_CEILING_EPSILON: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MachineGroup {
    pub id: usize,
    pub capacity: u32,
}

/// One machine group able to process an operation, with its processing time in time blocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eligibility {
    pub group: usize,
    pub proc_time: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperationSpec {
    pub eligible: Vec<Eligibility>,
    /// Per-operation override of the job-level scrap probability.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scrap_prob: Option<f64>,
    /// Per-operation override of the job-level rework probability.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rework_prob: Option<f64>,
}

impl OperationSpec {
    pub fn single(group: usize, proc_time: u32) -> Self {
        OperationSpec { eligible: vec![Eligibility { group, proc_time }], scrap_prob: None, rework_prob: None }
    }

    /// Shortest processing time over the eligible groups.
    pub fn min_proc(&self) -> u32 {
        self.eligible.iter().map(|e| e.proc_time).min().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Job {
    pub id: usize,
    pub weight: f64,
    pub due_date: u32,
    /// Scrap probability applied to every operation without an override.
    pub scrap_prob: f64,
    /// Rework probability (conditional on scrap) applied to every operation without an override.
    pub rework_prob: f64,
    pub operations: Vec<OperationSpec>,
}

impl Job {
    pub fn num_ops(&self) -> usize {
        self.operations.len()
    }

    pub fn scrap(&self, op: usize) -> f64 {
        self.operations[op].scrap_prob.unwrap_or(self.scrap_prob)
    }

    pub fn rework(&self, op: usize) -> f64 {
        self.operations[op].rework_prob.unwrap_or(self.rework_prob)
    }

    /// Sum of the shortest processing times of operations `from..`.
    pub fn serial_min_from(&self, from: usize) -> u32 {
        self.operations[from..].iter().map(OperationSpec::min_proc).sum()
    }

    /// Serial length of one attempt using the slowest eligible group of every operation.
    pub fn serial_max(&self) -> u32 {
        self.operations.iter().map(|op| op.eligible.iter().map(|e| e.proc_time).max().unwrap_or(0)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub jobs: Vec<Job>,
    pub machine_groups: Vec<MachineGroup>,
    pub horizon: u32,
    pub shift_length: u32,
    #[serde(default = "default_epsilon")]
    pub ceiling_epsilon: f64,
}

fn default_epsilon() -> f64 {
    DEFAULT_CEILING_EPSILON
}

impl Instance {
    pub fn num_jobs(&self) -> usize {
        self.jobs.len()
    }

    pub fn num_groups(&self) -> usize {
        self.machine_groups.len()
    }

    /// Number of (group, time) capacity cells.
    pub fn num_cells(&self) -> usize {
        self.num_groups() * self.horizon as usize
    }

    /// Dense index of capacity cell `(group, t)` with 0-based group and 1-based `t`.
    #[inline]
    pub fn cell(&self, group: usize, t: u32) -> usize {
        group * self.horizon as usize + (t as usize - 1)
    }

    pub fn capacity(&self, group: usize) -> u32 {
        self.machine_groups[group].capacity
    }

    /// Converts a 1-based group id from the data into a vector index.
    #[inline]
    pub fn group_index(id: usize) -> usize {
        id - 1
    }

    /// Operations processable on each group, as (job index, op index) pairs.
    pub fn operations_by_group(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.num_groups()];
        for (i, job) in self.jobs.iter().enumerate() {
            for (j, op) in job.operations.iter().enumerate() {
                for e in &op.eligible {
                    if let Some(slot) = out.get_mut(e.group.wrapping_sub(1)) {
                        if !slot.contains(&(i, j)) {
                            slot.push((i, j));
                        }
                    }
                }
            }
        }
        out
    }

    /// Smallest multiple of the shift length that is `>= value`.
    pub fn round_up_to_shift(&self, value: u32) -> u32 {
        let s = self.shift_length.max(1);
        value.div_ceil(s) * s
    }

    /// Earliest start allowed for the first operation of a second attempt
    /// triggered by a first-attempt completion at `completion`.
    #[inline]
    pub fn restart_release(&self, completion: u32) -> u32 {
        self.round_up_to_shift(completion) + 1
    }

    /// Default horizon: twice the latest due date plus both attempts of the
    /// longest job, rounded up to a whole number of shifts.
    pub fn default_horizon(&self) -> u32 {
        let max_due = self.jobs.iter().map(|j| j.due_date).max().unwrap_or(0);
        let longest = self.jobs.iter().map(Job::serial_max).max().unwrap_or(0);
        self.round_up_to_shift(2 * max_due + 2 * longest)
    }

    /// Checks every structural invariant and reports each broken rule.
    pub fn validate(&self) -> Vec<String> {
        validate_instance(self)
    }
}

/// Reports every violated invariant as `"<Type>.<field>: <rule>"`; empty means valid.
pub fn validate_instance(inst: &Instance) -> Vec<String> {
    let mut out = Vec::new();
    if inst.jobs.is_empty() {
        out.push("Instance.jobs: at least one job required".to_string());
    }
    if inst.machine_groups.is_empty() {
        out.push("Instance.machine_groups: at least one machine group required".to_string());
    }
    if inst.horizon == 0 {
        out.push("Instance.horizon: must be a positive integer".to_string());
    }
    if inst.shift_length == 0 {
        out.push("Instance.shift_length: must be a positive integer".to_string());
    }
    let eps = inst.ceiling_epsilon;
    if !(eps > 0.0 && eps < 1.0) {
        out.push(format!("Instance.ceiling_epsilon: {eps} not in (0,1)"));
    } else if inst.shift_length > 0 && eps * inst.shift_length as f64 >= 1.0 {
        out.push(format!("Instance.ceiling_epsilon: {eps} must be below 1/shift_length for an exact ceiling"));
    }
    for (k, g) in inst.machine_groups.iter().enumerate() {
        if g.id != k + 1 {
            out.push(format!("MachineGroup.id: group at position {} has id {}, expected {}", k + 1, g.id, k + 1));
        }
        if g.capacity < 1 {
            out.push(format!("MachineGroup.capacity: group {} has capacity 0", g.id));
        }
    }
    let m = inst.machine_groups.len();
    for (k, job) in inst.jobs.iter().enumerate() {
        let jid = job.id;
        if job.id != k + 1 {
            out.push(format!("Job.id: job at position {} has id {}, expected {}", k + 1, job.id, k + 1));
        }
        if !(job.weight > 0.0 && job.weight.is_finite()) {
            out.push(format!("Job.weight: job {jid} weight {} must be positive", job.weight));
        }
        if job.due_date < 1 {
            out.push(format!("Job.due_date: job {jid} due date must be >= 1"));
        }
        if job.operations.is_empty() {
            out.push(format!("Job.operations: job {jid} has no operations"));
        }
        check_probs(&mut out, "Job", jid, None, job.scrap_prob, job.rework_prob);
        for (j, op) in job.operations.iter().enumerate() {
            if op.eligible.is_empty() {
                out.push(format!("OperationSpec.eligible: job {jid} op {} has an empty eligible set", j + 1));
            }
            let mut seen = Vec::new();
            for e in &op.eligible {
                if e.group < 1 || e.group > m {
                    out.push(format!(
                        "OperationSpec.eligible: job {jid} op {} references unknown group {}",
                        j + 1,
                        e.group
                    ));
                }
                if seen.contains(&e.group) {
                    out.push(format!("OperationSpec.eligible: job {jid} op {} lists group {} twice", j + 1, e.group));
                }
                seen.push(e.group);
                if e.proc_time < 1 {
                    out.push(format!(
                        "OperationSpec.eligible: job {jid} op {} has processing time 0 on group {}",
                        j + 1,
                        e.group
                    ));
                }
            }
            if op.scrap_prob.is_some() || op.rework_prob.is_some() {
                check_probs(&mut out, "OperationSpec", jid, Some(j), job.scrap(j), job.rework(j));
            }
        }
    }
    if out.is_empty() {
        let need = inst
            .jobs
            .iter()
            .map(|job| {
                // latest possible first-attempt finish, shift alignment, then a full second attempt
                let one = job.serial_max();
                inst.round_up_to_shift(one) + one
            })
            .max()
            .unwrap_or(0);
        if inst.horizon < need {
            out.push(format!(
                "Instance.horizon: {} is shorter than the {} blocks needed to run both attempts of the longest job",
                inst.horizon, need
            ));
        }
    }
    out
}

fn check_probs(out: &mut Vec<String>, ty: &str, job: usize, op: Option<usize>, ps: f64, pr: f64) {
    let at = match op {
        Some(j) => format!("job {job} op {}", j + 1),
        None => format!("job {job}"),
    };
    if !(0.0..1.0).contains(&ps) {
        out.push(format!("{ty}.scrap_prob: {at} scrap probability {ps} not in [0,1)"));
    }
    if !(0.0..=1.0).contains(&pr) {
        out.push(format!("{ty}.rework_prob: {at} rework probability {pr} not in [0,1]"));
    }
}

/// The canonical 20-job, 5-operation, 5-group instance (processing times,
/// due dates and capacities of the published base case).
pub fn example1() -> Instance {
    parse_instance(include_str!("../../data/example1.json")).expect("bundled example1 instance parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Instance {
        Instance {
            jobs: vec![Job {
                id: 1,
                weight: 1.0,
                due_date: 5,
                scrap_prob: 0.05,
                rework_prob: 0.2,
                operations: vec![OperationSpec::single(1, 2), OperationSpec::single(2, 1)],
            }],
            machine_groups: vec![MachineGroup { id: 1, capacity: 1 }, MachineGroup { id: 2, capacity: 1 }],
            horizon: 16,
            shift_length: 4,
            ceiling_epsilon: 1e-3,
        }
    }

    #[test]
    fn valid_tiny_instance() {
        assert!(validate_instance(&tiny()).is_empty());
    }

    #[test]
    fn zero_capacity_is_reported() {
        let mut inst = tiny();
        inst.machine_groups[0].capacity = 0;
        let v = validate_instance(&inst);
        assert_eq!(v.len(), 1, "{v:?}");
        assert!(v[0].starts_with("MachineGroup.capacity"));
    }

    #[test]
    fn empty_eligible_is_reported() {
        let mut inst = tiny();
        inst.jobs[0].operations[1].eligible.clear();
        let v = validate_instance(&inst);
        assert_eq!(v.len(), 1, "{v:?}");
        assert!(v[0].starts_with("OperationSpec.eligible"));
    }

    #[test]
    fn unknown_group_and_bad_probability() {
        let mut inst = tiny();
        inst.jobs[0].operations[0].eligible[0].group = 7;
        inst.jobs[0].rework_prob = 1.5;
        let v = validate_instance(&inst);
        assert!(v.iter().any(|s| s.contains("unknown group 7")));
        assert!(v.iter().any(|s| s.starts_with("Job.rework_prob")));
    }

    #[test]
    fn short_horizon_is_reported() {
        let mut inst = tiny();
        inst.horizon = 5;
        let v = validate_instance(&inst);
        assert_eq!(v.len(), 1);
        assert!(v[0].starts_with("Instance.horizon"));
    }

    #[test]
    fn example1_is_valid() {
        let inst = example1();
        assert!(validate_instance(&inst).is_empty(), "{:?}", validate_instance(&inst));
        assert_eq!(inst.num_jobs(), 20);
        let caps: Vec<u32> = inst.machine_groups.iter().map(|g| g.capacity).collect();
        assert_eq!(caps, vec![2, 3, 2, 2, 3]);
    }

    #[test]
    fn operations_by_group_is_inverse_of_eligibility() {
        let inst = example1();
        let o = inst.operations_by_group();
        for (m, ops) in o.iter().enumerate() {
            for &(i, j) in ops {
                assert!(inst.jobs[i].operations[j].eligible.iter().any(|e| e.group == m + 1));
            }
        }
        let total: usize = o.iter().map(Vec::len).sum();
        assert_eq!(total, 100);
    }

    #[test]
    fn restart_release_aligns_to_shift() {
        let mut inst = tiny();
        inst.shift_length = 8;
        assert_eq!(inst.restart_release(7), 9);
        assert_eq!(inst.restart_release(8), 9);
        assert_eq!(inst.restart_release(9), 17);
    }
}
