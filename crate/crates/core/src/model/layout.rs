use crate::instance::{capacity_coefficient, scenario_weights, Instance, ScenarioKey, ScenarioWeight};
use crate::schedule::{JobSchedule, Placement, Schedule};
use serde::Serialize;

/// One start-time option of a placement group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Candidate {
    /// 0-based machine group.
    pub group: usize,
    pub start: u32,
    pub proc: u32,
}

impl Candidate {
    pub fn completion(&self) -> u32 {
        self.start + self.proc - 1
    }

    pub fn placement(&self) -> Placement {
        Placement::new(self.group, self.start)
    }
}

/// All options for one operation of one scenario of one job.
#[derive(Debug, Clone, Serialize)]
pub struct PlacementGroup {
    pub job: usize,
    pub scenario: ScenarioKey,
    pub op: usize,
    /// Expected-occupancy coefficient shared by every candidate.
    pub coef: f64,
    /// Sorted by (start, group).
    pub candidates: Vec<Candidate>,
}

impl PlacementGroup {
    pub fn find(&self, p: Placement) -> Option<usize> {
        self.candidates.iter().position(|c| c.group == p.group && c.start == p.start)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioLayout {
    pub key: ScenarioKey,
    pub weight: f64,
    /// Indices into [`VariableLayout::groups`], one per scheduled operation.
    pub groups: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct JobLayout {
    /// In [`ScenarioKey::all`] order.
    pub scenarios: Vec<ScenarioLayout>,
}

impl JobLayout {
    pub fn scenario(&self, key: ScenarioKey) -> &ScenarioLayout {
        &self.scenarios[scenario_index(key)]
    }
}

/// Position of `key` in [`ScenarioKey::all`].
pub fn scenario_index(key: ScenarioKey) -> usize {
    match key {
        ScenarioKey::FirstPass => 0,
        ScenarioKey::Discard(j) => 1 + 2 * j,
        ScenarioKey::Rework(j) => 2 + 2 * j,
    }
}

/// Every placement group of an instance with its feasible start windows.
#[derive(Debug, Clone, Serialize)]
pub struct VariableLayout {
    pub groups: Vec<PlacementGroup>,
    pub jobs: Vec<JobLayout>,
    pub num_cells: usize,
}

impl VariableLayout {
    /// Builds start windows from release times and the latest completions
    /// that still leave room for every later operation and every restart.
    pub fn new(inst: &Instance) -> Result<Self, String> {
        let t_max = inst.horizon as i64;
        let mut groups = Vec::new();
        let mut jobs = Vec::new();
        for (i, job) in inst.jobs.iter().enumerate() {
            let n = job.num_ops();
            let min_p: Vec<i64> = job.operations.iter().map(|o| o.min_proc() as i64).collect();
            // latest completion of op `j` of a second attempt
            let mut lc2 = vec![t_max; n];
            for j in (0..n.saturating_sub(1)).rev() {
                lc2[j] = lc2[j + 1] - min_p[j + 1];
            }
            let latest_trigger = |first: usize| -> i64 {
                let latest_start = lc2[first] - min_p[first] + 1;
                let s = inst.shift_length as i64;
                if latest_start < 1 {
                    -1
                } else {
                    s * ((latest_start - 1) / s)
                }
            };
            let mut lc1 = vec![t_max; n];
            for j in (0..n).rev() {
                if j + 1 < n {
                    lc1[j] = lc1[j + 1] - min_p[j + 1];
                }
                lc1[j] = lc1[j].min(latest_trigger(0)).min(latest_trigger(j));
            }
            let mut es1 = vec![1i64; n];
            for j in 1..n {
                es1[j] = es1[j - 1] + min_p[j - 1];
            }
            let weights: Vec<ScenarioWeight> = scenario_weights(job);
            let mut scenarios = Vec::with_capacity(weights.len());
            for sw in weights {
                let first = sw.key.first_op();
                let (mut es, lc) = match sw.key.trigger() {
                    None => (1i64, &lc1),
                    Some(jt) => {
                        let c_min = (es1[jt] + min_p[jt] - 1) as u32;
                        (inst.restart_release(c_min) as i64, &lc2)
                    }
                };
                let mut ids = Vec::with_capacity(n - first);
                for op in first..n {
                    let mut candidates = Vec::new();
                    for e in &job.operations[op].eligible {
                        let g = Instance::group_index(e.group);
                        let last = lc[op] - e.proc_time as i64 + 1;
                        for t in es.max(1)..=last {
                            candidates.push(Candidate { group: g, start: t as u32, proc: e.proc_time });
                        }
                    }
                    if candidates.is_empty() {
                        return Err(format!(
                            "job {} cannot fit operation {} of scenario {} within horizon {}",
                            job.id,
                            op + 1,
                            sw.key,
                            inst.horizon
                        ));
                    }
                    candidates.sort_by_key(|c| (c.start, c.group));
                    ids.push(groups.len());
                    groups.push(PlacementGroup {
                        job: i,
                        scenario: sw.key,
                        op,
                        coef: capacity_coefficient(job, sw.key, op),
                        candidates,
                    });
                    es += min_p[op];
                }
                scenarios.push(ScenarioLayout { key: sw.key, weight: sw.weight, groups: ids });
            }
            jobs.push(JobLayout { scenarios });
        }
        Ok(VariableLayout { groups, jobs, num_cells: inst.num_cells() })
    }

    /// Cells occupied by a candidate.
    pub fn cells<'a>(&self, inst: &'a Instance, c: &Candidate) -> impl Iterator<Item = usize> + 'a {
        let base = inst.cell(c.group, c.start);
        base..base + c.proc as usize
    }

    /// Placement group indices of one job.
    pub fn job_groups(&self, job: usize) -> impl Iterator<Item = usize> + '_ {
        self.jobs[job].scenarios.iter().flat_map(|s| s.groups.iter().copied())
    }

    /// Candidate index chosen for each placement group of `job` in `schedule`.
    pub fn encode_job(&self, job: usize, js: &JobSchedule) -> Result<Vec<(usize, usize)>, String> {
        let mut out = Vec::new();
        for sc in &self.jobs[job].scenarios {
            for &g in &sc.groups {
                let grp = &self.groups[g];
                let p = js
                    .get(sc.key, grp.op)
                    .ok_or_else(|| format!("job {} scenario {} lacks operation {}", job + 1, sc.key, grp.op + 1))?;
                let k = grp.find(p).ok_or_else(|| {
                    format!(
                        "job {} scenario {} operation {}: start {} on group {} is outside its window",
                        job + 1,
                        sc.key,
                        grp.op + 1,
                        p.start,
                        p.group + 1
                    )
                })?;
                out.push((g, k));
            }
        }
        Ok(out)
    }

    /// Builds a job schedule from one candidate index per placement group.
    pub fn decode_job(&self, job: usize, choice: impl Fn(usize) -> usize) -> JobSchedule {
        let n = self.jobs[job].scenarios[0].groups.len();
        let mut js = JobSchedule { first_pass: Vec::new(), discard: vec![Vec::new(); n], rework: vec![Vec::new(); n] };
        for sc in &self.jobs[job].scenarios {
            let ops: Vec<Placement> =
                sc.groups.iter().map(|&g| self.groups[g].candidates[choice(g)].placement()).collect();
            *js.scenario_mut(sc.key) = ops;
        }
        js
    }

    /// Decodes a full schedule from per-group candidate indices.
    pub fn decode(&self, choice: &[usize]) -> Schedule {
        Schedule { jobs: (0..self.jobs.len()).map(|i| self.decode_job(i, |g| choice[g])).collect() }
    }

    /// Candidate indices for every placement group of a complete schedule.
    pub fn encode(&self, schedule: &Schedule) -> Result<Vec<usize>, String> {
        if schedule.jobs.len() != self.jobs.len() {
            return Err(format!("schedule has {} jobs, expected {}", schedule.jobs.len(), self.jobs.len()));
        }
        let mut choice = vec![usize::MAX; self.groups.len()];
        for (i, js) in schedule.jobs.iter().enumerate() {
            for (g, k) in self.encode_job(i, js)? {
                choice[g] = k;
            }
        }
        Ok(choice)
    }
}
