use crate::instance::{capacity_coefficient, Instance, ScenarioKey};
use crate::schedule::{JobSchedule, Placement, Schedule};
use crate::tolerance::ROW_TOL;

/// Expected-load grid that grows past the horizon on demand.
struct LoadGrid {
    caps: Vec<f64>,
    load: Vec<Vec<f64>>,
}

impl LoadGrid {
    fn new(inst: &Instance) -> Self {
        LoadGrid {
            caps: inst.machine_groups.iter().map(|g| g.capacity as f64).collect(),
            load: vec![Vec::new(); inst.num_groups()],
        }
    }

    fn fits(&self, group: usize, start: u32, dur: u32, w: f64) -> bool {
        let row = &self.load[group];
        (start..start + dur).all(|t| row.get(t as usize).copied().unwrap_or(0.0) + w <= self.caps[group] + ROW_TOL)
    }

    fn add(&mut self, group: usize, start: u32, dur: u32, w: f64) {
        let row = &mut self.load[group];
        let end = (start + dur) as usize;
        if row.len() < end {
            row.resize(end, 0.0);
        }
        for t in start as usize..end {
            row[t] += w;
        }
    }

    /// Earliest start `>= release` on any eligible group, minimizing completion
    /// (ties broken by group index).
    fn earliest(&self, inst: &Instance, job: usize, op: usize, release: u32, w: f64) -> (Placement, u32) {
        let mut best: Option<(u32, usize, u32)> = None;
        for e in &inst.jobs[job].operations[op].eligible {
            let g = e.group - 1;
            let mut t = release.max(1);
            while !self.fits(g, t, e.proc_time, w) {
                t += 1;
            }
            let c = t + e.proc_time - 1;
            if best.map_or(true, |(bc, bg, _)| (c, g) < (bc, bg)) {
                best = Some((c, g, t));
            }
        }
        let (c, g, t) = best.expect("operation has an eligible group");
        (Placement::new(g, t), c)
    }
}

/// List schedule that always exists: jobs in due-date order, each placed at
/// the earliest start with spare expected capacity, first attempt first and
/// then every second-attempt scenario from its shift-aligned release.
///
/// The result may run past `inst.horizon`; see [`greedy_makespan`].
pub fn greedy_schedule(inst: &Instance) -> Schedule {
    let mut order: Vec<usize> = (0..inst.num_jobs()).collect();
    order.sort_by_key(|&i| (inst.jobs[i].due_date, i));
    let mut grid = LoadGrid::new(inst);
    let mut jobs: Vec<Option<JobSchedule>> = vec![None; inst.num_jobs()];
    for i in order {
        let job = &inst.jobs[i];
        let n = job.num_ops();
        let place_chain = |grid: &mut LoadGrid, key: ScenarioKey, release: u32| -> (Vec<Placement>, Vec<u32>) {
            let mut placements = Vec::new();
            let mut completions = Vec::new();
            let mut r = release;
            for op in key.first_op()..n {
                let w = capacity_coefficient(job, key, op);
                let (p, c) = grid.earliest(inst, i, op, r, w);
                let dur = c - p.start + 1;
                grid.add(p.group, p.start, dur, w);
                placements.push(p);
                completions.push(c);
                r = c + 1;
            }
            (placements, completions)
        };
        let (first_pass, fp_completion) = place_chain(&mut grid, ScenarioKey::FirstPass, 1);
        let mut discard = Vec::with_capacity(n);
        let mut rework = Vec::with_capacity(n);
        for j in 0..n {
            let release = inst.restart_release(fp_completion[j]);
            discard.push(place_chain(&mut grid, ScenarioKey::Discard(j), release).0);
            rework.push(place_chain(&mut grid, ScenarioKey::Rework(j), release).0);
        }
        jobs[i] = Some(JobSchedule { first_pass, discard, rework });
    }
    Schedule { jobs: jobs.into_iter().map(|j| j.expect("every job scheduled")).collect() }
}

/// Latest completion over all placements of the greedy schedule.
pub fn greedy_makespan(inst: &Instance) -> u32 {
    makespan(inst, &greedy_schedule(inst))
}

pub fn makespan(inst: &Instance, schedule: &Schedule) -> u32 {
    let mut out = 0;
    for (i, js) in schedule.jobs.iter().enumerate() {
        for (_, op, p) in js.iter() {
            let dur = crate::schedule::proc_time(inst, i, op, p.group).unwrap_or(1);
            out = out.max(p.start + dur - 1);
        }
    }
    out
}
