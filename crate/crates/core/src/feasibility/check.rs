use crate::instance::{capacity_coefficient, Instance, ScenarioKey};
use crate::schedule::{proc_time, Schedule};
use crate::tolerance::ROW_TOL;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Incomplete(String),
    Horizon { job: usize, scenario: ScenarioKey, op: usize, start: u32, completion: u32 },
    Precedence { job: usize, scenario: ScenarioKey, op: usize, start: u32, previous_completion: u32 },
    Restart { job: usize, scenario: ScenarioKey, start: u32, trigger_completion: u32 },
    Shift { job: usize, scenario: ScenarioKey, start: u32, earliest: u32 },
    Capacity { group: usize, t: u32, load: f64, capacity: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Incomplete(msg) => write!(f, "incomplete schedule: {msg}"),
            Violation::Horizon { job, scenario, op, start, completion } => write!(
                f,
                "horizon: job {} op {} ({scenario}) occupies {start}..={completion} outside the horizon",
                job + 1,
                op + 1
            ),
            Violation::Precedence { job, scenario, op, start, previous_completion } => write!(
                f,
                "precedence: job {} op {} ({scenario}) starts at {start} but the previous operation completes at {previous_completion}",
                job + 1,
                op + 1
            ),
            Violation::Restart { job, scenario, start, trigger_completion } => write!(
                f,
                "restart: job {} {scenario} starts at {start} but the triggering operation completes at {trigger_completion}",
                job + 1
            ),
            Violation::Shift { job, scenario, start, earliest } => write!(
                f,
                "shift: job {} {scenario} starts at {start}, before the next shift start {earliest}",
                job + 1
            ),
            Violation::Capacity { group, t, load, capacity } => write!(
                f,
                "capacity: group {} at time {t} carries expected load {load:.6} > {capacity}",
                group + 1
            ),
        }
    }
}

/// Re-checks every scheduling rule directly on start times.
///
/// Returns `Ok(())` or every violation found. The shift rule uses an integer
/// ceiling, so no epsilon is involved; expected capacity is compared with
/// tolerance [`ROW_TOL`].
pub fn check_feasible(inst: &Instance, schedule: &Schedule) -> Result<(), Vec<Violation>> {
    if let Err(e) = schedule.check_complete(inst) {
        return Err(vec![Violation::Incomplete(e.to_string())]);
    }
    let mut out = Vec::new();
    let t_max = inst.horizon;
    let mut load = vec![0.0f64; inst.num_cells()];
    for (i, (js, job)) in schedule.jobs.iter().zip(&inst.jobs).enumerate() {
        for key in ScenarioKey::all(job.num_ops()) {
            let first = key.first_op();
            let mut prev_completion: Option<u32> = None;
            for (k, p) in js.scenario(key).iter().enumerate() {
                let op = first + k;
                let dur = proc_time(inst, i, op, p.group).expect("checked by check_complete");
                let completion = p.start + dur - 1;
                if p.start < 1 || completion > t_max {
                    out.push(Violation::Horizon { job: i, scenario: key, op, start: p.start, completion });
                }
                if let Some(pc) = prev_completion {
                    if p.start < pc + 1 {
                        out.push(Violation::Precedence {
                            job: i,
                            scenario: key,
                            op,
                            start: p.start,
                            previous_completion: pc,
                        });
                    }
                }
                prev_completion = Some(completion);
                let w = capacity_coefficient(job, key, op);
                for t in p.start.max(1)..=completion.min(t_max) {
                    load[inst.cell(p.group, t)] += w;
                }
            }
            if let Some(trigger) = key.trigger() {
                let start = js.scenario(key)[0].start;
                let tc = schedule.completion(inst, i, ScenarioKey::FirstPass, trigger).expect("complete");
                if start < tc + 1 {
                    out.push(Violation::Restart { job: i, scenario: key, start, trigger_completion: tc });
                }
                let earliest = inst.restart_release(tc);
                if start < earliest {
                    out.push(Violation::Shift { job: i, scenario: key, start, earliest });
                }
            }
        }
    }
    for g in 0..inst.num_groups() {
        let cap = inst.capacity(g);
        for t in 1..=t_max {
            let l = load[inst.cell(g, t)];
            if l > cap as f64 + ROW_TOL {
                out.push(Violation::Capacity { group: g, t, load: l, capacity: cap });
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Expected load per capacity cell (`Instance::cell` indexing).
pub fn expected_load(inst: &Instance, schedule: &Schedule) -> Vec<f64> {
    let mut load = vec![0.0f64; inst.num_cells()];
    for (i, js) in schedule.jobs.iter().enumerate() {
        let job = &inst.jobs[i];
        for (key, op, p) in js.iter() {
            let dur = proc_time(inst, i, op, p.group).unwrap_or(0);
            let w = capacity_coefficient(job, key, op);
            for t in p.start.max(1)..(p.start + dur).min(inst.horizon + 1) {
                load[inst.cell(p.group, t)] += w;
            }
        }
    }
    load
}
