#![allow(dead_code)]

use jobshop_core::instance::{Eligibility, Instance, Job, MachineGroup, OperationSpec};
use jobshop_core::model::VariableLayout;
use jobshop_core::schedule::{JobSchedule, Placement, Schedule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn job(id: usize, due: u32, ps: f64, pr: f64, ops: &[(usize, u32)]) -> Job {
    Job {
        id,
        weight: 1.0,
        due_date: due,
        scrap_prob: ps,
        rework_prob: pr,
        operations: ops.iter().map(|&(g, p)| OperationSpec::single(g, p)).collect(),
    }
}

pub fn instance(jobs: Vec<Job>, caps: &[u32], horizon: u32, shift: u32) -> Instance {
    Instance {
        jobs,
        machine_groups: caps.iter().enumerate().map(|(k, &c)| MachineGroup { id: k + 1, capacity: c }).collect(),
        horizon,
        shift_length: shift,
        ceiling_epsilon: 1e-3,
    }
}

/// Random instance with at most 3 jobs, 3 operations per job, 2 groups and
/// horizon 15, drawn until the product of placement-group sizes is at most `cap`.
pub fn tiny_instance(seed: u64, cap: f64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let groups = rng.gen_range(1..=2usize);
        let n_jobs = rng.gen_range(1..=3usize);
        let shift = rng.gen_range(2..=4u32);
        let mut jobs = Vec::new();
        for i in 0..n_jobs {
            let n_ops = rng.gen_range(1..=3usize);
            let operations = (0..n_ops)
                .map(|_| {
                    let mut eligible =
                        vec![Eligibility { group: rng.gen_range(1..=groups), proc_time: rng.gen_range(1..=2) }];
                    if groups == 2 && rng.gen_bool(0.3) {
                        let other = 3 - eligible[0].group;
                        eligible.push(Eligibility { group: other, proc_time: rng.gen_range(1..=2) });
                    }
                    OperationSpec { eligible, scrap_prob: None, rework_prob: None }
                })
                .collect();
            jobs.push(Job {
                id: i + 1,
                weight: rng.gen_range(1..=3) as f64,
                due_date: rng.gen_range(1..=6),
                scrap_prob: [0.05, 0.1, 0.3][rng.gen_range(0..3)],
                rework_prob: [0.0, 0.2, 0.5][rng.gen_range(0..3)],
                operations,
            });
        }
        let caps: Vec<u32> = (0..groups).map(|_| rng.gen_range(1..=2)).collect();
        let horizon = rng.gen_range(8..=15);
        let inst = instance(jobs, &caps, horizon, shift);
        if !inst.validate().is_empty() {
            continue;
        }
        let Ok(layout) = VariableLayout::new(&inst) else {
            continue;
        };
        let size: f64 = layout.groups.iter().map(|g| g.candidates.len() as f64).product();
        if size <= cap {
            return inst;
        }
    }
}

/// Complete schedule with uniformly random eligible groups and start times in `1..=T`.
/// Usually infeasible; meant for checks of objective and checker semantics.
pub fn random_schedule(inst: &Instance, rng: &mut impl Rng) -> Schedule {
    let jobs = inst
        .jobs
        .iter()
        .map(|job| {
            let mut chain = |from: usize| -> Vec<Placement> {
                job.operations[from..]
                    .iter()
                    .map(|op| {
                        let e = &op.eligible[rng.gen_range(0..op.eligible.len())];
                        Placement::new(Instance::group_index(e.group), rng.gen_range(1..=inst.horizon))
                    })
                    .collect()
            };
            let first_pass = chain(0);
            let n = job.num_ops();
            let mut discard = Vec::new();
            let mut rework = Vec::new();
            for j in 0..n {
                discard.push(chain(0));
                rework.push(chain(j));
            }
            JobSchedule { first_pass, discard, rework }
        })
        .collect();
    Schedule { jobs }
}
