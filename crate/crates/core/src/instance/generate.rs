use super::{Eligibility, Instance, Job, MachineGroup, OperationSpec, DEFAULT_CEILING_EPSILON};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// How operations are mapped onto machine groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Routing {
    /// Operation `j` of every job runs on group `j mod groups`.
    Dedicated,
    /// Every operation gets `eligible` distinct groups drawn uniformly, each
    /// with its own processing time.
    Random { eligible: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub jobs: usize,
    pub ops_per_job: usize,
    pub groups: usize,
    /// Inclusive processing-time range.
    pub proc_range: (u32, u32),
    /// Inclusive due-date range.
    pub due_range: (u32, u32),
    pub capacities: Vec<u32>,
    pub scrap: f64,
    pub rework: f64,
    pub shift_length: u32,
    pub routing: Routing,
    /// Explicit horizon; `None` sizes it automatically.
    pub horizon: Option<u32>,
    pub seed: u64,
}

impl GeneratorConfig {
    /// Short-processing family: 20 jobs, 5 operations, 5 dedicated groups,
    /// U[1,5] processing and U[10,40] due dates.
    pub fn example1_family(seed: u64) -> Self {
        GeneratorConfig {
            jobs: 20,
            ops_per_job: 5,
            groups: 5,
            proc_range: (1, 5),
            due_range: (10, 40),
            capacities: vec![2, 3, 2, 2, 3],
            scrap: 0.05,
            rework: 0.2,
            shift_length: 8,
            routing: Routing::Dedicated,
            horizon: None,
            seed,
        }
    }

    /// Long-processing family: U[1,50] processing and due dates scaled by ten.
    pub fn example2_family(jobs: usize, seed: u64) -> Self {
        GeneratorConfig {
            jobs,
            proc_range: (1, 50),
            due_range: (100, 400),
            shift_length: 80,
            ..Self::example1_family(seed)
        }
    }
}

/// Draws a random instance. The result is a pure function of `cfg`.
pub fn generate_instance(cfg: &GeneratorConfig) -> Result<Instance, String> {
    if cfg.capacities.len() != cfg.groups {
        return Err(format!("capacities has {} entries but there are {} groups", cfg.capacities.len(), cfg.groups));
    }
    if cfg.jobs == 0 || cfg.ops_per_job == 0 || cfg.groups == 0 {
        return Err("jobs, ops_per_job and groups must be positive".into());
    }
    let (plo, phi) = cfg.proc_range;
    let (dlo, dhi) = cfg.due_range;
    if plo < 1 || plo > phi {
        return Err(format!("invalid processing-time range [{plo},{phi}]"));
    }
    if dlo < 1 || dlo > dhi {
        return Err(format!("invalid due-date range [{dlo},{dhi}]"));
    }
    if cfg.shift_length == 0 {
        return Err("shift_length must be positive".into());
    }
    if let Routing::Random { eligible } = cfg.routing {
        if eligible == 0 || eligible > cfg.groups {
            return Err(format!("eligible groups per operation must be in 1..={}", cfg.groups));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut jobs = Vec::with_capacity(cfg.jobs);
    for i in 0..cfg.jobs {
        let mut operations = Vec::with_capacity(cfg.ops_per_job);
        for j in 0..cfg.ops_per_job {
            let eligible = match cfg.routing {
                Routing::Dedicated => {
                    vec![Eligibility { group: j % cfg.groups + 1, proc_time: rng.gen_range(plo..=phi) }]
                }
                Routing::Random { eligible } => {
                    let mut groups: Vec<usize> = (1..=cfg.groups).collect();
                    // partial Fisher-Yates keeps draws in a fixed order
                    for k in 0..eligible {
                        let pick = rng.gen_range(k..groups.len());
                        groups.swap(k, pick);
                    }
                    let mut chosen: Vec<usize> = groups[..eligible].to_vec();
                    chosen.sort_unstable();
                    chosen.into_iter().map(|group| Eligibility { group, proc_time: rng.gen_range(plo..=phi) }).collect()
                }
            };
            operations.push(OperationSpec { eligible, scrap_prob: None, rework_prob: None });
        }
        jobs.push(Job {
            id: i + 1,
            weight: 1.0,
            due_date: rng.gen_range(dlo..=dhi),
            scrap_prob: cfg.scrap,
            rework_prob: cfg.rework,
            operations,
        });
    }
    let mut inst = Instance {
        jobs,
        machine_groups: cfg
            .capacities
            .iter()
            .enumerate()
            .map(|(k, &capacity)| MachineGroup { id: k + 1, capacity })
            .collect(),
        horizon: 0,
        shift_length: cfg.shift_length,
        ceiling_epsilon: DEFAULT_CEILING_EPSILON.min(0.5 / cfg.shift_length as f64),
    };
    inst.horizon = match cfg.horizon {
        Some(t) => t,
        None => auto_horizon(&inst),
    };
    Ok(inst)
}

/// The bundled 20-job base case with due dates scaled by ten, processing
/// times redrawn from U[1,50] and shifts of 80 blocks.
pub fn example2_base(seed: u64) -> Instance {
    let mut inst = super::example1();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    inst.shift_length = 80;
    for job in &mut inst.jobs {
        job.due_date *= 10;
        for op in &mut job.operations {
            for e in &mut op.eligible {
                e.proc_time = rng.gen_range(1..=50);
            }
        }
    }
    inst.horizon = auto_horizon(&inst);
    inst
}

/// The default horizon, extended when needed so that the greedy serial
/// schedule fits.
pub fn auto_horizon(inst: &Instance) -> u32 {
    let rule = inst.default_horizon();
    let greedy = crate::feasibility::greedy_makespan(inst);
    rule.max(inst.round_up_to_shift(greedy))
}
