use super::dp::{group_base, group_count, job_load, job_tardiness, solve_job};
use super::{
    cell_cost, compute_stepsize, detect_divergence, evaluate_dual_bound, update_level, update_multipliers, HyperParams,
    LevelRecord, StepError,
};
use crate::feasibility::{
    check_feasible, compute_gap, greedy_schedule, repair_schedule, GapReport, RepairConfig, RepairOutcome,
};
use crate::instance::Instance;
use crate::milp::{Budget, SolverBackend};
use crate::model::{build_subproblem_model, evaluate_objective, VariableLayout};
use crate::schedule::Schedule;
use crate::tolerance::GAP_ABS_TOL;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::time::{Duration, Instant};

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub params: HyperParams,
    /// Stop once the relative duality gap is at most this.
    pub target_gap: f64,
    pub time_limit: Option<Duration>,
    pub max_iterations: Option<usize>,
    /// Certified bound cadence in iterations.
    pub bound_every: usize,
    /// Feasibility search cadence in iterations, on top of the residual trigger (0: residual trigger only).
    pub repair_every: usize,
    pub delta: u32,
    /// `None`: the shift length.
    pub delta_max: Option<u32>,
    pub repair_nodes: Option<u64>,
    pub repair_time: Option<Duration>,
    pub backend: SolverBackend,
    pub initial_multipliers: Option<Vec<f64>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            params: HyperParams::default(),
            target_gap: 0.10,
            time_limit: None,
            max_iterations: None,
            bound_every: 20,
            repair_every: 0,
            delta: 2,
            delta_max: None,
            repair_nodes: Some(20_000),
            repair_time: Some(Duration::from_secs(10)),
            backend: SolverBackend::Builtin,
            initial_multipliers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub k: usize,
    #[serde(rename = "L")]
    pub lagrangian: f64,
    pub g_norm: f64,
    pub step: f64,
    pub level: f64,
    pub rho: f64,
    pub best_bound: f64,
    pub best_feasible: f64,
    pub wall_ms: u128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StopReason {
    TargetGap,
    TimeLimit,
    IterationLimit,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub schedule: Option<Schedule>,
    pub cost: f64,
    pub gap: GapReport,
    pub iterations: usize,
    pub stop: StopReason,
    pub wall_time: f64,
    pub params: HyperParams,
    pub beta: f64,
    pub rho_max: f64,
    pub eps_violation: f64,
    pub level_updates: usize,
    pub repairs_attempted: usize,
    pub repairs_succeeded: usize,
    pub bound_checks: usize,
    /// Certified bounds that exceeded a feasible cost (should stay zero).
    pub bound_violations: usize,
    /// Schedules emitted by the repair step that failed the checker (should stay zero).
    pub infeasible_emitted: usize,
    pub multipliers: Vec<f64>,
    #[serde(skip)]
    pub log: Vec<ConvergenceRow>,
}

/// State of the dual iteration.
pub struct DualEngine<'a> {
    inst: &'a Instance,
    layout: &'a VariableLayout,
    opts: SolveOptions,
    beta: f64,
    rho_max: f64,
    eps_violation: f64,
    pub lambda: Vec<f64>,
    pub rho: f64,
    pub level: f64,
    pub step: f64,
    pub k: usize,
    window: VecDeque<Vec<f64>>,
    records: VecDeque<LevelRecord>,
    choice: Vec<Vec<usize>>,
    job_loads: Vec<Vec<(usize, f64)>>,
    tardiness: Vec<f64>,
    load: Vec<f64>,
    capacity: Vec<f64>,
    next_job: usize,
    best: Option<(Schedule, f64)>,
    best_bound: f64,
    bound_iteration: Option<usize>,
    level_updates: usize,
    repairs_attempted: usize,
    repairs_succeeded: usize,
    bound_checks: usize,
    bound_violations: usize,
    infeasible_emitted: usize,
    bounds_seen: Vec<f64>,
    last_anchor: Option<Schedule>,
    start: Instant,
}

/// Residual after optimal slack, and the penalized cost, of every cell.
fn surrogate(load: &[f64], capacity: &[f64], lambda: &[f64], rho: f64) -> (Vec<f64>, f64) {
    let mut g = Vec::with_capacity(load.len());
    let mut total = 0.0;
    for c in 0..load.len() {
        let r = load[c] - capacity[c];
        let (cost, z) = cell_cost(r, lambda[c], rho);
        g.push(r + z);
        total += cost;
    }
    (g, total)
}

impl<'a> DualEngine<'a> {
    pub fn new(inst: &'a Instance, layout: &'a VariableLayout, opts: SolveOptions) -> Result<Self, String> {
        opts.params.validate()?;
        let cells = layout.num_cells;
        let t = inst.horizon as usize;
        let capacity: Vec<f64> = (0..cells).map(|c| inst.capacity(c / t) as f64).collect();
        let avg_w = inst.jobs.iter().map(|j| j.weight).sum::<f64>() / inst.num_jobs().max(1) as f64;
        let beta = opts.params.beta.unwrap_or(0.05 * avg_w);
        let rho_max = opts.params.rho_max.unwrap_or(20.0 * avg_w).max(opts.params.rho0);
        let cap_norm = capacity.iter().map(|c| c * c).sum::<f64>().sqrt();
        let eps_violation = opts.params.eps_violation.unwrap_or(1e-3 * cap_norm);
        let lambda = match &opts.initial_multipliers {
            Some(l) if l.len() == cells => l.iter().map(|x| x.max(0.0)).collect(),
            Some(l) => return Err(format!("initial multipliers have {} entries, expected {cells}", l.len())),
            None => vec![0.0; cells],
        };
        let rho = opts.params.rho0;
        let mut engine = DualEngine {
            inst,
            layout,
            opts,
            beta,
            rho_max,
            eps_violation,
            window: VecDeque::from([lambda.clone()]),
            lambda,
            rho,
            level: f64::INFINITY,
            step: 0.0,
            k: 0,
            records: VecDeque::new(),
            choice: vec![Vec::new(); inst.num_jobs()],
            job_loads: vec![Vec::new(); inst.num_jobs()],
            tardiness: vec![0.0; inst.num_jobs()],
            load: vec![0.0; cells],
            capacity,
            next_job: 0,
            best: None,
            best_bound: f64::NEG_INFINITY,
            bound_iteration: None,
            level_updates: 0,
            repairs_attempted: 0,
            repairs_succeeded: 0,
            bound_checks: 0,
            bound_violations: 0,
            infeasible_emitted: 0,
            bounds_seen: Vec::new(),
            last_anchor: None,
            start: Instant::now(),
        };
        let greedy = greedy_schedule(inst);
        if check_feasible(inst, &greedy).is_ok() {
            let cost = evaluate_objective(inst, &greedy).map_err(|e| e.to_string())?;
            engine.offer_feasible(greedy, cost);
        }
        // relaxed solution at the initial prices, one job after another
        for i in 0..inst.num_jobs() {
            let sol = engine
                .solve_subproblem(i)
                .ok_or_else(|| format!("job {} has no placement within the horizon", i + 1))?;
            engine.install(i, sol);
        }
        let (g, penalty) = surrogate(&engine.load, &engine.capacity, &engine.lambda, engine.rho);
        let value = engine.tardiness.iter().sum::<f64>() + penalty;
        engine.level = match &engine.best {
            Some((_, cost)) => *cost,
            None => value + g.iter().map(|x| x * x).sum::<f64>(),
        };
        Ok(engine)
    }

    pub fn best_feasible(&self) -> Option<&(Schedule, f64)> {
        self.best.as_ref()
    }

    pub fn best_bound(&self) -> f64 {
        self.best_bound
    }

    pub fn gap(&self) -> GapReport {
        let f = self.best.as_ref().map_or(f64::INFINITY, |b| b.1);
        let mut g = compute_gap(f, self.best_bound);
        g.bound_iteration = self.bound_iteration;
        g
    }

    /// Current relaxed schedule (usually capacity-infeasible).
    pub fn relaxed_schedule(&self) -> Schedule {
        Schedule {
            jobs: (0..self.inst.num_jobs())
                .map(|i| {
                    let base = group_base(self.layout, i);
                    self.layout.decode_job(i, |g| self.choice[i][g - base])
                })
                .collect(),
        }
    }

    fn offer_feasible(&mut self, schedule: Schedule, cost: f64) {
        for &b in &self.bounds_seen {
            if b > cost + GAP_ABS_TOL * cost.abs().max(1.0) {
                self.bound_violations += 1;
                log::error!("certified bound {b} exceeds feasible cost {cost}");
            }
        }
        if self.best.as_ref().map_or(true, |(_, c)| cost < *c) {
            self.best = Some((schedule, cost));
        }
    }

    fn install(&mut self, i: usize, choice: Vec<usize>) {
        for &(c, a) in &self.job_loads[i] {
            self.load[c] -= a;
        }
        let loads = job_load(self.inst, self.layout, i, &choice);
        for &(c, a) in &loads {
            self.load[c] += a;
        }
        self.tardiness[i] = job_tardiness(self.inst, self.layout, i, &choice);
        self.job_loads[i] = loads;
        self.choice[i] = choice;
    }

    /// Residual of every cell without job `i` and before slack.
    fn base_without(&self, i: usize) -> Vec<f64> {
        let mut base: Vec<f64> = self.load.iter().zip(&self.capacity).map(|(l, c)| l - c).collect();
        for &(c, a) in &self.job_loads[i] {
            base[c] -= a;
        }
        base
    }

    /// Job `i`'s share of the surrogate value on top of `base`.
    fn penalized(&self, i: usize, choice: &[usize], base: &[f64]) -> f64 {
        let mut own: Vec<(usize, f64)> = job_load(self.inst, self.layout, i, choice);
        own.sort_by_key(|e| e.0);
        let mut total = job_tardiness(self.inst, self.layout, i, choice);
        let mut idx = 0;
        while idx < own.len() {
            let c = own[idx].0;
            let mut add = 0.0;
            while idx < own.len() && own[idx].0 == c {
                add += own[idx].1;
                idx += 1;
            }
            total +=
                cell_cost(base[c] + add, self.lambda[c], self.rho).0 - cell_cost(base[c], self.lambda[c], self.rho).0;
        }
        total
    }

    /// Best placement of job `i` against the other jobs' current loads.
    fn solve_subproblem(&self, i: usize) -> Option<Vec<usize>> {
        let base = self.base_without(i);
        let (lambda, rho, inst, layout) = (&self.lambda, self.rho, self.inst, self.layout);
        let price = |g: usize, k: usize| {
            let grp = &layout.groups[g];
            layout
                .cells(inst, &grp.candidates[k])
                .map(|c| cell_cost(base[c] + grp.coef, lambda[c], rho).0 - cell_cost(base[c], lambda[c], rho).0)
                .sum::<f64>()
        };
        let dp = solve_job(inst, layout, i, &price)?.choice;
        let polish =
            self.opts.params.subproblem_nodes > 0 || matches!(self.opts.backend, SolverBackend::External { .. });
        if !polish {
            return Some(dp);
        }
        let fixed: Vec<f64> = base.iter().zip(&self.capacity).map(|(b, c)| b + c).collect();
        let built = match build_subproblem_model(inst, layout, &[i], &fixed, lambda, rho) {
            Ok(b) => b,
            Err(e) => {
                log::warn!("subproblem model for job {}: {e}", i + 1);
                return Some(dp);
            }
        };
        let gbase = group_base(layout, i);
        let mut full_choice = vec![usize::MAX; layout.groups.len()];
        for (off, &k) in dp.iter().enumerate() {
            full_choice[gbase + off] = k;
        }
        let budget = Budget::nodes(self.opts.params.subproblem_nodes).with_warm_start(built.warm_start(&full_choice));
        let milp_choice = match self.opts.backend.solve(&built.model, &budget) {
            Ok(sol) if sol.has_solution() => {
                let all = built.choice(&sol.values);
                Some(all[gbase..gbase + group_count(layout, i)].to_vec())
            }
            _ => None,
        };
        match milp_choice {
            Some(m) if self.penalized(i, &m, &base) < self.penalized(i, &dp, &base) => Some(m),
            _ => Some(dp),
        }
    }

    /// Runs subproblem solving and the multiplier, level and penalty updates of one iteration.
    pub fn dual_iteration(&mut self) -> ConvergenceRow {
        let n = self.inst.num_jobs();
        let gs = self.opts.params.group_size.min(n);
        let groups_per_sweep = n.div_ceil(gs);
        for _ in 0..groups_per_sweep {
            let subset: Vec<usize> = (0..gs).map(|d| (self.next_job + d) % n).collect();
            self.next_job = (self.next_job + gs) % n;
            let proposals: Vec<Option<Vec<usize>>> = subset.par_iter().map(|&i| self.solve_subproblem(i)).collect();
            let mut accepted = false;
            for (&i, prop) in subset.iter().zip(proposals) {
                let Some(new) = prop else { continue };
                let base = self.base_without(i);
                let old_value = self.penalized(i, &self.choice[i], &base);
                let new_value = self.penalized(i, &new, &base);
                if new_value < old_value - 1e-12 * old_value.abs().max(1.0) {
                    self.install(i, new);
                    accepted = true;
                }
            }
            if accepted {
                break;
            }
        }
        let (g, penalty) = surrogate(&self.load, &self.capacity, &self.lambda, self.rho);
        let value = self.tardiness.iter().sum::<f64>() + penalty;
        let norm_sq: f64 = g.iter().map(|x| x * x).sum();
        let near_feasible = norm_sq.sqrt() <= self.eps_violation;
        let step = if near_feasible {
            0.0
        } else {
            match compute_stepsize(self.level, value, norm_sq, self.opts.params.gamma, self.opts.params.zeta) {
                Ok(s) => s,
                Err(StepError::Stationary) => 0.0,
                Err(StepError::LevelBreach { .. }) => {
                    let mut recs: Vec<LevelRecord> = self.records.iter().copied().collect();
                    recs.push(LevelRecord { step: self.step, norm_sq, value });
                    let mut level = update_level(&recs, self.opts.params.gamma).unwrap_or(value);
                    if level <= value {
                        level = value + 1e-3 * value.abs().max(1.0);
                    }
                    self.level = level;
                    self.level_updates += 1;
                    self.reset_window();
                    compute_stepsize(self.level, value, norm_sq, self.opts.params.gamma, self.opts.params.zeta)
                        .unwrap_or(0.0)
                }
            }
        };
        update_multipliers(&mut self.lambda, step, &g);
        self.step = step;
        self.window.push_back(self.lambda.clone());
        self.records.push_back(LevelRecord { step, norm_sq, value });
        if self.window.len() >= 3 && detect_divergence(self.window.make_contiguous()).is_diverging() {
            let recs: Vec<LevelRecord> = self.records.iter().copied().collect();
            let level = update_level(&recs, self.opts.params.gamma).expect("window has records");
            debug_assert!(recs.iter().any(|r| level > r.value));
            self.level = level;
            self.level_updates += 1;
            self.reset_window();
        } else if self.window.len() > self.opts.params.window_cap {
            self.window.pop_front();
            self.records.pop_front();
        }
        self.rho = (self.rho + self.beta).min(self.rho_max);
        self.k += 1;
        let g_norm = norm_sq.sqrt();
        let best_feasible = self.best.as_ref().map_or(f64::INFINITY, |b| b.1);
        let row = ConvergenceRow {
            k: self.k,
            lagrangian: value,
            g_norm,
            step,
            level: self.level,
            rho: self.rho,
            best_bound: self.best_bound,
            best_feasible,
            wall_ms: self.start.elapsed().as_millis(),
        };
        if near_feasible || (self.opts.repair_every > 0 && self.k % self.opts.repair_every == 0) {
            self.search_feasible();
        }
        row
    }

    fn reset_window(&mut self) {
        self.window.clear();
        self.records.clear();
        self.window.push_back(self.lambda.clone());
    }

    /// Certified bound at the current multipliers.
    pub fn evaluate_bound(&mut self) -> f64 {
        let q = evaluate_dual_bound(self.inst, self.layout, &self.lambda);
        self.bound_checks += 1;
        self.bounds_seen.push(q);
        if let Some((_, cost)) = &self.best {
            if q > cost + GAP_ABS_TOL * cost.abs().max(1.0) {
                self.bound_violations += 1;
                log::error!("certified bound {q} exceeds feasible cost {cost}");
            }
        }
        if q > self.best_bound {
            self.best_bound = q;
            self.bound_iteration = Some(self.k);
        }
        q
    }

    /// Repairs the current relaxed schedule into a feasible one.
    pub fn search_feasible(&mut self) -> bool {
        let anchor = self.relaxed_schedule();
        if self.last_anchor.as_ref() == Some(&anchor) {
            return false;
        }
        self.last_anchor = Some(anchor.clone());
        self.repairs_attempted += 1;
        let cfg = RepairConfig {
            delta: self.opts.delta,
            delta_max: self.opts.delta_max.unwrap_or(self.inst.shift_length),
            node_limit: self.opts.repair_nodes,
            time_limit: self.opts.repair_time,
        };
        match repair_schedule(self.inst, self.layout, &anchor, &cfg, &self.opts.backend) {
            RepairOutcome::Repaired { schedule, cost, delta } => {
                if check_feasible(self.inst, &schedule).is_err() {
                    self.infeasible_emitted += 1;
                    return false;
                }
                log::debug!("iteration {}: repaired schedule with cost {cost:.4} (delta {delta})", self.k);
                self.repairs_succeeded += 1;
                self.offer_feasible(schedule, cost);
                true
            }
            RepairOutcome::NoImprovement { reason } => {
                log::debug!("iteration {}: repair failed: {reason}", self.k);
                false
            }
        }
    }

    pub fn into_report(self, stop: StopReason, log: Vec<ConvergenceRow>) -> SolveReport {
        let gap = self.gap();
        let (schedule, cost) = match self.best {
            Some((s, c)) => (Some(s), c),
            None => (None, f64::INFINITY),
        };
        SolveReport {
            schedule,
            cost,
            gap,
            iterations: self.k,
            stop,
            wall_time: self.start.elapsed().as_secs_f64(),
            params: self.opts.params.clone(),
            beta: self.beta,
            rho_max: self.rho_max,
            eps_violation: self.eps_violation,
            level_updates: self.level_updates,
            repairs_attempted: self.repairs_attempted,
            repairs_succeeded: self.repairs_succeeded,
            bound_checks: self.bound_checks,
            bound_violations: self.bound_violations,
            infeasible_emitted: self.infeasible_emitted,
            multipliers: self.lambda,
            log,
        }
    }
}

/// Runs the dual loop until the gap target, the time limit or the iteration limit.
pub fn solve(inst: &Instance, layout: &VariableLayout, opts: SolveOptions) -> Result<SolveReport, String> {
    let time_limit = opts.time_limit;
    let max_iter = opts.max_iterations;
    let bound_every = opts.bound_every.max(1);
    let target = opts.target_gap;
    let mut engine = DualEngine::new(inst, layout, opts)?;
    engine.evaluate_bound();
    let mut log = Vec::new();
    let stop = loop {
        if engine.best.is_some() && engine.gap().gap <= target {
            break StopReason::TargetGap;
        }
        if time_limit.is_some_and(|t| engine.start.elapsed() >= t) {
            break StopReason::TimeLimit;
        }
        if max_iter.is_some_and(|m| engine.k >= m) {
            break StopReason::IterationLimit;
        }
        let mut row = engine.dual_iteration();
        if engine.k % bound_every == 0 {
            engine.evaluate_bound();
        }
        row.best_bound = engine.best_bound;
        row.best_feasible = engine.best.as_ref().map_or(f64::INFINITY, |b| b.1);
        log.push(row);
    };
    engine.evaluate_bound();
    if let Some(last) = log.last_mut() {
        last.best_bound = engine.best_bound;
        last.best_feasible = engine.best.as_ref().map_or(f64::INFINITY, |b| b.1);
    }
    Ok(engine.into_report(stop, log))
}
