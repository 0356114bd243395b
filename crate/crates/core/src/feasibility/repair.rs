use super::check::check_feasible;
use crate::instance::Instance;
use crate::milp::{Budget, SolverBackend};
use crate::model::{build_repair_model, evaluate_objective, VariableLayout};
use crate::schedule::Schedule;
use std::time::{Duration, Instant};

#[derive(Debug, Clone)]
pub enum RepairOutcome {
    Repaired { schedule: Schedule, cost: f64, delta: u32 },
    NoImprovement { reason: String },
}

/// Windows and limits for [`repair_schedule`].
#[derive(Debug, Clone)]
pub struct RepairConfig {
    pub delta: u32,
    pub delta_max: u32,
    /// Per attempt.
    pub node_limit: Option<u64>,
    /// Across all attempts.
    pub time_limit: Option<Duration>,
}

/// Searches for a feasible schedule whose beginning times stay within
/// `delta` of the anchor's, doubling `delta` up to `delta_max` while the
/// windowed model has no solution.
pub fn repair_schedule(
    inst: &Instance,
    layout: &VariableLayout,
    anchor: &Schedule,
    cfg: &RepairConfig,
    backend: &SolverBackend,
) -> RepairOutcome {
    let start = Instant::now();
    let mut delta = cfg.delta.min(cfg.delta_max);
    let mut notes = Vec::new();
    loop {
        let remaining = cfg.time_limit.map(|t| t.saturating_sub(start.elapsed()));
        if remaining == Some(Duration::ZERO) {
            notes.push("time budget spent".to_string());
            break;
        }
        let ops = inst.jobs.iter().map(|j| j.num_ops()).max().unwrap_or(0);
        let built = match build_repair_model(inst, layout, anchor, &vec![delta; ops]) {
            Ok(b) => b,
            Err(e) => return RepairOutcome::NoImprovement { reason: e.to_string() },
        };
        let budget = Budget { time_limit: remaining, node_limit: cfg.node_limit, warm_start: None };
        match backend.solve(&built.model, &budget) {
            Ok(sol) if sol.has_solution() => {
                let schedule = built.decode(layout, &sol.values);
                if let Err(v) = check_feasible(inst, &schedule) {
                    // the model and the checker disagree; never hand this out
                    log::error!("repair produced a schedule failing the checker: {}", v[0]);
                    notes.push(format!("delta {delta}: checker rejected solver output"));
                } else {
                    let cost = evaluate_objective(inst, &schedule).expect("decoded schedule is complete");
                    return RepairOutcome::Repaired { schedule, cost, delta };
                }
            }
            Ok(sol) => notes.push(format!("delta {delta}: {:?}", sol.status)),
            Err(e) => notes.push(format!("delta {delta}: {e}")),
        }
        if delta >= cfg.delta_max {
            break;
        }
        delta = (delta * 2).max(1).min(cfg.delta_max);
    }
    RepairOutcome::NoImprovement { reason: notes.join("; ") }
}
