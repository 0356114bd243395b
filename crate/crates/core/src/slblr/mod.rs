//! Surrogate level-based Lagrangian relaxation of the capacity rows.
//!
//! Capacity is priced by multipliers on every (group, time) cell. Each
//! iteration re-solves one job against the current prices and an l1 penalty
//! on the capacity residual, then moves the multipliers along the residual
//! with a Polyak-type step whose target value (the level) is re-estimated
//! whenever the multiplier iterates provably stop contracting.

mod bound;
mod dp;
mod engine;

pub use bound::{dual_subgradient, evaluate_dual_bound};
pub use engine::{solve, ConvergenceRow, DualEngine, SolveOptions, SolveReport, StopReason};

use crate::feasibility::expected_load;
use crate::instance::Instance;
use crate::milp::{solve_lp_feasibility, LinearRow, LpVerdict};
use crate::model::evaluate_objective;
use crate::schedule::{Schedule, ScheduleError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    /// Fraction of the Polyak step, in (0, 1).
    pub gamma: f64,
    /// Extra damping for steps computed from overestimated levels, in (0, 1).
    pub zeta: f64,
    /// Additive penalty growth per iteration. `None`: 5% of the average job weight.
    pub beta: Option<f64>,
    pub rho0: f64,
    /// `None`: 20 times the average job weight.
    pub rho_max: Option<f64>,
    /// Residual norm that triggers a feasibility search. `None`: 1e-3 of the capacity vector norm.
    pub eps_violation: Option<f64>,
    /// Maximum number of multiplier iterates kept for divergence detection.
    pub window_cap: usize,
    /// Jobs re-optimized per iteration.
    pub group_size: usize,
    /// Branch-and-bound nodes spent polishing each subproblem (0: chain DP only).
    pub subproblem_nodes: u64,
}

impl Default for HyperParams {
    fn default() -> Self {
        HyperParams {
            gamma: 0.5,
            zeta: 0.95,
            beta: None,
            rho0: 0.0,
            rho_max: None,
            eps_violation: None,
            window_cap: 40,
            group_size: 1,
            subproblem_nodes: 0,
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<(), String> {
        let mut errs = Vec::new();
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            errs.push(format!("gamma must lie in (0, 1), got {}", self.gamma));
        }
        if !(self.zeta > 0.0 && self.zeta < 1.0) {
            errs.push(format!("zeta must lie in (0, 1), got {}", self.zeta));
        }
        if let Some(b) = self.beta {
            if !(b >= 0.0 && b.is_finite()) {
                errs.push(format!("beta must be nonnegative, got {b}"));
            }
        }
        if !(self.rho0 >= 0.0 && self.rho0.is_finite()) {
            errs.push(format!("rho0 must be nonnegative, got {}", self.rho0));
        }
        if let Some(r) = self.rho_max {
            if !(r >= self.rho0) {
                errs.push(format!("rho_max ({r}) must be at least rho0 ({})", self.rho0));
            }
        }
        if let Some(e) = self.eps_violation {
            if !(e > 0.0) {
                errs.push(format!("eps_violation must be positive, got {e}"));
            }
        }
        if self.window_cap < 2 {
            errs.push("window_cap must be at least 2".into());
        }
        if self.group_size == 0 {
            errs.push("group_size must be at least 1".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs.join("; "))
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum StepError {
    /// Zero residual: the current relaxed solution satisfies capacity exactly.
    #[error("surrogate subgradient is zero")]
    Stationary,
    /// The level no longer exceeds the surrogate value and must be re-estimated.
    #[error("level {level} does not exceed the surrogate value {value}")]
    LevelBreach { level: f64, value: f64 },
}

/// `zeta * gamma * (level - value) / norm_sq`.
pub fn compute_stepsize(level: f64, value: f64, norm_sq: f64, gamma: f64, zeta: f64) -> Result<f64, StepError> {
    if norm_sq <= 0.0 {
        return Err(StepError::Stationary);
    }
    if level <= value {
        return Err(StepError::LevelBreach { level, value });
    }
    Ok(zeta * gamma * (level - value) / norm_sq)
}

/// Projected step `max(0, lambda + step * direction)`.
pub fn update_multipliers(lambda: &mut [f64], step: f64, direction: &[f64]) {
    for (l, g) in lambda.iter_mut().zip(direction) {
        *l = (*l + step * g).max(0.0);
    }
}

/// One step of the level window: step size, squared residual norm and surrogate value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub step: f64,
    pub norm_sq: f64,
    pub value: f64,
}

/// Whether some point is at least as close to every iterate as to its predecessor.
#[derive(Debug, Clone, PartialEq)]
pub enum Divergence {
    /// A common point exists (the witness).
    Contracting(Vec<f64>),
    /// No point is; some step in the window overshot.
    Diverging,
}

impl Divergence {
    pub fn is_diverging(&self) -> bool {
        matches!(self, Divergence::Diverging)
    }
}

/// Rows `2 (a - b) . x <= |a|^2 - |b|^2` for consecutive iterates `a`, `b`.
pub fn divergence_rows(window: &[Vec<f64>]) -> Vec<LinearRow> {
    window
        .windows(2)
        .map(|w| {
            let (a, b) = (&w[0], &w[1]);
            let coeffs = a.iter().zip(b).map(|(x, y)| 2.0 * (x - y)).collect();
            let na: f64 = a.iter().map(|x| x * x).sum();
            let nb: f64 = b.iter().map(|x| x * x).sum();
            LinearRow { coeffs, rhs: na - nb }
        })
        .collect()
}

pub fn detect_divergence(window: &[Vec<f64>]) -> Divergence {
    let dim = window.first().map_or(0, Vec::len);
    match solve_lp_feasibility(&divergence_rows(window), dim) {
        LpVerdict::Feasible(x) => Divergence::Contracting(x),
        LpVerdict::Infeasible => Divergence::Diverging,
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("level update needs at least one window record")]
pub struct EmptyWindow;

/// `max_i (step_i * norm_sq_i / gamma + value_i)`.
pub fn update_level(records: &[LevelRecord], gamma: f64) -> Result<f64, EmptyWindow> {
    records.iter().map(|r| r.step * r.norm_sq / gamma + r.value).reduce(f64::max).ok_or(EmptyWindow)
}

/// Penalty-augmented cost of residual `r` on one cell after choosing its
/// slack optimally, together with the chosen slack.
///
/// `r` is the residual with zero slack (load minus capacity); the slack may
/// raise it by up to the capacity.
#[inline]
pub(crate) fn cell_cost(r: f64, lambda: f64, rho: f64) -> (f64, f64) {
    if r >= 0.0 {
        ((lambda + rho) * r, 0.0)
    } else if lambda >= rho {
        ((lambda - rho) * r, 0.0)
    } else {
        (0.0, -r)
    }
}

/// Residual `g~ = load + z - C` per cell and the penalized Lagrangian value
/// `L = o + lambda . g~ + rho |g~|_1` of a schedule, with every slack `z`
/// chosen optimally.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateEvaluation {
    pub residual: Vec<f64>,
    pub value: f64,
}

pub fn surrogate_subgradient(
    inst: &Instance,
    schedule: &Schedule,
    lambda: &[f64],
    rho: f64,
) -> Result<SurrogateEvaluation, ScheduleError> {
    let mut value = evaluate_objective(inst, schedule)?;
    let load = expected_load(inst, schedule);
    let t = inst.horizon as usize;
    let mut residual = Vec::with_capacity(load.len());
    for (c, l) in load.iter().enumerate() {
        let r = l - inst.capacity(c / t) as f64;
        let (cost, z) = cell_cost(r, lambda[c], rho);
        value += cost;
        residual.push(r + z);
    }
    Ok(SurrogateEvaluation { residual, value })
}
