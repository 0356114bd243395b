//! Schedule checks, heuristics and the duality-gap bookkeeping.

mod check;
mod gap;
mod greedy;
mod repair;

pub use check::{check_feasible, expected_load, Violation};
pub use gap::{compute_gap, GapReport};
pub use greedy::{greedy_makespan, greedy_schedule, makespan};
pub use repair::{repair_schedule, RepairConfig, RepairOutcome};
