//! Numeric tolerances shared by every solver and checker in the crate.
//!
//! | constant | used for |
//! |----------|----------|
//! | [`ROW_TOL`] | row satisfaction inside branch-and-bound, enumeration and the schedule checker |
//! | [`FEASIBILITY_TOL`] | accepting a returned MILP solution (independent row check) |
//! | [`GAP_ABS_TOL`] | pruning / optimality closure in branch-and-bound |
//! | [`LP_WITNESS_TOL`] | witness check for the linear feasibility solver |
//! | [`WEIGHT_SUM_TOL`] | normalization of scenario weights |

/// Activity may exceed a row's right-hand side by this much and still count as satisfied.
pub const ROW_TOL: f64 = 1e-9;

pub const FEASIBILITY_TOL: f64 = 1e-6;

/// A node is pruned when its bound is within this distance of the incumbent.
pub const GAP_ABS_TOL: f64 = 1e-9;

pub const LP_WITNESS_TOL: f64 = 1e-9;

pub const WEIGHT_SUM_TOL: f64 = 1e-12;
