//! Scheduling of job shops with scrap and rework under uncertainty.
//!
//! Every job is scheduled for its first pass and for each possible second
//! attempt (restart after a discard, or resumption after rework). The
//! scenario-weighted model is decomposed per job and coordinated with
//! surrogate Lagrangian multipliers on machine-group capacity.

pub mod feasibility;
pub mod instance;
pub mod milp;
pub mod model;
pub mod schedule;
pub mod simulate;
pub mod slblr;
pub mod solution;
pub mod tolerance;

pub use instance::{Instance, Job, MachineGroup, OperationSpec, ScenarioKey};
pub use schedule::{Placement, Schedule};
