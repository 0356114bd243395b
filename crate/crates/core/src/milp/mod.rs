//! Bounded-variable mixed-integer linear models with SOS1 assignment groups,
//! and the solvers that work on them.
//!
//! * [`solve_builtin`]: depth-first branch-and-bound over SOS1 groups.
//! * [`enumerate_all`]: exhaustive enumeration, used as an oracle.
//! * [`solve_lp_feasibility`]: phase-one simplex for `a·x <= b` systems.
//! * [`write_mps`] / [`parse_external_solution`] / [`SolverBackend::External`]:
//!   hand-off to an external solver process.

mod bnb;
mod components;
mod enumerate;
mod external;
mod mps;
mod simplex;

pub use bnb::solve_builtin;
pub use enumerate::{enumerate_all, ENUMERATION_CAP};
pub use external::{parse_external_solution, parse_solution_str, write_solution_file, SolverBackend};
pub use mps::{column_name, row_name, to_mps_string, write_mps};
pub use simplex::{solve_lp_feasibility, LinearRow, LpVerdict};

use crate::tolerance::ROW_TOL;
use serde::{Deserialize, Serialize};
use std::time::Duration;
use thiserror::Error;

pub type VarId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub integer: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    pub coeffs: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Row {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(v, a)| a * values[v]).sum()
    }

    /// Amount by which `values` violate this row (0 when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let act = self.activity(values);
        match self.sense {
            Sense::Le => (act - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - act).max(0.0),
            Sense::Eq => (act - self.rhs).abs(),
        }
    }
}

/// A set of binaries of which exactly one is 1. `weights` order the members
/// (here: start times) and drive branching order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sos1 {
    pub name: String,
    pub members: Vec<VarId>,
    pub weights: Vec<f64>,
}

/// A minimization model. Every SOS1 group also owns an explicit `sum = 1` row.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MilpModel {
    pub name: String,
    pub vars: Vec<Variable>,
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    pub sos1: Vec<Sos1>,
}

impl MilpModel {
    pub fn new(name: impl Into<String>) -> Self {
        MilpModel { name: name.into(), ..Default::default() }
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64, integer: bool, cost: f64) -> VarId {
        self.vars.push(Variable { name: name.into(), lower, upper, integer });
        self.objective.push(cost);
        self.vars.len() - 1
    }

    pub fn add_binary(&mut self, name: impl Into<String>, cost: f64) -> VarId {
        self.add_var(name, 0.0, 1.0, true, cost)
    }

    pub fn add_row(&mut self, name: impl Into<String>, coeffs: Vec<(VarId, f64)>, sense: Sense, rhs: f64) -> usize {
        self.rows.push(Row { name: name.into(), coeffs, sense, rhs });
        self.rows.len() - 1
    }

    /// Registers an SOS1 group together with its `sum = 1` row.
    pub fn add_sos1(&mut self, name: impl Into<String>, members: Vec<VarId>, weights: Vec<f64>) -> usize {
        let name = name.into();
        assert_eq!(members.len(), weights.len());
        let coeffs = members.iter().map(|&v| (v, 1.0)).collect();
        self.add_row(format!("{name}_one"), coeffs, Sense::Eq, 1.0);
        self.sos1.push(Sos1 { name, members, weights });
        self.sos1.len() - 1
    }

    /// Objective value of an assignment. Terms are summed in sorted order so
    /// that assignments with the same multiset of terms give bit-identical values.
    pub fn objective_value(&self, values: &[f64]) -> f64 {
        let mut terms: Vec<f64> =
            self.objective.iter().zip(values).filter(|(c, v)| **c != 0.0 && **v != 0.0).map(|(c, v)| c * v).collect();
        terms.sort_by(f64::total_cmp);
        terms.iter().sum()
    }

    /// Rows and bounds violated by more than `tol`, as human-readable strings.
    pub fn violations(&self, values: &[f64], tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        if values.len() != self.vars.len() {
            out.push(format!("expected {} values, got {}", self.vars.len(), values.len()));
            return out;
        }
        for (var, v) in self.vars.iter().zip(values) {
            if *v < var.lower - tol || *v > var.upper + tol {
                out.push(format!("{} = {v} outside [{}, {}]", var.name, var.lower, var.upper));
            }
            if var.integer && (v - v.round()).abs() > tol {
                out.push(format!("{} = {v} is not integral", var.name));
            }
        }
        for row in &self.rows {
            let viol = row.violation(values);
            if viol > tol {
                out.push(format!("row {} violated by {viol:.3e}", row.name));
            }
        }
        out
    }

    pub fn is_feasible(&self, values: &[f64], tol: f64) -> bool {
        self.violations(values, tol).is_empty()
    }

    /// Structural invariants: finite bounds, SOS members are binaries, each
    /// group has its `sum = 1` row.
    pub fn validate(&self) -> Result<(), MilpError> {
        if self.objective.len() != self.vars.len() {
            return Err(MilpError::InvalidModel("objective length differs from variable count".into()));
        }
        for var in &self.vars {
            if !var.lower.is_finite() || !var.upper.is_finite() || var.lower > var.upper {
                return Err(MilpError::InvalidModel(format!(
                    "variable {} has bounds [{}, {}]",
                    var.name, var.lower, var.upper
                )));
            }
        }
        for row in &self.rows {
            if row.coeffs.iter().any(|&(v, _)| v >= self.vars.len()) {
                return Err(MilpError::InvalidModel(format!("row {} references an unknown variable", row.name)));
            }
        }
        let mut member_of = vec![false; self.vars.len()];
        for g in &self.sos1 {
            if g.members.is_empty() {
                return Err(MilpError::InvalidModel(format!("SOS1 group {} is empty", g.name)));
            }
            for &m in &g.members {
                let var = &self.vars[m];
                if !var.integer || var.lower != 0.0 || var.upper != 1.0 {
                    return Err(MilpError::InvalidModel(format!("SOS1 member {} is not binary", var.name)));
                }
                if std::mem::replace(&mut member_of[m], true) {
                    return Err(MilpError::InvalidModel(format!("variable {} is in two SOS1 groups", var.name)));
                }
            }
            let has_row = self.rows.iter().any(|r| {
                r.sense == Sense::Eq
                    && r.rhs == 1.0
                    && r.coeffs.len() == g.members.len()
                    && r.coeffs.iter().all(|&(v, a)| a == 1.0 && g.members.contains(&v))
            });
            if !has_row {
                return Err(MilpError::InvalidModel(format!("SOS1 group {} has no sum-to-one row", g.name)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Optimal,
    Feasible,
    Infeasible,
    TimeLimit,
}

impl Status {
    pub fn has_solution(self, values: &[f64]) -> bool {
        matches!(self, Status::Optimal | Status::Feasible | Status::TimeLimit) && !values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MilpSolution {
    pub status: Status,
    /// Empty when no feasible assignment is known.
    pub values: Vec<f64>,
    pub objective: f64,
    /// Best proven lower bound on the optimum.
    pub bound: f64,
    pub wall_time: f64,
    pub nodes: u64,
}

impl MilpSolution {
    pub fn has_solution(&self) -> bool {
        self.status.has_solution(&self.values)
    }

    pub fn infeasible(wall_time: f64, nodes: u64) -> Self {
        MilpSolution {
            status: Status::Infeasible,
            values: Vec::new(),
            objective: f64::INFINITY,
            bound: f64::INFINITY,
            wall_time,
            nodes,
        }
    }
}

/// Limits for a single solve. A warm start, when given, seeds the incumbent.
#[derive(Debug, Clone, Default)]
pub struct Budget {
    pub time_limit: Option<Duration>,
    pub node_limit: Option<u64>,
    pub warm_start: Option<Vec<f64>>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn nodes(n: u64) -> Self {
        Budget { node_limit: Some(n), ..Default::default() }
    }

    pub fn time(d: Duration) -> Self {
        Budget { time_limit: Some(d), ..Default::default() }
    }

    pub fn with_warm_start(mut self, values: Vec<f64>) -> Self {
        self.warm_start = Some(values);
        self
    }
}

#[derive(Debug, Error)]
pub enum MilpError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("unsupported model structure: {0}")]
    UnsupportedStructure(String),
    #[error("enumeration space {size:.3e} exceeds the cap {cap:.0e}")]
    EnumerationCap { size: f64, cap: f64 },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("solution file line {line}: {message}")]
    SolutionParse { line: usize, message: String },
    #[error("solution file has no value for column {0}")]
    MissingColumn(String),
}

/// Checks a row against `activity` with the shared tolerance.
#[inline]
pub(crate) fn row_satisfied(sense: Sense, activity: f64, rhs: f64) -> bool {
    match sense {
        Sense::Le => activity <= rhs + ROW_TOL,
        Sense::Ge => activity >= rhs - ROW_TOL,
        Sense::Eq => (activity - rhs).abs() <= ROW_TOL,
    }
}
