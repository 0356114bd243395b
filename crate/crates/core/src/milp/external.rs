//! External solver hand-off and solution-file grammar.
//!
//! A solution file is plain text:
//!
//! ```text
//! STATUS OPTIMAL
//! OBJECTIVE 12.5
//! BOUND 12.5
//! C0000000 1
//! C0000001 0
//! ```
//!
//! `STATUS` comes first and is one of `OPTIMAL`, `FEASIBLE`, `INFEASIBLE`,
//! `TIME_LIMIT`. `OBJECTIVE` and `BOUND` are optional (the objective is
//! recomputed from the values when absent). Blank lines and lines starting
//! with `#` are ignored. Every column must appear unless the status is
//! `INFEASIBLE`.

use super::mps::{column_name, write_mps};
use super::{solve_builtin, Budget, MilpError, MilpModel, MilpSolution, Status};
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum SolverBackend {
    #[default]
    Builtin,
    /// Shell command template with `{model}` and `{solution}` placeholders.
    External { command: String },
}

impl SolverBackend {
    pub fn solve(&self, model: &MilpModel, budget: &Budget) -> Result<MilpSolution, MilpError> {
        match self {
            SolverBackend::Builtin => solve_builtin(model, budget),
            SolverBackend::External { command } => match run_external(model, command) {
                Ok(sol) => Ok(sol),
                Err(e) => {
                    log::warn!("external solver failed ({e}); falling back to the builtin solver");
                    solve_builtin(model, budget)
                }
            },
        }
    }
}

static RUN_COUNTER: AtomicU64 = AtomicU64::new(0);

fn scratch_paths() -> (PathBuf, PathBuf) {
    let n = RUN_COUNTER.fetch_add(1, Ordering::Relaxed);
    let dir = std::env::temp_dir();
    let stem = format!("jobshop-{}-{n}", std::process::id());
    (dir.join(format!("{stem}.mps")), dir.join(format!("{stem}.sol")))
}

fn run_external(model: &MilpModel, template: &str) -> Result<MilpSolution, String> {
    let start = Instant::now();
    let (mps, sol) = scratch_paths();
    write_mps(model, &mps).map_err(|e| e.to_string())?;
    let cmd = template.replace("{model}", &mps.display().to_string()).replace("{solution}", &sol.display().to_string());
    let status = Command::new("sh").arg("-c").arg(&cmd).status().map_err(|e| format!("cannot spawn: {e}"));
    let parsed = status.and_then(|st| {
        if st.success() {
            parse_external_solution(&sol, model).map_err(|e| e.to_string())
        } else {
            Err(format!("exit status {st}"))
        }
    });
    let _ = std::fs::remove_file(&mps);
    let _ = std::fs::remove_file(&sol);
    let mut out = parsed?;
    if out.has_solution() {
        let viol = model.violations(&out.values, crate::tolerance::FEASIBILITY_TOL);
        if let Some(v) = viol.first() {
            return Err(format!("external solution is infeasible: {v}"));
        }
    }
    out.wall_time = start.elapsed().as_secs_f64();
    Ok(out)
}

pub fn parse_external_solution(path: &Path, model: &MilpModel) -> Result<MilpSolution, MilpError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| MilpError::Io { path: path.display().to_string(), source })?;
    parse_solution_str(&text, model)
}

fn parse_err(line: usize, message: impl Into<String>) -> MilpError {
    MilpError::SolutionParse { line, message: message.into() }
}

pub fn parse_solution_str(text: &str, model: &MilpModel) -> Result<MilpSolution, MilpError> {
    let index: HashMap<String, usize> = (0..model.num_vars()).map(|v| (column_name(v), v)).collect();
    let mut status = None;
    let mut objective = None;
    let mut bound = None;
    let mut values = vec![f64::NAN; model.num_vars()];
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap_or_default();
        let val = parts.next().ok_or_else(|| parse_err(lineno, format!("expected two fields, got `{line}`")))?;
        if parts.next().is_some() {
            return Err(parse_err(lineno, format!("expected two fields, got `{line}`")));
        }
        if status.is_none() {
            if key != "STATUS" {
                return Err(parse_err(lineno, "first entry must be STATUS"));
            }
            status = Some(match val {
                "OPTIMAL" => Status::Optimal,
                "FEASIBLE" => Status::Feasible,
                "INFEASIBLE" => Status::Infeasible,
                "TIME_LIMIT" => Status::TimeLimit,
                other => return Err(parse_err(lineno, format!("unknown status `{other}`"))),
            });
            continue;
        }
        let number: f64 = val.parse().map_err(|_| parse_err(lineno, format!("`{val}` is not a number")))?;
        match key {
            "OBJECTIVE" => objective = Some(number),
            "BOUND" => bound = Some(number),
            col => {
                let &v = index.get(col).ok_or_else(|| parse_err(lineno, format!("unknown column `{col}`")))?;
                values[v] = number;
            }
        }
    }
    let status = status.ok_or_else(|| parse_err(0, "missing STATUS line"))?;
    if status == Status::Infeasible {
        return Ok(MilpSolution::infeasible(0.0, 0));
    }
    if let Some(v) = values.iter().position(|x| x.is_nan()) {
        if status == Status::TimeLimit && values.iter().all(|x| x.is_nan()) {
            return Ok(MilpSolution {
                status,
                values: Vec::new(),
                objective: f64::INFINITY,
                bound: bound.unwrap_or(f64::NEG_INFINITY),
                wall_time: 0.0,
                nodes: 0,
            });
        }
        return Err(MilpError::MissingColumn(column_name(v)));
    }
    let objective = objective.unwrap_or_else(|| model.objective_value(&values));
    Ok(MilpSolution {
        status,
        bound: bound.unwrap_or(if status == Status::Optimal { objective } else { f64::NEG_INFINITY }),
        values,
        objective,
        wall_time: 0.0,
        nodes: 0,
    })
}

/// Writes `solution` in the grammar read by [`parse_solution_str`].
pub fn write_solution_file(solution: &MilpSolution, path: &Path) -> Result<(), MilpError> {
    let status = match solution.status {
        Status::Optimal => "OPTIMAL",
        Status::Feasible => "FEASIBLE",
        Status::Infeasible => "INFEASIBLE",
        Status::TimeLimit => "TIME_LIMIT",
    };
    let mut out = format!("STATUS {status}\n");
    if solution.has_solution() {
        out.push_str(&format!("OBJECTIVE {}\nBOUND {}\n", solution.objective, solution.bound));
        for (v, x) in solution.values.iter().enumerate() {
            out.push_str(&format!("{} {x}\n", column_name(v)));
        }
    }
    std::fs::write(path, out).map_err(|source| MilpError::Io { path: path.display().to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::Sense;

    fn tiny() -> MilpModel {
        let mut m = MilpModel::new("tiny");
        let x: Vec<usize> = (0..2).map(|k| m.add_binary(format!("x{k}"), 1.0 + k as f64)).collect();
        m.add_sos1("g", x.clone(), vec![1.0, 2.0]);
        let t = m.add_var("t", 0.0, 3.0, false, 0.5);
        m.add_row("r", vec![(x[1], 1.0), (t, 1.0)], Sense::Ge, 1.0);
        m
    }

    #[test]
    fn parse_full_file() {
        let m = tiny();
        let sol =
            parse_solution_str("STATUS OPTIMAL\nOBJECTIVE 1.5\nC0000000 1\nC0000001 0\nC0000002 1\n", &m).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert_eq!(sol.values, vec![1.0, 0.0, 1.0]);
        assert_eq!(sol.objective, 1.5);
    }

    #[test]
    fn missing_column_is_named() {
        let m = tiny();
        let err = parse_solution_str("STATUS FEASIBLE\nC0000000 1\nC0000002 1\n", &m).unwrap_err();
        assert!(err.to_string().contains("C0000001"), "{err}");
    }

    #[test]
    fn bad_number_reports_line() {
        let m = tiny();
        let err = parse_solution_str("STATUS FEASIBLE\n\nC0000000 one\n", &m).unwrap_err();
        assert!(matches!(err, MilpError::SolutionParse { line: 3, .. }), "{err}");
    }

    #[test]
    fn failing_command_falls_back() {
        let m = tiny();
        let backend = SolverBackend::External { command: "exit 7".into() };
        let sol = backend.solve(&m, &Budget::unlimited()).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert_eq!(sol.objective, 1.5);
    }
}
