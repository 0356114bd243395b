//! Exhaustive enumeration of every SOS1 assignment.
//!
//! Meant as a reference solver for small models: it shares no search or
//! bounding code with the branch-and-bound. Auxiliary variables are completed
//! exactly at each leaf, by interval intersection for variables that sit
//! alone, and by trying every vertex for rows over several continuous ones.

use super::components::{pick_in_interval, single_row_interval};
use super::{MilpError, MilpModel, MilpSolution, Sense, Status};
use crate::tolerance::{FEASIBILITY_TOL, ROW_TOL};
use std::time::Instant;

/// Largest number of assignments [`enumerate_all`] will visit.
pub const ENUMERATION_CAP: f64 = 1e7;

enum AuxShape {
    Single(usize),
    Vertex { row: usize, vars: Vec<(usize, f64)> },
}

/// Minimizes `model` by visiting every combination of SOS1 members.
pub fn enumerate_all(model: &MilpModel) -> Result<MilpSolution, MilpError> {
    model.validate()?;
    let start = Instant::now();
    let size: f64 = model.sos1.iter().map(|g| g.members.len() as f64).product();
    if size > ENUMERATION_CAP {
        return Err(MilpError::EnumerationCap { size, cap: ENUMERATION_CAP });
    }
    let n = model.num_vars();
    let mut in_group = vec![usize::MAX; n];
    for (g, s) in model.sos1.iter().enumerate() {
        for &v in &s.members {
            in_group[v] = g;
        }
    }
    let mut rows_of = vec![Vec::new(); n];
    for (ri, row) in model.rows.iter().enumerate() {
        for &(v, _) in &row.coeffs {
            rows_of[v].push(ri);
        }
    }
    // rows that only involve binaries are checked once their last group is set
    let mut check_at: Vec<Vec<usize>> = vec![Vec::new(); model.sos1.len() + 1];
    let mut shapes = Vec::new();
    let mut seen_row = vec![false; model.rows.len()];
    for (ri, row) in model.rows.iter().enumerate() {
        let aux: Vec<(usize, f64)> = row.coeffs.iter().filter(|e| in_group[e.0] == usize::MAX).copied().collect();
        if aux.is_empty() {
            let last = row.coeffs.iter().map(|e| in_group[e.0]).max().map_or(0, |g| g + 1);
            check_at[last].push(ri);
        } else if aux.len() > 1 && !seen_row[ri] {
            seen_row[ri] = true;
            for &(v, _) in &aux {
                if rows_of[v].len() != 1 || model.vars[v].integer {
                    return Err(MilpError::UnsupportedStructure(format!(
                        "variable {} is not a continuous single-row variable",
                        model.vars[v].name
                    )));
                }
            }
            shapes.push(AuxShape::Vertex { row: ri, vars: aux });
        }
    }
    for v in 0..n {
        if in_group[v] == usize::MAX
            && rows_of[v]
                .iter()
                .all(|&r| model.rows[r].coeffs.iter().filter(|e| in_group[e.0] == usize::MAX).count() == 1)
        {
            shapes.push(AuxShape::Single(v));
        }
    }

    let mut values = vec![0.0; n];
    for v in 0..n {
        if in_group[v] == usize::MAX {
            values[v] = model.vars[v].lower;
        }
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut leaves = 0u64;
    let mut ctx = Ctx { model, check_at: &check_at, shapes: &shapes, in_group: &in_group };
    ctx.visit(0, &mut values, &mut best, &mut leaves);
    let wall = start.elapsed().as_secs_f64();
    Ok(match best {
        Some((obj, values)) => {
            MilpSolution { status: Status::Optimal, values, objective: obj, bound: obj, wall_time: wall, nodes: leaves }
        }
        None => MilpSolution::infeasible(wall, leaves),
    })
}

struct Ctx<'a> {
    model: &'a MilpModel,
    check_at: &'a [Vec<usize>],
    shapes: &'a [AuxShape],
    in_group: &'a [usize],
}

impl Ctx<'_> {
    fn binary_activity(&self, row: usize, values: &[f64]) -> f64 {
        self.model.rows[row]
            .coeffs
            .iter()
            .filter(|e| self.in_group[e.0] != usize::MAX)
            .map(|&(v, a)| a * values[v])
            .sum()
    }

    fn visit(&mut self, g: usize, values: &mut Vec<f64>, best: &mut Option<(f64, Vec<f64>)>, leaves: &mut u64) {
        for &r in &self.check_at[g] {
            let row = &self.model.rows[r];
            if !super::row_satisfied(row.sense, row.activity(values), row.rhs) {
                return;
            }
        }
        if g == self.model.sos1.len() {
            *leaves += 1;
            if let Some(done) = self.complete(values) {
                let obj = self.model.objective_value(&done);
                if best.as_ref().map_or(true, |b| obj < b.0) && self.model.is_feasible(&done, FEASIBILITY_TOL) {
                    *best = Some((obj, done));
                }
            }
            return;
        }
        let members = self.model.sos1[g].members.clone();
        for &m in &members {
            values[m] = 1.0;
            self.visit(g + 1, values, best, leaves);
            values[m] = 0.0;
        }
    }

    fn complete(&self, values: &[f64]) -> Option<Vec<f64>> {
        let mut out = values.to_vec();
        for shape in self.shapes {
            match shape {
                AuxShape::Single(v) => {
                    let var = &self.model.vars[*v];
                    let (mut lo, mut hi) = (var.lower, var.upper);
                    for (ri, row) in self.model.rows.iter().enumerate() {
                        if let Some(&(_, a)) = row.coeffs.iter().find(|e| e.0 == *v) {
                            let (l, h) = single_row_interval(row.sense, self.binary_activity(ri, values), a, row.rhs);
                            lo = lo.max(l);
                            hi = hi.min(h);
                        }
                    }
                    out[*v] = pick_in_interval(lo, hi, self.model.objective[*v], var.integer)?;
                }
                AuxShape::Vertex { row, vars } => {
                    let act = self.binary_activity(*row, values);
                    let chosen = self.best_vertex(*row, act, vars)?;
                    for (&(v, _), x) in vars.iter().zip(chosen) {
                        out[v] = x;
                    }
                }
            }
        }
        Some(out)
    }

    /// Tries every basic solution: all variables at a bound except at most one,
    /// which is solved from the row.
    fn best_vertex(&self, row: usize, act: f64, vars: &[(usize, f64)]) -> Option<Vec<f64>> {
        let r = &self.model.rows[row];
        let k = vars.len();
        let mut best: Option<(f64, Vec<f64>)> = None;
        for free in 0..=k {
            for mask in 0u32..(1 << k) {
                let mut x: Vec<f64> = vars
                    .iter()
                    .enumerate()
                    .map(
                        |(i, &(v, _))| {
                            if mask >> i & 1 == 1 {
                                self.model.vars[v].upper
                            } else {
                                self.model.vars[v].lower
                            }
                        },
                    )
                    .collect();
                if free < k {
                    let rest: f64 =
                        vars.iter().enumerate().filter(|(i, _)| *i != free).map(|(i, &(_, a))| a * x[i]).sum();
                    let (v, a) = vars[free];
                    let solved = (r.rhs - act - rest) / a;
                    let var = &self.model.vars[v];
                    if solved < var.lower - ROW_TOL || solved > var.upper + ROW_TOL {
                        continue;
                    }
                    x[free] = solved.clamp(var.lower, var.upper);
                }
                let lhs: f64 = act + vars.iter().zip(&x).map(|(&(_, a), xi)| a * xi).sum::<f64>();
                let ok = match r.sense {
                    Sense::Le => lhs <= r.rhs + ROW_TOL,
                    Sense::Ge => lhs >= r.rhs - ROW_TOL,
                    Sense::Eq => (lhs - r.rhs).abs() <= ROW_TOL,
                };
                if !ok {
                    continue;
                }
                let cost: f64 = vars.iter().zip(&x).map(|(&(v, _), xi)| self.model.objective[v] * xi).sum();
                if best.as_ref().map_or(true, |b| cost < b.0 - 1e-12) {
                    best = Some((cost, x));
                }
            }
        }
        best.map(|b| b.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks_cheapest_feasible_pair() {
        let mut m = MilpModel::new("pair");
        let a: Vec<usize> = (0..3).map(|k| m.add_binary(format!("a{k}"), k as f64)).collect();
        let b: Vec<usize> = (0..3).map(|k| m.add_binary(format!("b{k}"), k as f64)).collect();
        m.add_sos1("a", a.clone(), vec![1.0, 2.0, 3.0]);
        m.add_sos1("b", b.clone(), vec![1.0, 2.0, 3.0]);
        // a and b cannot share an index
        for k in 0..3 {
            m.add_row(format!("d{k}"), vec![(a[k], 1.0), (b[k], 1.0)], Sense::Le, 1.0);
        }
        let sol = enumerate_all(&m).unwrap();
        assert_eq!(sol.objective, 1.0);
        assert_eq!(sol.nodes, 6);
    }

    #[test]
    fn penalty_row_vertex() {
        // x in {0 or 1 at cost 0}, 3x + z - v = 2, z in [0,2] cost 1, v in [0,5] cost 4
        let mut m = MilpModel::new("pen");
        let x0 = m.add_binary("x0", 0.0);
        let x1 = m.add_binary("x1", 0.0);
        m.add_sos1("g", vec![x0, x1], vec![0.0, 1.0]);
        let z = m.add_var("z", 0.0, 2.0, false, 1.0);
        let v = m.add_var("v", 0.0, 5.0, false, 4.0);
        m.add_row("cap", vec![(x1, 3.0), (z, 1.0), (v, -1.0)], Sense::Eq, 2.0);
        let sol = enumerate_all(&m).unwrap();
        // x0 gives z = 2 (cost 2); x1 gives z = 0, v = 1 (cost 4)
        assert_eq!(sol.objective, 2.0);
        assert_eq!(sol.values[z], 2.0);
    }

    #[test]
    fn cap_is_enforced() {
        let mut m = MilpModel::new("big");
        for g in 0..8 {
            let xs: Vec<usize> = (0..10).map(|k| m.add_binary(format!("x{g}_{k}"), 0.0)).collect();
            m.add_sos1(format!("g{g}"), xs, (0..10).map(f64::from).collect());
        }
        assert!(matches!(enumerate_all(&m), Err(MilpError::EnumerationCap { .. })));
    }
}
