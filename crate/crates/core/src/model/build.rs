use super::layout::{Candidate, VariableLayout};
use super::ModelError;
use crate::instance::{Instance, ScenarioKey};
use crate::milp::{MilpModel, Sense, VarId};
use crate::schedule::Schedule;

/// Column indices of a built model.
#[derive(Debug, Clone, Default)]
pub struct ModelVars {
    /// Per placement group: `(candidate index, column)`. Empty for groups of
    /// jobs that are not part of the model.
    pub x: Vec<Vec<(usize, VarId)>>,
    /// Per job, per scenario.
    pub tardiness: Vec<Vec<VarId>>,
    /// Per job, per triggering operation: the shift count of the restart.
    pub ceiling: Vec<Vec<VarId>>,
    /// Per capacity cell.
    pub slack: Vec<VarId>,
    /// Per capacity cell (subproblem models only).
    pub over: Vec<VarId>,
    pub under: Vec<VarId>,
}

#[derive(Debug, Clone)]
pub struct BuiltModel {
    pub model: MilpModel,
    pub vars: ModelVars,
    pub jobs: Vec<usize>,
}

impl BuiltModel {
    /// Chosen candidate per placement group (`usize::MAX` for groups not in the model).
    pub fn choice(&self, values: &[f64]) -> Vec<usize> {
        self.vars
            .x
            .iter()
            .map(|xs| xs.iter().find(|&&(_, v)| values[v] > 0.5).map_or(usize::MAX, |&(k, _)| k))
            .collect()
    }

    /// Decodes a complete schedule. Only meaningful for models covering every job.
    pub fn decode(&self, layout: &VariableLayout, values: &[f64]) -> Schedule {
        layout.decode(&self.choice(values))
    }

    /// Value vector that selects `choice[g]` in every group of the model.
    /// Auxiliary columns are left at zero; the solvers recompute them.
    pub fn warm_start(&self, choice: &[usize]) -> Vec<f64> {
        let mut values = vec![0.0; self.model.num_vars()];
        for (g, xs) in self.vars.x.iter().enumerate() {
            if let Some(&(_, v)) = xs.iter().find(|&&(k, _)| k == choice[g]) {
                values[v] = 1.0;
            }
        }
        values
    }
}

fn completion_terms(xs: &[(usize, VarId)], cands: &[Candidate], sign: f64) -> Vec<(VarId, f64)> {
    xs.iter().map(|&(k, v)| (v, sign * cands[k].completion() as f64)).collect()
}

fn start_terms(xs: &[(usize, VarId)], cands: &[Candidate], sign: f64) -> Vec<(VarId, f64)> {
    xs.iter().map(|&(k, v)| (v, sign * cands[k].start as f64)).collect()
}

/// Adds the per-job variables and rows of `jobs`. `keep(g, k)` filters candidates.
fn add_jobs(
    inst: &Instance,
    layout: &VariableLayout,
    jobs: &[usize],
    keep: &dyn Fn(usize, usize) -> bool,
    model: &mut MilpModel,
    vars: &mut ModelVars,
) -> Result<(), ModelError> {
    vars.x = vec![Vec::new(); layout.groups.len()];
    vars.tardiness = vec![Vec::new(); inst.num_jobs()];
    vars.ceiling = vec![Vec::new(); inst.num_jobs()];
    let s = inst.shift_length as f64;
    let y_max = (inst.horizon as f64 / s).ceil() + 1.0;
    for &i in jobs {
        let job = &inst.jobs[i];
        let jl = &layout.jobs[i];
        for g in layout.job_groups(i) {
            let grp = &layout.groups[g];
            let mut members = Vec::new();
            let mut weights = Vec::new();
            for (k, c) in grp.candidates.iter().enumerate() {
                if keep(g, k) {
                    let name = format!("x_{}_{}_{}_{}_{}", i + 1, grp.scenario, grp.op + 1, c.group + 1, c.start);
                    let v = model.add_binary(name, 0.0);
                    vars.x[g].push((k, v));
                    members.push(v);
                    weights.push(c.start as f64);
                }
            }
            if members.is_empty() {
                return Err(ModelError::EmptyWindow { job: i + 1, scenario: grp.scenario.to_string(), op: grp.op + 1 });
            }
            model.add_sos1(format!("a_{}_{}_{}", i + 1, grp.scenario, grp.op + 1), members, weights);
        }
        for sc in &jl.scenarios {
            for pair in sc.groups.windows(2) {
                let (a, b) = (&layout.groups[pair[0]], &layout.groups[pair[1]]);
                let mut coeffs = start_terms(&vars.x[pair[1]], &b.candidates, 1.0);
                coeffs.extend(completion_terms(&vars.x[pair[0]], &a.candidates, -1.0));
                model.add_row(format!("prec_{}_{}_{}", i + 1, sc.key, a.op + 1), coeffs, Sense::Ge, 1.0);
            }
            let last = *sc.groups.last().expect("scenario has operations");
            let tau = model.add_var(
                format!("tau_{}_{}", i + 1, sc.key),
                0.0,
                inst.horizon as f64,
                false,
                job.weight * sc.weight,
            );
            let mut coeffs = vec![(tau, 1.0)];
            coeffs.extend(completion_terms(&vars.x[last], &layout.groups[last].candidates, -1.0));
            model.add_row(format!("tard_{}_{}", i + 1, sc.key), coeffs, Sense::Ge, -(job.due_date as f64));
            vars.tardiness[i].push(tau);
        }
        let fp = &jl.scenarios[0].groups;
        for jt in 0..job.num_ops() {
            let trig = &layout.groups[fp[jt]];
            let c1 = completion_terms(&vars.x[fp[jt]], &trig.candidates, -1.0);
            let y = model.add_var(format!("y_{}_{}", i + 1, jt + 1), 0.0, y_max, true, 0.0);
            vars.ceiling[i].push(y);
            let mut lo = vec![(y, s)];
            lo.extend(c1.iter().copied());
            model.add_row(format!("ceil_lo_{}_{}", i + 1, jt + 1), lo, Sense::Ge, 0.0);
            let mut hi = vec![(y, s)];
            hi.extend(c1.iter().copied());
            model.add_row(format!("ceil_hi_{}_{}", i + 1, jt + 1), hi, Sense::Le, s - s * inst.ceiling_epsilon);
            for key in [ScenarioKey::Discard(jt), ScenarioKey::Rework(jt)] {
                let first = jl.scenario(key).groups[0];
                let cands = &layout.groups[first].candidates;
                let mut restart = start_terms(&vars.x[first], cands, 1.0);
                restart.extend(c1.iter().copied());
                model.add_row(format!("restart_{}_{}", i + 1, key), restart, Sense::Ge, 1.0);
                let mut shift = start_terms(&vars.x[first], cands, 1.0);
                shift.push((y, -s));
                model.add_row(format!("shift_{}_{}", i + 1, key), shift, Sense::Ge, 1.0);
            }
        }
    }
    Ok(())
}

/// Expected-occupancy terms per capacity cell for the placement columns in `vars`.
fn occupancy_terms(inst: &Instance, layout: &VariableLayout, vars: &ModelVars) -> Vec<Vec<(VarId, f64)>> {
    let mut cells = vec![Vec::new(); layout.num_cells];
    for (g, xs) in vars.x.iter().enumerate() {
        let grp = &layout.groups[g];
        for &(k, v) in xs {
            for cell in layout.cells(inst, &grp.candidates[k]) {
                cells[cell].push((v, grp.coef));
            }
        }
    }
    cells
}

fn cell_label(inst: &Instance, cell: usize) -> String {
    let t = inst.horizon as usize;
    format!("{}_{}", cell / t + 1, cell % t + 1)
}

fn add_capacity_rows(inst: &Instance, layout: &VariableLayout, model: &mut MilpModel, vars: &mut ModelVars) {
    let cells = occupancy_terms(inst, layout, vars);
    for (cell, mut coeffs) in cells.into_iter().enumerate() {
        let cap = inst.capacity(cell / inst.horizon as usize) as f64;
        let z = model.add_var(format!("z_{}", cell_label(inst, cell)), 0.0, cap, false, 0.0);
        vars.slack.push(z);
        coeffs.push((z, 1.0));
        model.add_row(format!("cap_{}", cell_label(inst, cell)), coeffs, Sense::Eq, cap);
    }
}

/// The complete time-indexed model: every job, hard capacity rows.
pub fn build_full_model(inst: &Instance, layout: &VariableLayout) -> Result<BuiltModel, ModelError> {
    let jobs: Vec<usize> = (0..inst.num_jobs()).collect();
    let mut model = MilpModel::new("full");
    let mut vars = ModelVars::default();
    add_jobs(inst, layout, &jobs, &|_, _| true, &mut model, &mut vars)?;
    add_capacity_rows(inst, layout, &mut model, &mut vars);
    Ok(BuiltModel { model, vars, jobs })
}

/// The full model with every beginning time held within `delta[op]` of the
/// anchor schedule's beginning time for the same scenario and operation.
pub fn build_repair_model(
    inst: &Instance,
    layout: &VariableLayout,
    anchor: &Schedule,
    delta: &[u32],
) -> Result<BuiltModel, ModelError> {
    let anchor_choice = layout.encode(anchor).map_err(ModelError::Schedule)?;
    let jobs: Vec<usize> = (0..inst.num_jobs()).collect();
    let mut model = MilpModel::new("repair");
    let mut vars = ModelVars::default();
    let keep = |g: usize, k: usize| {
        let grp = &layout.groups[g];
        let b0 = grp.candidates[anchor_choice[g]].start as i64;
        let d = delta.get(grp.op).copied().unwrap_or(0) as i64;
        (grp.candidates[k].start as i64 - b0).abs() <= d
    };
    add_jobs(inst, layout, &jobs, &keep, &mut model, &mut vars)?;
    add_capacity_rows(inst, layout, &mut model, &mut vars);
    Ok(BuiltModel { model, vars, jobs })
}

/// Relaxed model for the jobs in `subset`, with the other jobs' occupancy
/// fixed. Capacity enters only through prices `lambda` and the penalty `rho`
/// on the absolute capacity residual, split into `over - under`.
pub fn build_subproblem_model(
    inst: &Instance,
    layout: &VariableLayout,
    subset: &[usize],
    fixed_load: &[f64],
    lambda: &[f64],
    rho: f64,
) -> Result<BuiltModel, ModelError> {
    if subset.is_empty() {
        return Err(ModelError::EmptySubset);
    }
    let mut model = MilpModel::new("subproblem");
    let mut vars = ModelVars::default();
    add_jobs(inst, layout, subset, &|_, _| true, &mut model, &mut vars)?;
    let cells = occupancy_terms(inst, layout, &vars);
    for (cell, terms) in cells.iter().enumerate() {
        for &(v, coef) in terms {
            model.objective[v] += lambda[cell] * coef;
        }
    }
    // largest load the subset can put on a cell: one candidate per group
    let mut max_load = vec![0.0; layout.num_cells];
    let mut touched = vec![usize::MAX; layout.num_cells];
    for (g, xs) in vars.x.iter().enumerate() {
        for &(k, _) in xs {
            for cell in layout.cells(inst, &layout.groups[g].candidates[k]) {
                if touched[cell] != g {
                    touched[cell] = g;
                    max_load[cell] += layout.groups[g].coef;
                }
            }
        }
    }
    for (cell, terms) in cells.into_iter().enumerate() {
        let cap = inst.capacity(cell / inst.horizon as usize) as f64;
        let label = cell_label(inst, cell);
        let z = model.add_var(format!("z_{label}"), 0.0, cap, false, lambda[cell]);
        let over = model.add_var(format!("vp_{label}"), 0.0, fixed_load[cell] + max_load[cell], false, rho);
        let under = model.add_var(format!("vm_{label}"), 0.0, (cap - fixed_load[cell]).max(0.0), false, rho);
        vars.slack.push(z);
        vars.over.push(over);
        vars.under.push(under);
        let mut coeffs = terms;
        coeffs.push((z, 1.0));
        coeffs.push((over, -1.0));
        coeffs.push((under, 1.0));
        model.add_row(format!("res_{label}"), coeffs, Sense::Eq, cap - fixed_load[cell]);
    }
    Ok(BuiltModel { model, vars, jobs: subset.to_vec() })
}
