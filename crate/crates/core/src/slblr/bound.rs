use super::dp::{job_load, solve_job};
use crate::instance::Instance;
use crate::model::VariableLayout;
use rayon::prelude::*;

/// Lagrangian dual value without the penalty term:
/// `sum_i min_x (o_i + lambda . g_i) - lambda . C`.
///
/// Every per-job minimum is exact, so the value is a valid lower bound on the
/// optimal expected weighted tardiness for any `lambda >= 0`.
pub fn evaluate_dual_bound(inst: &Instance, layout: &VariableLayout, lambda: &[f64]) -> f64 {
    dual_subgradient(inst, layout, lambda).0
}

/// Dual value together with a subgradient `sum_i g_i(x_i) - C` at `lambda`.
pub fn dual_subgradient(inst: &Instance, layout: &VariableLayout, lambda: &[f64]) -> (f64, Vec<f64>) {
    assert_eq!(lambda.len(), layout.num_cells);
    let price = |g: usize, k: usize| {
        let grp = &layout.groups[g];
        layout.cells(inst, &grp.candidates[k]).map(|c| lambda[c]).sum::<f64>() * grp.coef
    };
    let per_job: Vec<Option<(f64, Vec<(usize, f64)>)>> = (0..inst.num_jobs())
        .into_par_iter()
        .map(|i| solve_job(inst, layout, i, &price).map(|s| (s.value, job_load(inst, layout, i, &s.choice))))
        .collect();
    let t = inst.horizon as usize;
    let mut g: Vec<f64> = (0..layout.num_cells).map(|c| -(inst.capacity(c / t) as f64)).collect();
    let mut value: f64 = lambda.iter().zip(&g).map(|(l, c)| l * c).sum();
    for job in &per_job {
        match job {
            Some((v, loads)) => {
                value += v;
                for &(c, a) in loads {
                    g[c] += a;
                }
            }
            None => value = f64::INFINITY,
        }
    }
    (value, g)
}
