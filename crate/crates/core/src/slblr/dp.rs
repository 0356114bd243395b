//! Exact minimization of one job's scenario tree under additive placement costs.
//!
//! Second-attempt chains only see the first attempt through their release
//! time, so each chain is solved once for every release and the first-pass
//! chain prices the two restarts of each operation by lookup.

use crate::instance::{Instance, ScenarioKey};
use crate::model::VariableLayout;

const INF: f64 = f64::INFINITY;

/// Suffix-minimum tables of one chain of placement groups.
struct Chain {
    /// `value[l][e]`: cheapest placement of ops `l..` with op `l` starting at or after `e`.
    value: Vec<Vec<f64>>,
    best: Vec<Vec<usize>>,
}

impl Chain {
    fn solve(
        layout: &VariableLayout,
        groups: &[usize],
        horizon: u32,
        cost: &dyn Fn(usize, usize) -> f64,
        extra: &dyn Fn(usize, u32) -> f64,
    ) -> Chain {
        let width = horizon as usize + 2;
        let m = groups.len();
        let mut value = vec![vec![INF; width]; m];
        let mut best = vec![vec![usize::MAX; width]; m];
        for l in (0..m).rev() {
            let g = groups[l];
            let cands = &layout.groups[g].candidates;
            let mut k = cands.len();
            for e in (1..=horizon as usize).rev() {
                value[l][e] = value[l][e + 1];
                best[l][e] = best[l][e + 1];
                while k > 0 && cands[k - 1].start as usize >= e {
                    k -= 1;
                    let c = cands[k];
                    let done = c.completion();
                    let tail = if l + 1 < m { value[l + 1][done as usize + 1] } else { 0.0 };
                    let v = cost(g, k) + extra(l, done) + tail;
                    if v.is_finite() && v <= value[l][e] {
                        value[l][e] = v;
                        best[l][e] = k;
                    }
                }
            }
        }
        Chain { value, best }
    }

    fn at(&self, release: u32) -> f64 {
        self.value[0].get(release as usize).copied().unwrap_or(INF)
    }

    fn trace(&self, groups: &[usize], layout: &VariableLayout, release: u32, out: &mut [usize], base: usize) {
        let mut e = release as usize;
        for (l, &g) in groups.iter().enumerate() {
            let k = self.best[l][e];
            out[g - base] = k;
            e = layout.groups[g].candidates[k].completion() as usize + 1;
        }
    }
}

/// Result of [`solve_job`]: candidate index per placement group of the job,
/// indexed from the job's first group.
#[derive(Debug, Clone)]
pub(crate) struct JobSolution {
    pub value: f64,
    pub choice: Vec<usize>,
}

/// First placement group index of job `i` (a job's groups are contiguous).
pub(crate) fn group_base(layout: &VariableLayout, i: usize) -> usize {
    layout.jobs[i].scenarios[0].groups[0]
}

pub(crate) fn group_count(layout: &VariableLayout, i: usize) -> usize {
    layout.jobs[i].scenarios.iter().map(|s| s.groups.len()).sum()
}

/// Minimizes expected weighted tardiness of job `i` plus `cost(g, k)` over
/// its placements.
pub(crate) fn solve_job(
    inst: &Instance,
    layout: &VariableLayout,
    i: usize,
    cost: &dyn Fn(usize, usize) -> f64,
) -> Option<JobSolution> {
    let job = &inst.jobs[i];
    let jl = &layout.jobs[i];
    let t = inst.horizon;
    let tardy = |weight: f64, c: u32| job.weight * weight * (c as f64 - job.due_date as f64).max(0.0);
    let n = job.num_ops();
    let mut restarts = Vec::with_capacity(n);
    for jt in 0..n {
        let pair = [ScenarioKey::Discard(jt), ScenarioKey::Rework(jt)].map(|key| {
            let sc = jl.scenario(key);
            let last = sc.groups.len() - 1;
            let w = sc.weight;
            Chain::solve(layout, &sc.groups, t, cost, &|l, c| {
                if l == last {
                    tardy(w, c)
                } else {
                    0.0
                }
            })
        });
        restarts.push(pair);
    }
    let fp = &jl.scenarios[0];
    let fp_weight = fp.weight;
    let first = Chain::solve(layout, &fp.groups, t, cost, &|l, c| {
        let release = inst.restart_release(c);
        let [d, r] = &restarts[l];
        let mut v = d.at(release) + r.at(release);
        if l == n - 1 {
            v += tardy(fp_weight, c);
        }
        v
    });
    let value = first.at(1);
    if !value.is_finite() {
        return None;
    }
    let base = group_base(layout, i);
    let mut choice = vec![usize::MAX; group_count(layout, i)];
    first.trace(&fp.groups, layout, 1, &mut choice, base);
    for jt in 0..n {
        let c = layout.groups[fp.groups[jt]].candidates[choice[fp.groups[jt] - base]].completion();
        let release = inst.restart_release(c);
        for (chain, key) in restarts[jt].iter().zip([ScenarioKey::Discard(jt), ScenarioKey::Rework(jt)]) {
            chain.trace(&jl.scenario(key).groups, layout, release, &mut choice, base);
        }
    }
    Some(JobSolution { value, choice })
}

/// Expected-occupancy entries `(cell, coefficient)` of a job's placements.
pub(crate) fn job_load(inst: &Instance, layout: &VariableLayout, i: usize, choice: &[usize]) -> Vec<(usize, f64)> {
    let base = group_base(layout, i);
    let mut out = Vec::new();
    for (off, &k) in choice.iter().enumerate() {
        let grp = &layout.groups[base + off];
        for cell in layout.cells(inst, &grp.candidates[k]) {
            out.push((cell, grp.coef));
        }
    }
    out
}

/// Expected weighted tardiness of job `i` under `choice`.
pub(crate) fn job_tardiness(inst: &Instance, layout: &VariableLayout, i: usize, choice: &[usize]) -> f64 {
    let job = &inst.jobs[i];
    let base = group_base(layout, i);
    layout.jobs[i]
        .scenarios
        .iter()
        .map(|sc| {
            let last = *sc.groups.last().expect("scenario has operations");
            let c = layout.groups[last].candidates[choice[last - base]].completion();
            job.weight * sc.weight * (c as f64 - job.due_date as f64).max(0.0)
        })
        .sum()
}
