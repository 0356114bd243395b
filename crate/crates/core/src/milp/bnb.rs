//! Depth-first branch-and-bound over SOS1 groups.
//!
//! Each node propagates row bounds over the remaining group domains and the
//! auxiliary-variable bounds, then computes an additive lower bound: the cost
//! committed by fixed groups, the cheapest completion of every auxiliary
//! component, and for every open group its cheapest standalone increment.
//! Branching picks the open group whose earliest remaining member weight is
//! smallest (ties by group index) and tries members by increasing increment,
//! then weight, then position.

use super::components::{pick_in_interval, single_row_interval, RowLp};
use super::{Budget, MilpError, MilpModel, MilpSolution, Sense, Status};
use crate::tolerance::{FEASIBILITY_TOL, GAP_ABS_TOL, ROW_TOL};
use std::collections::VecDeque;
use std::time::Instant;

struct Group {
    members: Vec<usize>,
    weights: Vec<f64>,
    costs: Vec<f64>,
    rows: Vec<u32>,
    /// Per member: `(row, term index in row, coefficient)`.
    value_rows: Vec<Vec<(u32, u32, f64)>>,
}

#[derive(Clone, Copy, PartialEq)]
enum RowKind {
    Pure,
    Single,
    Knapsack(usize),
}

struct PRow {
    terms: Vec<(usize, Vec<(usize, f64)>)>,
    aux: Vec<(usize, f64)>,
    sense: Sense,
    rhs: f64,
    kind: RowKind,
    nonneg: bool,
}

struct Knapsack {
    row: usize,
    lp: RowLp,
}

struct Prepared {
    groups: Vec<Group>,
    rows: Vec<PRow>,
    aux_vars: Vec<usize>,
    aux_rows: Vec<Vec<(u32, f64)>>,
    aux_cost: Vec<f64>,
    aux_bounds: Vec<(f64, f64)>,
    aux_integer: Vec<bool>,
    aux_single: Vec<bool>,
    knapsacks: Vec<Knapsack>,
    term_offset: Vec<usize>,
    max_group: usize,
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

fn prepare(model: &MilpModel) -> Result<Prepared, MilpError> {
    model.validate()?;
    let n = model.num_vars();
    let mut member_pos: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut groups = Vec::with_capacity(model.sos1.len());
    for (g, s) in model.sos1.iter().enumerate() {
        for (k, &v) in s.members.iter().enumerate() {
            member_pos[v] = Some((g, k));
        }
        groups.push(Group {
            members: s.members.clone(),
            weights: s.weights.clone(),
            costs: s.members.iter().map(|&v| model.objective[v]).collect(),
            rows: Vec::new(),
            value_rows: vec![Vec::new(); s.members.len()],
        });
    }
    let mut aux_of = vec![usize::MAX; n];
    let mut aux_vars = Vec::new();
    for v in 0..n {
        if member_pos[v].is_none() {
            aux_of[v] = aux_vars.len();
            aux_vars.push(v);
        }
    }
    let na = aux_vars.len();
    let mut rows = Vec::new();
    for row in &model.rows {
        let mut terms: Vec<(usize, Vec<(usize, f64)>)> = Vec::new();
        let mut aux: Vec<(usize, f64)> = Vec::new();
        for &(v, a) in &row.coeffs {
            if a == 0.0 {
                continue;
            }
            match member_pos[v] {
                Some((g, k)) => match terms.iter_mut().find(|t| t.0 == g) {
                    Some(t) => match t.1.iter_mut().find(|e| e.0 == k) {
                        Some(e) => e.1 += a,
                        None => t.1.push((k, a)),
                    },
                    None => terms.push((g, vec![(k, a)])),
                },
                None => match aux.iter_mut().find(|e| e.0 == aux_of[v]) {
                    Some(e) => e.1 += a,
                    None => aux.push((aux_of[v], a)),
                },
            }
        }
        // the sum-to-one row of a group is implied by the domain representation
        if aux.is_empty() && terms.len() == 1 {
            let (g, entries) = &terms[0];
            let size = groups[*g].members.len();
            if row.sense == Sense::Eq
                && (row.rhs - 1.0).abs() < 1e-12
                && entries.len() == size
                && entries.iter().all(|e| (e.1 - 1.0).abs() < 1e-12)
            {
                continue;
            }
        }
        let nonneg = terms.iter().all(|t| t.1.iter().all(|e| e.1 >= 0.0));
        rows.push(PRow { terms, aux, sense: row.sense, rhs: row.rhs, kind: RowKind::Pure, nonneg });
    }
    // auxiliary components
    let mut parent: Vec<usize> = (0..na).collect();
    for r in &rows {
        for w in r.aux.windows(2) {
            let (a, b) = (find(&mut parent, w[0].0), find(&mut parent, w[1].0));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut aux_rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); na];
    for (ri, r) in rows.iter().enumerate() {
        for &(a, c) in &r.aux {
            aux_rows[a].push((ri as u32, c));
        }
    }
    let mut comp_size = vec![0usize; na];
    for a in 0..na {
        let root = find(&mut parent, a);
        comp_size[root] += 1;
    }
    let aux_cost: Vec<f64> = aux_vars.iter().map(|&v| model.objective[v]).collect();
    let aux_bounds: Vec<(f64, f64)> = aux_vars.iter().map(|&v| (model.vars[v].lower, model.vars[v].upper)).collect();
    let aux_integer: Vec<bool> = aux_vars.iter().map(|&v| model.vars[v].integer).collect();
    let mut aux_single = vec![false; na];
    let mut knapsacks = Vec::new();
    for a in 0..na {
        let root = find(&mut parent, a);
        if comp_size[root] == 1 {
            aux_single[a] = true;
        }
    }
    for ri in 0..rows.len() {
        if rows[ri].aux.is_empty() {
            continue;
        }
        if rows[ri].aux.len() == 1 && aux_single[rows[ri].aux[0].0] {
            rows[ri].kind = RowKind::Single;
            continue;
        }
        for &(a, _) in &rows[ri].aux {
            if aux_rows[a].len() != 1 {
                return Err(MilpError::UnsupportedStructure(format!(
                    "auxiliary variable {} couples several multi-variable rows",
                    model.vars[aux_vars[a]].name
                )));
            }
            if aux_integer[a] {
                return Err(MilpError::UnsupportedStructure(format!(
                    "integer variable {} shares a row with other auxiliary variables",
                    model.vars[aux_vars[a]].name
                )));
            }
        }
        let items = rows[ri].aux.clone();
        let bounds: Vec<(f64, f64)> = items.iter().map(|&(a, _)| aux_bounds[a]).collect();
        let costs: Vec<f64> = items.iter().map(|&(a, _)| aux_cost[a]).collect();
        let lp = RowLp::new(rows[ri].sense, rows[ri].rhs, items, &bounds, &costs);
        rows[ri].kind = RowKind::Knapsack(knapsacks.len());
        knapsacks.push(Knapsack { row: ri, lp });
    }
    let mut term_offset = Vec::with_capacity(rows.len());
    let mut off = 0;
    for (ri, r) in rows.iter().enumerate() {
        term_offset.push(off);
        off += r.terms.len();
        for (ti, (g, entries)) in r.terms.iter().enumerate() {
            groups[*g].rows.push(ri as u32);
            for &(k, a) in entries {
                groups[*g].value_rows[k].push((ri as u32, ti as u32, a));
            }
        }
    }
    term_offset.push(off);
    let max_group = groups.iter().map(|g| g.members.len()).max().unwrap_or(0);
    Ok(Prepared {
        groups,
        rows,
        aux_vars,
        aux_rows,
        aux_cost,
        aux_bounds,
        aux_integer,
        aux_single,
        knapsacks,
        term_offset,
        max_group,
    })
}

enum Trail {
    Remove(u32, u32),
    Lo(u32, f64),
    Hi(u32, f64),
}

struct Search<'a> {
    model: &'a MilpModel,
    p: &'a Prepared,
    alive: Vec<Vec<bool>>,
    count: Vec<usize>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    trail: Vec<Trail>,
    queue: VecDeque<u32>,
    in_queue: Vec<bool>,
    in_row: Vec<bool>,
    term_min: Vec<f64>,
    term_max: Vec<f64>,
    incumbent: Option<(f64, Vec<f64>)>,
    nodes: u64,
    stopped: bool,
    start: Instant,
    budget: &'a Budget,
}

impl<'a> Search<'a> {
    fn new(model: &'a MilpModel, p: &'a Prepared, budget: &'a Budget) -> Self {
        let total_terms = *p.term_offset.last().unwrap_or(&0);
        Search {
            model,
            p,
            alive: p.groups.iter().map(|g| vec![true; g.members.len()]).collect(),
            count: p.groups.iter().map(|g| g.members.len()).collect(),
            lo: p.aux_bounds.iter().map(|b| b.0).collect(),
            hi: p.aux_bounds.iter().map(|b| b.1).collect(),
            trail: Vec::new(),
            queue: VecDeque::new(),
            in_queue: vec![false; p.rows.len()],
            in_row: vec![false; p.max_group],
            term_min: vec![0.0; total_terms],
            term_max: vec![0.0; total_terms],
            incumbent: None,
            nodes: 0,
            stopped: false,
            start: Instant::now(),
            budget,
        }
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().expect("trail entry") {
                Trail::Remove(g, k) => {
                    self.alive[g as usize][k as usize] = true;
                    self.count[g as usize] += 1;
                }
                Trail::Lo(a, old) => self.lo[a as usize] = old,
                Trail::Hi(a, old) => self.hi[a as usize] = old,
            }
        }
    }

    fn enqueue(&mut self, r: u32) {
        if !self.in_queue[r as usize] {
            self.in_queue[r as usize] = true;
            self.queue.push_back(r);
        }
    }

    fn enqueue_group(&mut self, g: usize) {
        for i in 0..self.p.groups[g].rows.len() {
            let r = self.p.groups[g].rows[i];
            self.enqueue(r);
        }
    }

    fn enqueue_aux(&mut self, a: usize) {
        for i in 0..self.p.aux_rows[a].len() {
            let r = self.p.aux_rows[a][i].0;
            self.enqueue(r);
        }
    }

    fn remove(&mut self, g: usize, k: usize) {
        if self.alive[g][k] {
            self.alive[g][k] = false;
            self.count[g] -= 1;
            self.trail.push(Trail::Remove(g as u32, k as u32));
        }
    }

    fn fix(&mut self, g: usize, keep: usize) {
        for k in 0..self.alive[g].len() {
            if k != keep {
                self.remove(g, k);
            }
        }
        self.enqueue_group(g);
    }

    fn contribution(&self, g: usize, entries: &[(usize, f64)]) -> (f64, f64) {
        let (mut mn, mut mx, mut cnt) = (f64::INFINITY, f64::NEG_INFINITY, 0usize);
        for &(k, a) in entries {
            if self.alive[g][k] {
                mn = mn.min(a);
                mx = mx.max(a);
                cnt += 1;
            }
        }
        if cnt < self.count[g] {
            mn = mn.min(0.0);
            mx = mx.max(0.0);
        }
        (mn, mx)
    }

    fn clear_queue(&mut self) {
        while let Some(r) = self.queue.pop_front() {
            self.in_queue[r as usize] = false;
        }
    }

    /// Prunes group members whose contribution falls outside `[min_keep, max_keep]`.
    /// Returns false when the group becomes empty.
    fn prune_group(&mut self, g: usize, entries: &[(usize, f64)], min_keep: f64, max_keep: f64) -> (bool, bool) {
        let mut changed = false;
        for &(k, a) in entries {
            self.in_row[k] = true;
            if self.alive[g][k] && (a < min_keep || a > max_keep) {
                self.remove(g, k);
                changed = true;
            }
        }
        if 0.0 < min_keep || 0.0 > max_keep {
            for k in 0..self.alive[g].len() {
                if !self.in_row[k] && self.alive[g][k] {
                    self.remove(g, k);
                    changed = true;
                }
            }
        }
        for &(k, _) in entries {
            self.in_row[k] = false;
        }
        (changed, self.count[g] > 0)
    }

    fn set_lo(&mut self, a: usize, v: f64) -> bool {
        let v = if self.p.aux_integer[a] { (v - 1e-9).ceil() } else { v - ROW_TOL };
        if v > self.lo[a] + 1e-7 {
            self.trail.push(Trail::Lo(a as u32, self.lo[a]));
            self.lo[a] = v;
            return true;
        }
        false
    }

    fn set_hi(&mut self, a: usize, v: f64) -> bool {
        let v = if self.p.aux_integer[a] { (v + 1e-9).floor() } else { v + ROW_TOL };
        if v < self.hi[a] - 1e-7 {
            self.trail.push(Trail::Hi(a as u32, self.hi[a]));
            self.hi[a] = v;
            return true;
        }
        false
    }

    /// Runs bound propagation to a fixpoint. Returns false on infeasibility.
    fn propagate(&mut self) -> bool {
        let p = self.p;
        while let Some(r) = self.queue.pop_front() {
            self.in_queue[r as usize] = false;
            let row = &p.rows[r as usize];
            let off = p.term_offset[r as usize];
            let (mut lmin, mut lmax) = (0.0, 0.0);
            for (ti, (g, entries)) in row.terms.iter().enumerate() {
                let (mn, mx) = self.contribution(*g, entries);
                self.term_min[off + ti] = mn;
                self.term_max[off + ti] = mx;
                lmin += mn;
                lmax += mx;
            }
            for &(a, c) in &row.aux {
                let (x, y) = (c * self.lo[a], c * self.hi[a]);
                lmin += x.min(y);
                lmax += x.max(y);
            }
            let upper = matches!(row.sense, Sense::Le | Sense::Eq);
            let lower = matches!(row.sense, Sense::Ge | Sense::Eq);
            if (upper && lmin > row.rhs + ROW_TOL) || (lower && lmax < row.rhs - ROW_TOL) {
                self.clear_queue();
                return false;
            }
            let slack_up = if upper { row.rhs + ROW_TOL - lmin } else { f64::INFINITY };
            let slack_down = if lower { lmax - (row.rhs - ROW_TOL) } else { f64::INFINITY };
            for ti in 0..row.terms.len() {
                let (mn, mx) = (self.term_min[off + ti], self.term_max[off + ti]);
                if mx - mn <= slack_up.min(slack_down) {
                    continue;
                }
                let (g, entries) = (&row.terms[ti].0, &row.terms[ti].1);
                let (changed, ok) = self.prune_group(*g, entries, mx - slack_down, mn + slack_up);
                if !ok {
                    self.clear_queue();
                    return false;
                }
                if changed {
                    self.enqueue_group(*g);
                }
            }
            for &(a, c) in &row.aux {
                let (lo, hi) = (self.lo[a], self.hi[a]);
                let mut changed = false;
                if slack_up.is_finite() {
                    if c > 0.0 {
                        changed |= self.set_hi(a, lo + slack_up / c);
                    } else {
                        changed |= self.set_lo(a, hi - slack_up / -c);
                    }
                }
                if slack_down.is_finite() {
                    if c > 0.0 {
                        changed |= self.set_lo(a, hi - slack_down / c);
                    } else {
                        changed |= self.set_hi(a, lo + slack_down / -c);
                    }
                }
                if self.lo[a] > self.hi[a] + 1e-9 {
                    self.clear_queue();
                    return false;
                }
                if changed {
                    self.enqueue_aux(a);
                }
            }
        }
        true
    }

    fn fixed_member(&self, g: usize) -> usize {
        self.alive[g].iter().position(|&x| x).expect("nonempty domain")
    }

    /// Additive lower bound. Also leaves per-knapsack base data in `kn_base`.
    fn lower_bound(&mut self, kn_base: &mut Vec<(f64, f64, bool)>) -> f64 {
        let p = self.p;
        let mut lb = 0.0;
        for a in 0..p.aux_vars.len() {
            if p.aux_single[a] {
                let c = p.aux_cost[a];
                lb += if c >= 0.0 { c * self.lo[a] } else { c * self.hi[a] };
            }
        }
        kn_base.clear();
        for kn in &p.knapsacks {
            let row = &p.rows[kn.row];
            let off = p.term_offset[kn.row];
            let mut s0 = 0.0;
            for (ti, (g, entries)) in row.terms.iter().enumerate() {
                let (mn, mx) = self.contribution(*g, entries);
                self.term_min[off + ti] = mn;
                self.term_max[off + ti] = mx;
                s0 += mn;
            }
            let f0 = if row.nonneg { kn.lp.value(s0) } else { f64::INFINITY };
            if f0.is_finite() {
                lb += f0;
                kn_base.push((s0, f0, true));
            } else {
                lb += kn.lp.box_bound();
                kn_base.push((s0, f0, false));
            }
        }
        for g in 0..p.groups.len() {
            if self.count[g] == 1 {
                lb += p.groups[g].costs[self.fixed_member(g)];
            } else {
                let best = (0..p.groups[g].members.len())
                    .filter(|&k| self.alive[g][k])
                    .map(|k| self.member_score(g, k, kn_base))
                    .fold(f64::INFINITY, f64::min);
                lb += best;
            }
            if lb == f64::INFINITY {
                return lb;
            }
        }
        lb
    }

    fn member_score(&self, g: usize, k: usize, kn_base: &[(f64, f64, bool)]) -> f64 {
        let p = self.p;
        let mut score = p.groups[g].costs[k];
        for &(r, ti, a) in &p.groups[g].value_rows[k] {
            if let RowKind::Knapsack(ki) = p.rows[r as usize].kind {
                let (s0, f0, use_inc) = kn_base[ki];
                if use_inc {
                    let mn = self.term_min[p.term_offset[r as usize] + ti as usize];
                    score += p.knapsacks[ki].lp.value(s0 + (a - mn)) - f0;
                }
            }
        }
        score
    }

    fn time_up(&mut self) -> bool {
        if self.stopped {
            return true;
        }
        if let Some(n) = self.budget.node_limit {
            if self.nodes >= n {
                self.stopped = true;
            }
        }
        if self.nodes % 64 == 0 {
            if let Some(t) = self.budget.time_limit {
                if self.start.elapsed() >= t {
                    self.stopped = true;
                }
            }
        }
        self.stopped
    }

    /// Exact completion of a fully fixed node.
    fn evaluate_leaf(&self) -> Option<Vec<f64>> {
        let p = self.p;
        let mut values = vec![0.0; self.model.num_vars()];
        let mut choice = vec![0usize; p.groups.len()];
        for (g, grp) in p.groups.iter().enumerate() {
            let k = self.fixed_member(g);
            choice[g] = k;
            values[grp.members[k]] = 1.0;
        }
        let activity: Vec<f64> = p
            .rows
            .iter()
            .map(|row| {
                row.terms
                    .iter()
                    .map(|(g, entries)| entries.iter().find(|e| e.0 == choice[*g]).map_or(0.0, |e| e.1))
                    .sum()
            })
            .collect();
        for (ri, row) in p.rows.iter().enumerate() {
            if row.kind == RowKind::Pure && !super::row_satisfied(row.sense, activity[ri], row.rhs) {
                return None;
            }
        }
        for a in 0..p.aux_vars.len() {
            if !p.aux_single[a] {
                continue;
            }
            let (mut lo, mut hi) = p.aux_bounds[a];
            for &(r, c) in &p.aux_rows[a] {
                let row = &p.rows[r as usize];
                let (l, h) = single_row_interval(row.sense, activity[r as usize], c, row.rhs);
                lo = lo.max(l);
                hi = hi.min(h);
            }
            let lo = lo.max(p.aux_bounds[a].0);
            let hi = hi.min(p.aux_bounds[a].1);
            values[p.aux_vars[a]] = pick_in_interval(lo, hi, p.aux_cost[a], p.aux_integer[a])?;
        }
        for kn in &p.knapsacks {
            let vals = kn.lp.solve(activity[kn.row])?;
            for (&(a, _), v) in kn.lp.items.iter().zip(vals) {
                values[p.aux_vars[a]] = v;
            }
        }
        Some(values)
    }

    fn try_incumbent(&mut self, values: Vec<f64>) {
        let viol = self.model.violations(&values, FEASIBILITY_TOL);
        if !viol.is_empty() {
            log::warn!("branch-and-bound leaf failed the row check: {}", viol[0]);
            return;
        }
        let obj = self.model.objective_value(&values);
        if self.incumbent.as_ref().map_or(true, |(best, _)| obj < best - GAP_ABS_TOL) {
            self.incumbent = Some((obj, values));
        }
    }

    fn incumbent_value(&self) -> f64 {
        self.incumbent.as_ref().map_or(f64::INFINITY, |x| x.0)
    }

    fn dfs(&mut self, kn_base: &mut Vec<(f64, f64, bool)>) {
        self.nodes += 1;
        let lb = self.lower_bound(kn_base);
        if lb == f64::INFINITY || lb >= self.incumbent_value() - GAP_ABS_TOL {
            return;
        }
        let p = self.p;
        let mut pick: Option<(f64, usize)> = None;
        for g in 0..p.groups.len() {
            if self.count[g] > 1 {
                let w = (0..p.groups[g].members.len())
                    .filter(|&k| self.alive[g][k])
                    .map(|k| p.groups[g].weights[k])
                    .fold(f64::INFINITY, f64::min);
                if pick.map_or(true, |(bw, _)| w < bw) {
                    pick = Some((w, g));
                }
            }
        }
        let Some((_, g)) = pick else {
            if let Some(values) = self.evaluate_leaf() {
                self.try_incumbent(values);
            }
            return;
        };
        let mut order: Vec<(f64, f64, usize)> = (0..p.groups[g].members.len())
            .filter(|&k| self.alive[g][k])
            .map(|k| (self.member_score(g, k, kn_base), p.groups[g].weights[k], k))
            .collect();
        order.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)).then(x.2.cmp(&y.2)));
        for (score, _, k) in order {
            if self.time_up() {
                return;
            }
            if score == f64::INFINITY {
                break;
            }
            let mark = self.trail.len();
            self.fix(g, k);
            if self.propagate() {
                self.dfs(kn_base);
            }
            self.undo(mark);
        }
    }

    fn apply_warm_start(&mut self, values: &[f64]) {
        if values.len() != self.model.num_vars() {
            log::warn!("ignoring warm start of length {}", values.len());
            return;
        }
        let mark = self.trail.len();
        let mut ok = true;
        for g in 0..self.p.groups.len() {
            let chosen = self.p.groups[g]
                .members
                .iter()
                .enumerate()
                .filter(|(k, &v)| self.alive[g][*k] && values[v] > 0.5)
                .map(|(k, _)| k)
                .next();
            match chosen {
                Some(k) => self.fix(g, k),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && self.propagate() {
            if let Some(v) = self.evaluate_leaf() {
                self.try_incumbent(v);
            }
        } else {
            self.clear_queue();
        }
        self.undo(mark);
    }
}

/// Solves `model` by branch-and-bound.
///
/// Returns `Optimal` when the search space is exhausted, `Infeasible` when it
/// is exhausted without a solution, and `TimeLimit` with the best incumbent
/// (possibly none) when the budget runs out. Node counts and incumbents are
/// deterministic for a given model and node limit.
pub fn solve_builtin(model: &MilpModel, budget: &Budget) -> Result<MilpSolution, MilpError> {
    let prepared = prepare(model)?;
    let mut search = Search::new(model, &prepared, budget);
    for r in 0..prepared.rows.len() {
        search.enqueue(r as u32);
    }
    if !search.propagate() {
        return Ok(MilpSolution::infeasible(search.start.elapsed().as_secs_f64(), 0));
    }
    let mut kn_base = Vec::new();
    let root_bound = search.lower_bound(&mut kn_base);
    if let Some(ws) = &budget.warm_start {
        search.apply_warm_start(ws);
    }
    search.dfs(&mut kn_base);
    let wall = search.start.elapsed().as_secs_f64();
    let nodes = search.nodes;
    let stopped = search.stopped;
    Ok(match search.incumbent {
        Some((obj, values)) => MilpSolution {
            status: if stopped { Status::TimeLimit } else { Status::Optimal },
            bound: if stopped { root_bound.min(obj) } else { obj },
            values,
            objective: obj,
            wall_time: wall,
            nodes,
        },
        None if stopped => MilpSolution {
            status: Status::TimeLimit,
            values: Vec::new(),
            objective: f64::INFINITY,
            bound: root_bound,
            wall_time: wall,
            nodes,
        },
        None => MilpSolution::infeasible(wall, nodes),
    })
}
