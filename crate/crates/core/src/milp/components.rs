//! Closed-form minimization over the non-SOS ("auxiliary") variables.
//!
//! Once the SOS1 binaries are fixed, every row is linear in auxiliary
//! variables only. The builtin solver supports two shapes of auxiliary
//! component:
//!
//! * a single variable constrained by any number of rows (tardiness, ceiling
//!   integers, capacity slacks): its feasible set is an interval;
//! * a single row over several continuous variables (slack plus penalty
//!   split): a one-row LP, solved greedily by cost per unit of activity.
//!
//! The value of a one-row LP as a function of the binary activity is convex,
//! which is what makes the additive node bound admissible.

use super::Sense;
use crate::tolerance::ROW_TOL;

/// Exact interval of `u` allowed by `activity + a*u (sense) rhs`.
pub(crate) fn single_row_interval(sense: Sense, activity: f64, a: f64, rhs: f64) -> (f64, f64) {
    let room = rhs - activity;
    let (lo, hi) = match sense {
        Sense::Le => (f64::NEG_INFINITY, room),
        Sense::Ge => (room, f64::INFINITY),
        Sense::Eq => (room, room),
    };
    if a > 0.0 {
        (lo / a, hi / a)
    } else {
        (hi / a, lo / a)
    }
}

/// Cheapest value inside `[lo, hi]` for a variable with cost `cost`.
pub(crate) fn pick_in_interval(lo: f64, hi: f64, cost: f64, integer: bool) -> Option<f64> {
    let (lo, hi) = if integer { ((lo - 1e-9).ceil(), (hi + 1e-9).floor()) } else { (lo, hi) };
    if lo > hi {
        return None;
    }
    Some(if cost < 0.0 { hi } else { lo })
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    item: usize,
    /// Activity that this move can supply.
    len: f64,
    /// Cost per unit of activity.
    rate: f64,
    /// Change of the variable per unit of activity moved.
    du: f64,
}

/// One-row LP `min Σ c_k u_k  s.t.  Σ a_k u_k + s (sense) rhs,  l_k <= u_k <= h_k`
/// as a function of the binary activity `s`.
#[derive(Debug, Clone)]
pub(crate) struct RowLp {
    pub sense: Sense,
    pub rhs: f64,
    pub items: Vec<(usize, f64)>,
    base: Vec<f64>,
    base_activity: f64,
    base_cost: f64,
    up: Vec<Segment>,
    down: Vec<Segment>,
}

impl RowLp {
    /// `items` are `(aux index, coefficient)`; `bounds` and `costs` are per item.
    pub fn new(sense: Sense, rhs: f64, items: Vec<(usize, f64)>, bounds: &[(f64, f64)], costs: &[f64]) -> Self {
        let mut base = Vec::with_capacity(items.len());
        let mut up = Vec::new();
        let mut down = Vec::new();
        let (mut base_activity, mut base_cost) = (0.0, 0.0);
        for (k, &(_, a)) in items.iter().enumerate() {
            let (l, h) = bounds[k];
            let c = costs[k];
            let at_upper = c < 0.0;
            let u = if at_upper { h } else { l };
            base.push(u);
            base_activity += a * u;
            base_cost += c * u;
            let span = h - l;
            if a == 0.0 || span <= 0.0 {
                continue;
            }
            let len = a.abs() * span;
            let rate = c.abs() / a.abs();
            // moving away from the cheap bound: +1 when at lower, -1 when at upper
            let dir = if at_upper { -1.0 } else { 1.0 };
            let seg = Segment { item: k, len, rate, du: dir / a.abs() };
            if dir * a > 0.0 {
                up.push(seg);
            } else {
                down.push(seg);
            }
        }
        let by_rate = |x: &Segment, y: &Segment| x.rate.total_cmp(&y.rate).then(x.item.cmp(&y.item));
        up.sort_by(by_rate);
        down.sort_by(by_rate);
        RowLp { sense, rhs, items, base, base_activity, base_cost, up, down }
    }

    fn target(&self, binary_activity: f64) -> (f64, f64) {
        let room = self.rhs - binary_activity;
        match self.sense {
            Sense::Le => (f64::NEG_INFINITY, room),
            Sense::Ge => (room, f64::INFINITY),
            Sense::Eq => (room, room),
        }
    }

    /// Minimum cost for the given binary activity (`+inf` when infeasible).
    pub fn value(&self, binary_activity: f64) -> f64 {
        let (lo, hi) = self.target(binary_activity);
        let a0 = self.base_activity;
        let (need, segs) = if a0 < lo - ROW_TOL {
            (lo - a0, &self.up)
        } else if a0 > hi + ROW_TOL {
            (a0 - hi, &self.down)
        } else {
            return self.base_cost;
        };
        let mut need = need;
        let mut cost = self.base_cost;
        for s in segs {
            let take = s.len.min(need);
            cost += take * s.rate;
            need -= take;
            if need <= ROW_TOL {
                return cost;
            }
        }
        f64::INFINITY
    }

    /// Optimal item values for the given binary activity.
    pub fn solve(&self, binary_activity: f64) -> Option<Vec<f64>> {
        let (lo, hi) = self.target(binary_activity);
        let mut vals = self.base.clone();
        let a0 = self.base_activity;
        let (mut need, segs) = if a0 < lo - ROW_TOL {
            (lo - a0, &self.up)
        } else if a0 > hi + ROW_TOL {
            (a0 - hi, &self.down)
        } else {
            return Some(vals);
        };
        for s in segs {
            let take = s.len.min(need);
            vals[s.item] += take * s.du;
            need -= take;
            if need <= ROW_TOL {
                return Some(vals);
            }
        }
        None
    }

    /// Lower bound on the cost ignoring the row (every item at its cheap bound).
    pub fn box_bound(&self) -> f64 {
        self.base_cost
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// slack z in [0,C] with cost lam, split v+ / v- with cost rho:
    /// s + z - v+ + v- = C.
    fn cell(lam: f64, rho: f64, cap: f64) -> RowLp {
        RowLp::new(
            Sense::Eq,
            cap,
            vec![(0, 1.0), (1, -1.0), (2, 1.0)],
            &[(0.0, cap), (0.0, 100.0), (0.0, cap)],
            &[lam, rho, rho],
        )
    }

    fn brute(lam: f64, rho: f64, cap: f64, s: f64) -> f64 {
        // residual r = s + z - cap, cost lam*z + rho*|r|
        let mut best = f64::INFINITY;
        for k in 0..=10_000 {
            let z = cap * k as f64 / 10_000.0;
            best = best.min(lam * z + rho * (s + z - cap).abs());
        }
        best
    }

    #[test]
    fn cell_penalty_matches_grid_search() {
        for &(lam, rho) in &[(0.0, 0.0), (0.5, 1.0), (2.0, 1.0), (1.0, 1.0), (0.0, 3.0)] {
            for &s in &[0.0, 0.4, 1.0, 1.95, 3.2] {
                let v = cell(lam, rho, 1.0).value(s);
                assert!((v - brute(lam, rho, 1.0, s)).abs() < 1e-3, "lam={lam} rho={rho} s={s}: {v}");
            }
        }
    }

    #[test]
    fn overloaded_cell_pays_rho_per_unit() {
        let lp = cell(0.3, 2.0, 1.0);
        let s = 1.0 + 0.95;
        assert!((lp.value(s) - 2.0 * 0.95).abs() < 1e-12);
        let vals = lp.solve(s).unwrap();
        assert_eq!(vals[0], 0.0);
        assert!((vals[1] - 0.95).abs() < 1e-12);
        assert_eq!(vals[2], 0.0);
    }

    #[test]
    fn value_is_convex_in_activity() {
        let lp = cell(1.5, 1.0, 2.0);
        let f: Vec<f64> = (0..40).map(|k| lp.value(k as f64 * 0.1)).collect();
        for w in f.windows(3) {
            assert!(w[0] + w[2] >= 2.0 * w[1] - 1e-9);
        }
    }

    #[test]
    fn le_row_infeasible_beyond_capacity() {
        // s + z = 1 with z in [0,1]
        let lp = RowLp::new(Sense::Eq, 1.0, vec![(0, 1.0)], &[(0.0, 1.0)], &[0.0]);
        assert_eq!(lp.value(0.5), 0.0);
        assert!(lp.value(1.5).is_infinite());
    }

    #[test]
    fn interval_and_integer_pick() {
        // 8y - 7 >= 0 and 8y - 7 <= 8 - 0.008
        let (lo1, _) = single_row_interval(Sense::Ge, -7.0, 8.0, 0.0);
        let (_, hi2) = single_row_interval(Sense::Le, -7.0, 8.0, 8.0 - 0.008);
        assert_eq!(pick_in_interval(lo1, hi2, 0.0, true), Some(1.0));
    }
}
