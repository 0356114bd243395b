//! Phase-one simplex for systems `a_r · x <= b_r` over free variables.

use crate::tolerance::LP_WITNESS_TOL;

/// One inequality `coeffs · x <= rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRow {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpVerdict {
    Feasible(Vec<f64>),
    Infeasible,
}

impl LpVerdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpVerdict::Feasible(_))
    }
}

const PIVOT_EPS: f64 = 1e-11;

/// Decides whether `rows` (all over `dim` free variables) have a common solution.
///
/// Free variables are split into positive and negative parts; each row gets a
/// slack, and rows with a negative right-hand side also get an artificial.
/// Bland's rule keeps the pivoting finite. A feasible verdict always carries a
/// witness that satisfies every row within `1e-9` (relative to the row scale).
pub fn solve_lp_feasibility(rows: &[LinearRow], dim: usize) -> LpVerdict {
    if rows.is_empty() {
        return LpVerdict::Feasible(vec![0.0; dim]);
    }
    // Columns that are zero in every row do not matter.
    let active: Vec<usize> = (0..dim).filter(|&j| rows.iter().any(|r| r.coeffs[j] != 0.0)).collect();
    let n = active.len();
    let m = rows.len();
    let needs_art: Vec<bool> = rows.iter().map(|r| r.rhs < 0.0).collect();
    let n_art = needs_art.iter().filter(|&&x| x).count();
    let cols = 2 * n + m + n_art;
    let width = cols + 1;
    let mut tab = vec![0.0; (m + 1) * width];
    let mut basis = vec![0usize; m];
    let mut art = 2 * n + m;
    for (i, r) in rows.iter().enumerate() {
        let sign = if needs_art[i] { -1.0 } else { 1.0 };
        let row = &mut tab[i * width..(i + 1) * width];
        for (k, &j) in active.iter().enumerate() {
            row[k] = sign * r.coeffs[j];
            row[n + k] = -sign * r.coeffs[j];
        }
        row[2 * n + i] = sign;
        row[cols] = sign * r.rhs;
        if needs_art[i] {
            row[art] = 1.0;
            basis[i] = art;
            art += 1;
        } else {
            basis[i] = 2 * n + i;
        }
    }
    // objective row: minimize the sum of artificials, expressed in nonbasic terms
    for i in 0..m {
        if needs_art[i] {
            for c in 0..width {
                let v = tab[i * width + c];
                tab[m * width + c] -= v;
            }
        }
    }
    for c in 2 * n + m..cols {
        tab[m * width + c] = 0.0;
    }
    let scale = 1.0 + rows.iter().map(|r| r.rhs.abs()).fold(0.0, f64::max);
    let max_iter = 50 * (m + cols) + 1000;
    for _ in 0..max_iter {
        let entering = (0..cols).find(|&c| tab[m * width + c] < -PIVOT_EPS * scale);
        let Some(e) = entering else { break };
        let mut leave: Option<(f64, usize, usize)> = None;
        for i in 0..m {
            let a = tab[i * width + e];
            if a > PIVOT_EPS {
                let ratio = tab[i * width + cols] / a;
                let better = match leave {
                    None => true,
                    Some((best, _, bi)) => ratio < best - 1e-12 || (ratio <= best + 1e-12 && basis[i] < bi),
                };
                if better {
                    leave = Some((ratio, i, basis[i]));
                }
            }
        }
        let Some((_, r, _)) = leave else {
            // cannot happen in phase one; the objective is bounded by zero
            break;
        };
        pivot(&mut tab, width, m, r, e);
        basis[r] = e;
    }
    let infeasibility = -tab[m * width + cols];
    if infeasibility > 1e-9 * scale {
        return LpVerdict::Infeasible;
    }
    let mut x = vec![0.0; dim];
    for (i, &b) in basis.iter().enumerate() {
        let v = tab[i * width + cols];
        if b < n {
            x[active[b]] += v;
        } else if b < 2 * n {
            x[active[b - n]] -= v;
        }
    }
    if witness_ok(rows, &x) {
        LpVerdict::Feasible(x)
    } else {
        log::warn!("phase-one witness failed the row check; reporting infeasible");
        LpVerdict::Infeasible
    }
}

fn pivot(tab: &mut [f64], width: usize, m: usize, r: usize, e: usize) {
    let p = tab[r * width + e];
    for c in 0..width {
        tab[r * width + c] /= p;
    }
    tab[r * width + e] = 1.0;
    let pivot_row: Vec<f64> = tab[r * width..(r + 1) * width].to_vec();
    for i in 0..=m {
        if i == r {
            continue;
        }
        let f = tab[i * width + e];
        if f == 0.0 {
            continue;
        }
        let row = &mut tab[i * width..(i + 1) * width];
        for (c, pv) in pivot_row.iter().enumerate() {
            if *pv != 0.0 {
                row[c] -= f * pv;
            }
        }
        row[e] = 0.0;
    }
}

/// Checks `x` against every row with a tolerance of `1e-9` times the row scale.
pub(crate) fn witness_ok(rows: &[LinearRow], x: &[f64]) -> bool {
    rows.iter().all(|r| {
        let act: f64 = r.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        let mag: f64 = r.coeffs.iter().zip(x).map(|(a, v)| (a * v).abs()).sum::<f64>();
        act <= r.rhs + LP_WITNESS_TOL * (1.0 + r.rhs.abs().max(mag))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(c: &[f64], b: f64) -> LinearRow {
        LinearRow { coeffs: c.to_vec(), rhs: b }
    }

    #[test]
    fn empty_system_is_feasible() {
        assert_eq!(solve_lp_feasibility(&[], 3), LpVerdict::Feasible(vec![0.0; 3]));
    }

    #[test]
    fn pinned_point() {
        // x >= 1 and x <= 1
        let rows = [row(&[-4.0], -4.0), row(&[4.0], 4.0)];
        match solve_lp_feasibility(&rows, 1) {
            LpVerdict::Feasible(x) => assert!((x[0] - 1.0).abs() < 1e-9),
            LpVerdict::Infeasible => panic!("expected feasible"),
        }
    }

    #[test]
    fn disjoint_half_lines() {
        // x >= 1.5, x <= 2, x >= 2.5
        let rows = [row(&[-1.0], -1.5), row(&[1.0], 2.0), row(&[-1.0], -2.5)];
        assert_eq!(solve_lp_feasibility(&rows, 1), LpVerdict::Infeasible);
    }

    #[test]
    fn negative_region_needs_free_variables() {
        // x <= -3, y >= 2, x + y <= 0
        let rows = [row(&[1.0, 0.0], -3.0), row(&[0.0, -1.0], -2.0), row(&[1.0, 1.0], 0.0)];
        let LpVerdict::Feasible(x) = solve_lp_feasibility(&rows, 2) else { panic!() };
        assert!(witness_ok(&rows, &x));
        assert!(x[0] <= -3.0 + 1e-9 && x[1] >= 2.0 - 1e-9);
    }

    #[test]
    fn unused_dimensions_stay_zero() {
        let rows = [row(&[0.0, 1.0, 0.0], -1.0)];
        let LpVerdict::Feasible(x) = solve_lp_feasibility(&rows, 3) else { panic!() };
        assert_eq!(x[0], 0.0);
        assert_eq!(x[2], 0.0);
        assert!(x[1] <= -1.0 + 1e-9);
    }
}
