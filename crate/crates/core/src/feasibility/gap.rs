use serde::{Deserialize, Serialize};

/// Relative duality gap between the best feasible cost and the best certified bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub best_feasible: f64,
    pub best_bound: f64,
    /// `(feasible − bound) / feasible`; for a nonpositive feasible cost the
    /// relative gap is undefined and this holds the absolute difference.
    pub gap: f64,
    pub relative: bool,
    /// Iteration whose multipliers produced `best_bound`, when known.
    pub bound_iteration: Option<usize>,
}

pub fn compute_gap(feasible_cost: f64, bound: f64) -> GapReport {
    let relative = feasible_cost > 0.0;
    let gap = if relative { (feasible_cost - bound) / feasible_cost } else { feasible_cost - bound };
    GapReport { best_feasible: feasible_cost, best_bound: bound, gap, relative, bound_iteration: None }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_robustness_gaps() {
        // reported with two decimals in percent
        let r = compute_gap(158.89, 143.25);
        assert_eq!(format!("{:.2}", r.gap * 100.0), "9.84");
        let r = compute_gap(133.50, 120.27);
        assert_eq!(format!("{:.2}", r.gap * 100.0), "9.91");
    }

    #[test]
    fn zero_gap_and_nonpositive_cost() {
        assert_eq!(compute_gap(10.0, 10.0).gap, 0.0);
        let r = compute_gap(0.0, -2.0);
        assert!(!r.relative);
        assert_eq!(r.gap, 2.0);
    }
}
