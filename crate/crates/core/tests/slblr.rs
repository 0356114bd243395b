mod common;

use common::{instance, job, tiny_instance};
use jobshop_core::feasibility::check_feasible;
use jobshop_core::instance::{auto_horizon, generate_instance, GeneratorConfig, Instance};
use jobshop_core::milp::enumerate_all;
use jobshop_core::model::{build_full_model, evaluate_objective, VariableLayout};
use jobshop_core::schedule::{JobSchedule, Placement, Schedule};
use jobshop_core::slblr::{evaluate_dual_bound, solve, surrogate_subgradient, DualEngine, HyperParams, SolveOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Duration;

fn options(beta: Option<f64>) -> SolveOptions {
    SolveOptions { params: HyperParams { beta, ..HyperParams::default() }, ..SolveOptions::default() }
}

fn one_op_schedule(starts: &[u32], retry: u32) -> Schedule {
    Schedule {
        jobs: starts
            .iter()
            .map(|&s| JobSchedule {
                first_pass: vec![Placement::new(0, s)],
                discard: vec![vec![Placement::new(0, retry)]],
                rework: vec![vec![Placement::new(0, retry)]],
            })
            .collect(),
    }
}

#[test]
fn idle_machines_leave_minus_capacity() {
    let inst = instance(vec![job(1, 30, 0.0, 0.0, &[(1, 1)])], &[2], 16, 8);
    let s = one_op_schedule(&[1], 9);
    let cells = inst.num_cells();
    let eval = surrogate_subgradient(&inst, &s, &vec![0.0; cells], 0.0).unwrap();
    // the job only loads cell t=1 (retries have weight zero)
    assert_eq!(eval.residual[0], -1.0);
    assert!(eval.residual[1..].iter().all(|&g| g == -2.0));
}

#[test]
fn exact_capacity_and_stacked_first_ops() {
    let inst = instance(vec![job(1, 30, 0.0, 0.0, &[(1, 1)]), job(2, 30, 0.0, 0.0, &[(1, 1)])], &[1], 16, 8);
    let lambda = vec![0.0; inst.num_cells()];
    let single = surrogate_subgradient(&inst, &one_op_schedule(&[3, 5], 9), &lambda, 0.0).unwrap();
    assert_eq!(single.residual[2], 0.0);
    let stacked = surrogate_subgradient(&inst, &one_op_schedule(&[3, 3], 9), &lambda, 0.5).unwrap();
    assert_eq!(stacked.residual[2], 1.0);
    assert_eq!(stacked.value, 0.5);
}

#[test]
fn single_job_lands_at_earliest_start() {
    let inst = instance(vec![job(1, 3, 0.1, 0.5, &[(1, 2), (1, 1)])], &[1], 24, 8);
    let layout = VariableLayout::new(&inst).unwrap();
    let mut engine = DualEngine::new(&inst, &layout, options(None)).unwrap();
    engine.dual_iteration();
    let s = engine.relaxed_schedule();
    assert_eq!(s.jobs[0].first_pass, vec![Placement::new(0, 1), Placement::new(0, 3)]);
    let eval = surrogate_subgradient(&inst, &s, &engine.lambda, engine.rho).unwrap();
    assert!(eval.residual.iter().all(|&g| g <= 0.0));
}

#[test]
fn contested_cell_prices_rise() {
    // both jobs want t=1 on a single machine
    let inst = instance(vec![job(1, 1, 0.0, 0.0, &[(1, 1)]), job(2, 1, 0.0, 0.0, &[(1, 1)])], &[1], 16, 8);
    let layout = VariableLayout::new(&inst).unwrap();
    let mut engine = DualEngine::new(&inst, &layout, options(Some(1e-9))).unwrap();
    let mut prev = engine.lambda[0];
    for _ in 0..10 {
        let before = surrogate_subgradient(&inst, &engine.relaxed_schedule(), &engine.lambda, engine.rho).unwrap();
        engine.dual_iteration();
        let after = surrogate_subgradient(&inst, &engine.relaxed_schedule(), &engine.lambda, engine.rho).unwrap();
        let contested = engine.relaxed_schedule().jobs.iter().all(|j| j.first_pass[0].start == 1);
        if contested && before.residual[0] > 0.0 {
            assert!(engine.lambda[0] > prev, "lambda did not rise: {prev} -> {}", engine.lambda[0]);
        }
        assert!(after.residual.len() == inst.num_cells());
        prev = engine.lambda[0];
    }
    assert!(prev > 0.0);
}

#[test]
fn zero_beta_keeps_rho() {
    let inst = generate_instance(&GeneratorConfig { jobs: 4, ..GeneratorConfig::example1_family(3) }).unwrap();
    let layout = VariableLayout::new(&inst).unwrap();
    let opts = SolveOptions {
        params: HyperParams { beta: Some(0.0), rho0: 0.7, ..HyperParams::default() },
        ..SolveOptions::default()
    };
    let mut engine = DualEngine::new(&inst, &layout, opts).unwrap();
    for _ in 0..5 {
        let row = engine.dual_iteration();
        assert_eq!(row.rho, 0.7);
    }
}

#[test]
fn engine_load_matches_relaxed_schedule() {
    let inst = generate_instance(&GeneratorConfig { jobs: 6, ..GeneratorConfig::example1_family(5) }).unwrap();
    let layout = VariableLayout::new(&inst).unwrap();
    let mut engine = DualEngine::new(&inst, &layout, options(None)).unwrap();
    for _ in 0..15 {
        let lambda = engine.lambda.clone();
        let rho = engine.rho;
        let row = engine.dual_iteration();
        // the row reports L at the prices in force during the iteration
        let eval = surrogate_subgradient(&inst, &engine.relaxed_schedule(), &lambda, rho).unwrap();
        assert!(
            (row.lagrangian - eval.value).abs() < 1e-6 * eval.value.abs().max(1.0),
            "{} vs {}",
            row.lagrangian,
            eval.value
        );
        let norm = eval.residual.iter().map(|g| g * g).sum::<f64>().sqrt();
        assert!((row.g_norm - norm).abs() < 1e-6 * norm.max(1.0));
        assert!(engine.lambda.iter().all(|&l| l >= 0.0));
    }
}

fn two_job_instance(seed: u64) -> Instance {
    (seed * 1000..).map(|s| tiny_instance(s, 2e5)).find(|inst| inst.num_jobs() == 2).unwrap()
}

#[test]
fn bound_never_exceeds_enumerated_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seed in 0..5 {
        let inst = two_job_instance(seed);
        let layout = VariableLayout::new(&inst).unwrap();
        let built = build_full_model(&inst, &layout).unwrap();
        let opt = enumerate_all(&built.model).unwrap();
        for _ in 0..20 {
            let scale = [0.1, 1.0, 10.0][rng.gen_range(0..3)];
            let lambda: Vec<f64> = (0..layout.num_cells).map(|_| rng.gen::<f64>() * scale).collect();
            let q = evaluate_dual_bound(&inst, &layout, &lambda);
            assert!(q <= opt.objective + 1e-9, "seed {seed}: q {q} > optimum {}", opt.objective);
        }
    }
}

#[test]
fn zero_prices_give_the_unconstrained_optimum() {
    for seed in 0..10 {
        let mut inst = two_job_instance(seed);
        for g in &mut inst.machine_groups {
            g.capacity = 10;
        }
        let layout = VariableLayout::new(&inst).unwrap();
        let built = build_full_model(&inst, &layout).unwrap();
        let opt = enumerate_all(&built.model).unwrap();
        let q = evaluate_dual_bound(&inst, &layout, &vec![0.0; layout.num_cells]);
        assert!((q - opt.objective).abs() < 1e-9, "seed {seed}: {q} vs {}", opt.objective);
    }
}

#[test]
fn solve_keeps_weak_duality_and_feasibility() {
    for seed in 0..3 {
        let mut cfg = GeneratorConfig::example1_family(100 + seed);
        cfg.jobs = 8;
        let inst = generate_instance(&cfg).unwrap();
        assert_eq!(inst.horizon, auto_horizon(&inst));
        let layout = VariableLayout::new(&inst).unwrap();
        let opts = SolveOptions {
            max_iterations: Some(60),
            time_limit: Some(Duration::from_secs(60)),
            bound_every: 10,
            repair_every: 20,
            ..SolveOptions::default()
        };
        let report = solve(&inst, &layout, opts).unwrap();
        assert_eq!(report.bound_violations, 0);
        assert_eq!(report.infeasible_emitted, 0);
        let schedule = report.schedule.as_ref().expect("greedy incumbent");
        assert!(check_feasible(&inst, schedule).is_ok());
        assert_eq!(evaluate_objective(&inst, schedule).unwrap(), report.cost);
        assert!(report.gap.best_bound <= report.cost + 1e-9);
        assert!(report.multipliers.iter().all(|&l| l >= 0.0));
        let last = report.log.last().unwrap();
        assert_eq!(last.best_feasible, report.cost);
    }
}

#[test]
fn levels_stay_above_the_dual_on_a_grid() {
    // two unit jobs on one machine, three time cells
    let inst = instance(vec![job(1, 1, 0.1, 0.5, &[(1, 1)]), job(2, 1, 0.1, 0.5, &[(1, 1)])], &[1], 3, 1);
    let layout = VariableLayout::new(&inst).unwrap();
    assert_eq!(layout.num_cells, 3);
    let steps: Vec<f64> = (0..=16).map(|k| k as f64 * 0.25).collect();
    let mut best_q = f64::NEG_INFINITY;
    for &a in &steps {
        for &b in &steps {
            for &c in &steps {
                best_q = best_q.max(evaluate_dual_bound(&inst, &layout, &[a, b, c]));
            }
        }
    }
    let opts = SolveOptions { max_iterations: Some(100), target_gap: 0.0, ..SolveOptions::default() };
    let report = solve(&inst, &layout, opts).unwrap();
    assert!(report.iterations > 0);
    for row in &report.log {
        assert!(row.level > best_q, "iteration {}: level {} <= grid dual {best_q}", row.k, row.level);
    }
    assert!(report.gap.best_bound <= report.cost + 1e-9);
}
