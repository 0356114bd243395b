use crate::args::{
    BackendKind, BenchArgs, EvaluateArgs, Family, GenerateArgs, SolveArgs, SolverArgs, Suite, ValidateArgs,
};
use crate::error::{CliError, ErrorKind};
use jobshop_core::feasibility::{check_feasible, compute_gap};
use jobshop_core::instance::{
    example1, example2_base, generate_instance, load_instance, save_instance, GeneratorConfig, Instance,
};
use jobshop_core::milp::SolverBackend;
use jobshop_core::model::{evaluate_objective, VariableLayout};
use jobshop_core::simulate::{exact_expected_tardiness, monte_carlo_tardiness, EvaluationRow, SimMode};
use jobshop_core::slblr::{solve, HyperParams, SolveOptions, SolveReport, StopReason};
use jobshop_core::solution::{gantt_rows, SolutionFile};
use serde::Serialize;
use std::fs;
use std::path::Path;
use std::time::Duration;

impl SolverArgs {
    pub fn to_options(&self) -> Result<SolveOptions, CliError> {
        let params = HyperParams {
            gamma: self.gamma,
            zeta: self.zeta,
            beta: self.beta,
            rho0: self.rho0,
            rho_max: self.rho_max,
            eps_violation: self.eps_violation,
            ..HyperParams::default()
        };
        params.validate().map_err(CliError::config)?;
        if !(self.target_gap > 0.0 && self.target_gap <= 1.0) {
            return Err(CliError::config(format!("target gap must lie in (0, 1], got {}", self.target_gap)));
        }
        if !(self.time_limit > 0.0 && self.time_limit.is_finite()) {
            return Err(CliError::config(format!("time limit must be positive, got {}", self.time_limit)));
        }
        if self.delta_max.is_some_and(|m| m < self.delta) {
            return Err(CliError::config("delta-max must be at least delta"));
        }
        let backend = match (self.backend, &self.solver_cmd) {
            (BackendKind::Builtin, _) => SolverBackend::Builtin,
            (BackendKind::External, Some(cmd)) if cmd.contains("{model}") && cmd.contains("{solution}") => {
                SolverBackend::External { command: cmd.clone() }
            }
            (BackendKind::External, Some(_)) => {
                return Err(CliError::config("solver-cmd needs both {model} and {solution} placeholders"))
            }
            (BackendKind::External, None) => return Err(CliError::config("backend external needs --solver-cmd")),
        };
        Ok(SolveOptions {
            params,
            target_gap: self.target_gap,
            time_limit: Some(Duration::from_secs_f64(self.time_limit)),
            max_iterations: self.max_iterations,
            bound_every: self.bound_every.max(1),
            repair_every: self.repair_every,
            delta: self.delta,
            delta_max: self.delta_max,
            backend,
            ..SolveOptions::default()
        })
    }
}

/// Loads an instance file; the name `example1` refers to the bundled base case
/// when no such file exists.
fn read_instance(path: &Path) -> Result<Instance, CliError> {
    if !path.exists() && path.as_os_str() == "example1" {
        return Ok(example1());
    }
    let inst = load_instance(path).map_err(|e| CliError::config(e.to_string()))?;
    let problems = inst.validate();
    if !problems.is_empty() {
        return Err(CliError::config(format!("invalid instance {}", path.display())).with_details(problems));
    }
    Ok(inst)
}

fn read_solution(inst: &Instance, path: &Path) -> Result<(SolutionFile, jobshop_core::Schedule), CliError> {
    let file = SolutionFile::load(path).map_err(|e| CliError::new(ErrorKind::Infeasible, e.to_string()))?;
    let schedule = file.to_schedule(inst).map_err(|e| CliError::new(ErrorKind::Infeasible, e.to_string()))?;
    Ok((file, schedule))
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let err = |e: csv::Error| CliError::io(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    for row in rows {
        w.serialize(row).map_err(err)?;
    }
    w.flush().map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string(value).expect("summary serializes"));
}

fn run_solver(inst: &Instance, opts: SolveOptions) -> Result<SolveReport, CliError> {
    let layout = VariableLayout::new(inst).map_err(|e| CliError::config(e.to_string()))?;
    solve(inst, &layout, opts).map_err(CliError::config)
}

/// Writes the convergence log, then the solution and Gantt table when a
/// certified-feasible schedule exists.
fn write_artifacts(inst: &Instance, report: &SolveReport, seed: Option<u64>, out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|e| CliError::io(format!("cannot create {}: {e}", out.display())))?;
    write_csv(&out.join("convergence.csv"), &report.log)?;
    let Some(schedule) = &report.schedule else {
        let kind = if report.stop == StopReason::TimeLimit { ErrorKind::Timeout } else { ErrorKind::Infeasible };
        return Err(CliError::new(kind, "no feasible schedule found"));
    };
    if let Err(v) = check_feasible(inst, schedule) {
        return Err(CliError::new(ErrorKind::Infeasible, "final schedule fails the feasibility check")
            .with_details(v.iter().map(ToString::to_string).collect()));
    }
    let mut file = SolutionFile::from_schedule(inst, schedule, report.cost);
    file.bound = Some(report.gap.best_bound);
    file.gap = Some(report.gap.gap);
    file.hyperparameters = Some(report.params.clone());
    file.seed = seed;
    file.save(&out.join("solution.json")).map_err(|e| CliError::io(e.to_string()))?;
    write_csv(&out.join("gantt.csv"), &gantt_rows(inst, schedule))
}

#[derive(Serialize)]
struct SolveSummary {
    objective: f64,
    bound: f64,
    gap: f64,
    iterations: usize,
    stop: StopReason,
    wall_s: f64,
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<(), CliError> {
    let cfg = match args.family {
        Family::Example1 => {
            GeneratorConfig { jobs: args.jobs.unwrap_or(20), ..GeneratorConfig::example1_family(args.seed) }
        }
        Family::Example2 => GeneratorConfig::example2_family(args.jobs.unwrap_or(20), args.seed),
    };
    let inst = generate_instance(&cfg).map_err(CliError::config)?;
    save_instance(&inst, &args.out).map_err(|e| CliError::io(e.to_string()))?;
    print_json(&serde_json::json!({ "instance": args.out, "jobs": inst.num_jobs(), "horizon": inst.horizon }));
    Ok(())
}

pub fn cmd_solve(args: &SolveArgs) -> Result<(), CliError> {
    let inst = read_instance(&args.instance)?;
    let opts = args.solver.to_options()?;
    let report = run_solver(&inst, opts)?;
    write_artifacts(&inst, &report, args.seed, &args.out)?;
    print_json(&SolveSummary {
        objective: report.cost,
        bound: report.gap.best_bound,
        gap: report.gap.gap,
        iterations: report.iterations,
        stop: report.stop,
        wall_s: report.wall_time,
    });
    Ok(())
}

pub fn cmd_validate(args: &ValidateArgs) -> Result<(), CliError> {
    let inst = read_instance(&args.instance)?;
    let (file, schedule) = read_solution(&inst, &args.solution)?;
    if let Err(v) = check_feasible(&inst, &schedule) {
        return Err(CliError::new(ErrorKind::Infeasible, format!("{} violation(s)", v.len()))
            .with_details(v.iter().map(ToString::to_string).collect()));
    }
    let objective =
        evaluate_objective(&inst, &schedule).map_err(|e| CliError::new(ErrorKind::Infeasible, e.to_string()))?;
    if (objective - file.objective).abs() > 1e-6 * objective.abs().max(1.0) {
        return Err(CliError::new(
            ErrorKind::Infeasible,
            format!("stated objective {} differs from the recomputed {objective}", file.objective),
        ));
    }
    print_json(&serde_json::json!({ "feasible": true, "objective": objective }));
    Ok(())
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<(), CliError> {
    let inst = read_instance(&args.instance)?;
    let (_, schedule) = read_solution(&inst, &args.solution)?;
    if args.samples < 2 {
        return Err(CliError::config("samples must be at least 2"));
    }
    let bad = |e: jobshop_core::schedule::ScheduleError| CliError::new(ErrorKind::Infeasible, e.to_string());
    let exact = exact_expected_tardiness(&inst, &schedule).map_err(bad)?;
    let mut rows = Vec::new();
    for mode in [SimMode::SingleFailure, SimMode::FullMarkov] {
        let est = monte_carlo_tardiness(&inst, &schedule, args.samples, args.seed, mode).map_err(bad)?;
        rows.push(EvaluationRow::new(mode, &est, exact));
    }
    fs::create_dir_all(&args.out).map_err(|e| CliError::io(format!("cannot create {}: {e}", args.out.display())))?;
    write_csv(&args.out.join("evaluation.csv"), &rows)?;
    print_json(&rows);
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct BenchRow {
    pub case: String,
    pub feasible_cost: f64,
    pub lower_bound: f64,
    pub gap: f64,
    pub wall_s: f64,
}

fn bench_cases(args: &BenchArgs) -> Result<Vec<(String, Instance)>, CliError> {
    let mut cases = Vec::new();
    match args.suite {
        Suite::Example1 => cases.push(("base".to_string(), example1())),
        Suite::Example1Robustness => {
            for k in 0..args.seeds {
                let seed = args.seed + k;
                let inst = generate_instance(&GeneratorConfig::example1_family(seed)).map_err(CliError::config)?;
                cases.push((format!("seed-{seed}"), inst));
            }
        }
        Suite::Example2 => {
            for &jobs in &args.jobs {
                let inst = if jobs == 20 {
                    example2_base(args.seed)
                } else {
                    generate_instance(&GeneratorConfig::example2_family(jobs, args.seed)).map_err(CliError::config)?
                };
                cases.push((format!("jobs-{jobs}"), inst));
            }
        }
    }
    Ok(cases)
}

pub fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    let opts = args.solver.to_options()?;
    let cases = bench_cases(args)?;
    fs::create_dir_all(&args.out).map_err(|e| CliError::io(format!("cannot create {}: {e}", args.out.display())))?;
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for (name, inst) in &cases {
        log::info!("bench case {name}");
        let report = run_solver(inst, opts.clone())?;
        let feasible = if report.schedule.is_some() { report.cost } else { f64::INFINITY };
        rows.push(BenchRow {
            case: name.clone(),
            feasible_cost: feasible,
            lower_bound: report.gap.best_bound,
            gap: compute_gap(feasible, report.gap.best_bound).gap,
            wall_s: report.wall_time,
        });
        if let Err(e) = write_artifacts(inst, &report, Some(args.seed), &args.out.join(name)) {
            failed.push(format!("{name}: {}", e.message));
        }
    }
    write_csv(&args.out.join("bench.csv"), &rows)?;
    print_json(&rows);
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::new(ErrorKind::Timeout, "some cases ended without a feasible schedule").with_details(failed))
    }
}
