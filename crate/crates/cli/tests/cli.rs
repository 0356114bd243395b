use jobshop_core::feasibility::compute_gap;
use jobshop_core::instance::{save_instance, Instance, Job, MachineGroup, OperationSpec, DEFAULT_CEILING_EPSILON};
use jobshop_core::solution::SolutionFile;
use std::path::Path;
use std::process::{Command, Output};

fn jobshop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jobshop")).args(args).env_remove("RUST_LOG").output().unwrap()
}

fn error_record(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("stderr carries an error record");
    serde_json::from_str(line).unwrap()
}

/// Two single-operation jobs competing for one machine.
fn two_jobs_one_machine(dir: &Path) -> String {
    let job = |id| Job {
        id,
        weight: 1.0,
        due_date: 2,
        scrap_prob: 0.0,
        rework_prob: 0.0,
        operations: vec![OperationSpec::single(1, 2)],
    };
    let inst = Instance {
        jobs: vec![job(1), job(2)],
        machine_groups: vec![MachineGroup { id: 1, capacity: 1 }],
        horizon: 8,
        shift_length: 4,
        ceiling_epsilon: DEFAULT_CEILING_EPSILON,
    };
    let path = dir.join("tiny.json");
    save_instance(&inst, &path).unwrap();
    path.to_str().unwrap().to_string()
}

fn solve_into(inst: &str, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["solve", inst, "--out", out.to_str().unwrap(), "--time-limit", "30", "--max-iterations", "30"];
    args.extend_from_slice(extra);
    jobshop(&args)
}

#[test]
fn solve_writes_consistent_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let gen = jobshop(&["generate", "--jobs", "6", "--seed", "3", "--out", inst.to_str().unwrap()]);
    assert!(gen.status.success(), "{}", String::from_utf8_lossy(&gen.stderr));
    let out = dir.path().join("run");
    let run = solve_into(inst.to_str().unwrap(), &out, &["--seed", "3"]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));

    let sol = SolutionFile::load(&out.join("solution.json")).unwrap();
    assert_eq!(sol.seed, Some(3));
    let mut log = csv::Reader::from_path(out.join("convergence.csv")).unwrap();
    let headers = log.headers().unwrap().clone();
    assert_eq!(
        headers.iter().collect::<Vec<_>>(),
        ["k", "L", "g_norm", "step", "level", "rho", "best_bound", "best_feasible", "wall_ms"]
    );
    let last = log.records().last().unwrap().unwrap();
    let best: f64 = last[7].parse().unwrap();
    assert_eq!(best, sol.objective);
    assert!(sol.bound.unwrap() <= sol.objective);

    let gantt = csv::Reader::from_path(out.join("gantt.csv")).unwrap().into_records().count();
    assert!(gantt >= sol.attempt1.len());

    let ok = jobshop(&["validate", inst.to_str().unwrap(), out.join("solution.json").to_str().unwrap()]);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
}

#[test]
fn tampered_solution_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let inst = two_jobs_one_machine(dir.path());
    let out = dir.path().join("run");
    assert!(solve_into(&inst, &out, &[]).status.success());

    let path = out.join("solution.json");
    let mut sol = SolutionFile::load(&path).unwrap();
    let (a, b) = (sol.attempt1[0].start, sol.attempt1[1].start);
    assert_ne!(a, b);
    sol.attempt1[1].start = a;
    sol.attempt1[1].end = sol.attempt1[0].end;
    let tampered = dir.path().join("tampered.json");
    sol.save(&tampered).unwrap();

    let res = jobshop(&["validate", &inst, tampered.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(3));
    let rec = error_record(&res);
    assert_eq!(rec["error"], "infeasible");
    let details = rec["details"].as_array().unwrap();
    assert!(details.iter().any(|d| d.as_str().unwrap().starts_with("capacity: group 1")), "{details:?}");
}

#[test]
fn evaluate_reports_both_modes() {
    let dir = tempfile::tempdir().unwrap();
    let inst = two_jobs_one_machine(dir.path());
    let out = dir.path().join("run");
    assert!(solve_into(&inst, &out, &[]).status.success());
    let sol = SolutionFile::load(&out.join("solution.json")).unwrap();
    let res = jobshop(&[
        "evaluate",
        &inst,
        out.join("solution.json").to_str().unwrap(),
        "--samples",
        "1000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let mut rd = csv::Reader::from_path(out.join("evaluation.csv")).unwrap();
    assert_eq!(
        rd.headers().unwrap().iter().collect::<Vec<_>>(),
        ["mode", "N", "mean", "std_error", "exact_value", "z_score"]
    );
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(&rows[0][0], "SINGLE_FAILURE");
    assert_eq!(&rows[1][0], "FULL_MARKOV");
    for row in &rows {
        // no scrap: every sample equals the exact value
        let exact: f64 = row[4].parse().unwrap();
        assert!((exact - sol.objective).abs() < 1e-9);
        assert_eq!(row[2].parse::<f64>().unwrap(), exact);
    }
}

#[test]
fn robustness_bench_gaps_recompute_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench");
    let res = jobshop(&[
        "bench",
        "--suite",
        "example1-robustness",
        "--seeds",
        "5",
        "--time-limit",
        "20",
        "--max-iterations",
        "6",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let mut rd = csv::Reader::from_path(out.join("bench.csv")).unwrap();
    assert_eq!(
        rd.headers().unwrap().iter().collect::<Vec<_>>(),
        ["case", "feasible_cost", "lower_bound", "gap", "wall_s"]
    );
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 5);
    for row in &rows {
        let feasible: f64 = row[1].parse().unwrap();
        let bound: f64 = row[2].parse().unwrap();
        let gap: f64 = row[3].parse().unwrap();
        assert_eq!(compute_gap(feasible, bound).gap, gap);
        assert!(bound <= feasible);
        assert!(out.join(&row[0]).join("solution.json").exists());
    }
}

#[test]
fn invalid_settings_exit_with_code_two() {
    let res = jobshop(&["solve", "example1", "--gamma", "1.5"]);
    assert_eq!(res.status.code(), Some(2));
    let rec = error_record(&res);
    assert_eq!(rec["error"], "invalid_config");
    assert!(rec["message"].as_str().unwrap().contains("gamma"));

    let env = Command::new(env!("CARGO_BIN_EXE_jobshop"))
        .args(["solve", "example1"])
        .env("SJS_TARGET_GAP", "0")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(2));
    assert!(error_record(&env)["message"].as_str().unwrap().contains("target gap"));

    let ext = jobshop(&["solve", "example1", "--backend", "external"]);
    assert_eq!(ext.status.code(), Some(2));

    let unknown = jobshop(&["solve", "example1", "--no-such-flag"]);
    assert_eq!(unknown.status.code(), Some(2));
    assert_eq!(error_record(&unknown)["exit_code"], 2);
}

#[test]
fn missing_instance_is_a_config_error() {
    let res = jobshop(&["validate", "/nonexistent/inst.json", "/nonexistent/sol.json"]);
    assert_eq!(res.status.code(), Some(2));
}
