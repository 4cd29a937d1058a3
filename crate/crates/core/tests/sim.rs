use lrpc::field::Gf2m;
use lrpc::sim::*;

fn spec_json(algorithm: &str, planting: &str, trials: u64, grid: &str) -> String {
    format!(
        r#"{{"name": "t", "algorithm": "{algorithm}", "planting": {planting}, "trials": {trials},
            "base_seed": 77, "grid": [{grid}]}}"#
    )
}

fn strip_timing(mut r: ExperimentResult) -> ExperimentResult {
    for c in &mut r.cells {
        c.wall_ms = 0;
    }
    r
}

#[test]
fn results_do_not_depend_on_the_thread_count() {
    let spec = ExperimentSpec::from_json(&spec_json(
        "fprob",
        r#"{"forced-codim": 1}"#,
        300,
        r#"{"q": 2, "m": 31, "n": 16, "k": 8, "d": 3, "r": 3}, {"q": 4, "m": 23, "n": 16, "k": 8, "d": 3, "r": 3}"#,
    ))
    .unwrap();
    let one = strip_timing(run_experiment(&spec, 1).unwrap());
    let three = strip_timing(run_experiment(&spec, 3).unwrap());
    assert_eq!(one, three);
    assert_eq!(one.cells[0].trials, 300);
    assert_eq!(one.cells[0].codim_hist.get(&1), Some(&300));
}

#[test]
fn failing_trials_replay_alone() {
    let spec = ExperimentSpec::from_json(&spec_json(
        "fprob",
        r#"{"forced-codim": 1}"#,
        200,
        r#"{"q": 2, "m": 31, "n": 16, "k": 8, "d": 3, "r": 3}"#,
    ))
    .unwrap();
    let res = run_experiment(&spec, 1).unwrap();
    let cell = &res.cells[0];
    assert!(!cell.failing_seeds.is_empty());
    let f = Gf2m::new(31).unwrap();
    for &seed in &cell.failing_seeds {
        let o = run_trial(&f, spec.algorithm, spec.planting, spec.grid[0], true, seed, None).unwrap();
        assert!(!o.success());
        assert!(cell.failures.contains_key(o.stage));
    }
    let sorted = cell.failing_seeds.windows(2).all(|w| w[0] < w[1]);
    assert!(sorted && cell.failing_seeds.len() <= 10);
}

#[test]
fn a_single_trial_runs() {
    let spec = ExperimentSpec::from_json(&spec_json(
        "basic",
        r#""random-error""#,
        1,
        r#"{"q": 2, "m": 24, "n": 20, "k": 10, "d": 2, "r": 3}"#,
    ))
    .unwrap();
    let res = run_experiment(&spec, 1).unwrap();
    let c = &res.cells[0];
    assert_eq!(c.trials, 1);
    assert_eq!(c.successes + c.failures_total(), 1);
    assert!(c.skipped.is_none());
}

#[test]
fn specs_are_validated() {
    let zero = spec_json("basic", r#""random-error""#, 0, r#"{"q": 2, "m": 24, "n": 20, "k": 10, "d": 2, "r": 3}"#);
    assert!(ExperimentSpec::from_json(&zero).is_err());
    assert!(ExperimentSpec::from_json(&spec_json("basic", r#""random-error""#, 5, "")).is_err());
    assert!(ExperimentSpec::from_json(&spec_json("nope", r#""random-error""#, 5, "")).is_err());
    let spec: ExperimentSpec = ExperimentSpec::from_json(
        r#"{"algorithm": "fdecode", "planting": "random-error", "trials": 2, "base_seed": 1,
            "grid": [{"q": 2, "m": 20, "n": 30, "k": 15, "d": 2, "r": 10}],
            "metric": "success", "expected": 0.29, "tolerance": {"kind": "absolute", "delta": 0.03}}"#,
    )
    .unwrap();
    assert_eq!(spec.metric, Metric::Success);
    assert_eq!(spec.tolerance, Some(Tolerance::Absolute { delta: 0.03 }));
    // m = 20 < 3rd − 2
    let res = run_experiment(&spec, 1).unwrap();
    assert!(res.cells[0].skipped.as_deref().unwrap().contains("m ≥ 58"));
    assert!(res.all_passed());
}

#[test]
fn unreachable_planting_skips_the_cell() {
    let spec = ExperimentSpec::from_json(&spec_json(
        "fprob",
        r#"{"forced-codim": 3}"#,
        5,
        r#"{"q": 2, "m": 31, "n": 26, "k": 8, "d": 3, "r": 3}"#,
    ))
    .unwrap();
    // rd − 3 = 6 but the syndrome has 18 coordinates: the budget runs out
    let res = run_experiment(&spec, 1).unwrap();
    assert!(res.cells[0].skipped.is_some());
}

#[test]
fn kem_loop_cells_use_the_shipped_modulus() {
    let cell = Cell { q: 2, m: 71, n: 94, k: 47, d: 6, r: 5 };
    assert_eq!(kem_params_for_cell(&cell).unwrap().id, "kem-128");
    let small = Cell { q: 2, m: 41, n: 34, k: 17, d: 3, r: 3 };
    let ps = kem_params_for_cell(&small).unwrap();
    assert!(ps.ideal_modulus().unwrap().is_irreducible());
    let spec = ExperimentSpec {
        name: "kem".into(),
        algorithm: Algorithm::KemLoop,
        planting: Planting::RandomError,
        trials: 20,
        base_seed: 5,
        grid: vec![small],
        metric: Metric::Failure,
        expected: Some(0.0),
        tolerance: Some(Tolerance::Absolute { delta: 0.0 }),
        check_m: true,
    };
    let res = run_experiment(&spec, 1).unwrap();
    assert!(res.cells[0].skipped.is_none(), "{:?}", res.cells[0].skipped);
    assert_eq!(res.cells[0].trials, 20);
}

#[test]
fn tolerance_checks() {
    assert!(check_tolerance(0.1, 0.06, Tolerance::Ratio { factor: 2.0 }).passed);
    assert!(!check_tolerance(0.13, 0.06, Tolerance::Ratio { factor: 2.0 }).passed);
    assert!(!check_tolerance(0.02, 0.06, Tolerance::Ratio { factor: 2.0 }).passed);
    assert!(check_tolerance(0.25, 0.25, Tolerance::Upper { factor: 1.0 }).passed);
    assert!(!check_tolerance(0.26, 0.25, Tolerance::Upper { factor: 1.0 }).passed);
    assert!(check_tolerance(0.0, 0.0, Tolerance::Absolute { delta: 0.0 }).passed);
    assert!(!check_tolerance(1e-5, 0.0, Tolerance::Absolute { delta: 0.0 }).passed);
}

#[test]
fn wilson_interval_brackets_the_estimate() {
    let (lo, hi) = wilson_interval(0, 100);
    assert_eq!(lo, 0.0);
    assert!(hi > 0.03 && hi < 0.04);
    let (lo, hi) = wilson_interval(29, 100);
    assert!(lo < 0.29 && hi > 0.29);
    assert!((lo - 0.2107).abs() < 1e-3 && (hi - 0.3850).abs() < 1e-3);
    assert_eq!(wilson_interval(0, 0), (0.0, 1.0));
}

#[test]
fn outputs_are_written() {
    let spec = ExperimentSpec::from_json(&spec_json(
        "crypto",
        r#"{"forced-codim": 1}"#,
        20,
        r#"{"q": 2, "m": 41, "n": 24, "k": 12, "d": 4, "r": 3}"#,
    ))
    .unwrap();
    let res = run_experiment(&spec, 1).unwrap();
    let dir = std::env::temp_dir().join(format!("lrpc-sim-{}", std::process::id()));
    write_outputs(&res, &dir).unwrap();
    let jsonl = std::fs::read_to_string(dir.join("results.jsonl")).unwrap();
    let row: CellResult = serde_json::from_str(jsonl.lines().next().unwrap()).unwrap();
    assert_eq!(row, res.cells[0]);
    let csv = std::fs::read_to_string(dir.join("summary.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("t,crypto,forced-codim(1),2,41,24,12,4,3,20,"));
    std::fs::remove_dir_all(dir).unwrap();
}
