use pushguide::config::{bundled, param_key, RunConfig};
use pushguide::sweep::{FreeParam, Phase, SweepAxis};
use pushguide::{optimize, run_sweep, Objective, OptimizeSpec, Scenario, SweepSpec};

fn rb() -> Scenario {
    RunConfig::parse(bundled("rb_paper").unwrap()).unwrap().scenario
}

fn detuning_sweep(lo: f64, hi: f64, n: usize, objective: Objective) -> SweepSpec {
    let axis = SweepAxis::range(param_key("beam.detuning_GHz").unwrap(), lo, hi, n).unwrap();
    SweepSpec { axes: vec![axis], objective }
}

#[test]
fn optimizer_matches_sweep_argmax() {
    let (lo, hi, n) = (-2.5, -0.2, 200);
    let table = run_sweep(&detuning_sweep(lo, hi, n, Objective::RefinedScore), &rb()).unwrap();
    let grid_best = table.best().unwrap().coords[0];

    let free = FreeParam { param: param_key("beam.detuning_GHz").unwrap(), lo, hi };
    let mut spec = OptimizeSpec::new(vec![free], Objective::RefinedScore);
    spec.tolerance = 1e-13;
    let result = optimize(&spec, &rb()).unwrap();
    let cell = (hi - lo) / (n - 1) as f64;
    assert!(
        (result.best[0] - grid_best).abs() <= cell,
        "optimizer {} vs grid {grid_best} (cell {cell})",
        result.best[0]
    );
    assert!((-1.6..=-0.5).contains(&result.best[0]));

    let best_seed = result
        .trace
        .iter()
        .filter(|t| t.phase == Phase::Seed)
        .filter_map(|t| t.objective)
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(result.best_objective >= best_seed);
}

#[test]
fn two_dimensional_optimum_beats_seeds() {
    let free = vec![
        FreeParam { param: param_key("beam.detuning_GHz").unwrap(), lo: -3.0, hi: -0.4 },
        FreeParam { param: param_key("beam.focus_cm").unwrap(), lo: -30.0, hi: 0.0 },
    ];
    let spec = OptimizeSpec::new(free, Objective::TravelTime);
    let result = optimize(&spec, &rb()).unwrap();
    let best_seed = result
        .trace
        .iter()
        .filter(|t| t.phase == Phase::Seed)
        .filter_map(|t| t.objective)
        .fold(f64::INFINITY, f64::min);
    assert!(result.best_objective <= best_seed);
    assert_eq!(result.trace.iter().filter(|t| t.phase == Phase::Seed).count(), 64);
}

#[test]
fn single_point_sweep_equals_simulate() {
    let spec = detuning_sweep(-1.0, -1.0 + 1e-9, 2, Objective::RefinedScore);
    let table = run_sweep(&spec, &rb()).unwrap();
    let direct = rb().evaluate().unwrap();
    assert_eq!(table.rows[0].report.as_ref().unwrap(), &direct);
}

#[test]
fn sweep_independent_of_thread_count() {
    let spec = detuning_sweep(-3.0, -0.2, 40, Objective::TravelTime);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| run_sweep(&spec, &rb()).unwrap())
    };
    let a = run(1);
    let b = run(3);
    assert_eq!(a, b);
    let errors = a.rows.iter().filter(|r| r.error.is_some()).count();
    assert!(errors < a.rows.len());
}
