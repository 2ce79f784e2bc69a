use std::path::PathBuf;

use qlbv::harness::output::REPORT_COLUMNS;
use qlbv::harness::{convergence_study, load_scenario, reports_csv, run, write_outputs, Check, Scenario, ScenarioError};
use qlbv::report::Status;

fn scenario(name: &str) -> Scenario {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name);
    load_scenario(&path).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn bundled_scenarios_load() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let sc = load_scenario(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert!(sc.bounds.passed() && sc.compatibility.passed());
            n += 1;
        }
    }
    assert!(n >= 5);
}

#[test]
fn heat_exact_reproduces_the_analytic_numbers() {
    let r = run(&scenario("heat-exact.toml"));
    assert!(r.passed(), "{:#?}", r.failures().collect::<Vec<_>>());
    assert!(r.find("exact_error").unwrap().lhs <= 1e-3);
    let order = r.find("convergence.solution").unwrap();
    assert!(order.rhs >= 1.9, "{order:?}");
    for name in ["convergence.theorem1", "convergence.theorem2"] {
        assert!(r.find(name).unwrap().rhs >= 0.9);
    }
}

#[test]
fn zero_data_gives_trivial_passes() {
    let sc = scenario("zero-data.toml");
    let r = run(&sc);
    assert!(r.passed(), "{:#?}", r.failures().collect::<Vec<_>>());
    for rep in &r.reports {
        if rep.status == Status::Pass && rep.name != "delta2" && !rep.name.starts_with("convergence") {
            assert!(rep.lhs == 0.0, "{rep:?}");
        }
    }
    let study = convergence_study(&sc, 3).unwrap();
    assert!(study.reports.iter().all(|r| r.status == Status::Indeterminate));
}

#[test]
fn reports_are_deterministic_and_checks_isolated() {
    let sc = scenario("full-instance.toml");
    let a = reports_csv(&[run(&sc)]);
    assert_eq!(a, reports_csv(&[run(&sc)]));
    assert!(a.starts_with(&REPORT_COLUMNS.join(",")));

    // dropping checks leaves the others' rows unchanged
    let mut fewer = sc.clone();
    fewer.checks.retain(|c| !matches!(c, Check::Convergence | Check::Barriers | Check::Decay));
    let b = reports_csv(&[run(&fewer)]);
    for line in b.lines() {
        assert!(a.lines().any(|l| l == line), "{line}");
    }
}

#[test]
fn outputs_land_in_the_directory() {
    let dir = tempfile::tempdir().unwrap();
    let sc = scenario("full-instance.toml");
    let mut quick = sc.clone();
    quick.checks = vec![Check::MonotoneSplit, Check::Theorems];
    write_outputs(dir.path(), &[run(&quick)], true).unwrap();
    for f in ["reports.csv", "fields/full-instance_W.csv", "fields/full-instance_abar.csv"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    let plots: Vec<_> = std::fs::read_dir(dir.path().join("plotdata")).unwrap().collect();
    assert!(plots.len() >= 3);
    let w = qlbv::grid::Field::read_csv(std::io::BufReader::new(
        std::fs::File::open(dir.path().join("fields/full-instance_W.csv")).unwrap(),
    ))
    .unwrap();
    assert_eq!(w.grid().n_cells(), 100);
}

#[test]
fn load_errors_name_the_problem() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    let text = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/zero-data.toml")).unwrap();
    std::fs::write(&path, text.replace("g0 = \"0\"", "g0 = \"t + 1\"")).unwrap();
    assert!(matches!(load_scenario(&path), Err(ScenarioError::Compatibility(_))));
    std::fs::write(&path, text.replace("n_cells = 50", "n_cells = \"fifty\"")).unwrap();
    match load_scenario(&path) {
        Err(ScenarioError::Syntax { line, .. }) => assert_eq!(line, 16),
        other => panic!("{other:?}"),
    }
    assert!(matches!(load_scenario(dir.path().join("missing.toml")), Err(ScenarioError::Io { .. })));
}
