//! Estimate functionals on the heat solution `exp(-pi^2 t) sin(pi x)`, where
//! every left-hand side has a closed form.

use std::f64::consts::PI;

use qlbv::decompose::{split_three, Side};
use qlbv::estimates::{
    check_lemma34, delta2, delta2_formula, interior_sups, lhs_theorem1, lhs_theorem2, verify_theorems,
};
use qlbv::expr::Expr;
use qlbv::grid::{Field, Grid1D, TimeGrid};
use qlbv::pde::{solve_quasilinear, CoefficientBounds, SolverConfig};
use qlbv::problem::{CoefficientSpec, DataSpec, EstimateWindow, ProblemSpec};
use qlbv::report::Status;

const C1: f64 = 0.05;
const EPS: f64 = 0.1;
const T: f64 = 0.5;

fn heat() -> (ProblemSpec, Field, Field) {
    let spec = ProblemSpec::new(
        CoefficientSpec::parse("1 + 0*x + 0*y", 1.0, 1.0, 1.0).unwrap(),
        DataSpec::parse("sin(pi*x)", "0", "0").unwrap(),
        T,
    )
    .unwrap();
    let sol = solve_quasilinear(&spec, Grid1D::unit(200).unwrap(), TimeGrid::new(0.0, T, 1000).unwrap(), &SolverConfig::default())
        .unwrap();
    (spec, sol.w, sol.abar)
}

fn window() -> EstimateWindow {
    EstimateWindow::new(C1, EPS, T).unwrap()
}

fn close(value: f64, want: f64, rel: f64) -> bool {
    (value - want).abs() <= rel * want.abs()
}

#[test]
fn left_hand_sides_match_closed_forms() {
    let (_, w, _) = heat();
    let decay = (-PI * PI * C1).exp() - (-PI * PI * T).exp();
    let t1 = lhs_theorem1(&w, 0.5, &window()).unwrap();
    assert!(close(t1, decay, 0.01), "{t1} vs {decay}");
    let t2 = lhs_theorem2(&w, &window()).unwrap();
    let want = 2.0 * (1.0 - (PI * EPS).sin()) * decay;
    assert!(close(t2, want, 0.03), "{t2} vs {want}");
}

#[test]
fn interior_sups_match_closed_forms() {
    let (_, w, abar) = heat();
    let s = interior_sups(&w, &abar, &window()).unwrap();
    let e = (-PI * PI * C1).exp();
    assert!(close(s.w_x, PI * e * (PI * EPS).cos(), 0.02), "{s:?}");
    assert!(close(s.w_t, PI * PI * e, 0.02), "{s:?}");
    assert!(close(s.w_tx, PI.powi(3) * e * (PI * EPS).cos(), 0.02), "{s:?}");
    assert_eq!((s.a_t, s.a_tx), (0.0, 0.0));
    let d = delta2(&abar, 1.0, &window()).unwrap();
    assert!(d.unrestricted());
}

#[test]
fn delta2_scaling_laws() {
    assert!((delta2_formula(1.0, 0.25) - 1.189_207_115).abs() < 1e-9);
    for s in [1e-3, 0.1, 2.0, 50.0] {
        let d = delta2_formula(1.3, s);
        assert!((delta2_formula(1.3, 2.0 * s) * 2f64.sqrt() / d - 1.0).abs() < 1e-12);
        assert!((delta2_formula(2.6, s) / (2.0 * d) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn lemma34_on_hand_examples() {
    let cfg = SolverConfig::with_theta(1.0);
    let bounds = CoefficientBounds { lo: 1.0, hi: 1.0 };
    for (g, horizon, tv) in [("t", 1.0, 1.0), ("sin(t)", 2.0 * PI, 4.0)] {
        let abar = Field::from_fn(Grid1D::unit(40).unwrap(), TimeGrid::new(0.0, horizon, 2000).unwrap(), |_, _| 1.0).unwrap();
        let g = Expr::parse(g, &["t"]).unwrap();
        let u = qlbv::decompose::solve_boundary_driven(&abar, Side::Left, &g, bounds, &cfg).unwrap();
        let r = check_lemma34(&u, &g, abar.tgrid().t_hi()).unwrap();
        assert!((r.rhs - tv).abs() < 1e-6, "{r:?}");
        assert!(r.passed(), "{r:?}");
    }
}

#[test]
fn theorem_fits_on_the_heat_instance() {
    let (spec, w, abar) = heat();
    let cfg = SolverConfig::default();
    let split = split_three(&abar, &spec.data, CoefficientBounds::of(&spec), &cfg).unwrap();
    let out = verify_theorems(&w, &split, &spec, &window(), &[0.25, 0.5], 0.2, 0.2).unwrap();
    assert!(out.reports.iter().all(|r| r.status == Status::Pass), "{:#?}", out.reports);
    // C1(T) grows by exactly the decay of the first mode between the horizons
    let (a, b) = (&out.fits[0], &out.fits[1]);
    let gain = b.c1 * b.phi_norm - a.c1 * a.phi_norm;
    let want = (-PI * PI * 0.25).exp() - (-PI * PI * 0.5).exp();
    assert!(close(gain, want, 0.03), "{gain} vs {want}");
    let widths: Vec<f64> = out.partition.windows(2).map(|p| (p[1] - p[0]) as f64 / 200.0).collect();
    assert!(widths.iter().all(|w| *w <= 0.2 + 1e-12));
}
