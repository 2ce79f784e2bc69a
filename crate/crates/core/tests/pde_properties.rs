use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qlbv::grid::{Field, Grid1D, TimeGrid};
use qlbv::pde::{solve_linear, solve_quasilinear, CoefficientBounds, LinearProblem, SolverConfig};
use qlbv::problem::{CoefficientSpec, DataSpec, ProblemSpec};

const BOUNDS: CoefficientBounds = CoefficientBounds { lo: 0.5, hi: 2.0 };

fn coefficient(n: usize, steps: usize, horizon: f64) -> Field {
    Field::from_fn(Grid1D::unit(n).unwrap(), TimeGrid::new(0.0, horizon, steps).unwrap(), |t, x| {
        1.0 + 0.4 * (PI * x).sin() * (1.0 + t).recip()
    })
    .unwrap()
}

fn random_data(rng: &mut ChaCha8Rng, nx: usize, nt: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut init: Vec<f64> = (0..nx).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut left: Vec<f64> = (0..nt).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut right: Vec<f64> = (0..nt).map(|_| rng.gen_range(-1.0..1.0)).collect();
    left[0] = init[0];
    right[0] = init[nx - 1];
    init[0] = left[0];
    init[nx - 1] = right[0];
    (init, left, right)
}

fn solve(abar: &Field, d: (Vec<f64>, Vec<f64>, Vec<f64>), theta: f64) -> Field {
    let p = LinearProblem::new(abar.clone(), d.0, d.1, d.2, BOUNDS).unwrap();
    solve_linear(&p, &SolverConfig::with_theta(theta)).unwrap()
}

fn heat_error(n: usize, steps: usize, theta: f64) -> f64 {
    let t = 0.1;
    let abar = Field::from_fn(Grid1D::unit(n).unwrap(), TimeGrid::new(0.0, t, steps).unwrap(), |_, _| 1.0).unwrap();
    let g = abar.grid().clone();
    let init: Vec<f64> = g.nodes().iter().map(|x| (PI * x).sin()).collect();
    let mut init = init;
    init[0] = 0.0;
    init[n] = 0.0;
    let u = solve(&abar, (init, vec![0.0; steps + 1], vec![0.0; steps + 1]), theta);
    let exact = Field::from_fn(g, abar.tgrid().clone(), |t, x| (-PI * PI * t).exp() * (PI * x).sin()).unwrap();
    u.max_abs_diff(&exact).unwrap()
}

#[test]
fn trapezoidal_scheme_is_second_order() {
    let e: Vec<f64> = [25, 50, 100].iter().map(|&n| heat_error(n, n / 5, 0.5)).collect();
    for w in e.windows(2) {
        assert!((w[0] / w[1]).log2() >= 1.9, "{e:?}");
    }
}

#[test]
fn implicit_scheme_is_first_order_in_time() {
    let e: Vec<f64> = [20, 40, 80].iter().map(|&n| heat_error(50, n, 1.0)).collect();
    for w in e.windows(2) {
        assert!((w[0] / w[1]).log2() >= 0.95, "{e:?}");
    }
}

#[test]
fn linearity_on_seeded_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let abar = coefficient(30, 40, 0.5);
    for _ in 0..20 {
        let (nx, nt) = (31, 41);
        let d1 = random_data(&mut rng, nx, nt);
        let d2 = random_data(&mut rng, nx, nt);
        let (a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let mix = |x: &[f64], y: &[f64]| -> Vec<f64> { x.iter().zip(y).map(|(p, q)| a * p + b * q).collect() };
        let d3 = (mix(&d1.0, &d2.0), mix(&d1.1, &d2.1), mix(&d1.2, &d2.2));
        for theta in [0.5, 1.0] {
            let u1 = solve(&abar, d1.clone(), theta);
            let u2 = solve(&abar, d2.clone(), theta);
            let u3 = solve(&abar, d3.clone(), theta);
            let combo = u1.combine(a, &u2, b).unwrap();
            assert!(combo.max_abs_diff(&u3).unwrap() <= 1e-12 * (1.0 + u3.max_abs()));
        }
    }
}

#[test]
fn implicit_scheme_obeys_the_maximum_principle() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let abar = coefficient(40, 200, 1.0);
    for _ in 0..20 {
        let d = random_data(&mut rng, 41, 201);
        let lo = d.0.iter().chain(&d.1).chain(&d.2).copied().fold(f64::INFINITY, f64::min);
        let hi = d.0.iter().chain(&d.1).chain(&d.2).copied().fold(f64::NEG_INFINITY, f64::max);
        let u = solve(&abar, d, 1.0);
        assert!(u.min() >= lo - 1e-12 && u.max() <= hi + 1e-12);
    }
}

#[test]
fn restarting_midway_reproduces_the_run() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let abar = coefficient(20, 40, 1.0);
    let d = random_data(&mut rng, 21, 41);
    for theta in [0.5, 0.75, 1.0] {
        let full = solve(&abar, d.clone(), theta);
        let first = abar.restrict(0, 20, 0, 20).unwrap();
        let second = abar.restrict(20, 40, 0, 20).unwrap();
        let a = solve(&first, (d.0.clone(), d.1[..=20].to_vec(), d.2[..=20].to_vec()), theta);
        let b = solve(&second, (a.row(20).to_vec(), d.1[20..].to_vec(), d.2[20..].to_vec()), theta);
        assert_eq!(b.row(20).to_vec(), full.row(40).to_vec());
    }
}

#[test]
fn quasilinear_solution_is_a_fixed_point_of_its_frozen_problem() {
    let spec = ProblemSpec::new(
        CoefficientSpec::parse("1 + 0.5*tanh(y)", 0.5, 1.5, 2.0).unwrap(),
        DataSpec::parse("sin(pi*x)", "0.2*t*exp(-t)", "0").unwrap(),
        1.0,
    )
    .unwrap();
    let cfg = SolverConfig::with_theta(1.0);
    let sol = solve_quasilinear(&spec, Grid1D::unit(40).unwrap(), TimeGrid::new(0.0, 1.0, 100).unwrap(), &cfg).unwrap();
    let init: Vec<f64> = sol.w.row(0).to_vec();
    let left: Vec<f64> = sol.w.column(0).to_vec();
    let right: Vec<f64> = sol.w.column(40).to_vec();
    let bounds = CoefficientBounds::of(&spec);
    let again = solve_linear(&LinearProblem::new(sol.abar.clone(), init, left, right, bounds).unwrap(), &cfg).unwrap();
    assert!(again.max_abs_diff(&sol.w).unwrap() <= 10.0 * cfg.picard_tol);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn equilibria_are_preserved(slope in -3.0f64..3.0, offset in -1.0f64..1.0, theta in 0.5f64..=1.0) {
        let abar = coefficient(16, 10, 1.0);
        let init: Vec<f64> = abar.grid().nodes().iter().map(|x| offset + slope * x).collect();
        let u = solve(&abar, (init.clone(), vec![offset; 11], vec![offset + slope; 11]), theta);
        for m in 0..=10 {
            for (j, v) in init.iter().enumerate() {
                prop_assert!((u.at(m, j) - v).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn scaling_the_data_scales_the_solution(k in -5.0f64..5.0, seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let abar = coefficient(12, 12, 0.5);
        let d = random_data(&mut rng, 13, 13);
        let scaled = (
            d.0.iter().map(|v| k * v).collect(),
            d.1.iter().map(|v| k * v).collect(),
            d.2.iter().map(|v| k * v).collect(),
        );
        let u = solve(&abar, d, 0.5);
        let v = solve(&abar, scaled, 0.5);
        prop_assert!(u.map(|x| k * x).max_abs_diff(&v).unwrap() <= 1e-12 * (1.0 + v.max_abs()));
    }
}
