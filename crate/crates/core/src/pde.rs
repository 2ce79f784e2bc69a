//! θ-scheme solvers for the frozen-coefficient equation `u_t = ā(t,x) u_xx`
//! and the quasilinear equation `W_t = a(x, W) W_xx` with Dirichlet data.
//!
//! Time level `m -> m+1` solves
//!
//! ```text
//! (u^{m+1} - u^m) / dt = ā_θ [ θ δ² u^{m+1} + (1-θ) δ² u^m ],   ā_θ = θ ā^{m+1} + (1-θ) ā^m
//! ```
//!
//! at interior nodes, one tridiagonal system per step, boundary rows pinned
//! to the Dirichlet data.

use ndarray::Array2;
use thiserror::Error;

use crate::expr::ExprError;
use crate::grid::{Field, GridError};
use crate::problem::ProblemSpec;

#[derive(Debug, Error)]
pub enum PdeError {
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("invalid linear problem: {0}")]
    Problem(String),
    #[error("coefficient {value} at (t={t}, x={x}) outside [{lo}, {hi}]")]
    CoefficientOutOfBounds {
        t: f64,
        x: f64,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("non-finite value produced at time node {m}, space node {j}")]
    NonFinite { m: usize, j: usize },
    #[error("Picard iteration did not converge at time node {m} after {iterations} iterations (last update {last_update:e})")]
    PicardDiverged {
        m: usize,
        iterations: usize,
        last_update: f64,
    },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// 1/2 is the trapezoidal (Crank-Nicolson) rule, 1 is backward Euler.
    pub theta: f64,
    pub picard_tol: f64,
    pub picard_max: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            theta: 0.5,
            picard_tol: 1e-10,
            picard_max: 50,
        }
    }
}

impl SolverConfig {
    pub fn with_theta(theta: f64) -> Self {
        SolverConfig {
            theta,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), PdeError> {
        if !(0.5..=1.0).contains(&self.theta) {
            return Err(PdeError::Config(format!("theta must lie in [1/2, 1], got {}", self.theta)));
        }
        if !(self.picard_tol > 0.0) {
            return Err(PdeError::Config(format!("picard_tol must be positive, got {}", self.picard_tol)));
        }
        if self.picard_max < 1 {
            return Err(PdeError::Config("picard_max must be at least 1".into()));
        }
        Ok(())
    }
}

/// Admissible coefficient interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientBounds {
    pub lo: f64,
    pub hi: f64,
}

impl CoefficientBounds {
    pub fn of(spec: &ProblemSpec) -> Self {
        CoefficientBounds {
            lo: spec.coefficient.a_lo,
            hi: spec.coefficient.a_hi,
        }
    }
}

/// `u_t = ā u_xx` on the grids of `abar` with the given initial row and
/// lateral columns.
#[derive(Debug, Clone)]
pub struct LinearProblem {
    abar: Field,
    initial: Vec<f64>,
    left: Vec<f64>,
    right: Vec<f64>,
}

impl LinearProblem {
    pub fn new(
        abar: Field,
        initial: Vec<f64>,
        left: Vec<f64>,
        right: Vec<f64>,
        bounds: CoefficientBounds,
    ) -> Result<Self, PdeError> {
        let (nt, nx) = (abar.tgrid().n_nodes(), abar.grid().n_nodes());
        if initial.len() != nx || left.len() != nt || right.len() != nt {
            return Err(PdeError::Problem(format!(
                "data lengths initial={}, left={}, right={} do not match grid ({nx} x {nt})",
                initial.len(),
                left.len(),
                right.len()
            )));
        }
        for ((m, j), &v) in abar.values().indexed_iter() {
            if !(v >= bounds.lo && v <= bounds.hi) {
                return Err(PdeError::CoefficientOutOfBounds {
                    t: abar.tgrid().t(m),
                    x: abar.grid().x(j),
                    value: v,
                    lo: bounds.lo,
                    hi: bounds.hi,
                });
            }
        }
        if let Some(j) = initial.iter().position(|v| !v.is_finite()) {
            return Err(PdeError::NonFinite { m: 0, j });
        }
        for (col, j) in [(&left, 0), (&right, nx - 1)] {
            if let Some(m) = col.iter().position(|v| !v.is_finite()) {
                return Err(PdeError::NonFinite { m, j });
            }
        }
        let scale = initial
            .iter()
            .chain(left.iter())
            .chain(right.iter())
            .fold(1.0_f64, |a, v| a.max(v.abs()));
        let tol = 1e-10 * scale;
        if (initial[0] - left[0]).abs() > tol || (initial[nx - 1] - right[0]).abs() > tol {
            return Err(PdeError::Problem(format!(
                "corner data incompatible: initial ends ({}, {}) vs lateral ({}, {})",
                initial[0],
                initial[nx - 1],
                left[0],
                right[0]
            )));
        }
        Ok(LinearProblem {
            abar,
            initial,
            left,
            right,
        })
    }

    pub fn abar(&self) -> &Field {
        &self.abar
    }
}

/// Workspace for one tridiagonal step on `n + 1` nodes.
struct StepSolver {
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
    rhs: Vec<f64>,
    cp: Vec<f64>,
    dp: Vec<f64>,
}

impl StepSolver {
    fn new(n_nodes: usize) -> Self {
        let z = vec![0.0; n_nodes];
        StepSolver {
            sub: z.clone(),
            diag: z.clone(),
            sup: z.clone(),
            rhs: z.clone(),
            cp: z.clone(),
            dp: z,
        }
    }

    /// Advances `prev` one step; `a_prev`/`a_next` are the coefficient rows at
    /// the two levels, `lb`/`rb` the boundary values at the new level.
    #[allow(clippy::too_many_arguments)]
    fn step(
        &mut self,
        prev: &[f64],
        a_prev: &[f64],
        a_next: &[f64],
        lb: f64,
        rb: f64,
        theta: f64,
        r: f64,
        out: &mut [f64],
    ) {
        let n = prev.len() - 1;
        self.diag[0] = 1.0;
        self.sup[0] = 0.0;
        self.rhs[0] = lb;
        self.sub[n] = 0.0;
        self.diag[n] = 1.0;
        self.rhs[n] = rb;
        for j in 1..n {
            let a = theta * a_next[j] + (1.0 - theta) * a_prev[j];
            let lam = r * a;
            self.sub[j] = -theta * lam;
            self.diag[j] = 1.0 + 2.0 * theta * lam;
            self.sup[j] = -theta * lam;
            let lap = prev[j + 1] - 2.0 * prev[j] + prev[j - 1];
            self.rhs[j] = prev[j] + (1.0 - theta) * lam * lap;
        }
        thomas(&self.sub, &self.diag, &self.sup, &self.rhs, &mut self.cp, &mut self.dp, out);
    }
}

/// Forward elimination / back substitution for a tridiagonal system.
fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64], cp: &mut [f64], dp: &mut [f64], x: &mut [f64]) {
    let n = diag.len();
    cp[0] = sup[0] / diag[0];
    dp[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - sub[i] * cp[i - 1];
        cp[i] = sup[i] / denom;
        dp[i] = (rhs[i] - sub[i] * dp[i - 1]) / denom;
    }
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
}

fn check_row(row: &[f64], m: usize) -> Result<(), PdeError> {
    match row.iter().position(|v| !v.is_finite()) {
        Some(j) => Err(PdeError::NonFinite { m, j }),
        None => Ok(()),
    }
}

/// Solves the linear problem on its full grid.
pub fn solve_linear(p: &LinearProblem, cfg: &SolverConfig) -> Result<Field, PdeError> {
    cfg.validate()?;
    let grid = *p.abar.grid();
    let tgrid = *p.abar.tgrid();
    let (nt, nx) = (tgrid.n_nodes(), grid.n_nodes());
    let r = tgrid.dt() / (grid.dx() * grid.dx());
    let a = p.abar.values();
    let mut u = Array2::zeros((nt, nx));
    u.row_mut(0).assign(&ndarray::ArrayView1::from(&p.initial[..]));
    let mut solver = StepSolver::new(nx);
    let mut prev = p.initial.clone();
    let mut next = vec![0.0; nx];
    for m in 0..nt - 1 {
        let a_prev = a.row(m);
        let a_next = a.row(m + 1);
        solver.step(
            &prev,
            a_prev.as_slice().expect("standard layout"),
            a_next.as_slice().expect("standard layout"),
            p.left[m + 1],
            p.right[m + 1],
            cfg.theta,
            r,
            &mut next,
        );
        check_row(&next, m + 1)?;
        u.row_mut(m + 1).assign(&ndarray::ArrayView1::from(&next[..]));
        std::mem::swap(&mut prev, &mut next);
    }
    Ok(Field::new(grid, tgrid, u)?)
}

/// Solution of the quasilinear problem and its frozen coefficient
/// `ā(t, x) = a(x, W(t, x))` on the same grid.
#[derive(Debug, Clone)]
pub struct QuasilinearSolution {
    pub w: Field,
    pub abar: Field,
    /// Picard iterations used per time step.
    pub picard_iterations: Vec<usize>,
}

impl QuasilinearSolution {
    pub fn max_picard(&self) -> usize {
        self.picard_iterations.iter().copied().max().unwrap_or(0)
    }
    pub fn total_picard(&self) -> usize {
        self.picard_iterations.iter().sum()
    }
}

fn coefficient_row(
    spec: &ProblemSpec,
    xs: &[f64],
    w: &[f64],
    t: f64,
    out: &mut [f64],
) -> Result<(), PdeError> {
    let c = &spec.coefficient;
    for ((o, &x), &y) in out.iter_mut().zip(xs).zip(w) {
        let v = c.a.eval2(x, y)?;
        if !(v >= c.a_lo && v <= c.a_hi) {
            return Err(PdeError::CoefficientOutOfBounds {
                t,
                x,
                value: v,
                lo: c.a_lo,
                hi: c.a_hi,
            });
        }
        *o = v;
    }
    Ok(())
}

/// Solves `W_t = a(x, W) W_xx` with Picard iteration on each new time level:
/// freeze `a(x, ·)` at the current iterate, take the linear step, repeat until
/// successive iterates differ by at most `picard_tol` in max norm.
pub fn solve_quasilinear(
    spec: &ProblemSpec,
    grid: crate::grid::Grid1D,
    tgrid: crate::grid::TimeGrid,
    cfg: &SolverConfig,
) -> Result<QuasilinearSolution, PdeError> {
    cfg.validate()?;
    let (nt, nx) = (tgrid.n_nodes(), grid.n_nodes());
    let xs = grid.nodes();
    let ts = tgrid.nodes();
    let data = &spec.data;
    let r = tgrid.dt() / (grid.dx() * grid.dx());

    let mut w = Array2::zeros((nt, nx));
    let mut abar = Array2::zeros((nt, nx));
    let mut prev: Vec<f64> = xs.iter().map(|&x| data.phi.eval1(x)).collect::<Result<_, _>>()?;
    prev[0] = data.g0.eval1(ts[0])?;
    prev[nx - 1] = data.g1.eval1(ts[0])?;
    check_row(&prev, 0)?;
    let mut a_prev = vec![0.0; nx];
    coefficient_row(spec, &xs, &prev, ts[0], &mut a_prev)?;
    w.row_mut(0).assign(&ndarray::ArrayView1::from(&prev[..]));
    abar.row_mut(0).assign(&ndarray::ArrayView1::from(&a_prev[..]));

    let mut solver = StepSolver::new(nx);
    let mut iterate = prev.clone();
    let mut next = vec![0.0; nx];
    let mut a_next = vec![0.0; nx];
    let mut counts = Vec::with_capacity(nt - 1);
    for m in 0..nt - 1 {
        let t = ts[m + 1];
        let (lb, rb) = (data.g0.eval1(t)?, data.g1.eval1(t)?);
        iterate.copy_from_slice(&prev);
        iterate[0] = lb;
        iterate[nx - 1] = rb;
        let mut converged = false;
        let mut last = f64::INFINITY;
        let mut k = 0;
        while k < cfg.picard_max {
            k += 1;
            coefficient_row(spec, &xs, &iterate, t, &mut a_next)?;
            solver.step(&prev, &a_prev, &a_next, lb, rb, cfg.theta, r, &mut next);
            check_row(&next, m + 1)?;
            last = next.iter().zip(&iterate).fold(0.0_f64, |a, (p, q)| a.max((p - q).abs()));
            std::mem::swap(&mut iterate, &mut next);
            if last <= cfg.picard_tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(PdeError::PicardDiverged {
                m: m + 1,
                iterations: k,
                last_update: last,
            });
        }
        counts.push(k);
        coefficient_row(spec, &xs, &iterate, t, &mut a_next)?;
        w.row_mut(m + 1).assign(&ndarray::ArrayView1::from(&iterate[..]));
        abar.row_mut(m + 1).assign(&ndarray::ArrayView1::from(&a_next[..]));
        std::mem::swap(&mut prev, &mut iterate);
        std::mem::swap(&mut a_prev, &mut a_next);
    }
    Ok(QuasilinearSolution {
        w: Field::new(grid, tgrid, w)?,
        abar: Field::new(grid, tgrid, abar)?,
        picard_iterations: counts,
    })
}

/// Scheme residual
/// `(u^{m+1}-u^m)/dt - ā_θ [θ δ²u^{m+1} + (1-θ) δ²u^m]`
/// stored at the new level `m+1`; zero on the initial row and lateral columns.
pub fn residual(field: &Field, abar: &Field, theta: f64) -> Result<Field, PdeError> {
    if field.grid() != abar.grid() || field.tgrid() != abar.tgrid() {
        return Err(PdeError::Problem("field and coefficient live on different grids".into()));
    }
    let (nt, nx) = (field.tgrid().n_nodes(), field.grid().n_nodes());
    let dt = field.tgrid().dt();
    let dx2 = field.grid().dx().powi(2);
    let u = field.values();
    let a = abar.values();
    let mut res = Array2::zeros((nt, nx));
    for m in 0..nt - 1 {
        for j in 1..nx - 1 {
            let lap_new = (u[[m + 1, j + 1]] - 2.0 * u[[m + 1, j]] + u[[m + 1, j - 1]]) / dx2;
            let lap_old = (u[[m, j + 1]] - 2.0 * u[[m, j]] + u[[m, j - 1]]) / dx2;
            let ath = theta * a[[m + 1, j]] + (1.0 - theta) * a[[m, j]];
            res[[m + 1, j]] = (u[[m + 1, j]] - u[[m, j]]) / dt - ath * (theta * lap_new + (1.0 - theta) * lap_old);
        }
    }
    Ok(Field::new(*field.grid(), *field.tgrid(), res)?)
}

/// Magnitude of the individual terms of the scheme residual,
/// `max|u| (1/dt + 4 a_max / dx²)`; residual tolerances are relative to it.
pub fn residual_scale(field: &Field, abar: &Field) -> f64 {
    let dt = field.tgrid().dt();
    let dx2 = field.grid().dx().powi(2);
    field.max_abs() * (1.0 / dt + 4.0 * abar.max_abs() / dx2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid1D, TimeGrid};
    use crate::problem::{CoefficientSpec, DataSpec};
    use std::f64::consts::PI;

    fn constant_abar(n: usize, steps: usize, horizon: f64, a: f64) -> Field {
        Field::from_fn(Grid1D::unit(n).unwrap(), TimeGrid::new(0.0, horizon, steps).unwrap(), |_, _| a).unwrap()
    }

    fn problem(abar: Field, initial: impl Fn(f64) -> f64, left: f64, right: f64) -> LinearProblem {
        let init = abar.grid().nodes().into_iter().map(initial).collect();
        let nt = abar.tgrid().n_nodes();
        LinearProblem::new(abar, init, vec![left; nt], vec![right; nt], CoefficientBounds { lo: 0.1, hi: 10.0 }).unwrap()
    }

    #[test]
    fn thomas_solves_small_system() {
        let sub = [0.0, -1.0, -1.0, -1.0];
        let diag = [2.0, 2.0, 2.0, 2.0];
        let sup = [-1.0, -1.0, -1.0, 0.0];
        let rhs = [1.0, 0.0, 0.0, 1.0];
        let (mut cp, mut dp, mut x) = ([0.0; 4], [0.0; 4], [0.0; 4]);
        thomas(&sub, &diag, &sup, &rhs, &mut cp, &mut dp, &mut x);
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn heat_equation_matches_fourier_mode() {
        let abar = constant_abar(200, 20, 0.1, 1.0);
        let p = problem(abar, |x| (PI * x).sin(), 0.0, 0.0);
        let u = solve_linear(&p, &SolverConfig::default()).unwrap();
        let exact = Field::from_fn(*u.grid(), *u.tgrid(), |t, x| (-PI * PI * t).exp() * (PI * x).sin()).unwrap();
        assert!(u.max_abs_diff(&exact).unwrap() <= 1e-3);
    }

    #[test]
    fn zero_and_constant_data_are_equilibria() {
        let p = problem(constant_abar(20, 10, 1.0, 2.0), |_| 0.0, 0.0, 0.0);
        assert_eq!(solve_linear(&p, &SolverConfig::default()).unwrap().max_abs(), 0.0);
        let p = problem(constant_abar(20, 10, 1.0, 2.0), |_| 1.0, 1.0, 1.0);
        let u = solve_linear(&p, &SolverConfig::default()).unwrap();
        assert!(u.values().iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn residual_vanishes_on_scheme_output() {
        let grid = Grid1D::unit(40).unwrap();
        let tgrid = TimeGrid::new(0.0, 0.5, 50).unwrap();
        let abar = Field::from_fn(grid, tgrid, |t, x| 1.0 + 0.3 * (3.0 * x + t).sin()).unwrap();
        for theta in [0.5, 0.75, 1.0] {
            let p = problem(abar.clone(), |x| x * (1.0 - x) * (1.0 + x), 0.0, 0.0);
            let u = solve_linear(&p, &SolverConfig::with_theta(theta)).unwrap();
            let res = residual(&u, &abar, theta).unwrap();
            assert!(res.max_abs() <= 1e-12 * residual_scale(&u, &abar), "theta={theta}");
        }
    }

    #[test]
    fn residual_is_local() {
        let abar = constant_abar(20, 20, 0.2, 1.0);
        let p = problem(abar.clone(), |x| (PI * x).sin(), 0.0, 0.0);
        let u = solve_linear(&p, &SolverConfig::default()).unwrap();
        let mut vals = u.values().clone();
        vals[[10, 7]] += 1e-3;
        let bumped = Field::new(*u.grid(), *u.tgrid(), vals).unwrap();
        let res = residual(&bumped, &abar, 0.5).unwrap();
        let scale = residual_scale(&u, &abar);
        for m in 0..=20 {
            for j in 0..=20 {
                let near = (m == 10 || m == 11) && (6..=8).contains(&j);
                if near {
                    assert!(res.at(m, j).abs() > 1e-6 * scale / 1e3, "({m},{j})");
                } else {
                    assert!(res.at(m, j).abs() <= 1e-12 * scale, "({m},{j}) = {}", res.at(m, j));
                }
            }
        }
    }

    #[test]
    fn rejects_out_of_bounds_and_incompatible_data() {
        let abar = constant_abar(10, 10, 1.0, 5.0);
        let nt = 11;
        let init = vec![0.0; 11];
        let err = LinearProblem::new(abar.clone(), init.clone(), vec![0.0; nt], vec![0.0; nt], CoefficientBounds { lo: 1.0, hi: 2.0 });
        assert!(matches!(err, Err(PdeError::CoefficientOutOfBounds { .. })));
        let err = LinearProblem::new(abar, init, vec![1.0; nt], vec![0.0; nt], CoefficientBounds { lo: 1.0, hi: 10.0 });
        assert!(matches!(err, Err(PdeError::Problem(_))));
        assert!(SolverConfig::with_theta(0.3).validate().is_err());
    }

    #[test]
    fn quasilinear_with_constant_coefficient_is_linear() {
        let spec = ProblemSpec::new(
            CoefficientSpec::parse("1 + 0*x + 0*y", 1.0, 1.0, 1.0).unwrap(),
            DataSpec::parse("sin(pi*x)", "0", "0").unwrap(),
            0.5,
        )
        .unwrap();
        let grid = Grid1D::unit(50).unwrap();
        let tgrid = TimeGrid::new(0.0, 0.5, 50).unwrap();
        let cfg = SolverConfig::default();
        let q = solve_quasilinear(&spec, grid, tgrid, &cfg).unwrap();
        let p = problem(constant_abar(50, 50, 0.5, 1.0), |x| (PI * x).sin(), 0.0, 0.0);
        let u = solve_linear(&p, &cfg).unwrap();
        assert!(q.w.max_abs_diff(&u).unwrap() <= 1e-12);
    }

    #[test]
    fn quasilinear_zero_data() {
        let spec = ProblemSpec::new(
            CoefficientSpec::parse("2 + x + tanh(y)", 1.0, 4.0, 10.0).unwrap(),
            DataSpec::parse("0", "0", "0").unwrap(),
            1.0,
        )
        .unwrap();
        let grid = Grid1D::unit(20).unwrap();
        let q = solve_quasilinear(&spec, grid, TimeGrid::new(0.0, 1.0, 20).unwrap(), &SolverConfig::default()).unwrap();
        assert_eq!(q.w.max_abs(), 0.0);
        for m in 0..=20 {
            for j in 0..=20 {
                assert_eq!(q.abar.at(m, j), 2.0 + grid.x(j));
            }
        }
    }

    #[test]
    fn quasilinear_reports_runtime_admissibility_violation() {
        let spec = ProblemSpec::new(
            CoefficientSpec::parse("1 + y", 0.5, 1.5, 10.0).unwrap(),
            DataSpec::parse("0.9*sin(pi*x)", "0", "0").unwrap(),
            0.1,
        )
        .unwrap();
        let r = solve_quasilinear(&spec, Grid1D::unit(20).unwrap(), TimeGrid::new(0.0, 0.1, 10).unwrap(), &SolverConfig::default());
        assert!(matches!(r, Err(PdeError::CoefficientOutOfBounds { .. })));
    }

    #[test]
    fn picard_budget_exhaustion_is_an_error() {
        let spec = ProblemSpec::new(
            CoefficientSpec::parse("1 + 0.5*tanh(y)", 0.5, 1.5, 10.0).unwrap(),
            DataSpec::parse("sin(pi*x)", "0", "0").unwrap(),
            0.1,
        )
        .unwrap();
        let cfg = SolverConfig {
            picard_max: 1,
            ..Default::default()
        };
        let r = solve_quasilinear(&spec, Grid1D::unit(20).unwrap(), TimeGrid::new(0.0, 0.1, 10).unwrap(), &cfg);
        assert!(matches!(r, Err(PdeError::PicardDiverged { .. })));
    }
}
