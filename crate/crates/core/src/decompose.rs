//! Auxiliary solutions of the frozen-coefficient problem: the three-way data
//! split, monotone splits of boundary data, comonotone barrier pairs and the
//! strip decomposition. Every sub-problem reuses the master `ā` by restriction.

use thiserror::Error;

use crate::expr::{Expr, ExprError};
use crate::grid::{Field, Grid1D, GridError, TimeGrid};
use crate::pde::{solve_linear, CoefficientBounds, LinearProblem, PdeError, SolverConfig};
use crate::problem::DataSpec;

#[derive(Debug, Error)]
pub enum DecomposeError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Pde(#[from] PdeError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

type Result<T> = std::result::Result<T, DecomposeError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

pub fn sample_x(e: &Expr, grid: &Grid1D) -> std::result::Result<Vec<f64>, ExprError> {
    grid.nodes().into_iter().map(|x| e.eval1(x)).collect()
}

pub fn sample_t(e: &Expr, tgrid: &TimeGrid) -> std::result::Result<Vec<f64>, ExprError> {
    tgrid.nodes().into_iter().map(|t| e.eval1(t)).collect()
}

fn linear(
    abar: &Field,
    initial: Vec<f64>,
    left: Vec<f64>,
    right: Vec<f64>,
    bounds: CoefficientBounds,
    cfg: &SolverConfig,
) -> Result<Field> {
    let p = LinearProblem::new(abar.clone(), initial, left, right, bounds)?;
    Ok(solve_linear(&p, cfg)?)
}

/// Direct solve of the linear problem with the full data `(φ, g0, g1)`.
pub fn solve_full(abar: &Field, data: &DataSpec, bounds: CoefficientBounds, cfg: &SolverConfig) -> Result<Field> {
    linear(
        abar,
        sample_x(&data.phi, abar.grid())?,
        sample_t(&data.g0, abar.tgrid())?,
        sample_t(&data.g1, abar.tgrid())?,
        bounds,
        cfg,
    )
}

/// `u1` carries the initial data, `u2` the left data, `u3` the right data.
#[derive(Debug, Clone)]
pub struct ThreeWaySplit {
    pub u1: Field,
    pub u2: Field,
    pub u3: Field,
}

impl ThreeWaySplit {
    pub fn sum(&self) -> Field {
        let s = self.u1.combine(1.0, &self.u2, 1.0).expect("same grid");
        s.combine(1.0, &self.u3, 1.0).expect("same grid")
    }
}

pub fn split_three(abar: &Field, data: &DataSpec, bounds: CoefficientBounds, cfg: &SolverConfig) -> Result<ThreeWaySplit> {
    let (nx, nt) = (abar.grid().n_nodes(), abar.tgrid().n_nodes());
    let mut phi = sample_x(&data.phi, abar.grid())?;
    // ends are zero under strict corners; drop roundoff such as sin(pi)
    let corner = 1e-10 * phi.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
    for j in [0, nx - 1] {
        if phi[j].abs() > corner {
            return Err(DecomposeError::Precondition(format!(
                "initial data must vanish at both ends, got {} at x={}",
                phi[j],
                abar.grid().x(j)
            )));
        }
        phi[j] = 0.0;
    }
    let g0 = sample_t(&data.g0, abar.tgrid())?;
    let g1 = sample_t(&data.g1, abar.tgrid())?;
    let zt = vec![0.0; nt];
    let zx = vec![0.0; nx];
    Ok(ThreeWaySplit {
        u1: linear(abar, phi, zt.clone(), zt.clone(), bounds, cfg)?,
        u2: linear(abar, zx.clone(), g0, zt.clone(), bounds, cfg)?,
        u3: linear(abar, zx, zt, g1, bounds, cfg)?,
    })
}

/// `g = h - k` with `h, k` nondecreasing and `h + k` the running variation.
#[derive(Debug, Clone)]
pub struct MonotoneSplit {
    pub t: Vec<f64>,
    pub g: Vec<f64>,
    /// Running variation `∫_0^t |g'|`.
    pub variation: Vec<f64>,
    pub h: Vec<f64>,
    pub k: Vec<f64>,
    pub dh: Vec<f64>,
    pub dk: Vec<f64>,
}

impl MonotoneSplit {
    pub fn total_variation(&self) -> f64 {
        *self.variation.last().expect("non-empty grid")
    }
}

const SUBSAMPLES: usize = 8;

/// `∫_a^b |g'|` as a sum of `|Δg|` over pieces on which `g'` keeps its sign;
/// sign changes of `g'` are located by bisection between subsamples.
fn interval_variation(g: &Expr, dg: &Expr, a: f64, b: f64) -> std::result::Result<f64, ExprError> {
    let mut points = Vec::with_capacity(2 * SUBSAMPLES + 1);
    let step = (b - a) / SUBSAMPLES as f64;
    let mut prev_t = a;
    let mut prev_d = dg.eval1(a)?;
    points.push(a);
    for i in 1..=SUBSAMPLES {
        let t = if i == SUBSAMPLES { b } else { a + i as f64 * step };
        let d = dg.eval1(t)?;
        if prev_d * d < 0.0 {
            let (mut lo, mut hi, mut dlo) = (prev_t, t, prev_d);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let dm = dg.eval1(mid)?;
                if dm * dlo > 0.0 {
                    lo = mid;
                    dlo = dm;
                } else {
                    hi = mid;
                }
            }
            points.push(0.5 * (lo + hi));
        }
        points.push(t);
        prev_t = t;
        prev_d = d;
    }
    let mut acc = 0.0;
    let mut gp = g.eval1(points[0])?;
    for &p in &points[1..] {
        let gv = g.eval1(p)?;
        acc += (gv - gp).abs();
        gp = gv;
    }
    Ok(acc)
}

/// Splits boundary data `g` (a function of `t` with `g(0) = 0`) on the nodes of
/// `tgrid`, which must start at zero.
pub fn monotone_split(g: &Expr, tgrid: &TimeGrid) -> Result<MonotoneSplit> {
    if tgrid.t_lo() != 0.0 {
        return Err(DecomposeError::Precondition(format!(
            "time grid must start at 0, starts at {}",
            tgrid.t_lo()
        )));
    }
    let g_at_0 = g.eval1(0.0)?;
    if g_at_0.abs() > 1e-12 {
        return Err(DecomposeError::Precondition(format!("need g(0) = 0, got {g_at_0}")));
    }
    let var = g.vars()[0].clone();
    let dg = g.differentiate(&var)?;
    let t = tgrid.nodes();
    let gs: Vec<f64> = t.iter().map(|&s| g.eval1(s)).collect::<std::result::Result<_, _>>()?;
    let mut variation = Vec::with_capacity(t.len());
    variation.push(0.0);
    for i in 1..t.len() {
        let inc = interval_variation(g, &dg, t[i - 1], t[i])?.max((gs[i] - gs[i - 1]).abs());
        variation.push(variation[i - 1] + inc);
    }
    let h = variation.iter().zip(&gs).map(|(v, g)| 0.5 * (v + g)).collect();
    let k = variation.iter().zip(&gs).map(|(v, g)| 0.5 * (v - g)).collect();
    let d: Vec<f64> = t.iter().map(|&s| dg.eval1(s)).collect::<std::result::Result<_, _>>()?;
    let dh = d.iter().map(|d| 0.5 * (d.abs() + d)).collect();
    let dk = d.iter().map(|d| 0.5 * (d.abs() - d)).collect();
    Ok(MonotoneSplit {
        t,
        g: gs,
        variation,
        h,
        k,
        dh,
        dk,
    })
}

/// Minimum signs of a barrier pair. Time derivatives are the backward
/// difference quotients the scheme itself advances with (levels `m >= 1`);
/// second differences are taken at interior space nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierSigns {
    pub min_vt: f64,
    pub min_wt: f64,
    pub min_vxx: f64,
    pub min_wxx: f64,
}

#[derive(Debug, Clone)]
pub struct BarrierPair {
    pub v: Field,
    pub w: Field,
    pub signs: BarrierSigns,
}

impl BarrierPair {
    fn new(v: Field, w: Field) -> Self {
        let signs = BarrierSigns {
            min_vt: min_backward_dt(&v),
            min_wt: min_backward_dt(&w),
            min_vxx: min_interior_dxx(&v),
            min_wxx: min_interior_dxx(&w),
        };
        BarrierPair { v, w, signs }
    }

    pub fn difference(&self) -> Field {
        self.v.combine(1.0, &self.w, -1.0).expect("same grid")
    }

    pub fn scale(&self) -> f64 {
        self.v.max_abs().max(self.w.max_abs())
    }
}

fn min_backward_dt(f: &Field) -> f64 {
    let dt = f.tgrid().dt();
    let v = f.values();
    let mut min = 0.0_f64;
    for m in 1..v.nrows() {
        for j in 0..v.ncols() {
            min = min.min((v[[m, j]] - v[[m - 1, j]]) / dt);
        }
    }
    min
}

fn min_interior_dxx(f: &Field) -> f64 {
    let d = f.diff_xx();
    let n = f.grid().n_nodes();
    d.values()
        .rows()
        .into_iter()
        .flat_map(|r| r.to_vec()[1..n - 1].to_vec())
        .fold(0.0_f64, f64::min)
}

/// Barriers `v, w` for the boundary-driven part on `side`: `v` takes `h`, `w`
/// takes `k` from [`monotone_split`], all other data zero, so `v - w` solves
/// the problem with data `g` on that side.
pub fn build_barriers_boundary(
    abar: &Field,
    side: Side,
    g: &Expr,
    bounds: CoefficientBounds,
    cfg: &SolverConfig,
) -> Result<BarrierPair> {
    let split = monotone_split(g, abar.tgrid())?;
    let nx = abar.grid().n_nodes();
    let zt = vec![0.0; split.t.len()];
    let solve = |data: Vec<f64>| -> Result<Field> {
        match side {
            Side::Left => linear(abar, vec![0.0; nx], data, zt.clone(), bounds, cfg),
            Side::Right => linear(abar, vec![0.0; nx], zt.clone(), data, bounds, cfg),
        }
    };
    let v = solve(split.h)?;
    let w = solve(split.k)?;
    Ok(BarrierPair::new(v, w))
}

/// Solves the linear problem with boundary data `g` on `side`, zero elsewhere.
pub fn solve_boundary_driven(
    abar: &Field,
    side: Side,
    g: &Expr,
    bounds: CoefficientBounds,
    cfg: &SolverConfig,
) -> Result<Field> {
    let nx = abar.grid().n_nodes();
    let data = sample_t(g, abar.tgrid())?;
    let zt = vec![0.0; data.len()];
    match side {
        Side::Left => linear(abar, vec![0.0; nx], data, zt, bounds, cfg),
        Side::Right => linear(abar, vec![0.0; nx], zt, data, bounds, cfg),
    }
}

/// Starting profiles of the barriers at `t = c1` built from a slice `u` with
/// `u[0] = u[n] = 0`. `P` solves `δ²P = |δ²u|` with `P(0) = P(1) = 0`, so
/// `v0 = (P + u)/2` and `w0 = (P - u)/2` have nonnegative second differences
/// and zero ends, and `v0 - w0 = u`.
pub fn initial_barrier_profiles(u: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = u.len() - 1;
    let q: Vec<f64> = (1..n).map(|j| (u[j + 1] - 2.0 * u[j] + u[j - 1]).abs()).collect();
    // double running sum of the second differences, then remove the chord;
    // working with undivided differences keeps dx out of it
    let mut p = vec![0.0; n + 1];
    for j in 1..n {
        p[j + 1] = 2.0 * p[j] - p[j - 1] + q[j - 1];
    }
    let end = p[n];
    for (j, pj) in p.iter_mut().enumerate() {
        *pj -= end * j as f64 / n as f64;
    }
    p[0] = 0.0;
    p[n] = 0.0;
    let mut v: Vec<f64> = p.iter().zip(u).map(|(p, u)| 0.5 * (p + u)).collect();
    let mut w: Vec<f64> = p.iter().zip(u).map(|(p, u)| 0.5 * (p - u)).collect();
    for j in [0, n] {
        v[j] = 0.0;
        w[j] = 0.0;
    }
    (v, w)
}

/// Barriers for `u1` started at `t = c1`, zero lateral data, on the time
/// grid `[c1, T]` of the master.
pub fn build_barriers_initial(
    abar: &Field,
    u1: &Field,
    c1: f64,
    bounds: CoefficientBounds,
    cfg: &SolverConfig,
) -> Result<BarrierPair> {
    if u1.grid() != abar.grid() || u1.tgrid() != abar.tgrid() {
        return Err(DecomposeError::Precondition("u1 and coefficient live on different grids".into()));
    }
    let m0 = abar.tgrid().node_index(c1)?;
    let last = abar.tgrid().n_steps();
    if last - m0 < 4 {
        return Err(DecomposeError::Precondition(format!("c1 = {c1} leaves fewer than 4 time steps")));
    }
    let nx = abar.grid().n_nodes();
    let mut slice = u1.row(m0).to_vec();
    let scale = slice.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    for j in [0, nx - 1] {
        if slice[j].abs() > 1e-10 * scale.max(1.0) {
            return Err(DecomposeError::Precondition(format!("u1 must vanish at the lateral edges, got {}", slice[j])));
        }
        slice[j] = 0.0;
    }
    let (v0, w0) = initial_barrier_profiles(&slice);
    let sub = abar.restrict(m0, last, 0, nx - 1)?;
    let nt = sub.tgrid().n_nodes();
    let v = linear(&sub, v0, vec![0.0; nt], vec![0.0; nt], bounds, cfg)?;
    let w = linear(&sub, w0, vec![0.0; nt], vec![0.0; nt], bounds, cfg)?;
    Ok(BarrierPair::new(v, w))
}

/// Strip decomposition of `u1` on `[x1, x2]`: `u1 = ubar + utilde` on the strip,
/// `uhat = ubar` minus the chord through `(x1, φ(x1))`, `(x2, φ(x2))`.
#[derive(Debug, Clone)]
pub struct StripSplit {
    pub j1: usize,
    pub j2: usize,
    pub ubar: Field,
    pub utilde: Field,
    pub uhat: Field,
    /// `max |u1 - ubar - utilde|` over the strip.
    pub identity_error: f64,
}

pub fn strip_split(
    abar: &Field,
    u1: &Field,
    phi: &Expr,
    x1: f64,
    x2: f64,
    bounds: CoefficientBounds,
    cfg: &SolverConfig,
) -> Result<StripSplit> {
    let grid = abar.grid();
    let (j1, j2) = (grid.node_index(x1)?, grid.node_index(x2)?);
    if j2 < j1 + 4 {
        return Err(DecomposeError::Precondition(format!(
            "strip [{x1}, {x2}] needs x1 < x2 and at least 4 cells"
        )));
    }
    let last = abar.tgrid().n_steps();
    let sub = abar.restrict(0, last, j1, j2)?;
    let master = u1.restrict(0, last, j1, j2)?;
    let nt = sub.tgrid().n_nodes();
    let mut init = sample_x(phi, sub.grid())?;
    let (p1, p2) = (phi.eval1(grid.x(j1))?, phi.eval1(grid.x(j2))?);
    let n = init.len() - 1;
    init[0] = p1;
    init[n] = p2;
    let ubar = linear(&sub, init.clone(), vec![p1; nt], vec![p2; nt], bounds, cfg)?;
    let left: Vec<f64> = master.column(0).iter().map(|v| v - p1).collect();
    let right: Vec<f64> = master.column(n).iter().map(|v| v - p2).collect();
    let mut left = left;
    let mut right = right;
    left[0] = 0.0;
    right[0] = 0.0;
    let utilde = linear(&sub, vec![0.0; n + 1], left, right, bounds, cfg)?;
    let xs = sub.grid().nodes();
    let (xa, xb) = (xs[0], xs[n]);
    let chord: Vec<f64> = xs.iter().map(|x| ((x - xa) * p2 + (xb - x) * p1) / (xb - xa)).collect();
    let mut hat = ubar.values().clone();
    for mut row in hat.rows_mut() {
        for (v, c) in row.iter_mut().zip(&chord) {
            *v -= c;
        }
        row[0] = 0.0;
        row[n] = 0.0;
    }
    let uhat = Field::new(*sub.grid(), *sub.tgrid(), hat)?;
    let identity_error = ubar.combine(1.0, &utilde, 1.0)?.max_abs_diff(&master)?;
    Ok(StripSplit {
        j1,
        j2,
        ubar,
        utilde,
        uhat,
        identity_error,
    })
}
