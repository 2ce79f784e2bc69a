//! Uniform space-time grids and sampled fields.
//!
//! Every subdomain used downstream (strips `[x1, x2]`, windows `[c1, T]`) is
//! a node-aligned subset of a master grid, so inequality checks never pick
//! up interpolation error. Difference operators are second order everywhere:
//! centred in the interior, three/four-point one-sided at the edges.

use std::io::{BufRead, Write};

use ndarray::{s, Array2, ArrayView1};
use thiserror::Error;

use crate::expr::{Expr, ExprError};

/// Relative tolerance (in units of the spacing) for deciding that a
/// coordinate sits on a node.
pub const NODE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("invalid grid: {0}")]
    Invalid(String),
    #[error("{coord} = {value} is not a grid node (nearest node {nearest} at distance {distance:e})")]
    NotANode {
        coord: &'static str,
        value: f64,
        nearest: f64,
        distance: f64,
    },
    #[error("field shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite field value at time node {m}, space node {j}")]
    NonFinite { m: usize, j: usize },
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Uniform partition of `[lo, hi]` into `n` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    lo: f64,
    hi: f64,
    n: usize,
}

impl Axis {
    fn new(lo: f64, hi: f64, n: usize, what: &str) -> Result<Axis, GridError> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(GridError::Invalid(format!("{what}: need lo < hi, got [{lo}, {hi}]")));
        }
        if n < 4 {
            return Err(GridError::Invalid(format!("{what}: need at least 4 cells, got {n}")));
        }
        Ok(Axis { lo, hi, n })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }
    pub fn hi(&self) -> f64 {
        self.hi
    }
    pub fn cells(&self) -> usize {
        self.n
    }
    pub fn len(&self) -> usize {
        self.n + 1
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / self.n as f64
    }
    pub fn node(&self, i: usize) -> f64 {
        if i == self.n {
            self.hi
        } else {
            self.lo + i as f64 * self.spacing()
        }
    }
    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|i| self.node(i)).collect()
    }

    /// Index of the node nearest to `v` (clamped to the axis).
    pub fn snap(&self, v: f64) -> usize {
        let r = ((v - self.lo) / self.spacing()).round();
        r.clamp(0.0, self.n as f64) as usize
    }

    fn index(&self, v: f64, coord: &'static str) -> Result<usize, GridError> {
        let i = self.snap(v);
        let d = (self.node(i) - v).abs();
        if d <= NODE_TOL * self.spacing() {
            Ok(i)
        } else {
            Err(GridError::NotANode {
                coord,
                value: v,
                nearest: self.node(i),
                distance: d,
            })
        }
    }

    fn sub(&self, i0: usize, i1: usize, what: &str) -> Result<Axis, GridError> {
        if i1 > self.n || i0 >= i1 {
            return Err(GridError::Invalid(format!(
                "{what}: node range {i0}..={i1} outside 0..={}",
                self.n
            )));
        }
        Axis::new(self.node(i0), self.node(i1), i1 - i0, what)
    }
}

/// Spatial grid `x_j = x_lo + j dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D(Axis);

impl Grid1D {
    pub fn new(x_lo: f64, x_hi: f64, n_cells: usize) -> Result<Grid1D, GridError> {
        Axis::new(x_lo, x_hi, n_cells, "space grid").map(Grid1D)
    }
    /// `[0, 1]` with `n_cells` cells.
    pub fn unit(n_cells: usize) -> Result<Grid1D, GridError> {
        Grid1D::new(0.0, 1.0, n_cells)
    }
    pub fn x_lo(&self) -> f64 {
        self.0.lo
    }
    pub fn x_hi(&self) -> f64 {
        self.0.hi
    }
    pub fn n_cells(&self) -> usize {
        self.0.n
    }
    pub fn n_nodes(&self) -> usize {
        self.0.n + 1
    }
    pub fn dx(&self) -> f64 {
        self.0.spacing()
    }
    pub fn x(&self, j: usize) -> f64 {
        self.0.node(j)
    }
    pub fn nodes(&self) -> Vec<f64> {
        self.0.nodes()
    }
    pub fn snap(&self, x: f64) -> usize {
        self.0.snap(x)
    }
    /// Index of the node at `x`; errors if `x` is not (within round-off) a node.
    pub fn node_index(&self, x: f64) -> Result<usize, GridError> {
        self.0.index(x, "x")
    }
    /// The sub-grid spanning nodes `j0..=j1`.
    pub fn sub(&self, j0: usize, j1: usize) -> Result<Grid1D, GridError> {
        self.0.sub(j0, j1, "space sub-grid").map(Grid1D)
    }
}

/// Time grid `t_m = t_lo + m dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid(Axis);

impl TimeGrid {
    pub fn new(t_lo: f64, t_hi: f64, n_steps: usize) -> Result<TimeGrid, GridError> {
        Axis::new(t_lo, t_hi, n_steps, "time grid").map(TimeGrid)
    }
    pub fn t_lo(&self) -> f64 {
        self.0.lo
    }
    pub fn t_hi(&self) -> f64 {
        self.0.hi
    }
    pub fn n_steps(&self) -> usize {
        self.0.n
    }
    pub fn n_nodes(&self) -> usize {
        self.0.n + 1
    }
    pub fn dt(&self) -> f64 {
        self.0.spacing()
    }
    pub fn t(&self, m: usize) -> f64 {
        self.0.node(m)
    }
    pub fn nodes(&self) -> Vec<f64> {
        self.0.nodes()
    }
    pub fn snap(&self, t: f64) -> usize {
        self.0.snap(t)
    }
    pub fn node_index(&self, t: f64) -> Result<usize, GridError> {
        self.0.index(t, "t")
    }
    pub fn sub(&self, m0: usize, m1: usize) -> Result<TimeGrid, GridError> {
        self.0.sub(m0, m1, "time sub-grid").map(TimeGrid)
    }
}

/// A scalar function sampled on `tgrid x grid`, indexed `[time, space]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid1D,
    tgrid: TimeGrid,
    values: Array2<f64>,
}

impl Field {
    pub fn new(grid: Grid1D, tgrid: TimeGrid, values: Array2<f64>) -> Result<Field, GridError> {
        let want = (tgrid.n_nodes(), grid.n_nodes());
        if values.dim() != want {
            return Err(GridError::Shape(format!(
                "values are {:?}, grids need {want:?}",
                values.dim()
            )));
        }
        if let Some(((m, j), _)) = values.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(GridError::NonFinite { m, j });
        }
        Ok(Field { grid, tgrid, values })
    }

    pub fn zeros(grid: Grid1D, tgrid: TimeGrid) -> Field {
        Field {
            grid,
            tgrid,
            values: Array2::zeros((tgrid.n_nodes(), grid.n_nodes())),
        }
    }

    /// Samples `f(t, x)` at every node.
    pub fn from_fn(grid: Grid1D, tgrid: TimeGrid, f: impl Fn(f64, f64) -> f64) -> Result<Field, GridError> {
        let values = Array2::from_shape_fn((tgrid.n_nodes(), grid.n_nodes()), |(m, j)| f(tgrid.t(m), grid.x(j)));
        Field::new(grid, tgrid, values)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }
    pub fn tgrid(&self) -> &TimeGrid {
        &self.tgrid
    }
    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }
    pub fn at(&self, m: usize, j: usize) -> f64 {
        self.values[[m, j]]
    }
    /// Time slice `t = t_m`.
    pub fn row(&self, m: usize) -> ArrayView1<'_, f64> {
        self.values.row(m)
    }
    /// Space line `x = x_j`.
    pub fn column(&self, j: usize) -> ArrayView1<'_, f64> {
        self.values.column(j)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Restriction to time nodes `m0..=m1` and space nodes `j0..=j1`.
    pub fn restrict(&self, m0: usize, m1: usize, j0: usize, j1: usize) -> Result<Field, GridError> {
        let grid = self.grid.sub(j0, j1)?;
        let tgrid = self.tgrid.sub(m0, m1)?;
        let values = self.values.slice(s![m0..=m1, j0..=j1]).to_owned();
        Ok(Field { grid, tgrid, values })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: self.grid,
            tgrid: self.tgrid,
            values: self.values.mapv(f),
        }
    }

    fn same_shape(&self, other: &Field) -> Result<(), GridError> {
        if self.grid != other.grid || self.tgrid != other.tgrid {
            return Err(GridError::Shape("fields live on different grids".into()));
        }
        Ok(())
    }

    /// Node-wise linear combination `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &Field, beta: f64) -> Result<Field, GridError> {
        self.same_shape(other)?;
        let values = &self.values * alpha + &other.values * beta;
        Field::new(self.grid, self.tgrid, values)
    }

    pub fn max_abs_diff(&self, other: &Field) -> Result<f64, GridError> {
        self.same_shape(other)?;
        Ok(self
            .values
            .iter()
            .zip(other.values.iter())
            .fold(0.0_f64, |a, (x, y)| a.max((x - y).abs())))
    }

    pub fn diff_x(&self) -> Field {
        self.along_x(first_derivative, self.grid.dx())
    }

    pub fn diff_xx(&self) -> Field {
        self.along_x(second_derivative, self.grid.dx())
    }

    pub fn diff_t(&self) -> Field {
        self.along_t(first_derivative, self.tgrid.dt())
    }

    /// Mixed derivative `d/dt d/dx`; the two stencils act on different axes
    /// and commute.
    pub fn diff_tx(&self) -> Field {
        self.diff_x().diff_t()
    }

    fn along_x(&self, op: fn(ArrayView1<f64>, f64, &mut [f64]), h: f64) -> Field {
        let mut out = Array2::zeros(self.values.dim());
        let mut buf = vec![0.0; self.grid.n_nodes()];
        for (m, row) in self.values.rows().into_iter().enumerate() {
            op(row, h, &mut buf);
            out.row_mut(m).assign(&ArrayView1::from(&buf[..]));
        }
        Field {
            grid: self.grid,
            tgrid: self.tgrid,
            values: out,
        }
    }

    fn along_t(&self, op: fn(ArrayView1<f64>, f64, &mut [f64]), h: f64) -> Field {
        let mut out = Array2::zeros(self.values.dim());
        let mut buf = vec![0.0; self.tgrid.n_nodes()];
        for (j, col) in self.values.columns().into_iter().enumerate() {
            op(col, h, &mut buf);
            out.column_mut(j).assign(&ArrayView1::from(&buf[..]));
        }
        Field {
            grid: self.grid,
            tgrid: self.tgrid,
            values: out,
        }
    }

    /// Trapezoid integral of time slice `m` over space nodes `j0..=j1`.
    pub fn integrate_x(&self, m: usize, j0: usize, j1: usize) -> f64 {
        trapezoid(self.values.slice(s![m, j0..=j1]), self.grid.dx())
    }

    /// Trapezoid integral of space line `j` over time nodes `m0..=m1`.
    pub fn integrate_t(&self, j: usize, m0: usize, m1: usize) -> f64 {
        trapezoid(self.values.slice(s![m0..=m1, j]), self.tgrid.dt())
    }

    /// Tensor trapezoid over the node rectangle `[m0, m1] x [j0, j1]`.
    pub fn integrate_xt(&self, m0: usize, m1: usize, j0: usize, j1: usize) -> f64 {
        let inner: Vec<f64> = (m0..=m1).map(|m| self.integrate_x(m, j0, j1)).collect();
        trapezoid(ArrayView1::from(&inner[..]), self.tgrid.dt())
    }

    /// As [`Field::integrate_x`] with real endpoints, which must be nodes.
    pub fn integrate_x_over(&self, m: usize, a: f64, b: f64) -> Result<f64, GridError> {
        let (j0, j1) = (self.grid.node_index(a)?, self.grid.node_index(b)?);
        Ok(self.integrate_x(m, j0.min(j1), j0.max(j1)))
    }

    /// As [`Field::integrate_t`] with real endpoints, which must be nodes.
    pub fn integrate_t_over(&self, j: usize, a: f64, b: f64) -> Result<f64, GridError> {
        let (m0, m1) = (self.tgrid.node_index(a)?, self.tgrid.node_index(b)?);
        Ok(self.integrate_t(j, m0.min(m1), m0.max(m1)))
    }

    /// As [`Field::integrate_xt`] with real endpoints, which must be nodes.
    pub fn integrate_xt_over(&self, t: (f64, f64), x: (f64, f64)) -> Result<f64, GridError> {
        let (m0, m1) = (self.tgrid.node_index(t.0)?, self.tgrid.node_index(t.1)?);
        let (j0, j1) = (self.grid.node_index(x.0)?, self.grid.node_index(x.1)?);
        Ok(self.integrate_xt(m0.min(m1), m0.max(m1), j0.min(j1), j0.max(j1)))
    }

    /// CSV: a header row `t, x_0, ..., x_N`, then one row per time node.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), GridError> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend(self.grid.nodes().iter().map(|x| format!("{x:?}")));
        w.write_record(&header).map_err(|e| GridError::Csv(e.to_string()))?;
        for (m, row) in self.values.rows().into_iter().enumerate() {
            let mut rec = vec![format!("{:?}", self.tgrid.t(m))];
            rec.extend(row.iter().map(|v| format!("{v:?}")));
            w.write_record(&rec).map_err(|e| GridError::Csv(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the format written by [`Field::write_csv`]; nodes must be uniform.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Field, GridError> {
        let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(input);
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut xs: Option<Vec<f64>> = None;
        for rec in r.records() {
            let rec = rec.map_err(|e| GridError::Csv(e.to_string()))?;
            let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| GridError::Csv(format!("`{s}`: {e}")));
            if xs.is_none() {
                xs = Some(rec.iter().skip(1).map(parse).collect::<Result<_, _>>()?);
            } else {
                rows.push(rec.iter().map(parse).collect::<Result<_, _>>()?);
            }
        }
        let xs = xs.ok_or_else(|| GridError::Csv("empty file".into()))?;
        if rows.len() < 2 || xs.len() < 2 {
            return Err(GridError::Csv("too few rows or columns".into()));
        }
        let ts: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let grid = Grid1D::new(xs[0], xs[xs.len() - 1], xs.len() - 1)?;
        let tgrid = TimeGrid::new(ts[0], ts[ts.len() - 1], ts.len() - 1)?;
        let mut values = Array2::zeros((ts.len(), xs.len()));
        for (m, row) in rows.iter().enumerate() {
            if row.len() != xs.len() + 1 {
                return Err(GridError::Csv(format!("row {m} has {} columns", row.len())));
            }
            for (j, v) in row[1..].iter().enumerate() {
                values[[m, j]] = *v;
            }
        }
        Field::new(grid, tgrid, values)
    }
}

fn first_derivative(f: ArrayView1<f64>, h: f64, out: &mut [f64]) {
    let n = f.len() - 1;
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    out[n] = (3.0 * f[n] - 4.0 * f[n - 1] + f[n - 2]) / (2.0 * h);
    for i in 1..n {
        out[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
}

fn second_derivative(f: ArrayView1<f64>, h: f64, out: &mut [f64]) {
    let n = f.len() - 1;
    let h2 = h * h;
    out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    out[n] = (2.0 * f[n] - 5.0 * f[n - 1] + 4.0 * f[n - 2] - f[n - 3]) / h2;
    for i in 1..n {
        out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    }
}

/// Composite trapezoid rule on equally spaced samples; a single sample
/// integrates to zero.
pub fn trapezoid(f: ArrayView1<f64>, h: f64) -> f64 {
    let n = f.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = f.iter().skip(1).take(n - 2).sum();
    h * (0.5 * (f[0] + f[n - 1]) + inner)
}

/// Running trapezoid integral, starting at zero.
pub fn cumulative_trapezoid(f: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(f.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in f.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Composite Simpson rule of `f` over `[a, b]` with `n` intervals (rounded up
/// to even).
pub fn simpson(f: impl Fn(f64) -> Result<f64, ExprError>, a: f64, b: f64, n: usize) -> Result<f64, ExprError> {
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut acc = f(a)? + f(b)?;
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h)?;
    }
    Ok(acc * h / 3.0)
}

/// Total variation of a C1 function of `t` over `[0, T]`: trapezoid
/// quadrature of `|g'|` on `n` equally spaced nodes, `g'` symbolic.
pub fn total_variation(g: &Expr, horizon: f64, n: usize) -> Result<f64, GridError> {
    if !(horizon > 0.0) {
        return Err(GridError::Invalid(format!("horizon must be positive, got {horizon}")));
    }
    if n < 8 {
        return Err(GridError::Invalid(format!("need at least 8 quadrature nodes, got {n}")));
    }
    let var = g.vars()[0].clone();
    let dg = g.differentiate(&var)?;
    let h = horizon / (n - 1) as f64;
    let samples = (0..n)
        .map(|i| dg.eval1(i as f64 * h).map(f64::abs))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(trapezoid(ArrayView1::from(&samples[..]), h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_field(n: usize, steps: usize, f: impl Fn(f64, f64) -> f64) -> Field {
        Field::from_fn(Grid1D::unit(n).unwrap(), TimeGrid::new(0.0, 1.0, steps).unwrap(), f).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid1D::new(0.0, 1.0, 3).is_err());
        assert!(Grid1D::new(1.0, 1.0, 10).is_err());
        assert!(TimeGrid::new(0.5, 0.1, 10).is_err());
        let g = Grid1D::unit(10).unwrap();
        assert_eq!(g.node_index(0.3).unwrap(), 3);
        assert!(matches!(g.node_index(0.35), Err(GridError::NotANode { .. })));
        assert_eq!(g.x(10), 1.0);
        let sub = g.sub(2, 8).unwrap();
        assert_eq!(sub.n_cells(), 6);
        assert!((sub.dx() - g.dx()).abs() < 1e-15);
        assert!(g.sub(2, 5).is_err());
    }

    #[test]
    fn first_derivative_exact_for_linear() {
        let f = unit_field(10, 8, |_, x| 3.0 * x - 1.0);
        let d = f.diff_x();
        assert!(d.values().iter().all(|v| (v - 3.0).abs() < 1e-12));
        let f = unit_field(10, 8, |t, _| t);
        assert!(f.diff_t().values().iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn second_derivative_exact_for_quadratic() {
        let f = unit_field(16, 8, |_, x| x * x);
        assert!(f.diff_xx().values().iter().all(|v| (v - 2.0).abs() < 1e-10));
    }

    #[test]
    fn mixed_derivative_exact_for_bilinear() {
        let f = unit_field(12, 9, |t, x| t * x);
        assert!(f.diff_tx().values().iter().all(|v| (v - 1.0).abs() < 1e-10));
    }

    #[test]
    fn first_derivative_converges_at_second_order() {
        let err = |n: usize| {
            let f = unit_field(n, 4, |_, x| (PI * x).sin());
            let d = f.diff_x();
            (0..=n).fold(0.0_f64, |a, j| a.max((d.at(0, j) - PI * (PI * f.grid().x(j)).cos()).abs()))
        };
        let ratio = err(100) / err(200);
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn mixed_derivative_converges_at_second_order() {
        let err = |n: usize| {
            let f = unit_field(n, n, |t, x| (-t).exp() * (PI * x).sin());
            let d = f.diff_tx();
            let mut e = 0.0_f64;
            for m in 0..=n {
                for j in 0..=n {
                    let (t, x) = (f.tgrid().t(m), f.grid().x(j));
                    e = e.max((d.at(m, j) + PI * (-t).exp() * (PI * x).cos()).abs());
                }
            }
            e
        };
        let ratio = err(40) / err(80);
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn quadrature_examples() {
        let f = unit_field(10, 4, |_, _| 1.0);
        assert!((f.integrate_x(0, 0, 10) - 1.0).abs() < 1e-15);
        let f = unit_field(100, 4, |_, x| (PI * x).sin());
        assert!((f.integrate_x(2, 0, 100) - 2.0 / PI).abs() < 1e-4);
        assert_eq!(f.integrate_x(1, 37, 37), 0.0);
        assert_eq!(f.integrate_t(5, 2, 2), 0.0);
        assert!(f.integrate_x_over(0, 0.0, 0.555).is_err());
        let g = unit_field(10, 10, |t, x| t + x);
        // exact for bilinear data
        assert!((g.integrate_xt(0, 10, 0, 10) - 1.0).abs() < 1e-14);
        assert!((g.integrate_xt_over((0.0, 0.5), (0.2, 0.6)).unwrap() - (0.5 * 0.4 * (0.25 + 0.4))).abs() < 1e-14);
    }

    #[test]
    fn total_variation_examples() {
        let g = Expr::parse("t", &["t"]).unwrap();
        assert!((total_variation(&g, 1.0, 64).unwrap() - 1.0).abs() < 1e-14);
        let g = Expr::parse("sin(t)", &["t"]).unwrap();
        assert!((total_variation(&g, 2.0 * PI, 10_000).unwrap() - 4.0).abs() < 1e-6);
        let g = Expr::parse("5", &["t"]).unwrap();
        assert_eq!(total_variation(&g, 3.0, 16).unwrap(), 0.0);
        assert!(total_variation(&g, 3.0, 4).is_err());
    }

    #[test]
    fn operators_annihilate_constants() {
        let f = unit_field(20, 20, |_, _| 7.25);
        for d in [f.diff_x(), f.diff_xx(), f.diff_t(), f.diff_tx()] {
            assert!(d.max_abs() <= 1e-12 * 7.25 * 400.0);
        }
    }

    #[test]
    fn restrict_and_csv_round_trip() {
        let f = unit_field(10, 6, |t, x| (t - x).sin() + 1e-17 * x);
        let r = f.restrict(2, 6, 3, 9).unwrap();
        assert_eq!(r.at(0, 0), f.at(2, 3));
        assert_eq!(r.grid().x(0), f.grid().x(3));
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let back = Field::read_csv(&buf[..]).unwrap();
        assert_eq!(back.values(), r.values());
        assert!(f.restrict(0, 6, 3, 5).is_err());
    }

    #[test]
    fn simpson_exact_for_cubic() {
        let v = simpson(|x| Ok(x * x * x - 2.0 * x), -1.0, 2.0, 6).unwrap();
        assert!((v - (4.0 - 0.25 - 3.0)).abs() < 1e-13);
    }
}
