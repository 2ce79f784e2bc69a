//! Problem instances `W_t = a(x, W) W_xx` on `[0, 1] x [0, T]` with
//! Dirichlet data, and the admissibility checks that gate every solve.

use thiserror::Error;

use crate::expr::{Expr, ExprError};

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("coefficient bounds: {0}")]
    Bounds(String),
    #[error("expression `{name}` must be in variables {want:?}, found {found:?}")]
    Variables {
        name: &'static str,
        want: Vec<&'static str>,
        found: Vec<String>,
    },
    #[error("invalid window: {0}")]
    Window(String),
    #[error("horizon must be positive, got {0}")]
    Horizon(f64),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Tolerance on corner values for the compatibility conditions.
pub const CORNER_TOL: f64 = 1e-12;

fn require_vars(e: &Expr, name: &'static str, want: &[&'static str]) -> Result<(), ProblemError> {
    if e.vars().iter().map(String::as_str).eq(want.iter().copied()) {
        Ok(())
    } else {
        Err(ProblemError::Variables {
            name,
            want: want.to_vec(),
            found: e.vars().to_vec(),
        })
    }
}

/// The diffusion coefficient `a(x, y)` with its claimed bounds
/// `a_lo <= a <= a_hi` and `C^3` norm bound.
#[derive(Debug, Clone)]
pub struct CoefficientSpec {
    pub a: Expr,
    pub a_lo: f64,
    pub a_hi: f64,
    pub c3_bound: f64,
}

impl CoefficientSpec {
    pub fn new(a: Expr, a_lo: f64, a_hi: f64, c3_bound: f64) -> Result<Self, ProblemError> {
        require_vars(&a, "a", &["x", "y"])?;
        if !(a_lo > 0.0 && a_lo <= a_hi && a_hi.is_finite()) {
            return Err(ProblemError::Bounds(format!("need 0 < a_lo <= a_hi < inf, got [{a_lo}, {a_hi}]")));
        }
        if !(c3_bound >= 0.0 && c3_bound.is_finite()) {
            return Err(ProblemError::Bounds(format!("c3_bound must be finite and >= 0, got {c3_bound}")));
        }
        Ok(CoefficientSpec { a, a_lo, a_hi, c3_bound })
    }

    /// Parses `a` in `(x, y)`.
    pub fn parse(a: &str, a_lo: f64, a_hi: f64, c3_bound: f64) -> Result<Self, ProblemError> {
        Self::new(Expr::parse(a, &["x", "y"])?, a_lo, a_hi, c3_bound)
    }
}

/// Initial datum `phi(x)` and lateral data `g0(t)`, `g1(t)`.
#[derive(Debug, Clone)]
pub struct DataSpec {
    pub phi: Expr,
    pub g0: Expr,
    pub g1: Expr,
}

impl DataSpec {
    pub fn new(phi: Expr, g0: Expr, g1: Expr) -> Result<Self, ProblemError> {
        require_vars(&phi, "phi", &["x"])?;
        require_vars(&g0, "g0", &["t"])?;
        require_vars(&g1, "g1", &["t"])?;
        Ok(DataSpec { phi, g0, g1 })
    }

    pub fn parse(phi: &str, g0: &str, g1: &str) -> Result<Self, ProblemError> {
        Self::new(
            Expr::parse(phi, &["x"])?,
            Expr::parse(g0, &["t"])?,
            Expr::parse(g1, &["t"])?,
        )
    }
}

#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub coefficient: CoefficientSpec,
    pub data: DataSpec,
    pub horizon: f64,
}

impl ProblemSpec {
    pub fn new(coefficient: CoefficientSpec, data: DataSpec, horizon: f64) -> Result<Self, ProblemError> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(ProblemError::Horizon(horizon));
        }
        Ok(ProblemSpec {
            coefficient,
            data,
            horizon,
        })
    }
}

/// Interior region `S = {t >= c1, eps <= x <= 1 - eps}` cut at `t <= T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWindow {
    pub c1: f64,
    pub eps: f64,
    pub horizon: f64,
}

impl EstimateWindow {
    pub fn new(c1: f64, eps: f64, horizon: f64) -> Result<Self, ProblemError> {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(ProblemError::Window(format!("need 0 < eps < 1/2, got {eps}")));
        }
        if !(c1 > 0.0 && c1 <= horizon && horizon.is_finite()) {
            return Err(ProblemError::Window(format!("need 0 < c1 <= T, got c1={c1}, T={horizon}")));
        }
        Ok(EstimateWindow { c1, eps, horizon })
    }

    pub fn with_horizon(&self, horizon: f64) -> Result<Self, ProblemError> {
        Self::new(self.c1, self.eps, horizon)
    }
}

/// A lattice point where a sampled coefficient value left its claimed bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

/// Outcome of sampling `a` and its partial derivatives on a lattice.
#[derive(Debug, Clone)]
pub struct BoundsReport {
    pub y_range: (f64, f64),
    pub lattice: (usize, usize),
    pub sampled_min: f64,
    pub sampled_max: f64,
    /// Largest sampled `|D^alpha a|` over `|alpha| <= 3`.
    pub c3_sup: f64,
    pub bounds_ok: bool,
    pub c3_ok: bool,
    /// First lattice point (in x-major order) violating `[a_lo, a_hi]`.
    pub violation: Option<Violation>,
}

impl BoundsReport {
    pub fn passed(&self) -> bool {
        self.bounds_ok && self.c3_ok
    }
}

pub const DEFAULT_LATTICE: (usize, usize) = (201, 201);

/// Samples `a` on `[0, 1] x y_range` and checks it against `[a_lo, a_hi]`;
/// also samples every partial derivative up to total order three against
/// `c3_bound`.
pub fn validate_bounds(
    spec: &CoefficientSpec,
    y_range: (f64, f64),
    lattice: (usize, usize),
) -> Result<BoundsReport, ProblemError> {
    let (nx, ny) = lattice;
    if nx < 2 || ny < 2 {
        return Err(ProblemError::Bounds(format!("lattice needs >= 2 points per axis, got {lattice:?}")));
    }
    if !(y_range.0 <= y_range.1) {
        return Err(ProblemError::Bounds(format!("empty y range {y_range:?}")));
    }
    // all partials of total order <= 3
    let mut partials = vec![spec.a.clone()];
    let mut frontier = vec![(spec.a.clone(), 0usize)];
    for _ in 0..3 {
        let mut next = Vec::new();
        for (e, last) in &frontier {
            // x-derivatives before y-derivatives so each multi-index appears once
            for (k, v) in ["x", "y"].iter().enumerate().skip(*last) {
                let d = e.differentiate(v)?;
                partials.push(d.clone());
                next.push((d, k));
            }
        }
        frontier = next;
    }
    debug_assert_eq!(partials.len(), 10);

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut c3 = 0.0_f64;
    let mut violation = None;
    for ix in 0..nx {
        let x = ix as f64 / (nx - 1) as f64;
        for iy in 0..ny {
            let y = y_range.0 + (y_range.1 - y_range.0) * iy as f64 / (ny - 1) as f64;
            let v = spec.a.eval2(x, y)?;
            lo = lo.min(v);
            hi = hi.max(v);
            if violation.is_none() && (v < spec.a_lo || v > spec.a_hi) {
                violation = Some(Violation { x, y, value: v });
            }
            for p in &partials {
                c3 = c3.max(p.eval2(x, y)?.abs());
            }
        }
    }
    Ok(BoundsReport {
        y_range,
        lattice,
        sampled_min: lo,
        sampled_max: hi,
        c3_sup: c3,
        bounds_ok: violation.is_none(),
        c3_ok: c3 <= spec.c3_bound,
        violation,
    })
}

/// Corner residuals of the compatibility conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatibilityReport {
    /// `g0(0) - phi(0)`
    pub left: f64,
    /// `g1(0) - phi(1)`
    pub right: f64,
    /// `phi(0), phi(1), g0(0), g1(0)`
    pub corners: [f64; 4],
    pub compatible: bool,
    pub zero_corners: bool,
    pub strict: bool,
}

impl CompatibilityReport {
    pub fn passed(&self) -> bool {
        self.compatible && (!self.strict || self.zero_corners)
    }
}

pub fn check_compatibility(data: &DataSpec, strict_zero: bool) -> Result<CompatibilityReport, ProblemError> {
    let corners = [
        data.phi.eval1(0.0)?,
        data.phi.eval1(1.0)?,
        data.g0.eval1(0.0)?,
        data.g1.eval1(0.0)?,
    ];
    let left = corners[2] - corners[0];
    let right = corners[3] - corners[1];
    Ok(CompatibilityReport {
        left,
        right,
        corners,
        compatible: left.abs() <= CORNER_TOL && right.abs() <= CORNER_TOL,
        zero_corners: corners.iter().all(|c| c.abs() <= CORNER_TOL),
        strict: strict_zero,
    })
}

const RANGE_SAMPLES: usize = 2001;
const RANGE_FLOOR: f64 = 0.05;

/// Range of the data over the parabolic boundary, widened by 5% of its
/// length (at least 0.05) on each side. By the maximum principle the
/// solution stays inside.
pub fn solution_range(data: &DataSpec, horizon: f64) -> Result<(f64, f64), ProblemError> {
    if !(horizon > 0.0) {
        return Err(ProblemError::Horizon(horizon));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let n = RANGE_SAMPLES - 1;
    for i in 0..=n {
        let s = i as f64 / n as f64;
        for v in [
            data.phi.eval1(s)?,
            data.g0.eval1(s * horizon)?,
            data.g1.eval1(s * horizon)?,
        ] {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    let pad = (0.05 * (hi - lo)).max(RANGE_FLOOR);
    Ok((lo - pad, hi + pad))
}
