//! Grid convergence studies.

use thiserror::Error;

use crate::estimates::{lhs_theorem2, theorem1_profile};
use crate::pde::solve_quasilinear;
use crate::report::{Constant, EstimateReport, GridParams, Status};

use super::run::{grids, max_error};
use super::scenario::{Scenario, ScenarioError};

#[derive(Debug, Error)]
pub enum ConvergenceError {
    #[error("a convergence study needs at least 3 levels, got {0}")]
    Levels(usize),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("level {level}: {msg}")]
    Level { level: usize, msg: String },
}

/// Observed order required of the solution error: second order for the
/// trapezoidal scheme, first order otherwise (dx and dt are halved together).
pub fn required_order(theta: f64) -> f64 {
    if theta == 0.5 {
        1.9
    } else {
        0.95
    }
}

/// Required order of the estimate functionals.
pub const FUNCTIONAL_ORDER: f64 = 0.9;

/// Differences below this fraction of the functional's size count as
/// degenerate.
const DEGENERATE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub n_cells: usize,
    pub n_steps: usize,
    /// Max-norm error against the reference, when there is one.
    pub error: Option<f64>,
    /// `max_x ∫_{c1}^T |W_t|` at the largest horizon.
    pub theorem1_lhs: f64,
    /// `∫∫_S |W_tx|` at the largest horizon.
    pub theorem2_lhs: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub levels: Vec<Level>,
    pub reports: Vec<EstimateReport>,
}

/// Solves at `levels` dyadic refinements of the scenario's grid and reports
/// observed orders: against the reference solution if the scenario has one,
/// and by Richardson's rule on consecutive differences for the estimate
/// functionals.
pub fn convergence_study(sc: &Scenario, levels: usize) -> Result<ConvergenceStudy, ConvergenceError> {
    if levels < 3 {
        return Err(ConvergenceError::Levels(levels));
    }
    let mut out = Vec::with_capacity(levels);
    for k in 0..levels {
        let fine = sc.refined(k as u32)?;
        let err = |msg: String| ConvergenceError::Level { level: k, msg };
        let (g, tg) = grids(&fine).map_err(|e| err(e.to_string()))?;
        let sol = solve_quasilinear(&fine.spec, g, tg, &fine.cfg).map_err(|e| err(e.to_string()))?;
        let error = match &fine.reference {
            Some(exact) => Some(max_error(&sol.w, exact).map_err(|e| err(e.to_string()))?),
            None => None,
        };
        let profile = theorem1_profile(&sol.w, &fine.window).map_err(|e| err(e.to_string()))?;
        out.push(Level {
            n_cells: fine.n_cells(),
            n_steps: fine.n_steps(),
            error,
            theorem1_lhs: profile.into_iter().fold(0.0, f64::max),
            theorem2_lhs: lhs_theorem2(&sol.w, &fine.window).map_err(|e| err(e.to_string()))?,
        });
    }

    let finest = out.last().expect("levels >= 3");
    let grid = GridParams {
        theta: sc.cfg.theta,
        n_cells: finest.n_cells,
        n_steps: finest.n_steps,
    };
    let mut reports = Vec::new();
    if let Some(errors) = out.iter().map(|l| l.error).collect::<Option<Vec<f64>>>() {
        let floor = DEGENERATE * sc.spec.data.phi.eval1(0.5).map(f64::abs).unwrap_or(0.0).max(1e-300);
        let k = errors.len();
        reports.push(order_report(
            "convergence.solution",
            errors[k - 2],
            errors[k - 1],
            floor.max(1e-14),
            required_order(sc.cfg.theta),
            &errors,
        ));
    }
    for (name, values) in [
        ("convergence.theorem1", out.iter().map(|l| l.theorem1_lhs).collect::<Vec<_>>()),
        ("convergence.theorem2", out.iter().map(|l| l.theorem2_lhs).collect::<Vec<_>>()),
    ] {
        let k = values.len();
        let (d1, d2) = ((values[k - 2] - values[k - 3]).abs(), (values[k - 1] - values[k - 2]).abs());
        let size = values[k - 1].abs();
        reports.push(order_report(name, d1, d2, DEGENERATE * size.max(1.0), FUNCTIONAL_ORDER, &values));
    }
    for r in &mut reports {
        r.grid = Some(grid);
        r.window = Some(sc.window);
    }
    Ok(ConvergenceStudy { levels: out, reports })
}

/// `lhs` is the required order and `rhs` the observed `log2(coarse / fine)`,
/// so the report passes when the observed order is at least the required one.
fn order_report(name: &str, coarse: f64, fine: f64, floor: f64, required: f64, values: &[f64]) -> EstimateReport {
    let list = values.iter().map(|v| format!("{v:.6e}")).collect::<Vec<_>>().join(" ");
    if coarse <= floor && fine <= floor {
        return EstimateReport::bound(name, required, f64::NAN, Constant::None, 0.0)
            .with_status(Status::Indeterminate)
            .with_note(format!("degenerate: differences at roundoff; values {list}"));
    }
    let observed = if fine <= 0.0 { f64::INFINITY } else { (coarse / fine).log2() };
    EstimateReport::bound(name, required, observed, Constant::None, 0.0).with_note(format!("values {list}"))
}
