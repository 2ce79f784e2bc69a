//! Result records shared by the estimate and appendix checks.

use std::fmt;

use crate::problem::EstimateWindow;

/// The constant a report's right-hand side was formed with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Constant {
    /// Stated in closed form by the inequality itself.
    Explicit(f64),
    /// Measured from the data: the smallest value making the bound hold.
    Fitted(f64),
    None,
}

impl Constant {
    pub fn value(&self) -> Option<f64> {
        match self {
            Constant::Explicit(v) | Constant::Fitted(v) => Some(*v),
            Constant::None => None,
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Explicit(v) => write!(f, "{v:e}"),
            Constant::Fitted(v) => write!(f, "fitted:{v:e}"),
            Constant::None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Both sides degenerate (typically 0/0); nothing was tested.
    Indeterminate,
    /// The hypothesis of the statement does not hold for this input.
    Inapplicable,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Indeterminate => "indeterminate",
            Status::Inapplicable => "inapplicable",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridParams {
    pub theta: f64,
    pub n_cells: usize,
    pub n_steps: usize,
}

/// One checked inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: Constant,
    /// Relative allowance: pass iff `lhs <= rhs * (1 + slack) + abs_tol`.
    pub slack: f64,
    pub abs_tol: f64,
    pub status: Status,
    pub window: Option<EstimateWindow>,
    pub grid: Option<GridParams>,
    pub note: String,
}

impl EstimateReport {
    pub fn bound(name: impl Into<String>, lhs: f64, rhs: f64, constant: Constant, slack: f64) -> Self {
        Self::bound_abs(name, lhs, rhs, constant, slack, 0.0)
    }

    pub fn bound_abs(name: impl Into<String>, lhs: f64, rhs: f64, constant: Constant, slack: f64, abs_tol: f64) -> Self {
        let ok = lhs <= rhs * (1.0 + slack) + abs_tol;
        EstimateReport {
            name: name.into(),
            lhs,
            rhs,
            constant,
            slack,
            abs_tol,
            status: if ok { Status::Pass } else { Status::Fail },
            window: None,
            grid: None,
            note: String::new(),
        }
    }

    pub fn with_status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }

    pub fn with_window(mut self, window: EstimateWindow) -> Self {
        self.window = Some(window);
        self
    }

    pub fn with_grid(mut self, grid: GridParams) -> Self {
        self.grid = Some(grid);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Spread `(max - min) / max` of nonnegative values; zero when all vanish.
pub fn relative_variation(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if values.is_empty() || max <= 0.0 {
        return 0.0;
    }
    (max - min) / max
}

/// Stability of a fitted constant across a family: `lhs` is the relative
/// variation, `rhs` the allowed threshold.
pub fn stability_report(name: impl Into<String>, values: &[f64], threshold: f64) -> EstimateReport {
    let spread = relative_variation(values);
    let list = values.iter().map(|v| format!("{v:.6e}")).collect::<Vec<_>>().join(" ");
    EstimateReport::bound(name, spread, threshold, Constant::None, 0.0).with_note(format!("values: {list}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_rule_uses_slack() {
        assert!(EstimateReport::bound("a", 1.01, 1.0, Constant::Explicit(1.0), 0.02).passed());
        assert!(!EstimateReport::bound("a", 1.03, 1.0, Constant::Explicit(1.0), 0.02).passed());
        assert!(EstimateReport::bound_abs("a", 1e-15, 0.0, Constant::None, 0.0, 1e-12).passed());
        assert_eq!(EstimateReport::bound("a", 1.0, 3.0, Constant::None, 0.0).margin(), 2.0);
    }

    #[test]
    fn variation() {
        assert_eq!(relative_variation(&[]), 0.0);
        assert_eq!(relative_variation(&[0.0, 0.0]), 0.0);
        assert!((relative_variation(&[2.0, 1.5, 1.8]) - 0.25).abs() < 1e-15);
        let r = stability_report("s", &[1.0, 1.1], 0.2);
        assert!(r.passed());
        assert!(!stability_report("s", &[1.0, 2.0], 0.2).passed());
    }

    #[test]
    fn constant_display() {
        assert_eq!(Constant::Explicit(1.0).to_string(), "1e0");
        assert_eq!(Constant::Fitted(0.5).to_string(), "fitted:5e-1");
        assert_eq!(Constant::None.to_string(), "");
    }
}
