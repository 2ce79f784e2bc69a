//! Scenario files.
//!
//! A scenario is a TOML document with flat sections:
//!
//! ```toml
//! name = "heat-exact"
//! seed = 7                        # optional, default 0
//!
//! [coefficient]
//! a = "1 + 0*x + 0*y"             # expression in x, y
//! a_lo = 1.0
//! a_hi = 1.0
//! c3_bound = 1.0
//!
//! [data]
//! phi = "sin(pi*x)"               # expression in x
//! g0 = "0"                        # expressions in t
//! g1 = "0"
//! strict_corners = true           # optional, default true
//!
//! [numerics]
//! n_cells = 200
//! n_steps = 20                    # over the largest horizon
//! theta = 0.5                     # optional, default 0.5
//! picard_tol = 1e-10              # optional
//! picard_max = 50                 # optional
//!
//! [window]
//! c1 = 0.05
//! eps = 0.1
//! T = 0.1                         # or horizons = [1.0, 2.0, 4.0]
//! stable_from = 2.0               # optional: first horizon of saturation checks
//!
//! [strip]                         # optional
//! x1 = 0.45
//! x2 = 0.55
//!
//! [checks]
//! run = ["exact_error", "convergence"]   # or ["all"]
//!
//! [family]                        # optional: replace data by seeded instances
//! kind = "boundary"               # boundary | initial | full
//! count = 20
//!
//! [reference]                     # optional
//! exact = "exp(-pi^2*t)*sin(pi*x)"   # expression in t, x
//! tol = 1e-3
//! ```
//!
//! Unknown keys are rejected. `c1`, `eps`, `x1`, `x2` and the horizons are
//! snapped to grid nodes; the snapped values are what every report records.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{Expr, ExprError};
use crate::pde::SolverConfig;
use crate::problem::{
    check_compatibility, solution_range, validate_bounds, BoundsReport, CoefficientSpec, CompatibilityReport, DataSpec,
    EstimateWindow, ProblemError, ProblemSpec, DEFAULT_LATTICE,
};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("scenario syntax error at line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("scenario syntax error: {0}")]
    Format(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("admissibility bounds violated: {0}")]
    Admissibility(String),
    #[error("corner compatibility violated: {0}")]
    Compatibility(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientBlock {
    pub a: String,
    pub a_lo: f64,
    pub a_hi: f64,
    pub c3_bound: f64,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataBlock {
    pub phi: String,
    pub g0: String,
    pub g1: String,
    #[serde(default = "yes")]
    pub strict_corners: bool,
}

fn default_theta() -> f64 {
    0.5
}
fn default_tol() -> f64 {
    SolverConfig::default().picard_tol
}
fn default_max() -> usize {
    SolverConfig::default().picard_max
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsBlock {
    pub n_cells: usize,
    pub n_steps: usize,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "default_tol")]
    pub picard_tol: f64,
    #[serde(default = "default_max")]
    pub picard_max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowBlock {
    pub c1: f64,
    pub eps: f64,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizons: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stable_from: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StripBlock {
    pub x1: f64,
    pub x2: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksBlock {
    #[serde(default)]
    pub run: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    /// Zero initial data, random lateral data.
    Boundary,
    /// Random initial data, zero lateral data.
    Initial,
    /// Random initial data and smaller random lateral data.
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyBlock {
    pub kind: FamilyKind,
    pub count: usize,
}

fn default_ref_tol() -> f64 {
    1e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceBlock {
    pub exact: String,
    #[serde(default = "default_ref_tol")]
    pub tol: f64,
}

/// The file as written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub coefficient: CoefficientBlock,
    pub data: DataBlock,
    pub numerics: NumericsBlock,
    pub window: WindowBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strip: Option<StripBlock>,
    #[serde(default)]
    pub checks: ChecksBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceBlock>,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        toml::from_str(text).map_err(|e| match e.span() {
            Some(span) => ScenarioError::Syntax {
                line: text[..span.start.min(text.len())].matches('\n').count() + 1,
                msg: e.message().to_string(),
            },
            None => ScenarioError::Format(e.message().to_string()),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    Solver,
    ExactError,
    Convergence,
    Superposition,
    Frozen,
    MonotoneSplit,
    Lemma34,
    Barriers,
    BarriersInitial,
    Lemma5,
    Lemma6,
    Lemma7,
    Delta2,
    Decay,
    Sups,
    Theorems,
}

impl Check {
    pub const ALL: [Check; 16] = [
        Check::Solver,
        Check::ExactError,
        Check::Convergence,
        Check::Superposition,
        Check::Frozen,
        Check::MonotoneSplit,
        Check::Lemma34,
        Check::Barriers,
        Check::BarriersInitial,
        Check::Lemma5,
        Check::Lemma6,
        Check::Lemma7,
        Check::Delta2,
        Check::Decay,
        Check::Sups,
        Check::Theorems,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Solver => "solver",
            Check::ExactError => "exact_error",
            Check::Convergence => "convergence",
            Check::Superposition => "superposition",
            Check::Frozen => "frozen",
            Check::MonotoneSplit => "monotone_split",
            Check::Lemma34 => "lemma34",
            Check::Barriers => "barriers",
            Check::BarriersInitial => "barriers_initial",
            Check::Lemma5 => "lemma5",
            Check::Lemma6 => "lemma6",
            Check::Lemma7 => "lemma7",
            Check::Delta2 => "delta2",
            Check::Decay => "decay",
            Check::Sups => "sups",
            Check::Theorems => "theorems",
        }
    }

    pub fn from_name(s: &str) -> Option<Check> {
        Check::ALL.iter().copied().find(|c| c.name() == s)
    }

    /// Whether the check needs the three-way split and hence zero corners.
    pub fn needs_split(self) -> bool {
        !matches!(self, Check::Solver | Check::ExactError | Check::Convergence | Check::Frozen | Check::Sups)
    }
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub spec: ProblemSpec,
    pub cfg: SolverConfig,
    /// Window at the largest horizon, snapped to the grid.
    pub window: EstimateWindow,
    /// Snapped horizons, ascending.
    pub horizons: Vec<f64>,
    pub checks: Vec<Check>,
    pub reference: Option<Expr>,
    pub bounds: BoundsReport,
    pub compatibility: CompatibilityReport,
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Scenario::from_file(ScenarioFile::parse(&text)?)
}

fn snap(v: f64, h: f64) -> f64 {
    (v / h).round() * h
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario, ScenarioError> {
        Scenario::from_file(ScenarioFile::parse(text)?)
    }

    pub fn from_file(file: ScenarioFile) -> Result<Scenario, ScenarioError> {
        let num = &file.numerics;
        if num.n_cells < 4 || num.n_steps < 4 {
            return Err(ScenarioError::Invalid(format!(
                "need n_cells >= 4 and n_steps >= 4, got {} and {}",
                num.n_cells, num.n_steps
            )));
        }
        let cfg = SolverConfig {
            theta: num.theta,
            picard_tol: num.picard_tol,
            picard_max: num.picard_max,
        };
        cfg.validate().map_err(|e| ScenarioError::Invalid(e.to_string()))?;

        let mut horizons = match (&file.window.horizon, &file.window.horizons) {
            (Some(t), None) => vec![*t],
            (None, Some(ts)) if !ts.is_empty() => ts.clone(),
            (Some(_), Some(_)) => return Err(ScenarioError::Invalid("give either T or horizons, not both".into())),
            _ => return Err(ScenarioError::Invalid("window needs T or a non-empty horizons list".into())),
        };
        if horizons.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(ScenarioError::Invalid(format!("horizons must be positive, got {horizons:?}")));
        }
        horizons.sort_by(f64::total_cmp);
        horizons.dedup();
        let t_max = *horizons.last().expect("non-empty");
        let dt = t_max / num.n_steps as f64;
        let dx = 1.0 / num.n_cells as f64;
        let mut snapped: Vec<f64> = horizons.iter().map(|t| snap(*t, dt)).collect();
        *snapped.last_mut().expect("non-empty") = t_max;
        let c1 = snap(file.window.c1, dt);
        let eps = snap(file.window.eps, dx);
        if c1 <= 0.0 || c1 > snapped[0] {
            return Err(ScenarioError::Invalid(format!(
                "c1 = {} snaps to {c1}, which must lie in (0, {}]",
                file.window.c1, snapped[0]
            )));
        }
        let window = EstimateWindow::new(c1, eps, t_max)?;

        let coefficient = CoefficientSpec::parse(
            &file.coefficient.a,
            file.coefficient.a_lo,
            file.coefficient.a_hi,
            file.coefficient.c3_bound,
        )?;
        let data = DataSpec::parse(&file.data.phi, &file.data.g0, &file.data.g1)?;
        let spec = ProblemSpec::new(coefficient, data, t_max)?;

        let mut checks = Vec::new();
        for name in &file.checks.run {
            if name == "all" {
                // exact_error only where there is something to compare with
                let has_ref = file.reference.is_some();
                checks.extend(Check::ALL.into_iter().filter(|c| has_ref || *c != Check::ExactError));
            } else {
                checks.push(Check::from_name(name).ok_or_else(|| ScenarioError::UnknownCheck(name.clone()))?);
            }
        }
        checks.sort();
        checks.dedup();
        let reference = match &file.reference {
            Some(r) => Some(Expr::parse(&r.exact, &["t", "x"])?),
            None => None,
        };
        if checks.contains(&Check::ExactError) && reference.is_none() {
            return Err(ScenarioError::Invalid("check `exact_error` needs a [reference] block".into()));
        }

        let compatibility = check_compatibility(&spec.data, file.data.strict_corners)?;
        let bounds = validate_spec(&spec, &compatibility)?;
        Ok(Scenario {
            file,
            spec,
            cfg,
            window,
            horizons: snapped,
            checks,
            reference,
            bounds,
            compatibility,
        })
    }

    pub fn name(&self) -> &str {
        &self.file.name
    }

    pub fn seed(&self) -> u64 {
        self.file.seed
    }

    pub fn n_cells(&self) -> usize {
        self.file.numerics.n_cells
    }

    pub fn n_steps(&self) -> usize {
        self.file.numerics.n_steps
    }

    /// Horizons at and beyond `stable_from` (all of them by default).
    pub fn saturation_horizons(&self) -> Vec<f64> {
        let from = self.file.window.stable_from.unwrap_or(f64::NEG_INFINITY);
        self.horizons.iter().copied().filter(|t| *t >= from - 1e-12).collect()
    }

    /// Same scenario with different numerics, re-validated.
    pub fn with_numerics(&self, f: impl FnOnce(&mut NumericsBlock)) -> Result<Scenario, ScenarioError> {
        let mut file = self.file.clone();
        f(&mut file.numerics);
        Scenario::from_file(file)
    }

    /// Grid refined `k` times by halving both `dx` and `dt`.
    pub fn refined(&self, k: u32) -> Result<Scenario, ScenarioError> {
        self.with_numerics(|n| {
            n.n_cells <<= k;
            n.n_steps <<= k;
        })
    }
}

fn validate_spec(spec: &ProblemSpec, compat: &CompatibilityReport) -> Result<BoundsReport, ScenarioError> {
    if !compat.compatible {
        return Err(ScenarioError::Compatibility(format!(
            "g0(0) - phi(0) = {:e}, g1(0) - phi(1) = {:e}",
            compat.left, compat.right
        )));
    }
    if compat.strict && !compat.zero_corners {
        return Err(ScenarioError::Compatibility(format!(
            "strict corners require phi(0), phi(1), g0(0), g1(0) all zero, got {:?}",
            compat.corners
        )));
    }
    let range = solution_range(&spec.data, spec.horizon)?;
    let bounds = validate_bounds(&spec.coefficient, range, DEFAULT_LATTICE)?;
    if let Some(v) = &bounds.violation {
        return Err(ScenarioError::Admissibility(format!(
            "a({}, {}) = {} outside [{}, {}]",
            v.x, v.y, v.value, spec.coefficient.a_lo, spec.coefficient.a_hi
        )));
    }
    if !bounds.c3_ok {
        return Err(ScenarioError::Admissibility(format!(
            "sampled C3 norm {} exceeds the claimed bound {}",
            bounds.c3_sup, spec.coefficient.c3_bound
        )));
    }
    Ok(bounds)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ZERO: &str = r#"
name = "zero"

[coefficient]
a = "1 + 0.5*tanh(y)"
a_lo = 0.5
a_hi = 1.5
c3_bound = 10

[data]
phi = "0"
g0 = "0"
g1 = "0"

[numerics]
n_cells = 20
n_steps = 20

[window]
c1 = 0.1
eps = 0.1
T = 1.0

[checks]
run = ["all"]
"#;

    #[test]
    fn loads_minimal_zero_scenario() {
        let s = Scenario::parse(ZERO).unwrap();
        assert_eq!(s.name(), "zero");
        assert_eq!(s.checks.len(), Check::ALL.len() - 1);
        assert!(s.bounds.passed() && s.compatibility.passed());
        assert_eq!(s.horizons, vec![1.0]);
        assert_eq!(s.cfg, SolverConfig::default());
    }

    #[test]
    fn rejects_incompatible_corners() {
        let text = ZERO.replace(r#"g0 = "0""#, r#"g0 = "1""#).replace("run = [\"all\"]", "run = [\"solver\"]");
        assert!(matches!(Scenario::parse(&text), Err(ScenarioError::Compatibility(_))));
    }

    #[test]
    fn rejects_bound_violations_and_unknown_things() {
        let text = ZERO.replace("a_lo = 0.5", "a_lo = 0.9");
        let text = text.replace(r#"phi = "0""#, r#"phi = "-2*sin(pi*x)""#);
        assert!(matches!(Scenario::parse(&text), Err(ScenarioError::Admissibility(_))));
        let text = ZERO.replace("run = [\"all\"]", "run = [\"lemma99\"]");
        assert!(matches!(Scenario::parse(&text), Err(ScenarioError::UnknownCheck(_))));
        let text = ZERO.replace("eps = 0.1", "eps = 0.1\ncolour = 3");
        match Scenario::parse(&text) {
            Err(ScenarioError::Syntax { line, .. }) => assert_eq!(line, 22),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn snaps_window_to_nodes() {
        let text = ZERO.replace("c1 = 0.1", "c1 = 0.123").replace("eps = 0.1", "eps = 0.13");
        let s = Scenario::parse(&text).unwrap();
        assert!((s.window.c1 - 0.1).abs() < 1e-15);
        assert!((s.window.eps - 0.15).abs() < 1e-15);
    }

    #[test]
    fn round_trips_through_toml() {
        let s = Scenario::parse(ZERO).unwrap();
        let again = ScenarioFile::parse(&s.file.to_toml()).unwrap();
        assert_eq!(again, s.file);
    }
}
