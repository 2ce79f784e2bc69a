//! Scenario files, orchestration of solves and checks, seeded families,
//! convergence studies and CSV output.

pub mod battery;
pub mod convergence;
pub mod family;
pub mod output;
pub mod run;
pub mod scenario;

pub use convergence::{convergence_study, ConvergenceStudy};
pub use family::{generate_family, run_family};
pub use output::{reports_csv, write_outputs};
pub use run::{run, RunResult};
pub use scenario::{load_scenario, Check, FamilyKind, Scenario, ScenarioError};
