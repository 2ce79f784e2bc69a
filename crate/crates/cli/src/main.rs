use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use qlbv::harness::battery::{gronwall_battery, poincare_battery};
use qlbv::harness::family::expand;
use qlbv::harness::output::write_outputs;
use qlbv::harness::run::RunResult;
use qlbv::harness::{convergence_study, generate_family, load_scenario, run, run_family, Check, FamilyKind, Scenario};
use qlbv::report::{EstimateReport, Status};

#[derive(Parser)]
#[command(name = "qlbv", version, about = "Solve W_t = a(x, W) W_xx and check interior estimates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file.
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the time-stepping parameter.
    #[arg(long)]
    theta: Option<f64>,
    /// Halve dx and dt this many times.
    #[arg(long, default_value_t = 0)]
    refine: u32,
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the scenario and write the solution fields.
    Solve(Common),
    /// Run the scenario's checks (over its family, if it declares one).
    Verify(Common),
    /// Grid convergence study.
    Convergence {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
    /// Run the checks over a seeded family built from the scenario.
    Family {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, value_parser = ["boundary", "initial", "full"])]
        kind: Option<String>,
    },
    /// Seeded batteries for the Gronwall and Poincare lemmas.
    Appendix {
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
}

fn load(c: &Common) -> Result<Scenario> {
    let sc = load_scenario(&c.scenario).with_context(|| format!("loading {}", c.scenario.display()))?;
    let mut file = sc.file.clone();
    if let Some(theta) = c.theta {
        file.numerics.theta = theta;
    }
    if let Some(seed) = c.seed {
        file.seed = seed;
    }
    file.numerics.n_cells <<= c.refine;
    file.numerics.n_steps <<= c.refine;
    Ok(Scenario::from_file(file)?)
}

fn summarize(reports: impl IntoIterator<Item = (String, EstimateReport)>) -> bool {
    let (mut pass, mut fail, mut other) = (0, 0, 0);
    for (scenario, r) in reports {
        match r.status {
            Status::Pass => pass += 1,
            Status::Fail => {
                fail += 1;
                println!("FAIL {scenario} {}: lhs {:e} rhs {:e} {}", r.name, r.lhs, r.rhs, r.note);
            }
            Status::Indeterminate | Status::Inapplicable => other += 1,
        }
    }
    println!("{pass} passed, {fail} failed, {other} indeterminate or inapplicable");
    fail == 0
}

fn finish(out: &PathBuf, runs: &[RunResult], fields: bool) -> Result<bool> {
    write_outputs(out, runs, fields).with_context(|| format!("writing to {}", out.display()))?;
    for r in runs {
        if let Some(d) = &r.diagnostics {
            eprintln!(
                "{}: picard max {} total {}, relative residual {:.3e}, {:.2?}",
                r.scenario, d.max_picard, d.total_picard, d.relative_residual, r.wall_time
            );
        }
    }
    Ok(summarize(
        runs.iter().flat_map(|r| r.reports.iter().map(|x| (r.scenario.clone(), x.clone()))),
    ))
}

fn main_inner() -> Result<bool> {
    match Cli::parse().command {
        Command::Solve(c) => {
            let mut sc = load(&c)?;
            sc.checks = vec![Check::Solver];
            finish(&c.out, &[run(&sc)], true)
        }
        Command::Verify(c) => {
            let sc = load(&c)?;
            let members = expand(&sc, c.seed)?;
            let fields = members.len() == 1;
            finish(&c.out, &run_family(&members), fields)
        }
        Command::Convergence { common, levels } => {
            let sc = load(&common)?;
            let study = convergence_study(&sc, levels)?;
            for l in &study.levels {
                println!(
                    "{:>6} cells {:>6} steps  error {:>12}  theorem1 {:.9e}  theorem2 {:.9e}",
                    l.n_cells,
                    l.n_steps,
                    l.error.map(|e| format!("{e:.3e}")).unwrap_or_else(|| "-".into()),
                    l.theorem1_lhs,
                    l.theorem2_lhs
                );
            }
            let result = RunResult {
                scenario: sc.name().to_string(),
                seed: sc.seed(),
                reports: study.reports,
                solution: None,
                diagnostics: None,
                plots: Vec::new(),
                wall_time: Default::default(),
            };
            finish(&common.out, &[result], false)
        }
        Command::Family { common, count, kind } => {
            let sc = load(&common)?;
            let kind = match kind.as_deref() {
                Some("boundary") => FamilyKind::Boundary,
                Some("initial") => FamilyKind::Initial,
                Some("full") => FamilyKind::Full,
                _ => match &sc.file.family {
                    Some(f) => f.kind,
                    None => bail!("give --kind or a [family] block"),
                },
            };
            let members = generate_family(common.seed.unwrap_or(sc.seed()), count, &sc, kind)?;
            finish(&common.out, &run_family(&members), false)
        }
        Command::Appendix { out, seed, count } => {
            let mut reports = gronwall_battery(seed, count, 4.0, 800)?;
            reports.extend(poincare_battery(seed, count, 20, 16)?);
            let result = RunResult {
                scenario: "appendix".into(),
                seed,
                reports,
                solution: None,
                diagnostics: None,
                plots: Vec::new(),
                wall_time: Default::default(),
            };
            finish(&out, &[result], false)
        }
    }
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
