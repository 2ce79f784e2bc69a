//! CSV output: `reports.csv`, `fields/*.csv` and `plotdata/*.csv`.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::report::EstimateReport;

use super::run::{PlotData, RunResult};

pub const REPORT_COLUMNS: [&str; 14] = [
    "scenario",
    "check",
    "lhs",
    "rhs",
    "constant_used",
    "margin",
    "pass",
    "theta",
    "n_cells",
    "n_steps",
    "c1",
    "eps",
    "T",
    "seed",
];

/// One row per report. Floats use the shortest representation that reads
/// back to the same value; empty cells mean "not applicable".
pub fn write_reports<W: Write>(out: W, runs: &[RunResult]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_COLUMNS)?;
    for run in runs {
        for r in &run.reports {
            w.write_record(report_row(&run.scenario, run.seed, r))?;
        }
    }
    w.flush()?;
    Ok(())
}

fn f(v: f64) -> String {
    // no signed zeros in the table
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:?}")
}

pub fn report_row(scenario: &str, seed: u64, r: &EstimateReport) -> Vec<String> {
    let (theta, n_cells, n_steps) = match r.grid {
        Some(g) => (f(g.theta), g.n_cells.to_string(), g.n_steps.to_string()),
        None => Default::default(),
    };
    let (c1, eps, t) = match r.window {
        Some(w) => (f(w.c1), f(w.eps), f(w.horizon)),
        None => Default::default(),
    };
    let constant = match r.constant.value() {
        Some(v) if matches!(r.constant, crate::report::Constant::Fitted(_)) => format!("fitted:{v:?}"),
        Some(v) => f(v),
        None => String::new(),
    };
    vec![
        scenario.to_string(),
        r.name.clone(),
        f(r.lhs),
        f(r.rhs),
        constant,
        f(r.margin()),
        r.status.as_str().to_string(),
        theta,
        n_cells,
        n_steps,
        c1,
        eps,
        t,
        seed.to_string(),
    ]
}

pub fn write_plot<W: Write>(out: W, p: &PlotData) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&p.columns)?;
    for row in &p.rows {
        w.write_record(row.iter().map(|v| f(*v)))?;
    }
    w.flush()?;
    Ok(())
}

fn to_io(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

/// Writes `reports.csv`, the solution fields and the plot tables of `runs`
/// under `dir`.
pub fn write_outputs(dir: &Path, runs: &[RunResult], with_fields: bool) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    write_reports(fs::File::create(dir.join("reports.csv"))?, runs).map_err(to_io)?;
    let plots = dir.join("plotdata");
    fs::create_dir_all(&plots)?;
    for run in runs {
        for p in &run.plots {
            write_plot(fs::File::create(plots.join(format!("{}.csv", p.name)))?, p).map_err(to_io)?;
        }
    }
    if with_fields {
        let fields = dir.join("fields");
        fs::create_dir_all(&fields)?;
        for run in runs {
            if let Some(sol) = &run.solution {
                for (tag, field) in [("W", &sol.w), ("abar", &sol.abar)] {
                    let file = io::BufWriter::new(fs::File::create(fields.join(format!("{}_{tag}.csv", run.scenario)))?);
                    field.write_csv(file).map_err(io::Error::other)?;
                }
            }
        }
    }
    Ok(())
}

/// `reports.csv` contents as a string.
pub fn reports_csv(runs: &[RunResult]) -> String {
    let mut buf = Vec::new();
    write_reports(&mut buf, runs).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}
