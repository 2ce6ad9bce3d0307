//! A small scaling sweep on onemax for both models. Writes the CSV, JSON and
//! plot tables to a directory given as the first argument (default
//! `sweep-out`) and prints the fitted exponents.

use std::path::PathBuf;

use rbmeda::experiment::{run_experiment, ExperimentSpec, ProblemFamily};
use rbmeda::ModelKind;

fn main() -> rbmeda::Result<()> {
    let out = std::env::args().nth(1).map_or_else(|| PathBuf::from("sweep-out"), PathBuf::from);
    let mut spec = ExperimentSpec::new("onemax", ProblemFamily::OneMax, vec![20, 30, 40], vec![ModelKind::Rbm, ModelKind::Boa], 7);
    spec.criterion.runs_per_trial = 5;
    spec.out_dir = out;

    let (report, artifacts) = run_experiment(&spec, |cell| {
        eprintln!("{} l={} pop={:?}", cell.model, cell.size, cell.pop_size);
    })?;
    print!("{}", report.summary());
    for path in std::iter::once(&artifacts.csv).chain(&artifacts.plots) {
        println!("wrote {}", path.display());
    }
    Ok(())
}
