//! Scaling experiments: size grids, per-cell population bisection, CSV and
//! JSON results, power-law fits and plot tables.

mod fit;
mod report;
mod spec;

pub use fit::{fit_power_law, PowerLawFit};
pub use report::{
    emit_plot_data, run_cells, run_experiment, write_artifacts, Artifacts, CellResult, FitQuantity, FitRow, ScalingReport,
    CSV_HEADER,
};
pub use spec::{parse_list, ExperimentSpec, ProblemFamily};
