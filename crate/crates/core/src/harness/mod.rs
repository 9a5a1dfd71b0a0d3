//! End-to-end experiments: configuration, simulation, analysis and output.

mod config;
mod output;
mod plot;
mod run;

pub use config::{CostSpec, FChoice, GraphSource, RunConfig, StepOffset};
pub use output::{manifest_text, read_regret_csv, write_outputs, RegretRow, SOFTWARE_VERSION};
pub use plot::{emit_plot, render_svg, PlotOptions, Series};
pub use run::{run_experiment, Analysis, Experiment, MatrixSummary, Realized, BOUND_SAFETY_FACTOR, SPREAD_WINDOW};
