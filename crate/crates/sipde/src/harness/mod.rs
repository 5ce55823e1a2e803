//! Benchmark registry, convergence-study driver, table emission, and
//! reference-table reproduction sweeps.

mod cases;
mod runner;
mod table;

pub mod acceptance;
pub mod reference_data;
pub mod sweep;

pub use cases::{test_case, CaseId, SpatialConfig, TestCase};
pub use runner::{
    integrate, run_convergence_study, timestep_rule, ConvergenceRow, ConvergenceTable, DtRule,
    Integrator, RunConfig, RunOutcome,
};
pub use table::{emit_table, format_sci, parse_table, TableFormat};
