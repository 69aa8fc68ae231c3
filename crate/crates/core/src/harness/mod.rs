//! Instance generation, experiment sweeps and their CSV/JSON outputs.

mod experiment;
mod generate;

pub use experiment::{
    execute, run, seeded_set, write_outputs, BogolyubovRow, ExperimentReport, ExperimentSpec, InputRate,
    InstanceSource, QueryStats, Row, Suite, MAX_ROWS,
};
pub use generate::{generate_instance, GenParams, InstanceKind};
