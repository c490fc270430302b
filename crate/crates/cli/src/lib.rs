//! Command-line frontend for `qip-core`: project states, compute interaction
//! ladders, sweep white-noise mixtures and validate inputs.
//!
//! Exit codes: 0 on success, 1 on numerical failure, 2 on invalid input,
//! 3 when a projection diverged (its best finite iterate is still printed).

pub mod commands;
pub mod error;
pub mod input;
pub mod output;
pub mod sweep;

pub use commands::{cmd_measures, cmd_project, cmd_sweep, cmd_validate};
pub use error::{CliError, Status};
pub use input::{ConfigOverrides, RunOptions, SymmetryChoice, SymmetrySpec};
pub use sweep::{run_sweep, SweepSpec, SweepTable};
