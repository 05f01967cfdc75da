//! Simulation of two partly diffusive Hindmarsh-Rose neurons coupled
//! through their membrane potentials, with checkers for the absorbing-set
//! and synchronization estimates.
//!
//! ```
//! use hr_sync::{compute_sync_threshold, Parameters};
//!
//! let p_star = compute_sync_threshold(&Parameters::test_set()).unwrap();
//! assert_eq!(p_star, 5.0);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod initial;
pub mod integrator;
pub mod model;
pub mod output;

pub use config::{parse_run_config, GridSpec, RunConfig};
pub use diagnostics::{BoundReport, TimeSeriesRecord};
pub use dynamics::PairState;
pub use error::{Error, Result};
pub use experiments::ExperimentReport;
pub use grid::{make_grid, Grid, ScalarField};
pub use initial::{generate_initial_condition, Generator, InitialSpec};
pub use integrator::{Scheme, Simulation, StepperConfig, Trajectory};
pub use model::{
    compute_absorb_entry_time, compute_absorbing_constants, compute_delta_mu,
    compute_sync_threshold, DerivedConstants, Parameters, Preset,
};
