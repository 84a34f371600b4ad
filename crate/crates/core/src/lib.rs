//! Simulation and analysis toolkit for the NDS chaotic spiking neuron and the
//! Rössler system it is derived from.
//!
//! The crate is organised bottom-up:
//!
//! - [`types`]: state triples, parameter bundles, feedback and input
//!   configuration, and the [`Trace`] container.
//! - [`integrators`]: the continuous Rössler field with an RK4 reference
//!   integrator, the Euler-forward discrete Rössler map, the sign-flipped
//!   NDS-form map, and the time-step bound.
//! - [`neuron`]: the full NDS neuron with threshold reset, delayed
//!   self-feedback and external input.
//! - [`analysis`]: fixed points, Jacobians, closed-form 3×3 eigenvalues and
//!   fixed-point classification.
//! - [`upo`]: period detection, orbit signatures, ensembles, parameter sweeps
//!   and feedback calibration.
//!
//! Batch workloads (ensembles, sweeps, calibration) run on rayon when the
//! `parallel` feature is enabled and fall back to a sequential loop otherwise.
//! Results are identical either way.

pub mod analysis;
pub mod error;
pub mod exec;
pub mod integrators;
pub mod neuron;
pub mod types;
pub mod upo;

pub use error::{Error, Result};
pub use exec::Execution;
pub use types::{
    default_nds_params, default_rossler_params, FeedbackConfig, FeedbackConnection,
    InputTrains, NdsParams, RosslerParams, RunOutcome, State3, Trace, DIVERGENCE_THRESHOLD,
};
