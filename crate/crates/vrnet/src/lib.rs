//! Performance modelling toolkit for VR video streaming over UDP/Ethernet.
//!
//! Three layers share one parameter vocabulary:
//!
//! - [`model`]: the closed-form link model, with per-packet latency composed
//!   of serialization, propagation, switch and processing delays, plus
//!   throughput, VR frame fragmentation and utilization.
//! - [`sim`]: a deterministic discrete-event simulation of a full session
//!   (establishment, acknowledged streaming with health checks, teardown)
//!   that cross-validates the closed form.
//! - [`sweep`]: single-parameter experiment series over the model, with CSV
//!   output in [`csv`] and a flat key/value config format in [`config`].
//!
//! The `vrnet` binary in [`cli`] exposes all of it as `eval`, `sweep` and
//! `sim` subcommands.

#![forbid(unsafe_code)]

pub mod cli;
pub mod config;
pub mod csv;
pub mod model;
pub mod sim;
pub mod sweep;

pub use config::{load_config, parse_config, render_config, ConfigError, RunConfig};
pub use model::{
    evaluate, HeaderStack, InvalidParameter, LinkParams, PerfMetrics, SystemParams, VRWorkload,
};
pub use sim::{
    control_overhead, run_session, validate_against_model, SessionConfig, SimError, SimStats,
    StreamingMode, ValidationReport,
};
pub use sweep::{baseline_config, sweep, SweepParameter, SweepPoint, SweepSeries, SweepSpec};
