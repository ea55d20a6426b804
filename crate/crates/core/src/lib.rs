//! Link-level Monte Carlo simulation of multi-carrier THz downlinks under
//! antenna misalignment fading and local-oscillator phase noise.
//!
//! The per-carrier channel is `h_k = h_l · h_p · h_f`: a deterministic path
//! gain ([`channel`]), a pointing-error coefficient ([`misalignment`]) and a
//! Nakagami-m fading amplitude ([`fading`]). Phase noise leaks power between
//! adjacent carriers ([`phase_noise`]); [`engine`] turns channel draws into
//! SINR and outage estimates, and [`experiments`] drives the parameter sweeps.

// `!(x > 0.0)` is used on purpose so NaN lands on the rejecting side.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod config;
pub mod engine;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod fading;
pub mod grid;
pub mod misalignment;
pub mod phase_noise;
pub mod quadrature;
pub mod rng;
pub mod stats;

pub use config::{build_grid, threshold_from_rate, validate_config, ConfigFile, SystemConfig, ThresholdMode};
pub use engine::{run_average_sinr, run_outage, semi_analytic_op_no_phn, ChannelRealization, LinkModel};
pub use error::{Error, Result};
pub use exec::Execution;
pub use grid::CarrierGrid;
pub use stats::MetricEstimate;
