//! Local SGD over heterogeneous agents.
//!
//! The crate simulates multi-agent Local SGD with arbitrary communication
//! schedules, evaluates the convergence-rate bounds that govern it, and runs
//! seed-averaged experiments comparing measured trajectories against those
//! bounds.
//!
//! * [`objectives`]: synthetic objective families and their constants.
//! * [`schedules`]: local-step sequences and the conditions they must meet.
//! * [`engine`]: the seeded simulator and its metrics.
//! * [`bounds`]: right-hand sides of the rate bounds, term by term.
//! * [`harness`]: experiment protocols built on the above.
//! * [`config`], [`output`] and [`cli`]: JSON configs, CSV and plot-data
//!   files, command line.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod config;
pub mod engine;
pub mod error;
pub mod harness;
pub mod objectives;
pub mod output;
pub mod rng;
pub mod schedules;
pub mod vector;

pub use error::{Error, Result};
pub use vector::Vector;
