//! Optimal-execution simulator.
//!
//! A broker liquidates a block of shares under linear permanent and
//! temporary price impact. The crate provides:
//!
//! * the market dynamics and the performance mark ([`model`]);
//! * the selling strategies: drift-maximizing barrier-target feedback,
//!   the classical finite-horizon schedule, and the running-penalty
//!   schedule ([`strategies`]);
//! * closed-form success probabilities and value functions
//!   ([`closed_form`]);
//! * a deterministic parallel Monte Carlo engine with composable stopping
//!   rules ([`sim`]);
//! * batch estimators ([`stats`]) and named experiment presets emitting
//!   plot-ready CSV/JSON ([`experiments`], [`config`]).
//!
//! Batches are reproducible bit for bit: path `i` draws from a
//! counter-based stream that depends only on `(master_seed, i)`, so worker
//! count never changes results.

pub mod closed_form;
pub mod config;
pub mod experiments;
pub mod model;
pub mod presets;
pub mod sim;
pub mod stats;
pub mod strategies;

pub use closed_form::{barrier_value, h2_closed_form, lambda_p1, lambda_p1prime, BarrierValueFn};
pub use config::{parse_config, ExperimentPreset, RunConfig};
pub use model::{MarketState, ModelParams, PerformanceSpec};
pub use sim::{run_batch, simulate_path, PathResult, SeedSpec, SimSpec, StopCause, StoppingRules};
pub use stats::{hitting_probabilities, moment_table, terminal_histogram, ExperimentReport};
pub use strategies::{AcCoefficients, Strategy, StrategyKind};
