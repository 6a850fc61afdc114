//! Scenario-driven numerical certification of Moebius-geometric structures.
//!
//! A scenario file names gallery examples, an optional Moebius transform or
//! partner example, a sample grid, and a list of checks. Running it produces
//! a JSON report of residual statistics against per-check tolerances.

pub mod checks;
pub mod report;
pub mod scenario;

pub use checks::run_scenario;
pub use report::Report;
pub use scenario::{RunOptions, Scenario};
