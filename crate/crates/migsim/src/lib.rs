//! Deterministic link- and system-level simulator for studying 4G-to-5G
//! network migration: MIMO spectral efficiency, carrier aggregation with
//! water-filling, sub-6 GHz and mmWave propagation, hexagonal-grid
//! interference and coverage, spectrum refarming policies, access-latency
//! budgets, and a Monte Carlo engine that aggregates KPIs with 95%
//! confidence intervals.
//!
//! Everything is reproducible: a scenario is a pure function of its config
//! (seed included), and results do not depend on thread count. Random
//! draws are keyed by `(seed, drop, link, purpose)` so any slice of a run
//! can be replayed in isolation.
//!
//! ```
//! use migsim::config::preset;
//! use migsim::simulation::run_scenario;
//!
//! let mut config = preset("S1-sub6-mimo")?;
//! config.drops = 2;                      // keep the example fast
//! config.layout.area_m = [400.0, 400.0];
//! config.ue.count_per_cell = 2;
//! let out = run_scenario(&config, 1)?;
//! let coverage = out.report.row("coverage_pct").unwrap();
//! assert!((0.0..=100.0).contains(&coverage.value));
//! # Ok::<(), migsim::error::Error>(())
//! ```

pub mod aggregation;
pub mod channel;
pub mod config;
pub mod error;
pub mod latency;
pub mod mimo;
pub mod network;
pub mod propagation;
pub mod quantities;
pub mod report;
pub mod simulation;

pub use error::{Error, Result};

// Compiles and runs every code block in the guide as part of `cargo test`,
// so the book cannot drift from the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/quantities.md")]
    pub struct Quantities;
    #[doc = include_str!("../../../book/src/propagation.md")]
    pub struct Propagation;
    #[doc = include_str!("../../../book/src/channel.md")]
    pub struct Channel;
    #[doc = include_str!("../../../book/src/mimo.md")]
    pub struct Mimo;
    #[doc = include_str!("../../../book/src/carrier-aggregation.md")]
    pub struct CarrierAggregation;
    #[doc = include_str!("../../../book/src/network.md")]
    pub struct Network;
    #[doc = include_str!("../../../book/src/latency.md")]
    pub struct Latency;
    #[doc = include_str!("../../../book/src/engine.md")]
    pub struct Engine;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
