//! Experiment runner for `multact-core`.
//!
//! A config names one registered experiment and supplies its `params`:
//!
//! ```json
//! { "experiment": "folner-density", "seed": 7, "params": { "k_values": [2, 3] } }
//! ```
//!
//! Each run writes `<out>/<experiment>.csv` and a JSON summary next to it.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod registry;
pub mod report;

pub use config::ExperimentConfig;
pub use error::LabError;
pub use registry::{lookup, registry, Ctx, Experiment};
