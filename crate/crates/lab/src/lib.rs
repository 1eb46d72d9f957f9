//! Experiment runner for `cusp-core`: TOML configs, CSV/SVG reports and the
//! file formats used by the `cusp-lab` command line tool.

pub mod config;
pub mod density;
pub mod formats;
pub mod plot;
pub mod slit;
pub mod sweep;

pub use config::{ConfigError, ExperimentConfig, PairSpec};
