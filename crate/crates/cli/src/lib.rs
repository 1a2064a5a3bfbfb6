//! Config-driven experiment runner for `hartree-core`.
//!
//! A run is `config text -> RunConfig -> ResultEnvelope`, and the envelope
//! plus its payload files (NDJSON, CSV, SVG) land in one output directory.

pub mod config;
pub mod envelope;
pub mod experiments;
pub mod plot;

pub use config::{parse_config, parse_config_for, ConfigError, Format, Kind, RunConfig};
pub use envelope::{run_experiment, sha256_hex, ResultEnvelope, Status};
pub use plot::{emit_plot, PlotStyle, Series};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "HARTREE_OUT";
