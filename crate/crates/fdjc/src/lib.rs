//! Configuration files, figure presets and the simulation driver behind the
//! `fdjc` command-line tool.

pub mod config;
pub mod driver;
pub mod error;
pub mod presets;

pub use config::{load_config, parse_config, Mode, Observable, PhysicsConfig, ResolvedRun, RunConfig};
pub use driver::{evolve, run, simulate, sweep, verify};
pub use error::{ConfigError, RunError};
