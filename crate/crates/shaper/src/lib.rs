//! Scenario files, daily profiles and experiment runners for the `shaper` CLI.

pub mod config;
pub mod day;
pub mod error;
pub mod gain;
pub mod profiles;
pub mod sweep;
pub mod validate;

pub use config::{load_config, Scenario};
pub use day::{run_day, DayReport, PolicyChoice};
pub use error::{CliError, Result};
pub use profiles::{load_profiles, DailyProfiles};
pub use sweep::sweep_gain;
