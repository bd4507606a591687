//! Analytical and simulation models for a grid-powered macro cell that
//! offloads users to an energy-harvesting small cell.

pub mod eots;
pub mod error;
pub mod model;
pub mod power;
pub mod queue;
pub mod sim;

pub use eots::{eots_decision, greedy_decision, EotsDecision, Regime, RegimeKind};
pub use error::{Error, Result};
pub use model::{DerivedConstants, NetworkConfig, QosSpec, TrafficSnapshot, UserClass};
pub use power::{GainForm, GainReport, OperatingPoint};
pub use queue::{analyze_queue, EnergyConfig, QueueAnalytics};
