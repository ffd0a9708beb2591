//! Efficiency, criticality and robustness analysis of yearly directed trade
//! networks.
//!
//! Typical flow: parse an edge list with [`ingest::parse_trade_records`],
//! split it into one [`Network`] per year with
//! [`ingest::build_yearly_networks`], then run the measures in
//! [`efficiency`], [`criticality`], [`robustness`] and [`stats`].

pub mod criticality;
pub mod efficiency;
pub mod error;
pub mod ingest;
pub mod network;
#[cfg(any(test, feature = "oracle"))]
pub mod oracle;
mod par;
mod paths;
pub mod robustness;
pub mod stats;

pub use criticality::{CriticalityTable, Key, Kind};
pub use efficiency::{Mode, PathLengths};
pub use error::{Error, Result};
pub use ingest::{GroupMap, TradeRecord};
pub use network::{Edge, Network};
pub use robustness::{AttackPlan, RandomSampling, RobustnessCurve, Strategy};
pub use stats::{CorrelationReport, VolumeSide};
