//! Graph-based two-sample tests for sparse categorical data.

pub mod distance;
pub mod error;
pub mod graph;
pub mod inference;
pub mod sim;
pub mod stats;
pub mod table;

pub use distance::{DistanceMatrix, Metric, Ranking};
pub use error::{Error, Result};
pub use graph::{CategoryGraph, GraphSummary, Matching};
pub use stats::{StatKind, StatSpec, Statistic, StatisticValue};
pub use table::{ContingencyTable, Group, SubjectList};
