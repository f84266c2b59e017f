//! Monte Carlo lab for fringe subtree statistics.
//!
//! Replicated sampling and census aggregation, comparisons against the
//! exact limits, normality and oscillation diagnostics, small-size exact
//! oracles, the summary tables, and CSV/JSON output. The `fringelab`
//! binary is a thin front end over these modules.

pub mod clt;
pub mod compare;
pub mod config;
pub mod constants;
pub mod error;
pub mod experiment;
pub mod oracle;
pub mod oscillation;
pub mod output;
pub mod parse;
pub mod stats;
pub mod tables;

pub use clt::{clt_diagnostic, CltRow};
pub use compare::{compare, CompareOptions, ComparisonReport, ComparisonRow, Verdict};
pub use error::{LabError, Result};
pub use experiment::{run, CensusStats, ExperimentPlan, ReplicateCensus, ShapeStats, SizeStats};
pub use oracle::{oracle_bst_expectation, oracle_uniform_expectation, BstVariant};
pub use oscillation::{oscillation_scan, OscillationReport};
pub use stats::Moments;
