//! Moment-based normality proxy for fringe counts across replicates.

use fringe_core::{Model, ShapeCode};
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::experiment::CensusStats;

pub const MIN_REPS: usize = 200;
pub const SKEW_LIMIT: f64 = 0.3;
pub const EXCESS_KURTOSIS_LIMIT: f64 = 0.6;
/// Counts with a smaller standard deviation are lattice-dominated.
pub const MIN_COUNT_SD: f64 = 1.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CltRow {
    pub model: String,
    pub n: u64,
    #[serde(serialize_with = "crate::output::ser_code")]
    pub shape: ShapeCode,
    pub reps: usize,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    /// `None` where normality is not established (critical beta-splitting).
    pub pass: Option<bool>,
}

pub fn clt_diagnostic(stats: &CensusStats, n: u64, shape: &ShapeCode) -> Result<CltRow> {
    let size = stats
        .at(n)
        .ok_or_else(|| LabError::Refused(format!("no replicates at n = {n}")))?;
    if size.reps < MIN_REPS {
        return Err(LabError::Refused(format!("{} replicates, need {MIN_REPS}", size.reps)));
    }
    let s = size
        .shape(shape)
        .ok_or_else(|| LabError::Refused(format!("shape {shape} not in census")))?;
    let sd = s.count.sd();
    if sd.is_nan() || sd < MIN_COUNT_SD {
        return Err(LabError::Refused(format!("counts near-constant (sd {sd:.3} < {MIN_COUNT_SD})")));
    }
    let model = stats.spec.model;
    let critical = model == Model::BetaSplit && stats.spec.beta == -1.0;
    let pass = (!critical).then(|| {
        s.count.skewness.abs() <= SKEW_LIMIT && s.count.excess_kurtosis.abs() <= EXCESS_KURTOSIS_LIMIT
    });
    Ok(CltRow {
        model: model.to_string(),
        n,
        shape: shape.clone(),
        reps: size.reps,
        skewness: s.count.skewness,
        excess_kurtosis: s.count.excess_kurtosis,
        pass,
    })
}
