//! Flat report rows: `model,n,shape_code,stat,value,predicted,z`.
//!
//! JSON output is an array of the same records. Missing predictions and
//! z-scores are empty in CSV and `null` in JSON.

use std::io::Write;

use fringe_core::ShapeCode;
use serde::{Serialize, Serializer};

use crate::clt::CltRow;
use crate::compare::ComparisonReport;
use crate::error::Result;
use crate::experiment::{CensusStats, ReplicateCensus};
use crate::oscillation::OscillationReport;

pub fn ser_code<S: Serializer>(code: &ShapeCode, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(code)
}

pub fn ser_display<T: std::fmt::Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub model: String,
    pub n: u64,
    /// Preorder bit code, or a whole-tree label such as `size`.
    pub shape_code: String,
    pub stat: String,
    pub value: f64,
    pub predicted: Option<f64>,
    pub z: Option<f64>,
}

impl Row {
    fn new(model: &str, n: u64, shape: impl Into<String>, stat: &str, value: f64) -> Row {
        Row {
            model: model.to_string(),
            n,
            shape_code: shape.into(),
            stat: stat.to_string(),
            value,
            predicted: None,
            z: None,
        }
    }

    fn with(mut self, predicted: Option<f64>, z: Option<f64>) -> Row {
        self.predicted = predicted;
        self.z = z;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format `{s}` (csv, json)")),
        }
    }
}

pub fn census_rows(stats: &CensusStats) -> Vec<Row> {
    let model = stats.spec.model.name();
    let mut rows = Vec::new();
    for size in &stats.by_n {
        let n = size.n;
        rows.push(Row::new(model, n, "tree", "size_mean", size.size.mean));
        rows.push(Row::new(model, n, "tree", "leafcount_mean", size.leafcount.mean));
        rows.push(Row::new(model, n, "tree", "leafcount_var", size.leafcount.variance));
        for s in &size.shapes {
            let code = s.shape.to_string();
            rows.push(Row::new(model, n, code.clone(), "count_mean", s.count.mean));
            rows.push(Row::new(model, n, code.clone(), "count_var", s.count.variance));
            rows.push(Row::new(model, n, code.clone(), "count_skew", s.count.skewness));
            rows.push(Row::new(model, n, code.clone(), "count_exkurt", s.count.excess_kurtosis));
            rows.push(Row::new(model, n, code.clone(), "fringe_mean", s.fringe.mean));
            rows.push(Row::new(model, n, code, "qsin_mean", s.qsin.mean));
        }
    }
    rows
}

/// One `nodes` row, one `count` row per shape, and a `rest` count row for
/// fringe trees beyond the census cutoff, per replicate; the count rows of a
/// replicate sum to its size.
pub fn replicate_rows(model: &str, n: u64, reps: &[ReplicateCensus]) -> Vec<Row> {
    let mut rows = Vec::new();
    for r in reps {
        let stat = format!("count_rep{}", r.replicate);
        rows.push(Row::new(model, n, format!("rep{}", r.replicate), "nodes", r.tree_size as f64));
        if r.counts.is_empty() {
            continue;
        }
        for (code, c) in &r.counts {
            rows.push(Row::new(model, n, code.to_string(), &stat, *c as f64));
        }
        let seen: u64 = r.counts.values().sum();
        rows.push(Row::new(model, n, "rest", &stat, (r.tree_size - seen) as f64));
    }
    rows
}

pub fn comparison_rows(report: &ComparisonReport) -> Vec<Row> {
    let mut rows = Vec::new();
    for r in &report.rows {
        let code = r.shape.to_string();
        rows.push(Row::new(&r.model, r.n, code.clone(), "fringe_mean", r.empirical).with(Some(r.predicted), Some(r.z)));
        rows.push(
            Row::new(&r.model, r.n, code.clone(), &format!("count_var_per_{}", scale_name(r)), r.empirical_variance)
                .with(r.predicted_variance, None),
        );
        rows.push(Row::new(&r.model, r.n, code, &format!("verdict_{}", r.verdict), verdict_value(r.verdict)));
    }
    for r in &report.tree_rows {
        rows.push(Row::new(&r.model, r.n, r.stat, "mean", r.empirical).with(Some(r.predicted), Some(r.z)));
        rows.push(Row::new(&r.model, r.n, r.stat, "var_per_n", r.empirical_variance).with(Some(r.predicted_variance), None));
        rows.push(Row::new(&r.model, r.n, r.stat, &format!("verdict_{}", r.verdict), verdict_value(r.verdict)));
    }
    rows
}

fn scale_name(r: &crate::compare::ComparisonRow) -> &'static str {
    match r.variance_scale {
        crate::compare::VarianceScale::N => "n",
        crate::compare::VarianceScale::Size => "size",
    }
}

fn verdict_value(v: crate::compare::Verdict) -> f64 {
    match v {
        crate::compare::Verdict::Pass => 1.0,
        crate::compare::Verdict::Fail => 0.0,
        crate::compare::Verdict::None => f64::NAN,
    }
}

pub fn clt_rows(rows: &[CltRow]) -> Vec<Row> {
    let mut out = Vec::new();
    for r in rows {
        let code = r.shape.to_string();
        out.push(Row::new(&r.model, r.n, code.clone(), "skewness", r.skewness));
        out.push(Row::new(&r.model, r.n, code.clone(), "excess_kurtosis", r.excess_kurtosis));
        let verdict = match r.pass {
            Some(true) => "clt_pass",
            Some(false) => "clt_fail",
            None => "clt_none",
        };
        out.push(Row::new(&r.model, r.n, code, verdict, r.pass.map_or(f64::NAN, |p| p as u8 as f64)));
    }
    out
}

/// Plot-ready: `phase` rows carry the fold coordinate, `n_ratio` rows the
/// empirical `N_t / n` with the periodic prediction.
pub fn oscillation_rows(report: &OscillationReport, code: &ShapeCode) -> Vec<Row> {
    let code = code.to_string();
    let mut out = Vec::new();
    for r in &report.rows {
        out.push(Row::new("patricia", r.n, code.clone(), "phase", r.phase));
        out.push(
            Row::new("patricia", r.n, code.clone(), "n_ratio", r.empirical)
                .with(Some(r.predicted), Some((r.empirical - r.predicted) / r.standard_error)),
        );
    }
    out
}

pub fn write_rows<W: Write>(rows: &[Row], format: Format, out: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}
