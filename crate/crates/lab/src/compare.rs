//! Empirical statistics against predicted limits.
//!
//! The mean verdict uses `z = (mean - predicted) / (sd / sqrt(reps))` on
//! the fringe ratio `N_t / |T|`. A variance verdict is added only where a
//! closed form exists: Patricia (`Var N_t / n`), uniform (`Var N_t / |T|`),
//! and the BST leaf count and compressed size (`Var / n`).

use fringe_core::exact::uniform_variance;
use fringe_core::patricia::{patricia_mean_const, patricia_var_const, DEFAULT_FOURIER_TERMS};
use fringe_core::{limit_fringe, LimitParams, Model, ShapeCode, SourceParams, TreeShape};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::experiment::{CensusStats, SizeStats};
use crate::stats::z_score;

pub const Z_THRESHOLD: f64 = 4.0;
pub const VARIANCE_BAND: (f64, f64) = (0.8, 1.25);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// No prediction to test against.
    None,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::None => "none",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompareOptions {
    pub fourier_terms: usize,
    /// Overrides the detected periodicity of the Patricia source.
    pub source: Option<SourceParams>,
    pub z_threshold: f64,
    pub variance_band: (f64, f64),
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            fourier_terms: DEFAULT_FOURIER_TERMS,
            source: None,
            z_threshold: Z_THRESHOLD,
            variance_band: VARIANCE_BAND,
        }
    }
}

/// What the variance of `N_t` is divided by before comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VarianceScale {
    N,
    Size,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub model: String,
    pub n: u64,
    #[serde(serialize_with = "crate::output::ser_code")]
    pub shape: ShapeCode,
    pub tree: String,
    pub reps: usize,
    /// Mean of `N_t / |T|`.
    pub empirical: f64,
    pub predicted: f64,
    pub z: f64,
    /// `Var N_t` divided per `variance_scale`.
    pub empirical_variance: f64,
    pub predicted_variance: Option<f64>,
    pub variance_ratio: Option<f64>,
    pub variance_scale: VarianceScale,
    pub verdict: Verdict,
}

/// Whole-tree statistic: BST leaf count or compressed size.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TreeStatRow {
    pub model: String,
    pub n: u64,
    pub stat: &'static str,
    pub reps: usize,
    pub empirical: f64,
    pub predicted: f64,
    pub z: f64,
    /// `Var / n`.
    pub empirical_variance: f64,
    pub predicted_variance: f64,
    pub variance_ratio: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub tree_rows: Vec<TreeStatRow>,
}

impl ComparisonReport {
    /// No row failed.
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.verdict != Verdict::Fail)
            && self.tree_rows.iter().all(|r| r.verdict != Verdict::Fail)
    }

    pub fn row(&self, n: u64, shape: &ShapeCode) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.n == n && &r.shape == shape)
    }
}

/// Predicted `E N_t / |T|` and, where known, the scaled variance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShapePrediction {
    pub fringe: f64,
    pub variance: Option<f64>,
    pub variance_scale: VarianceScale,
}

/// Oriented shapes behind a census key.
fn members(key: &ShapeCode, cladogram: bool) -> Result<Vec<TreeShape>> {
    if !cladogram {
        return Ok(vec![key.decode()?]);
    }
    let mut out = Vec::new();
    for t in TreeShape::all_full(key.leafcount()) {
        if &t.cladogram_code()? == key {
            out.push(t);
        }
    }
    Ok(out)
}

fn patricia_source(p: f64, options: &CompareOptions) -> Result<SourceParams> {
    match options.source {
        Some(s) if s.p == p => Ok(s),
        Some(s) => Err(LabError::Plan(format!("source override has p = {} but the model has p = {p}", s.p))),
        None => Ok(SourceParams::new(p)?),
    }
}

/// Prediction for the key `key` under `spec` at size `n`; `None` for
/// models without a fringe limit (trie, bst).
pub fn predict(
    stats: &CensusStats,
    key: &ShapeCode,
    n: u64,
    options: &CompareOptions,
) -> Result<Option<ShapePrediction>> {
    let spec = stats.spec;
    if !spec.model.is_full() {
        return Ok(None);
    }
    let shapes = members(key, stats.cladogram)?;
    let single = shapes.len() == 1;
    let m = key.leafcount() as u32;
    if spec.model == Model::Patricia {
        let source = patricia_source(spec.p, options)?;
        let x = (n as f64).ln();
        let mut mean = 0.0;
        for t in &shapes {
            mean += patricia_mean_const(t, source, options.fourier_terms)?.eval(x);
        }
        let variance = if single && m > 1 {
            Some(patricia_var_const(&shapes[0], source, options.fourier_terms)?.eval(x))
        } else {
            None
        };
        // E N_t / n times n / |T| with |T| = 2n - 1.
        return Ok(Some(ShapePrediction {
            fringe: mean * n as f64 / (2 * n - 1) as f64,
            variance,
            variance_scale: VarianceScale::N,
        }));
    }
    let params = LimitParams {
        p: BigRational::from_float(spec.p).unwrap_or_else(|| LimitParams::default().p),
        beta: spec.beta,
    };
    let mut fringe = 0.0;
    for t in &shapes {
        fringe += limit_fringe(spec.model, t, &params)?.to_f64();
    }
    let uniform = spec.model == Model::UniformFull || (spec.model == Model::BetaSplit && spec.beta == -1.5);
    let variance = if uniform && single && m > 1 {
        uniform_variance(m)?.to_f64()
    } else {
        None
    };
    Ok(Some(ShapePrediction {
        fringe,
        variance,
        variance_scale: if uniform { VarianceScale::Size } else { VarianceScale::N },
    }))
}

fn shape_rows(stats: &CensusStats, size: &SizeStats, options: &CompareOptions) -> Result<Vec<ComparisonRow>> {
    let mut rows = Vec::new();
    for s in &size.shapes {
        let Some(pred) = predict(stats, &s.shape, size.n, options)? else {
            continue;
        };
        let z = z_score(s.fringe.mean, pred.fringe, s.fringe.standard_error());
        let denom = match pred.variance_scale {
            VarianceScale::N => size.n as f64,
            VarianceScale::Size => size.size.mean,
        };
        let empirical_variance = s.count.variance / denom;
        let variance_ratio = pred.variance.map(|v| empirical_variance / v);
        let mean_ok = z.abs() <= options.z_threshold;
        let var_ok = variance_ratio.is_none_or(|r| r >= options.variance_band.0 && r <= options.variance_band.1);
        rows.push(ComparisonRow {
            model: stats.spec.model.to_string(),
            n: size.n,
            shape: s.shape.clone(),
            tree: s.shape.decode()?.format(),
            reps: size.reps,
            empirical: s.fringe.mean,
            predicted: pred.fringe,
            z,
            empirical_variance,
            predicted_variance: pred.variance,
            variance_ratio,
            variance_scale: pred.variance_scale,
            verdict: if mean_ok && var_ok { Verdict::Pass } else { Verdict::Fail },
        });
    }
    Ok(rows)
}

fn tree_rows(stats: &CensusStats, size: &SizeStats, options: &CompareOptions) -> Vec<TreeStatRow> {
    let model = stats.spec.model;
    if !matches!(model, Model::Bst | Model::Cbst) {
        return Vec::new();
    }
    let n = size.n as f64;
    // E leaves(BST_n) = (n+1)/3 for n >= 2, Var / n -> 2/45.
    let leaves_mean = if size.n == 1 { 1.0 } else { (n + 1.0) / 3.0 };
    let mut wanted = vec![("leafcount", &size.leafcount, leaves_mean, 2.0 / 45.0)];
    if model == Model::Cbst {
        wanted.push(("size", &size.size, 2.0 * leaves_mean - 1.0, 8.0 / 45.0));
    }
    wanted
        .into_iter()
        .map(|(stat, m, mean, var)| {
            let z = z_score(m.mean, mean, m.standard_error());
            let empirical_variance = m.variance / n;
            let ratio = empirical_variance / var;
            let ok = z.abs() <= options.z_threshold
                && ratio >= options.variance_band.0
                && ratio <= options.variance_band.1;
            TreeStatRow {
                model: model.to_string(),
                n: size.n,
                stat,
                reps: size.reps,
                empirical: m.mean,
                predicted: mean,
                z,
                empirical_variance,
                predicted_variance: var,
                variance_ratio: ratio,
                verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            }
        })
        .collect()
}

pub fn compare(stats: &CensusStats, options: &CompareOptions) -> Result<ComparisonReport> {
    let mut report = ComparisonReport::default();
    for size in &stats.by_n {
        report.rows.extend(shape_rows(stats, size, options)?);
        report.tree_rows.extend(tree_rows(stats, size, options));
    }
    Ok(report)
}
