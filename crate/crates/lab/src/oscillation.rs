//! Phase-folded scan of Patricia fringe counts against the periodic mean.

use fringe_core::patricia::patricia_mean_const;
use fringe_core::{Model, ModelSpec, SourceParams, TreeShape};
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::experiment::{run, ExperimentPlan};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OscillationRow {
    pub n: u64,
    pub log_n: f64,
    /// `log n mod d`.
    pub phase: f64,
    /// Mean of `N_t / n`.
    pub empirical: f64,
    pub standard_error: f64,
    /// `H^{-1} psi_E(log n)`.
    pub predicted: f64,
    pub constant: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OscillationReport {
    pub tree: String,
    pub p: f64,
    pub period: f64,
    pub constant: f64,
    /// Peak-to-mean oscillation of the prediction, relative to the constant.
    pub relative_amplitude: f64,
    pub mean_relative_standard_error: f64,
    /// Whether the predicted oscillation exceeds the Monte Carlo noise.
    pub resolvable: bool,
    pub rows: Vec<OscillationRow>,
}

/// `2^lo ..= 2^hi` with `per_octave` points per doubling.
pub fn geometric_grid(lo: u32, hi: u32, per_octave: u32) -> Vec<u64> {
    let per = per_octave.max(1);
    let mut out: Vec<u64> = (0..=(hi - lo) * per)
        .map(|i| (2f64.powf(lo as f64 + i as f64 / per as f64)).round() as u64)
        .collect();
    out.dedup();
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScanSettings {
    pub reps: usize,
    pub master_seed: u64,
    pub jobs: usize,
    pub fourier_terms: usize,
}

pub fn oscillation_scan(t: &TreeShape, source: SourceParams, grid: &[u64], settings: ScanSettings) -> Result<OscillationReport> {
    let d = source
        .periodicity
        .period()
        .ok_or_else(|| LabError::Plan(format!("p = {} is aperiodic; nothing to fold", source.p)))?;
    let mean = patricia_mean_const(t, source, settings.fourier_terms)?;
    let mut plan = ExperimentPlan::new(ModelSpec::new(Model::Patricia, 1).with_p(source.p), grid.to_vec(), settings.reps);
    plan.max_leaves = t.leafcount() as u32;
    plan.shapes = vec![t.clone()];
    plan.master_seed = settings.master_seed;
    plan.jobs = settings.jobs;
    let stats = run(&plan)?;
    let key = t.code()?;
    let mut rows = Vec::with_capacity(grid.len());
    let mut rel_se = 0.0;
    for size in &stats.by_n {
        let s = size.shape(&key).expect("requested shape is always reported");
        let nf = size.n as f64;
        let x = nf.ln();
        let row = OscillationRow {
            n: size.n,
            log_n: x,
            phase: x.rem_euclid(d),
            empirical: s.count.mean / nf,
            standard_error: s.count.standard_error() / nf,
            predicted: mean.eval(x),
            constant: mean.constant,
        };
        rel_se += row.standard_error / mean.constant;
        rows.push(row);
    }
    let mean_relative_standard_error = rel_se / rows.len() as f64;
    let relative_amplitude = mean.relative_amplitude();
    Ok(OscillationReport {
        tree: t.format(),
        p: source.p,
        period: d,
        constant: mean.constant,
        relative_amplitude,
        mean_relative_standard_error,
        resolvable: relative_amplitude > 3.0 * mean_relative_standard_error,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_geometric() {
        assert_eq!(geometric_grid(2, 4, 1), vec![4, 8, 16]);
        assert_eq!(geometric_grid(10, 11, 2), vec![1024, 1448, 2048]);
    }
}
