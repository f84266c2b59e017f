//! Replicated sampling and census aggregation.

use std::collections::{BTreeMap, BTreeSet};

use fringe_core::census::{census_with, CensusOptions, CountTotals};
use fringe_core::sampler::replicate_seed;
use fringe_core::{ModelSpec, RandomSource, ShapeCode, TreeShape};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::stats::Moments;

pub const DEFAULT_N: u64 = 10_000;
pub const DEFAULT_REPS: usize = 500;
pub const DEFAULT_MAX_LEAVES: u32 = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentPlan {
    /// Model and parameters; `spec.n` is ignored in favour of `n_values`.
    pub spec: ModelSpec,
    pub n_values: Vec<u64>,
    pub reps: usize,
    pub max_leaves: u32,
    pub master_seed: u64,
    /// Shapes to report; empty reports every shape seen.
    pub shapes: Vec<TreeShape>,
    pub cladogram: bool,
    /// Worker threads; 1 runs on the calling thread.
    pub jobs: usize,
}

impl ExperimentPlan {
    pub fn new(spec: ModelSpec, n_values: Vec<u64>, reps: usize) -> Self {
        ExperimentPlan {
            spec,
            n_values,
            reps,
            max_leaves: DEFAULT_MAX_LEAVES,
            master_seed: 0,
            shapes: Vec::new(),
            cladogram: false,
            jobs: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(LabError::Plan("n_values is empty".into()));
        }
        if self.reps < 2 {
            return Err(LabError::Plan("reps must be at least 2".into()));
        }
        if self.max_leaves == 0 {
            return Err(LabError::Plan("max_leaves must be at least 1".into()));
        }
        if self.jobs == 0 {
            return Err(LabError::Plan("jobs must be at least 1".into()));
        }
        for &n in &self.n_values {
            ModelSpec { n, ..self.spec }.validate()?;
        }
        for t in &self.shapes {
            t.ensure_full()?;
            if t.leafcount() > self.max_leaves as usize {
                return Err(LabError::Plan(format!(
                    "shape {t} has more than {} leaves",
                    self.max_leaves
                )));
            }
        }
        Ok(())
    }

    fn options(&self) -> CensusOptions {
        CensusOptions {
            cladogram: self.cladogram,
            ..CensusOptions::new(self.max_leaves)
        }
    }

    /// Census keys of the requested shapes.
    pub fn shape_keys(&self) -> Result<Vec<ShapeCode>> {
        let mut keys = BTreeSet::new();
        for t in &self.shapes {
            keys.insert(if self.cladogram { t.cladogram_code()? } else { t.code()? });
        }
        Ok(keys.into_iter().collect())
    }
}

/// One sampled tree reduced to its census.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReplicateCensus {
    pub replicate: u64,
    pub seed: u64,
    pub tree_size: u64,
    pub tree_leafcount: u64,
    /// Empty for models whose trees are not full.
    #[serde(skip)]
    pub counts: BTreeMap<ShapeCode, u64>,
}

/// Replicate `rep` at `plan.n_values[n_index]`: seed `master ^ rep`,
/// stream `n_index`.
pub fn replicate(plan: &ExperimentPlan, n_index: usize, rep: u64) -> Result<ReplicateCensus> {
    let n = plan.n_values[n_index];
    let seed = replicate_seed(plan.master_seed, rep);
    let mut rng = RandomSource::with_stream(seed, n_index as u64);
    let tree = ModelSpec { n, ..plan.spec }.sample(&mut rng)?;
    let counts = if tree.is_full() {
        census_with(&tree, plan.options())?.counts
    } else {
        BTreeMap::new()
    };
    Ok(ReplicateCensus {
        replicate: rep,
        seed,
        tree_size: tree.len() as u64,
        tree_leafcount: tree.leafcount() as u64,
        counts,
    })
}

/// All replicates at one size, in replicate order regardless of `jobs`.
pub fn run_replicates(plan: &ExperimentPlan, n_index: usize) -> Result<Vec<ReplicateCensus>> {
    let reps = plan.reps as u64;
    if plan.jobs <= 1 {
        return (0..reps).map(|r| replicate(plan, n_index, r)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.jobs)
        .build()
        .map_err(|e| LabError::Pool(e.to_string()))?;
    pool.install(|| (0..reps).into_par_iter().map(|r| replicate(plan, n_index, r)).collect())
}

/// Moments of one shape across replicates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShapeStats {
    #[serde(serialize_with = "crate::output::ser_code")]
    pub shape: ShapeCode,
    pub leaves: usize,
    /// `N_t`.
    pub count: Moments,
    /// `N_t / |T|`.
    pub fringe: Moments,
    /// `N_t leafcount(t) / leafcount(T)`.
    pub qsin: Moments,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SizeStats {
    pub n: u64,
    pub reps: usize,
    pub leafcount: Moments,
    pub size: Moments,
    pub shapes: Vec<ShapeStats>,
    #[serde(skip)]
    pub totals: CountTotals,
}

impl SizeStats {
    pub fn shape(&self, key: &ShapeCode) -> Option<&ShapeStats> {
        self.shapes.iter().find(|s| &s.shape == key)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CensusStats {
    #[serde(serialize_with = "crate::output::ser_display")]
    pub spec: ModelSpec,
    pub max_leaves: u32,
    pub cladogram: bool,
    pub master_seed: u64,
    pub by_n: Vec<SizeStats>,
}

impl CensusStats {
    pub fn at(&self, n: u64) -> Option<&SizeStats> {
        self.by_n.iter().find(|s| s.n == n)
    }
}

/// Moments over replicates; `keys` empty means every shape present in
/// some replicate. Absent shapes count zero.
pub fn aggregate(n: u64, reps: &[ReplicateCensus], keys: &[ShapeCode]) -> SizeStats {
    let mut totals = CountTotals::default();
    for r in reps {
        totals.trees += 1;
        totals.nodes += r.tree_size;
        totals.leaves += r.tree_leafcount;
        for (k, v) in &r.counts {
            *totals.counts.entry(k.clone()).or_insert(0) += v;
        }
    }
    let keys: Vec<ShapeCode> = if keys.is_empty() {
        totals.counts.keys().cloned().collect()
    } else {
        keys.to_vec()
    };
    let size: Vec<f64> = reps.iter().map(|r| r.tree_size as f64).collect();
    let leaves: Vec<f64> = reps.iter().map(|r| r.tree_leafcount as f64).collect();
    let shapes = keys
        .into_iter()
        .map(|key| {
            let m = key.leafcount();
            let counts: Vec<f64> = reps
                .iter()
                .map(|r| r.counts.get(&key).copied().unwrap_or(0) as f64)
                .collect();
            let fringe: Vec<f64> = counts.iter().zip(&size).map(|(c, s)| c / s).collect();
            let qsin: Vec<f64> = counts.iter().zip(&leaves).map(|(c, l)| c * m as f64 / l).collect();
            ShapeStats {
                shape: key,
                leaves: m,
                count: Moments::of(&counts),
                fringe: Moments::of(&fringe),
                qsin: Moments::of(&qsin),
            }
        })
        .collect();
    SizeStats {
        n,
        reps: reps.len(),
        leafcount: Moments::of(&leaves),
        size: Moments::of(&size),
        shapes,
        totals,
    }
}

pub fn run(plan: &ExperimentPlan) -> Result<CensusStats> {
    plan.validate()?;
    let keys = plan.shape_keys()?;
    let mut by_n = Vec::with_capacity(plan.n_values.len());
    for (i, &n) in plan.n_values.iter().enumerate() {
        let reps = run_replicates(plan, i)?;
        by_n.push(aggregate(n, &reps, &keys));
    }
    Ok(CensusStats {
        spec: plan.spec,
        max_leaves: plan.max_leaves,
        cladogram: plan.cladogram,
        master_seed: plan.master_seed,
        by_n,
    })
}
