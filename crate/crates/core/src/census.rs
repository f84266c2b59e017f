//! Fringe subtree census: counts `N_t(T)` of every small fringe shape,
//! the leaf-size histogram `N_m(T)`, and the quenched probabilities built
//! from them.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{FringeError, Result};
use crate::tree::{ShapeCode, TreeShape};

/// Default census cutoff on fringe leaf counts.
pub const DEFAULT_MAX_LEAVES: u32 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CensusOptions {
    /// Fringe trees with at most this many leaves are counted by shape.
    pub max_leaves: u32,
    /// Leaf-size histogram covers `1..=hist_cap` (never below `max_leaves`).
    pub hist_cap: u32,
    /// Key shapes by their orientation-free code.
    pub cladogram: bool,
}

impl CensusOptions {
    pub fn new(max_leaves: u32) -> Self {
        CensusOptions {
            max_leaves,
            hist_cap: max_leaves,
            cladogram: false,
        }
    }
}

impl Default for CensusOptions {
    fn default() -> Self {
        Self::new(DEFAULT_MAX_LEAVES)
    }
}

/// Fringe shape counts of one full tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FringeCensus {
    pub tree_size: u64,
    pub tree_leafcount: u64,
    pub options: CensusOptions,
    pub counts: BTreeMap<ShapeCode, u64>,
    pub leaf_size_hist: BTreeMap<u32, u64>,
}

/// Census with the given cutoff and default options.
pub fn census(t: &TreeShape, max_leaves: u32) -> Result<FringeCensus> {
    census_with(t, CensusOptions::new(max_leaves))
}

/// Single bottom-up pass over a full tree.
pub fn census_with(t: &TreeShape, options: CensusOptions) -> Result<FringeCensus> {
    if options.max_leaves == 0 {
        return Err(FringeError::InvalidParameter("census cutoff must be >= 1".into()));
    }
    t.ensure_full()?;
    let hist_cap = options.hist_cap.max(options.max_leaves);
    let sizes = t.subtree_sizes();
    let mut counts = BTreeMap::new();
    let mut hist = BTreeMap::new();
    for (i, &size) in sizes.iter().enumerate() {
        let leaves = size.div_ceil(2);
        if leaves <= hist_cap {
            *hist.entry(leaves).or_insert(0u64) += 1;
        }
        if leaves <= options.max_leaves {
            let code = if options.cladogram {
                t.subtree(i).cladogram_code()?
            } else {
                t.code_of_subtree(i, size as usize)
            };
            *counts.entry(code).or_insert(0u64) += 1;
        }
    }
    Ok(FringeCensus {
        tree_size: t.len() as u64,
        tree_leafcount: sizes[0].div_ceil(2) as u64,
        options: CensusOptions { hist_cap, ..options },
        counts,
        leaf_size_hist: hist,
    })
}

impl FringeCensus {
    fn key(&self, t: &TreeShape) -> Result<ShapeCode> {
        t.ensure_full()?;
        let m = t.leafcount() as u64;
        if m > self.options.max_leaves as u64 {
            return Err(FringeError::OutOfCensusRange {
                leaves: m,
                cutoff: self.options.max_leaves,
            });
        }
        if self.options.cladogram {
            t.cladogram_code()
        } else {
            t.code()
        }
    }

    /// `N_t(T)`.
    pub fn count(&self, t: &TreeShape) -> Result<u64> {
        let key = self.key(t)?;
        Ok(self.counts.get(&key).copied().unwrap_or(0))
    }

    pub fn count_code(&self, code: &ShapeCode) -> u64 {
        self.counts.get(code).copied().unwrap_or(0)
    }

    /// Sum of all shape counts.
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// `P(T* = t | T) = N_t(T) / |T|`.
pub fn quenched_fringe_prob(c: &FringeCensus, t: &TreeShape) -> Result<BigRational> {
    let n = c.count(t)?;
    Ok(BigRational::new(BigInt::from(n), BigInt::from(c.tree_size)))
}

/// `q(T; t | T) = N_t(T) * leafcount(t) / leafcount(T)`.
pub fn quenched_qsin(c: &FringeCensus, t: &TreeShape) -> Result<BigRational> {
    let n = c.count(t)?;
    Ok(BigRational::new(
        BigInt::from(n) * BigInt::from(t.leafcount()),
        BigInt::from(c.tree_leafcount),
    ))
}

/// Counts nodes `v` of a general binary tree whose fringe tree belongs to
/// `C(t)`: the root of `T^v` has outdegree other than 1 (or `T^v` is a
/// leaf when `t` is) and `compress(T^v) = t`.
///
/// Each candidate fringe tree is extracted and compressed on its own, so
/// this is independent of [`TreeShape::compress`] applied to the whole tree.
pub fn subdivision_count(tree: &TreeShape, t: &TreeShape) -> Result<u64> {
    t.ensure_full()?;
    let m = t.leafcount() as u32;
    let leaves = tree.subtree_leafcounts();
    let mut count = 0;
    for (v, &lv) in leaves.iter().enumerate() {
        if lv != m {
            continue;
        }
        let deg = tree.outdegree(v);
        let eligible = if t.is_leaf() { deg == 0 } else { deg == 2 };
        if eligible && tree.subtree(v).compress() == *t {
            count += 1;
        }
    }
    Ok(count)
}

/// Merged integer counts across many censuses.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CountTotals {
    pub trees: u64,
    pub nodes: u64,
    pub leaves: u64,
    pub counts: BTreeMap<ShapeCode, u64>,
}

impl CountTotals {
    pub fn add(&mut self, c: &FringeCensus) {
        self.trees += 1;
        self.nodes += c.tree_size;
        self.leaves += c.tree_leafcount;
        for (k, v) in &c.counts {
            *self.counts.entry(k.clone()).or_insert(0) += v;
        }
    }

    pub fn merge(&mut self, other: &CountTotals) {
        self.trees += other.trees;
        self.nodes += other.nodes;
        self.leaves += other.leaves;
        for (k, v) in &other.counts {
            *self.counts.entry(k.clone()).or_insert(0) += v;
        }
    }
}

/// Shapes present in a census, sorted.
pub fn shapes_of(c: &FringeCensus) -> Vec<ShapeCode> {
    c.counts.keys().cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> TreeShape {
        TreeShape::parse(s).unwrap()
    }

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn census_of_cherry() {
        let c = census(&t("(*,*)"), 2).unwrap();
        assert_eq!(c.counts.len(), 2);
        assert_eq!(c.count(&t("*")).unwrap(), 2);
        assert_eq!(c.count(&t("(*,*)")).unwrap(), 1);
        assert_eq!(c.total(), 3);
    }

    #[test]
    fn census_of_caterpillar() {
        let t4a = t("(*,(*,(*,*)))");
        let c = census(&t4a, 4).unwrap();
        assert_eq!(c.count(&t("*")).unwrap(), 4);
        assert_eq!(c.count(&t("(*,*)")).unwrap(), 1);
        assert_eq!(c.count(&t("(*,(*,*))")).unwrap(), 1);
        assert_eq!(c.count(&t4a).unwrap(), 1);
        assert_eq!(c.count(&t("((*,*),*)")).unwrap(), 0);
        assert_eq!(c.total(), 7);
        let hist: Vec<_> = c.leaf_size_hist.iter().map(|(k, v)| (*k, *v)).collect();
        assert_eq!(hist, [(1, 4), (2, 1), (3, 1), (4, 1)]);
    }

    #[test]
    fn quenched_probabilities() {
        let c2 = census(&t("(*,*)"), 2).unwrap();
        assert_eq!(quenched_fringe_prob(&c2, &t("*")).unwrap(), rat(2, 3));
        assert_eq!(quenched_qsin(&c2, &t("(*,*)")).unwrap(), rat(1, 1));

        let c4 = census(&t("(*,(*,(*,*)))"), 4).unwrap();
        assert_eq!(quenched_fringe_prob(&c4, &t("(*,(*,*))")).unwrap(), rat(1, 7));
        assert_eq!(quenched_qsin(&c4, &t("(*,*)")).unwrap(), rat(1, 2));
        assert_eq!(quenched_qsin(&c4, &t("*")).unwrap(), rat(1, 1));

        let big = census(&t("((*,*),((*,*),(*,*)))"), 2).unwrap();
        assert_eq!(
            quenched_fringe_prob(&big, &t("(*,(*,*))")),
            Err(FringeError::OutOfCensusRange { leaves: 3, cutoff: 2 })
        );
        // n leaves -> n/(2n-1)
        assert_eq!(quenched_fringe_prob(&big, &t("*")).unwrap(), rat(6, 11));
    }

    #[test]
    fn cutoff_restricts_counts_but_not_sum_identity() {
        let tree = t("((*,*),((*,*),(*,*)))");
        let full = census(&tree, 6).unwrap();
        assert_eq!(full.total(), tree.len() as u64);
        let small = census(&tree, 2).unwrap();
        assert_eq!(small.total(), 6 + 3);
        for m in 1..=6u32 {
            let by_shape: u64 = full
                .counts
                .iter()
                .filter(|(k, _)| k.leafcount() == m as usize)
                .map(|(_, v)| v)
                .sum();
            assert_eq!(Some(&by_shape).filter(|v| **v > 0), full.leaf_size_hist.get(&m));
        }
    }

    #[test]
    fn cladogram_mode_merges_mirrors() {
        let tree = t("((*,(*,*)),((*,*),*))");
        let mut opts = CensusOptions::new(3);
        opts.cladogram = true;
        let c = census_with(&tree, opts).unwrap();
        assert_eq!(c.count(&t("(*,(*,*))")).unwrap(), 2);
        assert_eq!(c.count(&t("((*,*),*)")).unwrap(), 2);
        let oriented = census(&tree, 3).unwrap();
        assert_eq!(oriented.count(&t("(*,(*,*))")).unwrap(), 1);
    }

    #[test]
    fn census_rejects_general_trees() {
        assert_eq!(census(&t("(*,_)"), 3), Err(FringeError::NotFull));
    }

    #[test]
    fn subdivision_count_matches_compressed_census() {
        let g = t("(_,((*,_),((_,*),(*,(*,*)))))");
        let c = census(&g.compress(), 4).unwrap();
        for s in ["*", "(*,*)", "(*,(*,*))", "((*,*),(*,*))"] {
            assert_eq!(
                subdivision_count(&g, &t(s)).unwrap(),
                c.count(&t(s)).unwrap(),
                "{s}"
            );
        }
    }
}
