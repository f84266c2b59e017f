//! Exact shape probabilities and limit constants for the BST, critical
//! beta-splitting, uniform and trie models.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use crate::error::{FringeError, Result};
use crate::expoly::{ExactExpValue, ExpPoly, Poly};
use crate::tree::{metrics, ShapeCode, TreeShape};

/// Largest BST size accepted by [`bst_shape_distribution`].
pub const MAX_BST_ENUMERATION: usize = 12;

fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn int(a: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(a))
}

/// `h_n = 1 + 1/2 + ... + 1/n`.
pub fn harmonic(n: u64) -> BigRational {
    (1..=n).fold(BigRational::zero(), |acc, i| acc + rat(1, i as i64))
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Probability of a shape under a model, keyed by shape code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeDistribution {
    pub n: u64,
    pub probs: BTreeMap<ShapeCode, BigRational>,
}

impl ShapeDistribution {
    pub fn total(&self) -> BigRational {
        self.probs.values().fold(BigRational::zero(), |acc, p| acc + p)
    }

    pub fn get(&self, code: &ShapeCode) -> BigRational {
        self.probs.get(code).cloned().unwrap_or_else(BigRational::zero)
    }
}

/// `P(BST_|t| = t)`: product over nodes of `1 / |t^v|`.
pub fn bst_shape_prob(t: &TreeShape) -> BigRational {
    let denom = t
        .subtree_sizes()
        .iter()
        .fold(BigInt::one(), |acc, &s| acc * BigInt::from(s));
    BigRational::new(BigInt::one(), denom)
}

/// All binary shapes with `n` nodes and their BST probabilities, keyed by
/// [`TreeShape::extended_code`].
pub fn bst_shape_distribution(n: usize) -> Result<ShapeDistribution> {
    if n == 0 {
        return Err(FringeError::InvalidParameter("n must be >= 1".into()));
    }
    if n > MAX_BST_ENUMERATION {
        return Err(FringeError::Guard {
            what: "bst enumeration size",
            value: n as u64,
            limit: MAX_BST_ENUMERATION as u64,
        });
    }
    let probs = TreeShape::all_binary(n)
        .iter()
        .map(|t| (t.extended_code(), bst_shape_prob(t)))
        .collect();
    Ok(ShapeDistribution { n: n as u64, probs })
}

/// `P(CB_m = t)` with split law `(1/i + 1/(m-i)) / (2 h_{m-1})`.
pub fn cb_shape_prob(t: &TreeShape) -> Result<BigRational> {
    t.ensure_full()?;
    let leaves = t.subtree_leafcounts();
    let mut h: Vec<BigRational> = Vec::with_capacity(leaves[0] as usize);
    h.push(BigRational::zero());
    for i in 1..leaves[0] as i64 {
        let next = &h[i as usize - 1] + rat(1, i);
        h.push(next);
    }
    let mut p = BigRational::one();
    for v in 0..t.len() {
        if let (Some(l), Some(_)) = t.children(v) {
            let m = leaves[v] as i64;
            let i = leaves[l] as i64;
            p *= (rat(1, i) + rat(1, m - i)) / (&h[m as usize - 1] * int(2));
        }
    }
    Ok(p)
}

/// Full shapes with `m` leaves and their probabilities under `prob`.
pub fn full_shape_distribution<F>(m: usize, mut prob: F) -> Result<ShapeDistribution>
where
    F: FnMut(&TreeShape) -> Result<BigRational>,
{
    if m == 0 {
        return Err(FringeError::InvalidParameter("m must be >= 1".into()));
    }
    if m > MAX_BST_ENUMERATION + 1 {
        return Err(FringeError::Guard {
            what: "full shape enumeration size",
            value: m as u64,
            limit: MAX_BST_ENUMERATION as u64 + 1,
        });
    }
    let mut probs = BTreeMap::new();
    for t in TreeShape::all_full(m) {
        probs.insert(t.code()?, prob(&t)?);
    }
    Ok(ShapeDistribution { n: m as u64, probs })
}

/// `pi_t = m! q^LPL p^RPL prod_{k=2}^{m-1} (1 - q^k - p^k)^{-nu_k}`.
pub fn pi_t(t: &TreeShape, p: &BigRational) -> Result<BigRational> {
    if *p <= BigRational::zero() || *p >= BigRational::one() {
        return Err(FringeError::InvalidParameter("p must lie in (0,1)".into()));
    }
    let mt = metrics(t)?;
    let q = BigRational::one() - p;
    let mut v = BigRational::from_integer(factorial(mt.leafcount))
        * Pow::pow(&q, mt.lpl)
        * Pow::pow(p, mt.rpl);
    for (&k, &nu) in &mt.nu {
        let split = BigRational::one() - Pow::pow(&q, k) - Pow::pow(p, k);
        v /= Pow::pow(split, nu);
    }
    Ok(v)
}

/// Floating-point `pi_t`.
pub fn pi_t_f64(t: &TreeShape, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(FringeError::InvalidParameter("p must lie in (0,1)".into()));
    }
    let mt = metrics(t)?;
    let q = 1.0 - p;
    let ln_fact = libm::lgamma(mt.leafcount as f64 + 1.0);
    let mut ln = ln_fact + mt.lpl as f64 * libm::log(q) + mt.rpl as f64 * libm::log(p);
    for (&k, &nu) in &mt.nu {
        let split = 1.0 - libm::pow(q, k as f64) - libm::pow(p, k as f64);
        ln -= nu as f64 * libm::log(split);
    }
    Ok(libm::exp(ln))
}

/// `G_leaf(x) = (e^{2x} - 1)/2`.
pub fn g_leaf() -> ExpPoly {
    &ExpPoly::exp(2).scale(&rat(1, 2)) - &ExpPoly::one().scale(&rat(1, 2))
}

/// Memo table for the exponential polynomials `G_t`.
///
/// Keyed by oriented shape code; one table per worker.
#[derive(Clone, Debug, Default)]
pub struct GTable {
    memo: BTreeMap<ShapeCode, ExpPoly>,
}

impl GTable {
    pub fn new() -> Self {
        GTable::default()
    }

    pub fn len(&self) -> usize {
        self.memo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.memo.is_empty()
    }

    /// `G_t = kernel(G_{t_L} G_{t_R})` with `G_leaf` at the leaves.
    pub fn g(&mut self, t: &TreeShape) -> Result<ExpPoly> {
        t.ensure_full()?;
        let sizes = t.subtree_sizes();
        let keys: Vec<ShapeCode> = (0..t.len())
            .map(|i| t.code_of_subtree(i, sizes[i] as usize))
            .collect();
        for i in (0..t.len()).rev() {
            if self.memo.contains_key(&keys[i]) {
                continue;
            }
            let g = match t.children(i) {
                (Some(l), Some(r)) => (&self.memo[&keys[l]] * &self.memo[&keys[r]]).kernel_integral(),
                _ => g_leaf(),
            };
            assert!(g.exponents_are_even(), "odd exponent in G_t");
            self.memo.insert(keys[i].clone(), g);
        }
        Ok(self.memo[&keys[0]].clone())
    }

    /// `int_0^1 (1-x)^2 G_{t_L}(x) G_{t_R}(x) dx`; `1/3` for a leaf.
    pub fn beta_hat(&mut self, t: &TreeShape) -> Result<ExactExpValue> {
        t.ensure_full()?;
        let (Some(l), Some(r)) = t.root_subtrees() else {
            return Ok(ExactExpValue::rational(rat(1, 3)));
        };
        let prod = &self.g(&l)? * &self.g(&r)?;
        let weight = Poly::from_coeffs(alloc::vec![int(1), rat(-2, 1), int(1)]);
        Ok(prod.mul_poly(&weight).integral_0_1())
    }

    /// `int_0^1 2x(1-x) G_t(x) dx`, equal to [`GTable::beta_hat`].
    pub fn beta_hat_by_parts(&mut self, t: &TreeShape) -> Result<ExactExpValue> {
        let g = self.g(t)?;
        let weight = Poly::from_coeffs(alloc::vec![BigRational::zero(), int(2), rat(-2, 1)]);
        Ok(g.mul_poly(&weight).integral_0_1())
    }
}

pub fn g_poly(t: &TreeShape) -> Result<ExpPoly> {
    GTable::new().g(t)
}

/// Limit of `N_t(compressed BST_n) / n`.
pub fn beta_hat(t: &TreeShape) -> Result<ExactExpValue> {
    GTable::new().beta_hat(t)
}

pub fn beta_hat_by_parts(t: &TreeShape) -> Result<ExactExpValue> {
    GTable::new().beta_hat_by_parts(t)
}

/// `2/((k+1)(k+2)) P(BST_k = t_int)`, `k` internal nodes; the limit of
/// `N_t(extended BST_n) / n`.
pub fn ebst_beta(t: &TreeShape) -> Result<BigRational> {
    t.ensure_full()?;
    let inner = t
        .delete_leaves()
        .ok_or_else(|| FringeError::InvalidParameter("shape must have at least 2 leaves".into()))?;
    let k = inner.len() as i64;
    Ok(rat(2, (k + 1) * (k + 2)) * bst_shape_prob(&inner))
}

/// Rational `r = h_{m-1} / (m(m-1)) P(CB_m = t)`; the fringe limit is
/// `3r/pi^2` and the leaf-share limit `6mr/pi^2`.
pub fn cb_limit(t: &TreeShape) -> Result<BigRational> {
    let m = t.leafcount() as i64;
    if m < 2 {
        return Err(FringeError::InvalidParameter("shape must have at least 2 leaves".into()));
    }
    Ok(harmonic(m as u64 - 1) * rat(1, m * (m - 1)) * cb_shape_prob(t)?)
}

/// `2^{1-2m}`.
pub fn uniform_limit(t: &TreeShape) -> Result<BigRational> {
    t.ensure_full()?;
    let m = t.leafcount() as u32;
    Ok(BigRational::new(BigInt::from(2), BigInt::from(2).pow(2 * m)))
}

/// `2^{1-2m} - (2m-1) 2^{3-4m}`, limit of `Var N_t / n` for any shape
/// with `m` leaves.
pub fn uniform_variance(m: u32) -> Result<BigRational> {
    if m == 0 {
        return Err(FringeError::InvalidParameter("m must be >= 1".into()));
    }
    let two = BigInt::from(2);
    let a = BigRational::new(two.clone(), two.clone().pow(2 * m));
    let b = BigRational::new(BigInt::from(8 * (2 * m as i64 - 1)), two.pow(4 * m));
    Ok(a - b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> TreeShape {
        TreeShape::parse(s).unwrap()
    }

    #[test]
    fn bst_probabilities() {
        assert_eq!(bst_shape_prob(&t("*")), rat(1, 1));
        assert_eq!(bst_shape_prob(&t("(*,_)")), rat(1, 2));
        assert_eq!(bst_shape_prob(&t("(_,(*,_))")), rat(1, 6));
        assert_eq!(bst_shape_prob(&t("(*,*)")), rat(1, 3));
        let d = bst_shape_distribution(3).unwrap();
        let mut ps: Vec<_> = d.probs.values().cloned().collect();
        ps.sort();
        assert_eq!(ps, [rat(1, 6), rat(1, 6), rat(1, 6), rat(1, 6), rat(1, 3)]);
        assert!(bst_shape_distribution(13).is_err());
    }

    #[test]
    fn critical_split_probabilities() {
        assert_eq!(cb_shape_prob(&t("*")).unwrap(), rat(1, 1));
        assert_eq!(cb_shape_prob(&t("(*,*)")).unwrap(), rat(1, 1));
        assert_eq!(cb_shape_prob(&t("(*,(*,*))")).unwrap(), rat(1, 2));
        assert_eq!(cb_shape_prob(&t("(*,(*,(*,*)))")).unwrap(), rat(2, 11));
        assert_eq!(cb_shape_prob(&t("((*,*),(*,*))")).unwrap(), rat(3, 11));
    }

    #[test]
    fn trie_shape_probabilities() {
        let half = rat(1, 2);
        assert_eq!(pi_t(&t("*"), &half).unwrap(), rat(1, 1));
        assert_eq!(pi_t(&t("(*,*)"), &half).unwrap(), rat(1, 2));
        let p = rat(1, 3);
        let q = rat(2, 3);
        assert_eq!(pi_t(&t("(*,*)"), &p).unwrap(), rat(4, 9));
        assert_eq!(pi_t(&t("(*,(*,*))"), &p).unwrap(), int(3) * &p * &p * &q);
        assert_eq!(pi_t(&t("(*,(*,(*,*)))"), &p).unwrap(), int(4) * Pow::pow(&p, 4u32) * &q);
        assert_eq!(pi_t(&t("(*,((*,*),*))"), &p).unwrap(), int(4) * Pow::pow(&p, 3u32) * &q * &q);
        assert_eq!(pi_t(&t("((*,*),(*,*))"), &p).unwrap(), int(6) * &p * &p * &q * &q);
        let f = pi_t_f64(&t("((*,*),(*,*))"), 0.3).unwrap();
        assert!((f - 6.0 * 0.09 * 0.49).abs() < 1e-14);
    }

    #[test]
    fn cherry_function() {
        let g2 = g_poly(&t("(*,*)")).unwrap();
        assert_eq!(g2.to_string(), "e^(4x)/8 - x*e^(2x)/2 - 1/8");
    }

    #[test]
    fn leaf_beta_hat_both_ways() {
        assert_eq!(beta_hat(&t("*")).unwrap(), ExactExpValue::rational(rat(1, 3)));
        assert_eq!(beta_hat_by_parts(&t("*")).unwrap(), ExactExpValue::rational(rat(1, 3)));
    }

    #[test]
    fn extended_bst_constants() {
        assert_eq!(ebst_beta(&t("(*,*)")).unwrap(), rat(1, 3));
        assert_eq!(ebst_beta(&t("(*,(*,*))")).unwrap() / int(2), rat(1, 24));
        assert_eq!(ebst_beta(&t("(*,(*,(*,*)))")).unwrap() / int(2), rat(1, 120));
        assert_eq!(ebst_beta(&t("((*,*),(*,*))")).unwrap() / int(2), rat(1, 60));
        assert!(ebst_beta(&t("*")).is_err());
    }

    #[test]
    fn uniform_constants() {
        assert_eq!(uniform_limit(&t("(*,*)")).unwrap(), rat(1, 8));
        assert_eq!(uniform_limit(&t("(*,(*,(*,*)))")).unwrap(), rat(1, 128));
        assert_eq!(uniform_variance(2).unwrap(), rat(1, 32));
        assert_eq!(uniform_variance(1).unwrap(), BigRational::zero());
    }

    #[test]
    fn harmonic_and_cb_limits() {
        assert_eq!(harmonic(3), rat(11, 6));
        // fringe 3r/pi^2 = 3/(2 pi^2) for the cherry
        assert_eq!(cb_limit(&t("(*,*)")).unwrap() * int(3), rat(3, 2));
        assert_eq!(cb_limit(&t("((*,*),(*,*))")).unwrap() * int(3), rat(1, 8));
    }
}
