//! Seedable samplers for the random tree models.
//!
//! Every sampler is generic over [`rand::Rng`]; [`RandomSource`] is the
//! reproducible ChaCha-based source used by the lab.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{FringeError, Result};
use crate::tree::TreeShape;

/// Largest leaf (or node) count accepted by the samplers.
pub const MAX_SAMPLE_SIZE: u64 = 1 << 30;

/// Below this many strings the binomial split is drawn by inversion.
const INVERSION_LIMIT: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Model {
    Trie,
    Patricia,
    Bst,
    Ebst,
    Cbst,
    BetaSplit,
    UniformFull,
}

impl Model {
    pub const ALL: [Model; 7] = [
        Model::Trie,
        Model::Patricia,
        Model::Bst,
        Model::Ebst,
        Model::Cbst,
        Model::BetaSplit,
        Model::UniformFull,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Model::Trie => "trie",
            Model::Patricia => "patricia",
            Model::Bst => "bst",
            Model::Ebst => "ebst",
            Model::Cbst => "cbst",
            Model::BetaSplit => "beta_split",
            Model::UniformFull => "uniform_full",
        }
    }

    /// Whether every draw is a full binary tree.
    pub fn is_full(self) -> bool {
        !matches!(self, Model::Trie | Model::Bst)
    }

    pub fn uses_p(self) -> bool {
        matches!(self, Model::Trie | Model::Patricia)
    }

    pub fn uses_beta(self) -> bool {
        self == Model::BetaSplit
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = FringeError;

    fn from_str(s: &str) -> Result<Model> {
        Model::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| FringeError::InvalidParameter(format!("unknown model `{s}`")))
    }
}

/// A model together with its size and parameters.
///
/// `n` is the leaf count for trie, patricia, beta_split and uniform_full,
/// and the node count of the underlying BST for bst, ebst and cbst.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelSpec {
    pub model: Model,
    pub n: u64,
    pub p: f64,
    pub beta: f64,
}

impl ModelSpec {
    pub fn new(model: Model, n: u64) -> Self {
        ModelSpec {
            model,
            n,
            p: 0.5,
            beta: -1.0,
        }
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_size(self.n)?;
        if self.model.uses_p() {
            check_p(self.p)?;
        }
        if self.model.uses_beta() {
            check_beta(self.beta)?;
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<TreeShape> {
        match self.model {
            Model::Trie => sample_trie(self.n, self.p, rng),
            Model::Patricia => sample_patricia(self.n, self.p, rng),
            Model::Bst => sample_bst(self.n, rng),
            Model::Ebst => sample_ebst(self.n, rng),
            Model::Cbst => sample_cbst(self.n, rng),
            Model::BetaSplit => sample_beta_split(self.n, self.beta, rng),
            Model::UniformFull => sample_uniform_full(self.n, rng),
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} n={}", self.model, self.n)?;
        if self.model.uses_p() {
            write!(f, " p={}", self.p)?;
        }
        if self.model.uses_beta() {
            write!(f, " beta={}", self.beta)?;
        }
        Ok(())
    }
}

fn check_size(n: u64) -> Result<()> {
    if n == 0 {
        return Err(FringeError::InvalidParameter("n must be >= 1".into()));
    }
    if n > MAX_SAMPLE_SIZE {
        return Err(FringeError::Guard {
            what: "n",
            value: n,
            limit: MAX_SAMPLE_SIZE,
        });
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(FringeError::InvalidParameter(format!("p = {p} is not in (0,1)")))
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > -2.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(FringeError::InvalidParameter(format!("beta = {beta} must exceed -2")))
    }
}

/// Replicate seed derived from a master seed.
pub fn replicate_seed(master: u64, replicate: u64) -> u64 {
    master ^ replicate
}

/// ChaCha8 generator identified by `(seed, stream)` with a resumable
/// word position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RandomSource { seed, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.rng.get_stream()
    }

    /// Position in the keystream, in 32-bit words.
    pub fn word_pos(&self) -> u128 {
        self.rng.get_word_pos()
    }

    pub fn set_word_pos(&mut self, pos: u128) {
        self.rng.set_word_pos(pos);
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

fn ln_choose(k: u64, i: u64) -> f64 {
    libm::lgamma(k as f64 + 1.0) - libm::lgamma(i as f64 + 1.0) - libm::lgamma((k - i) as f64 + 1.0)
}

/// Inverts the Binomial(k, q) mass function restricted to `lo..=hi`.
fn binomial_inversion<R: Rng + ?Sized>(k: u64, q: f64, lo: u64, hi: u64, rng: &mut R) -> u64 {
    let ln_q = libm::log(q);
    let ln_p = libm::log1p(-q);
    let mut pmf = [0.0f64; INVERSION_LIMIT as usize + 1];
    let mut total = 0.0;
    for i in lo..=hi {
        let w = libm::exp(ln_choose(k, i) + i as f64 * ln_q + (k - i) as f64 * ln_p);
        pmf[i as usize] = w;
        total += w;
    }
    let mut u = rng.random::<f64>() * total;
    for i in lo..hi {
        u -= pmf[i as usize];
        if u < 0.0 {
            return i;
        }
    }
    hi
}

/// `L ~ Binomial(k, q)`.
pub fn binomial<R: Rng + ?Sized>(k: u64, q: f64, rng: &mut R) -> u64 {
    if k == 0 {
        0
    } else if k < INVERSION_LIMIT {
        binomial_inversion(k, q, 0, k, rng)
    } else {
        Binomial::new(k, q).expect("q in (0,1)").sample(rng)
    }
}

/// `L ~ Binomial(k, q)` conditioned on `1 <= L <= k - 1`; requires `k >= 2`.
pub fn binomial_nondegenerate<R: Rng + ?Sized>(k: u64, q: f64, rng: &mut R) -> u64 {
    debug_assert!(k >= 2);
    if k < INVERSION_LIMIT {
        return binomial_inversion(k, q, 1, k - 1, rng);
    }
    // Count successes of the rarer outcome, M ~ Binomial(k, r) given M >= 1:
    // the first success index is truncated geometric, the rest binomial.
    let r = q.min(1.0 - q);
    let ln_miss = libm::log1p(-r);
    let at_least_one = -libm::expm1(k as f64 * ln_miss);
    loop {
        let u = rng.random::<f64>();
        let j = 1 + (libm::log1p(-u * at_least_one) / ln_miss) as u64;
        let j = j.clamp(1, k);
        let m = 1 + binomial(k - j, r, rng);
        if m < k {
            return if r == q { m } else { k - m };
        }
    }
}

/// Trie of `n` independent strings whose bits are 1 with probability `p`;
/// strings starting with 0 go left.
pub fn sample_trie<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> Result<TreeShape> {
    check_size(n)?;
    check_p(p)?;
    let q = 1.0 - p;
    let t = TreeShape::build(n, |k| {
        if k == 1 {
            return (None, None);
        }
        let l = binomial(k, q, rng);
        let left = (l > 0).then_some(l);
        let right = (l < k).then_some(k - l);
        (left, right)
    });
    debug_assert_eq!(t.leafcount() as u64, n);
    Ok(t)
}

/// Patricia trie: the trie with unary chains removed, drawn directly.
pub fn sample_patricia<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> Result<TreeShape> {
    check_size(n)?;
    check_p(p)?;
    let q = 1.0 - p;
    let t = TreeShape::build(n, |k| {
        if k == 1 {
            return (None, None);
        }
        let l = binomial_nondegenerate(k, q, rng);
        (Some(l), Some(k - l))
    });
    debug_assert_eq!(t.leafcount() as u64, n);
    Ok(t)
}

/// Random binary search tree with `n` nodes.
pub fn sample_bst<R: Rng + ?Sized>(n: u64, rng: &mut R) -> Result<TreeShape> {
    check_size(n)?;
    let t = TreeShape::build(n, |k| {
        let l = rng.random_range(0..k);
        let r = k - 1 - l;
        ((l > 0).then_some(l), (r > 0).then_some(r))
    });
    debug_assert_eq!(t.len() as u64, n);
    Ok(t)
}

/// Extended BST: full, with `n + 1` leaves.
pub fn sample_ebst<R: Rng + ?Sized>(n: u64, rng: &mut R) -> Result<TreeShape> {
    Ok(sample_bst(n, rng)?.extend())
}

/// Compressed BST: full, with as many leaves as the BST.
pub fn sample_cbst<R: Rng + ?Sized>(n: u64, rng: &mut R) -> Result<TreeShape> {
    Ok(sample_bst(n, rng)?.compress())
}

/// Beta-splitting tree with `n` leaves. `beta == -1` uses the harmonic
/// closed form; other values normalize log-gamma weights per node.
pub fn sample_beta_split<R: Rng + ?Sized>(n: u64, beta: f64, rng: &mut R) -> Result<TreeShape> {
    check_size(n)?;
    check_beta(beta)?;
    let t = if beta == -1.0 {
        // harmonic[j] = h_j
        let mut harmonic = vec![0.0f64; n as usize];
        for j in 1..n as usize {
            harmonic[j] = harmonic[j - 1] + 1.0 / j as f64;
        }
        TreeShape::build(n, |k| {
            if k == 1 {
                return (None, None);
            }
            let i = critical_split(k, &harmonic, rng);
            (Some(i), Some(k - i))
        })
    } else {
        let mut weights = Vec::new();
        TreeShape::build(n, |k| {
            if k == 1 {
                return (None, None);
            }
            let i = beta_split(k, beta, &mut weights, rng);
            (Some(i), Some(k - i))
        })
    };
    debug_assert_eq!(t.leafcount() as u64, n);
    Ok(t)
}

/// `P(i) = (1/i + 1/(k-i)) / (2 h_{k-1})`: pick `j` with weight `1/j`,
/// then reflect to `k - j` with probability 1/2.
fn critical_split<R: Rng + ?Sized>(k: u64, harmonic: &[f64], rng: &mut R) -> u64 {
    let top = (k - 1) as usize;
    let u = rng.random::<f64>() * harmonic[top];
    // smallest j in 1..=top with h_j > u
    let j = harmonic[1..=top].partition_point(|&h| h <= u) + 1;
    let j = j.min(top) as u64;
    if rng.random_bool(0.5) {
        j
    } else {
        k - j
    }
}

fn beta_split<R: Rng + ?Sized>(k: u64, beta: f64, weights: &mut Vec<f64>, rng: &mut R) -> u64 {
    let lw = |i: u64| {
        let (i, j) = (i as f64, (k - i) as f64);
        libm::lgamma(beta + i + 1.0) + libm::lgamma(beta + j + 1.0)
            - libm::lgamma(i + 1.0)
            - libm::lgamma(j + 1.0)
    };
    weights.clear();
    weights.extend((1..k).map(lw));
    let max = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for w in weights.iter_mut() {
        *w = libm::exp(*w - max);
        total += *w;
    }
    let mut u = rng.random::<f64>() * total;
    for (idx, w) in weights.iter().enumerate() {
        u -= w;
        if u < 0.0 {
            return idx as u64 + 1;
        }
    }
    k - 1
}

/// Uniform full binary tree with `n` leaves, grown by random leaf
/// insertion: each step picks one of the `2k - 1` nodes and a side
/// uniformly, and splices a new internal node with a new leaf there.
pub fn sample_uniform_full<R: Rng + ?Sized>(n: u64, rng: &mut R) -> Result<TreeShape> {
    check_size(n)?;
    const NONE: u32 = u32::MAX;
    let cap = 2 * n as usize - 1;
    let mut left = Vec::with_capacity(cap);
    let mut right = Vec::with_capacity(cap);
    let mut parent = Vec::with_capacity(cap);
    left.push(NONE);
    right.push(NONE);
    parent.push(NONE);
    let mut root = 0u32;
    for _ in 1..n {
        let size = left.len() as u32;
        let x = rng.random_range(0..size);
        let new_leaf = size;
        let inner = size + 1;
        left.push(NONE);
        right.push(NONE);
        parent.push(inner);
        let px = parent[x as usize];
        let (l, r) = if rng.random_bool(0.5) {
            (new_leaf, x)
        } else {
            (x, new_leaf)
        };
        left.push(l);
        right.push(r);
        parent.push(px);
        parent[x as usize] = inner;
        if px == NONE {
            root = inner;
        } else if left[px as usize] == x {
            left[px as usize] = inner;
        } else {
            right[px as usize] = inner;
        }
    }
    let t = TreeShape::build(root, |i| {
        let (l, r) = (left[i as usize], right[i as usize]);
        ((l != NONE).then_some(l), (r != NONE).then_some(r))
    });
    debug_assert_eq!(t.leafcount() as u64, n);
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> TreeShape {
        TreeShape::parse(s).unwrap()
    }

    #[test]
    fn trivial_sizes() {
        let mut rng = RandomSource::new(1);
        for model in Model::ALL {
            let spec = ModelSpec::new(model, 1);
            let tree = spec.sample(&mut rng).unwrap();
            let expect = if model == Model::Ebst { "(*,*)" } else { "*" };
            assert_eq!(tree, t(expect), "{model}");
        }
        for _ in 0..20 {
            assert_eq!(sample_patricia(2, 0.3, &mut rng).unwrap(), t("(*,*)"));
            assert_eq!(sample_uniform_full(2, &mut rng).unwrap(), t("(*,*)"));
        }
    }

    #[test]
    fn leaf_counts_hold() {
        let mut rng = RandomSource::new(7);
        for n in [2u64, 3, 10, 100, 1000] {
            assert_eq!(sample_trie(n, 0.3, &mut rng).unwrap().leafcount() as u64, n);
            let pat = sample_patricia(n, 0.7, &mut rng).unwrap();
            assert!(pat.is_full());
            assert_eq!(pat.leafcount() as u64, n);
            assert_eq!(sample_bst(n, &mut rng).unwrap().len() as u64, n);
            assert_eq!(sample_ebst(n, &mut rng).unwrap().leafcount() as u64, n + 1);
            for beta in [-1.9, -1.5, -1.0, 0.0, 3.0] {
                let b = sample_beta_split(n, beta, &mut rng).unwrap();
                assert!(b.is_full());
                assert_eq!(b.leafcount() as u64, n);
            }
            assert_eq!(sample_uniform_full(n, &mut rng).unwrap().leafcount() as u64, n);
        }
    }

    #[test]
    fn parameter_validation() {
        let mut rng = RandomSource::new(0);
        assert!(sample_beta_split(3, -2.0, &mut rng).is_err());
        assert!(sample_trie(3, 1.0, &mut rng).is_err());
        assert!(sample_patricia(3, 0.0, &mut rng).is_err());
        assert!(sample_bst(0, &mut rng).is_err());
        assert!("quadtree".parse::<Model>().is_err());
        for m in Model::ALL {
            assert_eq!(m.name().parse::<Model>().unwrap(), m);
        }
    }

    #[test]
    fn same_seed_same_tree() {
        for model in Model::ALL {
            let spec = ModelSpec::new(model, 500).with_p(0.4);
            let a = spec.sample(&mut RandomSource::with_stream(42, 3)).unwrap();
            let b = spec.sample(&mut RandomSource::with_stream(42, 3)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn word_position_resumes() {
        let mut a = RandomSource::new(9);
        let _ = a.next_u64();
        let pos = a.word_pos();
        let x = a.next_u64();
        let mut b = RandomSource::new(9);
        b.set_word_pos(pos);
        assert_eq!(b.next_u64(), x);
    }

    #[test]
    fn large_binomial_is_in_range() {
        let mut rng = RandomSource::new(3);
        for _ in 0..100 {
            let l = binomial_nondegenerate(1000, 0.999, &mut rng);
            assert!((1..1000).contains(&l));
            assert!(binomial(200, 0.5, &mut rng) <= 200);
        }
    }

    #[test]
    fn extreme_p_does_not_stall() {
        let mut rng = RandomSource::new(5);
        let tree = sample_patricia(300, 1e-9, &mut rng).unwrap();
        assert_eq!(tree.leafcount(), 300);
        let trie = sample_trie(50, 1e-3, &mut rng).unwrap();
        assert_eq!(trie.leafcount(), 50);
    }
}
