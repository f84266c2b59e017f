//! Fringe subtree statistics of random full binary trees.
//!
//! Shapes and their codes, fringe censuses, seedable samplers for the
//! trie, Patricia, BST, beta-splitting and uniform models, exact limit
//! constants, and the oscillating Patricia asymptotics. `no_std` with
//! `alloc`.

#![cfg_attr(not(test), no_std)]
extern crate alloc;

pub mod census;
pub mod error;
pub mod exact;
pub mod expoly;
pub mod gamma;
pub mod limits;
pub mod patricia;
pub mod sampler;
pub mod tree;

pub use census::{census, census_with, quenched_fringe_prob, quenched_qsin, CensusOptions, FringeCensus};
pub use error::{FringeError, Result};
pub use exact::{beta_hat, bst_shape_prob, cb_shape_prob, pi_t, GTable, ShapeDistribution};
pub use expoly::{ExactExpValue, ExpPoly, Poly};
pub use gamma::complex_gamma;
pub use limits::{limit_fringe, limit_qsin, LimitParams, LimitValue};
pub use patricia::{detect_period, MellinKernel, PeriodicConstant, Periodicity, SourceParams};
pub use sampler::{Model, ModelSpec, RandomSource};
pub use tree::{metrics, ShapeCode, TreeMetrics, TreeShape};
