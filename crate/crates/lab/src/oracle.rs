//! Exact finite-size expectations by enumeration.

use fringe_core::census::census;
use fringe_core::exact::bst_shape_distribution;
use fringe_core::{FringeError, TreeShape};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub const MAX_BST_ORACLE: usize = 10;
pub const MAX_UNIFORM_ORACLE: usize = 14;

/// Which full tree is built from the random BST.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BstVariant {
    Compressed,
    Extended,
}

fn guard(n: usize, limit: usize, what: &'static str) -> Result<(), FringeError> {
    if n == 0 {
        return Err(FringeError::InvalidParameter("n must be >= 1".into()));
    }
    if n > limit {
        return Err(FringeError::Guard {
            what,
            value: n as u64,
            limit: limit as u64,
        });
    }
    Ok(())
}

/// `E N_t(variant(BST_n))` summed over [`bst_shape_distribution`].
pub fn oracle_bst_expectation(t: &TreeShape, n: usize, variant: BstVariant) -> Result<BigRational, FringeError> {
    guard(n, MAX_BST_ORACLE, "bst oracle size")?;
    t.ensure_full()?;
    let cutoff = t.leafcount() as u32;
    let mut sum = BigRational::zero();
    for (code, prob) in &bst_shape_distribution(n)?.probs {
        let extended = code.decode()?;
        let full = match variant {
            BstVariant::Extended => extended,
            BstVariant::Compressed => extended.delete_leaves().expect("n >= 1").compress(),
        };
        if full.leafcount() < t.leafcount() {
            continue;
        }
        let c = census(&full, cutoff)?.count(t)?;
        sum += prob * BigRational::from_integer(BigInt::from(c));
    }
    Ok(sum)
}

/// Full binary trees with `j` leaves, `j = 0..=n` (index 0 unused).
fn catalan_table(n: usize) -> Vec<BigInt> {
    let mut c = vec![BigInt::zero(); n + 1];
    if n >= 1 {
        c[1] = BigInt::one();
    }
    for j in 2..=n {
        let mut s = BigInt::zero();
        for i in 1..j {
            s += &c[i] * &c[j - i];
        }
        c[j] = s;
    }
    c
}

/// Total occurrences over all trees with `n` leaves, given how many trees
/// with `j` leaves match at the root.
fn occurrences(n: usize, root_matches: impl Fn(usize) -> BigInt) -> (BigInt, BigInt) {
    let c = catalan_table(n);
    let mut a = vec![BigInt::zero(); n + 1];
    for j in 1..=n {
        let mut s = root_matches(j);
        for i in 1..j {
            s += &a[i] * &c[j - i] + &c[i] * &a[j - i];
        }
        a[j] = s;
    }
    (a[n].clone(), c[n].clone())
}

/// `E N_t(U_n)` for the uniform full binary tree with `n` leaves.
pub fn oracle_uniform_expectation(t: &TreeShape, n: usize) -> Result<BigRational, FringeError> {
    guard(n, MAX_UNIFORM_ORACLE, "uniform oracle size")?;
    t.ensure_full()?;
    let m = t.leafcount();
    let (a, c) = occurrences(n, |j| if j == m { BigInt::one() } else { BigInt::zero() });
    Ok(BigRational::new(a, c))
}

/// `E N_m(U_n)`: nodes whose fringe tree has `m` leaves.
pub fn oracle_uniform_leafsize_expectation(m: usize, n: usize) -> Result<BigRational, FringeError> {
    guard(n, MAX_UNIFORM_ORACLE, "uniform oracle size")?;
    let cm = catalan_table(m.max(1))[m.max(1)].clone();
    let (a, c) = occurrences(n, |j| if j == m { cm.clone() } else { BigInt::zero() });
    Ok(BigRational::new(a, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> TreeShape {
        TreeShape::parse(s).unwrap()
    }

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn trivial_values() {
        assert_eq!(oracle_bst_expectation(&t("(*,*)"), 1, BstVariant::Extended).unwrap(), rat(1, 1));
        assert_eq!(oracle_uniform_expectation(&t("(*,*)"), 3).unwrap(), rat(1, 1));
        assert_eq!(oracle_uniform_expectation(&t("((*,*),(*,*))"), 4).unwrap(), rat(1, 5));
        assert_eq!(oracle_uniform_expectation(&t("*"), 9).unwrap(), rat(9, 1));
    }

    #[test]
    fn compressed_bst_of_three() {
        // The balanced shape (1/3) compresses to t_2; the four chains to a leaf.
        assert_eq!(oracle_bst_expectation(&t("(*,*)"), 3, BstVariant::Compressed).unwrap(), rat(1, 3));
    }

    #[test]
    fn guards() {
        assert!(oracle_bst_expectation(&t("(*,*)"), 11, BstVariant::Compressed).is_err());
        assert!(oracle_uniform_expectation(&t("(*,*)"), 15).is_err());
        assert!(oracle_uniform_expectation(&t("(*,_)"), 5).is_err());
    }
}
