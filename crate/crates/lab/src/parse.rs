//! Parsers for command-line values.

use std::str::FromStr;

use fringe_core::Model;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{LabError, Result};

fn usage(msg: String) -> LabError {
    LabError::Usage(msg)
}

/// Exact rational from `a/b`, an integer, or a plain decimal such as `0.3`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || usage(format!("`{s}` is not a fraction or decimal"));
    if let Some((a, b)) = s.split_once('/') {
        let a = BigInt::from_str(a.trim()).map_err(|_| bad())?;
        let b = BigInt::from_str(b.trim()).map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if (int.is_empty() && frac.is_empty()) || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
    let v = BigRational::new(num, BigInt::from(10).pow(frac.len() as u32));
    Ok(if neg { -v } else { v })
}

/// Probability strictly inside `(0, 1)`.
pub fn parse_probability(s: &str) -> Result<BigRational> {
    let p = parse_rational(s)?;
    if !p.is_positive() || p >= BigRational::one() {
        return Err(usage(format!("p = {s} is not in (0,1)")));
    }
    Ok(p)
}

/// Comma-separated sizes; each may be `2^k`.
pub fn parse_sizes(s: &str) -> Result<Vec<u64>> {
    s.split(',').map(|x| parse_size(x.trim())).collect()
}

pub fn parse_size(s: &str) -> Result<u64> {
    let bad = || usage(format!("`{s}` is not a size"));
    if let Some((b, e)) = s.split_once('^') {
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        let e: u32 = e.trim().parse().map_err(|_| bad())?;
        return b.checked_pow(e).ok_or_else(bad);
    }
    s.replace('_', "").parse().map_err(|_| bad())
}

/// `2^lo..2^hi` as the exponent pair.
pub fn parse_grid(s: &str) -> Result<(u32, u32)> {
    let bad = || usage(format!("`{s}` is not a grid like 2^10..2^20"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let exp = |x: &str| -> Result<u32> {
        let e = x.trim().strip_prefix("2^").ok_or_else(bad)?;
        e.parse().map_err(|_| bad())
    };
    let (lo, hi) = (exp(a)?, exp(b)?);
    if lo > hi || hi > 40 {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// `a/b` with positive integers.
pub fn parse_ratio(s: &str) -> Result<(u64, u64)> {
    let bad = || usage(format!("`{s}` is not a ratio a/b"));
    let (a, b) = s.split_once('/').ok_or_else(bad)?;
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || b == 0 {
        return Err(bad());
    }
    Ok((a, b))
}

/// Model name with aliases; `cb` fixes `beta = -1`.
pub fn parse_model(s: &str) -> Result<(Model, Option<f64>)> {
    Ok(match s.trim() {
        "cb" | "critical" => (Model::BetaSplit, Some(-1.0)),
        "beta" | "beta-split" => (Model::BetaSplit, None),
        "uniform" | "uniform-full" => (Model::UniformFull, None),
        other => (Model::from_str(other).map_err(|e| usage(e.to_string()))?, None),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("0.3").unwrap(), rat(3, 10));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("2").unwrap(), rat(2, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
        assert!(parse_probability("1").is_err());
        assert!(parse_probability("0").is_err());
    }

    #[test]
    fn sizes_and_grids() {
        assert_eq!(parse_sizes("10, 2^4,1_000").unwrap(), vec![10, 16, 1000]);
        assert_eq!(parse_grid("2^10..2^20").unwrap(), (10, 20));
        assert!(parse_grid("2^20..2^10").is_err());
        assert_eq!(parse_ratio("1/1").unwrap(), (1, 1));
    }

    #[test]
    fn models() {
        assert_eq!(parse_model("cb").unwrap(), (Model::BetaSplit, Some(-1.0)));
        assert_eq!(parse_model("uniform").unwrap(), (Model::UniformFull, None));
        assert_eq!(parse_model("ebst").unwrap(), (Model::Ebst, None));
        assert!(parse_model("splay").is_err());
    }
}
