//! Limit constants of the fringe distribution for every full-tree model.
//!
//! `limit_fringe` is the limit of `N_t / |T|`; `limit_qsin` is the limit
//! of `N_t * leafcount(t) / leafcount(T)`. Each is computed from its own
//! closed form, so `qsin = 2 m * fringe` is a check rather than a
//! definition.

use alloc::format;
use alloc::string::String;
use core::f64::consts::PI;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::error::{FringeError, Result};
use crate::exact::{beta_hat, bst_shape_prob, cb_shape_prob, ebst_beta, harmonic, pi_t, uniform_limit};
use crate::expoly::{decimal_string, ExactExpValue};
use crate::patricia::entropy;
use crate::sampler::Model;
use crate::tree::TreeShape;

fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// An exact or entropy-scaled limit constant.
#[derive(Clone, Debug, PartialEq)]
pub enum LimitValue {
    Rational(BigRational),
    /// Rational combination of powers of `e`.
    Exp(ExactExpValue),
    /// `c / pi^2`.
    InvPiSquared(BigRational),
    /// `c / H` with `H` the source entropy in nats.
    InvEntropy { coeff: BigRational, entropy: f64 },
}

impl LimitValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            LimitValue::Rational(c) => c.to_f64().unwrap_or(f64::NAN),
            LimitValue::Exp(v) => v.to_f64(),
            LimitValue::InvPiSquared(c) => c.to_f64().unwrap_or(f64::NAN) / (PI * PI),
            LimitValue::InvEntropy { coeff, entropy } => coeff.to_f64().unwrap_or(f64::NAN) / entropy,
        }
    }

    /// Exact multiple; the transcendental factor is untouched.
    pub fn scale(&self, c: &BigRational) -> LimitValue {
        match self {
            LimitValue::Rational(a) => LimitValue::Rational(a * c),
            LimitValue::Exp(v) => LimitValue::Exp(v.scale(c)),
            LimitValue::InvPiSquared(a) => LimitValue::InvPiSquared(a * c),
            LimitValue::InvEntropy { coeff, entropy } => LimitValue::InvEntropy {
                coeff: coeff * c,
                entropy: *entropy,
            },
        }
    }

    /// Value rounded to `places` decimals; exact ties (only possible for
    /// rational values) go to the even digit.
    pub fn rounded(&self, places: u32) -> String {
        let scale = BigInt::from(10).pow(places);
        let scaled = match self {
            LimitValue::Rational(c) => round_half_even(&(c * BigRational::from_integer(scale.clone()))),
            _ => BigInt::from(libm::round(self.to_f64() * libm::pow(10.0, places as f64)) as i64),
        };
        decimal_string(&BigRational::new(scaled, scale), places)
    }
}

fn round_half_even(x: &BigRational) -> BigInt {
    let fl = x.floor();
    let frac = x - &fl;
    let fl = fl.to_integer();
    let half = rat(1, 2);
    if frac > half || (frac == half && fl.is_odd()) {
        fl + 1
    } else {
        fl
    }
}

impl fmt::Display for LimitValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitValue::Rational(c) => write!(f, "{c}"),
            LimitValue::Exp(v) => write!(f, "{v}"),
            LimitValue::InvPiSquared(c) => write!(f, "({c})/pi^2"),
            LimitValue::InvEntropy { coeff, .. } => write!(f, "({coeff})/H"),
        }
    }
}

/// Model parameters for the limits: the bit probability `p` (Patricia)
/// and the split parameter `beta` (beta-splitting).
#[derive(Clone, Debug, PartialEq)]
pub struct LimitParams {
    pub p: BigRational,
    pub beta: f64,
}

impl Default for LimitParams {
    fn default() -> Self {
        LimitParams {
            p: rat(1, 2),
            beta: -1.0,
        }
    }
}

impl LimitParams {
    pub fn with_p(p: BigRational) -> Self {
        LimitParams { p, ..Self::default() }
    }
}

/// The model whose limits govern `model` with `params`; beta-splitting
/// with `beta = 0` is the extended BST and `beta = -3/2` the uniform tree.
fn resolve(model: Model, params: &LimitParams) -> Result<Model> {
    match model {
        Model::Trie | Model::Bst => Err(FringeError::InvalidParameter(format!(
            "{model} trees are not full; no fringe limit"
        ))),
        Model::BetaSplit if params.beta == -1.0 => Ok(Model::BetaSplit),
        Model::BetaSplit if params.beta == 0.0 => Ok(Model::Ebst),
        Model::BetaSplit if params.beta == -1.5 => Ok(Model::UniformFull),
        Model::BetaSplit => Err(FringeError::InvalidParameter(format!(
            "no closed-form limit for beta = {}",
            params.beta
        ))),
        other => Ok(other),
    }
}

fn entropy_of(p: &BigRational) -> Result<f64> {
    let pf = p.to_f64().unwrap_or(f64::NAN);
    if !(pf > 0.0 && pf < 1.0) {
        return Err(FringeError::InvalidParameter("p must lie in (0,1)".into()));
    }
    Ok(entropy(pf))
}

/// Limit of `N_t(T_n) / |T_n|`.
pub fn limit_fringe(model: Model, t: &TreeShape, params: &LimitParams) -> Result<LimitValue> {
    let model = resolve(model, params)?;
    t.ensure_full()?;
    let m = t.leafcount() as i64;
    if m == 1 {
        return Ok(LimitValue::Rational(rat(1, 2)));
    }
    Ok(match model {
        Model::Patricia => LimitValue::InvEntropy {
            coeff: pi_t(t, &params.p)? * rat(1, 2 * m * (m - 1)),
            entropy: entropy_of(&params.p)?,
        },
        Model::Ebst => {
            let inner = t.delete_leaves().expect("m >= 2");
            let k = inner.len() as i64;
            LimitValue::Rational(rat(1, (k + 1) * (k + 2)) * bst_shape_prob(&inner))
        }
        Model::Cbst => LimitValue::Exp(beta_hat(t)?.scale(&rat(3, 2))),
        Model::BetaSplit => LimitValue::InvPiSquared(
            harmonic(m as u64 - 1) * rat(3, m * (m - 1)) * cb_shape_prob(t)?,
        ),
        Model::UniformFull => LimitValue::Rational(uniform_limit(t)?),
        Model::Trie | Model::Bst => unreachable!("rejected by resolve"),
    })
}

/// Limit of `N_t(T_n) leafcount(t) / leafcount(T_n)`.
pub fn limit_qsin(model: Model, t: &TreeShape, params: &LimitParams) -> Result<LimitValue> {
    let model = resolve(model, params)?;
    t.ensure_full()?;
    let m = t.leafcount() as i64;
    if m == 1 {
        return Ok(LimitValue::Rational(BigRational::one()));
    }
    Ok(match model {
        Model::Patricia => LimitValue::InvEntropy {
            coeff: pi_t(t, &params.p)? * rat(1, m - 1),
            entropy: entropy_of(&params.p)?,
        },
        Model::Ebst => LimitValue::Rational(ebst_beta(t)? * rat(m, 1)),
        Model::Cbst => LimitValue::Exp(beta_hat(t)?.scale(&rat(3 * m, 1))),
        Model::BetaSplit => LimitValue::InvPiSquared(
            harmonic(m as u64 - 1) * rat(6, m - 1) * cb_shape_prob(t)?,
        ),
        Model::UniformFull => {
            let two = BigInt::from(2);
            LimitValue::Rational(BigRational::new(BigInt::from(m) * two.pow(2), two.pow(2 * m as u32)))
        }
        Model::Trie | Model::Bst => unreachable!("rejected by resolve"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> TreeShape {
        TreeShape::parse(s).unwrap()
    }

    #[test]
    fn leaf_limits() {
        let p = LimitParams::default();
        for model in [Model::Patricia, Model::Ebst, Model::Cbst, Model::BetaSplit, Model::UniformFull] {
            assert_eq!(limit_fringe(model, &t("*"), &p).unwrap(), LimitValue::Rational(rat(1, 2)));
            assert_eq!(limit_qsin(model, &t("*"), &p).unwrap(), LimitValue::Rational(rat(1, 1)));
        }
    }

    #[test]
    fn closed_forms() {
        let p = LimitParams::default();
        let cbst2 = limit_fringe(Model::Cbst, &t("(*,*)"), &p).unwrap();
        assert_eq!(cbst2.to_string(), "3e^4/256 - 3e^2/16 + 233/256");
        assert_eq!(
            limit_qsin(Model::UniformFull, &t("(*,(*,*))"), &p).unwrap(),
            LimitValue::Rational(rat(3, 16))
        );
        let pat = limit_qsin(Model::Patricia, &t("((*,*),(*,*))"), &p).unwrap();
        assert!((pat.to_f64() - 1.0 / (8.0 * core::f64::consts::LN_2)).abs() < 1e-15);
        assert_eq!(
            limit_qsin(Model::BetaSplit, &t("(*,(*,*))"), &p).unwrap(),
            LimitValue::InvPiSquared(rat(9, 4))
        );
        assert_eq!(
            limit_fringe(Model::Ebst, &t("(*,(*,*))"), &p).unwrap(),
            LimitValue::Rational(rat(1, 24))
        );
    }

    #[test]
    fn qsin_is_twice_leafcount_times_fringe() {
        let params = [LimitParams::default(), LimitParams::with_p(rat(1, 3))];
        for m in 1..=6 {
            for shape in TreeShape::all_full(m) {
                for model in [Model::Patricia, Model::Ebst, Model::Cbst, Model::BetaSplit, Model::UniformFull] {
                    for p in &params {
                        let f = limit_fringe(model, &shape, p).unwrap();
                        let q = limit_qsin(model, &shape, p).unwrap();
                        assert_eq!(q, f.scale(&rat(2 * m as i64, 1)), "{model} {shape}");
                    }
                }
            }
        }
    }

    #[test]
    fn beta_aliases_and_rejections() {
        let zero = LimitParams { beta: 0.0, ..LimitParams::default() };
        let s = t("(*,(*,*))");
        assert_eq!(
            limit_fringe(Model::BetaSplit, &s, &zero).unwrap(),
            limit_fringe(Model::Ebst, &s, &zero).unwrap()
        );
        let other = LimitParams { beta: 2.0, ..LimitParams::default() };
        assert!(limit_fringe(Model::BetaSplit, &s, &other).is_err());
        assert!(limit_fringe(Model::Bst, &s, &zero).is_err());
        assert!(limit_fringe(Model::UniformFull, &t("(*,_)"), &zero).is_err());
    }

    #[test]
    fn rounding() {
        assert_eq!(LimitValue::Rational(rat(1, 6)).rounded(4), "0.1667");
        assert_eq!(LimitValue::Rational(rat(1, 32)).rounded(4), "0.0312");
        assert_eq!(LimitValue::Rational(rat(3, 32)).rounded(4), "0.0938");
        assert_eq!(LimitValue::Rational(rat(-1, 6)).rounded(3), "-0.167");
    }
}
