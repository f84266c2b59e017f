//! Constants record for one model and shape.

use fringe_core::exact::uniform_variance;
use fringe_core::patricia::{
    detect_period, patricia_mean_const, patricia_var_const, periodicity_from_ratio, Periodicity,
    DEFAULT_FOURIER_TERMS, DEFAULT_MAX_DENOMINATOR,
};
use fringe_core::{beta_hat, limit_fringe, limit_qsin, pi_t, LimitParams, LimitValue, Model, SourceParams, TreeShape};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::Result;

pub const DECIMALS: u32 = 10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FourierTerm {
    pub k: i64,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactNumber {
    pub exact: String,
    pub decimal: String,
    pub value: f64,
}

impl From<&LimitValue> for ExactNumber {
    fn from(v: &LimitValue) -> Self {
        ExactNumber {
            exact: v.to_string(),
            decimal: v.rounded(DECIMALS),
            value: v.to_f64(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsRecord {
    pub model: String,
    pub shape: String,
    pub leaves: usize,
    /// Limit of `E N_t / n`; the constant term when periodic.
    pub constant: f64,
    pub constant_exact: String,
    pub fourier: Vec<FourierTerm>,
    pub period: Option<f64>,
    /// `a/b` with `log p / log q = a/b`.
    pub period_ratio: Option<String>,
    pub tail_bound: Option<f64>,
    /// Limit of `P(T* = t)`.
    pub fringe: ExactNumber,
    /// Limit of `q(T; t)`.
    pub qsin: ExactNumber,
    pub pi_t: Option<String>,
    pub beta_hat: Option<ExactNumber>,
    /// Constant term of the limiting `Var N_t`, divided by `variance_scale`.
    pub variance: Option<f64>,
    pub variance_scale: Option<&'static str>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstantsRequest {
    pub model: Model,
    pub p: BigRational,
    pub beta: f64,
    pub fourier_terms: usize,
    /// Explicit `log p / log q = a/b` instead of detection.
    pub period_ratio: Option<(u64, u64)>,
    pub max_denominator: u64,
}

impl ConstantsRequest {
    pub fn new(model: Model) -> Self {
        ConstantsRequest {
            model,
            p: BigRational::new(BigInt::from(1), BigInt::from(2)),
            beta: -1.0,
            fourier_terms: DEFAULT_FOURIER_TERMS,
            period_ratio: None,
            max_denominator: DEFAULT_MAX_DENOMINATOR,
        }
    }

    pub fn source(&self) -> Result<SourceParams> {
        let p = self.p.to_f64().unwrap_or(f64::NAN);
        let periodicity = match self.period_ratio {
            Some((a, b)) => periodicity_from_ratio(p, a, b)?,
            None => detect_period(p, self.max_denominator)?,
        };
        Ok(SourceParams::with_periodicity(p, periodicity)?)
    }
}

fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

pub fn constants(t: &TreeShape, req: &ConstantsRequest) -> Result<ConstantsRecord> {
    let params = LimitParams {
        p: req.p.clone(),
        beta: req.beta,
    };
    let fringe = limit_fringe(req.model, t, &params)?;
    let qsin = limit_qsin(req.model, t, &params)?;
    let m = t.leafcount();
    // E N_t / n = fringe * |T| / n: |T| ~ 2n except the compressed BST (2n/3).
    let factor = if req.model == Model::Cbst { rat(2, 3) } else { rat(2, 1) };
    let limit = fringe.scale(&factor);
    let mut record = ConstantsRecord {
        model: req.model.to_string(),
        shape: t.format(),
        leaves: m,
        constant: limit.to_f64(),
        constant_exact: limit.to_string(),
        fourier: Vec::new(),
        period: None,
        period_ratio: None,
        tail_bound: None,
        fringe: ExactNumber::from(&fringe),
        qsin: ExactNumber::from(&qsin),
        pi_t: None,
        beta_hat: None,
        variance: None,
        variance_scale: None,
    };
    match req.model {
        Model::Patricia => {
            record.pi_t = Some(pi_t(t, &req.p)?.to_string());
            let source = req.source()?;
            if let Periodicity::Periodic { a, b, .. } = source.periodicity {
                record.period_ratio = Some(format!("{a}/{b}"));
            }
            record.period = source.periodicity.period();
            if m > 1 {
                let mean = patricia_mean_const(t, source, req.fourier_terms)?;
                record.constant = mean.constant;
                record.fourier = mean
                    .fourier
                    .iter()
                    .filter(|(k, _)| **k > 0)
                    .map(|(&k, c)| FourierTerm { k, re: c.re, im: c.im })
                    .collect();
                record.tail_bound = mean.is_periodic().then_some(mean.tail_bound);
                record.variance = Some(patricia_var_const(t, source, req.fourier_terms)?.constant);
                record.variance_scale = Some("n");
            }
        }
        Model::Cbst => {
            record.beta_hat = Some(ExactNumber::from(&LimitValue::Exp(beta_hat(t)?)));
        }
        Model::UniformFull if m > 1 => {
            record.variance = uniform_variance(m as u32)?.to_f64();
            record.variance_scale = Some("size");
        }
        _ => {}
    }
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> TreeShape {
        TreeShape::parse(s).unwrap()
    }

    #[test]
    fn cbst_cherry() {
        let r = constants(&t("(*,*)"), &ConstantsRequest::new(Model::Cbst)).unwrap();
        let b = r.beta_hat.unwrap();
        assert_eq!(b.exact, "e^4/128 - e^2/8 + 233/384");
        assert_eq!(b.decimal, "0.1096868681");
        assert_eq!(r.constant_exact, "e^4/128 - e^2/8 + 233/384");
    }

    #[test]
    fn ebst_three_leaves() {
        let r = constants(&t("(*,(*,*))"), &ConstantsRequest::new(Model::Ebst)).unwrap();
        assert_eq!(r.fringe.exact, "1/24");
    }

    #[test]
    fn patricia_third() {
        let mut req = ConstantsRequest::new(Model::Patricia);
        req.p = rat(1, 3);
        let r = constants(&t("(*,*)"), &req).unwrap();
        assert_eq!(r.pi_t.as_deref(), Some("4/9"));
        assert!(r.period.is_none() && r.fourier.is_empty());
        req.period_ratio = Some((1, 1));
        assert!(constants(&t("(*,*)"), &req).is_err());
    }

    #[test]
    fn patricia_half_is_periodic() {
        let r = constants(&t("((*,*),(*,*))"), &ConstantsRequest::new(Model::Patricia)).unwrap();
        assert_eq!(r.period_ratio.as_deref(), Some("1/1"));
        assert_eq!(r.fourier.len(), DEFAULT_FOURIER_TERMS);
        assert!((r.qsin.value - 1.0 / (8.0 * std::f64::consts::LN_2)).abs() < 1e-15);
    }
}
