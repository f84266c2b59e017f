//! Patricia trie asymptotics: entropy, periodicity, Mellin transforms and
//! the oscillating mean and variance constants of fringe counts.

use alloc::collections::BTreeMap;
use alloc::format;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{FringeError, Result};
use crate::exact::pi_t_f64;
use crate::gamma::{complex_gamma, fourier_ratio};
use crate::tree::TreeShape;

/// Tolerance on `|log p / log q - a/b|` accepted as periodic.
pub const PERIOD_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_MAX_DENOMINATOR: u64 = 10_000;
pub const DEFAULT_FOURIER_TERMS: usize = 8;
pub const DEFAULT_SERIES_TOLERANCE: f64 = 1e-14;
pub const MAX_SERIES_TERMS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Periodicity {
    Aperiodic,
    /// `log p / log q = a / b` in lowest terms and `d = -log p / a`.
    Periodic { a: u64, b: u64, d: f64 },
}

impl Periodicity {
    pub fn period(&self) -> Option<f64> {
        match *self {
            Periodicity::Aperiodic => None,
            Periodicity::Periodic { d, .. } => Some(d),
        }
    }
}

/// Smallest-denominator `a/b` with `b <= max_denominator` within
/// [`PERIOD_TOLERANCE`] of `log p / log q`.
pub fn detect_period(p: f64, max_denominator: u64) -> Result<Periodicity> {
    check_p(p)?;
    let ln_p = libm::log(p);
    let ln_q = libm::log1p(-p);
    let r = ln_p / ln_q;
    for b in 1..=max_denominator {
        let a = libm::round(r * b as f64);
        if a >= 1.0 && libm::fabs(r - a / b as f64) <= PERIOD_TOLERANCE {
            let a = a as u64;
            return Ok(Periodicity::Periodic { a, b, d: -ln_p / a as f64 });
        }
    }
    Ok(Periodicity::Aperiodic)
}

/// Periodic structure from an explicit ratio `log p / log q = a / b`.
pub fn periodicity_from_ratio(p: f64, a: u64, b: u64) -> Result<Periodicity> {
    check_p(p)?;
    if a == 0 || b == 0 || num_integer::gcd(a, b) != 1 {
        return Err(FringeError::InvalidParameter(format!("{a}/{b} is not a reduced positive ratio")));
    }
    let ln_p = libm::log(p);
    let d = -ln_p / a as f64;
    let d_q = -libm::log1p(-p) / b as f64;
    if libm::fabs(d - d_q) > 1e-9 * d {
        return Err(FringeError::InvalidParameter(format!(
            "log p / log q is not {a}/{b} for p = {p}"
        )));
    }
    Ok(Periodicity::Periodic { a, b, d })
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(FringeError::InvalidParameter(format!("p = {p} is not in (0,1)")))
    }
}

/// Bit source parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SourceParams {
    pub p: f64,
    pub q: f64,
    /// `-p log p - q log q`, in nats.
    pub entropy: f64,
    pub periodicity: Periodicity,
}

impl SourceParams {
    pub fn new(p: f64) -> Result<Self> {
        Self::with_periodicity(p, detect_period(p, DEFAULT_MAX_DENOMINATOR)?)
    }

    pub fn with_periodicity(p: f64, periodicity: Periodicity) -> Result<Self> {
        check_p(p)?;
        let q = 1.0 - p;
        Ok(SourceParams {
            p,
            q,
            entropy: entropy(p),
            periodicity,
        })
    }

    /// The same source with the roles of 0 and 1 exchanged.
    pub fn swapped(&self) -> Self {
        let periodicity = match self.periodicity {
            Periodicity::Aperiodic => Periodicity::Aperiodic,
            Periodicity::Periodic { a, b, d } => Periodicity::Periodic { a: b, b: a, d },
        };
        SourceParams {
            p: self.q,
            q: self.p,
            entropy: self.entropy,
            periodicity,
        }
    }
}

pub fn entropy(p: f64) -> f64 {
    let q = 1.0 - p;
    -p * libm::log(p) - q * libm::log1p(-p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Functional {
    /// Mean.
    E,
    /// Variance.
    V,
    /// Covariance with the leaf count.
    C,
}

/// Mellin transforms of the Poisson-model functionals of `N_t`.
#[derive(Clone, Debug, PartialEq)]
pub struct MellinKernel {
    pub m: u32,
    pub pi_t: f64,
    pub source: SourceParams,
    ln_m_fact: f64,
}

impl MellinKernel {
    pub fn new(t: &TreeShape, source: SourceParams) -> Result<Self> {
        t.ensure_full()?;
        let m = t.leafcount() as u32;
        if m < 2 {
            return Err(FringeError::InvalidParameter("shape must have at least 2 leaves".into()));
        }
        Ok(MellinKernel {
            m,
            pi_t: pi_t_f64(t, source.p)?,
            source,
            ln_m_fact: libm::lgamma(m as f64 + 1.0),
        })
    }

    fn check_strip(&self, s: Complex64) -> Result<()> {
        if s.re > -(self.m as f64) {
            Ok(())
        } else {
            Err(FringeError::InvalidParameter(format!("Re s = {} must exceed -m", s.re)))
        }
    }

    /// `pi_t Gamma(m + s) / m!`.
    pub fn m_e(&self, s: Complex64) -> Result<Complex64> {
        self.check_strip(s)?;
        Ok(complex_gamma(s + self.m as f64)? * (self.pi_t / libm::exp(self.ln_m_fact)))
    }

    /// `-s M_E(s)`.
    pub fn m_c(&self, s: Complex64) -> Result<Complex64> {
        Ok(-s * self.m_e(s)?)
    }

    /// `M_V(s)` with the default series tolerance.
    pub fn m_v(&self, s: Complex64) -> Result<Complex64> {
        self.m_v_tol(s, DEFAULT_SERIES_TOLERANCE)
    }

    /// `pi_t/m! Gamma(m+s) - pi_t^2/m!^2 2^{-2m-s} Gamma(2m+s)
    ///  - 2 pi_t^2/m!^2 sum_k (-1)^k Gamma(2m+s+k)/k! g_k`,
    /// `g_k = (p^{m+k} + q^{m+k}) / (1 - p^{m+k} - q^{m+k})`.
    pub fn m_v_tol(&self, s: Complex64, tol: f64) -> Result<Complex64> {
        self.check_strip(s)?;
        let m = self.m as f64;
        let m_fact = libm::exp(self.ln_m_fact);
        let c1 = self.pi_t / m_fact;
        let c2 = c1 * c1;
        let first = complex_gamma(s + m)? * c1;
        let a = s + 2.0 * m;
        let gamma_a = complex_gamma(a)?;
        let second = gamma_a * (-(s + 2.0 * m) * core::f64::consts::LN_2).exp() * c2;
        let series = self.v_series(a, gamma_a, tol)?;
        Ok(first - second - series * (2.0 * c2))
    }

    /// `sum_k (-1)^k Gamma(a+k)/k! g_k`, summed in consecutive pairs with
    /// compensation.
    fn v_series(&self, a: Complex64, gamma_a: Complex64, tol: f64) -> Result<Complex64> {
        let (p, q) = (self.source.p, self.source.q);
        let mut pk = libm::pow(p, self.m as f64);
        let mut qk = libm::pow(q, self.m as f64);
        let mut coef = gamma_a; // Gamma(a + k) / k!
        let mut sum = Complex64::new(0.0, 0.0);
        let mut comp = Complex64::new(0.0, 0.0);
        let mut prev_pair = f64::INFINITY;
        let mut k = 0usize;
        while k < MAX_SERIES_TERMS {
            let mut pair = Complex64::new(0.0, 0.0);
            let mut mag = 0.0f64;
            for _ in 0..2 {
                let r = pk + qk;
                let g = r / (1.0 - r);
                let term = coef * g;
                mag = mag.max(term.norm());
                if k.is_multiple_of(2) {
                    pair += term;
                } else {
                    pair -= term;
                }
                coef = coef * (a + k as f64) / (k as f64 + 1.0);
                pk *= p;
                qk *= q;
                k += 1;
            }
            neumaier(&mut sum.re, &mut comp.re, pair.re);
            neumaier(&mut sum.im, &mut comp.im, pair.im);
            // pairs can cancel exactly, so the test is on term sizes
            if mag < tol * (1.0 + (sum + comp).norm()) && mag <= prev_pair {
                return Ok(sum + comp);
            }
            prev_pair = mag;
        }
        Err(FringeError::NoConvergence(MAX_SERIES_TERMS))
    }

    pub fn transform(&self, which: Functional, s: Complex64) -> Result<Complex64> {
        match which {
            Functional::E => self.m_e(s),
            Functional::V => self.m_v(s),
            Functional::C => self.m_c(s),
        }
    }
}

fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    *comp += if libm::fabs(*sum) >= libm::fabs(x) {
        (*sum - t) + x
    } else {
        (x - t) + *sum
    };
    *sum = t;
}

/// `x -> constant + sum_{k != 0} c_k e^{2 pi i k x / d}`; constant when no
/// period is set.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicConstant {
    pub constant: f64,
    /// Coefficients for `k != 0`, both signs present.
    pub fourier: BTreeMap<i64, Complex64>,
    pub period: Option<f64>,
    pub k_max: usize,
    /// Upper bound on the relative size of omitted coefficients.
    pub tail_bound: f64,
}

impl PeriodicConstant {
    pub fn constant(c: f64) -> Self {
        PeriodicConstant {
            constant: c,
            fourier: BTreeMap::new(),
            period: None,
            k_max: 0,
            tail_bound: 0.0,
        }
    }

    pub fn is_periodic(&self) -> bool {
        self.period.is_some()
    }

    pub fn eval_complex(&self, x: f64) -> Complex64 {
        let mut v = Complex64::new(self.constant, 0.0);
        if let Some(d) = self.period {
            for (&k, c) in &self.fourier {
                let phase = 2.0 * PI * k as f64 * x / d;
                v += c * Complex64::new(libm::cos(phase), libm::sin(phase));
            }
        }
        v
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_complex(x).re
    }

    /// Twice the largest coefficient magnitude relative to the constant.
    pub fn relative_amplitude(&self) -> f64 {
        let top = self.fourier.values().map(|c| c.norm()).fold(0.0, f64::max);
        2.0 * top / libm::fabs(self.constant)
    }

    pub fn scale(&self, c: f64) -> Self {
        PeriodicConstant {
            constant: self.constant * c,
            fourier: self.fourier.iter().map(|(&k, v)| (k, v * c)).collect(),
            ..self.clone()
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.constant -= other.constant;
        for (&k, v) in &other.fourier {
            *out.fourier.entry(k).or_insert(Complex64::new(0.0, 0.0)) -= v;
        }
        out.period = self.period.or(other.period);
        out.k_max = self.k_max.max(other.k_max);
        out.tail_bound = self.tail_bound.max(other.tail_bound);
        out
    }

    /// Pointwise square, by convolving coefficient sequences.
    pub fn square(&self) -> Self {
        let mut all = self.fourier.clone();
        all.insert(0, Complex64::new(self.constant, 0.0));
        let mut out: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (&i, a) in &all {
            for (&j, b) in &all {
                *out.entry(i + j).or_insert(Complex64::new(0.0, 0.0)) += a * b;
            }
        }
        let constant = out.remove(&0).map_or(0.0, |c| c.re);
        PeriodicConstant {
            constant,
            fourier: out,
            period: self.period,
            k_max: 2 * self.k_max,
            tail_bound: self.tail_bound,
        }
    }
}

/// `psi_X` for the kernel's source: the value `M_X(-1)` when aperiodic,
/// the Fourier series `sum_k M_X(-1 - 2 pi i k/d) e^{2 pi i k x/d}` otherwise.
pub fn psi(kernel: &MellinKernel, which: Functional, k_max: usize) -> Result<PeriodicConstant> {
    let s0 = Complex64::new(-1.0, 0.0);
    let constant = kernel.transform(which, s0)?.re;
    let Some(d) = kernel.source.periodicity.period() else {
        return Ok(PeriodicConstant::constant(constant));
    };
    let mut fourier = BTreeMap::new();
    for k in 1..=k_max as i64 {
        let s = Complex64::new(-1.0, -2.0 * PI * k as f64 / d);
        let c = kernel.transform(which, s)?;
        fourier.insert(k, c);
        fourier.insert(-k, c.conj());
    }
    let tail_bound = fourier_ratio(kernel.m, k_max as i64 + 1, d)?;
    Ok(PeriodicConstant {
        constant,
        fourier,
        period: Some(d),
        k_max,
        tail_bound,
    })
}

/// `x -> H^{-1} psi_E(x)`: `E N_t / n` at `x = log n`.
pub fn patricia_mean_const(t: &TreeShape, source: SourceParams, k_max: usize) -> Result<PeriodicConstant> {
    let kernel = MellinKernel::new(t, source)?;
    Ok(psi(&kernel, Functional::E, k_max)?.scale(1.0 / source.entropy))
}

/// `x -> H^{-1} psi_V(x) - H^{-2} psi_C(x)^2`: `Var N_t / n` at `x = log n`.
pub fn patricia_var_const(t: &TreeShape, source: SourceParams, k_max: usize) -> Result<PeriodicConstant> {
    let kernel = MellinKernel::new(t, source)?;
    let h = source.entropy;
    let v = psi(&kernel, Functional::V, k_max)?.scale(1.0 / h);
    let c = psi(&kernel, Functional::C, k_max)?.scale(1.0 / h);
    Ok(v.sub(&c.square()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> TreeShape {
        TreeShape::parse(s).unwrap()
    }

    #[test]
    fn periods() {
        let half = detect_period(0.5, 1000).unwrap();
        assert_eq!(half, Periodicity::Periodic { a: 1, b: 1, d: core::f64::consts::LN_2 });
        assert_eq!(detect_period(0.25, 1_000_000).unwrap(), Periodicity::Aperiodic);
        // q^2 = p with p + q = 1
        let q = (5f64.sqrt() - 1.0) / 2.0;
        match detect_period(q * q, 1000).unwrap() {
            Periodicity::Periodic { a, b, d } => {
                assert_eq!((a, b), (2, 1));
                assert!((d + libm::log(q)).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        assert!(periodicity_from_ratio(0.5, 2, 1).is_err());
        assert!(periodicity_from_ratio(q * q, 2, 1).is_ok());
    }

    #[test]
    fn entropy_of_fair_bits() {
        assert!((entropy(0.5) - core::f64::consts::LN_2).abs() < 1e-15);
        assert!((entropy(0.3) - entropy(0.7)).abs() < 1e-15);
    }

    #[test]
    fn mean_constant_terms() {
        let src = SourceParams::new(0.5).unwrap();
        let k = MellinKernel::new(&t("(*,*)"), src).unwrap();
        let e = psi(&k, Functional::E, 8).unwrap();
        assert!((e.constant - 0.25).abs() < 1e-15);
        let c = psi(&k, Functional::C, 8).unwrap();
        assert!((c.constant - 0.25).abs() < 1e-15);
        let ratio = e.fourier[&1].norm() / e.constant;
        assert!((ratio - 4.9e-6).abs() < 0.05 * 4.9e-6, "{ratio}");
        for x in [0.0, 0.1, 0.37, 5.0] {
            assert!(e.eval_complex(x).im.abs() < 1e-12);
        }
    }

    #[test]
    fn covariance_transform_identity() {
        let src = SourceParams::new(0.3).unwrap();
        let k = MellinKernel::new(&t("(*,((*,*),*))"), src).unwrap();
        for s in [Complex64::new(-1.0, 0.0), Complex64::new(-0.5, 7.0), Complex64::new(2.0, -3.0)] {
            let lhs = k.m_c(s).unwrap();
            let rhs = -s * k.m_e(s).unwrap();
            assert!((lhs - rhs).norm() <= 1e-15 * rhs.norm());
        }
    }

    #[test]
    fn variance_transform_is_real_on_real_axis() {
        let src = SourceParams::new(0.5).unwrap();
        let k = MellinKernel::new(&t("(*,*)"), src).unwrap();
        let v = k.m_v(Complex64::new(-1.0, 0.0)).unwrap();
        assert_eq!(v.im, 0.0);
        assert!(v.re.is_finite());
    }

    #[test]
    fn variance_constant_is_positive() {
        let src = SourceParams::new(0.5).unwrap();
        let v = patricia_var_const(&t("(*,*)"), src, 8).unwrap();
        assert!(v.constant > 0.0);
        let ap = SourceParams::new(0.3).unwrap();
        let w = patricia_var_const(&t("(*,*)"), ap, 8).unwrap();
        assert!(!w.is_periodic());
        assert!(w.constant > 0.0);
    }

    #[test]
    fn square_matches_pointwise() {
        let src = SourceParams::new(0.5).unwrap();
        let e = patricia_mean_const(&t("(*,(*,(*,*)))"), src, 4).unwrap();
        let sq = e.square();
        for x in [0.0, 0.2, 0.45] {
            let a = e.eval(x);
            assert!((sq.eval(x) - a * a).abs() < 1e-15);
        }
    }

    #[test]
    fn leaf_and_bad_strip_rejected() {
        let src = SourceParams::new(0.5).unwrap();
        assert!(MellinKernel::new(&t("*"), src).is_err());
        let k = MellinKernel::new(&t("(*,*)"), src).unwrap();
        assert!(k.m_e(Complex64::new(-2.5, 0.0)).is_err());
    }
}
