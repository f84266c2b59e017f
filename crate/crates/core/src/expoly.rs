//! Exact exponential polynomials `f(x) = sum_k p_k(x) e^{kx}` with rational
//! coefficients, and exact constants `sum_k c_k e^k`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::{self, Write as _};
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Polynomial with ascending coefficients and no trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly(Vec<BigRational>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::from_coeffs(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn from_coeffs(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        Poly(c)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        Self::from_coeffs(self.0.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> Poly {
        Self::from_coeffs(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, a)| a * rat(j as i64))
                .collect(),
        )
    }

    /// Antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> Poly {
        let mut c = Vec::with_capacity(self.0.len() + 1);
        c.push(BigRational::zero());
        c.extend(self.0.iter().enumerate().map(|(j, a)| a / rat(j as i64 + 1)));
        Self::from_coeffs(c)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, a| acc * x + a)
    }

    pub fn at_zero(&self) -> BigRational {
        self.0.first().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn at_one(&self) -> BigRational {
        self.0.iter().fold(BigRational::zero(), |acc, a| acc + a)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        let z = BigRational::zero();
        Poly::from_coeffs(
            (0..n)
                .map(|j| self.0.get(j).unwrap_or(&z) + o.0.get(j).unwrap_or(&z))
                .collect(),
        )
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly(self.0.iter().map(|a| -a).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::from_coeffs(c)
    }
}

/// `sum_k p_k(x) e^{kx}` keyed by `k`; zero polynomials are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ExpPoly {
    terms: BTreeMap<u32, Poly>,
}

impl ExpPoly {
    pub fn zero() -> Self {
        ExpPoly::default()
    }

    pub fn one() -> Self {
        Self::term(0, Poly::constant(BigRational::one()))
    }

    /// `p(x) e^{kx}`.
    pub fn term(k: u32, p: Poly) -> Self {
        let mut f = ExpPoly::zero();
        f.add_term(k, p);
        f
    }

    /// `e^{kx}`.
    pub fn exp(k: u32) -> Self {
        Self::term(k, Poly::constant(BigRational::one()))
    }

    pub fn terms(&self) -> &BTreeMap<u32, Poly> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_exponent(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    pub fn exponents_are_even(&self) -> bool {
        self.terms.keys().all(|k| k % 2 == 0)
    }

    fn add_term(&mut self, k: u32, p: Poly) {
        if p.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&k) {
            Some(q) => &q + &p,
            None => p,
        };
        if !sum.is_zero() {
            self.terms.insert(k, sum);
        }
    }

    pub fn scale(&self, c: &BigRational) -> ExpPoly {
        let mut f = ExpPoly::zero();
        for (&k, p) in &self.terms {
            f.add_term(k, p.scale(c));
        }
        f
    }

    /// Multiplies every term by the polynomial `q`.
    pub fn mul_poly(&self, q: &Poly) -> ExpPoly {
        let mut f = ExpPoly::zero();
        for (&k, p) in &self.terms {
            f.add_term(k, p * q);
        }
        f
    }

    /// `d/dx [p(x) e^{kx}] = (p' + k p) e^{kx}`.
    pub fn derivative(&self) -> ExpPoly {
        let mut f = ExpPoly::zero();
        for (&k, p) in &self.terms {
            f.add_term(k, &p.derivative() + &p.scale(&rat(k as i64)));
        }
        f
    }

    pub fn eval(&self, x: &BigRational) -> ExactExpValue {
        // e^{kx} for rational x is only representable when x is an integer
        // multiple; callers evaluate at 0 or 1.
        let mut v = ExactExpValue::zero();
        for (&k, p) in &self.terms {
            let c = p.eval(x);
            if x.is_zero() {
                v.add_term(0, c);
            } else {
                assert!(x.is_integer() && !x.is_negative(), "evaluation point must be a natural number");
                let e = k * x.to_integer().to_u32().expect("small evaluation point");
                v.add_term(e, c);
            }
        }
        v
    }

    /// Value at `x = 0`.
    pub fn at_zero(&self) -> BigRational {
        self.terms
            .values()
            .fold(BigRational::zero(), |acc, p| acc + p.at_zero())
    }

    /// `F(x) = int_0^x f(y) e^{2(x-y)} dy`, the solution of
    /// `F' = f + 2F`, `F(0) = 0`.
    pub fn kernel_integral(&self) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for (&k, p) in &self.terms {
            if k == 2 {
                out.add_term(2, p.antiderivative());
                continue;
            }
            // int p(y) e^{ay} dy = Q(y) e^{ay}, Q = sum_j (-1)^j p^{(j)} / a^{j+1}
            let a = rat(k as i64 - 2);
            let q = exp_antiderivative_factor(p, &a);
            out.add_term(2, Poly::constant(-q.at_zero()));
            out.add_term(k, q);
        }
        out
    }

    /// `int_0^1 f(x) dx` as an exact constant.
    pub fn integral_0_1(&self) -> ExactExpValue {
        let mut v = ExactExpValue::zero();
        for (&k, p) in &self.terms {
            if k == 0 {
                v.add_term(0, p.antiderivative().at_one());
            } else {
                let q = exp_antiderivative_factor(p, &rat(k as i64));
                v.add_term(k, q.at_one());
                v.add_term(0, -q.at_zero());
            }
        }
        v
    }
}

/// `Q` with `(Q e^{ay})' = p e^{ay}` for `a != 0`.
fn exp_antiderivative_factor(p: &Poly, a: &BigRational) -> Poly {
    let mut q = Poly::zero();
    let mut d = p.clone();
    let mut sign_pow = a.recip();
    let neg_inv = -a.recip();
    while !d.is_zero() {
        q = &q + &d.scale(&sign_pow);
        d = d.derivative();
        sign_pow = &sign_pow * &neg_inv;
    }
    q
}

impl Add for &ExpPoly {
    type Output = ExpPoly;
    fn add(self, o: &ExpPoly) -> ExpPoly {
        let mut f = self.clone();
        for (&k, p) in &o.terms {
            f.add_term(k, p.clone());
        }
        f
    }
}

impl Sub for &ExpPoly {
    type Output = ExpPoly;
    fn sub(self, o: &ExpPoly) -> ExpPoly {
        self + &o.scale(&rat(-1))
    }
}

impl Mul for &ExpPoly {
    type Output = ExpPoly;
    fn mul(self, o: &ExpPoly) -> ExpPoly {
        let mut f = ExpPoly::zero();
        for (&k, p) in &self.terms {
            for (&j, q) in &o.terms {
                f.add_term(k + j, p * q);
            }
        }
        f
    }
}

impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (&k, p) in self.terms.iter().rev() {
            for (j, c) in p.coeffs().iter().enumerate().rev() {
                if c.is_zero() {
                    continue;
                }
                let mut factor = String::new();
                if j == 1 {
                    factor.push('x');
                } else if j > 1 {
                    let _ = write!(factor, "x^{j}");
                }
                if k > 0 {
                    if !factor.is_empty() {
                        factor.push('*');
                    }
                    if k == 1 {
                        factor.push_str("e^x");
                    } else {
                        let _ = write!(factor, "e^({k}x)");
                    }
                }
                write_signed_term(f, c, &factor, first)?;
                first = false;
            }
        }
        Ok(())
    }
}

fn write_signed_term(f: &mut fmt::Formatter<'_>, c: &BigRational, factor: &str, first: bool) -> fmt::Result {
    let neg = c.is_negative();
    match (first, neg) {
        (true, true) => f.write_str("-")?,
        (true, false) => {}
        (false, true) => f.write_str(" - ")?,
        (false, false) => f.write_str(" + ")?,
    }
    let a = c.numer().abs();
    let b = c.denom();
    if factor.is_empty() {
        write!(f, "{a}")?;
    } else if a.is_one() {
        f.write_str(factor)?;
    } else {
        write!(f, "{a}{factor}")?;
    }
    if !b.is_one() {
        write!(f, "/{b}")?;
    }
    Ok(())
}

/// Exact constant `sum_k c_k e^k`; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ExactExpValue {
    coeffs: BTreeMap<u32, BigRational>,
}

impl ExactExpValue {
    pub fn zero() -> Self {
        ExactExpValue::default()
    }

    pub fn rational(c: BigRational) -> Self {
        let mut v = Self::zero();
        v.add_term(0, c);
        v
    }

    /// Builds from `(k, c_k)` pairs.
    pub fn from_terms<I: IntoIterator<Item = (u32, BigRational)>>(it: I) -> Self {
        let mut v = Self::zero();
        for (k, c) in it {
            v.add_term(k, c);
        }
        v
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, BigRational> {
        &self.coeffs
    }

    pub fn coeff(&self, k: u32) -> BigRational {
        self.coeffs.get(&k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.keys().all(|&k| k == 0)
    }

    pub fn add_term(&mut self, k: u32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let sum = match self.coeffs.remove(&k) {
            Some(d) => d + c,
            None => c,
        };
        if !sum.is_zero() {
            self.coeffs.insert(k, sum);
        }
    }

    pub fn scale(&self, c: &BigRational) -> ExactExpValue {
        Self::from_terms(self.coeffs.iter().map(|(&k, a)| (k, a * c)))
    }

    /// Rational approximation within `10^-digits` of the true value.
    pub fn approx(&self, digits: u32) -> BigRational {
        let scale_mag = self
            .coeffs
            .values()
            .fold(BigRational::one(), |acc, c| acc + c.abs());
        // each e^k carries relative error below 10^-(digits + extra)
        let extra = scale_mag.to_integer().bits() as u32 / 3 + 2;
        self.coeffs
            .iter()
            .fold(BigRational::zero(), |acc, (&k, c)| {
                acc + c * exp_approx(k, digits + extra)
            })
    }

    /// Correctly rounded to within a few ulps of the true value.
    pub fn to_f64(&self) -> f64 {
        self.approx(40).to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal expansion truncated toward zero after `places` digits.
    pub fn to_decimal(&self, places: u32) -> String {
        let v = self.approx(places + 10);
        decimal_string(&v, places)
    }
}

impl Add for &ExactExpValue {
    type Output = ExactExpValue;
    fn add(self, o: &ExactExpValue) -> ExactExpValue {
        let mut v = self.clone();
        for (&k, c) in &o.coeffs {
            v.add_term(k, c.clone());
        }
        v
    }
}

impl Sub for &ExactExpValue {
    type Output = ExactExpValue;
    fn sub(self, o: &ExactExpValue) -> ExactExpValue {
        self + &o.scale(&rat(-1))
    }
}

/// Symbolic form, highest power of `e` first, e.g.
/// `e^4/128 - e^2/8 + 233/384`.
impl fmt::Display for ExactExpValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (i, (&k, c)) in self.coeffs.iter().rev().enumerate() {
            let factor = match k {
                0 => String::new(),
                1 => String::from("e"),
                _ => alloc::format!("e^{k}"),
            };
            write_signed_term(f, c, &factor, i == 0)?;
        }
        Ok(())
    }
}

/// `e^k` as a rational within relative error `10^-digits`.
pub fn exp_approx(k: u32, digits: u32) -> BigRational {
    // Taylor series with common denominator N!; the tail after j >= 2k is
    // bounded by twice the last term.
    let kk = BigInt::from(k);
    let bound = BigInt::from(10u32).pow(digits + 1);
    let mut num = BigInt::one(); // k^j
    let mut fact = BigInt::one(); // j!
    let mut sum = BigRational::one();
    let mut j = 0u32;
    loop {
        j += 1;
        num *= &kk;
        fact *= BigInt::from(j);
        sum += BigRational::new(num.clone(), fact.clone());
        if j >= 2 * k && &num * &bound < fact {
            return sum;
        }
    }
}

/// `v` truncated to `places` decimals.
pub fn decimal_string(v: &BigRational, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let scaled = (v.abs() * BigRational::from_integer(scale.clone())).to_integer();
    let (int, frac) = scaled.div_rem(&scale);
    let mut s = String::new();
    if v.is_negative() {
        s.push('-');
    }
    let _ = write!(s, "{int}");
    if places > 0 {
        let digits = alloc::format!("{frac}");
        s.push('.');
        for _ in digits.len()..places as usize {
            s.push('0');
        }
        s.push_str(&digits);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn poly(c: &[(i64, i64)]) -> Poly {
        Poly::from_coeffs(c.iter().map(|&(a, b)| r(a, b)).collect())
    }

    fn g_leaf() -> ExpPoly {
        &ExpPoly::exp(2).scale(&r(1, 2)) - &ExpPoly::one().scale(&r(1, 2))
    }

    #[test]
    fn ring_operations() {
        assert_eq!(&ExpPoly::exp(2) * &ExpPoly::exp(2), ExpPoly::exp(4));
        let x = ExpPoly::term(0, Poly::x());
        let xe2 = ExpPoly::term(2, Poly::x());
        assert_eq!(&x * &xe2, ExpPoly::term(2, poly(&[(0, 1), (0, 1), (1, 1)])));
        let sq = &g_leaf() * &g_leaf();
        let want = &(&ExpPoly::exp(4) - &ExpPoly::exp(2).scale(&r(2, 1))) + &ExpPoly::one();
        assert_eq!(sq, want.scale(&r(1, 4)));
        assert!((&sq - &sq).is_zero());
    }

    #[test]
    fn kernel_of_constants() {
        assert!(ExpPoly::zero().kernel_integral().is_zero());
        assert_eq!(ExpPoly::one().kernel_integral(), g_leaf());
    }

    #[test]
    fn kernel_of_leaf_square_is_cherry_function() {
        let g2 = (&g_leaf() * &g_leaf()).kernel_integral();
        let want = ExpPoly::term(4, poly(&[(1, 8)]));
        let want = &want + &ExpPoly::term(2, poly(&[(0, 1), (-1, 2)]));
        let want = &want + &ExpPoly::one().scale(&r(-1, 8));
        assert_eq!(g2, want);
    }

    #[test]
    fn kernel_satisfies_its_differential_equation() {
        let f = &ExpPoly::term(0, poly(&[(3, 1), (0, 1), (-2, 5)]))
            + &(&ExpPoly::term(2, poly(&[(1, 1), (1, 7)])) + &ExpPoly::term(6, poly(&[(0, 1), (0, 1), (0, 1), (1, 1)])));
        let big_f = f.kernel_integral();
        assert!(big_f.at_zero().is_zero());
        assert_eq!(big_f.derivative(), &f + &big_f.scale(&r(2, 1)));
    }

    #[test]
    fn definite_integrals() {
        // int_0^1 e^{2x} dx = (e^2 - 1)/2
        let v = ExpPoly::exp(2).integral_0_1();
        assert_eq!(v, ExactExpValue::from_terms([(2, r(1, 2)), (0, r(-1, 2))]));
        // int_0^1 x e^x dx = 1
        let v = ExpPoly::term(1, Poly::x()).integral_0_1();
        assert_eq!(v, ExactExpValue::rational(r(1, 1)));
        // int_0^1 x^2 dx = 1/3
        let v = ExpPoly::term(0, poly(&[(0, 1), (0, 1), (1, 1)])).integral_0_1();
        assert_eq!(v, ExactExpValue::rational(r(1, 3)));
    }

    #[test]
    fn symbolic_and_numeric_forms() {
        let v = ExactExpValue::from_terms([(4, r(1, 128)), (2, r(-1, 8)), (0, r(233, 384))]);
        assert_eq!(v.to_string(), "e^4/128 - e^2/8 + 233/384");
        assert_eq!(v.to_decimal(10), "0.1096868681");
        let w = ExactExpValue::from_terms([(2, r(-11, 512)), (1, r(3, 1))]);
        assert_eq!(w.to_string(), "-11e^2/512 + 3e");
        assert_eq!(ExactExpValue::zero().to_string(), "0");
        assert!((v.to_f64() - 0.1096868681009414).abs() < 1e-10);
    }

    #[test]
    fn exp_approximation() {
        let e = exp_approx(1, 30);
        let diff = &e - r(2_718_281_828_459_045, 1_000_000_000_000_000);
        assert!(diff.abs() < r(1, 1_000_000_000_000_000));
        assert_eq!(decimal_string(&exp_approx(10, 30), 8), "22026.46579480");
        assert_eq!(decimal_string(&r(-1, 8), 3), "-0.125");
        assert_eq!(decimal_string(&r(1, 200), 4), "0.0050");
    }
}
